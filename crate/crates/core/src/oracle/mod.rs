//! Independent references for checking the solver: the exact Riemann
//! solution and whole-grid audits.

mod audit;
mod riemann;

pub use audit::{
    compare_grids, conservation_totals, interior_sums, mirror_asymmetry, CellDifference, CompareMode, Comparison, Totals, VARIABLES,
};
pub use riemann::{bisection_pressure, exact_riemann, sample_riemann, sod_profile, sod_states, Wave, WaveStructure};
