//! Directionally split second-order Godunov solver for the 2D compressible
//! Euler equations, with four interchangeable parallel strategies that
//! produce bit-identical results.

// `!(x > 0.0)` style guards also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod cases;
pub mod decomp;
pub mod error;
pub mod grid;
pub mod kernel;
pub mod oracle;
pub mod schedule;
pub mod state;
pub mod validate;

pub use cases::{init_point_explosion, init_sod, init_uniform, Case};
pub use decomp::{assemble_strip_from_interfaces, extract_interface, DomainDecomposition, InterfaceBuffer, Subdomain};
pub use error::{Error, Field, Result};
pub use grid::{Axis, Grid2D};
pub use kernel::{interface_fluxes, riemann_flux, slope_minmod, sweep_strip, Flux, StateStrip};
pub use schedule::{
    run_coarse_grain, run_fine_grain, run_sequential, run_task_graph, MemoryLedger, Policy, RunOptions, Strategy,
};
pub use state::{cons_to_prim, prim_to_cons, ConservedState, GasModel, PrimitiveState};

/// Guide chapters, compiled and run as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/kernel.md")]
    mod kernel {}
    #[doc = include_str!("../../../book/src/grid.md")]
    mod grid {}
    #[doc = include_str!("../../../book/src/strategies.md")]
    mod strategies {}
    #[doc = include_str!("../../../book/src/task-graph.md")]
    mod task_graph {}
    #[doc = include_str!("../../../book/src/validation.md")]
    mod validation {}
    #[doc = include_str!("../../../book/src/benchmarking.md")]
    mod benchmarking {}
}
