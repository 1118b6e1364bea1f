//! Grid-level audits: conserved totals, cell-by-cell comparison and mirror
//! symmetry.

use std::fmt;

use crate::error::{Error, Result};
use crate::grid::Grid2D;
use crate::state::ConservedState;

/// Domain integrals of the conserved variables.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Totals {
    pub mass: f64,
    pub mom_x: f64,
    pub mom_y: f64,
    pub energy: f64,
}

/// Pairwise sum with a fixed split, so the result depends only on the
/// sequence of values and not on how the grid was computed.
fn pairwise_sum(values: &[f64]) -> f64 {
    const LEAF: usize = 16;
    if values.len() <= LEAF {
        return values.iter().fold(0.0, |acc, v| acc + v);
    }
    let (a, b) = values.split_at(values.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

/// Plain sums of each conserved variable over the interior, in
/// `rho, mom_x, mom_y, ener` order.
pub fn interior_sums(grid: &Grid2D) -> [f64; 4] {
    let cells: Vec<ConservedState> = grid.interior().map(|(_, _, u)| u).collect();
    std::array::from_fn(|k| {
        let v: Vec<f64> = cells.iter().map(|u| u.to_array()[k]).collect();
        pairwise_sum(&v)
    })
}

/// Interior integrals of each conserved variable, cell volume included.
pub fn conservation_totals(grid: &Grid2D) -> Totals {
    let [mass, mom_x, mom_y, energy] = interior_sums(grid).map(|s| s * grid.dx() * grid.dy());
    Totals {
        mass,
        mom_x,
        mom_y,
        energy,
    }
}

pub const VARIABLES: [&str; 4] = ["rho", "mom_x", "mom_y", "ener"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CompareMode {
    Bitwise,
    /// Passes when every per-cell relative difference is at most `rel`.
    Tolerance { rel: f64 },
}

/// First cell whose bit patterns differ.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CellDifference {
    pub variable: &'static str,
    pub i: usize,
    pub j: usize,
    pub a_bits: u64,
    pub b_bits: u64,
}

impl fmt::Display for CellDifference {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} at ({}, {}): {:#018x} ({:e}) vs {:#018x} ({:e})",
            self.variable,
            self.i,
            self.j,
            self.a_bits,
            f64::from_bits(self.a_bits),
            self.b_bits,
            f64::from_bits(self.b_bits)
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub mode: CompareMode,
    /// Interior cells scanned in row-major order, first difference kept.
    pub first_difference: Option<CellDifference>,
    /// Largest `|a - b| / max(|a|, |b|)` over all cells and variables.
    pub max_rel: f64,
    /// Per variable, `sum |a - b| / sum |b|` (zero when both sums vanish).
    pub l1_rel: [f64; 4],
}

impl Comparison {
    pub fn passed(&self) -> bool {
        match self.mode {
            CompareMode::Bitwise => self.first_difference.is_none(),
            CompareMode::Tolerance { rel } => self.max_rel <= rel,
        }
    }
}

fn relative(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if a == b {
        0.0
    } else if scale == 0.0 || !scale.is_finite() {
        f64::INFINITY
    } else {
        (a - b).abs() / scale
    }
}

/// Compares the interiors of two grids of equal shape.
pub fn compare_grids(a: &Grid2D, b: &Grid2D, mode: CompareMode) -> Result<Comparison> {
    if (a.nx(), a.ny()) != (b.nx(), b.ny()) {
        return Err(Error::Domain(format!(
            "cannot compare {}x{} with {}x{}",
            a.nx(),
            a.ny(),
            b.nx(),
            b.ny()
        )));
    }
    let mut first_difference = None;
    let mut max_rel = 0.0_f64;
    let mut diff_sum = [0.0; 4];
    let mut ref_sum = [0.0; 4];
    for ((i, j, ua), (_, _, ub)) in a.interior().zip(b.interior()) {
        let (va, vb) = (ua.to_array(), ub.to_array());
        for k in 0..4 {
            if first_difference.is_none() && va[k].to_bits() != vb[k].to_bits() {
                first_difference = Some(CellDifference {
                    variable: VARIABLES[k],
                    i,
                    j,
                    a_bits: va[k].to_bits(),
                    b_bits: vb[k].to_bits(),
                });
            }
            max_rel = max_rel.max(relative(va[k], vb[k]));
            diff_sum[k] += (va[k] - vb[k]).abs();
            ref_sum[k] += vb[k].abs();
        }
    }
    let l1_rel = std::array::from_fn(|k| {
        if diff_sum[k] == 0.0 {
            0.0
        } else {
            diff_sum[k] / ref_sum[k]
        }
    });
    Ok(Comparison {
        mode,
        first_difference,
        max_rel,
        l1_rel,
    })
}

/// Largest per-cell relative deviation from fourfold mirror symmetry about
/// the domain center lines, momentum signs flipped accordingly. Differences
/// below `floor` in absolute value are ignored, so values that should be
/// zero by symmetry do not divide by themselves.
pub fn mirror_asymmetry(grid: &Grid2D, floor: f64) -> f64 {
    let (nx, ny) = (grid.nx(), grid.ny());
    let mut worst = 0.0_f64;
    for (i, j, u) in grid.interior() {
        let (mi, mj) = ((nx + 1 - i) as isize, (ny + 1 - j) as isize);
        let images = [
            (mi, j as isize, -1.0, 1.0),
            (i as isize, mj, 1.0, -1.0),
            (mi, mj, -1.0, -1.0),
        ];
        for (ii, jj, sx, sy) in images {
            let m = grid.cell(ii, jj).expect("mirror of an interior cell is interior");
            let reflected = [m.rho, sx * m.mom_a, sy * m.mom_b, m.ener];
            for (a, b) in u.to_array().into_iter().zip(reflected) {
                if (a - b).abs() > floor {
                    worst = worst.max(relative(a, b));
                }
            }
        }
    }
    worst
}
