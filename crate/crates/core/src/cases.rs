//! Initial conditions for the benchmark and validation problems.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::grid::Grid2D;
use crate::state::{prim_to_cons, ConservedState, GasModel, PrimitiveState};

/// Ambient pressure of the point explosion, in units of `gamma - 1`.
pub const BLAST_AMBIENT_PRESSURE_SCALE: f64 = 1e-5;
/// Total energy deposited at the center of the point explosion.
pub const BLAST_DEPOSIT: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Case {
    Blast,
    Sod,
    Uniform,
}

impl FromStr for Case {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "blast" => Ok(Case::Blast),
            "sod" => Ok(Case::Sod),
            "uniform" => Ok(Case::Uniform),
            other => Err(Error::Config(format!("unknown case {other:?} (blast, sod, uniform)"))),
        }
    }
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Case::Blast => "blast",
            Case::Sod => "sod",
            Case::Uniform => "uniform",
        })
    }
}

impl Case {
    /// Builds the initial grid. The Sod tube runs along `ny` and ignores `nx`.
    pub fn init(self, nx: usize, ny: usize, model: GasModel) -> Result<Grid2D> {
        match self {
            Case::Blast => init_point_explosion(nx, ny, model),
            Case::Sod => init_sod(ny, model),
            Case::Uniform => init_uniform(nx, ny, model),
        }
    }
}

/// Indices of the cells nearest the center of `1..=n`: one for odd `n`,
/// the two tied middle cells for even `n`.
fn central(n: usize) -> Vec<usize> {
    if n % 2 == 1 {
        vec![n / 2 + 1]
    } else {
        vec![n / 2, n / 2 + 1]
    }
}

/// Point explosion on the unit square: a quiescent low-pressure gas with a
/// total energy of [`BLAST_DEPOSIT`] added at the center. With even extents
/// the deposit is shared equally by the tied central cells so the initial
/// grid is mirror symmetric in both directions.
pub fn init_point_explosion(nx: usize, ny: usize, model: GasModel) -> Result<Grid2D> {
    let (dx, dy) = (1.0 / nx as f64, 1.0 / ny as f64);
    let ambient = prim_to_cons(
        PrimitiveState::new(1.0, 0.0, 0.0, BLAST_AMBIENT_PRESSURE_SCALE * (model.gamma - 1.0)),
        model,
    )?;
    let (ci, cj) = (central(nx), central(ny));
    let share = BLAST_DEPOSIT / (ci.len() * cj.len()) as f64 / (dx * dy);
    Grid2D::from_fn(nx, ny, dx, dy, |i, j| {
        if ci.contains(&i) && cj.contains(&j) {
            ConservedState {
                ener: ambient.ener + share,
                ..ambient
            }
        } else {
            ambient
        }
    })
}

/// Sod shock tube along the row direction: `n` cells of width `1/n`, four
/// uniform transverse cells, diaphragm after cell `n / 2`.
pub fn init_sod(n: usize, model: GasModel) -> Result<Grid2D> {
    let left = prim_to_cons(PrimitiveState::new(1.0, 0.0, 0.0, 1.0), model)?;
    let right = prim_to_cons(PrimitiveState::new(0.125, 0.0, 0.0, 0.1), model)?;
    let width = 1.0 / n as f64;
    Grid2D::from_fn(4, n, width, width, |_, j| if j <= n / 2 { left } else { right })
}

/// Gas at rest with unit density and pressure.
pub fn init_uniform(nx: usize, ny: usize, model: GasModel) -> Result<Grid2D> {
    let u = prim_to_cons(PrimitiveState::new(1.0, 0.0, 0.0, 1.0), model)?;
    Grid2D::uniform(nx, ny, 1.0 / nx as f64, 1.0 / ny as f64, u)
}
