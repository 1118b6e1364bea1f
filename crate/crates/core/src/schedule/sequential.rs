use crate::error::{Error, Result};
use crate::grid::{Axis, Grid2D};
use crate::kernel::sweep_strip;
use crate::state::GasModel;

/// Sweeps every strip along `axis` in index order.
fn sweep_all(grid: &mut Grid2D, axis: Axis, dt: f64, step: usize, model: GasModel) -> Result<()> {
    let (across, len) = match axis {
        Axis::Column => (grid.ny(), grid.nx()),
        Axis::Row => (grid.nx(), grid.ny()),
    };
    for index in 1..=across {
        let strip = grid.read_strip(axis, index, 1, len)?;
        let out = sweep_strip(&strip, dt, model).map_err(|e| e.in_sweep(step, axis, index))?;
        grid.write_strip(axis, index, 1, len, &out)?;
    }
    Ok(())
}

/// One split step with a given `dt`: column sweep, then row sweep, each
/// preceded by a wall-boundary fill.
pub fn step_sequential(grid: &mut Grid2D, model: GasModel, dt: f64, step: usize) -> Result<()> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::Domain(format!("time step must be positive and finite, got {dt}")));
    }
    grid.apply_boundary();
    sweep_all(grid, Axis::Column, dt, step, model)?;
    grid.apply_boundary();
    sweep_all(grid, Axis::Row, dt, step, model)
}

/// Reference strategy: `steps` CFL-limited steps on one thread.
pub fn run_sequential(grid: &mut Grid2D, model: GasModel, steps: usize) -> Result<()> {
    for step in 0..steps {
        grid.apply_boundary();
        let dt = grid.compute_dt(model)?;
        step_sequential(grid, model, dt, step)?;
    }
    Ok(())
}

/// Steps until `t_end`, clipping the final step to land on it exactly.
/// Returns the number of steps taken.
pub fn run_sequential_until(grid: &mut Grid2D, model: GasModel, t_end: f64) -> Result<usize> {
    if !(t_end.is_finite() && t_end >= 0.0) {
        return Err(Error::Domain(format!("end time must be finite and non-negative, got {t_end}")));
    }
    let mut t = 0.0;
    let mut step = 0;
    while t < t_end {
        grid.apply_boundary();
        let dt = grid.compute_dt(model)?.min(t_end - t);
        step_sequential(grid, model, dt, step)?;
        t = if dt == t_end - t { t_end } else { t + dt };
        step += 1;
    }
    Ok(step)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::ConservedState;

    #[test]
    fn uniform_gas_is_unchanged() {
        let mut g = Grid2D::uniform(8, 6, 0.1, 0.1, ConservedState::new(1.0, 0.0, 0.0, 2.5)).unwrap();
        let before: Vec<_> = g.interior().collect();
        run_sequential(&mut g, GasModel::default(), 3).unwrap();
        let after: Vec<_> = g.interior().collect();
        assert_eq!(before, after);
    }

    #[test]
    fn until_lands_on_end_time() {
        let mut g = Grid2D::uniform(6, 6, 0.1, 0.1, ConservedState::new(1.0, 0.0, 0.0, 2.5)).unwrap();
        // dt = 0.8 * 0.1 / sqrt(1.4) ~ 0.0676, so 0.1 takes a full and a clipped step
        assert_eq!(run_sequential_until(&mut g, GasModel::default(), 0.1).unwrap(), 2);
        assert_eq!(run_sequential_until(&mut g, GasModel::default(), 0.0).unwrap(), 0);
    }

    #[test]
    fn rejects_bad_dt() {
        let mut g = Grid2D::uniform(6, 6, 0.1, 0.1, ConservedState::new(1.0, 0.0, 0.0, 2.5)).unwrap();
        assert!(step_sequential(&mut g, GasModel::default(), 0.0, 0).is_err());
        assert!(step_sequential(&mut g, GasModel::default(), f64::NAN, 0).is_err());
    }

    #[test]
    fn failure_names_step_axis_and_strip() {
        let mut g = Grid2D::uniform(6, 6, 0.1, 0.1, ConservedState::new(1.0, 0.0, 0.0, 2.5)).unwrap();
        g.set_cell(3, 4, ConservedState::new(1.0, 0.0, 0.0, 1e6)).unwrap();
        let err = step_sequential(&mut g, GasModel::default(), 1.0, 7).unwrap_err();
        assert_eq!(err.category(), "positivity");
        match err {
            Error::Sweep { step, axis, strip, .. } => {
                assert_eq!((step, axis), (7, Axis::Column));
                assert!((1..=6).contains(&strip));
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
