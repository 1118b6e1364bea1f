use std::mem;

use super::team::{chunk, run_team, Phases, SweepCtx};
use super::RunOptions;
use crate::error::Result;
use crate::grid::{Axis, Grid2D};
use crate::kernel::{sweep_strip, StateStrip};
use crate::state::GasModel;

/// Each sweep is split into contiguous, equal shares of whole-grid strips.
struct FineGrain<'o> {
    nx: usize,
    ny: usize,
    workers: usize,
    model: GasModel,
    opts: &'o RunOptions<'o>,
}

impl Phases for FineGrain<'_> {
    fn dt_block(&self, worker: usize) -> Option<(std::ops::RangeInclusive<usize>, std::ops::RangeInclusive<usize>)> {
        chunk(self.ny, self.workers, worker).map(|js| (1..=self.nx, js))
    }

    fn sweep(&self, ctx: &SweepCtx<'_, '_>) -> Result<()> {
        let (across, len) = match ctx.axis {
            Axis::Column => (self.ny, self.nx),
            Axis::Row => (self.nx, self.ny),
        };
        let Some(mine) = chunk(across, self.workers, ctx.worker) else {
            return Ok(());
        };
        let _lease = self.opts.ledger.map(|l| l.lease_strip());
        let dx = ctx.view.width_along(ctx.axis);
        let mut cells = Vec::with_capacity(len + 4);
        for index in mine {
            // SAFETY: strips are disjoint and a sweep only touches its own strip.
            unsafe { ctx.view.read_strip_into(ctx.axis, index, 1, len, &mut cells) };
            let strip = StateStrip {
                cells: mem::take(&mut cells),
                dx,
            };
            let out = sweep_strip(&strip, ctx.dt, self.model).map_err(|e| e.in_sweep(ctx.step, ctx.axis, index))?;
            cells = strip.cells;
            unsafe { ctx.view.write_strip(ctx.axis, index, 1, &out) };
        }
        Ok(())
    }
}

/// Data-parallel strategy: within each sweep, strips are independent and
/// divided statically among `workers` threads.
pub fn run_fine_grain(grid: &mut Grid2D, model: GasModel, steps: usize, workers: usize, opts: &RunOptions<'_>) -> Result<()> {
    let phases = FineGrain {
        nx: grid.nx(),
        ny: grid.ny(),
        workers,
        model,
        opts,
    };
    run_team(grid, model, steps, workers, &phases)
}
