use std::mem;
use std::ops::RangeInclusive;
use std::time::Duration;

use super::progress::{ProgressTable, Wait};
use super::team::{run_team, Phases, SweepCtx};
use super::RunOptions;
use crate::decomp::DomainDecomposition;
use crate::error::{Error, Result};
use crate::grid::{Axis, Grid2D};
use crate::kernel::{sweep_strip, StateStrip};
use crate::state::GasModel;

/// One worker per subdomain. Strips are swept in index order with the
/// READ, publish, COMPUTE, wait, WRITE protocol, so a worker may compute
/// strip `k + 1` while its neighbors are still reading strip `k`.
struct CoarseGrain<'d, 'o> {
    decomp: &'d DomainDecomposition,
    table: ProgressTable,
    model: GasModel,
    spin_timeout: Duration,
    opts: &'o RunOptions<'o>,
}

impl Phases for CoarseGrain<'_, '_> {
    fn dt_block(&self, worker: usize) -> Option<(RangeInclusive<usize>, RangeInclusive<usize>)> {
        let sub = self.decomp.sub(worker / self.decomp.p_cols(), worker % self.decomp.p_cols());
        Some((sub.imin..=sub.imax, sub.jmin..=sub.jmax))
    }

    fn prepare(&self, _axis: Axis) {
        self.table.reset();
    }

    fn sweep(&self, ctx: &SweepCtx<'_, '_>) -> Result<()> {
        let (i, j) = (ctx.worker / self.decomp.p_cols(), ctx.worker % self.decomp.p_cols());
        let sub = self.decomp.sub(i, j);
        let neighbors: Vec<usize> = [
            self.decomp.prev_along(ctx.axis, i, j),
            self.decomp.next_along(ctx.axis, i, j),
        ]
        .into_iter()
        .flatten()
        .map(|(a, b)| self.decomp.id(a, b))
        .collect();
        let (lo, hi) = sub.along(ctx.axis);
        let (first, last) = sub.across(ctx.axis);
        let dx = ctx.view.width_along(ctx.axis);
        let context = |e: Error, index| e.in_sweep(ctx.step, ctx.axis, index).in_subdomain(i, j);

        let _lease = self.opts.ledger.map(|l| l.lease_strip());
        let mut cells = Vec::with_capacity(hi - lo + 5);
        for (k, index) in (first..=last).enumerate() {
            // READ: own cells plus two cells from each neighbor. A neighbor
            // writes this strip only after observing our publication.
            unsafe { ctx.view.read_strip_into(ctx.axis, index, lo, hi, &mut cells) };
            self.table
                .publish_progress(ctx.worker, k + 1)
                .map_err(|e| context(e, index))?;
            let strip = StateStrip {
                cells: mem::take(&mut cells),
                dx,
            };
            let out = sweep_strip(&strip, ctx.dt, self.model).map_err(|e| context(e, index))?;
            cells = strip.cells;
            let wait = self
                .table
                .wait_neighbors(ctx.worker, k + 1, &neighbors, self.spin_timeout, ctx.abort)
                .map_err(|e| context(e, index))?;
            if wait == Wait::Aborted {
                return Ok(());
            }
            // WRITE: every neighbor has read this strip.
            unsafe { ctx.view.write_strip(ctx.axis, index, lo, &out) };
        }
        Ok(())
    }
}

/// Domain-decomposition strategy with one thread per subdomain and
/// point-to-point progress synchronization inside each sweep.
pub fn run_coarse_grain(
    grid: &mut Grid2D,
    model: GasModel,
    steps: usize,
    decomp: &DomainDecomposition,
    opts: &RunOptions<'_>,
) -> Result<()> {
    if decomp.extents() != (grid.nx(), grid.ny()) {
        return Err(Error::Decomposition(format!(
            "decomposition of {:?} applied to a {}x{} grid",
            decomp.extents(),
            grid.nx(),
            grid.ny()
        )));
    }
    let phases = CoarseGrain {
        decomp,
        table: ProgressTable::new(decomp.len()),
        model,
        spin_timeout: opts.spin_timeout,
        opts,
    };
    run_team(grid, model, steps, decomp.len(), &phases)
}
