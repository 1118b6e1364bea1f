use std::mem;
use std::ops::RangeInclusive;
use std::sync::RwLock;

use super::graph::{build_sweep_tasks, TaskGraph, TaskKind, TaskRecord};
use super::ledger::MemoryLedger;
use super::runtime::TaskTeam;
use super::team::{chunk, run_team, Phases, SweepCtx};
use super::RunOptions;
use crate::decomp::{assemble_into, DomainDecomposition, InterfaceBuffer};
use crate::error::{Error, Result};
use crate::grid::{Axis, Grid2D};
use crate::kernel::{sweep_strip, StateStrip};
use crate::state::GasModel;

/// Every interface buffer of both sweep axes, allocated once per run and
/// refilled by `read_interface` tasks.
struct InterfaceSet<'l> {
    /// Indexed by `[axis][owner id]`; `None` where the owner has no successor.
    slots: [Vec<Option<RwLock<InterfaceBuffer>>>; 2],
    buffers: usize,
    bytes: usize,
    ledger: Option<&'l MemoryLedger>,
}

fn axis_slot(axis: Axis) -> usize {
    match axis {
        Axis::Column => 0,
        Axis::Row => 1,
    }
}

impl<'l> InterfaceSet<'l> {
    fn allocate(decomp: &DomainDecomposition, ledger: Option<&'l MemoryLedger>) -> Result<Self> {
        let mut buffers = 0;
        let mut bytes = 0;
        let mut slots = [Vec::new(), Vec::new()];
        for axis in [Axis::Column, Axis::Row] {
            let slot = &mut slots[axis_slot(axis)];
            for ((i, j), _) in decomp.iter() {
                let buf = match decomp.next_along(axis, i, j) {
                    Some(_) => {
                        let b = InterfaceBuffer::allocate(decomp, i, j, axis)?;
                        buffers += 1;
                        bytes += b.bytes();
                        Some(RwLock::new(b))
                    }
                    None => None,
                };
                slot.push(buf);
            }
        }
        if let Some(l) = ledger {
            l.add_interfaces(buffers, bytes);
        }
        Ok(Self {
            slots,
            buffers,
            bytes,
            ledger,
        })
    }

    fn get(&self, decomp: &DomainDecomposition, axis: Axis, owner: (usize, usize)) -> Result<&RwLock<InterfaceBuffer>> {
        self.slots[axis_slot(axis)][decomp.id(owner.0, owner.1)]
            .as_ref()
            .ok_or(Error::NoNeighbor {
                i: owner.0,
                j: owner.1,
                axis,
            })
    }
}

impl Drop for InterfaceSet<'_> {
    fn drop(&mut self) {
        if let Some(l) = self.ledger {
            l.remove_interfaces(self.buffers, self.bytes);
        }
    }
}

struct TaskStrategy<'d, 'o> {
    decomp: &'d DomainDecomposition,
    graphs: [TaskGraph; 2],
    team: TaskTeam,
    interfaces: InterfaceSet<'o>,
    nx: usize,
    workers: usize,
    model: GasModel,
    opts: &'o RunOptions<'o>,
}

impl TaskStrategy<'_, '_> {
    fn run_task(&self, ctx: &SweepCtx<'_, '_>, rec: &TaskRecord) -> Result<()> {
        let (i, j) = rec.subject;
        match rec.kind {
            TaskKind::ReadInterface => {
                let lock = self.interfaces.get(self.decomp, ctx.axis, rec.subject)?;
                let mut buf = lock.write().unwrap_or_else(|p| p.into_inner());
                // SAFETY: the two subdomains sharing this interface compute
                // only after this task completes.
                unsafe { buf.fill_from(ctx.view) };
                Ok(())
            }
            TaskKind::ComputeDomain => {
                let sub = self.decomp.sub(i, j);
                let read = |owner| -> Result<_> {
                    let lock = self.interfaces.get(self.decomp, ctx.axis, owner)?;
                    Ok(lock.read().unwrap_or_else(|p| p.into_inner()))
                };
                let lo_guard = self.decomp.prev_along(ctx.axis, i, j).map(read).transpose()?;
                let hi_guard = self.decomp.next_along(ctx.axis, i, j).map(|_| read((i, j))).transpose()?;
                let (lo, _) = sub.along(ctx.axis);
                let (first, last) = sub.across(ctx.axis);
                let dx = ctx.view.width_along(ctx.axis);

                let _lease = self.opts.ledger.map(|l| l.lease_strip());
                let mut cells = Vec::new();
                for index in first..=last {
                    // SAFETY: only this task writes the subdomain's cells, and
                    // every reader of them is one of its dependencies.
                    unsafe {
                        assemble_into(
                            ctx.view,
                            sub,
                            ctx.axis,
                            index,
                            lo_guard.as_deref(),
                            hi_guard.as_deref(),
                            &mut cells,
                        )
                    };
                    let strip = StateStrip {
                        cells: mem::take(&mut cells),
                        dx,
                    };
                    let out = sweep_strip(&strip, ctx.dt, self.model)
                        .map_err(|e| e.in_sweep(ctx.step, ctx.axis, index).in_subdomain(i, j))?;
                    cells = strip.cells;
                    unsafe { ctx.view.write_strip(ctx.axis, index, lo, &out) };
                }
                Ok(())
            }
        }
    }
}

impl Phases for TaskStrategy<'_, '_> {
    fn dt_block(&self, worker: usize) -> Option<(RangeInclusive<usize>, RangeInclusive<usize>)> {
        let (_, ny) = self.decomp.extents();
        chunk(self.nx, self.workers, worker).map(|is| (is, 1..=ny))
    }

    fn prepare(&self, axis: Axis) {
        self.team.reset(&self.graphs[axis_slot(axis)]);
    }

    fn sweep(&self, ctx: &SweepCtx<'_, '_>) -> Result<()> {
        let graph = &self.graphs[axis_slot(ctx.axis)];
        self.team.execute(graph, |_, rec| self.run_task(ctx, rec))
    }
}

/// Task strategy: each sweep is a dependency graph of interface copies and
/// whole-subdomain updates executed by `workers` threads under the policy
/// in `opts`.
pub fn run_task_graph(
    grid: &mut Grid2D,
    model: GasModel,
    steps: usize,
    decomp: &DomainDecomposition,
    workers: usize,
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
    let strategy = TaskStrategy {
        decomp,
        graphs: [
            build_sweep_tasks(decomp, Axis::Column)?,
            build_sweep_tasks(decomp, Axis::Row)?,
        ],
        team: TaskTeam::new(opts.policy, opts.seed),
        interfaces: InterfaceSet::allocate(decomp, opts.ledger)?,
        nx: grid.nx(),
        workers,
        model,
        opts,
    };
    run_team(grid, model, steps, workers, &strategy)
}
