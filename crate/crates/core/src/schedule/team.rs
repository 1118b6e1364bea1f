//! Step loop shared by the parallel strategies: a fixed team of scoped
//! threads separated by barriers, with only the sweep phase differing.

use std::ops::RangeInclusive;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::{Barrier, Mutex};

use crossbeam_utils::CachePadded;

use crate::decomp::split;
use crate::error::{Error, Result};
use crate::grid::{Axis, Grid2D, GridView};
use crate::state::GasModel;

/// Contiguous share `k` of `1..=n` split among `parts`, `None` if empty.
pub(crate) fn chunk(n: usize, parts: usize, k: usize) -> Option<RangeInclusive<usize>> {
    let (lo, hi) = split(n, parts)[k];
    (lo <= hi).then_some(lo..=hi)
}

pub(crate) struct SweepCtx<'a, 'g> {
    pub view: &'a GridView<'g>,
    pub worker: usize,
    pub axis: Axis,
    pub dt: f64,
    pub step: usize,
    /// Raised once any worker has failed.
    pub abort: &'a AtomicBool,
}

pub(crate) trait Phases: Sync {
    /// Interior block whose time-step bound `worker` evaluates.
    fn dt_block(&self, worker: usize) -> Option<(RangeInclusive<usize>, RangeInclusive<usize>)>;

    /// Runs on worker 0 alone, after the boundary fill and before the sweep.
    fn prepare(&self, _axis: Axis) {}

    fn sweep(&self, ctx: &SweepCtx<'_, '_>) -> Result<()>;
}

struct Shared<'a, 'g, P> {
    view: GridView<'g>,
    phases: &'a P,
    model: GasModel,
    steps: usize,
    barrier: Barrier,
    abort: AtomicBool,
    first_error: Mutex<Option<Error>>,
    dt_parts: Vec<CachePadded<AtomicU64>>,
}

impl<P: Phases> Shared<'_, '_, P> {
    fn fail(&self, e: Error) {
        let mut slot = self.first_error.lock().unwrap_or_else(|p| p.into_inner());
        if slot.is_none() {
            *slot = Some(e);
        }
        self.abort.store(true, Ordering::SeqCst);
    }

    fn aborted(&self) -> bool {
        self.abort.load(Ordering::SeqCst)
    }

    /// Boundary fill plus per-sweep setup; other workers wait at the
    /// following barrier.
    fn lead(&self, worker: usize, axis: Axis) {
        if worker == 0 {
            // SAFETY: all other workers are parked at the barrier.
            unsafe { self.view.apply_boundary() };
            self.phases.prepare(axis);
        }
        self.barrier.wait();
    }

    fn worker_loop(&self, worker: usize) {
        for step in 0..self.steps {
            self.lead(worker, Axis::Column);

            let part = match self.phases.dt_block(worker) {
                // SAFETY: no writer is active between these barriers.
                Some((is, js)) => match unsafe { self.view.time_bound(is, js, self.model) } {
                    Ok(b) => b.unwrap_or(f64::INFINITY),
                    Err(e) => {
                        self.fail(e);
                        f64::INFINITY
                    }
                },
                None => f64::INFINITY,
            };
            self.dt_parts[worker].store(part.to_bits(), Ordering::Relaxed);
            self.barrier.wait();
            if self.aborted() {
                return;
            }
            let bound = self
                .dt_parts
                .iter()
                .map(|p| f64::from_bits(p.load(Ordering::Relaxed)))
                .fold(f64::INFINITY, f64::min);
            let dt = self.model.cfl * bound;

            for axis in [Axis::Column, Axis::Row] {
                if axis == Axis::Row {
                    self.lead(worker, axis);
                }
                let ctx = SweepCtx {
                    view: &self.view,
                    worker,
                    axis,
                    dt,
                    step,
                    abort: &self.abort,
                };
                if let Err(e) = self.phases.sweep(&ctx) {
                    self.fail(e);
                }
                self.barrier.wait();
                // every worker observes the same flag after the barrier
                if self.aborted() {
                    return;
                }
            }
        }
    }
}

/// Advances `grid` by `steps` steps with `workers` threads. The first error
/// raised by any worker is returned after the team has drained.
pub(crate) fn run_team<P: Phases>(
    grid: &mut Grid2D,
    model: GasModel,
    steps: usize,
    workers: usize,
    phases: &P,
) -> Result<()> {
    if workers == 0 {
        return Err(Error::Config("at least one worker is required".into()));
    }
    let shared = Shared {
        view: grid.view(),
        phases,
        model,
        steps,
        barrier: Barrier::new(workers),
        abort: AtomicBool::new(false),
        first_error: Mutex::new(None),
        dt_parts: (0..workers)
            .map(|_| CachePadded::new(AtomicU64::new(f64::INFINITY.to_bits())))
            .collect(),
    };
    std::thread::scope(|s| {
        for worker in 1..workers {
            let shared = &shared;
            s.spawn(move || shared.worker_loop(worker));
        }
        shared.worker_loop(0);
    });
    match shared.first_error.into_inner().unwrap_or_else(|p| p.into_inner()) {
        Some(e) => Err(e),
        None => Ok(()),
    }
}
