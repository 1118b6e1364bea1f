//! The four ways of advancing a grid. All of them produce bit-identical
//! results: each cell update depends only on its strip's pre-sweep values,
//! and the time step is a minimum, which is independent of evaluation order.

mod coarse;
mod fine;
pub mod graph;
pub mod ledger;
pub mod progress;
pub mod runtime;
mod sequential;
mod task;
mod team;

use std::fmt;
use std::time::Duration;

pub use coarse::run_coarse_grain;
pub use fine::run_fine_grain;
pub use graph::{build_sweep_tasks, InterfaceId, TaskGraph, TaskKind, TaskRecord};
pub use ledger::{MemoryLedger, MemorySnapshot, StripLease};
pub use progress::{ProgressTable, Wait};
pub use runtime::{execute_graph, Policy, TaskTeam};
pub use sequential::{run_sequential, run_sequential_until, step_sequential};
pub use task::run_task_graph;

use crate::decomp::DomainDecomposition;
use crate::error::{Error, Result};
use crate::grid::Grid2D;
use crate::state::GasModel;

/// Default limit on a single coarse-grain neighbor wait.
pub const DEFAULT_SPIN_TIMEOUT: Duration = Duration::from_secs(30);

/// Tunables shared by the parallel strategies.
#[derive(Debug, Clone, Copy)]
pub struct RunOptions<'a> {
    /// Ready-task order for the task strategy.
    pub policy: Policy,
    pub seed: u64,
    /// Coarse-grain neighbor waits give up with a deadlock error after this.
    pub spin_timeout: Duration,
    /// Receives strip-temporary and interface-buffer accounting.
    pub ledger: Option<&'a MemoryLedger>,
}

impl Default for RunOptions<'_> {
    fn default() -> Self {
        Self {
            policy: Policy::Fifo,
            seed: 0,
            spin_timeout: DEFAULT_SPIN_TIMEOUT,
            ledger: None,
        }
    }
}

/// A strategy together with its parallel layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    Sequential,
    FineGrain { workers: usize },
    CoarseGrain { p_rows: usize, p_cols: usize },
    TaskGraph { workers: usize, p_rows: usize, p_cols: usize },
}

impl Strategy {
    pub fn name(&self) -> &'static str {
        match self {
            Strategy::Sequential => "sequential",
            Strategy::FineGrain { .. } => "fine_grain",
            Strategy::CoarseGrain { .. } => "coarse_grain",
            Strategy::TaskGraph { .. } => "task_graph",
        }
    }

    pub fn workers(&self) -> usize {
        match *self {
            Strategy::Sequential => 1,
            Strategy::FineGrain { workers } | Strategy::TaskGraph { workers, .. } => workers,
            Strategy::CoarseGrain { p_rows, p_cols } => p_rows * p_cols,
        }
    }

    /// Advances `grid` by `steps` steps.
    pub fn run(&self, grid: &mut Grid2D, model: GasModel, steps: usize, opts: &RunOptions<'_>) -> Result<()> {
        match *self {
            Strategy::Sequential => run_sequential(grid, model, steps),
            Strategy::FineGrain { workers } => run_fine_grain(grid, model, steps, workers, opts),
            Strategy::CoarseGrain { p_rows, p_cols } => {
                let decomp = DomainDecomposition::for_grid(grid, p_rows, p_cols)?;
                run_coarse_grain(grid, model, steps, &decomp, opts)
            }
            Strategy::TaskGraph { workers, p_rows, p_cols } => {
                let decomp = DomainDecomposition::for_grid(grid, p_rows, p_cols)?;
                run_task_graph(grid, model, steps, &decomp, workers, opts)
            }
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Strategy::Sequential => f.write_str("sequential"),
            Strategy::FineGrain { workers } => write!(f, "fine_grain(workers={workers})"),
            Strategy::CoarseGrain { p_rows, p_cols } => write!(f, "coarse_grain({p_rows}x{p_cols})"),
            Strategy::TaskGraph { workers, p_rows, p_cols } => {
                write!(f, "task_graph({p_rows}x{p_cols}, workers={workers})")
            }
        }
    }
}

/// Strategy family names accepted on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StrategyKind {
    Sequential,
    FineGrain,
    CoarseGrain,
    TaskGraph,
}

impl std::str::FromStr for StrategyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").to_ascii_lowercase().as_str() {
            "sequential" => Ok(Self::Sequential),
            "fine_grain" | "fine" => Ok(Self::FineGrain),
            "coarse_grain" | "coarse" => Ok(Self::CoarseGrain),
            "task_graph" | "task" | "tasks" => Ok(Self::TaskGraph),
            other => Err(Error::Config(format!(
                "unknown strategy {other:?} (sequential, fine_grain, coarse_grain, task_graph)"
            ))),
        }
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Sequential => "sequential",
            Self::FineGrain => "fine_grain",
            Self::CoarseGrain => "coarse_grain",
            Self::TaskGraph => "task_graph",
        })
    }
}
