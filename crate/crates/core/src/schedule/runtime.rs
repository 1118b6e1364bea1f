//! Dependency-counting task runtime executed collectively by a fixed team of
//! threads. Ready tasks sit in one shared queue; the policy decides which one
//! an idle worker takes next.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;
use std::sync::{Condvar, Mutex, MutexGuard};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::graph::{TaskGraph, TaskRecord};
use crate::error::{Error, Result};

/// Order in which ready tasks are handed out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Policy {
    #[default]
    Fifo,
    Lifo,
    /// Uniformly random among ready tasks, from a seeded generator.
    Random,
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Policy::Fifo => "fifo",
            Policy::Lifo => "lifo",
            Policy::Random => "random",
        })
    }
}

impl FromStr for Policy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fifo" => Ok(Policy::Fifo),
            "lifo" => Ok(Policy::Lifo),
            "random" => Ok(Policy::Random),
            other => Err(Error::Config(format!("unknown policy {other:?} (fifo, lifo, random)"))),
        }
    }
}

#[derive(Debug)]
struct State {
    ready: VecDeque<usize>,
    unmet: Vec<usize>,
    done: Vec<bool>,
    remaining: usize,
    in_flight: usize,
    failed: bool,
    rng: ChaCha8Rng,
}

impl State {
    fn pop(&mut self, policy: Policy) -> Option<usize> {
        match policy {
            Policy::Fifo => self.ready.pop_front(),
            Policy::Lifo => self.ready.pop_back(),
            Policy::Random => {
                if self.ready.is_empty() {
                    None
                } else {
                    let k = self.rng.random_range(0..self.ready.len());
                    self.ready.swap_remove_back(k)
                }
            }
        }
    }
}

/// Shared scheduler state for one graph execution at a time.
#[derive(Debug)]
pub struct TaskTeam {
    policy: Policy,
    state: Mutex<State>,
    wake: Condvar,
}

impl TaskTeam {
    pub fn new(policy: Policy, seed: u64) -> Self {
        Self {
            policy,
            state: Mutex::new(State {
                ready: VecDeque::new(),
                unmet: Vec::new(),
                done: Vec::new(),
                remaining: 0,
                in_flight: 0,
                failed: false,
                rng: ChaCha8Rng::seed_from_u64(seed),
            }),
            wake: Condvar::new(),
        }
    }

    fn lock(&self) -> MutexGuard<'_, State> {
        self.state.lock().unwrap_or_else(|p| p.into_inner())
    }

    /// Arms the team for `graph`. No worker may be inside [`execute`] for a
    /// previous graph. The random stream continues across resets.
    ///
    /// [`execute`]: TaskTeam::execute
    pub fn reset(&self, graph: &TaskGraph) {
        let mut st = self.lock();
        st.unmet = (0..graph.len()).map(|t| graph.in_degree(t)).collect();
        st.done = vec![false; graph.len()];
        st.ready = (0..graph.len()).filter(|&t| st.unmet[t] == 0).collect();
        st.remaining = graph.len();
        st.in_flight = 0;
        st.failed = false;
    }

    /// Joins the execution of `graph`: repeatedly takes a ready task and runs
    /// `body` on it until every task has run. Each task runs exactly once
    /// across all participating threads, after all of its producers.
    ///
    /// Returns the body's error, or a diagnostic when no task is ready or
    /// running while some remain. Other participants return `Ok` once a
    /// failure is recorded.
    pub fn execute<F>(&self, graph: &TaskGraph, mut body: F) -> Result<()>
    where
        F: FnMut(usize, &TaskRecord) -> Result<()>,
    {
        loop {
            let task = {
                let mut st = self.lock();
                loop {
                    if st.failed || st.remaining == 0 {
                        return Ok(());
                    }
                    if let Some(t) = st.pop(self.policy) {
                        st.in_flight += 1;
                        break t;
                    }
                    if st.in_flight == 0 {
                        st.failed = true;
                        self.wake.notify_all();
                        return Err(Error::UnsatisfiableGraph(stall_report(graph, &st)));
                    }
                    st = self.wake.wait(st).unwrap_or_else(|p| p.into_inner());
                }
            };
            let outcome = body(task, graph.task(task));
            let mut st = self.lock();
            st.in_flight -= 1;
            match outcome {
                Ok(()) => {
                    st.done[task] = true;
                    st.remaining -= 1;
                    for &s in graph.successors(task) {
                        st.unmet[s] -= 1;
                        if st.unmet[s] == 0 {
                            st.ready.push_back(s);
                        }
                    }
                    self.wake.notify_all();
                }
                Err(e) => {
                    st.failed = true;
                    self.wake.notify_all();
                    return Err(e);
                }
            }
        }
    }
}

fn stall_report(graph: &TaskGraph, st: &State) -> String {
    let pending: Vec<String> = (0..graph.len())
        .filter(|&t| !st.done[t])
        .map(|t| {
            let rec = graph.task(t);
            format!("{rec} waiting on {} unmet input(s)", st.unmet[t])
        })
        .collect();
    format!(
        "{} of {} tasks cannot run: {}",
        pending.len(),
        graph.len(),
        pending.join("; ")
    )
}

/// Runs `graph` to completion on `workers` scoped threads. `body` receives
/// the worker index, the task index and its record.
pub fn execute_graph<F>(graph: &TaskGraph, workers: usize, policy: Policy, seed: u64, body: F) -> Result<()>
where
    F: Fn(usize, usize, &TaskRecord) -> Result<()> + Sync,
{
    if workers == 0 {
        return Err(Error::Config("at least one worker is required".into()));
    }
    let team = TaskTeam::new(policy, seed);
    team.reset(graph);
    let results: Vec<Result<()>> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let (team, body) = (&team, &body);
                s.spawn(move || team.execute(graph, |t, rec| body(w, t, rec)))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("task worker panicked")).collect()
    });
    results.into_iter().find(Result::is_err).unwrap_or(Ok(()))
}
