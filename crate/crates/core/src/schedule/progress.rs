//! Per-worker progress counters gating the WRITE step of the coarse-grain
//! strategy.
//!
//! Worker `w` stores `k` after it has finished reading strip `k` of the
//! current sweep (1-based). A neighbor may overwrite its own cells of strip
//! `k` only once every adjacent worker's counter is at least `k`. Stores are
//! `Release` and loads `Acquire`, so observing `k` also makes the
//! publisher's reads of strips `..=k` happen-before the observer's writes.

use std::fmt::Write as _;
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::time::{Duration, Instant};

use crossbeam_utils::CachePadded;

use crate::error::{Error, Result};

/// How a neighbor wait ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Wait {
    Ready,
    /// Another worker failed; the waiter should stop.
    Aborted,
}

#[derive(Debug)]
pub struct ProgressTable {
    counters: Vec<CachePadded<AtomicUsize>>,
}

/// Busy-wait iterations between yields.
const SPINS_BEFORE_YIELD: u32 = 64;

impl ProgressTable {
    pub fn new(workers: usize) -> Self {
        Self {
            counters: (0..workers).map(|_| CachePadded::new(AtomicUsize::new(0))).collect(),
        }
    }

    pub fn workers(&self) -> usize {
        self.counters.len()
    }

    /// Zeroes every counter. Callers separate this from the sweep with a
    /// barrier.
    pub fn reset(&self) {
        for c in &self.counters {
            c.store(0, Ordering::Relaxed);
        }
    }

    pub fn get(&self, worker: usize) -> usize {
        self.counters[worker].load(Ordering::Acquire)
    }

    /// Announces that `worker` has read strip `strip_index`.
    pub fn publish_progress(&self, worker: usize, strip_index: usize) -> Result<()> {
        let counter = &self.counters[worker];
        // single writer: only `worker` stores to its own counter
        let previous = counter.load(Ordering::Relaxed);
        if strip_index != previous + 1 {
            return Err(Error::Protocol {
                worker,
                previous,
                published: strip_index,
            });
        }
        counter.store(strip_index, Ordering::Release);
        Ok(())
    }

    fn ready(&self, neighbors: &[usize], strip_index: usize) -> bool {
        neighbors.iter().all(|&n| self.get(n) >= strip_index)
    }

    /// Blocks until every worker in `neighbors` has published `strip_index`.
    ///
    /// Spins, then yields; gives up with a diagnostic after `timeout`, or
    /// returns [`Wait::Aborted`] as soon as `abort` is raised.
    pub fn wait_neighbors(
        &self,
        worker: usize,
        strip_index: usize,
        neighbors: &[usize],
        timeout: Duration,
        abort: &AtomicBool,
    ) -> Result<Wait> {
        let mut spins = 0u32;
        let mut started: Option<Instant> = None;
        loop {
            if self.ready(neighbors, strip_index) {
                return Ok(Wait::Ready);
            }
            if abort.load(Ordering::Relaxed) {
                return Ok(Wait::Aborted);
            }
            if spins < SPINS_BEFORE_YIELD {
                spins += 1;
                std::hint::spin_loop();
                continue;
            }
            std::thread::yield_now();
            let t0 = *started.get_or_insert_with(Instant::now);
            if t0.elapsed() >= timeout {
                return Err(Error::Deadlock(self.diagnose(worker, strip_index, neighbors, timeout)));
            }
        }
    }

    fn diagnose(&self, worker: usize, strip_index: usize, neighbors: &[usize], timeout: Duration) -> String {
        let mut msg = format!("worker {worker} waited {timeout:?} to write strip {strip_index}; stalled:");
        for &n in neighbors {
            let at = self.get(n);
            if at < strip_index {
                let _ = write!(msg, " worker {n} at {at}");
            }
        }
        msg
    }
}
