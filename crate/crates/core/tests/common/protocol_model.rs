//! Exhaustive state-space exploration of the coarse-grain strip protocol.
//!
//! Workers sit in a line along the sweep axis, each neighbor-linked to the
//! previous and next one. Each performs, per strip `k = 1..=strips`:
//! READ(k), PUBLISH(k), COMPUTE(k), WAIT(k), WRITE(k). WAIT(k) is enabled
//! once every neighbor has published `k`. Dropping WAIT gives the broken
//! variant used to show the explorer detects unsafe interleavings.

use std::collections::{HashMap, HashSet};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Read,
    Publish,
    Compute,
    Wait,
    Write,
}

const PHASES: [Phase; 5] = [Phase::Read, Phase::Publish, Phase::Compute, Phase::Wait, Phase::Write];
const PER_STRIP: usize = PHASES.len();

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Action {
    pub worker: usize,
    pub phase: Phase,
    pub strip: usize,
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "w{}:{:?}({})", self.worker, self.phase, self.strip)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Model {
    pub workers: usize,
    pub strips: usize,
    /// `false` drops the WAIT guard.
    pub wait: bool,
}

#[derive(Debug, Default)]
pub struct Exploration {
    pub states: usize,
    /// Complete executions (maximal interleavings reaching the final state).
    pub interleavings: u128,
    /// First unsafe access found, with the trace reaching it.
    pub violation: Option<(String, Vec<Action>)>,
    pub deadlocks: usize,
    /// A trace in which some worker computes strip `k + 1` before a neighbor
    /// has finished (written) strip `k`.
    pub overlap: Option<Vec<Action>>,
    /// Whether any worker can compute strip `k + 1` before a neighbor has
    /// read strip `k`.
    pub compute_before_neighbor_read: bool,
}

type State = Vec<u8>;

impl Model {
    fn neighbors(&self, w: usize) -> impl Iterator<Item = usize> + '_ {
        [w.checked_sub(1), (w + 1 < self.workers).then_some(w + 1)]
            .into_iter()
            .flatten()
    }

    fn done(&self, pc: u8) -> bool {
        pc as usize == PER_STRIP * self.strips
    }

    fn action(&self, w: usize, pc: u8) -> Action {
        let pc = pc as usize;
        Action {
            worker: w,
            phase: PHASES[pc % PER_STRIP],
            strip: pc / PER_STRIP + 1,
        }
    }

    /// Count of completed occurrences of `phase` given program counter `pc`.
    fn completed(pc: u8, phase: Phase) -> usize {
        let offset = PHASES.iter().position(|&p| p == phase).unwrap();
        (pc as usize + PER_STRIP - 1 - offset) / PER_STRIP
    }

    fn enabled(&self, s: &State, w: usize) -> bool {
        if self.done(s[w]) {
            return false;
        }
        let a = self.action(w, s[w]);
        if a.phase == Phase::Wait && self.wait {
            return self.neighbors(w).all(|n| Self::completed(s[n], Phase::Publish) >= a.strip);
        }
        true
    }

    /// Safety check for performing `a` in state `s`.
    fn hazard(&self, s: &State, a: Action) -> Option<String> {
        for n in self.neighbors(a.worker) {
            match a.phase {
                Phase::Write if Self::completed(s[n], Phase::Read) < a.strip => {
                    return Some(format!("{a} overwrites cells before w{n} has read strip {}", a.strip));
                }
                Phase::Read if Self::completed(s[n], Phase::Write) >= a.strip => {
                    return Some(format!("{a} reads cells w{n} has already overwritten"));
                }
                _ => {}
            }
        }
        None
    }

    pub fn explore(&self) -> Exploration {
        let mut out = Exploration::default();
        let mut visited: HashSet<State> = HashSet::new();
        let mut trace = Vec::new();
        let start = vec![0u8; self.workers];
        self.dfs(start.clone(), &mut visited, &mut trace, &mut out);
        out.states = visited.len();
        out.interleavings = self.count_paths(&start, &mut HashMap::new());
        out
    }

    fn dfs(&self, s: State, visited: &mut HashSet<State>, trace: &mut Vec<Action>, out: &mut Exploration) {
        if !visited.insert(s.clone()) {
            return;
        }
        let mut any = false;
        for w in 0..self.workers {
            if !self.enabled(&s, w) {
                continue;
            }
            any = true;
            let a = self.action(w, s[w]);
            if out.violation.is_none() {
                if let Some(msg) = self.hazard(&s, a) {
                    let mut t = trace.clone();
                    t.push(a);
                    out.violation = Some((msg, t));
                }
            }
            if a.phase == Phase::Compute && a.strip > 1 {
                let k = a.strip - 1;
                for n in self.neighbors(w) {
                    if out.overlap.is_none() && Self::completed(s[n], Phase::Write) < k {
                        let mut t = trace.clone();
                        t.push(a);
                        out.overlap = Some(t);
                    }
                    if Self::completed(s[n], Phase::Read) < k {
                        out.compute_before_neighbor_read = true;
                    }
                }
            }
            let mut next = s.clone();
            next[w] += 1;
            trace.push(a);
            self.dfs(next, visited, trace, out);
            trace.pop();
        }
        if !any && !s.iter().all(|&pc| self.done(pc)) {
            out.deadlocks += 1;
        }
    }

    fn count_paths(&self, s: &State, memo: &mut HashMap<State, u128>) -> u128 {
        if s.iter().all(|&pc| self.done(pc)) {
            return 1;
        }
        if let Some(&n) = memo.get(s) {
            return n;
        }
        let mut total: u128 = 0;
        for w in 0..self.workers {
            if self.enabled(s, w) {
                let mut next = s.clone();
                next[w] += 1;
                total = total
                    .checked_add(self.count_paths(&next, memo))
                    .expect("interleaving count fits in u128");
            }
        }
        memo.insert(s.clone(), total);
        total
    }
}

pub fn format_trace(trace: &[Action]) -> String {
    trace.iter().map(Action::to_string).collect::<Vec<_>>().join(" ")
}
