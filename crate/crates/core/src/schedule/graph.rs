//! Per-sweep task graph: `read_interface` tasks produce interface buffers,
//! `compute_domain` tasks consume the one or two interfaces bordering their
//! subdomain along the sweep axis.

use std::collections::HashMap;
use std::fmt;

use crate::decomp::DomainDecomposition;
use crate::error::{Error, Result};
use crate::grid::Axis;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TaskKind {
    ReadInterface,
    ComputeDomain,
}

/// Interface owned by subdomain `(i, j)` for sweeps along `axis`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct InterfaceId {
    pub axis: Axis,
    pub i: usize,
    pub j: usize,
}

impl fmt::Display for InterfaceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} interface ({}, {})", self.axis, self.i, self.j)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaskRecord {
    pub kind: TaskKind,
    /// Subdomain coordinates: the interface owner for reads.
    pub subject: (usize, usize),
    pub in_deps: Vec<InterfaceId>,
    pub out_deps: Vec<InterfaceId>,
}

impl fmt::Display for TaskRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.kind {
            TaskKind::ReadInterface => "read_interface",
            TaskKind::ComputeDomain => "compute_domain",
        };
        write!(f, "{name}({}, {})", self.subject.0, self.subject.1)
    }
}

#[derive(Debug, Clone)]
pub struct TaskGraph {
    axis: Axis,
    tasks: Vec<TaskRecord>,
    successors: Vec<Vec<usize>>,
    in_degree: Vec<usize>,
}

impl TaskGraph {
    /// Builds a graph from task records, linking each input to the task that
    /// outputs it. Fails if an input has no producer or a datum has two.
    pub fn from_tasks(axis: Axis, tasks: Vec<TaskRecord>) -> Result<Self> {
        let mut producer: HashMap<InterfaceId, usize> = HashMap::new();
        for (t, rec) in tasks.iter().enumerate() {
            for &d in &rec.out_deps {
                if let Some(prev) = producer.insert(d, t) {
                    return Err(Error::UnsatisfiableGraph(format!(
                        "{d} produced by both {} and {rec}",
                        tasks[prev]
                    )));
                }
            }
        }
        let mut successors = vec![Vec::new(); tasks.len()];
        let mut in_degree = vec![0; tasks.len()];
        for (t, rec) in tasks.iter().enumerate() {
            for d in &rec.in_deps {
                let &p = producer
                    .get(d)
                    .ok_or_else(|| Error::UnsatisfiableGraph(format!("{rec} depends on {d}, which no task produces")))?;
                successors[p].push(t);
                in_degree[t] += 1;
            }
        }
        let graph = Self {
            axis,
            tasks,
            successors,
            in_degree,
        };
        graph.check_acyclic()?;
        Ok(graph)
    }

    fn check_acyclic(&self) -> Result<()> {
        let mut remaining = self.in_degree.clone();
        let mut ready: Vec<usize> = (0..self.len()).filter(|&t| remaining[t] == 0).collect();
        let mut done = 0;
        while let Some(t) = ready.pop() {
            done += 1;
            for &s in &self.successors[t] {
                remaining[s] -= 1;
                if remaining[s] == 0 {
                    ready.push(s);
                }
            }
        }
        if done != self.len() {
            let stuck: Vec<String> = (0..self.len())
                .filter(|&t| remaining[t] > 0)
                .map(|t| self.tasks[t].to_string())
                .collect();
            return Err(Error::UnsatisfiableGraph(format!("cycle among {}", stuck.join(", "))));
        }
        Ok(())
    }

    pub fn axis(&self) -> Axis {
        self.axis
    }

    pub fn len(&self) -> usize {
        self.tasks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tasks.is_empty()
    }

    pub fn tasks(&self) -> &[TaskRecord] {
        &self.tasks
    }

    pub fn task(&self, t: usize) -> &TaskRecord {
        &self.tasks[t]
    }

    pub fn successors(&self, t: usize) -> &[usize] {
        &self.successors[t]
    }

    pub fn in_degree(&self, t: usize) -> usize {
        self.in_degree[t]
    }

    pub fn count(&self, kind: TaskKind) -> usize {
        self.tasks.iter().filter(|r| r.kind == kind).count()
    }
}

/// Task graph for one sweep along `axis`, flattened over the independent
/// lines of subdomains (decomposition columns for a column sweep). Within a
/// line the interface reads come first, then the domain computes.
pub fn build_sweep_tasks(decomp: &DomainDecomposition, axis: Axis) -> Result<TaskGraph> {
    // (position along the sweep, line index) -> subdomain coordinates
    let (along, lines) = match axis {
        Axis::Column => (decomp.p_rows(), decomp.p_cols()),
        Axis::Row => (decomp.p_cols(), decomp.p_rows()),
    };
    let coords = |pos: usize, line: usize| match axis {
        Axis::Column => (pos, line),
        Axis::Row => (line, pos),
    };
    let iface = |(i, j): (usize, usize)| InterfaceId { axis, i, j };

    let mut tasks = Vec::with_capacity(lines * (2 * along - 1));
    for line in 0..lines {
        for pos in 0..along - 1 {
            tasks.push(TaskRecord {
                kind: TaskKind::ReadInterface,
                subject: coords(pos, line),
                in_deps: Vec::new(),
                out_deps: vec![iface(coords(pos, line))],
            });
        }
        for pos in 0..along {
            let mut in_deps = Vec::with_capacity(2);
            if pos > 0 {
                in_deps.push(iface(coords(pos - 1, line)));
            }
            if pos + 1 < along {
                in_deps.push(iface(coords(pos, line)));
            }
            tasks.push(TaskRecord {
                kind: TaskKind::ComputeDomain,
                subject: coords(pos, line),
                in_deps,
                out_deps: Vec::new(),
            });
        }
    }
    TaskGraph::from_tasks(axis, tasks)
}
