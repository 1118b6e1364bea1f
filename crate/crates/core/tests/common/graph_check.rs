//! Independent structural checker for per-sweep task graphs.

use std::collections::{HashMap, HashSet};

use hydro_tasks::schedule::{InterfaceId, TaskGraph, TaskKind};
use hydro_tasks::{Axis, DomainDecomposition, InterfaceBuffer};

fn ancestors(graph: &TaskGraph, target: usize) -> HashSet<usize> {
    let mut preds: HashMap<usize, Vec<usize>> = HashMap::new();
    for t in 0..graph.len() {
        for &s in graph.successors(t) {
            preds.entry(s).or_default().push(t);
        }
    }
    let mut seen = HashSet::new();
    let mut stack = vec![target];
    while let Some(t) = stack.pop() {
        for &p in preds.get(&t).into_iter().flatten() {
            if seen.insert(p) {
                stack.push(p);
            }
        }
    }
    seen
}

/// Checks task counts, the producer/consumer wiring of every compute task,
/// acyclicity, and that every interface read of a subdomain's cells is
/// ordered before the task overwriting them.
pub fn check_graph(graph: &TaskGraph, decomp: &DomainDecomposition, axis: Axis) -> Result<(), String> {
    let (p_rows, p_cols) = (decomp.p_rows(), decomp.p_cols());
    let (along, lines) = match axis {
        Axis::Column => (p_rows, p_cols),
        Axis::Row => (p_cols, p_rows),
    };
    let reads = graph.count(TaskKind::ReadInterface);
    let computes = graph.count(TaskKind::ComputeDomain);
    if reads != (along - 1) * lines || computes != p_rows * p_cols {
        return Err(format!("{reads} reads and {computes} computes for {p_rows}x{p_cols} ({axis})"));
    }

    let mut producer: HashMap<InterfaceId, usize> = HashMap::new();
    for (t, rec) in graph.tasks().iter().enumerate() {
        for &d in &rec.out_deps {
            if producer.insert(d, t).is_some() {
                return Err(format!("{d} has two producers"));
            }
        }
    }
    for (t, rec) in graph.tasks().iter().enumerate() {
        let (i, j) = rec.subject;
        match rec.kind {
            TaskKind::ReadInterface => {
                let expected = vec![InterfaceId { axis, i, j }];
                if !rec.in_deps.is_empty() || rec.out_deps != expected {
                    return Err(format!("{rec} has deps {:?} -> {:?}", rec.in_deps, rec.out_deps));
                }
            }
            TaskKind::ComputeDomain => {
                let mut expected = Vec::new();
                if let Some((a, b)) = decomp.prev_along(axis, i, j) {
                    expected.push(InterfaceId { axis, i: a, j: b });
                }
                if decomp.next_along(axis, i, j).is_some() {
                    expected.push(InterfaceId { axis, i, j });
                }
                if rec.in_deps != expected || !rec.out_deps.is_empty() {
                    return Err(format!("{rec} depends on {:?}, expected {expected:?}", rec.in_deps));
                }
            }
        }
        for d in &rec.in_deps {
            let &p = producer.get(d).ok_or_else(|| format!("{rec} consumes unproduced {d}"))?;
            if !graph.successors(p).contains(&t) {
                return Err(format!("edge {p} -> {t} missing for {d}"));
            }
        }
    }

    // Kahn's algorithm on the graph's own edges
    let mut indeg: Vec<usize> = (0..graph.len()).map(|t| graph.in_degree(t)).collect();
    let mut ready: Vec<usize> = (0..graph.len()).filter(|&t| indeg[t] == 0).collect();
    let mut ordered = 0;
    while let Some(t) = ready.pop() {
        ordered += 1;
        for &s in graph.successors(t) {
            indeg[s] -= 1;
            if indeg[s] == 0 {
                ready.push(s);
            }
        }
    }
    if ordered != graph.len() {
        return Err("graph has a cycle".into());
    }

    // geometric hazard check: each read must precede the writers of the
    // cells it copies
    let compute_of: HashMap<(usize, usize), usize> = graph
        .tasks()
        .iter()
        .enumerate()
        .filter(|(_, r)| r.kind == TaskKind::ComputeDomain)
        .map(|(t, r)| (r.subject, t))
        .collect();
    for (t, rec) in graph.tasks().iter().enumerate() {
        if rec.kind != TaskKind::ReadInterface {
            continue;
        }
        let buf = InterfaceBuffer::allocate(decomp, rec.subject.0, rec.subject.1, axis).map_err(|e| e.to_string())?;
        let layers = buf.layer_start()..buf.layer_start() + 4;
        let strips = buf.first_strip()..buf.first_strip() + buf.extent();
        for ((si, sj), sub) in decomp.iter() {
            let (lo, hi) = sub.along(axis);
            let (first, last) = sub.across(axis);
            let touches_along = layers.start <= hi && lo < layers.end;
            let touches_across = strips.start <= last && first < strips.end;
            if touches_along && touches_across && !ancestors(graph, compute_of[&(si, sj)]).contains(&t) {
                return Err(format!("{rec} copies cells of ({si}, {sj}) but is not ordered before their update"));
            }
        }
    }
    Ok(())
}
