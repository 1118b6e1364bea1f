//! Acceptance gate: one PASS/FAIL line per criterion. Runs without the
//! libtest harness so every line is printed, and exits non-zero when any
//! criterion fails.

mod common;

use std::process::ExitCode;
use std::thread::available_parallelism;

use common::graph_check::check_graph;
use common::protocol_model::{format_trace, Model};
use hydro_tasks::bench::{parse_report, report_fields, run_benchmark, write_report, BenchRecord, Checksum, RunConfig};
use hydro_tasks::oracle::{compare_grids, conservation_totals, mirror_asymmetry, CompareMode};
use hydro_tasks::schedule::{build_sweep_tasks, MemoryLedger, Policy, RunOptions, Strategy, StrategyKind, TaskKind};
use hydro_tasks::validate::{root_finder_agreement, sod_errors};
use hydro_tasks::{init_point_explosion, run_sequential, Axis, Case, DomainDecomposition, GasModel, InterfaceBuffer};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn model() -> GasModel {
    GasModel::new(1.4, 0.8).expect("valid gas model")
}

const LAYOUTS: [(usize, usize); 4] = [(1, 1), (2, 2), (4, 2), (4, 4)];
const WORKERS: [usize; 4] = [1, 2, 4, 8];

fn strategy_equivalence() -> Outcome {
    let model = model();
    let mut runs = 0;
    for (nx, ny) in [(64, 64), (128, 96)] {
        let init = init_point_explosion(nx, ny, model).map_err(|e| e.to_string())?;
        let mut reference = init.clone();
        run_sequential(&mut reference, model, 10).map_err(|e| e.to_string())?;

        let mut cases: Vec<(Strategy, Policy, u64)> = Vec::new();
        cases.extend(WORKERS.map(|workers| (Strategy::FineGrain { workers }, Policy::Fifo, 0)));
        cases.extend(LAYOUTS.map(|(p_rows, p_cols)| (Strategy::CoarseGrain { p_rows, p_cols }, Policy::Fifo, 0)));
        for (p_rows, p_cols) in LAYOUTS {
            for workers in WORKERS {
                for seed in [11, 23, 37, 41, 59] {
                    cases.push((Strategy::TaskGraph { workers, p_rows, p_cols }, Policy::Random, seed));
                }
            }
        }
        for (strategy, policy, seed) in cases {
            let mut grid = init.clone();
            let opts = RunOptions {
                policy,
                seed,
                ..RunOptions::default()
            };
            strategy.run(&mut grid, model, 10, &opts).map_err(|e| format!("{strategy}: {e}"))?;
            let cmp = compare_grids(&reference, &grid, CompareMode::Bitwise).map_err(|e| e.to_string())?;
            if let Some(d) = cmp.first_difference {
                return Err(format!("{strategy} seed {seed} on {nx}x{ny}: {d}"));
            }
            runs += 1;
        }
    }
    Ok(format!("{runs} runs bitwise identical to sequential on 64x64 and 128x96"))
}

fn protocol_safety() -> Outcome {
    let mut notes = Vec::new();
    for (workers, strips) in [(3, 4), (2, 6)] {
        let r = Model { workers, strips, wait: true }.explore();
        if let Some((msg, trace)) = r.violation {
            return Err(format!("{workers}x{strips}: {msg} via {}", format_trace(&trace)));
        }
        if r.deadlocks > 0 {
            return Err(format!("{workers}x{strips}: {} deadlocked states", r.deadlocks));
        }
        if r.overlap.is_none() {
            return Err(format!("{workers}x{strips}: no interleaving overlaps neighbor strips"));
        }
        notes.push(format!("{workers}x{strips}: {} states, {} interleavings", r.states, r.interleavings));
    }
    // the checker must be able to see a violation at all
    let unguarded = Model { workers: 2, strips: 2, wait: false }.explore();
    if unguarded.violation.is_none() {
        return Err("protocol without neighbor waits was not flagged".into());
    }
    Ok(format!("no violation or deadlock, overlap reached ({})", notes.join("; ")))
}

fn physics_oracle() -> Outcome {
    let model = model();
    let (l1, _) = sod_errors(200, 0.2, model).map_err(|e| e.to_string())?;
    let agreement = root_finder_agreement(10_000, 7, model).map_err(|e| e.to_string())?;
    let detail = format!("Sod density L1 {l1:.4e}, root finders agree to {agreement:.3e}");
    if l1 < 1e-2 && agreement <= 1e-12 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn conservation() -> Outcome {
    let model = model();
    let mut grid = init_point_explosion(64, 64, model).map_err(|e| e.to_string())?;
    let start = conservation_totals(&grid);
    let (mut mass, mut energy, mut asym) = (0.0_f64, 0.0_f64, 0.0_f64);
    for _ in 0..100 {
        run_sequential(&mut grid, model, 1).map_err(|e| e.to_string())?;
        let t = conservation_totals(&grid);
        mass = mass.max(((t.mass - start.mass) / start.mass).abs());
        energy = energy.max(((t.energy - start.energy) / start.energy).abs());
        asym = asym.max(mirror_asymmetry(&grid, 0.0));
    }
    let detail = format!("mass drift {mass:.3e}, energy drift {energy:.3e}, mirror asymmetry {asym:.3e}");
    if mass <= 1e-11 && energy <= 1e-11 && asym <= 1e-12 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn memory_footprint() -> Outcome {
    let model = model();
    let (nx, ny) = (64, 48);
    let init = init_point_explosion(nx, ny, model).map_err(|e| e.to_string())?;
    let mut runs = 0;
    for (p_rows, p_cols) in LAYOUTS.into_iter().chain([(3, 5), (8, 1)]) {
        let decomp = DomainDecomposition::new(nx, ny, p_rows, p_cols).map_err(|e| e.to_string())?;
        let mut expected_bytes = 0;
        for axis in [Axis::Column, Axis::Row] {
            for (i, j) in decomp.interface_owners(axis) {
                let buf = InterfaceBuffer::allocate(&decomp, i, j, axis).map_err(|e| e.to_string())?;
                expected_bytes += buf.bytes();
            }
        }
        let expected_buffers = (p_rows - 1) * p_cols + p_rows * (p_cols - 1);
        for workers in WORKERS {
            for seed in [3, 5, 8] {
                let ledger = MemoryLedger::new();
                let opts = RunOptions {
                    policy: Policy::Random,
                    seed,
                    ledger: Some(&ledger),
                    ..RunOptions::default()
                };
                let strategy = Strategy::TaskGraph { workers, p_rows, p_cols };
                let mut grid = init.clone();
                strategy.run(&mut grid, model, 3, &opts).map_err(|e| e.to_string())?;
                let snap = ledger.snapshot();
                let tag = format!("{strategy} seed {seed}");
                if snap.peak_strips > workers || snap.leases == 0 {
                    return Err(format!("{tag}: {} strip temporaries live at once", snap.peak_strips));
                }
                if snap.peak_interface_bytes != expected_bytes {
                    return Err(format!(
                        "{tag}: interface storage peaked at {} bytes, preallocation is {expected_bytes}",
                        snap.peak_interface_bytes
                    ));
                }
                if snap.live_strips != 0 || snap.interface_buffers != 0 || snap.interface_bytes != 0 {
                    return Err(format!("{tag}: storage still held after the run: {snap:?}"));
                }
                runs += 1;
            }
        }
        // each buffer holds 4 layers of its extent
        let cells: usize = [Axis::Column, Axis::Row]
            .into_iter()
            .flat_map(|axis| decomp.interface_owners(axis).into_iter().map(move |o| (axis, o)))
            .map(|(axis, (i, j))| 4 * InterfaceBuffer::allocate(&decomp, i, j, axis).map(|b| b.extent()).unwrap_or(0))
            .sum();
        let owners = decomp.interface_owners(Axis::Column).len() + decomp.interface_owners(Axis::Row).len();
        if owners != expected_buffers || cells * 32 != expected_bytes {
            return Err(format!("{p_rows}x{p_cols}: {owners} buffers, expected {expected_buffers}"));
        }
    }
    Ok(format!("{runs} fuzzed task_graph runs within worker count and interface preallocation"))
}

fn graph_structure() -> Outcome {
    let mut graphs = 0;
    for p_rows in 1..=8 {
        for p_cols in 1..=8 {
            let decomp = DomainDecomposition::new(64, 64, p_rows, p_cols).map_err(|e| e.to_string())?;
            for axis in [Axis::Column, Axis::Row] {
                let graph = build_sweep_tasks(&decomp, axis).map_err(|e| e.to_string())?;
                if axis == Axis::Column
                    && (graph.count(TaskKind::ReadInterface) != (p_rows - 1) * p_cols
                        || graph.count(TaskKind::ComputeDomain) != p_rows * p_cols)
                {
                    return Err(format!("{p_rows}x{p_cols}: wrong task counts"));
                }
                check_graph(&graph, &decomp, axis).map_err(|e| format!("{p_rows}x{p_cols} {axis}: {e}"))?;
                graphs += 1;
            }
        }
    }
    Ok(format!("{graphs} sweep graphs with p_rows, p_cols <= 8 pass the checker"))
}

fn scaling_trend() -> Outcome {
    let cores = available_parallelism().map(|n| n.get()).unwrap_or(1);
    let mut efficiency = Vec::new();
    let mut notes = Vec::new();
    for kind in [StrategyKind::CoarseGrain, StrategyKind::TaskGraph, StrategyKind::FineGrain] {
        let config = RunConfig {
            case: Case::Blast,
            nx: 2048,
            ny: 2048,
            steps: 10,
            strategy: kind,
            workers: vec![4, 8],
            ..RunConfig::default()
        };
        let records = run_benchmark(&config).map_err(|e| format!("{kind}: {e}"))?;
        let at = |w: usize| records.iter().find(|r| r.workers == w).expect("swept worker count");
        notes.push(format!(
            "{kind} speedup {:.2} at 4, efficiency {:.1}% at 8",
            at(4).speedup,
            at(8).efficiency * 100.0
        ));
        efficiency.push((kind, at(4).speedup, at(8).efficiency));
    }
    let detail = format!("{}; available parallelism {cores}", notes.join("; "));
    let [(_, coarse4, coarse8), (_, task4, _), (_, _, fine8)] = efficiency[..] else {
        unreachable!()
    };
    if coarse4 >= 2.5 && task4 >= 2.5 && coarse8 >= fine8 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn report_format() -> Outcome {
    let grid = init_point_explosion(8, 8, model()).map_err(|e| e.to_string())?;
    let record = BenchRecord::new(32, 11.91, 377.15, Checksum::of(&grid));
    let fields = report_fields(&record);
    if fields[..4] != ["32", "11.91", "31.67", "98.96%"] {
        return Err(format!("row fields {:?}", &fields[..4]));
    }
    let mut csv = Vec::new();
    write_report(std::slice::from_ref(&record), &mut csv).map_err(|e| e.to_string())?;
    let text = String::from_utf8(csv).map_err(|e| e.to_string())?;
    let row = text.lines().nth(1).unwrap_or("");
    if !row.starts_with("32,11.91,31.67,98.96%,") {
        return Err(format!("CSV row {row:?}"));
    }
    let back = parse_report(text.as_bytes()).map_err(|e| e.to_string())?;
    if back.len() != 1 || back[0].checksum != record.checksum || back[0].workers != 32 {
        return Err("report did not read back".into());
    }
    Ok(format!("(377.15, 11.91) at 32 workers reported as {row:?}"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("strategy equivalence", strategy_equivalence),
        ("protocol safety", protocol_safety),
        ("physics oracle", physics_oracle),
        ("conservation and symmetry", conservation),
        ("memory footprint", memory_footprint),
        ("task-graph structure", graph_structure),
        ("scaling trend", scaling_trend),
        ("report format", report_format),
    ];
    let mut failed = 0;
    for (n, (name, check)) in criteria.into_iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {} PASS {name}: {detail}", n + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} FAIL {name}: {detail}", n + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 8 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
