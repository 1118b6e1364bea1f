//! Run configuration, checksums, timed worker sweeps and the CSV report.

use std::fmt;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{Duration, Instant};

use sha2::{Digest, Sha256};

use crate::cases::Case;
use crate::decomp::DomainDecomposition;
use crate::error::{Error, Result};
use crate::grid::Grid2D;
use crate::oracle::interior_sums;
use crate::schedule::{Policy, RunOptions, Strategy, StrategyKind, DEFAULT_SPIN_TIMEOUT};
use crate::state::GasModel;

/// Default benchmark extent per axis.
pub const DEFAULT_EXTENT: usize = 2048;
pub const DEFAULT_STEPS: usize = 10;

/// Everything needed to set up and run one benchmark or single execution.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub case: Case,
    pub nx: usize,
    pub ny: usize,
    pub steps: usize,
    pub strategy: StrategyKind,
    /// Worker counts to sweep; `run` uses exactly one.
    pub workers: Vec<usize>,
    /// Fixed decomposition; a near-square one is derived per worker count
    /// when absent.
    pub p_rows: Option<usize>,
    pub p_cols: Option<usize>,
    pub gamma: f64,
    pub cfl: f64,
    pub policy: Policy,
    pub seed: u64,
    pub output: Option<PathBuf>,
    pub spin_timeout: Duration,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            case: Case::Blast,
            nx: DEFAULT_EXTENT,
            ny: DEFAULT_EXTENT,
            steps: DEFAULT_STEPS,
            strategy: StrategyKind::CoarseGrain,
            workers: vec![1],
            p_rows: None,
            p_cols: None,
            gamma: GasModel::DEFAULT_GAMMA,
            cfl: GasModel::DEFAULT_CFL,
            policy: Policy::Fifo,
            seed: 0,
            output: None,
            spin_timeout: DEFAULT_SPIN_TIMEOUT,
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("invalid value {value:?} for {key}")))
}

/// Splits `p` into `rows x cols` with `cols` the largest divisor not above
/// `sqrt(p)`, so `rows >= cols`.
pub fn near_square(p: usize) -> (usize, usize) {
    let cols = (1..=p).take_while(|c| c * c <= p).filter(|c| p.is_multiple_of(*c)).last().unwrap_or(1);
    (p / cols, cols)
}

impl RunConfig {
    /// Sets one key; keys match the command-line flag names, with `-` or `_`.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim().replace('-', "_");
        match key.as_str() {
            "case" => self.case = value.trim().parse()?,
            "nx" => self.nx = parse(&key, value)?,
            "ny" => self.ny = parse(&key, value)?,
            "steps" => self.steps = parse(&key, value)?,
            "strategy" => self.strategy = value.trim().parse()?,
            "workers" => {
                self.workers = value
                    .split(',')
                    .filter(|s| !s.trim().is_empty())
                    .map(|s| parse(&key, s))
                    .collect::<Result<_>>()?;
            }
            "p_rows" => self.p_rows = Some(parse(&key, value)?),
            "p_cols" => self.p_cols = Some(parse(&key, value)?),
            "gamma" => self.gamma = parse(&key, value)?,
            "cfl" => self.cfl = parse(&key, value)?,
            "policy" => self.policy = value.trim().parse()?,
            "seed" => self.seed = parse(&key, value)?,
            "output" => self.output = Some(PathBuf::from(value.trim())),
            "spin_timeout" => {
                let secs: f64 = parse(&key, value)?;
                self.spin_timeout = Duration::try_from_secs_f64(secs)
                    .map_err(|_| Error::Config(format!("invalid spin_timeout {value:?}")))?;
            }
            _ => return Err(Error::Config(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    /// Applies a flat `key = value` file; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", n + 1)))?;
            self.set(key, value)
                .map_err(|e| Error::Config(format!("line {}: {e}", n + 1)))?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)?;
        self.apply_text(&text)
    }

    pub fn model(&self) -> Result<GasModel> {
        GasModel::new(self.gamma, self.cfl)
    }

    /// Interior extents of the grid the case builds.
    pub fn grid_extents(&self) -> (usize, usize) {
        match self.case {
            Case::Sod => (4, self.ny),
            Case::Blast | Case::Uniform => (self.nx, self.ny),
        }
    }

    pub fn init_grid(&self) -> Result<Grid2D> {
        self.case.init(self.nx, self.ny, self.model()?)
    }

    pub fn options(&self) -> RunOptions<'static> {
        RunOptions {
            policy: self.policy,
            seed: self.seed,
            spin_timeout: self.spin_timeout,
            ledger: None,
        }
    }

    fn decomposition_for(&self, workers: usize) -> Result<(usize, usize)> {
        match (self.p_rows, self.p_cols) {
            (Some(r), Some(c)) => Ok((r, c)),
            (None, None) => Ok(near_square(workers)),
            _ => Err(Error::Config("p_rows and p_cols must be given together".into())),
        }
    }

    /// The strategy run with `workers` threads.
    pub fn strategy_for(&self, workers: usize) -> Result<Strategy> {
        if workers == 0 {
            return Err(Error::Config("worker counts must be positive".into()));
        }
        let strategy = match self.strategy {
            StrategyKind::Sequential if workers == 1 => Strategy::Sequential,
            StrategyKind::Sequential => {
                return Err(Error::Config(format!("sequential runs on one worker, not {workers}")))
            }
            StrategyKind::FineGrain => Strategy::FineGrain { workers },
            // the 1-worker baseline of a fixed decomposition is the whole grid
            StrategyKind::CoarseGrain if workers == 1 => Strategy::CoarseGrain { p_rows: 1, p_cols: 1 },
            StrategyKind::CoarseGrain => {
                let (p_rows, p_cols) = self.decomposition_for(workers)?;
                if p_rows * p_cols != workers {
                    return Err(Error::Config(format!(
                        "coarse_grain runs one worker per subdomain: {p_rows}x{p_cols} needs {} workers, not {workers}",
                        p_rows * p_cols
                    )));
                }
                Strategy::CoarseGrain { p_rows, p_cols }
            }
            StrategyKind::TaskGraph => {
                let (p_rows, p_cols) = self.decomposition_for(workers)?;
                Strategy::TaskGraph {
                    workers,
                    p_rows,
                    p_cols,
                }
            }
        };
        if let Strategy::CoarseGrain { p_rows, p_cols } | Strategy::TaskGraph { p_rows, p_cols, .. } = strategy {
            let (nx, ny) = self.grid_extents();
            DomainDecomposition::new(nx, ny, p_rows, p_cols)?;
        }
        Ok(strategy)
    }

    /// Checks every field and every worker count's strategy constraints.
    pub fn validate(&self) -> Result<()> {
        self.model()?;
        let (nx, ny) = self.grid_extents();
        if nx < 4 || ny < 4 {
            return Err(Error::Config(format!("grid extents must be at least 4, got {nx}x{ny}")));
        }
        if self.steps == 0 {
            return Err(Error::Config("steps must be positive".into()));
        }
        if self.workers.is_empty() {
            return Err(Error::Config("at least one worker count is required".into()));
        }
        for w in self.sweep() {
            self.strategy_for(w)?;
        }
        Ok(())
    }

    /// Worker counts of a benchmark sweep: the configured list with the
    /// 1-worker baseline first.
    pub fn sweep(&self) -> Vec<usize> {
        let mut list = vec![1];
        list.extend(self.workers.iter().copied().filter(|&w| w != 1));
        list
    }
}

/// Order-independent summary of a grid plus a digest of its exact bits.
#[derive(Debug, Clone, PartialEq)]
pub struct Checksum {
    /// Interior sums of `rho, mom_x, mom_y, ener`.
    pub sums: [f64; 4],
    /// SHA-256 of the raw storage, ghosts included, little-endian.
    pub digest: String,
}

impl Checksum {
    pub fn of(grid: &Grid2D) -> Self {
        let mut hasher = Sha256::new();
        for v in grid.raw() {
            hasher.update(v.to_le_bytes());
        }
        let digest = hasher.finalize().iter().map(|b| format!("{b:02x}")).collect();
        Self {
            sums: interior_sums(grid),
            digest,
        }
    }
}

impl fmt::Display for Checksum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.digest)?;
        for s in self.sums {
            write!(f, ":{s:.16e}")?;
        }
        Ok(())
    }
}

impl FromStr for Checksum {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Checksum(format!("malformed checksum {s:?}"));
        let mut parts = s.split(':');
        let digest = parts.next().filter(|d| d.len() == 64).ok_or_else(bad)?.to_string();
        let mut sums = [0.0; 4];
        for v in &mut sums {
            *v = parts.next().and_then(|p| p.parse().ok()).ok_or_else(bad)?;
        }
        if parts.next().is_some() {
            return Err(bad());
        }
        Ok(Self { sums, digest })
    }
}

/// One row of a benchmark sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    pub workers: usize,
    pub time_s: f64,
    pub speedup: f64,
    pub efficiency: f64,
    pub checksum: Checksum,
}

impl BenchRecord {
    /// Derives speedup and efficiency from the 1-worker time `baseline_s`.
    pub fn new(workers: usize, time_s: f64, baseline_s: f64, checksum: Checksum) -> Self {
        let speedup = baseline_s / time_s;
        Self {
            workers,
            time_s,
            speedup,
            efficiency: speedup / workers as f64,
            checksum,
        }
    }
}

/// Outcome of a single timed execution.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub strategy: Strategy,
    pub grid: Grid2D,
    pub elapsed: Duration,
    pub checksum: Checksum,
}

/// Runs `strategy` on a copy of `init` and times only the stepping.
pub fn timed_run(init: &Grid2D, strategy: Strategy, config: &RunConfig) -> Result<RunOutcome> {
    let model = config.model()?;
    let mut grid = init.clone();
    let start = Instant::now();
    strategy.run(&mut grid, model, config.steps, &config.options())?;
    let elapsed = start.elapsed();
    let checksum = Checksum::of(&grid);
    Ok(RunOutcome {
        strategy,
        grid,
        elapsed,
        checksum,
    })
}

/// Single execution with the configuration's only worker count.
pub fn run_once(config: &RunConfig) -> Result<RunOutcome> {
    config.validate()?;
    let [workers] = config.workers[..] else {
        return Err(Error::Config(format!(
            "run takes a single worker count, got {:?}",
            config.workers
        )));
    };
    let init = config.init_grid()?;
    timed_run(&init, config.strategy_for(workers)?, config)
}

/// Times the configured strategy at each worker count of the sweep after an
/// untimed warm-up, and requires every run to end in the same grid bits.
pub fn run_benchmark(config: &RunConfig) -> Result<Vec<BenchRecord>> {
    config.validate()?;
    let init = config.init_grid()?;
    let mut records: Vec<BenchRecord> = Vec::new();
    let mut baseline: Option<(f64, Checksum)> = None;
    for workers in config.sweep() {
        let strategy = config.strategy_for(workers)?;
        timed_run(&init, strategy, config)?;
        let outcome = timed_run(&init, strategy, config)?;
        let time_s = outcome.elapsed.as_secs_f64();
        let (base_time, base_sum) = baseline.get_or_insert_with(|| (time_s, outcome.checksum.clone()));
        if outcome.checksum.digest != base_sum.digest {
            return Err(Error::Checksum(format!(
                "{strategy} ended with {} but the 1-worker run ended with {}",
                outcome.checksum, base_sum
            )));
        }
        records.push(BenchRecord::new(workers, time_s, *base_time, outcome.checksum));
    }
    Ok(records)
}

pub const REPORT_HEADER: [&str; 5] = ["workers", "time_s", "speedup", "efficiency", "checksum"];

/// Printed form of a record's fields, in report column order.
pub fn report_fields(r: &BenchRecord) -> [String; 5] {
    [
        r.workers.to_string(),
        format!("{:.2}", r.time_s),
        format!("{:.2}", r.speedup),
        format!("{:.2}%", r.efficiency * 100.0),
        r.checksum.to_string(),
    ]
}

/// Writes the CSV report: a header line, then one row per record.
pub fn write_report<W: Write>(records: &[BenchRecord], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(REPORT_HEADER)?;
    for r in records {
        w.write_record(report_fields(r))?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit_report(records: &[BenchRecord], path: &Path) -> Result<()> {
    write_report(records, std::fs::File::create(path)?)
}

/// Reads a report back; values carry the printed precision.
pub fn parse_report<R: Read>(input: R) -> Result<Vec<BenchRecord>> {
    let mut reader = csv::Reader::from_reader(input);
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    if header != REPORT_HEADER {
        return Err(Error::Validation(format!("unexpected report header {header:?}")));
    }
    reader
        .records()
        .map(|row| {
            let row = row?;
            let field = |k: usize| row.get(k).unwrap_or("");
            let pct = field(3)
                .strip_suffix('%')
                .ok_or_else(|| Error::Validation(format!("efficiency {:?} lacks %", field(3))))?;
            Ok(BenchRecord {
                workers: parse("workers", field(0))?,
                time_s: parse("time_s", field(1))?,
                speedup: parse("speedup", field(2))?,
                efficiency: parse::<f64>("efficiency", pct)? / 100.0,
                checksum: field(4).parse()?,
            })
        })
        .collect()
}

/// Fixed-width table in the layout of the published timing figures.
pub fn render_table(records: &[BenchRecord]) -> String {
    let mut out = format!("{:>8} {:>10} {:>8} {:>11}\n", "Threads", "Time (s)", "Speedup", "Efficiency");
    for r in records {
        let [w, t, s, e, _] = report_fields(r);
        out.push_str(&format!("{w:>8} {t:>10} {s:>8} {e:>11}\n"));
    }
    out
}
