//! The oracle suite behind `hydro-tasks validate`.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cases::{init_point_explosion, init_sod};
use crate::error::Result;
use crate::oracle::{
    bisection_pressure, compare_grids, conservation_totals, exact_riemann, mirror_asymmetry, sod_profile, sod_states,
    CompareMode,
};
use crate::schedule::{run_sequential, run_sequential_until, Policy, RunOptions, Strategy};
use crate::state::{GasModel, PrimitiveState};

/// Outcome of one named check with the measured value behind it.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{verdict} {}: {}", self.name, self.detail)
    }
}

fn check(name: &'static str, passed: bool, detail: String) -> CheckResult {
    CheckResult { name, passed, detail }
}

/// Random Riemann problem that cannot open a vacuum.
pub fn random_riemann_pair(rng: &mut impl Rng, model: GasModel) -> (PrimitiveState, PrimitiveState) {
    loop {
        let mut side = || {
            PrimitiveState::new(
                10f64.powf(rng.random_range(-1.0..1.0)),
                rng.random_range(-2.0..2.0),
                rng.random_range(-1.0..1.0),
                10f64.powf(rng.random_range(-2.0..2.0)),
            )
        };
        let (wl, wr) = (side(), side());
        let c = |w: &PrimitiveState| (model.gamma * w.pres / w.rho).sqrt();
        if 2.0 / (model.gamma - 1.0) * (c(&wl) + c(&wr)) > wr.vel_a - wl.vel_a {
            return (wl, wr);
        }
    }
}

/// Largest relative disagreement between the Newton and bisection star
/// pressures over `pairs` random problems.
pub fn root_finder_agreement(pairs: usize, seed: u64, model: GasModel) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0_f64;
    for _ in 0..pairs {
        let (wl, wr) = random_riemann_pair(&mut rng, model);
        let newton = exact_riemann(wl, wr, model)?.p_star;
        let bisect = bisection_pressure(wl, wr, model)?;
        worst = worst.max((newton - bisect).abs() / newton);
    }
    Ok(worst)
}

/// Sod tube on `n` cells at `t_end`: returns the density L1 error along the
/// tube and the largest transverse variation of any variable.
pub fn sod_errors(n: usize, t_end: f64, model: GasModel) -> Result<(f64, f64)> {
    let mut grid = init_sod(n, model)?;
    run_sequential_until(&mut grid, model, t_end)?;
    let exact = sod_profile(n, t_end, model)?;
    let mut l1 = 0.0;
    let mut spread = 0.0_f64;
    for j in 1..=n {
        let u = grid.cell(1, j as isize)?;
        l1 += (u.rho - exact[j - 1].rho).abs() * grid.dy();
        for i in 2..=grid.nx() {
            let v = grid.cell(i as isize, j as isize)?;
            for (a, b) in u.to_array().into_iter().zip(v.to_array()) {
                spread = spread.max((a - b).abs());
            }
        }
    }
    Ok((l1, spread))
}

/// Worst relative mass and energy drift and worst mirror asymmetry over
/// `steps` blast steps, audited after every step.
pub fn blast_audit(n: usize, steps: usize, model: GasModel) -> Result<(f64, f64, f64)> {
    let mut grid = init_point_explosion(n, n, model)?;
    let start = conservation_totals(&grid);
    let (mut mass, mut energy, mut asym) = (0.0_f64, 0.0_f64, 0.0_f64);
    for _ in 0..steps {
        run_sequential(&mut grid, model, 1)?;
        let t = conservation_totals(&grid);
        mass = mass.max(((t.mass - start.mass) / start.mass).abs());
        energy = energy.max(((t.energy - start.energy) / start.energy).abs());
        asym = asym.max(mirror_asymmetry(&grid, 0.0));
    }
    Ok((mass, energy, asym))
}

/// Strategies and layouts compared against the sequential run.
pub fn equivalence_matrix() -> Vec<(Strategy, Policy, u64)> {
    let decomps = [(1, 1), (2, 2), (4, 2), (4, 4)];
    let mut out = Vec::new();
    for workers in [1, 2, 4, 8] {
        out.push((Strategy::FineGrain { workers }, Policy::Fifo, 0));
    }
    for (p_rows, p_cols) in decomps {
        out.push((Strategy::CoarseGrain { p_rows, p_cols }, Policy::Fifo, 0));
    }
    for (p_rows, p_cols) in decomps {
        for workers in [1, 2, 4, 8] {
            for seed in 1..=5 {
                out.push((Strategy::TaskGraph { workers, p_rows, p_cols }, Policy::Random, seed));
            }
        }
    }
    out
}

/// Runs every entry of [`equivalence_matrix`] on an `nx` x `ny` blast and
/// returns the number of runs and the first mismatch, if any.
pub fn cross_strategy(nx: usize, ny: usize, steps: usize, model: GasModel) -> Result<(usize, Option<String>)> {
    let init = init_point_explosion(nx, ny, model)?;
    let mut reference = init.clone();
    run_sequential(&mut reference, model, steps)?;
    let matrix = equivalence_matrix();
    for (strategy, policy, seed) in &matrix {
        let mut grid = init.clone();
        let opts = RunOptions {
            policy: *policy,
            seed: *seed,
            ..RunOptions::default()
        };
        strategy.run(&mut grid, model, steps, &opts)?;
        let cmp = compare_grids(&reference, &grid, CompareMode::Bitwise)?;
        if let Some(d) = cmp.first_difference {
            return Ok((matrix.len(), Some(format!("{strategy} seed {seed}: {d}"))));
        }
    }
    Ok((matrix.len(), None))
}

/// Runs the whole suite with default gas parameters.
pub fn run_suite() -> Result<Vec<CheckResult>> {
    let model = GasModel::default();
    let mut out = Vec::new();

    let (wl, wr) = sod_states();
    let sod = exact_riemann(wl, wr, model)?;
    out.push(check(
        "riemann-sod-star",
        (sod.p_star - 0.30313).abs() < 1e-5 && (sod.u_star - 0.92745).abs() < 1e-5,
        format!("p* = {:.6}, u* = {:.6}", sod.p_star, sod.u_star),
    ));
    let still = PrimitiveState::new(1.0, 0.0, 0.0, 1.0);
    let rest = exact_riemann(still, still, model)?;
    out.push(check(
        "riemann-static",
        rest.p_star == 1.0 && rest.u_star == 0.0,
        format!("p* = {}, u* = {}", rest.p_star, rest.u_star),
    ));
    let agreement = root_finder_agreement(10_000, 2024, model)?;
    out.push(check(
        "riemann-root-finders",
        agreement <= 1e-12,
        format!("max relative p* difference {agreement:.3e} over 10000 pairs"),
    ));

    let (l1, spread) = sod_errors(200, 0.2, model)?;
    out.push(check("sod-l1", l1 < 1e-2, format!("density L1 error {l1:.4e}")));
    out.push(check(
        "sod-transverse",
        spread <= 1e-13,
        format!("max transverse variation {spread:.3e}"),
    ));

    let (mass, energy, asym) = blast_audit(64, 100, model)?;
    out.push(check(
        "conservation",
        mass <= 1e-11 && energy <= 1e-11,
        format!("mass drift {mass:.3e}, energy drift {energy:.3e}"),
    ));
    out.push(check("symmetry", asym <= 1e-12, format!("max mirror asymmetry {asym:.3e}")));

    for (nx, ny) in [(64, 64), (128, 96)] {
        let (runs, mismatch) = cross_strategy(nx, ny, 10, model)?;
        out.push(check(
            "cross-strategy",
            mismatch.is_none(),
            match mismatch {
                None => format!("{runs} runs on {nx}x{ny} bitwise equal to sequential"),
                Some(m) => m,
            },
        ));
    }
    Ok(out)
}
