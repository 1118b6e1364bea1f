//! Exact solution of the one-dimensional Riemann problem for an ideal gas.
//!
//! Shares no code with the kernel's approximate flux: it works purely from
//! primitive states and the pressure function of the two outer waves.

use crate::error::{Error, Result};
use crate::state::{GasModel, PrimitiveState};

/// One of the two outer waves of the solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Wave {
    Shock { speed: f64 },
    /// A centered fan between `head` and `tail` speeds.
    Rarefaction { head: f64, tail: f64 },
}

impl Wave {
    /// Slowest and fastest speeds covered by the wave.
    pub fn span(&self) -> (f64, f64) {
        match *self {
            Wave::Shock { speed } => (speed, speed),
            Wave::Rarefaction { head, tail } => (head.min(tail), head.max(tail)),
        }
    }
}

/// Star-region state and outer waves of a solved Riemann problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveStructure {
    pub p_star: f64,
    pub u_star: f64,
    pub left: Wave,
    pub right: Wave,
}

fn sound(w: &PrimitiveState, gamma: f64) -> f64 {
    (gamma * w.pres / w.rho).sqrt()
}

/// Velocity jump across the wave on side `w` when the star pressure is `p`,
/// and its derivative with respect to `p`.
fn side_function(p: f64, w: &PrimitiveState, gamma: f64) -> (f64, f64) {
    let c = sound(w, gamma);
    if p > w.pres {
        let a = 2.0 / ((gamma + 1.0) * w.rho);
        let b = (gamma - 1.0) / (gamma + 1.0) * w.pres;
        let root = (a / (p + b)).sqrt();
        ((p - w.pres) * root, root * (1.0 - 0.5 * (p - w.pres) / (p + b)))
    } else {
        let ratio = p / w.pres;
        let value = 2.0 * c / (gamma - 1.0) * (ratio.powf((gamma - 1.0) / (2.0 * gamma)) - 1.0);
        let slope = ratio.powf(-(gamma + 1.0) / (2.0 * gamma)) / (w.rho * c);
        (value, slope)
    }
}

fn check_states(wl: &PrimitiveState, wr: &PrimitiveState, gamma: f64) -> Result<()> {
    wl.validate()?;
    wr.validate()?;
    let critical = 2.0 / (gamma - 1.0) * (sound(wl, gamma) + sound(wr, gamma));
    let jump = wr.vel_a - wl.vel_a;
    if critical <= jump {
        return Err(Error::Vacuum { critical, jump });
    }
    Ok(())
}

/// Solves for the star region with a bracketed Newton iteration and checks
/// that the root is bracketed to 1e-12 relative afterwards.
pub fn exact_riemann(wl: PrimitiveState, wr: PrimitiveState, model: GasModel) -> Result<WaveStructure> {
    let gamma = model.gamma;
    check_states(&wl, &wr, gamma)?;
    let du = wr.vel_a - wl.vel_a;
    let f = |p: f64| {
        let (fl, dl) = side_function(p, &wl, gamma);
        let (fr, dr) = side_function(p, &wr, gamma);
        (fl + fr + du, dl + dr)
    };

    // f increases monotonically from f(0+) < 0 (no vacuum)
    let mut lo = 0.0;
    let mut hi = wl.pres.max(wr.pres);
    while f(hi).0 < 0.0 {
        lo = hi;
        hi *= 2.0;
    }
    let (cl, cr) = (sound(&wl, gamma), sound(&wr, gamma));
    let linearized = 0.5 * (wl.pres + wr.pres) - 0.125 * du * (wl.rho + wr.rho) * (cl + cr);
    let mut p = if linearized > lo && linearized <= hi {
        linearized
    } else {
        0.5 * (lo + hi)
    };

    for _ in 0..200 {
        let (value, slope) = f(p);
        if value == 0.0 {
            break;
        }
        if value < 0.0 {
            lo = p;
        } else {
            hi = p;
        }
        let newton = p - value / slope;
        let next = if newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        let change = (next - p).abs();
        p = next;
        if change <= 2.0 * f64::EPSILON * p || hi - lo <= 2.0 * f64::EPSILON * hi {
            break;
        }
    }

    // certificate: f changes sign within 1e-12 relative of the root
    let (below, above) = (f(p * (1.0 - 1e-12)).0, f(p * (1.0 + 1e-12)).0);
    if !(p > 0.0 && below <= 0.0 && above >= 0.0) {
        return Err(Error::NoConvergence(format!(
            "star pressure {p:e} not bracketed: f(p-) = {below:e}, f(p+) = {above:e}"
        )));
    }

    let (fl, _) = side_function(p, &wl, gamma);
    let (fr, _) = side_function(p, &wr, gamma);
    let u_star = 0.5 * (wl.vel_a + wr.vel_a) + 0.5 * (fr - fl);
    Ok(WaveStructure {
        p_star: p,
        u_star,
        left: outer_wave(&wl, p, u_star, gamma, -1.0),
        right: outer_wave(&wr, p, u_star, gamma, 1.0),
    })
}

/// `sign` is -1 for the left wave and +1 for the right one.
fn outer_wave(w: &PrimitiveState, p_star: f64, u_star: f64, gamma: f64, sign: f64) -> Wave {
    let c = sound(w, gamma);
    if p_star > w.pres {
        let mach = ((gamma + 1.0) / (2.0 * gamma) * p_star / w.pres + (gamma - 1.0) / (2.0 * gamma)).sqrt();
        Wave::Shock {
            speed: w.vel_a + sign * c * mach,
        }
    } else {
        let c_star = c * (p_star / w.pres).powf((gamma - 1.0) / (2.0 * gamma));
        Wave::Rarefaction {
            head: w.vel_a + sign * c,
            tail: u_star + sign * c_star,
        }
    }
}

/// Star pressure by plain bisection, with its own formulation of the
/// pressure function.
pub fn bisection_pressure(wl: PrimitiveState, wr: PrimitiveState, model: GasModel) -> Result<f64> {
    let gamma = model.gamma;
    check_states(&wl, &wr, gamma)?;
    let jump = |p: f64, w: &PrimitiveState| {
        if p > w.pres {
            (p - w.pres) * (2.0 / (w.rho * ((gamma + 1.0) * p + (gamma - 1.0) * w.pres))).sqrt()
        } else {
            let c = (gamma * w.pres / w.rho).sqrt();
            2.0 * c / (gamma - 1.0) * (((gamma - 1.0) / (2.0 * gamma)) * (p / w.pres).ln()).exp_m1()
        }
    };
    let f = |p: f64| jump(p, &wl) + jump(p, &wr) + (wr.vel_a - wl.vel_a);

    let mut lo = 0.0_f64;
    let mut hi = wl.pres.max(wr.pres);
    while f(hi) < 0.0 {
        lo = hi;
        hi *= 2.0;
    }
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Samples the self-similar solution at `xi = x / t`.
pub fn sample_riemann(
    waves: &WaveStructure,
    wl: PrimitiveState,
    wr: PrimitiveState,
    xi: f64,
    model: GasModel,
) -> PrimitiveState {
    let gamma = model.gamma;
    if xi <= waves.u_star {
        sample_side(waves.left, &wl, waves.p_star, waves.u_star, xi, gamma, -1.0)
    } else {
        sample_side(waves.right, &wr, waves.p_star, waves.u_star, xi, gamma, 1.0)
    }
}

#[allow(clippy::too_many_arguments)]
fn sample_side(
    wave: Wave,
    w: &PrimitiveState,
    p_star: f64,
    u_star: f64,
    xi: f64,
    gamma: f64,
    sign: f64,
) -> PrimitiveState {
    // `xi` lies beyond `speed`, away from the contact
    let outside = |speed: f64| sign * (xi - speed) > 0.0;
    match wave {
        Wave::Shock { speed } => {
            if outside(speed) {
                *w
            } else {
                let pr = p_star / w.pres;
                let g6 = (gamma - 1.0) / (gamma + 1.0);
                PrimitiveState::new(w.rho * (pr + g6) / (g6 * pr + 1.0), u_star, w.vel_b, p_star)
            }
        }
        Wave::Rarefaction { head, tail } => {
            if outside(head) {
                *w
            } else if !outside(tail) {
                let rho = w.rho * (p_star / w.pres).powf(1.0 / gamma);
                PrimitiveState::new(rho, u_star, w.vel_b, p_star)
            } else {
                let c = sound(w, gamma);
                let c_fan = 2.0 / (gamma + 1.0) * (c - sign * 0.5 * (gamma - 1.0) * (w.vel_a - xi));
                let u_fan = 2.0 / (gamma + 1.0) * (-sign * c + 0.5 * (gamma - 1.0) * w.vel_a + xi);
                let scale = c_fan / c;
                PrimitiveState::new(
                    w.rho * scale.powf(2.0 / (gamma - 1.0)),
                    u_fan,
                    w.vel_b,
                    w.pres * scale.powf(2.0 * gamma / (gamma - 1.0)),
                )
            }
        }
    }
}

/// Exact Sod density profile at time `t` on `n` cells of width `1/n`, with
/// the diaphragm at `x = 0.5`.
pub fn sod_profile(n: usize, t: f64, model: GasModel) -> Result<Vec<PrimitiveState>> {
    let (wl, wr) = sod_states();
    let waves = exact_riemann(wl, wr, model)?;
    Ok((1..=n)
        .map(|j| {
            let x = (j as f64 - 0.5) / n as f64;
            sample_riemann(&waves, wl, wr, (x - 0.5) / t, model)
        })
        .collect())
}

/// Left and right primitive states of the Sod problem.
pub fn sod_states() -> (PrimitiveState, PrimitiveState) {
    (
        PrimitiveState::new(1.0, 0.0, 0.0, 1.0),
        PrimitiveState::new(0.125, 0.0, 0.0, 0.1),
    )
}
