//! Per-cell fluid state and the ideal-gas closure.
//!
//! States are expressed in a *sweep frame*: `mom_a`/`vel_a` is the component
//! along the direction currently being swept and `mom_b`/`vel_b` the
//! transverse one. The grid stores x-momentum in `mom_a`; reading a row strip
//! swaps the two.

use crate::error::{Error, Field, Result};

/// Adiabatic index and Courant factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GasModel {
    pub gamma: f64,
    pub cfl: f64,
}

impl GasModel {
    pub const DEFAULT_GAMMA: f64 = 1.4;
    pub const DEFAULT_CFL: f64 = 0.8;

    pub fn new(gamma: f64, cfl: f64) -> Result<Self> {
        if !(gamma > 1.0) || !gamma.is_finite() {
            return Err(Error::GasModel(format!("gamma must be > 1, got {gamma}")));
        }
        if !(cfl > 0.0 && cfl <= 1.0) {
            return Err(Error::GasModel(format!("cfl must be in (0, 1], got {cfl}")));
        }
        Ok(Self { gamma, cfl })
    }
}

impl Default for GasModel {
    fn default() -> Self {
        Self {
            gamma: Self::DEFAULT_GAMMA,
            cfl: Self::DEFAULT_CFL,
        }
    }
}

/// Mass, momentum and total energy densities of one cell.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ConservedState {
    pub rho: f64,
    pub mom_a: f64,
    pub mom_b: f64,
    pub ener: f64,
}

/// Density, velocity and pressure of one cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrimitiveState {
    pub rho: f64,
    pub vel_a: f64,
    pub vel_b: f64,
    pub pres: f64,
}

impl ConservedState {
    pub const fn new(rho: f64, mom_a: f64, mom_b: f64, ener: f64) -> Self {
        Self {
            rho,
            mom_a,
            mom_b,
            ener,
        }
    }

    /// Exchanges the along-sweep and transverse momenta.
    pub fn swapped(self) -> Self {
        Self {
            mom_a: self.mom_b,
            mom_b: self.mom_a,
            ..self
        }
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.rho, self.mom_a, self.mom_b, self.ener]
    }

    pub fn from_array(v: [f64; 4]) -> Self {
        Self::new(v[0], v[1], v[2], v[3])
    }

    /// Checks density and internal energy positivity.
    pub fn validate(&self) -> Result<()> {
        if !(self.rho > 0.0) {
            return Err(Error::Positivity {
                field: Field::Density,
                value: self.rho,
            });
        }
        let internal = self.ener - 0.5 * (self.mom_a * self.mom_a + self.mom_b * self.mom_b) / self.rho;
        if !(internal > 0.0) {
            return Err(Error::Positivity {
                field: Field::InternalEnergy,
                value: internal,
            });
        }
        Ok(())
    }
}

impl PrimitiveState {
    pub const fn new(rho: f64, vel_a: f64, vel_b: f64, pres: f64) -> Self {
        Self {
            rho,
            vel_a,
            vel_b,
            pres,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rho > 0.0) {
            return Err(Error::Positivity {
                field: Field::Density,
                value: self.rho,
            });
        }
        if !(self.pres > 0.0) {
            return Err(Error::Positivity {
                field: Field::Pressure,
                value: self.pres,
            });
        }
        Ok(())
    }
}

/// Converts to primitives, rejecting non-positive density or pressure.
pub fn cons_to_prim(u: ConservedState, model: GasModel) -> Result<PrimitiveState> {
    if !(u.rho > 0.0) {
        return Err(Error::Positivity {
            field: Field::Density,
            value: u.rho,
        });
    }
    let vel_a = u.mom_a / u.rho;
    let vel_b = u.mom_b / u.rho;
    let pres = (model.gamma - 1.0) * (u.ener - 0.5 * u.rho * (vel_a * vel_a + vel_b * vel_b));
    if !(pres > 0.0) {
        return Err(Error::Positivity {
            field: Field::Pressure,
            value: pres,
        });
    }
    Ok(PrimitiveState {
        rho: u.rho,
        vel_a,
        vel_b,
        pres,
    })
}

/// Algebraic inverse of [`cons_to_prim`].
pub fn prim_to_cons(w: PrimitiveState, model: GasModel) -> Result<ConservedState> {
    w.validate()?;
    Ok(ConservedState {
        rho: w.rho,
        mom_a: w.rho * w.vel_a,
        mom_b: w.rho * w.vel_b,
        ener: w.pres / (model.gamma - 1.0) + 0.5 * w.rho * (w.vel_a * w.vel_a + w.vel_b * w.vel_b),
    })
}

pub fn sound_speed(w: PrimitiveState, model: GasModel) -> f64 {
    (model.gamma * w.pres / w.rho).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 4.0 * f64::EPSILON * a.abs().max(b.abs()).max(1.0)
    }

    #[test]
    fn static_gas_pressure() {
        let w = cons_to_prim(ConservedState::new(1.0, 0.0, 0.0, 2.5), GasModel::default()).unwrap();
        assert_eq!((w.rho, w.vel_a, w.vel_b), (1.0, 0.0, 0.0));
        assert!(close(w.pres, 1.0));
    }

    #[test]
    fn moving_gas_pressure() {
        let w = cons_to_prim(ConservedState::new(1.0, 1.0, 0.0, 3.0), GasModel::default()).unwrap();
        assert_eq!((w.vel_a, w.vel_b), (1.0, 0.0));
        assert!(close(w.pres, 1.0));
    }

    #[test]
    fn prim_to_cons_examples() {
        let m = GasModel::default();
        let u = prim_to_cons(PrimitiveState::new(1.0, 0.0, 0.0, 1.0), m).unwrap();
        assert!(close(u.ener, 2.5));
        assert_eq!((u.rho, u.mom_a, u.mom_b), (1.0, 0.0, 0.0));
        let u = prim_to_cons(PrimitiveState::new(0.125, 0.0, 0.0, 0.1), m).unwrap();
        assert!(close(u.ener, 0.25));
    }

    #[test]
    fn sound_speed_examples() {
        let m = GasModel::default();
        let c = sound_speed(PrimitiveState::new(1.0, 0.0, 0.0, 1.0), m);
        assert!((c - 1.183_215_956_619_923_2).abs() < 1e-15);
        let c = sound_speed(PrimitiveState::new(4.0, 0.0, 0.0, 1.0), m);
        assert!((c - 0.591_607_978_309_961_6).abs() < 1e-15);
    }

    #[test]
    fn positivity_errors_name_the_field() {
        let m = GasModel::default();
        let err = cons_to_prim(ConservedState::new(0.0, 0.0, 0.0, 1.0), m).unwrap_err();
        assert!(matches!(err, Error::Positivity { field: Field::Density, .. }));
        let err = cons_to_prim(ConservedState::new(1.0, 2.0, 0.0, 1.0), m).unwrap_err();
        assert!(matches!(err, Error::Positivity { field: Field::Pressure, .. }));
        let err = prim_to_cons(PrimitiveState::new(1.0, 0.0, 0.0, 0.0), m).unwrap_err();
        assert!(matches!(err, Error::Positivity { field: Field::Pressure, .. }));
    }

    #[test]
    fn gas_model_bounds() {
        assert!(GasModel::new(1.0, 0.5).is_err());
        assert!(GasModel::new(1.4, 0.0).is_err());
        assert!(GasModel::new(1.4, 1.2).is_err());
        assert!(GasModel::new(5.0 / 3.0, 1.0).is_ok());
    }

    fn ulps(a: f64, b: f64) -> u64 {
        if a == b {
            return 0;
        }
        let (ia, ib) = (a.to_bits() as i64, b.to_bits() as i64);
        if (ia < 0) != (ib < 0) {
            // straddling zero: distance through +-0
            return (ia & i64::MAX) as u64 + (ib & i64::MAX) as u64;
        }
        ia.abs_diff(ib)
    }

    // Subsonic states: kinetic energy stays comparable to internal energy,
    // so neither direction of the round trip cancels catastrophically.
    fn subsonic() -> impl Strategy<Value = PrimitiveState> {
        (0.01f64..100.0, 0.01f64..100.0, -1.0f64..1.0, -1.0f64..1.0).prop_map(|(rho, pres, ma, mb)| {
            let c = (1.4 * pres / rho).sqrt();
            PrimitiveState::new(rho, ma * c, mb * c, pres)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn round_trip_within_four_ulps(w in subsonic()) {
            let m = GasModel::default();
            let u = prim_to_cons(w, m).unwrap();
            let back = cons_to_prim(u, m).unwrap();
            prop_assert!(ulps(back.rho, w.rho) <= 4);
            prop_assert!(ulps(back.vel_a, w.vel_a) <= 4, "{} vs {}", back.vel_a, w.vel_a);
            prop_assert!(ulps(back.vel_b, w.vel_b) <= 4);
            prop_assert!(ulps(back.pres, w.pres) <= 4, "{} vs {}", back.pres, w.pres);

            let again = prim_to_cons(back, m).unwrap();
            prop_assert!(ulps(again.mom_a, u.mom_a) <= 4);
            prop_assert!(ulps(again.mom_b, u.mom_b) <= 4);
            prop_assert!(ulps(again.ener, u.ener) <= 4);
        }
    }
}
