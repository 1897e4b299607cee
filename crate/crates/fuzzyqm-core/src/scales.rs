//! Characteristic physical scales and the dimensionless ratio derived
//! from them.

use crate::error::{Error, Result};

/// Characteristic scales of a run: length `L0`, time `t0`, mass `m` and the
/// action quantum `hbar`.
///
/// The derived action scale is `S0 = m * L0^2 / t0`; the dimensionless ratio
/// `hbar / S0` controls how far the dynamics sit from the classical limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scales {
    l0: f64,
    t0: f64,
    mass: f64,
    hbar: f64,
}

impl Scales {
    pub fn new(l0: f64, t0: f64, mass: f64, hbar: f64) -> Result<Self> {
        for (name, v) in [("L0", l0), ("t0", t0), ("m", mass), ("hbar", hbar)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!(
                    "scale {name} must be finite and > 0, got {v}"
                )));
            }
        }
        Ok(Self { l0, t0, mass, hbar })
    }

    pub fn l0(&self) -> f64 {
        self.l0
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    /// Action scale `S0 = m * L0^2 / t0`.
    pub fn action_scale(&self) -> f64 {
        self.mass * self.l0 * self.l0 / self.t0
    }

    /// Dimensionless `hbar / S0`: the knob that interpolates between quantum
    /// and classical regimes.
    pub fn dimensionless_hbar(&self) -> f64 {
        self.hbar / self.action_scale()
    }
}
