//! Closed-form state of a free particle emerging from a Gaussian aperture,
//! its membership density, and the joint narrow-slit/classical limit.
//!
//! The amplitude is reconstructed by convolving the free-particle kernel with
//! a Gaussian aperture of half-width `b` (transmission `exp(-y^2/(2 b^2))`,
//! so the density right behind the slit is `exp(-y^2/b^2)`), boosted to
//! velocity `v0`. The reconstruction is certified against independent
//! Crank-Nicolson propagation in the tests before anything else relies on it.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fuzzy::MembershipDensity;
use crate::grid::{ComplexField, Grid1D, RealField};
use crate::quantum::WaveFunction;

/// Parameters of the slit setup.
///
/// `t_flight` is the travel time from the source to the slit; the default
/// boost `v0 = center / t_flight` follows from that geometry but can be
/// overridden for controlled experiments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianSlitParams {
    t_flight: f64,
    half_width: f64,
    center: f64,
    velocity: f64,
    mass: f64,
    hbar: f64,
}

impl GaussianSlitParams {
    pub fn new(t_flight: f64, half_width: f64, center: f64, mass: f64, hbar: f64) -> Result<Self> {
        if !(t_flight.is_finite() && t_flight > 0.0) {
            return Err(Error::Config(format!(
                "flight time must be > 0, got {t_flight}"
            )));
        }
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::Config(format!(
                "slit half-width must be > 0, got {half_width}"
            )));
        }
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::Config(format!("mass must be > 0, got {mass}")));
        }
        if !(hbar.is_finite() && hbar >= 0.0) {
            return Err(Error::Config(format!("hbar must be >= 0, got {hbar}")));
        }
        Ok(Self {
            t_flight,
            half_width,
            center,
            velocity: center / t_flight,
            mass,
            hbar,
        })
    }

    pub fn with_velocity(mut self, v0: f64) -> Self {
        self.velocity = v0;
        self
    }

    pub fn with_half_width(mut self, b: f64) -> Self {
        self.half_width = b;
        self
    }

    pub fn with_hbar(mut self, hbar: f64) -> Self {
        self.hbar = hbar;
        self
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn velocity(&self) -> f64 {
        self.velocity
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    /// Density width `w(t)` in the convention `mu ~ exp(-(x-c)^2 / w^2)`:
    /// `w^2 = b^2 (1 + (hbar t / (m b^2))^2)`.
    pub fn width_at(&self, t: f64) -> f64 {
        let b = self.half_width;
        let spread = self.hbar * t / (self.mass * b * b);
        b * (1.0 + spread * spread).sqrt()
    }
}

/// Amplitude immediately behind the slit (time zero for the propagation).
pub fn aperture_state(grid: Grid1D, params: &GaussianSlitParams) -> Result<WaveFunction> {
    if params.hbar <= 0.0 {
        return Err(Error::Domain("aperture state needs hbar > 0".into()));
    }
    let b = params.half_width;
    let norm = (std::f64::consts::PI * b * b).powf(-0.25);
    let k0 = params.mass * params.velocity / params.hbar;
    let psi = ComplexField::from_fn(grid, |x| {
        let d = x - params.center;
        Complex64::from_polar(norm * (-d * d / (2.0 * b * b)).exp(), k0 * d)
    });
    Ok(WaveFunction::new(psi, 0.0))
}

/// Closed-form amplitude a time `t > 0` after the slit.
pub fn slit_psi(params: &GaussianSlitParams, x: f64, t: f64) -> Result<Complex64> {
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::Domain(format!(
            "slit amplitude needs t > 0, got {t}"
        )));
    }
    if params.hbar <= 0.0 {
        return Err(Error::Domain("slit amplitude needs hbar > 0".into()));
    }
    let (m, hbar, b) = (params.mass, params.hbar, params.half_width);
    let d = x - params.center;
    let c0 = (std::f64::consts::PI * b * b).powf(-0.25);
    // Gaussian integral of kernel * aperture: exp(-a u^2 + beta u) integrates
    // to sqrt(pi/a) exp(beta^2 / 4a); Re(a) > 0 keeps the principal branch.
    let a = Complex64::new(1.0 / (2.0 * b * b), -m / (2.0 * hbar * t));
    let beta = Complex64::new(0.0, m / hbar * (params.velocity - d / t));
    let kernel_norm = (Complex64::new(0.0, -m / (2.0 * std::f64::consts::PI * hbar * t))).sqrt();
    let gauss = (Complex64::new(std::f64::consts::PI, 0.0) / a).sqrt();
    let phase = Complex64::new(0.0, m * d * d / (2.0 * hbar * t)) + beta * beta / (4.0 * a);
    Ok(c0 * kernel_norm * gauss * phase.exp())
}

/// Normalized membership density of the slit state on a grid.
///
/// `hbar = 0` degenerates to classical transport of the aperture profile:
/// the density translates at `v0` without spreading.
pub fn slit_density(
    params: &GaussianSlitParams,
    grid: Grid1D,
    t: f64,
) -> Result<MembershipDensity> {
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::Domain(format!("slit density needs t > 0, got {t}")));
    }
    let field = if params.hbar == 0.0 {
        let b = params.half_width;
        let c = params.center + params.velocity * t;
        RealField::from_fn(grid, |x| (-(x - c) * (x - c) / (b * b)).exp())
    } else {
        let mut values = Vec::with_capacity(grid.n());
        for i in 0..grid.n() {
            values.push(slit_psi(params, grid.x(i), t)?.norm_sqr());
        }
        RealField::from_values(grid, values)?
    };
    MembershipDensity::from_field(field, true)
}

/// One row of the narrow-slit sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlitSweepRow {
    pub hbar: f64,
    pub half_width: f64,
    pub width: f64,
}

/// Evaluate the density width at fixed `t` for a sequence of
/// `(hbar, half_width)` pairs; driving both to zero contracts the density
/// toward a delta spike.
pub fn classical_limit_sweep(
    pairs: &[(f64, f64)],
    base: &GaussianSlitParams,
    grid: Grid1D,
    t: f64,
) -> Result<Vec<SlitSweepRow>> {
    let mut rows = Vec::with_capacity(pairs.len());
    for &(hbar, b) in pairs {
        let params = base.with_half_width(b).with_hbar(hbar);
        let mu = slit_density(&params, grid, t)?;
        rows.push(SlitSweepRow {
            hbar,
            half_width: b,
            width: density_width(&mu)?,
        });
    }
    Ok(rows)
}

/// Width of a density in the `exp(-(x-c)^2/w^2)` convention: `sqrt(2 Var)`.
pub fn density_width(mu: &MembershipDensity) -> Result<f64> {
    let grid = mu.grid();
    let weighted = |f: &dyn Fn(f64) -> f64| -> Result<f64> {
        let field = RealField::from_values(
            grid,
            mu.values()
                .iter()
                .enumerate()
                .map(|(i, m)| m * f(grid.x(i)))
                .collect(),
        )?;
        crate::grid::integrate(&field)
    };
    let total = weighted(&|_| 1.0)?;
    if total <= 0.0 {
        return Err(Error::DegenerateInput("density has no mass".into()));
    }
    let mean = weighted(&|x| x)? / total;
    let second = weighted(&|x| x * x)? / total;
    Ok((2.0 * (second - mean * mean)).sqrt())
}
