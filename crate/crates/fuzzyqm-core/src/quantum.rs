//! Wave-function evolution and the log-transform bridge to the action
//! picture.
//!
//! Time stepping is Crank-Nicolson with a direct complex tridiagonal solve
//! (cyclic for periodic boundaries), which keeps the evolution unitary to
//! round-off and makes norm conservation a sharp testable invariant. The
//! transform `s = K ln(psi)` with `K = -i hbar` needs a phase unwrapped away
//! from its branch cuts; unwrapping marches outward from the node of maximal
//! amplitude and nodes below a relative amplitude floor are masked invalid.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{Boundary, ComplexField, Grid1D};
use crate::potential::Potential;
use crate::tridiag::{solve_const_off, solve_cyclic_const_off};

const MASK_EPSILON_REL: f64 = 1e-12;

/// Complex amplitude sampled on a grid at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveFunction {
    psi: ComplexField,
    t: f64,
}

impl WaveFunction {
    pub fn new(psi: ComplexField, t: f64) -> Self {
        Self { psi, t }
    }

    /// Normalized Gaussian packet `exp(-(x-center)^2/(4 sigma^2) + i k0 x)`.
    ///
    /// `sigma` is the standard deviation of the position density.
    pub fn gaussian(grid: Grid1D, center: f64, sigma: f64, k0: f64, t: f64) -> Result<Self> {
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::Config(format!(
                "packet width must be > 0, got {sigma}"
            )));
        }
        let psi = ComplexField::from_fn(grid, |x| {
            let envelope = (-(x - center) * (x - center) / (4.0 * sigma * sigma)).exp();
            Complex64::from_polar(envelope, k0 * x)
        });
        Self::new(psi, t).normalized()
    }

    pub fn grid(&self) -> Grid1D {
        self.psi.grid()
    }

    pub fn field(&self) -> &ComplexField {
        &self.psi
    }

    pub fn values(&self) -> &[Complex64] {
        self.psi.values()
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// `sqrt` of the integrated density.
    pub fn norm(&self) -> f64 {
        self.psi.l2_norm()
    }

    /// Rescale so the integrated density is one.
    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::DegenerateInput(
                "cannot normalize a zero wave function".into(),
            ));
        }
        let values = self.values().iter().map(|v| v / n).collect();
        Ok(Self {
            psi: ComplexField::from_values(self.grid(), values)?,
            t: self.t,
        })
    }
}

/// Parameters of a monochromatic wave `C exp[-i (omega t - k x)]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneWaveParams {
    pub k: f64,
    pub omega: f64,
    pub amplitude: Complex64,
}

impl PlaneWaveParams {
    pub fn new(k: f64, omega: f64, amplitude: Complex64) -> Self {
        Self {
            k,
            omega,
            amplitude,
        }
    }

    /// Fix `omega` from the free-particle dispersion relation.
    pub fn with_dispersion(k: f64, mass: f64, hbar: f64, amplitude: Complex64) -> Result<Self> {
        Ok(Self {
            k,
            omega: dispersion_omega(k, mass, hbar)?,
            amplitude,
        })
    }
}

/// Free-particle dispersion relation `omega = hbar k^2 / (2 m)`.
pub fn dispersion_omega(k: f64, mass: f64, hbar: f64) -> Result<f64> {
    if !(mass.is_finite() && mass > 0.0) {
        return Err(Error::Config(format!("mass must be > 0, got {mass}")));
    }
    Ok(hbar / (2.0 * mass) * k * k)
}

/// Sample the analytic plane wave on a grid at time `t`.
pub fn plane_wave(grid: Grid1D, params: &PlaneWaveParams, t: f64) -> WaveFunction {
    let psi = ComplexField::from_fn(grid, |x| {
        params.amplitude * Complex64::from_polar(1.0, params.k * x - params.omega * t)
    });
    WaveFunction::new(psi, t)
}

/// The transformed variable `s = K ln(psi)` with `K = -i hbar`, carrying a
/// validity mask for nodes where the amplitude is too small to take a log.
#[derive(Debug, Clone)]
pub struct ComplexAction {
    s: ComplexField,
    k_const: Complex64,
    mask: Vec<bool>,
    t: f64,
}

impl ComplexAction {
    pub fn grid(&self) -> Grid1D {
        self.s.grid()
    }

    pub fn field(&self) -> &ComplexField {
        &self.s
    }

    pub fn values(&self) -> &[Complex64] {
        self.s.values()
    }

    /// Transform constant `K = -i hbar`.
    pub fn k_const(&self) -> Complex64 {
        self.k_const
    }

    /// `true` where the transform is valid.
    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn masked_fraction(&self) -> f64 {
        let invalid = self.mask.iter().filter(|m| !**m).count();
        invalid as f64 / self.mask.len() as f64
    }

    /// Real part as a field (the classical action candidate).
    pub fn real_part(&self) -> crate::grid::RealField {
        crate::grid::RealField::from_values(
            self.grid(),
            self.values().iter().map(|v| v.re).collect(),
        )
        .expect("same grid")
    }
}

/// Map an angle difference into `(-pi, pi]`.
fn wrap_to_pi(d: f64) -> f64 {
    let tau = std::f64::consts::TAU;
    let mut w = d % tau;
    if w > std::f64::consts::PI {
        w -= tau;
    } else if w <= -std::f64::consts::PI {
        w += tau;
    }
    w
}

/// Log-transform a wave function: `s = hbar*theta - i hbar ln|psi|` with the
/// phase `theta` unwrapped from the node of maximal amplitude.
///
/// Nodes with `|psi| <= 1e-12 * max|psi|` are masked invalid; the unwrapping
/// march continues through them so an isolated hole only offsets the far side
/// by a harmless multiple of `2 pi hbar`.
pub fn log_transform(psi: &WaveFunction, hbar: f64) -> Result<ComplexAction> {
    let values = psi.values();
    let n = values.len();
    let mut max_amp = 0.0_f64;
    let mut anchor = 0usize;
    for (i, v) in values.iter().enumerate() {
        let a = v.norm();
        if a > max_amp {
            max_amp = a;
            anchor = i;
        }
    }
    if max_amp == 0.0 || !max_amp.is_finite() {
        return Err(Error::DegenerateInput(
            "log transform needs at least one node with nonzero amplitude".into(),
        ));
    }
    let floor = MASK_EPSILON_REL * max_amp;
    let mask: Vec<bool> = values.iter().map(|v| v.norm() > floor).collect();

    let mut theta = vec![0.0_f64; n];
    theta[anchor] = values[anchor].arg();
    for i in anchor + 1..n {
        theta[i] = theta[i - 1] + wrap_to_pi(values[i].arg() - values[i - 1].arg());
    }
    for i in (0..anchor).rev() {
        theta[i] = theta[i + 1] + wrap_to_pi(values[i].arg() - values[i + 1].arg());
    }

    let s_values = (0..n)
        .map(|i| {
            if mask[i] {
                Complex64::new(hbar * theta[i], -hbar * values[i].norm().ln())
            } else {
                Complex64::ZERO
            }
        })
        .collect();
    Ok(ComplexAction {
        s: ComplexField::from_values(psi.grid(), s_values)?,
        k_const: Complex64::new(0.0, -hbar),
        mask,
        t: psi.t(),
    })
}

/// Invert the log transform: `psi = exp(i s / hbar)`.
///
/// Masked nodes come back as zero amplitude.
pub fn exp_transform(action: &ComplexAction) -> Result<WaveFunction> {
    let hbar = -action.k_const().im;
    if !(hbar.is_finite() && hbar > 0.0) {
        return Err(Error::Config(format!(
            "transform constant must give hbar > 0, got {hbar}"
        )));
    }
    let values = action
        .values()
        .iter()
        .zip(action.mask())
        .map(|(s, ok)| {
            if *ok {
                (Complex64::I * s / hbar).exp()
            } else {
                Complex64::ZERO
            }
        })
        .collect();
    Ok(WaveFunction::new(
        ComplexField::from_values(action.grid(), values)?,
        action.t(),
    ))
}

/// Largest time step below the explicit-scheme heuristic `dx^2 m / hbar`.
///
/// Crank-Nicolson is stable beyond it; staying under keeps phase errors small.
pub fn cfl_dt_limit(grid: Grid1D, mass: f64, hbar: f64) -> f64 {
    grid.dx() * grid.dx() * mass / hbar
}

/// Crank-Nicolson evolution of `psi0` over `steps` steps of length `dt`.
///
/// Solves `(1 + i dt H / 2 hbar) psi_next = (1 - i dt H / 2 hbar) psi` with
/// `H = -(hbar^2/2m) lap + V` by direct tridiagonal elimination; the cyclic
/// variant serves periodic boundaries, where node `n-1` mirrors node `0`.
/// Time-dependent potentials are sampled at each step's midpoint.
pub fn evolve(
    psi0: &WaveFunction,
    potential: &Potential,
    mass: f64,
    hbar: f64,
    dt: f64,
    steps: usize,
    boundary: Boundary,
) -> Result<WaveFunction> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::Config(format!("time step must be > 0, got {dt}")));
    }
    if !(mass > 0.0 && hbar > 0.0) {
        return Err(Error::Config("mass and hbar must be > 0".into()));
    }
    let grid = psi0.grid();
    let n = grid.n();
    let unknowns = match boundary {
        Boundary::Reflecting => n,
        Boundary::Periodic => n - 1,
    };

    let dx = grid.dx();
    let alpha = Complex64::new(0.0, dt / (2.0 * hbar));
    let h_off = -hbar * hbar / (2.0 * mass * dx * dx);
    let h_diag0 = hbar * hbar / (mass * dx * dx);
    let a_off = alpha * h_off;

    let build_diags = |t_mid: f64| -> (Vec<Complex64>, Vec<Complex64>) {
        let mut a_diag = Vec::with_capacity(unknowns);
        let mut b_diag = Vec::with_capacity(unknowns);
        for i in 0..unknowns {
            let h_ii = h_diag0 + potential.at(grid.x(i), t_mid);
            a_diag.push(Complex64::new(1.0, 0.0) + alpha * h_ii);
            b_diag.push(Complex64::new(1.0, 0.0) - alpha * h_ii);
        }
        (a_diag, b_diag)
    };

    let mut t = psi0.t();
    let mut psi: Vec<Complex64> = psi0.values()[..unknowns].to_vec();
    let (mut a_diag, mut b_diag) = build_diags(t + 0.5 * dt);

    let mut rhs = vec![Complex64::ZERO; unknowns];
    for _ in 0..steps {
        if potential.is_time_dependent() {
            let rebuilt = build_diags(t + 0.5 * dt);
            a_diag = rebuilt.0;
            b_diag = rebuilt.1;
        }
        match boundary {
            Boundary::Reflecting => {
                for i in 0..unknowns {
                    let mut v = b_diag[i] * psi[i];
                    if i > 0 {
                        v -= a_off * psi[i - 1];
                    }
                    if i + 1 < unknowns {
                        v -= a_off * psi[i + 1];
                    }
                    rhs[i] = v;
                }
                psi = solve_const_off(&a_diag, a_off, &rhs)?;
            }
            Boundary::Periodic => {
                for i in 0..unknowns {
                    let prev = psi[(i + unknowns - 1) % unknowns];
                    let next = psi[(i + 1) % unknowns];
                    rhs[i] = b_diag[i] * psi[i] - a_off * (prev + next);
                }
                psi = solve_cyclic_const_off(&a_diag, a_off, &rhs)?;
            }
        }
        t += dt;
    }

    let mut values = psi;
    if boundary == Boundary::Periodic {
        let first = values[0];
        values.push(first);
    }
    Ok(WaveFunction::new(
        ComplexField::from_values(grid, values)?,
        t,
    ))
}

fn snapshot_pair_dt(psi0: &WaveFunction, psi1: &WaveFunction) -> Result<f64> {
    if psi0.grid() != psi1.grid() {
        return Err(Error::GridMismatch(
            "snapshots live on different grids".into(),
        ));
    }
    let dt = psi1.t() - psi0.t();
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::Config(format!(
            "snapshots must be ordered in time, got dt = {dt}"
        )));
    }
    Ok(dt)
}

/// Pointwise residual of the homogeneous quadratic form
/// `K psi dpsi/dt + (K^2 / 2m) (grad psi)^2` with `K = -i hbar`.
///
/// Vanishes on single plane waves but not on their superpositions.
pub fn nonlinear_residual(
    psi0: &WaveFunction,
    psi1: &WaveFunction,
    mass: f64,
    hbar: f64,
    boundary: Boundary,
) -> Result<ComplexField> {
    let dt = snapshot_pair_dt(psi0, psi1)?;
    let grid = psi0.grid();
    let k_const = Complex64::new(0.0, -hbar);
    let mid = ComplexField::from_values(
        grid,
        psi0.values()
            .iter()
            .zip(psi1.values())
            .map(|(a, b)| (a + b) * 0.5)
            .collect(),
    )?;
    let grad = mid.gradient_with(boundary);
    let values = (0..grid.n())
        .map(|i| {
            let dpsi_dt = (psi1.values()[i] - psi0.values()[i]) / dt;
            let g = grad.values()[i];
            k_const * mid.values()[i] * dpsi_dt + k_const * k_const / (2.0 * mass) * g * g
        })
        .collect();
    ComplexField::from_values(grid, values)
}

/// Pointwise residual of the linear evolution equation,
/// `i hbar dpsi/dt + (hbar^2 / 2m) lap psi - V psi`.
pub fn schrodinger_residual(
    psi0: &WaveFunction,
    psi1: &WaveFunction,
    potential: &Potential,
    mass: f64,
    hbar: f64,
    boundary: Boundary,
) -> Result<ComplexField> {
    let dt = snapshot_pair_dt(psi0, psi1)?;
    let grid = psi0.grid();
    let t_mid = psi0.t() + 0.5 * dt;
    let mid = ComplexField::from_values(
        grid,
        psi0.values()
            .iter()
            .zip(psi1.values())
            .map(|(a, b)| (a + b) * 0.5)
            .collect(),
    )?;
    let lap = mid.laplacian_with(boundary);
    let values = (0..grid.n())
        .map(|i| {
            let dpsi_dt = (psi1.values()[i] - psi0.values()[i]) / dt;
            Complex64::new(0.0, hbar) * dpsi_dt + hbar * hbar / (2.0 * mass) * lap.values()[i]
                - potential.at(grid.x(i), t_mid) * mid.values()[i]
        })
        .collect();
    ComplexField::from_values(grid, values)
}

/// Check that `k` fits a whole number of wavelengths into the grid span.
pub fn commensurate(grid: Grid1D, k: f64) -> bool {
    let cycles = k * (grid.x_max() - grid.x_min()) / std::f64::consts::TAU;
    (cycles - cycles.round()).abs() <= 1e-9 * cycles.abs().max(1.0)
}

/// Evolve plane waves and fit each frequency from the phase of the overlap
/// with the initial state, returning `(k, omega_fitted)` pairs.
pub fn measure_dispersion(
    k_list: &[f64],
    grid: Grid1D,
    mass: f64,
    hbar: f64,
    t_total: f64,
    steps: usize,
) -> Result<Vec<(f64, f64)>> {
    if steps < 2 {
        return Err(Error::Config(
            "dispersion fit needs at least 2 steps".into(),
        ));
    }
    if !(t_total.is_finite() && t_total > 0.0) {
        return Err(Error::Config(format!(
            "evolution span must be > 0, got {t_total}"
        )));
    }
    let dt = t_total / steps as f64;
    let mut out = Vec::with_capacity(k_list.len());
    for &k in k_list {
        if !commensurate(grid, k) {
            return Err(Error::Config(format!(
                "k = {k} does not fit a whole number of wavelengths into the grid"
            )));
        }
        let params = PlaneWaveParams::with_dispersion(k, mass, hbar, Complex64::new(1.0, 0.0))?;
        let psi0 = plane_wave(grid, &params, 0.0);

        // Phase of <psi0 | psi(t_j)> unwrapped over the run.
        let mut phases = Vec::with_capacity(steps + 1);
        let mut times = Vec::with_capacity(steps + 1);
        phases.push(0.0_f64);
        times.push(0.0_f64);
        let mut psi = psi0.clone();
        for j in 1..=steps {
            psi = evolve(
                &psi,
                &Potential::Zero,
                mass,
                hbar,
                dt,
                1,
                Boundary::Periodic,
            )?;
            let overlap: Complex64 = psi0
                .values()
                .iter()
                .zip(psi.values())
                .map(|(a, b)| a.conj() * b)
                .sum();
            let prev = phases[j - 1];
            phases.push(prev + wrap_to_pi(overlap.arg() - prev));
            times.push(j as f64 * dt);
        }

        // Least-squares slope of phase vs time; omega is its negative.
        let t_mean = times.iter().sum::<f64>() / times.len() as f64;
        let p_mean = phases.iter().sum::<f64>() / phases.len() as f64;
        let mut num = 0.0;
        let mut den = 0.0;
        for (t, p) in times.iter().zip(&phases) {
            num += (t - t_mean) * (p - p_mean);
            den += (t - t_mean) * (t - t_mean);
        }
        out.push((k, -num / den));
    }
    Ok(out)
}
