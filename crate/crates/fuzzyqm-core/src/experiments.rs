//! Scripted numerical experiments: nondimensionalization, the dimensionless
//! action-balance residual with its quantum correction, the classical-limit
//! sweep, and the defuzzified (Ehrenfest-style) three-term balance.

use num_complex::Complex64;

use crate::classical;
use crate::error::{Error, Result};
use crate::fuzzy::MembershipDensity;
use crate::grid::{integrate, Boundary, ComplexField, Grid1D, RealField};
use crate::potential::Potential;
use crate::quantum::{evolve, log_transform, ComplexAction, WaveFunction};
use crate::scales::Scales;

/// A complex action snapshot and potential rescaled to dimensionless form:
/// positions over `L0`, time over `t0`, action and potential over `S0`.
#[derive(Debug, Clone)]
pub struct DimensionlessFields {
    grid: Grid1D,
    tau: f64,
    s: ComplexField,
    mask: Vec<bool>,
    u: RealField,
    h: f64,
}

impl DimensionlessFields {
    pub fn grid(&self) -> Grid1D {
        self.grid
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn action(&self) -> &ComplexField {
        &self.s
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn potential(&self) -> &RealField {
        &self.u
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// Same fields with the dimensionless ratio replaced; used to probe how
    /// the quantum correction scales at frozen action.
    pub fn with_h(&self, h: f64) -> Self {
        Self { h, ..self.clone() }
    }
}

/// Rescale a dimensional action snapshot and potential field by a `Scales`
/// record.
pub fn rescale(
    action: &ComplexAction,
    potential: &RealField,
    scales: &Scales,
) -> Result<DimensionlessFields> {
    if action.grid() != potential.grid() {
        return Err(Error::GridMismatch(
            "action and potential live on different grids".into(),
        ));
    }
    let s0 = scales.action_scale();
    if s0 == 0.0 {
        return Err(Error::Config("action scale must be nonzero".into()));
    }
    let grid = action.grid();
    let r_grid = Grid1D::new(
        grid.x_min() / scales.l0(),
        grid.x_max() / scales.l0(),
        grid.n(),
    )?;
    Ok(DimensionlessFields {
        grid: r_grid,
        tau: action.t() / scales.t0(),
        s: ComplexField::from_values(r_grid, action.values().iter().map(|v| v / s0).collect())?,
        mask: action.mask().to_vec(),
        u: RealField::from_values(r_grid, potential.values().iter().map(|v| v / s0).collect())?,
        h: scales.dimensionless_hbar(),
    })
}

/// Undo [`rescale`]: returns the dimensional action values, potential and
/// time.
pub fn unrescale(
    fields: &DimensionlessFields,
    scales: &Scales,
) -> Result<(ComplexField, RealField, f64)> {
    let s0 = scales.action_scale();
    let grid = Grid1D::new(
        fields.grid.x_min() * scales.l0(),
        fields.grid.x_max() * scales.l0(),
        fields.grid.n(),
    )?;
    Ok((
        ComplexField::from_values(grid, fields.s.values().iter().map(|v| v * s0).collect())?,
        RealField::from_values(grid, fields.u.values().iter().map(|v| v * s0).collect())?,
        fields.tau * scales.t0(),
    ))
}

/// Both sides of the dimensionless action balance evaluated from a snapshot
/// pair: `lhs = dS/dtau + (grad S)^2 / 2 + U` and `rhs = (i h / 2) lap S`.
#[derive(Debug, Clone)]
pub struct QuantumHjReport {
    pub lhs: ComplexField,
    pub rhs: ComplexField,
    /// Nodes whose full stencil footprint is unmasked.
    pub valid: Vec<bool>,
    pub masked_fraction: f64,
    /// Set when more than 10% of the nodes are masked.
    pub degraded_confidence: bool,
}

impl QuantumHjReport {
    fn windowed_l2(field: &ComplexField, window: &[bool]) -> f64 {
        let dx = field.grid().dx();
        let sum: f64 = field
            .values()
            .iter()
            .zip(window)
            .filter(|(_, ok)| **ok)
            .map(|(v, _)| v.norm_sqr())
            .sum();
        (sum * dx).sqrt()
    }

    fn windowed_linf(field: &ComplexField, window: &[bool]) -> f64 {
        field
            .values()
            .iter()
            .zip(window)
            .filter(|(_, ok)| **ok)
            .fold(0.0_f64, |m, (v, _)| m.max(v.norm()))
    }

    pub fn lhs_l2(&self) -> f64 {
        Self::windowed_l2(&self.lhs, &self.valid)
    }

    pub fn rhs_l2(&self) -> f64 {
        Self::windowed_l2(&self.rhs, &self.valid)
    }

    pub fn rhs_linf(&self) -> f64 {
        Self::windowed_linf(&self.rhs, &self.valid)
    }

    /// L2 norm of `lhs - rhs` over the valid window.
    pub fn mismatch_l2(&self) -> f64 {
        let diff = ComplexField::from_values(
            self.lhs.grid(),
            self.lhs
                .values()
                .iter()
                .zip(self.rhs.values())
                .map(|(a, b)| a - b)
                .collect(),
        )
        .expect("same grid");
        Self::windowed_l2(&diff, &self.valid)
    }

    /// Restrict the valid window with an extra per-node predicate.
    pub fn restricted(&self, keep: &[bool]) -> Self {
        let valid: Vec<bool> = self.valid.iter().zip(keep).map(|(a, b)| *a && *b).collect();
        Self {
            valid,
            ..self.clone()
        }
    }
}

/// Nodes whose difference-stencil footprint touches only unmasked nodes.
fn stencil_valid(mask: &[bool]) -> Vec<bool> {
    let n = mask.len();
    (0..n)
        .map(|i| {
            if i == 0 {
                mask[..4.min(n)].iter().all(|m| *m)
            } else if i == n - 1 {
                mask[n.saturating_sub(4)..].iter().all(|m| *m)
            } else {
                mask[i - 1] && mask[i] && mask[i + 1]
            }
        })
        .collect()
}

/// Evaluate the dimensionless balance on a snapshot pair; the mismatch of the
/// two returned sides is the discretization residual.
pub fn quantum_hj_residual(
    a: &DimensionlessFields,
    b: &DimensionlessFields,
) -> Result<QuantumHjReport> {
    if a.grid != b.grid {
        return Err(Error::GridMismatch(
            "snapshots live on different grids".into(),
        ));
    }
    if (a.h - b.h).abs() > 1e-15 * a.h.abs().max(1.0) {
        return Err(Error::Config(
            "snapshots carry different dimensionless ratios".into(),
        ));
    }
    let dtau = b.tau - a.tau;
    if !(dtau.is_finite() && dtau > 0.0) {
        return Err(Error::Config(format!(
            "snapshots must be ordered in time, got {dtau}"
        )));
    }
    let grid = a.grid;
    let mask: Vec<bool> = a.mask.iter().zip(&b.mask).map(|(x, y)| *x && *y).collect();
    let mid = ComplexField::from_values(
        grid,
        a.s.values()
            .iter()
            .zip(b.s.values())
            .map(|(x, y)| (x + y) * 0.5)
            .collect(),
    )?;
    let grad = mid.gradient();
    let lap = mid.laplacian();
    let h = a.h;

    let mut lhs = Vec::with_capacity(grid.n());
    let mut rhs = Vec::with_capacity(grid.n());
    for i in 0..grid.n() {
        let ds_dt = (b.s.values()[i] - a.s.values()[i]) / dtau;
        let g = grad.values()[i];
        lhs.push(ds_dt + g * g * 0.5 + a.u.values()[i]);
        rhs.push(Complex64::new(0.0, 0.5 * h) * lap.values()[i]);
    }

    let masked_fraction = mask.iter().filter(|m| !**m).count() as f64 / mask.len() as f64;
    Ok(QuantumHjReport {
        lhs: ComplexField::from_values(grid, lhs)?,
        rhs: ComplexField::from_values(grid, rhs)?,
        valid: stencil_valid(&mask),
        masked_fraction,
        degraded_confidence: masked_fraction > 0.10,
    })
}

/// Reference packet for the sweep, described in dimensionless units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPacket {
    pub center: f64,
    pub sigma: f64,
    /// Classical momentum in units of `S0 / L0`; the wavenumber grows as
    /// `momentum / h` when `h` shrinks.
    pub momentum: f64,
}

/// Configuration of the classical-limit sweep.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub grid: Grid1D,
    pub packet: SweepPacket,
    pub potential: Potential,
    pub dt: f64,
    pub steps: usize,
    /// Keep only nodes with density above this fraction of the peak when
    /// taking norms.
    pub weight_floor: f64,
}

/// One row of the sweep table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub h: f64,
    pub rhs_l2: f64,
    pub rhs_linf: f64,
    pub hj_residual_l2: f64,
}

/// Evolve the reference packet at each `h`, log-transform a late snapshot
/// pair, and report the quantum-correction norms together with the classical
/// balance residual of `Re(S)`.
pub fn classical_limit_sweep(h_values: &[f64], cfg: &SweepConfig) -> Result<Vec<SweepRow>> {
    if h_values.is_empty() {
        return Err(Error::Config("sweep needs at least one h value".into()));
    }
    if cfg.steps < 2 {
        return Err(Error::Config("sweep needs at least two time steps".into()));
    }
    let mut rows = Vec::with_capacity(h_values.len());
    for &h in h_values {
        let scales = Scales::new(1.0, 1.0, 1.0, h)?;
        let k0 = cfg.packet.momentum / h;
        let psi0 = WaveFunction::gaussian(cfg.grid, cfg.packet.center, cfg.packet.sigma, k0, 0.0)?;
        let near_end = evolve(
            &psi0,
            &cfg.potential,
            1.0,
            h,
            cfg.dt,
            cfg.steps - 1,
            Boundary::Reflecting,
        )?;
        let end = evolve(
            &near_end,
            &cfg.potential,
            1.0,
            h,
            cfg.dt,
            1,
            Boundary::Reflecting,
        )?;

        let action0 = log_transform(&near_end, h)?;
        let action1 = log_transform(&end, h)?;
        let t_mid = near_end.t() + 0.5 * cfg.dt;
        let u_field = cfg.potential.sample(cfg.grid, t_mid);
        let fields0 = rescale(&action0, &u_field, &scales)?;
        let fields1 = rescale(&action1, &u_field, &scales)?;
        let report = quantum_hj_residual(&fields0, &fields1)?;

        // Density window: ignore the masked tails where the transform is
        // meaningless anyway.
        let mu_mid = mid_density(&near_end, &end)?;
        let peak = mu_mid.values().iter().fold(0.0_f64, |m, v| m.max(*v));
        let keep: Vec<bool> = mu_mid
            .values()
            .iter()
            .map(|v| *v >= cfg.weight_floor * peak)
            .collect();
        let report = report.restricted(&keep);

        let classical = classical::hj_residual(
            &real_part_scaled(&fields0),
            &real_part_scaled(&fields1),
            fields1.tau - fields0.tau,
            &cfg.potential,
            1.0,
            fields0.tau,
        )?;
        let dx = cfg.grid.dx();
        let hj_l2: f64 = classical
            .values()
            .iter()
            .zip(&report.valid)
            .filter(|(_, ok)| **ok)
            .map(|(v, _)| v * v)
            .sum::<f64>()
            * dx;

        rows.push(SweepRow {
            h,
            rhs_l2: report.rhs_l2(),
            rhs_linf: report.rhs_linf(),
            hj_residual_l2: hj_l2.sqrt(),
        });
    }
    Ok(rows)
}

fn real_part_scaled(fields: &DimensionlessFields) -> RealField {
    RealField::from_values(
        fields.grid(),
        fields.action().values().iter().map(|v| v.re).collect(),
    )
    .expect("same grid")
}

fn mid_density(a: &WaveFunction, b: &WaveFunction) -> Result<MembershipDensity> {
    let mid = ComplexField::from_values(
        a.grid(),
        a.values()
            .iter()
            .zip(b.values())
            .map(|(x, y)| (x + y) * 0.5)
            .collect(),
    )?;
    MembershipDensity::from_field(mid.abs_sqr(), true)
}

/// The three defuzzified terms of the action balance and their sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EhrenfestReport {
    pub term_ds_dt: f64,
    pub term_kinetic: f64,
    pub term_potential: f64,
    pub residual: f64,
}

impl EhrenfestReport {
    pub fn max_term_magnitude(&self) -> f64 {
        self.term_ds_dt
            .abs()
            .max(self.term_kinetic.abs())
            .max(self.term_potential.abs())
    }
}

const EHRENFEST_BOUNDARY_TOL: f64 = 1e-10;
const EHRENFEST_AMPLITUDE_FLOOR: f64 = 1e-15;

fn check_decaying_boundary(psi: &WaveFunction) -> Result<f64> {
    let max = psi.field().linf_norm();
    if max == 0.0 {
        return Err(Error::DegenerateInput(
            "wave function vanishes everywhere".into(),
        ));
    }
    let n = psi.grid().n();
    let first = psi.values()[0].norm();
    let last = psi.values()[n - 1].norm();
    if first > EHRENFEST_BOUNDARY_TOL * max || last > EHRENFEST_BOUNDARY_TOL * max {
        return Err(Error::Precondition(format!(
            "wave function must decay at the grid boundary (got {:.3e} and {:.3e} of peak)",
            first / max,
            last / max
        )));
    }
    Ok(max)
}

/// Midpoint-time density weight `(|psi0|^2 + |psi1|^2) / 2`, normalized.
///
/// Averaging the two snapshot densities (rather than squaring the averaged
/// field) keeps the weight exactly invariant under per-snapshot phase
/// factors, which makes constant potential shifts move between terms without
/// numerical leakage.
fn pair_density(psi0: &WaveFunction, psi1: &WaveFunction) -> Result<MembershipDensity> {
    let field = RealField::from_values(
        psi0.grid(),
        psi0.values()
            .iter()
            .zip(psi1.values())
            .map(|(a, b)| 0.5 * (a.norm_sqr() + b.norm_sqr()))
            .collect(),
    )?;
    MembershipDensity::from_field(field, true)
}

/// Defuzzified three-term balance `<dS/dt> + <grad S grad S*>/2m + <V>` from
/// a snapshot pair, with `S = (hbar / i) ln(psi)`.
///
/// The time derivative uses the node-wise principal log of `psi1/psi0`, so
/// the result is branch-safe and invariant under a global phase. Under the
/// snapshot-averaged weight the kinetic term reduces to the average of
/// `(hbar^2/2m) |grad psi|^2` over the pair, which needs no division at all.
/// Both snapshots must decay at the boundary or the discarded surface terms
/// would not vanish.
pub fn ehrenfest_check(
    psi0: &WaveFunction,
    psi1: &WaveFunction,
    potential: &Potential,
    mass: f64,
    hbar: f64,
) -> Result<EhrenfestReport> {
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
    let max0 = check_decaying_boundary(psi0)?;
    let max1 = check_decaying_boundary(psi1)?;
    let floor = EHRENFEST_AMPLITUDE_FLOOR * max0.max(max1);

    let grid = psi0.grid();
    let t_mid = psi0.t() + 0.5 * dt;
    let mu = pair_density(psi0, psi1)?;

    let mut ds_dt = Vec::with_capacity(grid.n());
    for i in 0..grid.n() {
        let (a, b) = (psi0.values()[i], psi1.values()[i]);
        if a.norm() <= floor || b.norm() <= floor {
            ds_dt.push(0.0);
        } else {
            // (hbar / i) ln(psi1/psi0) / dt, real part.
            let ratio_log = (b / a).ln();
            ds_dt.push(hbar * ratio_log.im / dt);
        }
    }
    let term_ds_dt = defuzzify_values(&mu, &ds_dt)?;

    let raw_mass =
        0.5 * (integrate(&psi0.field().abs_sqr())? + integrate(&psi1.field().abs_sqr())?);
    let grad0 = psi0.field().gradient();
    let grad1 = psi1.field().gradient();
    let kinetic_density: Vec<f64> = grad0
        .values()
        .iter()
        .zip(grad1.values())
        .map(|(g0, g1)| hbar * hbar / (2.0 * mass) * 0.5 * (g0.norm_sqr() + g1.norm_sqr()))
        .collect();
    let term_kinetic = integrate(&RealField::from_values(grid, kinetic_density)?)? / raw_mass;

    let v_field = potential.sample(grid, t_mid);
    let term_potential = defuzzify_values(&mu, v_field.values())?;

    Ok(EhrenfestReport {
        term_ds_dt,
        term_kinetic,
        term_potential,
        residual: term_ds_dt + term_kinetic + term_potential,
    })
}

fn defuzzify_values(mu: &MembershipDensity, values: &[f64]) -> Result<f64> {
    let product = RealField::from_values(
        mu.grid(),
        mu.values().iter().zip(values).map(|(m, v)| m * v).collect(),
    )?;
    integrate(&product)
}

/// Independent route to the same balance: integrate the full log-form
/// equation `dS/dt + (grad S)^2/2m + V - (i hbar / 2m) lap S` against the
/// density weight directly, without the integration by parts that produces
/// the three-term report. Returns the complex weighted integral.
pub fn ehrenfest_direct_residual(
    psi0: &WaveFunction,
    psi1: &WaveFunction,
    potential: &Potential,
    mass: f64,
    hbar: f64,
) -> Result<Complex64> {
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
    let max0 = check_decaying_boundary(psi0)?;
    let max1 = check_decaying_boundary(psi1)?;
    let floor = EHRENFEST_AMPLITUDE_FLOOR * max0.max(max1);

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
    let mu = pair_density(psi0, psi1)?;
    let grad = mid.gradient();
    let lap = mid.laplacian();

    let mut acc = Complex64::ZERO;
    let dx = grid.dx();
    for i in 0..grid.n() {
        let (a, b) = (psi0.values()[i], psi1.values()[i]);
        let m = mid.values()[i];
        if a.norm() <= floor || b.norm() <= floor || m.norm() <= floor {
            continue;
        }
        let ds_dt = Complex64::new(0.0, -hbar) * (b / a).ln() / dt;
        let grad_s = Complex64::new(0.0, -hbar) * grad.values()[i] / m;
        let g_over_psi = grad.values()[i] / m;
        let lap_s = Complex64::new(0.0, -hbar) * (lap.values()[i] / m - g_over_psi * g_over_psi);
        let v = potential.at(grid.x(i), t_mid);
        let integrand = ds_dt + grad_s * grad_s / (2.0 * mass) + v
            - Complex64::new(0.0, hbar / (2.0 * mass)) * lap_s;
        let w = if i == 0 || i == grid.n() - 1 {
            0.5
        } else {
            1.0
        };
        acc += integrand * (mu.values()[i] * w);
    }
    Ok(acc * dx)
}
