//! Membership densities, relative membership, defuzzified expectations,
//! subsethood counts, eigenbasis decomposition with its simplex picture, and
//! seeded categorical detection sampling.
//!
//! Point evaluations of a density use nearest-node sampling; interval degrees
//! integrate the piecewise-linear interpolant so partial cells at interval
//! ends are handled exactly and refinements of a partition stay additive.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grid::{integrate, integrate_unchecked, Grid1D, RealField};
use crate::quantum::WaveFunction;

/// Nonnegative weight field whose integral over a region is the degree to
/// which an entity resides there.
#[derive(Debug, Clone, PartialEq)]
pub struct MembershipDensity {
    mu: RealField,
    normalized: bool,
}

impl MembershipDensity {
    /// Wrap a nonnegative field, optionally normalizing its integral to one.
    pub fn from_field(field: RealField, normalize: bool) -> Result<Self> {
        if !field.is_finite() {
            return Err(Error::Numeric("membership density must be finite".into()));
        }
        if field.values().iter().any(|&v| v < 0.0) {
            return Err(Error::Config(
                "membership density must be nonnegative".into(),
            ));
        }
        if !normalize {
            return Ok(Self {
                mu: field,
                normalized: false,
            });
        }
        let mass = integrate_unchecked(&field);
        if mass <= 0.0 {
            return Err(Error::DegenerateInput(
                "cannot normalize a zero-mass density".into(),
            ));
        }
        let scaled = RealField::from_values(
            field.grid(),
            field.values().iter().map(|v| v / mass).collect(),
        )?;
        Ok(Self {
            mu: scaled,
            normalized: true,
        })
    }

    pub fn grid(&self) -> Grid1D {
        self.mu.grid()
    }

    pub fn values(&self) -> &[f64] {
        self.mu.values()
    }

    pub fn field(&self) -> &RealField {
        &self.mu
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// Density at the node nearest to `x`.
    pub fn value_at(&self, x: f64) -> f64 {
        self.mu.values()[self.grid().nearest_node(x)]
    }

    /// Piecewise-linear interpolant at an arbitrary in-grid position.
    fn lerp(&self, x: f64) -> f64 {
        let grid = self.grid();
        let s = (x - grid.x_min()) / grid.dx();
        let i = (s.floor() as usize).min(grid.n() - 2);
        let frac = s - i as f64;
        let v = self.mu.values();
        v[i] * (1.0 - frac) + v[i + 1] * frac
    }
}

/// Membership density of a wave function: `mu = |psi|^2` pointwise.
pub fn membership_density(psi: &WaveFunction, normalize: bool) -> Result<MembershipDensity> {
    MembershipDensity::from_field(psi.field().abs_sqr(), normalize)
}

/// Ratio of densities at two points, `mu(xi) / mu(xj)`, via nearest nodes.
pub fn relative_membership(mu: &MembershipDensity, xi: f64, xj: f64) -> Result<f64> {
    let denom = mu.value_at(xj);
    if denom == 0.0 {
        return Err(Error::Domain(format!(
            "relative membership undefined: density vanishes at x = {xj}"
        )));
    }
    Ok(mu.value_at(xi) / denom)
}

/// Degree of membership in `[x_lo, x_hi]`: the integral of the density's
/// piecewise-linear interpolant over the interval.
///
/// Requires a normalized density so the result lives in `[0, 1]`.
pub fn degree_in_volume(mu: &MembershipDensity, x_lo: f64, x_hi: f64) -> Result<f64> {
    if !mu.is_normalized() {
        return Err(Error::Precondition(
            "interval degrees need a normalized density".into(),
        ));
    }
    let grid = mu.grid();
    if x_lo > x_hi {
        return Err(Error::Config(format!(
            "interval [{x_lo}, {x_hi}] is reversed"
        )));
    }
    let tol = 1e-9 * (grid.x_max() - grid.x_min());
    if x_lo < grid.x_min() - tol || x_hi > grid.x_max() + tol {
        return Err(Error::Config(format!(
            "interval [{x_lo}, {x_hi}] extends beyond the grid [{}, {}]",
            grid.x_min(),
            grid.x_max()
        )));
    }
    let a = x_lo.max(grid.x_min());
    let b = x_hi.min(grid.x_max());
    if a >= b {
        return Ok(0.0);
    }

    // Trapezoid segments of the interpolant between consecutive breakpoints.
    let ia = ((a - grid.x_min()) / grid.dx()).floor() as usize;
    let ib = (((b - grid.x_min()) / grid.dx()).ceil() as usize).min(grid.n() - 1);
    let mut total = 0.0;
    let mut left = a;
    for i in ia..ib {
        let node = grid.x(i + 1);
        let right = node.min(b);
        if right > left {
            total += 0.5 * (mu.lerp(left) + mu.lerp(right)) * (right - left);
        }
        left = right;
        if left >= b {
            break;
        }
    }
    Ok(total)
}

/// Split the grid span into `bins` equal intervals.
pub fn equal_partition(grid: Grid1D, bins: usize) -> Result<Vec<(f64, f64)>> {
    if bins == 0 {
        return Err(Error::Config(
            "partition needs at least one interval".into(),
        ));
    }
    let span = grid.x_max() - grid.x_min();
    Ok((0..bins)
        .map(|i| {
            let lo = grid.x_min() + span * i as f64 / bins as f64;
            let hi = if i + 1 == bins {
                grid.x_max()
            } else {
                grid.x_min() + span * (i + 1) as f64 / bins as f64
            };
            (lo, hi)
        })
        .collect())
}

/// Per-interval degrees over a partition of the grid; the coordinates of the
/// density as a point in the unit hypercube.
///
/// The partition must tile the grid span in order without overlaps.
pub fn hypercube_coordinates(mu: &MembershipDensity, partition: &[(f64, f64)]) -> Result<Vec<f64>> {
    let grid = mu.grid();
    if partition.is_empty() {
        return Err(Error::Config(
            "partition needs at least one interval".into(),
        ));
    }
    let tol = 1e-9 * (grid.x_max() - grid.x_min());
    let mut cursor = grid.x_min();
    for &(lo, hi) in partition {
        if (lo - cursor).abs() > tol {
            return Err(Error::Config(format!(
                "partition intervals must tile the grid: gap or overlap at x = {lo}"
            )));
        }
        if hi <= lo {
            return Err(Error::Config(format!(
                "partition interval [{lo}, {hi}] is empty"
            )));
        }
        cursor = hi;
    }
    if (cursor - grid.x_max()).abs() > tol {
        return Err(Error::Config(
            "partition must end at the grid upper bound".into(),
        ));
    }
    partition
        .iter()
        .map(|&(lo, hi)| degree_in_volume(mu, lo, hi))
        .collect()
}

/// Weighted average of an observable with the membership density as weight.
pub fn defuzzify(observable: &RealField, mu: &MembershipDensity) -> Result<f64> {
    if observable.grid() != mu.grid() {
        return Err(Error::GridMismatch(
            "observable and density live on different grids".into(),
        ));
    }
    let product = RealField::from_values(
        observable.grid(),
        observable
            .values()
            .iter()
            .zip(mu.values())
            .map(|(o, m)| o * m)
            .collect(),
    )?;
    integrate(&product)
}

/// Trial counts of a detection experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DetectionCounts {
    total: u64,
    successes: u64,
}

impl DetectionCounts {
    pub fn new(total: u64, successes: u64) -> Result<Self> {
        if total == 0 {
            return Err(Error::Config(
                "detection counts need at least one trial".into(),
            ));
        }
        if successes > total {
            return Err(Error::Config(format!(
                "successes ({successes}) cannot exceed trials ({total})"
            )));
        }
        Ok(Self { total, successes })
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn successes(&self) -> u64 {
        self.successes
    }
}

/// Degree to which the successful trials fill the trial set: `N_A / N`.
pub fn subsethood(counts: &DetectionCounts) -> f64 {
    counts.successes as f64 / counts.total as f64
}

/// Coefficient vector of a state over a declared orthonormal basis.
#[derive(Debug, Clone, PartialEq)]
pub struct FuzzyState {
    coefficients: Vec<Complex64>,
}

impl FuzzyState {
    pub fn new(coefficients: Vec<Complex64>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::Config("state needs at least one coefficient".into()));
        }
        if coefficients
            .iter()
            .any(|c| !(c.re.is_finite() && c.im.is_finite()))
        {
            return Err(Error::Numeric("state coefficients must be finite".into()));
        }
        Ok(Self { coefficients })
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    /// Total squared weight of the coefficients.
    pub fn total_weight(&self) -> f64 {
        self.coefficients.iter().map(|c| c.norm_sqr()).sum()
    }
}

/// Result of projecting a wave function onto an orthonormal family.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub state: FuzzyState,
    /// `1 - sum |a_k|^2`: weight the truncated family failed to capture.
    pub truncation_residual: f64,
}

/// Hard-wall box modes `sqrt(2/L) sin(k pi (x - x_min) / L)`, `k = 1..modes`.
///
/// On a uniform grid these are exactly orthonormal under the trapezoid rule
/// as long as `modes < n - 1`.
pub fn box_eigenbasis(grid: Grid1D, modes: usize) -> Result<Vec<RealField>> {
    if modes == 0 || modes >= grid.n() - 1 {
        return Err(Error::Config(format!(
            "box basis needs 1 <= modes < {}, got {modes}",
            grid.n() - 1
        )));
    }
    let span = grid.x_max() - grid.x_min();
    let norm = (2.0 / span).sqrt();
    Ok((1..=modes)
        .map(|k| {
            RealField::from_fn(grid, |x| {
                norm * (k as f64 * std::f64::consts::PI * (x - grid.x_min()) / span).sin()
            })
        })
        .collect())
}

/// Project `psi` onto a real orthonormal family: `a_k = integral phi_k psi`.
///
/// The family's Gram matrix must match the identity within `1e-8`.
pub fn decompose(psi: &WaveFunction, basis: &[RealField]) -> Result<Decomposition> {
    if basis.is_empty() {
        return Err(Error::Config("basis must contain at least one mode".into()));
    }
    let grid = psi.grid();
    for phi in basis {
        if phi.grid() != grid {
            return Err(Error::GridMismatch(
                "basis modes must share the state's grid".into(),
            ));
        }
    }
    for (j, phi_j) in basis.iter().enumerate() {
        for (k, phi_k) in basis.iter().enumerate().skip(j) {
            let product = RealField::from_values(
                grid,
                phi_j
                    .values()
                    .iter()
                    .zip(phi_k.values())
                    .map(|(a, b)| a * b)
                    .collect(),
            )?;
            let overlap = integrate(&product)?;
            let expect = if j == k { 1.0 } else { 0.0 };
            if (overlap - expect).abs() > 1e-8 {
                return Err(Error::Config(format!(
                    "basis is not orthonormal: <phi_{j}, phi_{k}> = {overlap}"
                )));
            }
        }
    }

    let dx = grid.dx();
    let n = grid.n();
    let coefficients: Vec<Complex64> = basis
        .iter()
        .map(|phi| {
            // Trapezoid rule for the complex projection integral.
            let mut sum = (phi.values()[0] * psi.values()[0]
                + phi.values()[n - 1] * psi.values()[n - 1])
                * 0.5;
            for i in 1..n - 1 {
                sum += phi.values()[i] * psi.values()[i];
            }
            sum * dx
        })
        .collect();
    let state = FuzzyState::new(coefficients)?;
    let truncation_residual = 1.0 - state.total_weight();
    Ok(Decomposition {
        state,
        truncation_residual,
    })
}

/// Probability-vector coordinates `|a_k|^2 / sum |a_j|^2` of a state on the
/// simplex; component `k` is the subsethood of the state in eigenstate `k`.
///
/// The state must be normalized up to truncation slack; the components are
/// rescaled so they sum to one exactly.
pub fn simplex_point(state: &FuzzyState) -> Result<Vec<f64>> {
    let total = state.total_weight();
    if total <= 1e-12 {
        return Err(Error::DegenerateInput("state has no weight".into()));
    }
    if (total - 1.0).abs() > 1e-2 {
        return Err(Error::Precondition(format!(
            "state is not normalized: total weight {total}"
        )));
    }
    Ok(state
        .coefficients
        .iter()
        .map(|c| c.norm_sqr() / total)
        .collect())
}

/// Draw `trials` independent categorical detections from a normalized weight
/// vector, deterministically for a fixed seed. Returns one count per outcome.
pub fn sample_detections(weights: &[f64], trials: u64, seed: u64) -> Result<Vec<DetectionCounts>> {
    if trials == 0 {
        return Err(Error::Config("sampling needs at least one trial".into()));
    }
    if weights.is_empty() {
        return Err(Error::Config("sampling needs at least one outcome".into()));
    }
    if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return Err(Error::Config(
            "weights must be finite and nonnegative".into(),
        ));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::Config(format!("weights must sum to 1, got {total}")));
    }

    let mut cdf = Vec::with_capacity(weights.len());
    let mut acc = 0.0;
    for w in weights {
        acc += w;
        cdf.push(acc);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0_u64; weights.len()];
    for _ in 0..trials {
        let u: f64 = rng.random();
        let idx = cdf.partition_point(|&c| c <= u).min(weights.len() - 1);
        counts[idx] += 1;
    }
    counts
        .into_iter()
        .map(|c| DetectionCounts::new(trials, c))
        .collect()
}

/// Chi-square goodness-of-fit of observed counts against expected
/// probabilities: returns `(statistic, p_value)` with `k - 1` degrees of
/// freedom.
pub fn chi_square_gof(observed: &[u64], probs: &[f64]) -> Result<(f64, f64)> {
    if observed.len() != probs.len() {
        return Err(Error::Config(
            "observed counts and probabilities must align".into(),
        ));
    }
    if observed.len() < 2 {
        return Err(Error::Config(
            "goodness of fit needs at least two bins".into(),
        ));
    }
    let n: u64 = observed.iter().sum();
    if n == 0 {
        return Err(Error::Config(
            "goodness of fit needs at least one observation".into(),
        ));
    }
    let mut statistic = 0.0;
    for (&obs, &p) in observed.iter().zip(probs) {
        if p <= 0.0 {
            return Err(Error::Config(
                "expected probabilities must be positive".into(),
            ));
        }
        let expected = n as f64 * p;
        let d = obs as f64 - expected;
        statistic += d * d / expected;
    }
    let dof = (observed.len() - 1) as f64;
    Ok((statistic, gamma_q(0.5 * dof, 0.5 * statistic)))
}

// Lanczos approximation (g = 7, 9 terms), standard published coefficients.
#[allow(clippy::excessive_precision)]
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        let pi = std::f64::consts::PI;
        pi.ln() - (pi * x).sin().ln() - ln_gamma(1.0 - x)
    } else {
        let x = x - 1.0;
        let mut acc = LANCZOS[0];
        for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
            acc += c / (x + i as f64);
        }
        let t = x + 7.5;
        0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
    }
}

/// Regularized upper incomplete gamma `Q(a, x)`; series below `a + 1`,
/// continued fraction (modified Lentz) above.
fn gamma_q(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    let prefactor = (-x + a * x.ln() - ln_gamma(a)).exp();
    if x < a + 1.0 {
        let mut term = 1.0 / a;
        let mut sum = term;
        let mut denom = a;
        for _ in 0..500 {
            denom += 1.0;
            term *= x / denom;
            sum += term;
            if term.abs() < sum.abs() * 1e-16 {
                break;
            }
        }
        1.0 - prefactor * sum
    } else {
        let tiny = 1e-300;
        let mut b = x + 1.0 - a;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..500 {
            let an = -(i as f64) * (i as f64 - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < tiny {
                d = tiny;
            }
            c = b + an / c;
            if c.abs() < tiny {
                c = tiny;
            }
            d = 1.0 / d;
            let del = d * c;
            h *= del;
            if (del - 1.0).abs() < 1e-16 {
                break;
            }
        }
        prefactor * h
    }
}
