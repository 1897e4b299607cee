//! Discrete action functional on path ensembles, least-action selection and
//! refinement, and the classical Hamilton-Jacobi residual.
//!
//! Paths are uniform-in-time polylines with fixed endpoints. The discrete
//! action uses forward-difference velocities over each step and samples the
//! potential at the step's left node, so straight lines are exactly minimal
//! for a free particle.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::grid::RealField;
use crate::potential::Potential;

/// A sampled trajectory between two fixed spacetime endpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    t0: f64,
    t1: f64,
    positions: Vec<f64>,
}

impl Path {
    pub fn new(t0: f64, t1: f64, positions: Vec<f64>) -> Result<Self> {
        if !(t0.is_finite() && t1.is_finite() && t1 > t0) {
            return Err(Error::Config(format!(
                "path needs t1 > t0, got [{t0}, {t1}]"
            )));
        }
        if positions.len() < 2 {
            return Err(Error::Config("path needs at least 2 samples".into()));
        }
        if positions.iter().any(|x| !x.is_finite()) {
            return Err(Error::Config("path positions must be finite".into()));
        }
        Ok(Self { t0, t1, positions })
    }

    /// Straight line between `(t0, x0)` and `(t1, x1)` with `n` samples.
    pub fn straight(t0: f64, t1: f64, x0: f64, x1: f64, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Config("path needs at least 2 samples".into()));
        }
        let positions = (0..n)
            .map(|i| {
                let s = i as f64 / (n - 1) as f64;
                x0 + s * (x1 - x0)
            })
            .collect();
        Self::new(t0, t1, positions)
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn t1(&self) -> f64 {
        self.t1
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    /// Time step between consecutive samples.
    pub fn dt(&self) -> f64 {
        (self.t1 - self.t0) / (self.positions.len() - 1) as f64
    }

    /// Time of sample `i`.
    pub fn time(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.dt()
    }

    /// Largest node distance to the straight line through the endpoints.
    pub fn max_deviation_from_straight(&self) -> f64 {
        let n = self.positions.len();
        let (x0, x1) = (self.positions[0], self.positions[n - 1]);
        self.positions
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let s = i as f64 / (n - 1) as f64;
                (x - (x0 + s * (x1 - x0))).abs()
            })
            .fold(0.0_f64, f64::max)
    }
}

/// A family of paths sharing endpoints and step count.
#[derive(Debug, Clone)]
pub struct PathEnsemble {
    t0: f64,
    t1: f64,
    x_start: f64,
    x_end: f64,
    paths: Vec<Path>,
}

impl PathEnsemble {
    pub fn new(paths: Vec<Path>) -> Result<Self> {
        let first = paths
            .first()
            .ok_or_else(|| Error::Config("ensemble must contain at least one path".into()))?;
        let (t0, t1) = (first.t0, first.t1);
        let len = first.positions.len();
        let x_start = first.positions[0];
        let x_end = *first.positions.last().unwrap();
        for p in &paths {
            if p.t0 != t0 || p.t1 != t1 || p.positions.len() != len {
                return Err(Error::Config(
                    "ensemble paths must share the time grid".into(),
                ));
            }
            if p.positions[0] != x_start || *p.positions.last().unwrap() != x_end {
                return Err(Error::Config("ensemble paths must share endpoints".into()));
            }
        }
        Ok(Self {
            t0,
            t1,
            x_start,
            x_end,
            paths,
        })
    }

    /// Seeded Brownian-bridge perturbations of the straight line.
    ///
    /// Every member keeps the endpoints exactly; `amplitude` scales the
    /// bridge.
    #[allow(clippy::too_many_arguments)]
    pub fn brownian_bridge(
        x_start: f64,
        x_end: f64,
        t0: f64,
        t1: f64,
        steps: usize,
        n_paths: usize,
        amplitude: f64,
        seed: u64,
    ) -> Result<Self> {
        if n_paths == 0 {
            return Err(Error::Config(
                "ensemble must contain at least one path".into(),
            ));
        }
        let len = steps + 1;
        let straight = Path::straight(t0, t1, x_start, x_end, len)?;
        let dt = straight.dt();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut paths = Vec::with_capacity(n_paths);
        for _ in 0..n_paths {
            // Random walk pinned back to zero at both ends.
            let mut walk = vec![0.0_f64; len];
            for i in 1..len {
                let z: f64 = rng.sample(StandardNormal);
                walk[i] = walk[i - 1] + z * dt.sqrt();
            }
            let w_end = walk[len - 1];
            let positions = straight
                .positions
                .iter()
                .enumerate()
                .map(|(i, &base)| {
                    let s = i as f64 / (len - 1) as f64;
                    base + amplitude * (walk[i] - s * w_end)
                })
                .collect();
            paths.push(Path::new(t0, t1, positions)?);
        }
        Self::new(paths)
    }

    pub fn paths(&self) -> &[Path] {
        &self.paths
    }

    pub fn endpoints(&self) -> (f64, f64) {
        (self.x_start, self.x_end)
    }

    pub fn time_span(&self) -> (f64, f64) {
        (self.t0, self.t1)
    }
}

/// Discrete action of one path: sum over steps of
/// `[m/2 * ((x_{i+1}-x_i)/dt)^2 - V(x_i, t_i)] * dt`.
pub fn action_of_path(path: &Path, potential: &Potential, mass: f64) -> Result<f64> {
    let dt = path.dt();
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::Config(format!("degenerate path time step {dt}")));
    }
    let xs = path.positions();
    let mut action = 0.0;
    for i in 0..xs.len() - 1 {
        let v = (xs[i + 1] - xs[i]) / dt;
        let pot = potential.at(xs[i], path.time(i));
        if !pot.is_finite() {
            return Err(Error::Numeric(format!(
                "potential is not finite at x = {}, t = {}",
                xs[i],
                path.time(i)
            )));
        }
        action += (0.5 * mass * v * v - pot) * dt;
    }
    if !action.is_finite() {
        return Err(Error::Numeric(
            "action evaluated to a non-finite value".into(),
        ));
    }
    Ok(action)
}

/// Pick the ensemble member with minimal action.
///
/// Ties break to the lowest index, so the result is deterministic.
pub fn minimize_action(
    ensemble: &PathEnsemble,
    potential: &Potential,
    mass: f64,
) -> Result<(Path, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (i, p) in ensemble.paths().iter().enumerate() {
        let a = action_of_path(p, potential, mass)?;
        match best {
            Some((_, best_a)) if a >= best_a => {}
            _ => best = Some((i, a)),
        }
    }
    let (idx, a) = best.expect("ensemble is non-empty by construction");
    Ok((ensemble.paths()[idx].clone(), a))
}

/// Local part of the action that depends on interior node `j`.
fn local_action(
    xs: &[f64],
    j: usize,
    xj: f64,
    dt: f64,
    potential: &Potential,
    tj: f64,
    mass: f64,
) -> f64 {
    let left = xj - xs[j - 1];
    let right = xs[j + 1] - xj;
    0.5 * mass * (left * left + right * right) / dt - potential.at(xj, tj) * dt
}

/// Coordinate-wise descent on the interior nodes with a fixed probe step.
///
/// Each sweep visits interior nodes in order and moves a node by `+step` or
/// `-step` whenever that strictly lowers the action, so the total action is
/// non-increasing across accepted moves. The endpoints never move.
pub fn refine_least_action(
    start: &Path,
    potential: &Potential,
    mass: f64,
    iters: usize,
    step: f64,
) -> Result<Path> {
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::Config(format!(
            "descent step must be > 0, got {step}"
        )));
    }
    let dt = start.dt();
    let mut xs = start.positions().to_vec();
    let n = xs.len();
    for _ in 0..iters {
        for j in 1..n - 1 {
            let tj = start.time(j);
            let current = local_action(&xs, j, xs[j], dt, potential, tj, mass);
            if !current.is_finite() {
                return Err(Error::Numeric(
                    "action became non-finite during descent".into(),
                ));
            }
            for candidate in [xs[j] + step, xs[j] - step] {
                if local_action(&xs, j, candidate, dt, potential, tj, mass) < current {
                    xs[j] = candidate;
                    break;
                }
            }
        }
    }
    Path::new(start.t0(), start.t1(), xs)
}

/// Run `refine_least_action` over a decreasing schedule of probe steps.
pub fn refine_least_action_schedule(
    start: &Path,
    potential: &Potential,
    mass: f64,
    iters_per_step: usize,
    steps: &[f64],
) -> Result<Path> {
    let mut path = start.clone();
    for &s in steps {
        path = refine_least_action(&path, potential, mass, iters_per_step, s)?;
    }
    Ok(path)
}

/// Pointwise residual of the classical Hamilton-Jacobi balance,
/// `(s1 - s0)/dt + (grad s_mid)^2 / 2m + V`, from two action snapshots.
///
/// The time derivative is centered on the snapshot midpoint; the potential is
/// sampled there as well.
pub fn hj_residual(
    s0: &RealField,
    s1: &RealField,
    dt: f64,
    potential: &Potential,
    mass: f64,
    t0: f64,
) -> Result<RealField> {
    if s0.grid() != s1.grid() {
        return Err(Error::GridMismatch(
            "action snapshots live on different grids".into(),
        ));
    }
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::Config(format!(
            "snapshot spacing must be > 0, got {dt}"
        )));
    }
    let grid = s0.grid();
    let t_mid = t0 + 0.5 * dt;
    let mid = RealField::from_values(
        grid,
        s0.values()
            .iter()
            .zip(s1.values())
            .map(|(a, b)| 0.5 * (a + b))
            .collect(),
    )?;
    let grad = mid.gradient();
    let values = (0..grid.n())
        .map(|i| {
            let ds_dt = (s1.values()[i] - s0.values()[i]) / dt;
            let g = grad.values()[i];
            ds_dt + g * g / (2.0 * mass) + potential.at(grid.x(i), t_mid)
        })
        .collect();
    RealField::from_values(grid, values)
}

/// Momentum field: the gradient of a real action field.
pub fn momentum_field(s: &RealField) -> RealField {
    s.gradient()
}
