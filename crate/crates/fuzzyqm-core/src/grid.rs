//! Uniform 1-D grids and the sampled real/complex fields living on them.
//!
//! Everything downstream (time stepping, residuals, membership measures) is
//! built from the discrete calculus defined here: trapezoid quadrature,
//! second-order gradients and Laplacians, and their periodic variants.
//!
//! Stencil conventions:
//! * interior nodes use central differences;
//! * edge nodes use one-sided second-order stencils (exact for quadratics);
//! * in periodic mode node `n-1` is identified with node `0`, so a field is
//!   periodic-consistent when its first and last samples agree.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Boundary handling for difference stencils and time evolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    /// Hard-wall topology: one-sided stencils at the edges.
    Reflecting,
    /// Wrap-around topology: node `n-1` is the same point as node `0`.
    Periodic,
}

/// Uniform grid on `[x_min, x_max]` with `n` nodes at `x_i = x_min + i*dx`.
///
/// Node positions are always computed from that closed form, never by
/// accumulation, so they are reproducible bit-exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    x_min: f64,
    x_max: f64,
    n: usize,
    dx: f64,
}

impl Grid1D {
    /// Build a grid. Requires `n >= 3`, finite bounds and `x_max > x_min`.
    pub fn new(x_min: f64, x_max: f64, n: usize) -> Result<Self> {
        if !x_min.is_finite() || !x_max.is_finite() {
            return Err(Error::Config("grid bounds must be finite".into()));
        }
        if n < 3 {
            return Err(Error::Config(format!("grid needs n >= 3 nodes, got {n}")));
        }
        if x_max <= x_min {
            return Err(Error::Config(format!(
                "grid needs x_max > x_min, got [{x_min}, {x_max}]"
            )));
        }
        let dx = (x_max - x_min) / (n - 1) as f64;
        Ok(Self {
            x_min,
            x_max,
            n,
            dx,
        })
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    /// Position of node `i`.
    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx
    }

    /// All node positions.
    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.x(i)).collect()
    }

    /// Index of the node closest to `x` (clamped to the grid).
    pub fn nearest_node(&self, x: f64) -> usize {
        let i = ((x - self.x_min) / self.dx).round();
        if i <= 0.0 {
            0
        } else if i >= (self.n - 1) as f64 {
            self.n - 1
        } else {
            i as usize
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.x_min && x <= self.x_max
    }
}

/// Real-valued samples on a grid (potentials, densities, classical action).
#[derive(Debug, Clone, PartialEq)]
pub struct RealField {
    grid: Grid1D,
    values: Vec<f64>,
}

/// Complex-valued samples on a grid (wave functions, complex action).
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    grid: Grid1D,
    values: Vec<Complex64>,
}

// Shared second-order stencil kernels, generic over f64 / Complex64.
fn gradient_kernel<T>(v: &[T], dx: f64) -> Vec<T>
where
    T: Copy + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T>,
{
    let n = v.len();
    let h = 0.5 / dx;
    let mut out = Vec::with_capacity(n);
    out.push((v[1] * 4.0 - v[0] * 3.0 - v[2]) * h);
    for i in 1..n - 1 {
        out.push((v[i + 1] - v[i - 1]) * h);
    }
    out.push((v[n - 1] * 3.0 - v[n - 2] * 4.0 + v[n - 3]) * h);
    out
}

fn gradient_kernel_periodic<T>(v: &[T], dx: f64) -> Vec<T>
where
    T: Copy + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T>,
{
    let n = v.len();
    let m = n - 1; // unique nodes
    let h = 0.5 / dx;
    let mut out = Vec::with_capacity(n);
    for i in 0..m {
        let prev = v[(i + m - 1) % m];
        let next = v[(i + 1) % m];
        out.push((next - prev) * h);
    }
    out.push(out[0]);
    out
}

fn laplacian_kernel<T>(v: &[T], dx: f64) -> Vec<T>
where
    T: Copy + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T>,
{
    let n = v.len();
    let h2 = 1.0 / (dx * dx);
    let mut out = Vec::with_capacity(n);
    if n == 3 {
        // Single interior stencil, exact for quadratics everywhere.
        let c = (v[0] - v[1] * 2.0 + v[2]) * h2;
        return vec![c, c, c];
    }
    out.push((v[0] * 2.0 - v[1] * 5.0 + v[2] * 4.0 - v[3]) * h2);
    for i in 1..n - 1 {
        out.push((v[i + 1] - v[i] * 2.0 + v[i - 1]) * h2);
    }
    out.push((v[n - 1] * 2.0 - v[n - 2] * 5.0 + v[n - 3] * 4.0 - v[n - 4]) * h2);
    out
}

fn laplacian_kernel_periodic<T>(v: &[T], dx: f64) -> Vec<T>
where
    T: Copy + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T>,
{
    let n = v.len();
    let m = n - 1;
    let h2 = 1.0 / (dx * dx);
    let mut out = Vec::with_capacity(n);
    for i in 0..m {
        let prev = v[(i + m - 1) % m];
        let next = v[(i + 1) % m];
        out.push((next - v[i] * 2.0 + prev) * h2);
    }
    out.push(out[0]);
    out
}

impl RealField {
    /// Wrap existing samples; the length must match the grid.
    pub fn from_values(grid: Grid1D, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n() {
            return Err(Error::GridMismatch(format!(
                "field has {} samples for a grid of {} nodes",
                values.len(),
                grid.n()
            )));
        }
        Ok(Self { grid, values })
    }

    /// Sample `f(x)` at every node.
    pub fn from_fn(grid: Grid1D, f: impl Fn(f64) -> f64) -> Self {
        let values = (0..grid.n()).map(|i| f(grid.x(i))).collect();
        Self { grid, values }
    }

    pub fn zeros(grid: Grid1D) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.n()],
        }
    }

    pub fn grid(&self) -> Grid1D {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Central-difference gradient, one-sided second order at the edges.
    pub fn gradient(&self) -> RealField {
        Self {
            grid: self.grid,
            values: gradient_kernel(&self.values, self.grid.dx()),
        }
    }

    /// Gradient with wrap-around stencils (node `n-1` identified with `0`).
    pub fn gradient_periodic(&self) -> RealField {
        Self {
            grid: self.grid,
            values: gradient_kernel_periodic(&self.values, self.grid.dx()),
        }
    }

    /// Second-difference Laplacian, one-sided at the edges.
    pub fn laplacian(&self) -> RealField {
        Self {
            grid: self.grid,
            values: laplacian_kernel(&self.values, self.grid.dx()),
        }
    }

    pub fn laplacian_periodic(&self) -> RealField {
        Self {
            grid: self.grid,
            values: laplacian_kernel_periodic(&self.values, self.grid.dx()),
        }
    }

    /// L2 norm under the trapezoid weight, `sqrt(integral of f^2)`.
    pub fn l2_norm(&self) -> f64 {
        let sq = Self::from_values(self.grid, self.values.iter().map(|v| v * v).collect())
            .expect("same grid");
        integrate_unchecked(&sq).sqrt()
    }

    pub fn linf_norm(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

impl ComplexField {
    pub fn from_values(grid: Grid1D, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.n() {
            return Err(Error::GridMismatch(format!(
                "field has {} samples for a grid of {} nodes",
                values.len(),
                grid.n()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: Grid1D, f: impl Fn(f64) -> Complex64) -> Self {
        let values = (0..grid.n()).map(|i| f(grid.x(i))).collect();
        Self { grid, values }
    }

    pub fn zeros(grid: Grid1D) -> Self {
        Self {
            grid,
            values: vec![Complex64::new(0.0, 0.0); grid.n()],
        }
    }

    pub fn grid(&self) -> Grid1D {
        self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values
            .iter()
            .all(|v| v.re.is_finite() && v.im.is_finite())
    }

    pub fn gradient(&self) -> ComplexField {
        Self {
            grid: self.grid,
            values: gradient_kernel(&self.values, self.grid.dx()),
        }
    }

    pub fn gradient_periodic(&self) -> ComplexField {
        Self {
            grid: self.grid,
            values: gradient_kernel_periodic(&self.values, self.grid.dx()),
        }
    }

    pub fn laplacian(&self) -> ComplexField {
        Self {
            grid: self.grid,
            values: laplacian_kernel(&self.values, self.grid.dx()),
        }
    }

    pub fn laplacian_periodic(&self) -> ComplexField {
        Self {
            grid: self.grid,
            values: laplacian_kernel_periodic(&self.values, self.grid.dx()),
        }
    }

    /// Gradient with the stencil family selected by `boundary`.
    pub fn gradient_with(&self, boundary: Boundary) -> ComplexField {
        match boundary {
            Boundary::Reflecting => self.gradient(),
            Boundary::Periodic => self.gradient_periodic(),
        }
    }

    pub fn laplacian_with(&self, boundary: Boundary) -> ComplexField {
        match boundary {
            Boundary::Reflecting => self.laplacian(),
            Boundary::Periodic => self.laplacian_periodic(),
        }
    }

    /// Pointwise squared modulus as a real field.
    pub fn abs_sqr(&self) -> RealField {
        RealField {
            grid: self.grid,
            values: self.values.iter().map(|v| v.norm_sqr()).collect(),
        }
    }

    pub fn l2_norm(&self) -> f64 {
        integrate_unchecked(&self.abs_sqr()).sqrt()
    }

    pub fn linf_norm(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.norm()))
    }
}

/// Trapezoid-rule approximation of the integral of `f` over its grid.
///
/// Exact for linear integrands; rejects non-finite samples.
pub fn integrate(f: &RealField) -> Result<f64> {
    if !f.is_finite() {
        return Err(Error::Numeric(
            "integrand contains non-finite samples".into(),
        ));
    }
    Ok(integrate_unchecked(f))
}

pub(crate) fn integrate_unchecked(f: &RealField) -> f64 {
    let v = f.values();
    let n = v.len();
    let mut sum = 0.5 * (v[0] + v[n - 1]);
    for x in &v[1..n - 1] {
        sum += x;
    }
    sum * f.grid().dx()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn grid_node_mapping_is_exact() {
        let g = Grid1D::new(0.0, 1.0, 3).unwrap();
        assert_eq!(g.nodes(), vec![0.0, 0.5, 1.0]);

        let g = Grid1D::new(-5.0, 5.0, 11).unwrap();
        assert_eq!(g.dx(), 1.0);
        for i in 0..11 {
            assert_eq!(g.x(i), -5.0 + i as f64);
        }

        // Same parameters give bit-identical nodes.
        let h = Grid1D::new(-5.0, 5.0, 11).unwrap();
        assert_eq!(g.nodes(), h.nodes());
    }

    #[test]
    fn grid_rejects_bad_parameters() {
        assert!(Grid1D::new(0.0, 1.0, 2).is_err());
        assert!(Grid1D::new(1.0, 1.0, 5).is_err());
        assert!(Grid1D::new(2.0, 1.0, 5).is_err());
        assert!(Grid1D::new(f64::NAN, 1.0, 5).is_err());
        assert!(Grid1D::new(0.0, f64::INFINITY, 5).is_err());
    }

    #[test]
    fn integrate_constant_and_linear_are_exact() {
        let g = Grid1D::new(0.0, 1.0, 101).unwrap();
        let one = RealField::from_fn(g, |_| 1.0);
        assert!(close(integrate(&one).unwrap(), 1.0, 1e-14));

        let lin = RealField::from_fn(g, |x| x);
        assert!(close(integrate(&lin).unwrap(), 0.5, 1e-14));
    }

    #[test]
    fn integrate_quadratic_near_analytic() {
        // Analytic antiderivative x^3/3 on [0,1] -> 1/3.
        let g = Grid1D::new(0.0, 1.0, 101).unwrap();
        let sq = RealField::from_fn(g, |x| x * x);
        assert!(close(integrate(&sq).unwrap(), 1.0 / 3.0, 1e-4));
    }

    #[test]
    fn integrate_rejects_non_finite() {
        let g = Grid1D::new(0.0, 1.0, 11).unwrap();
        let mut v = vec![0.0; 11];
        v[5] = f64::NAN;
        let f = RealField::from_values(g, v).unwrap();
        assert!(integrate(&f).is_err());
    }

    #[test]
    fn gradient_constant_and_linear() {
        let g = Grid1D::new(0.0, 1.0, 51).unwrap();
        let c = RealField::from_fn(g, |_| 2.5);
        for v in c.gradient().values() {
            assert!(close(*v, 0.0, 1e-12));
        }
        let lin = RealField::from_fn(g, |x| 3.0 * x);
        for v in lin.gradient().values() {
            assert!(close(*v, 3.0, 1e-12));
        }
    }

    #[test]
    fn gradient_sin_matches_cos() {
        // Oracle: d/dx sin = cos.
        let g = Grid1D::new(0.0, std::f64::consts::PI, 1001).unwrap();
        let f = RealField::from_fn(g, f64::sin);
        let df = f.gradient();
        let mut worst = 0.0_f64;
        for i in 0..g.n() {
            worst = worst.max((df.values()[i] - g.x(i).cos()).abs());
        }
        assert!(worst < 1e-5, "max gradient error {worst}");
    }

    #[test]
    fn laplacian_quadratic_and_constant() {
        let g = Grid1D::new(-1.0, 1.0, 41).unwrap();
        let q = RealField::from_fn(g, |x| x * x);
        for v in q.laplacian().values() {
            assert!(close(*v, 2.0, 1e-9));
        }
        let c = RealField::from_fn(g, |_| 7.0);
        for v in c.laplacian().values() {
            assert!(close(*v, 0.0, 1e-9));
        }
    }

    #[test]
    fn laplacian_plane_wave_matches_analytic() {
        // Oracle: (e^{ikx})'' = -k^2 e^{ikx}.
        let k = 2.0;
        let g = Grid1D::new(0.0, 2.0 * std::f64::consts::PI, 2001).unwrap();
        let f = ComplexField::from_fn(g, |x| Complex64::from_polar(1.0, k * x));
        let lap = f.laplacian();
        let mut worst = 0.0_f64;
        for i in 0..g.n() {
            let expect = f.values()[i] * (-k * k);
            let rel = (lap.values()[i] - expect).norm() / (k * k);
            worst = worst.max(rel);
        }
        assert!(worst < 1e-4, "max relative laplacian error {worst}");
    }

    #[test]
    fn periodic_stencils_wrap_cleanly() {
        // Commensurate sine: periodic stencils keep uniform accuracy at the seam.
        let g = Grid1D::new(0.0, 2.0 * std::f64::consts::PI, 513).unwrap();
        let f = RealField::from_fn(g, f64::sin);
        let df = f.gradient_periodic();
        for i in 0..g.n() {
            assert!(close(df.values()[i], g.x(i).cos(), 1e-4));
        }
        assert_eq!(df.values()[0], df.values()[g.n() - 1]);
    }

    #[test]
    fn field_length_must_match_grid() {
        let g = Grid1D::new(0.0, 1.0, 11).unwrap();
        assert!(RealField::from_values(g, vec![0.0; 10]).is_err());
        assert!(ComplexField::from_values(g, vec![Complex64::new(0.0, 0.0); 12]).is_err());
    }

    proptest! {
        #[test]
        fn gradient_and_laplacian_are_linear(
            a in -3.0..3.0_f64,
            b in -3.0..3.0_f64,
            seed_f in proptest::collection::vec(-1.0..1.0_f64, 33),
            seed_g in proptest::collection::vec(-1.0..1.0_f64, 33),
        ) {
            let grid = Grid1D::new(0.0, 1.0, 33).unwrap();
            let f = RealField::from_values(grid, seed_f.clone()).unwrap();
            let g = RealField::from_values(grid, seed_g.clone()).unwrap();
            let combo = RealField::from_values(
                grid,
                seed_f.iter().zip(&seed_g).map(|(x, y)| a * x + b * y).collect(),
            ).unwrap();

            for (op, opname) in [
                (RealField::gradient as fn(&RealField) -> RealField, "gradient"),
                (RealField::laplacian as fn(&RealField) -> RealField, "laplacian"),
            ] {
                let lhs = op(&combo);
                let rf = op(&f);
                let rg = op(&g);
                for i in 0..grid.n() {
                    let rhs = a * rf.values()[i] + b * rg.values()[i];
                    let scale = 1.0 + rhs.abs().max(lhs.values()[i].abs());
                    prop_assert!(
                        (lhs.values()[i] - rhs).abs() <= 1e-9 * scale,
                        "{opname} not linear at node {i}"
                    );
                }
            }
        }

        #[test]
        fn integrate_is_linear_and_monotone(
            a in -2.0..2.0_f64,
            b in -2.0..2.0_f64,
            vf in proptest::collection::vec(-1.0..1.0_f64, 17),
            vg in proptest::collection::vec(-1.0..1.0_f64, 17),
        ) {
            let grid = Grid1D::new(-1.0, 1.0, 17).unwrap();
            let f = RealField::from_values(grid, vf.clone()).unwrap();
            let g = RealField::from_values(grid, vg.clone()).unwrap();
            let combo = RealField::from_values(
                grid,
                vf.iter().zip(&vg).map(|(x, y)| a * x + b * y).collect(),
            ).unwrap();
            let lhs = integrate(&combo).unwrap();
            let rhs = a * integrate(&f).unwrap() + b * integrate(&g).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs.abs()));

            // Monotonicity: f + |g| >= f pointwise.
            let bigger = RealField::from_values(
                grid,
                vf.iter().zip(&vg).map(|(x, y)| x + y.abs()).collect(),
            ).unwrap();
            prop_assert!(integrate(&bigger).unwrap() + 1e-12 >= integrate(&f).unwrap());
        }
    }
}
