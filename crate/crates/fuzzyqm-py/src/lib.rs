//! Python extension module exposing the main grid, wave-function, density
//! and path-ensemble operations.
//!
//! Build with `cargo build -p fuzzyqm-py --release` and load the produced
//! `libfuzzyqm_py.so` as `fuzzyqm_py` (see `python/smoke_test.py`).

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use fuzzyqm_core as core;

fn err(e: core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_boundary(name: &str) -> PyResult<core::Boundary> {
    match name {
        "reflecting" => Ok(core::Boundary::Reflecting),
        "periodic" => Ok(core::Boundary::Periodic),
        other => Err(PyValueError::new_err(format!(
            "boundary must be 'reflecting' or 'periodic', got {other:?}"
        ))),
    }
}

/// Uniform 1-D grid.
#[pyclass(frozen)]
struct Grid {
    inner: core::Grid1D,
}

#[pymethods]
impl Grid {
    #[new]
    fn new(x_min: f64, x_max: f64, n: usize) -> PyResult<Self> {
        Ok(Self {
            inner: core::Grid1D::new(x_min, x_max, n).map_err(err)?,
        })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn dx(&self) -> f64 {
        self.inner.dx()
    }

    #[getter]
    fn x_min(&self) -> f64 {
        self.inner.x_min()
    }

    #[getter]
    fn x_max(&self) -> f64 {
        self.inner.x_max()
    }

    fn nodes(&self) -> Vec<f64> {
        self.inner.nodes()
    }

    fn __repr__(&self) -> String {
        format!(
            "Grid(x_min={}, x_max={}, n={})",
            self.inner.x_min(),
            self.inner.x_max(),
            self.inner.n()
        )
    }
}

/// Potential energy function.
#[pyclass(frozen)]
struct Potential {
    inner: core::Potential,
}

#[pymethods]
impl Potential {
    #[staticmethod]
    fn zero() -> Self {
        Self {
            inner: core::Potential::Zero,
        }
    }

    #[staticmethod]
    fn harmonic(strength: f64, center: f64) -> Self {
        Self {
            inner: core::Potential::from_fn(move |x, _| {
                0.5 * strength * (x - center) * (x - center)
            }),
        }
    }

    #[staticmethod]
    fn piecewise(intervals: Vec<(f64, f64, f64)>) -> PyResult<Self> {
        Ok(Self {
            inner: core::Potential::piecewise(intervals).map_err(err)?,
        })
    }

    fn at(&self, x: f64, t: f64) -> f64 {
        self.inner.at(x, t)
    }
}

/// Complex amplitude on a grid at one time.
#[pyclass]
struct WaveFunction {
    inner: core::WaveFunction,
}

#[pymethods]
impl WaveFunction {
    /// Normalized Gaussian packet.
    #[staticmethod]
    fn gaussian(grid: &Grid, center: f64, sigma: f64, k0: f64) -> PyResult<Self> {
        Ok(Self {
            inner: core::WaveFunction::gaussian(grid.inner, center, sigma, k0, 0.0).map_err(err)?,
        })
    }

    /// Monochromatic wave with the free-particle frequency for `k`.
    #[staticmethod]
    fn plane_wave(grid: &Grid, k: f64, mass: f64, hbar: f64, t: f64) -> PyResult<Self> {
        let params =
            core::PlaneWaveParams::with_dispersion(k, mass, hbar, Complex64::new(1.0, 0.0))
                .map_err(err)?;
        Ok(Self {
            inner: core::plane_wave(grid.inner, &params, t),
        })
    }

    #[getter]
    fn t(&self) -> f64 {
        self.inner.t()
    }

    fn norm(&self) -> f64 {
        self.inner.norm()
    }

    /// `(re, im)` pairs, one per node.
    fn values(&self) -> Vec<(f64, f64)> {
        self.inner.values().iter().map(|v| (v.re, v.im)).collect()
    }

    /// Crank-Nicolson evolution; returns a new wave function.
    #[pyo3(signature = (potential, mass, hbar, dt, steps, boundary="reflecting"))]
    fn evolve(
        &self,
        potential: &Potential,
        mass: f64,
        hbar: f64,
        dt: f64,
        steps: usize,
        boundary: &str,
    ) -> PyResult<Self> {
        let b = parse_boundary(boundary)?;
        Ok(Self {
            inner: core::evolve(&self.inner, &potential.inner, mass, hbar, dt, steps, b)
                .map_err(err)?,
        })
    }

    /// Membership density `|psi|^2`, optionally normalized.
    #[pyo3(signature = (normalize=true))]
    fn density(&self, normalize: bool) -> PyResult<Density> {
        Ok(Density {
            inner: core::fuzzy::membership_density(&self.inner, normalize).map_err(err)?,
        })
    }

    /// Real part of `K ln(psi)`: the unwrapped phase times hbar.
    fn real_action(&self, hbar: f64) -> PyResult<Vec<f64>> {
        let action = core::log_transform(&self.inner, hbar).map_err(err)?;
        Ok(action.values().iter().map(|v| v.re).collect())
    }

    /// Squared-modulus coordinates over the hard-wall box eigenbasis.
    fn simplex_point(&self, modes: usize) -> PyResult<Vec<f64>> {
        let basis = core::fuzzy::box_eigenbasis(self.inner.grid(), modes).map_err(err)?;
        let decomposition = core::fuzzy::decompose(&self.inner, &basis).map_err(err)?;
        core::fuzzy::simplex_point(&decomposition.state).map_err(err)
    }
}

/// Nonnegative membership density on a grid.
#[pyclass]
struct Density {
    inner: core::fuzzy::MembershipDensity,
}

#[pymethods]
impl Density {
    fn values(&self) -> Vec<f64> {
        self.inner.values().to_vec()
    }

    /// Degree of membership in `[x_lo, x_hi]`.
    fn degree(&self, x_lo: f64, x_hi: f64) -> PyResult<f64> {
        core::fuzzy::degree_in_volume(&self.inner, x_lo, x_hi).map_err(err)
    }

    /// Density ratio between two points.
    fn relative(&self, xi: f64, xj: f64) -> PyResult<f64> {
        core::fuzzy::relative_membership(&self.inner, xi, xj).map_err(err)
    }

    /// Weighted average of per-node observable samples.
    fn defuzzify(&self, observable: Vec<f64>) -> PyResult<f64> {
        let field = core::RealField::from_values(self.inner.grid(), observable).map_err(err)?;
        core::fuzzy::defuzzify(&field, &self.inner).map_err(err)
    }

    /// Seeded categorical detections over `bins` equal intervals; returns
    /// counts per bin.
    fn sample(&self, bins: usize, trials: u64, seed: u64) -> PyResult<Vec<u64>> {
        let partition = core::fuzzy::equal_partition(self.inner.grid(), bins).map_err(err)?;
        let raw = core::fuzzy::hypercube_coordinates(&self.inner, &partition).map_err(err)?;
        let total: f64 = raw.iter().sum();
        let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
        let counts = core::fuzzy::sample_detections(&weights, trials, seed).map_err(err)?;
        Ok(counts.iter().map(|c| c.successes()).collect())
    }
}

/// Free-particle dispersion relation `hbar k^2 / (2 m)`.
#[pyfunction]
fn dispersion_omega(k: f64, mass: f64, hbar: f64) -> PyResult<f64> {
    core::dispersion_omega(k, mass, hbar).map_err(err)
}

/// Subsethood of `successes` trials within `total`.
#[pyfunction]
fn subsethood(total: u64, successes: u64) -> PyResult<f64> {
    let counts = core::fuzzy::DetectionCounts::new(total, successes).map_err(err)?;
    Ok(core::fuzzy::subsethood(&counts))
}

/// Normalized Gaussian-slit density at time `t` after the aperture.
#[pyfunction]
fn slit_density(
    grid: &Grid,
    t_flight: f64,
    half_width: f64,
    center: f64,
    mass: f64,
    hbar: f64,
    t: f64,
) -> PyResult<Density> {
    let params = core::slit::GaussianSlitParams::new(t_flight, half_width, center, mass, hbar)
        .map_err(err)?;
    Ok(Density {
        inner: core::slit::slit_density(&params, grid.inner, t).map_err(err)?,
    })
}

/// Minimal discrete action over a seeded Brownian-bridge ensemble, then the
/// deviation from the straight line after descent refinement. Returns
/// `(min_action, refined_action, refined_deviation)`.
#[pyfunction]
fn least_action_demo(
    x_start: f64,
    x_end: f64,
    t_span: f64,
    steps: usize,
    paths: usize,
    amplitude: f64,
    seed: u64,
) -> PyResult<(f64, f64, f64)> {
    let ensemble = core::PathEnsemble::brownian_bridge(
        x_start, x_end, 0.0, t_span, steps, paths, amplitude, seed,
    )
    .map_err(err)?;
    let v = core::Potential::Zero;
    let (best, min_action) = core::minimize_action(&ensemble, &v, 1.0).map_err(err)?;
    let refined = core::refine_least_action_schedule(
        &best,
        &v,
        1.0,
        2500,
        &[0.1, 0.03, 0.01, 3e-3, 1e-3, 3e-4, 1e-4, 3e-5, 1e-5, 3e-6],
    )
    .map_err(err)?;
    let refined_action = core::action_of_path(&refined, &v, 1.0).map_err(err)?;
    Ok((
        min_action,
        refined_action,
        refined.max_deviation_from_straight(),
    ))
}

#[pymodule]
fn fuzzyqm_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Grid>()?;
    m.add_class::<Potential>()?;
    m.add_class::<WaveFunction>()?;
    m.add_class::<Density>()?;
    m.add_function(wrap_pyfunction!(dispersion_omega, m)?)?;
    m.add_function(wrap_pyfunction!(subsethood, m)?)?;
    m.add_function(wrap_pyfunction!(slit_density, m)?)?;
    m.add_function(wrap_pyfunction!(least_action_demo, m)?)?;
    Ok(())
}
