//! A desk-scale numerical laboratory connecting classical least-action
//! mechanics, linear wave-function evolution, and fuzzy-set membership
//! measures on 1-D grids.
//!
//! The crate is organized around a handful of value types: [`Grid1D`] with
//! real/complex sampled fields, [`Path`] ensembles with a discrete action,
//! [`WaveFunction`] with Crank-Nicolson evolution and the log-transform to a
//! complex action, a closed-form Gaussian-slit state, and membership-density
//! measures with detection sampling. Everything is immutable after
//! construction and deterministic for a fixed seed.

pub mod classical;
pub mod error;
pub mod experiments;
pub mod fuzzy;
pub mod grid;
pub mod potential;
pub mod quantum;
pub mod scales;
pub mod slit;
mod tridiag;

pub use error::{Error, Result};
pub use grid::{integrate, Boundary, ComplexField, Grid1D, RealField};
pub use potential::Potential;
pub use scales::Scales;

pub use classical::{
    action_of_path, hj_residual, minimize_action, momentum_field, refine_least_action,
    refine_least_action_schedule, Path, PathEnsemble,
};
pub use quantum::{
    cfl_dt_limit, commensurate, dispersion_omega, evolve, exp_transform, log_transform,
    measure_dispersion, nonlinear_residual, plane_wave, schrodinger_residual, ComplexAction,
    PlaneWaveParams, WaveFunction,
};
