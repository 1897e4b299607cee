//! Potential energy functions over position (and optionally time).

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::{Grid1D, RealField};

/// A potential `V(x, t)`.
///
/// Piecewise-constant potentials are ordered disjoint `(x_lo, x_hi, value)`
/// triples; at a shared boundary point the left interval wins. Outside every
/// interval the potential is zero.
#[derive(Clone)]
pub enum Potential {
    Zero,
    PiecewiseConstant(Vec<(f64, f64, f64)>),
    Sampled(RealField),
    TimeDependent(Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Potential::Zero => write!(f, "Potential::Zero"),
            Potential::PiecewiseConstant(v) => {
                write!(f, "Potential::PiecewiseConstant({} intervals)", v.len())
            }
            Potential::Sampled(field) => {
                write!(f, "Potential::Sampled({} nodes)", field.grid().n())
            }
            Potential::TimeDependent(_) => write!(f, "Potential::TimeDependent(..)"),
        }
    }
}

impl Potential {
    /// Validate a piecewise-constant specification.
    pub fn piecewise(intervals: Vec<(f64, f64, f64)>) -> Result<Self> {
        let mut prev_hi = f64::NEG_INFINITY;
        for &(lo, hi, v) in &intervals {
            if !(lo.is_finite() && hi.is_finite() && v.is_finite()) {
                return Err(Error::Config(
                    "piecewise potential entries must be finite".into(),
                ));
            }
            if hi <= lo {
                return Err(Error::Config(format!(
                    "piecewise interval [{lo}, {hi}] is empty or reversed"
                )));
            }
            if lo < prev_hi {
                return Err(Error::Config(format!(
                    "piecewise intervals overlap or are out of order near x = {lo}"
                )));
            }
            prev_hi = hi;
        }
        Ok(Potential::PiecewiseConstant(intervals))
    }

    /// Convenience constructor for analytic potentials.
    pub fn from_fn(f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        Potential::TimeDependent(Arc::new(f))
    }

    pub fn is_time_dependent(&self) -> bool {
        matches!(self, Potential::TimeDependent(_))
    }

    /// Evaluate at position `x` and time `t`.
    ///
    /// Sampled potentials use nearest-node lookup on their own grid.
    pub fn at(&self, x: f64, t: f64) -> f64 {
        match self {
            Potential::Zero => 0.0,
            Potential::PiecewiseConstant(intervals) => {
                // Ordered intervals: the first match claims a shared boundary,
                // which assigns the discontinuity to the left interval.
                for &(lo, hi, v) in intervals {
                    if x >= lo && x <= hi {
                        return v;
                    }
                }
                0.0
            }
            Potential::Sampled(field) => field.values()[field.grid().nearest_node(x)],
            Potential::TimeDependent(f) => f(x, t),
        }
    }

    /// Sample onto a grid at time `t`.
    pub fn sample(&self, grid: Grid1D, t: f64) -> RealField {
        RealField::from_fn(grid, |x| self.at(x, t))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn piecewise_left_interval_claims_boundary() {
        let v = Potential::piecewise(vec![(0.0, 1.0, 2.0), (1.0, 2.0, 5.0)]).unwrap();
        assert_eq!(v.at(0.5, 0.0), 2.0);
        assert_eq!(v.at(1.0, 0.0), 2.0); // discontinuity goes left
        assert_eq!(v.at(1.5, 0.0), 5.0);
        assert_eq!(v.at(3.0, 0.0), 0.0);
    }

    #[test]
    fn piecewise_rejects_overlap_and_disorder() {
        assert!(Potential::piecewise(vec![(0.0, 2.0, 1.0), (1.0, 3.0, 1.0)]).is_err());
        assert!(Potential::piecewise(vec![(2.0, 3.0, 1.0), (0.0, 1.0, 1.0)]).is_err());
        assert!(Potential::piecewise(vec![(1.0, 1.0, 1.0)]).is_err());
        assert!(Potential::piecewise(vec![(0.0, 1.0, f64::INFINITY)]).is_err());
    }

    #[test]
    fn sampled_uses_nearest_node() {
        let g = Grid1D::new(0.0, 1.0, 11).unwrap();
        let field = RealField::from_fn(g, |x| x);
        let v = Potential::Sampled(field);
        assert!((v.at(0.52, 0.0) - 0.5).abs() < 1e-12);
        assert!((v.at(0.58, 0.0) - 0.6).abs() < 1e-12);
        assert_eq!(v.at(-4.0, 0.0), 0.0);
    }

    #[test]
    fn time_dependent_callback() {
        let v = Potential::from_fn(|x, t| x * t);
        assert_eq!(v.at(2.0, 3.0), 6.0);
        assert!(v.is_time_dependent());
    }
}
