//! Complex tridiagonal solvers used by the Crank-Nicolson stepper.
//!
//! The systems produced there have constant sub/super diagonals (the
//! potential only touches the main diagonal), so both solvers take a single
//! off-diagonal value. The periodic variant handles the two wrap-around
//! corner entries with the Sherman-Morrison correction.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Solve `diag[i]*x[i] + off*(x[i-1] + x[i+1]) = rhs[i]` (Thomas algorithm).
pub fn solve_const_off(
    diag: &[Complex64],
    off: Complex64,
    rhs: &[Complex64],
) -> Result<Vec<Complex64>> {
    let n = diag.len();
    debug_assert_eq!(rhs.len(), n);
    let mut c_prime = vec![Complex64::ZERO; n];
    let mut d_prime = vec![Complex64::ZERO; n];

    let mut denom = diag[0];
    if denom.norm_sqr() == 0.0 {
        return Err(Error::Numeric("singular tridiagonal system".into()));
    }
    c_prime[0] = off / denom;
    d_prime[0] = rhs[0] / denom;
    for i in 1..n {
        denom = diag[i] - off * c_prime[i - 1];
        if denom.norm_sqr() == 0.0 {
            return Err(Error::Numeric("singular tridiagonal system".into()));
        }
        c_prime[i] = off / denom;
        d_prime[i] = (rhs[i] - off * d_prime[i - 1]) / denom;
    }

    let mut x = vec![Complex64::ZERO; n];
    x[n - 1] = d_prime[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d_prime[i] - c_prime[i] * x[i + 1];
    }
    Ok(x)
}

/// Solve the cyclic variant with corner entries `A[0][n-1] = A[n-1][0] = off`.
pub fn solve_cyclic_const_off(
    diag: &[Complex64],
    off: Complex64,
    rhs: &[Complex64],
) -> Result<Vec<Complex64>> {
    let n = diag.len();
    if n < 3 {
        return Err(Error::Config(
            "cyclic solve needs at least 3 unknowns".into(),
        ));
    }
    // A = B + u v^T with u = (gamma, 0, .., 0, off), v = (1, 0, .., 0, off/gamma);
    // B is tridiagonal with adjusted first/last diagonal entries.
    let gamma = -diag[0];
    if gamma.norm_sqr() == 0.0 {
        return Err(Error::Numeric("singular cyclic system".into()));
    }
    let mut b = diag.to_vec();
    b[0] = diag[0] - gamma;
    b[n - 1] = diag[n - 1] - off * off / gamma;

    let y = solve_const_off(&b, off, rhs)?;

    let mut u = vec![Complex64::ZERO; n];
    u[0] = gamma;
    u[n - 1] = off;
    let z = solve_const_off(&b, off, &u)?;

    let factor_num = y[0] + (off / gamma) * y[n - 1];
    let factor_den = Complex64::new(1.0, 0.0) + z[0] + (off / gamma) * z[n - 1];
    if factor_den.norm_sqr() == 0.0 {
        return Err(Error::Numeric("singular cyclic correction".into()));
    }
    let factor = factor_num / factor_den;

    Ok(y.iter().zip(&z).map(|(yi, zi)| yi - factor * zi).collect())
}
