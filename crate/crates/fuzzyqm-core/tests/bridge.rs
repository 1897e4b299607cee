//! Cross-module checks that tie the action picture to the wave picture.

use fuzzyqm_core::experiments::{quantum_hj_residual, rescale};
use fuzzyqm_core::fuzzy::MembershipDensity;
use fuzzyqm_core::{
    evolve, hj_residual, log_transform, Boundary, Grid1D, Potential, RealField, Scales,
    WaveFunction,
};

/// Evolve a packet at dimensionless ratio `h`, log-transform a late snapshot
/// pair, and return (classical balance residual L2, quantum correction L2)
/// over the window where the packet lives.
///
/// The residuals of interest scale as h^2 while the evolved state's discrete
/// dispersion error contributes an h-independent floor of order
/// E (k0 dx)^2 / 12 with k0 = p / h, so the grid refines as h shrinks.
fn residual_pair(h: f64, n: usize, dt: f64) -> (f64, f64) {
    let grid = Grid1D::new(-4.0, 6.0, n).unwrap();
    let scales = Scales::new(1.0, 1.0, 1.0, h).unwrap();
    let (sigma, momentum) = (0.5, 1.0);
    let steps = (0.2 / dt) as usize;

    let psi0 = WaveFunction::gaussian(grid, 0.0, sigma, momentum / h, 0.0).unwrap();
    let a = evolve(
        &psi0,
        &Potential::Zero,
        1.0,
        h,
        dt,
        steps - 1,
        Boundary::Reflecting,
    )
    .unwrap();
    let b = evolve(&a, &Potential::Zero, 1.0, h, dt, 1, Boundary::Reflecting).unwrap();

    let zero_u = RealField::zeros(grid);
    let fa = rescale(&log_transform(&a, h).unwrap(), &zero_u, &scales).unwrap();
    let fb = rescale(&log_transform(&b, h).unwrap(), &zero_u, &scales).unwrap();
    let report = quantum_hj_residual(&fa, &fb).unwrap();

    let mu = MembershipDensity::from_field(a.field().abs_sqr(), true).unwrap();
    let peak = mu.values().iter().fold(0.0_f64, |m, v| m.max(*v));
    let window: Vec<bool> = mu
        .values()
        .iter()
        .zip(report.valid.iter())
        .map(|(v, ok)| *ok && *v >= 1e-6 * peak)
        .collect();

    let classical = hj_residual(
        &RealField::from_values(grid, fa.action().values().iter().map(|v| v.re).collect()).unwrap(),
        &RealField::from_values(grid, fb.action().values().iter().map(|v| v.re).collect()).unwrap(),
        fb.tau() - fa.tau(),
        &Potential::Zero,
        1.0,
        fa.tau(),
    )
    .unwrap();

    let dx = grid.dx();
    let classical_l2 = (classical
        .values()
        .iter()
        .zip(&window)
        .filter(|(_, ok)| **ok)
        .map(|(v, _)| v * v)
        .sum::<f64>()
        * dx)
        .sqrt();
    let rhs_l2 = (report
        .rhs
        .values()
        .iter()
        .zip(&window)
        .filter(|(_, ok)| **ok)
        .map(|(v, _)| v.norm_sqr())
        .sum::<f64>()
        * dx)
        .sqrt();
    (classical_l2, rhs_l2)
}

#[test]
fn classical_residual_tracks_quantum_correction_across_h() {
    // Both the classical balance residual of Re(S) and the correction norm
    // (h/2) |lap S| scale together as h shrinks: their ratio must stay fixed
    // within 10% across the sweep.
    let mut ratios = Vec::new();
    for (h, n, dt) in [
        (0.04, 4097, 5e-4),
        (0.02, 16385, 5e-4),
        (0.01, 65537, 2.5e-4),
    ] {
        let (classical_l2, rhs_l2) = residual_pair(h, n, dt);
        assert!(rhs_l2 > 0.0);
        ratios.push(classical_l2 / rhs_l2);
    }
    let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().cloned().fold(0.0_f64, f64::max);
    assert!(
        hi / lo < 1.10,
        "residual-to-correction ratio drifted more than 10%: {ratios:?}"
    );
}

#[test]
fn action_gradient_at_center_matches_momentum_expectation() {
    // Independent oracle: <p> = Re Int psi* (-i hbar grad psi) dx.
    let grid = Grid1D::new(-15.0, 15.0, 3001).unwrap();
    let (hbar, k0) = (1.0, 1.5);
    let psi0 = WaveFunction::gaussian(grid, 0.0, 1.0, k0, 0.0).unwrap();
    let psi = evolve(
        &psi0,
        &Potential::Zero,
        1.0,
        hbar,
        1e-3,
        100,
        Boundary::Reflecting,
    )
    .unwrap();

    let grad_psi = psi.field().gradient();
    let mut p_expect = 0.0;
    for i in 0..grid.n() {
        let w = if i == 0 || i == grid.n() - 1 {
            0.5
        } else {
            1.0
        };
        let v =
            psi.values()[i].conj() * num_complex::Complex64::new(0.0, -hbar) * grad_psi.values()[i];
        p_expect += v.re * w;
    }
    p_expect *= grid.dx();

    let action = log_transform(&psi, hbar).unwrap();
    let grad_action = action.real_part().gradient();
    let mu = MembershipDensity::from_field(psi.field().abs_sqr(), true).unwrap();
    let peak_node = (0..grid.n())
        .max_by(|&i, &j| mu.values()[i].partial_cmp(&mu.values()[j]).unwrap())
        .unwrap();
    let p_center = grad_action.values()[peak_node];

    assert!(
        (p_center - p_expect).abs() < 1e-3,
        "grad Re(S) at center {p_center} vs <p> {p_expect}"
    );
}
