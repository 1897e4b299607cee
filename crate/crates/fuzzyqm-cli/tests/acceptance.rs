//! Acceptance suite: one test per criterion, each printing a pass/fail line.
//!
//! Criteria 1-9 exercise the library at pinned tolerances; criterion 10
//! drives the installed binary twice and compares artifacts byte for byte.

use std::time::Instant;

use num_complex::Complex64;

use fuzzyqm_core::experiments::{
    classical_limit_sweep, ehrenfest_check, ehrenfest_direct_residual, quantum_hj_residual,
    rescale, SweepConfig, SweepPacket,
};
use fuzzyqm_core::fuzzy::{
    box_eigenbasis, chi_square_gof, decompose, equal_partition, hypercube_coordinates,
    sample_detections, simplex_point, MembershipDensity,
};
use fuzzyqm_core::slit::{
    aperture_state, classical_limit_sweep as slit_sweep, slit_density, GaussianSlitParams,
};
use fuzzyqm_core::{
    dispersion_omega, evolve, integrate, log_transform, measure_dispersion, minimize_action,
    nonlinear_residual, plane_wave, refine_least_action_schedule, schrodinger_residual, Boundary,
    ComplexField, Grid1D, PathEnsemble, PlaneWaveParams, Potential, RealField, Scales,
    WaveFunction,
};

struct Criterion {
    number: u32,
    name: &'static str,
    budget_s: f64,
    started: Instant,
    failures: Vec<String>,
}

impl Criterion {
    fn start(number: u32, name: &'static str, budget_s: f64) -> Self {
        Self {
            number,
            name,
            budget_s,
            started: Instant::now(),
            failures: Vec::new(),
        }
    }

    fn check(&mut self, label: &str, ok: bool, detail: String) {
        if !ok {
            self.failures.push(format!("{label}: {detail}"));
        }
    }

    fn finish(mut self) {
        let elapsed = self.started.elapsed().as_secs_f64();
        if elapsed >= self.budget_s {
            self.failures.push(format!(
                "runtime {elapsed:.2}s exceeded budget {}s",
                self.budget_s
            ));
        }
        let verdict = if self.failures.is_empty() {
            "PASS"
        } else {
            "FAIL"
        };
        println!(
            "acceptance criterion {} ({}): {verdict} [{elapsed:.2}s]",
            self.number, self.name
        );
        assert!(
            self.failures.is_empty(),
            "criterion {} failed:\n  {}",
            self.number,
            self.failures.join("\n  ")
        );
    }
}

fn periodic_grid(n_unique: usize) -> Grid1D {
    Grid1D::new(0.0, std::f64::consts::TAU, n_unique + 1).unwrap()
}

#[test]
fn acceptance_01_dispersion_relation() {
    let mut c = Criterion::start(1, "dispersion relation", 10.0);
    let grid = periodic_grid(16384);
    let fitted = measure_dispersion(&[1.0, 2.0, 3.0], grid, 1.0, 1.0, 0.05, 250).unwrap();
    for (k, omega) in fitted {
        let theory = dispersion_omega(k, 1.0, 1.0).unwrap();
        let rel = ((omega - theory) / theory).abs();
        c.check(
            &format!("k = {k}"),
            rel < 1e-6,
            format!("fitted {omega} vs {theory}, rel error {rel:.3e}"),
        );
    }
    c.finish();
}

#[test]
fn acceptance_02_unitarity() {
    let mut c = Criterion::start(2, "norm conservation", 5.0);
    let grid = Grid1D::new(-20.0, 20.0, 2001).unwrap();
    let psi0 = WaveFunction::gaussian(grid, -2.0, 1.0, 1.5, 0.0).unwrap();
    let evolved = evolve(
        &psi0,
        &Potential::Zero,
        1.0,
        1.0,
        1e-3,
        1000,
        Boundary::Reflecting,
    )
    .unwrap();
    let drift = (integrate(&evolved.field().abs_sqr()).unwrap() - 1.0).abs();
    c.check("norm drift", drift < 1e-8, format!("drift {drift:.3e}"));
    c.finish();
}

#[test]
fn acceptance_03_linear_nonlinear_split() {
    let mut c = Criterion::start(3, "linear/nonlinear split", 10.0);
    let grid = periodic_grid(16384);
    let (mass, hbar, dt, t0) = (1.0, 1.0, 2e-4, 0.1);

    let single =
        PlaneWaveParams::with_dispersion(2.0, mass, hbar, Complex64::new(1.0, 0.0)).unwrap();
    let a = plane_wave(grid, &single, t0);
    let b = plane_wave(grid, &single, t0 + dt);
    let nl = nonlinear_residual(&a, &b, mass, hbar, Boundary::Periodic)
        .unwrap()
        .linf_norm();
    let lin = schrodinger_residual(&a, &b, &Potential::Zero, mass, hbar, Boundary::Periodic)
        .unwrap()
        .linf_norm();
    c.check(
        "plane wave quadratic form",
        nl < 1e-6,
        format!("residual {nl:.3e}"),
    );
    c.check(
        "plane wave linear equation",
        lin < 1e-6,
        format!("residual {lin:.3e}"),
    );

    let p1 = PlaneWaveParams::with_dispersion(1.0, mass, hbar, Complex64::new(1.0, 0.0)).unwrap();
    let p2 = PlaneWaveParams::with_dispersion(2.0, mass, hbar, Complex64::new(1.0, 0.0)).unwrap();
    let sum_at = |t: f64| {
        let x = plane_wave(grid, &p1, t);
        let y = plane_wave(grid, &p2, t);
        WaveFunction::new(
            ComplexField::from_values(
                grid,
                x.values()
                    .iter()
                    .zip(y.values())
                    .map(|(u, v)| u + v)
                    .collect(),
            )
            .unwrap(),
            t,
        )
    };
    let (a, b) = (sum_at(t0), sum_at(t0 + dt));
    let nl = nonlinear_residual(&a, &b, mass, hbar, Boundary::Periodic)
        .unwrap()
        .linf_norm();
    let lin = schrodinger_residual(&a, &b, &Potential::Zero, mass, hbar, Boundary::Periodic)
        .unwrap()
        .linf_norm();
    c.check(
        "superposition keeps linear equation",
        lin < 1e-6,
        format!("residual {lin:.3e}"),
    );
    c.check(
        "superposition breaks quadratic form",
        nl > 1e-2,
        format!("residual {nl:.3e}"),
    );
    c.finish();
}

#[test]
fn acceptance_04_de_broglie_consistency() {
    let mut c = Criterion::start(4, "de Broglie consistency", 10.0);
    let grid = periodic_grid(4096);
    let (hbar, k) = (1.0, 2.0);
    let params = PlaneWaveParams::with_dispersion(k, 1.0, hbar, Complex64::new(1.0, 0.0)).unwrap();
    let psi = plane_wave(grid, &params, 0.3);
    let action = log_transform(&psi, hbar).unwrap();
    let grad = action.real_part().gradient();
    let worst = grad
        .values()
        .iter()
        .fold(0.0_f64, |m, g| m.max((g - hbar * k).abs()));
    c.check(
        "gradient of Re(K ln psi)",
        worst < 1e-8,
        format!("max deviation from hbar k: {worst:.3e}"),
    );
    c.finish();
}

#[test]
fn acceptance_05_gaussian_slit() {
    let mut c = Criterion::start(5, "Gaussian slit", 30.0);
    let params = GaussianSlitParams::new(1.0, 0.5, 1.0, 1.0, 1.0).unwrap();
    let grid = Grid1D::new(-10.0, 12.0, 4401).unwrap();

    // Closed form against independent propagation over t in (0, 2 m b^2 / hbar].
    let t_max = 2.0 * params.mass() * params.half_width() * params.half_width() / params.hbar();
    let dt = 2.5e-4;
    let mut psi = aperture_state(grid, &params).unwrap();
    for quarter in 1..=4_usize {
        let t = quarter as f64 * t_max / 4.0;
        let steps =
            (t / dt).round() as usize - ((quarter - 1) as f64 * t_max / 4.0 / dt).round() as usize;
        psi = evolve(
            &psi,
            &Potential::Zero,
            params.mass(),
            params.hbar(),
            dt,
            steps,
            Boundary::Reflecting,
        )
        .unwrap();
        let numeric = MembershipDensity::from_field(psi.field().abs_sqr(), true).unwrap();
        let closed = slit_density(&params, grid, t).unwrap();
        let diff = RealField::from_values(
            grid,
            closed
                .values()
                .iter()
                .zip(numeric.values())
                .map(|(x, y)| x - y)
                .collect(),
        )
        .unwrap();
        let dist = diff.l2_norm();
        c.check(
            &format!("density distance at t = {t}"),
            dist < 1e-3,
            format!("L2 distance {dist:.3e}"),
        );
    }

    // Joint narrow-slit limit: hbar and b halved four times.
    let pairs: Vec<(f64, f64)> = (0..=4)
        .map(|i| (1.0 / f64::powi(2.0, i), 0.4 / f64::powi(2.0, i)))
        .collect();
    let rows = slit_sweep(&pairs, &params, grid, 0.5).unwrap();
    let decreasing = rows.windows(2).all(|w| w[1].width < w[0].width);
    c.check(
        "delta-limit widths strictly decrease",
        decreasing,
        format!(
            "widths {:?}",
            rows.iter().map(|r| r.width).collect::<Vec<_>>()
        ),
    );
    c.finish();
}

#[test]
fn acceptance_06_classical_limit() {
    let mut c = Criterion::start(6, "classical limit", 60.0);
    let grid = Grid1D::new(-4.0, 6.0, 8193).unwrap();

    // Frozen-action linearity of the quantum correction in h.
    let h_ref = 1.0;
    let scales = Scales::new(1.0, 1.0, 1.0, h_ref).unwrap();
    let psi0 = WaveFunction::gaussian(grid, 0.0, 0.5, 1.0, 0.0).unwrap();
    let a = evolve(
        &psi0,
        &Potential::Zero,
        1.0,
        h_ref,
        5e-4,
        20,
        Boundary::Reflecting,
    )
    .unwrap();
    let b = evolve(
        &a,
        &Potential::Zero,
        1.0,
        h_ref,
        5e-4,
        1,
        Boundary::Reflecting,
    )
    .unwrap();
    let u = RealField::zeros(grid);
    let fa = rescale(&log_transform(&a, h_ref).unwrap(), &u, &scales).unwrap();
    let fb = rescale(&log_transform(&b, h_ref).unwrap(), &u, &scales).unwrap();
    let full = quantum_hj_residual(&fa, &fb).unwrap();
    let tenth = quantum_hj_residual(&fa.with_h(0.1), &fb.with_h(0.1)).unwrap();
    let defect = (tenth.rhs_l2() / full.rhs_l2() - 0.1).abs();
    c.check(
        "correction linear in h at frozen action",
        defect < 1e-10,
        format!("defect {defect:.3e}"),
    );

    // Self-consistent sweep: classical residual decreases monotonically.
    let cfg = SweepConfig {
        grid,
        packet: SweepPacket {
            center: 0.0,
            sigma: 0.5,
            momentum: 1.0,
        },
        potential: Potential::Zero,
        dt: 5e-4,
        steps: 400,
        weight_floor: 1e-6,
    };
    let rows = classical_limit_sweep(&[1.0, 0.1, 0.01], &cfg).unwrap();
    let monotone = rows
        .windows(2)
        .all(|w| w[1].hj_residual_l2 < w[0].hj_residual_l2);
    c.check(
        "classical residual decreases with h",
        monotone,
        format!(
            "residuals {:?}",
            rows.iter().map(|r| r.hj_residual_l2).collect::<Vec<_>>()
        ),
    );
    c.finish();
}

#[test]
fn acceptance_07_generalized_ehrenfest() {
    let mut c = Criterion::start(7, "generalized Ehrenfest balance", 30.0);
    let grid = Grid1D::new(-32.0, 32.0, 16001).unwrap();
    let well = Potential::from_fn(|x, _| 0.025 * x * x);
    let (mass, hbar, dt) = (1.0, 1.0, 1e-3);

    let mut psi = WaveFunction::gaussian(grid, 0.0, 2.0, 0.5, 0.0).unwrap();
    let mut worst_ratio = 0.0_f64;
    let mut worst_route = 0.0_f64;
    for step in 0..1000_usize {
        let next = evolve(&psi, &well, mass, hbar, dt, 1, Boundary::Reflecting).unwrap();
        if step % 100 == 0 || step == 999 {
            let report = ehrenfest_check(&psi, &next, &well, mass, hbar).unwrap();
            worst_ratio = worst_ratio.max(report.residual.abs() / report.max_term_magnitude());
            if step % 500 == 0 || step == 999 {
                let direct = ehrenfest_direct_residual(&psi, &next, &well, mass, hbar).unwrap();
                worst_route = worst_route.max((direct.re - report.residual).abs());
            }
        }
        psi = next;
    }
    c.check(
        "three-term residual stays below 1e-2 of largest term",
        worst_ratio < 1e-2,
        format!("worst ratio {worst_ratio:.3e}"),
    );
    c.check(
        "direct and three-term routes agree",
        worst_route < 1e-6,
        format!("worst gap {worst_route:.3e}"),
    );
    c.finish();
}

#[test]
fn acceptance_08_least_action_defuzzification() {
    let mut c = Criterion::start(8, "least action as defuzzification", 10.0);
    let ensemble = PathEnsemble::brownian_bridge(0.0, 1.0, 0.0, 1.0, 64, 1000, 0.3, 42).unwrap();
    let (best, min_action) = minimize_action(&ensemble, &Potential::Zero, 1.0).unwrap();
    c.check(
        "ensemble minimum at or above the free floor",
        min_action >= 0.5 - 1e-12,
        format!("min action {min_action}"),
    );

    let refined = refine_least_action_schedule(
        &best,
        &Potential::Zero,
        1.0,
        2500,
        &[
            0.1, 0.03, 0.01, 3e-3, 1e-3, 3e-4, 1e-4, 3e-5, 1e-5, 3e-6, 1e-6,
        ],
    )
    .unwrap();
    let dev = refined.max_deviation_from_straight();
    c.check(
        "descent reaches the straight line",
        dev < 1e-3,
        format!("max node deviation {dev:.3e}"),
    );
    c.finish();
}

#[test]
fn acceptance_09_subsethood_frequency_link() {
    let mut c = Criterion::start(9, "subsethood/frequency link", 60.0);

    // Chi-square goodness of fit of sampled detections against interval
    // degrees, swept over 100 seeds.
    let grid = Grid1D::new(-0.52, 3.12, 2001).unwrap();
    let params = GaussianSlitParams::new(1.0, 0.5, 1.0, 1.0, 1.0).unwrap();
    let mu = slit_density(&params, grid, 0.3).unwrap();
    let partition = equal_partition(grid, 20).unwrap();
    let raw = hypercube_coordinates(&mu, &partition).unwrap();
    let total: f64 = raw.iter().sum();
    let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();

    let mut passing = 0_usize;
    for seed in 0..100_u64 {
        let counts = sample_detections(&weights, 100_000, seed).unwrap();
        let observed: Vec<u64> = counts.iter().map(|k| k.successes()).collect();
        let (_, p) = chi_square_gof(&observed, &weights).unwrap();
        if p > 0.001 {
            passing += 1;
        }
    }
    c.check(
        "chi-square fit across seeds",
        passing >= 95,
        format!("{passing}/100 seeds passed"),
    );

    // Simplex normalization of a box-eigenbasis decomposition.
    let box_grid = Grid1D::new(0.0, 10.0, 2001).unwrap();
    let basis = box_eigenbasis(box_grid, 50).unwrap();
    let packet = WaveFunction::gaussian(box_grid, 5.0, 0.5, 2.0, 0.0).unwrap();
    let decomposition = decompose(&packet, &basis).unwrap();
    let captured = decomposition.state.total_weight();
    c.check(
        "50 modes capture the packet",
        captured > 0.999,
        format!("captured weight {captured}"),
    );
    let point = simplex_point(&decomposition.state).unwrap();
    let sum: f64 = point.iter().sum();
    c.check(
        "simplex coordinates sum to one",
        (sum - 1.0).abs() < 1e-10,
        format!("sum defect {:.3e}", (sum - 1.0).abs()),
    );
    c.finish();
}

#[test]
fn acceptance_10_determinism() {
    let mut c = Criterion::start(10, "bit-identical reruns", 60.0);
    let bin = env!("CARGO_BIN_EXE_fuzzyqm");
    let base = std::env::temp_dir().join(format!("fuzzyqm-acceptance-{}", std::process::id()));

    for (experiment, seed, extra) in [
        ("subsethood", "42", vec!["--trials", "20000"]),
        ("least-action", "7", vec!["--paths", "200"]),
        ("dispersion", "0", vec!["--grid-n", "8193"]),
    ] {
        let mut outputs = Vec::new();
        for run in 0..2 {
            let dir = base.join(format!("{experiment}-{run}"));
            let status = std::process::Command::new(bin)
                .arg(experiment)
                .args(["--seed", seed, "--out"])
                .arg(&dir)
                .args(&extra)
                .status()
                .expect("binary runs");
            assert!(status.success(), "{experiment} run {run} failed");
            let mut files: Vec<_> = std::fs::read_dir(&dir)
                .unwrap()
                .map(|e| e.unwrap().path())
                .collect();
            files.sort();
            let blob: Vec<(String, Vec<u8>)> = files
                .iter()
                .map(|p| {
                    (
                        p.file_name().unwrap().to_string_lossy().into_owned(),
                        std::fs::read(p).unwrap(),
                    )
                })
                .collect();
            outputs.push(blob);
        }
        let identical = outputs[0] == outputs[1];
        c.check(
            &format!("{experiment} reruns byte-identical"),
            identical,
            "artifact bytes differ between reruns".to_string(),
        );
    }
    let _ = std::fs::remove_dir_all(&base);
    c.finish();
}
