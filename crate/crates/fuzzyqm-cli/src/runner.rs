//! Experiment execution: each runner validates its resolved configuration,
//! computes, writes CSV artifacts plus a summary, and reports its checks.

use std::path::Path;

use num_complex::Complex64;
use serde::Serialize;

use fuzzyqm_core::experiments::{
    classical_limit_sweep as quantum_sweep, ehrenfest_check, ehrenfest_direct_residual,
    quantum_hj_residual, rescale, SweepConfig, SweepPacket,
};
use fuzzyqm_core::fuzzy::{
    box_eigenbasis, chi_square_gof, decompose, equal_partition, hypercube_coordinates,
    sample_detections, simplex_point, MembershipDensity,
};
use fuzzyqm_core::slit::{
    aperture_state, classical_limit_sweep as slit_sweep, density_width, slit_density,
};
use fuzzyqm_core::{
    cfl_dt_limit, evolve, log_transform, measure_dispersion, minimize_action, nonlinear_residual,
    plane_wave, refine_least_action_schedule, schrodinger_residual, Boundary, ComplexField,
    PathEnsemble, PlaneWaveParams, Potential, RealField, Scales, WaveFunction,
};

use crate::config::*;
use crate::output::{fnum, ArtifactWriter, Check};

#[derive(Debug)]
pub enum RunError {
    /// Configuration rejected before any computation (exit code 2).
    Validation(Vec<String>),
    /// Failure during computation or artifact writing (exit code 1).
    Runtime(String),
}

impl From<fuzzyqm_core::Error> for RunError {
    fn from(e: fuzzyqm_core::Error) -> Self {
        RunError::Runtime(e.to_string())
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Runtime(format!("io error: {e}"))
    }
}

#[derive(Serialize)]
struct ResolvedEcho<T: Serialize> {
    experiment: String,
    seed: u64,
    config: T,
}

fn echo_toml<T: Serialize>(experiment: &str, seed: u64, config: &T) -> Result<String, RunError> {
    toml::to_string_pretty(&ResolvedEcho {
        experiment: experiment.to_string(),
        seed,
        config,
    })
    .map_err(|e| RunError::Runtime(format!("config serialization failed: {e}")))
}

fn prepare<T: Serialize>(
    experiment: &str,
    seed: u64,
    cfg: &T,
    findings: Vec<String>,
    out_dir: &Path,
) -> Result<(ArtifactWriter, String), RunError> {
    if !findings.is_empty() {
        return Err(RunError::Validation(findings));
    }
    let resolved = echo_toml(experiment, seed, cfg)?;
    let writer = ArtifactWriter::new(out_dir, &resolved, seed)?;
    Ok((writer, resolved))
}

fn finish(
    mut writer: ArtifactWriter,
    resolved: &str,
    experiment: &str,
    checks: &[Check],
) -> Result<bool, RunError> {
    writer.write_config(resolved)?;
    let pass = writer.write_summary(experiment, checks)?;
    for c in checks {
        println!(
            "{} {} value={} threshold={}",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            fnum(c.value),
            fnum(c.threshold)
        );
    }
    Ok(pass)
}

pub fn run_dispersion(cfg: &DispersionConfig, seed: u64, out: &Path) -> Result<bool, RunError> {
    let (mut writer, resolved) = prepare("dispersion", seed, cfg, cfg.validate(), out)?;
    let grid = cfg.grid.build()?;
    let scales = Scales::new(
        cfg.scales.l0,
        cfg.scales.t0,
        cfg.scales.mass,
        cfg.scales.hbar,
    )?;
    let dt = cfg.t_total / cfg.steps as f64;
    if dt > cfl_dt_limit(grid, scales.mass(), scales.hbar()) {
        eprintln!("warning: dt = {dt} exceeds the dx^2 m / hbar accuracy heuristic");
    }

    let fitted = measure_dispersion(
        &cfg.k_list,
        grid,
        scales.mass(),
        scales.hbar(),
        cfg.t_total,
        cfg.steps,
    )?;
    let mut rows = Vec::new();
    let mut checks = Vec::new();
    for (k, omega_fitted) in fitted {
        let omega_theory = fuzzyqm_core::dispersion_omega(k, scales.mass(), scales.hbar())?;
        let rel_error = if omega_theory != 0.0 {
            ((omega_fitted - omega_theory) / omega_theory).abs()
        } else {
            omega_fitted.abs()
        };
        rows.push(vec![
            fnum(k),
            fnum(omega_fitted),
            fnum(omega_theory),
            fnum(rel_error),
        ]);
        checks.push(Check::below(
            &format!("rel_error_k_{k}"),
            rel_error,
            cfg.tolerance,
        ));
    }
    writer.write_csv(
        "dispersion.csv",
        "k,omega_fitted,omega_theory,rel_error",
        &rows,
    )?;
    finish(writer, &resolved, "dispersion", &checks)
}

pub fn run_plane_wave_check(
    cfg: &PlaneWaveCheckConfig,
    seed: u64,
    out: &Path,
) -> Result<bool, RunError> {
    let (mut writer, resolved) = prepare("plane-wave-check", seed, cfg, cfg.validate(), out)?;
    let grid = cfg.grid.build()?;
    let (mass, hbar) = (cfg.scales.mass, cfg.scales.hbar);
    let mut rows = Vec::new();
    let mut checks = Vec::new();

    let snapshots = |params: &PlaneWaveParams| {
        (
            plane_wave(grid, params, cfg.t_probe),
            plane_wave(grid, params, cfg.t_probe + cfg.dt),
        )
    };

    for &k in &cfg.k_single {
        let params = PlaneWaveParams::with_dispersion(k, mass, hbar, Complex64::new(1.0, 0.0))?;
        let (a, b) = snapshots(&params);
        let nl = nonlinear_residual(&a, &b, mass, hbar, Boundary::Periodic)?.linf_norm();
        let sch = schrodinger_residual(&a, &b, &Potential::Zero, mass, hbar, Boundary::Periodic)?
            .linf_norm();
        rows.push(vec![format!("plane_wave_k_{k}"), fnum(nl), fnum(sch)]);
        checks.push(Check::below(
            &format!("nonlinear_linf_k_{k}"),
            nl,
            cfg.linear_tolerance,
        ));
        checks.push(Check::below(
            &format!("schrodinger_linf_k_{k}"),
            sch,
            cfg.linear_tolerance,
        ));
    }

    // Two-wave superposition: linear residual stays small, the quadratic
    // form does not.
    let p1 = PlaneWaveParams::with_dispersion(cfg.k_pair.0, mass, hbar, Complex64::new(1.0, 0.0))?;
    let p2 = PlaneWaveParams::with_dispersion(cfg.k_pair.1, mass, hbar, Complex64::new(1.0, 0.0))?;
    let sum_at = |t: f64| -> Result<WaveFunction, RunError> {
        let a = plane_wave(grid, &p1, t);
        let b = plane_wave(grid, &p2, t);
        Ok(WaveFunction::new(
            ComplexField::from_values(
                grid,
                a.values()
                    .iter()
                    .zip(b.values())
                    .map(|(x, y)| x + y)
                    .collect(),
            )?,
            t,
        ))
    };
    let (a, b) = (sum_at(cfg.t_probe)?, sum_at(cfg.t_probe + cfg.dt)?);
    let nl = nonlinear_residual(&a, &b, mass, hbar, Boundary::Periodic)?.linf_norm();
    let sch =
        schrodinger_residual(&a, &b, &Potential::Zero, mass, hbar, Boundary::Periodic)?.linf_norm();
    rows.push(vec!["superposition".into(), fnum(nl), fnum(sch)]);
    checks.push(Check::at_least(
        "superposition_nonlinear_linf",
        nl,
        cfg.nonlinear_floor,
    ));
    checks.push(Check::below(
        "superposition_schrodinger_linf",
        sch,
        cfg.linear_tolerance,
    ));

    writer.write_csv(
        "plane_wave_check.csv",
        "case,nonlinear_linf,schrodinger_linf",
        &rows,
    )?;
    finish(writer, &resolved, "plane-wave-check", &checks)
}

pub fn run_slit(cfg: &SlitConfig, seed: u64, out: &Path) -> Result<bool, RunError> {
    let (mut writer, resolved) = prepare("slit", seed, cfg, cfg.validate(), out)?;
    let grid = cfg.grid.build()?;
    let params = cfg.params()?;
    let mut checks = Vec::new();

    let mut samples = cfg.t_samples.clone();
    samples.sort_by(|a, b| a.partial_cmp(b).unwrap());

    // Closed-form density profiles.
    let mut rows = Vec::new();
    for &t in &samples {
        let mu = slit_density(&params, grid, t)?;
        for i in 0..grid.n() {
            rows.push(vec![fnum(t), fnum(grid.x(i)), fnum(mu.values()[i])]);
        }

        let mass: f64 = fuzzyqm_core::integrate(mu.field())?;
        checks.push(Check::below(
            &format!("mass_defect_t_{t}"),
            (mass - 1.0).abs(),
            1e-8,
        ));
        let x_mu = RealField::from_values(
            grid,
            mu.values()
                .iter()
                .enumerate()
                .map(|(i, m)| m * grid.x(i))
                .collect(),
        )?;
        let center = fuzzyqm_core::integrate(&x_mu)?;
        checks.push(Check::below(
            &format!("center_drift_t_{t}"),
            (center - (params.center() + params.velocity() * t)).abs(),
            1e-6,
        ));
        let width = density_width(&mu)?;
        checks.push(Check::below(
            &format!("width_law_rel_error_t_{t}"),
            (width - params.width_at(t)).abs() / params.width_at(t),
            cfg.width_tolerance,
        ));
    }
    writer.write_csv("slit.csv", "t,x,mu", &rows)?;

    // Independent Crank-Nicolson propagation of the aperture state.
    let mut psi = aperture_state(grid, &params)?;
    let mut steps_done = 0_u64;
    for &t in &samples {
        let target = (t / cfg.oracle_dt).round() as u64;
        if target > steps_done {
            psi = evolve(
                &psi,
                &Potential::Zero,
                params.mass(),
                params.hbar(),
                cfg.oracle_dt,
                (target - steps_done) as usize,
                Boundary::Reflecting,
            )?;
            steps_done = target;
        }
        let numeric = MembershipDensity::from_field(psi.field().abs_sqr(), true)?;
        let closed = slit_density(&params, grid, steps_done as f64 * cfg.oracle_dt)?;
        let diff = RealField::from_values(
            grid,
            closed
                .values()
                .iter()
                .zip(numeric.values())
                .map(|(a, b)| a - b)
                .collect(),
        )?;
        checks.push(Check::below(
            &format!("oracle_density_l2_t_{t}"),
            diff.l2_norm(),
            cfg.density_distance_tolerance,
        ));
    }

    // Joint narrow-slit sweep: halve hbar and b together.
    let pairs: Vec<(f64, f64)> = (0..=cfg.sweep_halvings)
        .map(|i| {
            let f = f64::powi(2.0, i as i32);
            (params.hbar() / f, 0.8 * params.half_width() / f)
        })
        .collect();
    let sweep_rows = slit_sweep(&pairs, &params, grid, cfg.sweep_t)?;
    let rows: Vec<Vec<String>> = sweep_rows
        .iter()
        .map(|r| vec![fnum(r.hbar), fnum(r.half_width), fnum(r.width)])
        .collect();
    writer.write_csv("slit_sweep.csv", "hbar,half_width,width", &rows)?;
    let strictly_decreasing = sweep_rows.windows(2).all(|w| w[1].width < w[0].width);
    checks.push(Check::holds(
        "sweep_widths_strictly_decreasing",
        strictly_decreasing,
    ));

    finish(writer, &resolved, "slit", &checks)
}

pub fn run_classical_limit(
    cfg: &ClassicalLimitConfig,
    seed: u64,
    out: &Path,
) -> Result<bool, RunError> {
    let (mut writer, resolved) = prepare("classical-limit", seed, cfg, cfg.validate(), out)?;
    let grid = cfg.grid.build()?;
    let potential = cfg.potential.build()?;
    let sweep_cfg = SweepConfig {
        grid,
        packet: SweepPacket {
            center: cfg.packet_center,
            sigma: cfg.sigma,
            momentum: cfg.momentum,
        },
        potential: potential.clone(),
        dt: cfg.dt,
        steps: cfg.steps,
        weight_floor: cfg.weight_floor,
    };
    let rows = quantum_sweep(&cfg.h_values, &sweep_cfg)?;
    let csv: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                fnum(r.h),
                fnum(r.rhs_l2),
                fnum(r.rhs_linf),
                fnum(r.hj_residual_l2),
            ]
        })
        .collect();
    writer.write_csv(
        "classical_limit.csv",
        "h,rhs_l2,rhs_linf,hj_residual_l2",
        &csv,
    )?;

    let mut checks = Vec::new();
    checks.push(Check::holds(
        "hj_residual_strictly_decreasing",
        rows.windows(2)
            .all(|w| w[1].hj_residual_l2 < w[0].hj_residual_l2),
    ));
    checks.push(Check::holds(
        "quantum_correction_strictly_decreasing",
        rows.windows(2).all(|w| w[1].rhs_l2 < w[0].rhs_l2),
    ));

    // Frozen-action linearity: rescaling h rescales the correction exactly.
    let h_ref = cfg.h_values[0];
    let scales = Scales::new(1.0, 1.0, 1.0, h_ref)?;
    let psi0 = WaveFunction::gaussian(
        grid,
        cfg.packet_center,
        cfg.sigma,
        cfg.momentum / h_ref,
        0.0,
    )?;
    let a = evolve(
        &psi0,
        &potential,
        1.0,
        h_ref,
        cfg.dt,
        20,
        Boundary::Reflecting,
    )?;
    let b = evolve(&a, &potential, 1.0, h_ref, cfg.dt, 1, Boundary::Reflecting)?;
    let u_field = potential.sample(grid, a.t() + 0.5 * cfg.dt);
    let fa = rescale(&log_transform(&a, h_ref)?, &u_field, &scales)?;
    let fb = rescale(&log_transform(&b, h_ref)?, &u_field, &scales)?;
    let full = quantum_hj_residual(&fa, &fb)?;
    let tenth = quantum_hj_residual(&fa.with_h(h_ref / 10.0), &fb.with_h(h_ref / 10.0))?;
    let ratio_defect = (tenth.rhs_l2() / full.rhs_l2() - 0.1).abs();
    checks.push(Check::below(
        "frozen_action_linearity_defect",
        ratio_defect,
        cfg.linearity_tolerance,
    ));

    finish(writer, &resolved, "classical-limit", &checks)
}

pub fn run_ehrenfest(cfg: &EhrenfestConfig, seed: u64, out: &Path) -> Result<bool, RunError> {
    let (mut writer, resolved) = prepare("ehrenfest", seed, cfg, cfg.validate(), out)?;
    let grid = cfg.grid.build()?;
    let potential = cfg.potential.build()?;
    let (mass, hbar) = (cfg.scales.mass, cfg.scales.hbar);

    let mut psi = WaveFunction::gaussian(grid, cfg.packet_center, cfg.sigma, cfg.k0, 0.0)?;
    let mut rows = Vec::new();
    let mut worst_ratio = 0.0_f64;
    let mut route_defect = 0.0_f64;
    let mut route_checks = 0_usize;
    for step in 0..cfg.steps {
        let next = evolve(
            &psi,
            &potential,
            mass,
            hbar,
            cfg.dt,
            1,
            Boundary::Reflecting,
        )?;
        if step % cfg.report_every == 0 || step + 1 == cfg.steps {
            let report = ehrenfest_check(&psi, &next, &potential, mass, hbar)?;
            rows.push(vec![
                step.to_string(),
                fnum(report.term_ds_dt),
                fnum(report.term_kinetic),
                fnum(report.term_potential),
                fnum(report.residual),
            ]);
            worst_ratio = worst_ratio.max(report.residual.abs() / report.max_term_magnitude());
            if route_checks < 3 {
                let direct = ehrenfest_direct_residual(&psi, &next, &potential, mass, hbar)?;
                route_defect = route_defect.max((direct.re - report.residual).abs());
                route_checks += 1;
            }
        }
        psi = next;
    }
    writer.write_csv(
        "ehrenfest.csv",
        "step,term_dSdt,term_kinetic,term_potential,residual",
        &rows,
    )?;

    // Final-state snapshot: one row per node.
    let snapshot: Vec<Vec<String>> = (0..grid.n())
        .map(|i| {
            let v = psi.values()[i];
            vec![fnum(grid.x(i)), fnum(v.re), fnum(v.im), fnum(v.norm_sqr())]
        })
        .collect();
    writer.write_csv("final_state.csv", "x,psi_re,psi_im,density", &snapshot)?;

    let checks = vec![
        Check::below(
            "max_residual_over_max_term",
            worst_ratio,
            cfg.residual_tolerance,
        ),
        Check::below(
            "route_agreement_defect",
            route_defect,
            cfg.route_agreement_tolerance,
        ),
    ];
    finish(writer, &resolved, "ehrenfest", &checks)
}

pub fn run_least_action(cfg: &LeastActionConfig, seed: u64, out: &Path) -> Result<bool, RunError> {
    let (mut writer, resolved) = prepare("least-action", seed, cfg, cfg.validate(), out)?;
    let potential = cfg.potential.build()?;
    let ensemble = PathEnsemble::brownian_bridge(
        cfg.x_start,
        cfg.x_end,
        cfg.t_start,
        cfg.t_end,
        cfg.path_steps,
        cfg.paths,
        cfg.amplitude,
        seed,
    )?;
    let (best, min_action) = minimize_action(&ensemble, &potential, cfg.mass)?;
    let refined = refine_least_action_schedule(
        &best,
        &potential,
        cfg.mass,
        cfg.refine_iters,
        &cfg.refine_steps,
    )?;
    let refined_action = fuzzyqm_core::action_of_path(&refined, &potential, cfg.mass)?;

    let rows = vec![
        vec![
            "ensemble_min".to_string(),
            fnum(min_action),
            fnum(best.max_deviation_from_straight()),
        ],
        vec![
            "refined".to_string(),
            fnum(refined_action),
            fnum(refined.max_deviation_from_straight()),
        ],
    ];
    writer.write_csv("least_action.csv", "stage,action,max_dev", &rows)?;

    // Free-particle floor m (x1 - x0)^2 / 2T; only a hard bound for V = 0.
    let span = cfg.x_end - cfg.x_start;
    let floor = 0.5 * cfg.mass * span * span / (cfg.t_end - cfg.t_start);
    let mut checks = Vec::new();
    if matches!(potential, Potential::Zero) {
        checks.push(Check::at_least(
            "min_action_above_free_floor",
            min_action,
            floor - 1e-12,
        ));
    }
    checks.push(Check::below(
        "refined_deviation_from_straight",
        refined.max_deviation_from_straight(),
        cfg.deviation_tolerance,
    ));
    checks.push(Check::holds(
        "refined_action_not_above_min",
        refined_action <= min_action,
    ));
    finish(writer, &resolved, "least-action", &checks)
}

pub fn run_subsethood(cfg: &SubsethoodConfig, seed: u64, out: &Path) -> Result<bool, RunError> {
    let (mut writer, resolved) = prepare("subsethood", seed, cfg, cfg.validate(), out)?;
    let grid = cfg.slit.grid.build()?;
    let params = cfg.slit.params()?;
    let mu = slit_density(&params, grid, cfg.sample_time)?;
    let partition = equal_partition(grid, cfg.bins)?;
    let raw = hypercube_coordinates(&mu, &partition)?;
    let total: f64 = raw.iter().sum();
    let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();

    let counts = sample_detections(&weights, cfg.trials, seed)?;
    let observed: Vec<u64> = counts.iter().map(|c| c.successes()).collect();
    let mut rows = Vec::new();
    for (i, (&w, &obs)) in weights.iter().zip(&observed).enumerate() {
        rows.push(vec![
            i.to_string(),
            fnum(w),
            obs.to_string(),
            fnum(obs as f64 / cfg.trials as f64),
        ]);
    }
    writer.write_csv("subsethood.csv", "bin,expected,observed,freq", &rows)?;

    let (statistic, p_value) = chi_square_gof(&observed, &weights)?;
    let checks = vec![
        Check::at_least("chi_square_p_value", p_value, cfg.p_value_floor),
        Check::below(
            "chi_square_statistic_finite",
            if statistic.is_finite() { 0.0 } else { 1.0 },
            0.5,
        ),
    ];
    finish(writer, &resolved, "subsethood", &checks)
}

pub fn run_simplex(cfg: &SimplexConfig, seed: u64, out: &Path) -> Result<bool, RunError> {
    let (mut writer, resolved) = prepare("simplex", seed, cfg, cfg.validate(), out)?;
    let grid = cfg.grid.build()?;
    let basis = box_eigenbasis(grid, cfg.modes)?;
    let psi = WaveFunction::gaussian(grid, cfg.packet_center, cfg.sigma, cfg.k0, 0.0)?;
    let decomposition = decompose(&psi, &basis)?;
    let point = simplex_point(&decomposition.state)?;

    let rows: Vec<Vec<String>> = decomposition
        .state
        .coefficients()
        .iter()
        .zip(&point)
        .enumerate()
        .map(|(i, (c, p))| vec![(i + 1).to_string(), fnum(c.re), fnum(c.im), fnum(*p)])
        .collect();
    writer.write_csv("simplex.csv", "k,coeff_re,coeff_im,p", &rows)?;

    let sum: f64 = point.iter().sum();
    let checks = vec![
        Check::below("simplex_sum_defect", (sum - 1.0).abs(), 1e-10),
        Check::at_least(
            "captured_weight",
            decomposition.state.total_weight(),
            cfg.capture_floor,
        ),
    ];
    finish(writer, &resolved, "simplex", &checks)
}
