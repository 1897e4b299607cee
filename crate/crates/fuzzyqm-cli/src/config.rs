//! Run configuration: TOML file sections merged with per-experiment defaults
//! and command-line overrides, validated fail-fast before any computation.

use serde::{Deserialize, Serialize};

fn d_one() -> f64 {
    1.0
}

/// Uniform grid section.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub x_min: f64,
    pub x_max: f64,
    pub n: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            x_min: -10.0,
            x_max: 10.0,
            n: 2001,
        }
    }
}

impl GridConfig {
    pub fn validate(&self, findings: &mut Vec<String>) {
        if self.n < 3 {
            findings.push(format!("grid.n must be >= 3, got {}", self.n));
        }
        if !(self.x_min.is_finite() && self.x_max.is_finite()) {
            findings.push("grid bounds must be finite".into());
        } else if self.x_max <= self.x_min {
            findings.push(format!(
                "grid.x_max must exceed grid.x_min, got [{}, {}]",
                self.x_min, self.x_max
            ));
        }
    }

    pub fn build(&self) -> fuzzyqm_core::Result<fuzzyqm_core::Grid1D> {
        fuzzyqm_core::Grid1D::new(self.x_min, self.x_max, self.n)
    }
}

/// Physical scale section (`s0` and the dimensionless ratio are derived).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScalesConfig {
    pub l0: f64,
    pub t0: f64,
    pub mass: f64,
    pub hbar: f64,
}

impl Default for ScalesConfig {
    fn default() -> Self {
        Self {
            l0: 1.0,
            t0: 1.0,
            mass: 1.0,
            hbar: 1.0,
        }
    }
}

impl ScalesConfig {
    pub fn validate(&self, findings: &mut Vec<String>) {
        for (name, v) in [
            ("l0", self.l0),
            ("t0", self.t0),
            ("mass", self.mass),
            ("hbar", self.hbar),
        ] {
            if !(v.is_finite() && v > 0.0) {
                findings.push(format!("scales.{name} must be finite and > 0, got {v}"));
            }
        }
    }
}

/// Potential section; `kind` selects the shape.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PotentialConfig {
    /// One of `zero`, `harmonic`, `piecewise`.
    pub kind: String,
    /// Harmonic: `V = 0.5 * strength * (x - center)^2`.
    pub strength: f64,
    pub center: f64,
    /// Piecewise-constant `(x_lo, x_hi, value)` triples, ordered, disjoint.
    pub intervals: Vec<(f64, f64, f64)>,
}

impl Default for PotentialConfig {
    fn default() -> Self {
        Self {
            kind: "zero".into(),
            strength: 0.0,
            center: 0.0,
            intervals: Vec::new(),
        }
    }
}

impl PotentialConfig {
    pub fn validate(&self, findings: &mut Vec<String>) {
        match self.kind.as_str() {
            "zero" | "harmonic" => {}
            "piecewise" => {
                let mut prev_hi = f64::NEG_INFINITY;
                for &(lo, hi, v) in &self.intervals {
                    if !(lo.is_finite() && hi.is_finite() && v.is_finite()) {
                        findings.push("potential.intervals entries must be finite".into());
                        break;
                    }
                    if hi <= lo {
                        findings.push(format!("potential interval [{lo}, {hi}] is empty"));
                    }
                    if lo < prev_hi {
                        findings.push(format!(
                            "potential intervals overlap or are out of order near x = {lo}"
                        ));
                    }
                    prev_hi = hi;
                }
            }
            other => findings.push(format!(
                "potential.kind must be zero, harmonic or piecewise, got {other}"
            )),
        }
        if !self.strength.is_finite() {
            findings.push("potential.strength must be finite".into());
        }
    }

    pub fn build(&self) -> fuzzyqm_core::Result<fuzzyqm_core::Potential> {
        match self.kind.as_str() {
            "zero" => Ok(fuzzyqm_core::Potential::Zero),
            "harmonic" => {
                let (k, c) = (self.strength, self.center);
                Ok(fuzzyqm_core::Potential::from_fn(move |x, _| {
                    0.5 * k * (x - c) * (x - c)
                }))
            }
            "piecewise" => fuzzyqm_core::Potential::piecewise(self.intervals.clone()),
            other => Err(fuzzyqm_core::Error::Config(format!(
                "unknown potential kind {other}"
            ))),
        }
    }
}

fn d_dispersion_grid() -> GridConfig {
    GridConfig {
        x_min: 0.0,
        x_max: std::f64::consts::TAU,
        n: 16385,
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DispersionConfig {
    pub grid: GridConfig,
    pub scales: ScalesConfig,
    pub k_list: Vec<f64>,
    pub t_total: f64,
    pub steps: usize,
    pub tolerance: f64,
}

impl Default for DispersionConfig {
    fn default() -> Self {
        Self {
            grid: d_dispersion_grid(),
            scales: ScalesConfig::default(),
            k_list: vec![1.0, 2.0, 3.0],
            t_total: 0.05,
            steps: 250,
            tolerance: 1e-6,
        }
    }
}

impl DispersionConfig {
    pub fn validate(&self) -> Vec<String> {
        let mut findings = Vec::new();
        self.grid.validate(&mut findings);
        self.scales.validate(&mut findings);
        if self.k_list.is_empty() {
            findings.push("dispersion.k_list must not be empty".into());
        }
        if self.steps < 2 {
            findings.push("dispersion.steps must be >= 2".into());
        }
        if !(self.t_total.is_finite() && self.t_total > 0.0) {
            findings.push("dispersion.t_total must be > 0".into());
        }
        if let Ok(grid) = self.grid.build() {
            for &k in &self.k_list {
                if !fuzzyqm_core::commensurate(grid, k) {
                    findings.push(format!(
                        "dispersion k = {k} does not fit a whole number of wavelengths"
                    ));
                }
            }
        }
        findings
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlaneWaveCheckConfig {
    pub grid: GridConfig,
    pub scales: ScalesConfig,
    pub k_single: Vec<f64>,
    pub k_pair: (f64, f64),
    pub t_probe: f64,
    pub dt: f64,
    pub linear_tolerance: f64,
    pub nonlinear_floor: f64,
}

impl Default for PlaneWaveCheckConfig {
    fn default() -> Self {
        Self {
            grid: d_dispersion_grid(),
            scales: ScalesConfig::default(),
            k_single: vec![1.0, 2.0],
            k_pair: (1.0, 2.0),
            t_probe: 0.1,
            dt: 2e-4,
            linear_tolerance: 1e-6,
            nonlinear_floor: 1e-2,
        }
    }
}

impl PlaneWaveCheckConfig {
    pub fn validate(&self) -> Vec<String> {
        let mut findings = Vec::new();
        self.grid.validate(&mut findings);
        self.scales.validate(&mut findings);
        if !(self.dt.is_finite() && self.dt > 0.0) {
            findings.push("plane_wave_check.dt must be > 0".into());
        }
        if let Ok(grid) = self.grid.build() {
            for &k in self
                .k_single
                .iter()
                .chain([self.k_pair.0, self.k_pair.1].iter())
            {
                if !fuzzyqm_core::commensurate(grid, k) {
                    findings.push(format!(
                        "plane-wave k = {k} does not fit a whole number of wavelengths"
                    ));
                }
            }
        }
        findings
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SlitConfig {
    pub grid: GridConfig,
    pub t_flight: f64,
    pub half_width: f64,
    pub center: f64,
    /// Overrides the geometric default `center / t_flight` when set.
    pub velocity: Option<f64>,
    pub mass: f64,
    pub hbar: f64,
    pub t_samples: Vec<f64>,
    pub oracle_dt: f64,
    /// Number of times `(hbar, half_width)` are halved in the sweep.
    pub sweep_halvings: usize,
    pub sweep_t: f64,
    pub density_distance_tolerance: f64,
    pub width_tolerance: f64,
}

impl Default for SlitConfig {
    fn default() -> Self {
        Self {
            grid: GridConfig {
                x_min: -10.0,
                x_max: 12.0,
                n: 4401,
            },
            t_flight: 1.0,
            half_width: 0.5,
            center: 1.0,
            velocity: None,
            mass: 1.0,
            hbar: 1.0,
            t_samples: vec![0.125, 0.25, 0.375, 0.5],
            oracle_dt: 2.5e-4,
            sweep_halvings: 4,
            sweep_t: 0.5,
            density_distance_tolerance: 1e-3,
            width_tolerance: 5e-3,
        }
    }
}

impl SlitConfig {
    pub fn validate(&self) -> Vec<String> {
        let mut findings = Vec::new();
        self.grid.validate(&mut findings);
        if !(self.t_flight.is_finite() && self.t_flight > 0.0) {
            findings.push("slit.t_flight must be > 0".into());
        }
        if !(self.half_width.is_finite() && self.half_width > 0.0) {
            findings.push("slit.half_width must be > 0".into());
        }
        if !(self.mass.is_finite() && self.mass > 0.0) {
            findings.push(format!("slit.mass must be > 0, got {}", self.mass));
        }
        if !(self.hbar.is_finite() && self.hbar > 0.0) {
            findings.push("slit.hbar must be > 0".into());
        }
        if self.t_samples.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
            findings.push("slit.t_samples must all be > 0".into());
        }
        if !(self.oracle_dt.is_finite() && self.oracle_dt > 0.0) {
            findings.push("slit.oracle_dt must be > 0".into());
        }
        findings
    }

    pub fn params(&self) -> fuzzyqm_core::Result<fuzzyqm_core::slit::GaussianSlitParams> {
        let p = fuzzyqm_core::slit::GaussianSlitParams::new(
            self.t_flight,
            self.half_width,
            self.center,
            self.mass,
            self.hbar,
        )?;
        Ok(match self.velocity {
            Some(v) => p.with_velocity(v),
            None => p,
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassicalLimitConfig {
    pub grid: GridConfig,
    pub h_values: Vec<f64>,
    pub sigma: f64,
    pub momentum: f64,
    pub packet_center: f64,
    pub potential: PotentialConfig,
    pub dt: f64,
    pub steps: usize,
    pub weight_floor: f64,
    pub linearity_tolerance: f64,
}

impl Default for ClassicalLimitConfig {
    fn default() -> Self {
        Self {
            grid: GridConfig {
                x_min: -4.0,
                x_max: 6.0,
                n: 8193,
            },
            h_values: vec![1.0, 0.1, 0.01],
            sigma: 0.5,
            momentum: 1.0,
            packet_center: 0.0,
            potential: PotentialConfig::default(),
            dt: 5e-4,
            steps: 400,
            weight_floor: 1e-6,
            linearity_tolerance: 1e-10,
        }
    }
}

impl ClassicalLimitConfig {
    pub fn validate(&self) -> Vec<String> {
        let mut findings = Vec::new();
        self.grid.validate(&mut findings);
        self.potential.validate(&mut findings);
        if self.h_values.is_empty() {
            findings.push("classical_limit.h_values must not be empty".into());
        }
        if self.h_values.iter().any(|h| !(h.is_finite() && *h > 0.0)) {
            findings.push("classical_limit.h_values must be positive".into());
        }
        if self.h_values.windows(2).any(|w| w[1] >= w[0]) {
            findings.push("classical_limit.h_values must be strictly decreasing".into());
        }
        if !(self.sigma.is_finite() && self.sigma > 0.0) {
            findings.push("classical_limit.sigma must be > 0".into());
        }
        if self.steps < 2 {
            findings.push("classical_limit.steps must be >= 2".into());
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            findings.push("classical_limit.dt must be > 0".into());
        }
        findings
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EhrenfestConfig {
    pub grid: GridConfig,
    pub scales: ScalesConfig,
    pub potential: PotentialConfig,
    pub sigma: f64,
    pub packet_center: f64,
    pub k0: f64,
    pub dt: f64,
    pub steps: usize,
    pub report_every: usize,
    pub residual_tolerance: f64,
    pub route_agreement_tolerance: f64,
}

impl Default for EhrenfestConfig {
    fn default() -> Self {
        Self {
            grid: GridConfig {
                x_min: -32.0,
                x_max: 32.0,
                n: 16001,
            },
            scales: ScalesConfig::default(),
            potential: PotentialConfig {
                kind: "harmonic".into(),
                strength: 0.05,
                center: 0.0,
                intervals: Vec::new(),
            },
            sigma: 2.0,
            packet_center: 0.0,
            k0: 0.5,
            dt: 1e-3,
            steps: 1000,
            report_every: 50,
            residual_tolerance: 1e-2,
            route_agreement_tolerance: 1e-6,
        }
    }
}

impl EhrenfestConfig {
    pub fn validate(&self) -> Vec<String> {
        let mut findings = Vec::new();
        self.grid.validate(&mut findings);
        self.scales.validate(&mut findings);
        self.potential.validate(&mut findings);
        if !(self.sigma.is_finite() && self.sigma > 0.0) {
            findings.push("ehrenfest.sigma must be > 0".into());
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            findings.push("ehrenfest.dt must be > 0".into());
        }
        if self.steps == 0 {
            findings.push("ehrenfest.steps must be >= 1".into());
        }
        if self.report_every == 0 {
            findings.push("ehrenfest.report_every must be >= 1".into());
        }
        findings
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LeastActionConfig {
    pub x_start: f64,
    pub x_end: f64,
    pub t_start: f64,
    pub t_end: f64,
    pub path_steps: usize,
    pub paths: usize,
    pub amplitude: f64,
    pub mass: f64,
    pub potential: PotentialConfig,
    pub refine_iters: usize,
    pub refine_steps: Vec<f64>,
    pub deviation_tolerance: f64,
}

impl Default for LeastActionConfig {
    fn default() -> Self {
        Self {
            x_start: 0.0,
            x_end: 1.0,
            t_start: 0.0,
            t_end: 1.0,
            path_steps: 64,
            paths: 1000,
            amplitude: 0.3,
            mass: d_one(),
            potential: PotentialConfig::default(),
            refine_iters: 2500,
            refine_steps: vec![
                0.1, 0.03, 0.01, 3e-3, 1e-3, 3e-4, 1e-4, 3e-5, 1e-5, 3e-6, 1e-6,
            ],
            deviation_tolerance: 1e-3,
        }
    }
}

impl LeastActionConfig {
    pub fn validate(&self) -> Vec<String> {
        let mut findings = Vec::new();
        self.potential.validate(&mut findings);
        if !(self.mass.is_finite() && self.mass > 0.0) {
            findings.push(format!("least_action.mass must be > 0, got {}", self.mass));
        }
        if self.t_end <= self.t_start {
            findings.push("least_action needs t_end > t_start".into());
        }
        if self.path_steps < 2 {
            findings.push("least_action.path_steps must be >= 2".into());
        }
        if self.paths == 0 {
            findings.push("least_action.paths must be >= 1".into());
        }
        if self
            .refine_steps
            .iter()
            .any(|s| !(s.is_finite() && *s > 0.0))
        {
            findings.push("least_action.refine_steps must be positive".into());
        }
        findings
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SubsethoodConfig {
    pub slit: SlitConfig,
    pub sample_time: f64,
    pub bins: usize,
    pub trials: u64,
    pub p_value_floor: f64,
}

impl Default for SubsethoodConfig {
    fn default() -> Self {
        // The grid hugs the density support at the sample time (about
        // +-3.3 standard deviations) so every bin carries enough expected
        // counts for the chi-square statistic to be meaningful.
        Self {
            slit: SlitConfig {
                grid: GridConfig {
                    x_min: -0.52,
                    x_max: 3.12,
                    n: 2001,
                },
                ..SlitConfig::default()
            },
            sample_time: 0.3,
            bins: 20,
            trials: 100_000,
            p_value_floor: 0.001,
        }
    }
}

impl SubsethoodConfig {
    pub fn validate(&self) -> Vec<String> {
        let mut findings = self.slit.validate();
        if self.bins < 2 {
            findings.push("subsethood.bins must be >= 2".into());
        }
        if self.trials == 0 {
            findings.push("subsethood.trials must be >= 1".into());
        }
        if !(self.sample_time.is_finite() && self.sample_time > 0.0) {
            findings.push("subsethood.sample_time must be > 0".into());
        }
        findings
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimplexConfig {
    pub grid: GridConfig,
    pub modes: usize,
    pub sigma: f64,
    pub packet_center: f64,
    pub k0: f64,
    pub capture_floor: f64,
}

impl Default for SimplexConfig {
    fn default() -> Self {
        Self {
            grid: GridConfig {
                x_min: 0.0,
                x_max: 10.0,
                n: 2001,
            },
            modes: 50,
            sigma: 0.5,
            packet_center: 5.0,
            k0: 2.0,
            capture_floor: 0.999,
        }
    }
}

impl SimplexConfig {
    pub fn validate(&self) -> Vec<String> {
        let mut findings = Vec::new();
        self.grid.validate(&mut findings);
        if self.modes == 0 || self.modes + 1 >= self.grid.n {
            findings.push(format!(
                "simplex.modes must satisfy 1 <= modes < n - 1, got {}",
                self.modes
            ));
        }
        if !(self.sigma.is_finite() && self.sigma > 0.0) {
            findings.push("simplex.sigma must be > 0".into());
        }
        findings
    }
}

/// Top-level configuration file: a seed plus one optional section per
/// experiment. Missing fields take the experiment defaults.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub dispersion: Option<DispersionConfig>,
    pub plane_wave_check: Option<PlaneWaveCheckConfig>,
    pub slit: Option<SlitConfig>,
    pub classical_limit: Option<ClassicalLimitConfig>,
    pub ehrenfest: Option<EhrenfestConfig>,
    pub least_action: Option<LeastActionConfig>,
    pub subsethood: Option<SubsethoodConfig>,
    pub simplex: Option<SimplexConfig>,
}

impl FileConfig {
    pub fn parse(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| format!("config parse error: {e}"))
    }
}
