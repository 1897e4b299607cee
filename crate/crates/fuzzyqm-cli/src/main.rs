//! `fuzzyqm`: command-line driver for the numerical experiments.
//!
//! Exit codes: 0 on success, 1 on numeric failure (a computation error or a
//! failed check), 2 on usage or validation errors.

mod config;
mod output;
mod runner;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::FileConfig;
use runner::RunError;

#[derive(Parser)]
#[command(
    name = "fuzzyqm",
    version,
    about = "Numerical experiments bridging least-action mechanics, wave evolution and membership measures"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// TOML configuration file; missing fields take experiment defaults
    #[arg(long)]
    config: Option<PathBuf>,
    /// Seed for the pseudo-random generator, recorded in every artifact
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (default: out/<experiment>)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Fit plane-wave frequencies from evolution and compare with theory
    Dispersion {
        #[command(flatten)]
        common: CommonArgs,
        /// Comma-separated wavenumbers to test
        #[arg(long, value_delimiter = ',')]
        k_list: Option<Vec<f64>>,
        /// Number of grid nodes
        #[arg(long)]
        grid_n: Option<usize>,
    },
    /// Residuals of single plane waves and a two-wave superposition
    PlaneWaveCheck {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        grid_n: Option<usize>,
    },
    /// Gaussian-slit density profiles, oracle comparison, and narrow-slit sweep
    Slit {
        #[command(flatten)]
        common: CommonArgs,
        /// Slit half-width
        #[arg(long)]
        half_width: Option<f64>,
        #[arg(long)]
        grid_n: Option<usize>,
    },
    /// Sweep the dimensionless ratio toward zero and watch residuals shrink
    ClassicalLimit {
        #[command(flatten)]
        common: CommonArgs,
        /// Comma-separated decreasing h values
        #[arg(long, value_delimiter = ',')]
        h: Option<Vec<f64>>,
        #[arg(long)]
        steps: Option<usize>,
    },
    /// Three-term defuzzified balance along an evolved packet
    Ehrenfest {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        grid_n: Option<usize>,
    },
    /// Minimal action over a seeded path ensemble plus descent refinement
    LeastAction {
        #[command(flatten)]
        common: CommonArgs,
        /// Ensemble size
        #[arg(long)]
        paths: Option<usize>,
    },
    /// Categorical detection counts against interval degrees of a density
    Subsethood {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        bins: Option<usize>,
        #[arg(long)]
        trials: Option<u64>,
    },
    /// Eigenbasis decomposition of a packet as a simplex point
    Simplex {
        #[command(flatten)]
        common: CommonArgs,
        /// Number of box modes
        #[arg(long)]
        modes: Option<usize>,
    },
}

fn load_file(common: &CommonArgs) -> Result<FileConfig, RunError> {
    match &common.config {
        None => Ok(FileConfig::default()),
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                RunError::Validation(vec![format!("cannot read {}: {e}", path.display())])
            })?;
            FileConfig::parse(&text).map_err(|e| RunError::Validation(vec![e]))
        }
    }
}

fn out_dir(common: &CommonArgs, experiment: &str) -> PathBuf {
    common
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from("out").join(experiment))
}

fn dispatch(command: Command) -> Result<bool, RunError> {
    match command {
        Command::Dispersion {
            common,
            k_list,
            grid_n,
        } => {
            let file = load_file(&common)?;
            let mut cfg = file.dispersion.unwrap_or_default();
            if let Some(ks) = k_list {
                cfg.k_list = ks;
            }
            if let Some(n) = grid_n {
                cfg.grid.n = n;
            }
            let seed = common.seed.or(file.seed).unwrap_or(0);
            runner::run_dispersion(&cfg, seed, &out_dir(&common, "dispersion"))
        }
        Command::PlaneWaveCheck { common, grid_n } => {
            let file = load_file(&common)?;
            let mut cfg = file.plane_wave_check.unwrap_or_default();
            if let Some(n) = grid_n {
                cfg.grid.n = n;
            }
            let seed = common.seed.or(file.seed).unwrap_or(0);
            runner::run_plane_wave_check(&cfg, seed, &out_dir(&common, "plane-wave-check"))
        }
        Command::Slit {
            common,
            half_width,
            grid_n,
        } => {
            let file = load_file(&common)?;
            let mut cfg = file.slit.unwrap_or_default();
            if let Some(b) = half_width {
                cfg.half_width = b;
            }
            if let Some(n) = grid_n {
                cfg.grid.n = n;
            }
            let seed = common.seed.or(file.seed).unwrap_or(0);
            runner::run_slit(&cfg, seed, &out_dir(&common, "slit"))
        }
        Command::ClassicalLimit { common, h, steps } => {
            let file = load_file(&common)?;
            let mut cfg = file.classical_limit.unwrap_or_default();
            if let Some(h) = h {
                cfg.h_values = h;
            }
            if let Some(s) = steps {
                cfg.steps = s;
            }
            let seed = common.seed.or(file.seed).unwrap_or(0);
            runner::run_classical_limit(&cfg, seed, &out_dir(&common, "classical-limit"))
        }
        Command::Ehrenfest {
            common,
            steps,
            grid_n,
        } => {
            let file = load_file(&common)?;
            let mut cfg = file.ehrenfest.unwrap_or_default();
            if let Some(s) = steps {
                cfg.steps = s;
            }
            if let Some(n) = grid_n {
                cfg.grid.n = n;
            }
            let seed = common.seed.or(file.seed).unwrap_or(0);
            runner::run_ehrenfest(&cfg, seed, &out_dir(&common, "ehrenfest"))
        }
        Command::LeastAction { common, paths } => {
            let file = load_file(&common)?;
            let mut cfg = file.least_action.unwrap_or_default();
            if let Some(p) = paths {
                cfg.paths = p;
            }
            let seed = common.seed.or(file.seed).unwrap_or(0);
            runner::run_least_action(&cfg, seed, &out_dir(&common, "least-action"))
        }
        Command::Subsethood {
            common,
            bins,
            trials,
        } => {
            let file = load_file(&common)?;
            let mut cfg = file.subsethood.unwrap_or_default();
            if let Some(b) = bins {
                cfg.bins = b;
            }
            if let Some(t) = trials {
                cfg.trials = t;
            }
            let seed = common.seed.or(file.seed).unwrap_or(0);
            runner::run_subsethood(&cfg, seed, &out_dir(&common, "subsethood"))
        }
        Command::Simplex { common, modes } => {
            let file = load_file(&common)?;
            let mut cfg = file.simplex.unwrap_or_default();
            if let Some(m) = modes {
                cfg.modes = m;
            }
            let seed = common.seed.or(file.seed).unwrap_or(0);
            runner::run_simplex(&cfg, seed, &out_dir(&common, "simplex"))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("one or more checks failed; see summary.txt");
            ExitCode::from(1)
        }
        Err(RunError::Validation(findings)) => {
            eprintln!("configuration rejected:");
            for f in &findings {
                eprintln!("  - {f}");
            }
            ExitCode::from(2)
        }
        Err(RunError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
