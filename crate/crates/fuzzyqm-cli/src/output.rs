//! Artifact writing: CSV tables with provenance headers, the resolved config
//! echo, and machine/plain-text summaries.
//!
//! Every artifact records the tool version, a hash of the resolved config,
//! and the seed, so a run can be reproduced from its outputs alone. CSV and
//! TOML carry those as `#` comment lines; JSON (which has no comments) holds
//! them as leading fields.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// FNV-1a 64-bit hash of the resolved configuration text.
pub fn config_hash(resolved_toml: &str) -> String {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in resolved_toml.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    format!("{h:016x}")
}

/// Uniform float formatting for CSV cells; fixed width keeps artifacts
/// byte-stable across runs.
pub fn fnum(x: f64) -> String {
    format!("{x:.12e}")
}

pub struct ArtifactWriter {
    dir: PathBuf,
    hash: String,
    seed: u64,
    written: Vec<String>,
}

impl ArtifactWriter {
    pub fn new(dir: &Path, resolved_toml: &str, seed: u64) -> std::io::Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            hash: config_hash(resolved_toml),
            seed,
            written: Vec::new(),
        })
    }

    fn provenance_comment(&self) -> String {
        format!(
            "# fuzzyqm {TOOL_VERSION}\n# config_hash {}\n# seed {}\n",
            self.hash, self.seed
        )
    }

    /// Write a CSV table: provenance comments, one header row, data rows.
    pub fn write_csv(
        &mut self,
        name: &str,
        header: &str,
        rows: &[Vec<String>],
    ) -> std::io::Result<()> {
        let mut out = String::new();
        out.push_str(&self.provenance_comment());
        out.push_str(header);
        out.push('\n');
        for row in rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        fs::write(self.dir.join(name), out)?;
        self.written.push(name.to_string());
        Ok(())
    }

    /// Echo the resolved configuration next to the results.
    pub fn write_config(&mut self, resolved_toml: &str) -> std::io::Result<()> {
        let mut out = String::new();
        out.push_str(&self.provenance_comment());
        out.push_str(resolved_toml);
        fs::write(self.dir.join("config.toml"), out)?;
        self.written.push("config.toml".to_string());
        Ok(())
    }

    pub fn write_summary(&mut self, experiment: &str, checks: &[Check]) -> std::io::Result<bool> {
        let pass = checks.iter().all(|c| c.pass);
        let summary = Summary {
            tool: "fuzzyqm",
            version: TOOL_VERSION,
            config_hash: self.hash.clone(),
            seed: self.seed,
            experiment: experiment.to_string(),
            pass,
            checks: checks.to_vec(),
            artifacts: self.written.clone(),
        };
        let json = serde_json::to_string_pretty(&summary).expect("summary serializes");
        fs::write(self.dir.join("summary.json"), json)?;

        let mut txt = Vec::new();
        write!(txt, "{}", self.provenance_comment())?;
        writeln!(txt, "# experiment {experiment}")?;
        for c in checks {
            writeln!(
                txt,
                "{} {} value={} threshold={}",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                fnum(c.value),
                fnum(c.threshold),
            )?;
        }
        writeln!(txt, "RESULT {}", if pass { "PASS" } else { "FAIL" })?;
        fs::write(self.dir.join("summary.txt"), txt)?;
        Ok(pass)
    }
}

/// One named numeric check of an experiment run.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl Check {
    /// Passes when `value` is strictly below `threshold`.
    pub fn below(name: &str, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            value,
            threshold,
            pass: value < threshold,
        }
    }

    /// Passes when `value` is at or above `threshold`.
    pub fn at_least(name: &str, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            value,
            threshold,
            pass: value >= threshold,
        }
    }

    /// Boolean condition reported as 1.0 / 0.0 against a 0.5 threshold.
    pub fn holds(name: &str, ok: bool) -> Self {
        Self {
            name: name.into(),
            value: if ok { 1.0 } else { 0.0 },
            threshold: 0.5,
            pass: ok,
        }
    }
}

#[derive(Debug, Serialize)]
struct Summary {
    tool: &'static str,
    version: &'static str,
    config_hash: String,
    seed: u64,
    experiment: String,
    pass: bool,
    checks: Vec<Check>,
    artifacts: Vec<String>,
}
