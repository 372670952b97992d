use super::config::{ExperimentConfig, ExperimentKind};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

/// Version of the check vocabulary below.
pub const VOCABULARY_VERSION: u32 = 1;

/// Every check identifier a report may contain.
pub const VOCABULARY: &[(&str, &str)] = &[
    ("AC-01", "zero density of cos within 2% of 2/π, T_max = 200"),
    ("AC-02", "rigid side: mse strictly decreasing along the schedule, final mse < 0.1·Var(target)"),
    ("AC-03", "non-rigid side: |mse - Var| / Var < 1e-6 with observations outside B(0, 2.1)"),
    ("AC-04", "gap polynomial ≤ 1/2 and e_{kn} ≤ 4^{-n} S(𝕋) for n = 1..5"),
    ("AC-05", "comb discretization: atom sum vs Monte Carlo within 5%"),
    ("AC-06", "exact period and zero propagation failures on every seed"),
    ("AC-07", "Szegő classifier on the three reference densities"),
    ("AC-08", "e_n(fS) ≤ c·e_n(S) + 1e-12 for n ≤ 20"),
    ("AC-09", "Plancherel: cell variance under Lebesgue equals the cell volume within 1e-6"),
    ("AC-10", "patch polynomial within 4ε + 1e-3 on 2000 sample points of S"),
    ("AC-11", "minor-cone witness exists iff the cone contains no line"),
    ("AC-12", "half-space e_n on s₁ ⊗ s̃ plateaus at ≥ 0.9 of the factor floor"),
    ("X-DQ-01", "discretized comb mass matches Σ p(1-p)"),
    ("X-DQ-02", "discretized comb is exactly interpolable from every orthant"),
    ("X-PER-01", "white noise is not reported periodic"),
    ("X-JEN-01", "zero densities of sinc and ball transforms within 3% of 2/π"),
    ("X-CONE-01", "an antipodal pair always blocks the witness"),
    ("X-TO-01", "product density dominated by its factors"),
    ("X-TO-02", "atomic corridor measure strongly interpolable in all orthants"),
];

pub fn describe(id: &str) -> &'static str {
    VOCABULARY.iter().find(|(k, _)| *k == id).map(|(_, v)| *v).unwrap_or("unregistered check")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub id: String,
    pub description: String,
    pub passed: bool,
    pub measured: serde_json::Value,
    pub tolerance: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    /// Runtime budget in seconds, when the criterion has one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub runtime_budget_s: Option<f64>,
    /// Measured runtime; kept out of the written report so files stay reproducible.
    #[serde(skip)]
    pub runtime_s: f64,
}

impl Check {
    pub fn new(id: &str, value_ok: bool, measured: serde_json::Value, tolerance: impl Into<String>) -> Self {
        Check {
            id: id.into(),
            description: describe(id).into(),
            passed: value_ok,
            measured,
            tolerance: tolerance.into(),
            detail: None,
            runtime_budget_s: None,
            runtime_s: 0.0,
        }
    }

    /// Fails the check if `runtime_s` exceeds `budget`.
    pub fn timed(mut self, runtime_s: f64, budget: Option<f64>) -> Self {
        self.runtime_s = runtime_s;
        self.runtime_budget_s = budget;
        if let Some(b) = budget {
            if runtime_s > b {
                self.passed = false;
                self.detail = Some(format!("runtime {runtime_s:.2}s over budget {b}s"));
            }
        }
        self
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        let d = detail.into();
        self.detail = Some(match self.detail.take() {
            Some(prev) => format!("{d}; {prev}"),
            None => d,
        });
        self
    }

    /// One line: `AC-01 PASS measured=... tolerance=...`.
    pub fn summary_line(&self) -> String {
        let mut s = format!(
            "{} {} {} | measured {} | tolerance {} | {:.2}s",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.description,
            self.measured,
            self.tolerance,
            self.runtime_s
        );
        if let Some(d) = &self.detail {
            s.push_str(&format!(" | {d}"));
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    pub unit: String,
}

/// A data file to be written next to the report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "format", rename_all = "snake_case")]
pub enum PlotData {
    Csv { file: String, description: String, columns: Vec<Column>, rows: Vec<Vec<String>> },
    Json { file: String, description: String, value: serde_json::Value },
}

impl PlotData {
    pub fn csv(file: &str, description: &str, columns: &[(&str, &str)], rows: Vec<Vec<String>>) -> Self {
        PlotData::Csv {
            file: file.into(),
            description: description.into(),
            columns: columns.iter().map(|(n, u)| Column { name: (*n).into(), unit: (*u).into() }).collect(),
            rows,
        }
    }

    pub fn json(file: &str, description: &str, value: serde_json::Value) -> Self {
        PlotData::Json { file: file.into(), description: description.into(), value }
    }

    pub fn file(&self) -> &str {
        match self {
            PlotData::Csv { file, .. } | PlotData::Json { file, .. } => file,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub vocabulary_version: u32,
    pub experiment: ExperimentKind,
    pub config: ExperimentConfig,
    pub checks: Vec<Check>,
    /// Experiment-specific measured values.
    pub summary: serde_json::Value,
    /// File names relative to the run directory.
    pub artifacts: Vec<String>,
    #[serde(skip)]
    pub wall_clock_s: f64,
    #[serde(skip)]
    pub plots: Vec<PlotData>,
}

impl ExperimentReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, id: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.id == id)
    }

    /// Process exit status: 0 when every check passes, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }
}

/// Number format used in every CSV.
pub fn num(v: f64) -> String {
    format!("{v:e}")
}

/// Writes every plot file and `manifest.json` into `dir`; returns the written paths.
pub fn emit_plot_data(report: &ExperimentReport, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let mut manifest_files = Vec::new();
    for plot in &report.plots {
        let path = dir.join(plot.file());
        match plot {
            PlotData::Csv { file, description, columns, rows } => {
                let mut w = csv::Writer::from_path(&path).map_err(io)?;
                w.write_record(columns.iter().map(|c| c.name.as_str())).map_err(io)?;
                for r in rows {
                    if r.len() != columns.len() {
                        return Err(Error::Io(format!("{file}: row has {} fields, expected {}", r.len(), columns.len())));
                    }
                    w.write_record(r).map_err(io)?;
                }
                w.flush()?;
                manifest_files.push(serde_json::json!({"file": file, "format": "csv", "description": description, "columns": columns, "rows": rows.len()}));
            }
            PlotData::Json { file, description, value } => {
                std::fs::write(&path, to_pretty(value)?)?;
                manifest_files.push(serde_json::json!({"file": file, "format": "json", "description": description}));
            }
        }
        written.push(path);
    }
    let manifest = serde_json::json!({
        "experiment": report.experiment,
        "vocabulary_version": report.vocabulary_version,
        "seed": report.config.seed,
        "files": manifest_files,
    });
    let path = dir.join("manifest.json");
    std::fs::write(&path, to_pretty(&manifest)?)?;
    written.push(path);
    Ok(written)
}

pub fn to_pretty<T: Serialize>(v: &T) -> Result<String> {
    serde_json::to_string_pretty(v).map(|s| s + "\n").map_err(|e| Error::Io(e.to_string()))
}

fn io(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vocabulary_covers_every_experiment() {
        for kind in ExperimentKind::ALL {
            for id in kind.checks() {
                assert_ne!(describe(id), "unregistered check", "{id}");
            }
        }
        for i in 1..=12 {
            let id = format!("AC-{i:02}");
            let owners = ExperimentKind::ALL.iter().filter(|k| k.checks().contains(&id.as_str())).count();
            assert_eq!(owners, 1, "{id}");
        }
    }

    #[test]
    fn runtime_budget_fails_a_check() {
        let c = Check::new("AC-01", true, serde_json::json!(1.0), "x").timed(2.0, Some(1.0));
        assert!(!c.passed);
        assert!(c.summary_line().starts_with("AC-01 FAIL"));
        let c = Check::new("AC-01", true, serde_json::json!(1.0), "x").timed(0.5, Some(1.0));
        assert!(c.passed);
    }
}
