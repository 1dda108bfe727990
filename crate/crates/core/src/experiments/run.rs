use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::diagnostics::DiagnosticsSeries;
use crate::error::Result;

/// Outcome of one experiment run. Deterministic for a fixed configuration
/// and seed.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub experiment: String,
    /// SHA-256 of the resolved configuration JSON.
    pub config_hash: String,
    pub fitted: BTreeMap<String, f64>,
    /// Checks that must hold for the fitted values to be trusted.
    pub flags: BTreeMap<String, bool>,
    pub labels: BTreeMap<String, String>,
    pub notes: Vec<String>,
    #[serde(skip)]
    pub series: DiagnosticsSeries,
}

impl RunReport {
    pub fn new(experiment: &str, config_hash: String) -> Self {
        Self { experiment: experiment.into(), config_hash, ..Self::default() }
    }

    pub fn all_flags_pass(&self) -> bool {
        self.flags.values().all(|f| *f)
    }

    pub fn fit(&mut self, key: &str, value: f64) {
        self.fitted.insert(key.into(), value);
    }

    pub fn flag(&mut self, key: &str, value: bool) {
        self.flags.insert(key.into(), value);
    }
}

/// Hex SHA-256 of the JSON form of `config`.
pub fn config_hash<T: Serialize>(config: &T) -> Result<String> {
    let json = serde_json::to_vec(config)?;
    Ok(hex::encode(Sha256::digest(&json)))
}

/// Wall-clock stamp kept out of everything but `report.json`.
#[derive(Serialize)]
struct StampedReport<'a> {
    #[serde(flatten)]
    report: &'a RunReport,
    created_unix: u64,
}

/// Writes `config.json`, `series.csv` (when the run recorded one) and
/// `report.json` into `dir`, which must already exist.
pub fn write_run_dir<T: Serialize>(dir: &Path, config: &T, report: &RunReport) -> Result<()> {
    fs::write(dir.join("config.json"), serde_json::to_string_pretty(config)? + "\n")?;
    if !report.series.rows.is_empty() {
        report.series.write_csv(&dir.join("series.csv"))?;
    }
    let created_unix =
        std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let stamped = StampedReport { report, created_unix };
    fs::write(dir.join("report.json"), serde_json::to_string_pretty(&stamped)? + "\n")?;
    Ok(())
}

/// Relative drift `max_t |q(t) - q(0)| / scale`.
pub(crate) fn relative_drift(values: &[f64], scale: f64) -> f64 {
    let q0 = values.first().copied().unwrap_or(0.0);
    values.iter().map(|q| (q - q0).abs()).fold(0.0, f64::max) / scale
}

/// Least-squares slope and intercept of `y` against `x`.
pub(crate) fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}
