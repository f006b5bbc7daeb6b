//! Regression baselines pinned from reference runs of the manifest configs.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};
use crate::report::VerificationReport;

/// Directory of the versioned experiment manifest.
pub fn manifest_dir() -> PathBuf {
    PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/manifest"))
}

pub fn baseline_dir() -> PathBuf {
    PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/baselines"))
}

/// Loads `<manifest>/<name>.json`.
pub fn manifest_config(name: &str) -> Result<ExperimentConfig> {
    ExperimentConfig::load(&manifest_dir().join(format!("{name}.json")))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Baseline {
    /// manifest entry the value was produced from
    pub config: String,
    /// `max` or `group:<name>`
    pub quantity: String,
    pub value: f64,
    pub rel_tol: f64,
    /// same quantity from the run one level finer
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fine_value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineCheck {
    pub expected: f64,
    pub measured: f64,
    pub rel_err: f64,
    pub holds: bool,
}

/// Reads `max` or `group:<name>` off a report.
pub fn quantity(report: &VerificationReport, q: &str) -> Option<f64> {
    match q.strip_prefix("group:") {
        Some(g) => report.aggregate.max_by_group.get(g).copied(),
        None if q == "max" => Some(report.aggregate.max_implied_constant),
        None => None,
    }
}

impl Baseline {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))?;
        Ok(serde_json::from_str(&text)?)
    }

    /// Loads `<baselines>/<name>.json`.
    pub fn named(name: &str) -> Result<Self> {
        Self::load(&baseline_dir().join(format!("{name}.json")))
    }

    pub fn pin(config: &str, quantity_name: &str, report: &VerificationReport, rel_tol: f64) -> Result<Self> {
        let value = quantity(report, quantity_name)
            .ok_or_else(|| HarnessError::Config(format!("report has no quantity {quantity_name:?}")))?;
        Ok(Self { config: config.to_string(), quantity: quantity_name.to_string(), value, rel_tol, fine_value: None })
    }

    pub fn with_fine(mut self, fine: &VerificationReport) -> Result<Self> {
        self.fine_value = Some(
            quantity(fine, &self.quantity)
                .ok_or_else(|| HarnessError::Config(format!("report has no quantity {:?}", self.quantity)))?,
        );
        Ok(self)
    }

    /// Relative gap between the pinned value and the finer run.
    pub fn resolution_gap(&self) -> Option<f64> {
        self.fine_value.map(|f| (f - self.value).abs() / self.value.abs().max(f64::MIN_POSITIVE))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("baseline serializes");
        s.push('\n');
        s
    }

    pub fn check(&self, report: &VerificationReport) -> Result<BaselineCheck> {
        let measured = quantity(report, &self.quantity)
            .ok_or_else(|| HarnessError::Config(format!("report has no quantity {:?}", self.quantity)))?;
        let rel_err = (measured - self.value).abs() / self.value.abs().max(f64::MIN_POSITIVE);
        Ok(BaselineCheck { expected: self.value, measured, rel_err, holds: rel_err <= self.rel_tol })
    }
}
