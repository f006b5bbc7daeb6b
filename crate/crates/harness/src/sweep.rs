//! One-axis parameter sweeps over a configuration template.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};
use crate::report::{blowup_slope, write_points_csv, ReportPoint, SlopeFit};
use crate::verify::verify;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Axis {
    Epsilon,
    Delta,
    P,
    Resolution,
}

impl Axis {
    /// Coordinate name carried by sweep rows.
    pub fn coord(&self) -> &'static str {
        match self {
            Axis::Epsilon => "epsilon",
            Axis::Delta => "delta",
            Axis::P => "p",
            Axis::Resolution => "levels",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub axis: Axis,
    pub theorem: String,
    pub rows: Vec<ReportPoint>,
    /// one fit per series (rows equal in every coordinate but the axis)
    pub slopes: Vec<SlopeFit>,
    /// resolution sweeps: largest `max/min − 1` of the implied constant over a series
    pub drift: Option<f64>,
    pub all_hold: bool,
}

/// Coordinates that vary with the axis without identifying a series.
fn dependent(axis: Axis, name: &str) -> bool {
    name == axis.coord() || name == "x" || name == "rho"
}

fn series_key(axis: Axis, p: &ReportPoint) -> String {
    let mut key = p.group.clone();
    for (k, v) in &p.coords {
        if !dependent(axis, k) {
            key.push_str(&format!(";{k}={v}"));
        }
    }
    key
}

/// Runs the template once per value of `axis`, every other list kept whole.
pub fn sweep(template: &ExperimentConfig, axis: Axis) -> Result<SweepResult> {
    template.validate()?;
    let values: Vec<f64> = match axis {
        Axis::Epsilon => template.eps_list.clone(),
        Axis::Delta => template.delta_list.clone(),
        Axis::P => template.p_list.clone(),
        Axis::Resolution => template.resolution_levels.iter().map(|l| *l as f64).collect(),
    };
    if values.is_empty() {
        return Err(HarnessError::EmptySweep(format!("no values for axis {}", axis.coord())));
    }
    let runs = values
        .par_iter()
        .map(|&v| {
            let mut cfg = template.clone();
            match axis {
                Axis::Epsilon => cfg.eps_list = vec![v],
                Axis::Delta => cfg.delta_list = vec![v],
                Axis::P => cfg.p_list = vec![v],
                Axis::Resolution => {
                    cfg.mode = Some(template.mode());
                    cfg.grid.levels = v as u32;
                }
            }
            let report = verify(&cfg)?;
            let hold = report.all_hold;
            let rows: Vec<ReportPoint> = report
                .points
                .into_iter()
                .map(|mut p| {
                    p.coords.insert(axis.coord().to_string(), v);
                    p
                })
                .collect();
            Ok((rows, hold))
        })
        .collect::<Result<Vec<_>>>()?;
    let all_hold = runs.iter().all(|r| r.1);
    let rows: Vec<ReportPoint> = runs.into_iter().flat_map(|r| r.0).collect();

    let mut series: BTreeMap<String, Vec<&ReportPoint>> = BTreeMap::new();
    for r in rows.iter().filter(|r| !r.is_degenerate()) {
        series.entry(series_key(axis, r)).or_default().push(r);
    }
    let (slopes, drift) = match axis {
        Axis::Resolution => {
            let drift = series
                .values()
                .filter_map(|s| {
                    let (lo, hi) = s.iter().fold((f64::MAX, 0.0_f64), |(lo, hi), p| (lo.min(p.implied_constant), hi.max(p.implied_constant)));
                    (lo > 0.0 && s.len() > 1).then(|| hi / lo - 1.0)
                })
                .fold(0.0, f64::max);
            (Vec::new(), Some(drift))
        }
        _ => {
            let slopes = series.iter().filter_map(|(k, s)| blowup_slope(k, axis.coord(), s.iter().copied(), None)).collect();
            (slopes, None)
        }
    };
    Ok(SweepResult { axis, theorem: template.theorem.label().to_string(), rows, slopes, drift, all_hold })
}

impl SweepResult {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        write_points_csv(&self.rows, out)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("sweep serializes");
        s.push('\n');
        s
    }

    /// Writes `path` (CSV, or JSON for a `.json` path) plus the other format
    /// beside it.
    pub fn save(&self, path: &Path) -> Result<()> {
        let json = path.extension().is_some_and(|e| e == "json");
        let (csv_path, json_path) =
            if json { (path.with_extension("csv"), path.to_path_buf()) } else { (path.to_path_buf(), path.with_extension("json")) };
        let io = |p: &Path, e: std::io::Error| HarnessError::Io(format!("{}: {e}", p.display()));
        let file = std::fs::File::create(&csv_path).map_err(|e| io(&csv_path, e))?;
        self.write_csv(file)?;
        std::fs::write(&json_path, self.to_json()).map_err(|e| io(&json_path, e))?;
        Ok(())
    }
}
