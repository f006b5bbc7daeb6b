//! Verification reports: per-point records, contracts and aggregates.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportPoint {
    /// sub-inequality this point belongs to (empty when there is only one)
    pub group: String,
    pub coords: BTreeMap<String, f64>,
    pub lhs: f64,
    /// right side with the unspecified constant set to 1
    pub rhs: f64,
    /// the structural factor included in `rhs`
    pub structural: f64,
    pub implied_constant: f64,
    pub flags: Vec<String>,
}

pub const DEGENERATE: &str = "degenerate";

impl ReportPoint {
    /// Builds a point; `rhs = 0` yields ratio 0.
    pub fn new(group: &str, coords: &[(&str, f64)], lhs: f64, rhs: f64, structural: f64) -> Self {
        let implied_constant = if rhs == 0.0 { 0.0 } else { lhs / rhs };
        Self {
            group: group.to_string(),
            coords: coords.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            lhs,
            rhs,
            structural,
            implied_constant,
            flags: Vec::new(),
        }
    }

    pub fn flag(mut self, f: &str) -> Self {
        if !self.flags.iter().any(|g| g == f) {
            self.flags.push(f.to_string());
        }
        self
    }

    pub fn is_degenerate(&self) -> bool {
        self.flags.iter().any(|f| f == DEGENERATE)
    }

    /// `lhs / (rhs / structural)`: the ratio before the structural factor is
    /// divided out.
    pub fn raw_ratio(&self) -> f64 {
        if self.rhs == 0.0 {
            0.0
        } else {
            self.lhs * self.structural / self.rhs
        }
    }

    pub fn coord(&self, name: &str) -> Option<f64> {
        self.coords.get(name).copied()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Contract {
    pub name: String,
    pub holds: bool,
    pub detail: String,
}

impl Contract {
    pub fn new(name: &str, holds: bool, detail: impl Into<String>) -> Self {
        Self { name: name.to_string(), holds, detail: detail.into() }
    }
}

/// Least-squares slope of `ln(raw ratio)` against `ln(1/parameter)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub label: String,
    pub axis: String,
    pub slope: f64,
    pub bound: Option<f64>,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    /// over non-degenerate points
    pub max_implied_constant: f64,
    pub max_by_group: BTreeMap<String, f64>,
    pub slopes: Vec<SlopeFit>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMeta {
    pub theorem: String,
    pub domain: [f64; 2],
    pub n: usize,
    pub mode: String,
    pub k: usize,
    pub inv_s: f64,
    pub symbol_norm: f64,
    pub input: String,
    pub weight: String,
    pub symbols: Vec<String>,
    pub seed: u64,
    pub slope_tolerance: f64,
    pub flags: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub meta: ReportMeta,
    pub points: Vec<ReportPoint>,
    pub aggregate: Aggregate,
    pub contracts: Vec<Contract>,
    pub all_hold: bool,
}

impl VerificationReport {
    /// Sorts points by group and coordinates, fills the aggregate and the
    /// contracts every report carries.
    pub fn assemble(meta: ReportMeta, mut points: Vec<ReportPoint>, slopes: Vec<SlopeFit>, mut contracts: Vec<Contract>) -> Self {
        points.sort_by(|a, b| {
            a.group.cmp(&b.group).then_with(|| {
                a.coords
                    .iter()
                    .zip(&b.coords)
                    .map(|((ka, va), (kb, vb))| ka.cmp(kb).then(va.total_cmp(vb)))
                    .find(|o| o.is_ne())
                    .unwrap_or_else(|| a.coords.len().cmp(&b.coords.len()))
            })
        });
        let live = || points.iter().filter(|p| !p.is_degenerate());
        let max_implied_constant = live().map(|p| p.implied_constant).fold(0.0, f64::max);
        let mut max_by_group = BTreeMap::new();
        for p in live() {
            let e = max_by_group.entry(p.group.clone()).or_insert(0.0_f64);
            *e = e.max(p.implied_constant);
        }

        let bad: Vec<&ReportPoint> = live()
            .filter(|p| {
                ![p.lhs, p.rhs, p.implied_constant].iter().all(|v| v.is_finite() && *v >= 0.0)
            })
            .collect();
        let mut all = vec![Contract::new(
            "finite",
            bad.is_empty(),
            if bad.is_empty() {
                format!("{} points finite and nonnegative", live().count())
            } else {
                format!("{} points non-finite or negative, first {:?}", bad.len(), bad[0].coords)
            },
        )];
        let hom: Vec<&ReportPoint> = live().filter(|p| p.rhs == 0.0 && p.lhs != 0.0).collect();
        all.push(Contract::new(
            "homogeneity",
            hom.is_empty(),
            if hom.is_empty() {
                "rhs = 0 only with lhs = 0".to_string()
            } else {
                format!("{} points with rhs = 0 < lhs", hom.len())
            },
        ));
        for s in &slopes {
            if let Some(bound) = s.bound {
                all.push(Contract::new(
                    &format!("slope[{}]", s.label),
                    s.slope.is_finite() && s.slope <= bound,
                    format!("slope {:.4} over {} points, bound {:.4}", s.slope, s.points, bound),
                ));
            }
        }
        all.append(&mut contracts);
        let all_hold = all.iter().all(|c| c.holds);
        Self { meta, points, aggregate: Aggregate { max_implied_constant, max_by_group, slopes }, contracts: all, all_hold }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Flat CSV: group, every coordinate, lhs, rhs, implied_constant, flags.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        write_points_csv(&self.points, out)
    }

    pub fn csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("in-memory csv");
        String::from_utf8(buf).expect("csv is utf-8")
    }

    pub fn contract(&self, name: &str) -> Option<&Contract> {
        self.contracts.iter().find(|c| c.name == name)
    }

    pub fn group(&self, name: &str) -> impl Iterator<Item = &ReportPoint> {
        let name = name.to_string();
        self.points.iter().filter(move |p| p.group == name)
    }
}

/// One CSV row per point; coordinate columns are the union over points.
pub fn write_points_csv<W: Write>(points: &[ReportPoint], out: W) -> Result<()> {
    let names: BTreeSet<&String> = points.iter().flat_map(|p| p.coords.keys()).collect();
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["group".to_string()];
    header.extend(names.iter().map(|s| s.to_string()));
    header.extend(["lhs", "rhs", "implied_constant", "flags"].map(String::from));
    w.write_record(&header)?;
    for p in points {
        let mut row = vec![p.group.clone()];
        row.extend(names.iter().map(|n| p.coords.get(*n).map(|v| v.to_string()).unwrap_or_default()));
        row.push(p.lhs.to_string());
        row.push(p.rhs.to_string());
        row.push(p.implied_constant.to_string());
        row.push(p.flags.join(";"));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Least-squares slope of `y` on `x`; `None` with fewer than two distinct `x`.
pub fn ls_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len() as f64;
    if xs.len() < 2 {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    Some(sxy / sxx)
}

/// Fits `ln(raw ratio)` against `ln(1/axis)` over points with positive
/// ratios.
pub fn blowup_slope<'a>(label: &str, axis: &str, points: impl Iterator<Item = &'a ReportPoint>, bound: Option<f64>) -> Option<SlopeFit> {
    let (xs, ys): (Vec<f64>, Vec<f64>) = points
        .filter(|p| !p.is_degenerate())
        .filter_map(|p| {
            let a = p.coord(axis)?;
            let r = p.raw_ratio();
            (r > 0.0 && a > 0.0).then(|| (-(a.ln()), r.ln()))
        })
        .unzip();
    let slope = ls_slope(&xs, &ys)?;
    Some(SlopeFit { label: label.to_string(), axis: axis.to_string(), slope, bound, points: xs.len() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn meta() -> ReportMeta {
        ReportMeta {
            theorem: "strong".into(),
            domain: [-2.0, 2.0],
            n: 16,
            mode: "dyadic".into(),
            k: 1,
            inv_s: 1.0,
            symbol_norm: 1.0,
            input: "zero".into(),
            weight: "constant".into(),
            symbols: vec![],
            seed: 0,
            slope_tolerance: 0.3,
            flags: vec![],
        }
    }

    #[test]
    fn zero_rhs_gives_zero_ratio() {
        let p = ReportPoint::new("", &[("p", 2.0)], 0.0, 0.0, 3.0);
        assert_eq!(p.implied_constant, 0.0);
        let r = VerificationReport::assemble(meta(), vec![p], vec![], vec![]);
        assert!(r.all_hold);
        let bad = ReportPoint::new("", &[("p", 2.0)], 1.0, 0.0, 3.0);
        let r = VerificationReport::assemble(meta(), vec![bad], vec![], vec![]);
        assert!(!r.contract("homogeneity").unwrap().holds);
        assert!(!r.all_hold);
    }

    #[test]
    fn degenerate_points_are_excluded() {
        let p = ReportPoint::new("a", &[], 1.0, 0.0, 1.0).flag(DEGENERATE);
        let q = ReportPoint::new("a", &[], 1.0, 4.0, 1.0);
        let r = VerificationReport::assemble(meta(), vec![p, q], vec![], vec![]);
        assert!(r.all_hold);
        assert_eq!(r.aggregate.max_implied_constant, 0.25);
    }

    #[test]
    fn slope_of_power_law() {
        let pts: Vec<ReportPoint> = [0.1, 0.2, 0.4, 0.8]
            .iter()
            .map(|e: &f64| ReportPoint::new("", &[("epsilon", *e)], e.powf(-1.5), 1.0, 1.0))
            .collect();
        let fit = blowup_slope("x", "epsilon", pts.iter(), Some(2.0)).unwrap();
        assert!((fit.slope - 1.5).abs() < 1e-12);
        assert!(ls_slope(&[1.0], &[1.0]).is_none());
    }

    #[test]
    fn csv_and_json() {
        let pts = vec![
            ReportPoint::new("", &[("p", 2.0), ("delta", 0.5)], 1.0, 2.0, 1.0),
            ReportPoint::new("", &[("p", 1.5), ("delta", 0.5)], 1.0, 4.0, 1.0).flag("x"),
        ];
        let r = VerificationReport::assemble(meta(), pts, vec![], vec![]);
        assert_eq!(r.points[0].coord("p"), Some(1.5));
        let csv = r.csv_string();
        assert_eq!(csv.lines().next().unwrap(), "group,delta,p,lhs,rhs,implied_constant,flags");
        assert_eq!(csv.lines().nth(1).unwrap(), ",0.5,1.5,1,4,0.25,x");
        assert_eq!(VerificationReport::from_json(&r.to_json()).unwrap(), r);
    }
}
