//! Experiment configuration and its materialization on a grid.

use std::path::Path;

use cz_core::grid::CellRange;
use cz_core::orlicz::default_osc_stride;
use cz_core::singular::{make_symbol, SymbolKind, SymbolSet};
use cz_core::weights::{make_weight, Weight, WeightKind};
use cz_core::{GridFunction, IntervalMode, UniformGrid1D};
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

/// Inequality checked by a `verify` run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Theorem {
    Strong,
    Endpoint,
    Corollary,
    TwoWeight,
    Sharp,
    MaximalLemmas,
}

impl Theorem {
    pub fn label(&self) -> &'static str {
        match self {
            Theorem::Strong => "strong",
            Theorem::Endpoint => "endpoint",
            Theorem::Corollary => "corollary",
            Theorem::TwoWeight => "two-weight",
            Theorem::Sharp => "sharp",
            Theorem::MaximalLemmas => "maximal-lemmas",
        }
    }
}

impl std::str::FromStr for Theorem {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        serde_json::from_value(serde_json::Value::String(s.to_string())).map_err(|_| {
            format!("unknown theorem {s:?} (expected strong, endpoint, corollary, two-weight, sharp or maximal-lemmas)")
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub a: f64,
    pub b: f64,
    /// `n = 2^levels`
    pub levels: u32,
}

impl GridSpec {
    pub fn build(&self) -> Result<UniformGrid1D> {
        Ok(UniformGrid1D::with_levels(self.a, self.b, self.levels)?)
    }
}

/// Input functions `f`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum InputKind {
    /// `χ_{[lo, hi)}` on cell midpoints
    Indicator { lo: f64, hi: f64 },
    /// `(1 − ((x − center)/radius)²)²` inside the radius
    Bump { center: f64, radius: f64 },
    Constant { value: f64 },
    Zero,
}

impl InputKind {
    pub fn build(&self, grid: UniformGrid1D) -> Result<GridFunction> {
        Ok(match self {
            InputKind::Indicator { lo, hi } => GridFunction::indicator(grid, *lo, *hi),
            InputKind::Bump { center, radius } => {
                if !(*radius > 0.0) {
                    return Err(HarnessError::Config(format!("bump radius must be positive, got {radius}")));
                }
                GridFunction::from_fn(grid, |x| {
                    let u = (x - center) / radius;
                    if u.abs() < 1.0 {
                        (1.0 - u * u).powi(2)
                    } else {
                        0.0
                    }
                })?
            }
            InputKind::Constant { value } => GridFunction::constant(grid, *value)?,
            InputKind::Zero => GridFunction::zeros(grid),
        })
    }

    pub fn label(&self) -> String {
        match self {
            InputKind::Indicator { lo, hi } => format!("indicator[{lo},{hi})"),
            InputKind::Bump { center, radius } => format!("bump({center},{radius})"),
            InputKind::Constant { value } => format!("constant({value})"),
            InputKind::Zero => "zero".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymbolSpec {
    pub symbol: SymbolKind,
    /// exponent `s_i ≥ 1` of the `Osc_{exp L^{s_i}}` class
    pub s: f64,
}

/// Additional inputs and weights for corpus-style runs.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Corpus {
    #[serde(default)]
    pub inputs: Vec<InputKind>,
    #[serde(default)]
    pub weights: Vec<WeightKind>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub grid: GridSpec,
    pub input: InputKind,
    /// multiplies the input
    #[serde(default = "one")]
    pub input_scale: f64,
    #[serde(default)]
    pub symbols: Vec<SymbolSpec>,
    pub weight: WeightKind,
    pub theorem: Theorem,
    #[serde(default)]
    pub p_list: Vec<f64>,
    #[serde(default)]
    pub delta_list: Vec<f64>,
    #[serde(default)]
    pub eps_list: Vec<f64>,
    #[serde(default)]
    pub lambda_list: Vec<f64>,
    /// Orlicz exponents `s` for two-weight runs; empty means the symbols' `s`
    #[serde(default)]
    pub s_list: Vec<f64>,
    /// interval family; absent means all intervals up to 2¹⁰ cells, dyadic above
    #[serde(default)]
    pub mode: Option<IntervalMode>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output: Option<String>,
    /// slack on fitted blowup slopes
    #[serde(default = "default_slope_tolerance")]
    pub slope_tolerance: f64,
    /// interval endpoint stride for symbol seminorms; absent means n/256
    #[serde(default)]
    pub osc_stride: Option<usize>,
    /// grid levels visited by a resolution sweep
    #[serde(default)]
    pub resolution_levels: Vec<u32>,
    #[serde(default)]
    pub corpus: Corpus,
}

fn one() -> f64 {
    1.0
}

fn default_slope_tolerance() -> f64 {
    0.3
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn mode(&self) -> IntervalMode {
        self.mode.unwrap_or_else(|| IntervalMode::default_for(1usize << self.grid.levels))
    }

    /// `k`, the number of symbols.
    pub fn k(&self) -> usize {
        self.symbols.len()
    }

    /// `1/s = Σ 1/s_i` (zero without symbols).
    pub fn inv_s(&self) -> f64 {
        self.symbols.iter().map(|s| 1.0 / s.s).sum()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(HarnessError::Config(msg));
        if self.grid.levels == 0 || self.grid.levels > 20 {
            return bad(format!("grid levels must be in 1..=20, got {}", self.grid.levels));
        }
        if !(self.input_scale > 0.0 && self.input_scale.is_finite()) {
            return bad(format!("input_scale must be positive, got {}", self.input_scale));
        }
        if let Some(l) = self.lambda_list.iter().find(|l| !(**l > 0.0 && l.is_finite())) {
            return bad(format!("every lambda must be positive, got {l}"));
        }
        if let Some(d) = self.delta_list.iter().find(|d| !(**d > 0.0 && **d < 1.0)) {
            return bad(format!("every delta must lie in (0, 1), got {d}"));
        }
        if let Some(e) = self.eps_list.iter().find(|e| !(**e > 0.0 && **e < 1.0)) {
            return bad(format!("every epsilon must lie in (0, 1), got {e}"));
        }
        if let Some(p) = self.p_list.iter().find(|p| !(**p > 1.0 && p.is_finite())) {
            return bad(format!("every p must exceed 1, got {p}"));
        }
        if let Some(s) = self.s_list.iter().find(|s| !(**s >= 1.0 && s.is_finite())) {
            return bad(format!("every s must be at least 1, got {s}"));
        }
        if let Some(s) = self.symbols.iter().find(|s| !(s.s >= 1.0 && s.s.is_finite())) {
            return bad(format!("symbol exponents must be at least 1, got {}", s.s));
        }
        if self.symbols.len() > 8 {
            return bad(format!("at most 8 symbols, got {}", self.symbols.len()));
        }
        if !(self.slope_tolerance >= 0.0) {
            return bad(format!("slope_tolerance must be nonnegative, got {}", self.slope_tolerance));
        }
        Ok(())
    }
}

/// A configuration materialized on its grid.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub cfg: ExperimentConfig,
    pub grid: UniformGrid1D,
    pub f: GridFunction,
    pub symbols: SymbolSet,
    pub weight: Weight,
    pub mode: IntervalMode,
}

impl Experiment {
    pub fn from_config(cfg: &ExperimentConfig) -> Result<Self> {
        cfg.validate()?;
        let grid = cfg.grid.build()?;
        let f = cfg.input.build(grid)?.scale(cfg.input_scale)?;
        let stride = cfg.osc_stride.unwrap_or_else(|| default_osc_stride(grid.len()));
        let bs = cfg.symbols.iter().map(|s| make_symbol(&s.symbol, grid)).collect::<cz_core::Result<Vec<_>>>()?;
        let symbols = SymbolSet::with_stride(bs, cfg.symbols.iter().map(|s| s.s).collect(), stride)?;
        let weight = make_weight(&cfg.weight, grid)?;
        Ok(Self { cfg: cfg.clone(), grid, f, symbols, weight, mode: cfg.mode() })
    }

    /// Replaces the input function, keeping everything else.
    pub fn with_input(&self, f: GridFunction) -> Result<Self> {
        if !f.grid().same_as(&self.grid) {
            return Err(HarnessError::Config("replacement input lives on another grid".into()));
        }
        Ok(Self { f, ..self.clone() })
    }

    /// Replaces the symbols, keeping everything else.
    pub fn with_symbols(&self, symbols: SymbolSet) -> Self {
        Self { symbols, ..self.clone() }
    }

    /// Smallest run of cells containing the support of `f` (`None` for `f = 0`).
    pub fn support(&self) -> Option<CellRange> {
        support_of(&self.f)
    }

    /// Errors unless the support keeps a quarter of the domain length away
    /// from both ends.
    pub fn check_margin(&self) -> Result<()> {
        let Some(r) = self.support() else { return Ok(()) };
        let margin = 0.25 * self.grid.length();
        let h = self.grid.h();
        let lo = self.grid.a() + r.start as f64 * h;
        let hi = self.grid.a() + r.end as f64 * h;
        let tol = 1e-9 * self.grid.length();
        if lo - self.grid.a() < margin - tol || self.grid.b() - hi < margin - tol {
            return Err(HarnessError::Margin(format!(
                "support [{lo}, {hi}] of f is closer than {margin} to the ends of [{}, {}]",
                self.grid.a(),
                self.grid.b()
            )));
        }
        Ok(())
    }
}

pub fn support_of(f: &GridFunction) -> Option<CellRange> {
    let v = f.values();
    let first = v.iter().position(|x| *x != 0.0)?;
    let last = v.iter().rposition(|x| *x != 0.0)?;
    Some(CellRange::new(first, last + 1))
}
