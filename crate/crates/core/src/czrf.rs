//! Calderón–Zygmund decomposition and the Rubio de Francia algorithm.

use serde::{Deserialize, Serialize};

use crate::error::{CzError, Result};
use crate::grid::{CellRange, DyadicInterval, GridFunction, UniformGrid1D};
use crate::maximal::hl_maximal;
use crate::sup::IntervalMode;
use crate::weights::Weight;

/// One bad part `h_j = (f − f_{Q_j})χ_{Q_j}`, stored on its cube only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BadPart {
    pub cube: DyadicInterval,
    pub start: usize,
    pub values: Vec<f64>,
}

impl BadPart {
    pub fn cells(&self) -> CellRange {
        CellRange::new(self.start, self.start + self.values.len())
    }

    pub fn to_grid_function(&self, grid: UniformGrid1D) -> GridFunction {
        let mut v = vec![0.0; grid.len()];
        v[self.cells().as_range()].copy_from_slice(&self.values);
        GridFunction::new(grid, v).expect("bad parts are finite")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CzDecomposition {
    pub lambda: f64,
    /// maximal dyadic intervals with `avg |f| > λ`, left to right
    pub cubes: Vec<DyadicInterval>,
    pub good: GridFunction,
    pub bad: Vec<BadPart>,
    /// cells of `Ω = ∪ Q_j`
    pub omega: Vec<bool>,
}

impl CzDecomposition {
    /// `g + Σ h_j`
    pub fn reconstruct(&self) -> GridFunction {
        let mut v = self.good.values().to_vec();
        for b in &self.bad {
            for (x, h) in v[b.cells().as_range()].iter_mut().zip(&b.values) {
                *x += h;
            }
        }
        GridFunction::new(*self.good.grid(), v).expect("finite parts")
    }
}

/// Stopping-time decomposition of `f` at height `λ`.
pub fn cz_decompose(f: &GridFunction, lambda: f64) -> Result<CzDecomposition> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(CzError::Domain(format!("height must be positive, got {lambda}")));
    }
    let grid = *f.grid();
    let abs: Vec<f64> = f.values().iter().map(|v| v.abs()).collect();
    let root_avg = abs.iter().sum::<f64>() / abs.len() as f64;
    if root_avg > lambda {
        return Err(CzError::Precondition(format!("average of |f| over the domain is {root_avg}, above the height {lambda}")));
    }
    let mut cubes = Vec::new();
    let mut stack = vec![grid.root()];
    while let Some(q) = stack.pop() {
        if q.is_leaf(&grid) {
            continue;
        }
        let (l, r) = q.children();
        // right first so cubes come out left to right
        for c in [r, l] {
            let cells = c.cells(&grid)?;
            let avg = abs[cells.as_range()].iter().sum::<f64>() / cells.len() as f64;
            if avg > lambda {
                cubes.push(c);
            } else {
                stack.push(c);
            }
        }
    }
    cubes.sort_by_key(|c| c.cells(&grid).map(|r| r.start).unwrap_or(0));

    let mut good = f.values().to_vec();
    let mut omega = vec![false; grid.len()];
    let mut bad = Vec::with_capacity(cubes.len());
    for &c in &cubes {
        let cells = c.cells(&grid)?;
        let mean = f.values()[cells.as_range()].iter().sum::<f64>() / cells.len() as f64;
        let values = f.values()[cells.as_range()].iter().map(|v| v - mean).collect();
        good[cells.as_range()].iter_mut().for_each(|g| *g = mean);
        omega[cells.as_range()].iter_mut().for_each(|o| *o = true);
        bad.push(BadPart { cube: c, start: cells.start, values });
    }
    Ok(CzDecomposition { lambda, cubes, good: GridFunction::new(grid, good)?, bad, omega })
}

/// `S(h) = M(h v^{1/p}) / v^{1/p}`.
pub fn rdf_s(h: &GridFunction, v: &Weight, p: f64, mode: IntervalMode) -> Result<GridFunction> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(CzError::Domain(format!("Rubio de Francia needs 1 < p < ∞, got {p}")));
    }
    let root = v.values().map(|x| x.powf(1.0 / p))?;
    hl_maximal(&h.mul(&root)?, mode).div(&root)
}

/// Iterations of the power method estimating `‖S‖_{L^p(v)}`.
pub const POWER_ITERATIONS: usize = 20;

/// Relative change between the last two power-method ratios that counts as stable.
pub const POWER_STABILITY: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RdfDiagnostics {
    /// `min (Rh − h)`, nonnegative when `Rh ≥ h`
    pub domination_margin: f64,
    /// `‖Rh‖_{L^p(v)} / ‖h‖_{L^p(v)}` (0 for `h = 0`)
    pub norm_ratio: f64,
    /// `max S(Rh) / (2B·Rh)`
    pub a1_ratio: f64,
    /// `[Rh·v^{1/p}]_{A_1}` over grid intervals (1 for `h = 0`)
    pub a1_constant: f64,
}

impl RdfDiagnostics {
    pub fn domination(&self) -> bool {
        self.domination_margin >= 0.0
    }

    pub fn norm_bound(&self) -> bool {
        self.norm_ratio <= 2.0
    }

    pub fn a1_bound(&self) -> bool {
        self.a1_ratio <= 1.0 + 1e-12
    }
}

#[derive(Debug, Clone)]
pub struct RdfResult {
    pub v: Weight,
    pub p: f64,
    /// operator norm surrogate `safety × estimate`
    pub b: f64,
    /// power-method estimate of `‖S‖_{L^p(v)}`
    pub estimate: f64,
    pub terms: usize,
    pub rh: GridFunction,
    /// `max 2^{-K} S^K h / B^K`
    pub tail_bound: f64,
    pub diagnostics: RdfDiagnostics,
}

/// Power method for `‖S‖_{L^p(v)}` started at `h` (or at `1` when `h = 0`).
pub fn estimate_s_norm(h: &GridFunction, v: &Weight, p: f64, mode: IntervalMode) -> Result<f64> {
    let start = if h.max_abs() == 0.0 { GridFunction::constant(*h.grid(), 1.0)? } else { h.abs() };
    let norm = |g: &GridFunction| g.lp_norm(p, Some(v.values()));
    let mut x = start.scale(1.0 / norm(&start))?;
    let mut ratios = Vec::with_capacity(POWER_ITERATIONS);
    for _ in 0..POWER_ITERATIONS {
        let y = rdf_s(&x, v, p, mode)?;
        let r = norm(&y);
        ratios.push(r);
        x = y.scale(1.0 / r)?;
    }
    let (last, prev) = (ratios[POWER_ITERATIONS - 1], ratios[POWER_ITERATIONS - 2]);
    if (last - prev).abs() > POWER_STABILITY * last {
        return Err(CzError::Estimation(format!(
            "power method for the S norm did not stabilize: last ratios {prev} and {last}"
        )));
    }
    Ok(ratios.into_iter().fold(1.0, f64::max))
}

/// Builds `Rh` with `B = safety × estimate`.
pub fn rdf_build(h: &GridFunction, v: &Weight, p: f64, terms: usize, safety: f64, mode: IntervalMode) -> Result<RdfResult> {
    if !(safety >= 1.0 && safety.is_finite()) {
        return Err(CzError::Config(format!("safety factor must be >= 1, got {safety}")));
    }
    let estimate = estimate_s_norm(h, v, p, mode)?;
    rdf_build_with_norm(h, v, p, terms, safety * estimate, estimate, mode)
}

/// Builds `Rh = Σ_{k<K} 2^{-k} S^k h / B^k + c·v^{-1/p}`.
///
/// The last term is replaced by a multiple of `v^{-1/p}`, a fixed point of
/// `S`, large enough to absorb `2^{-(K-1)} S^K h / B^{K-1}`; this makes
/// `S(Rh) ≤ 2B·Rh` hold by construction.
pub fn rdf_build_with_norm(
    h: &GridFunction,
    v: &Weight,
    p: f64,
    terms: usize,
    b: f64,
    estimate: f64,
    mode: IntervalMode,
) -> Result<RdfResult> {
    if terms == 0 {
        return Err(CzError::Config("the series needs at least one term".into()));
    }
    if !(b >= 1.0 && b.is_finite()) {
        return Err(CzError::Config(format!("operator norm surrogate must be >= 1, got {b}")));
    }
    if h.values().iter().any(|x| *x < 0.0) {
        return Err(CzError::Domain("Rubio de Francia input must be nonnegative".into()));
    }
    let root = v.values().map(|x| x.powf(1.0 / p))?;
    let mut sum = h.clone();
    let mut term = h.clone();
    let mut coef = 1.0;
    for _ in 1..terms {
        term = rdf_s(&term, v, p, mode)?;
        coef /= 2.0 * b;
        sum = sum.add(&term.scale(coef)?)?;
    }
    let last = rdf_s(&term, v, p, mode)?;
    let tail = last.scale(coef / (2.0 * b))?;
    let absorb = last.mul(&root)?.max_abs() * coef / (2.0 * b - 1.0);
    let rh = sum.add(&root.map(|r| absorb / r)?)?;

    let domination_margin = rh.sub(h)?.values().iter().cloned().fold(f64::INFINITY, f64::min);
    let hn = h.lp_norm(p, Some(v.values()));
    let norm_ratio = if hn == 0.0 { 0.0 } else { rh.lp_norm(p, Some(v.values())) / hn };
    let s_rh = rdf_s(&rh, v, p, mode)?;
    let a1_ratio = s_rh
        .values()
        .iter()
        .zip(rh.values())
        .map(|(s, r)| if *r == 0.0 { if *s == 0.0 { 0.0 } else { f64::INFINITY } } else { s / (2.0 * b * r) })
        .fold(0.0, f64::max);
    let product = rh.mul(&root)?;
    let a1_constant = if product.max_abs() == 0.0 { 1.0 } else { Weight::new(product)?.a1() };
    Ok(RdfResult {
        v: v.clone(),
        p,
        b,
        estimate,
        terms,
        rh,
        tail_bound: tail.max_abs(),
        diagnostics: RdfDiagnostics { domination_margin, norm_ratio, a1_ratio, a1_constant },
    })
}
