//! The discrete Hilbert transform and its (multi-)symbol commutators.
//!
//! `Hf(x_i) = (1/π) Σ_{j≠i} f_j/(i−j)`, the midpoint rule for the principal
//! value with the diagonal cell dropped (the mesh size cancels). Sums run
//! over the distance `d = |i − j|` with the two neighbours at distance `d`
//! paired, so constants cancel exactly in the interior and reflection
//! symmetry holds bit for bit.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{CzError, Result};
use crate::grid::{GridFunction, UniformGrid1D};
use crate::orlicz::{default_osc_stride, osc_expls_norm};

/// `(1/π) Σ_{d≥1} (g(i−d) − g(i+d))/d`, out-of-range terms omitted.
fn kernel_sum(n: usize, i: usize, mut g: impl FnMut(usize) -> f64) -> f64 {
    let mut acc = 0.0;
    for d in 1..n {
        if d > i && i + d >= n {
            break;
        }
        let left = if d <= i { g(i - d) } else { 0.0 };
        let right = if i + d < n { g(i + d) } else { 0.0 };
        acc += (left - right) / d as f64;
    }
    acc / PI
}

fn same_grid(a: &GridFunction, b: &GridFunction) -> Result<()> {
    if a.grid() != b.grid() {
        return Err(CzError::GridMismatch("symbol and function live on different grids".into()));
    }
    Ok(())
}

/// `Hf` at every cell.
pub fn hilbert(f: &GridFunction) -> GridFunction {
    let v = f.values();
    let n = v.len();
    let out = (0..n).map(|i| kernel_sum(n, i, |j| v[j])).collect();
    GridFunction::new(*f.grid(), out).expect("finite input gives finite transform")
}

/// `Hf` at cell `i` only.
pub fn hilbert_at(f: &GridFunction, i: usize) -> f64 {
    let v = f.values();
    kernel_sum(v.len(), i, |j| v[j])
}

/// `[b, H]f(x_i) = (1/π) Σ_{j≠i} (b_i − b_j) f_j/(i−j)`.
///
/// The kernel form vanishes identically for constant `b`; it agrees with
/// [`commutator_split`] up to rounding.
pub fn commutator(b: &GridFunction, f: &GridFunction) -> Result<GridFunction> {
    multilinear_commutator(&[b], f)
}

/// `b·Hf − H(bf)`.
pub fn commutator_split(b: &GridFunction, f: &GridFunction) -> Result<GridFunction> {
    same_grid(b, f)?;
    b.mul(&hilbert(f))?.sub(&hilbert(&b.mul(f)?))
}

/// `T_{\vec b} f(x_i) = (1/π) Σ_{j≠i} Π_l (b_l(i) − b_l(j)) f_j/(i−j)`.
pub fn multilinear_commutator(bs: &[&GridFunction], f: &GridFunction) -> Result<GridFunction> {
    for b in bs {
        same_grid(b, f)?;
    }
    let n = f.len();
    let out = (0..n).map(|i| multilinear_at(bs, f, i)).collect();
    GridFunction::new(*f.grid(), out)
}

/// [`multilinear_commutator`] at cell `i` only.
pub fn multilinear_at(bs: &[&GridFunction], f: &GridFunction, i: usize) -> f64 {
    let v = f.values();
    let n = v.len();
    kernel_sum(n, i, |j| {
        let mut prod = v[j];
        for b in bs {
            let bv = b.values();
            prod *= bv[i] - bv[j];
        }
        prod
    })
}

/// Outcome of [`expand_commutator_identity`].
#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionReport {
    /// `max_x |T_{\vec b}f(x) − expansion(x)|`
    pub max_residual: f64,
    /// largest sum of absolute values of the expansion terms at a sample
    pub scale: f64,
    /// coefficient of `T(Π(b_i − λ_i) f)`
    pub c_full: i64,
    /// `(subset bitmask, coefficient)` for nonempty proper subsets
    pub c_subsets: Vec<(u32, i64)>,
}

/// Coefficients of the rewritten middle sum: `c_k` multiplies
/// `T((b−λ)_{all} f)` and `c_τ` multiplies `T_τ((b−λ)_{τᶜ} f)`.
///
/// Each `σ` with `1 ≤ #σ ≤ k−1` contributes `(−1)^{k−#σ}` to `c_k` and to
/// every nonempty `τ ⊆ σ`.
pub fn expansion_coefficients(k: usize) -> (i64, Vec<(u32, i64)>) {
    let full: u32 = (1u32 << k) - 1;
    let sign = |size: u32| if (k as u32 - size).is_multiple_of(2) { 1 } else { -1 };
    let mut c_full = sign(0);
    let mut c = vec![0i64; 1 << k];
    for sigma in 1..full {
        let s = sign(sigma.count_ones());
        c_full += s;
        let mut tau = sigma;
        while tau > 0 {
            c[tau as usize] += s;
            tau = (tau - 1) & sigma;
        }
    }
    (c_full, (1..full).map(|t| (t, c[t as usize])).collect())
}

/// Evaluates both sides of
/// `T_{\vec b}f = Π(b_i(x)−λ_i)·Tf + c_k T(Π(b_i−λ_i) f) + Σ_τ c_τ T_τ((b−λ)_{τᶜ} f)`
/// at the sample cells.
pub fn expand_commutator_identity(
    bs: &[&GridFunction],
    lambdas: &[f64],
    f: &GridFunction,
    samples: &[usize],
) -> Result<ExpansionReport> {
    let k = bs.len();
    if k < 2 {
        return Err(CzError::Config(format!("expansion needs at least two symbols, got {k}")));
    }
    if k > 16 {
        return Err(CzError::Config(format!("at most 16 symbols supported, got {k}")));
    }
    if lambdas.len() != k {
        return Err(CzError::Config(format!("{} constants for {k} symbols", lambdas.len())));
    }
    for b in bs {
        same_grid(b, f)?;
    }
    if let Some(i) = samples.iter().find(|&&i| i >= f.len()) {
        return Err(CzError::Domain(format!("sample cell {i} outside grid of {} cells", f.len())));
    }
    let shifted: Vec<GridFunction> = bs
        .iter()
        .zip(lambdas)
        .map(|(b, l)| b.map(|v| v - l))
        .collect::<Result<_>>()?;
    let (c_full, c_subsets) = expansion_coefficients(k);
    // (b − λ)_{mask} f
    let weighted = |mask: u32| -> Result<GridFunction> {
        let mut g = f.clone();
        for (l, s) in shifted.iter().enumerate() {
            if mask & (1 << l) != 0 {
                g = g.mul(s)?;
            }
        }
        Ok(g)
    };
    let full: u32 = (1u32 << k) - 1;
    let all_weighted = weighted(full)?;
    let mut parts = Vec::with_capacity(c_subsets.len());
    for &(tau, c) in &c_subsets {
        let syms: Vec<&GridFunction> = (0..k).filter(|l| tau & (1 << l) != 0).map(|l| bs[l]).collect();
        parts.push((syms, weighted(full & !tau)?, c));
    }

    let mut report = ExpansionReport { max_residual: 0.0, scale: 0.0, c_full, c_subsets: c_subsets.clone() };
    for &i in samples {
        let lhs = multilinear_at(bs, f, i);
        let prod: f64 = shifted.iter().map(|s| s.values()[i]).product();
        let mut terms = vec![prod * hilbert_at(f, i), c_full as f64 * hilbert_at(&all_weighted, i)];
        for (syms, g, c) in &parts {
            if *c != 0 {
                terms.push(*c as f64 * multilinear_at(syms, g, i));
            }
        }
        let rhs: f64 = terms.iter().sum();
        let scale = lhs.abs() + terms.iter().map(|t| t.abs()).sum::<f64>();
        report.max_residual = report.max_residual.max((lhs - rhs).abs());
        report.scale = report.scale.max(scale);
    }
    Ok(report)
}

/// Symbol families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SymbolKind {
    Constant { value: f64 },
    /// `ln|x|`, evaluated at midpoints and floored at `|x| = h/2`
    Log,
    /// `|ln|x||^{1/s}`
    AbslogPower { s: f64 },
    /// `χ_{x > 0}`
    StepBmo,
    /// `Σ a_m ln|x − c_m|` with four seeded `a_m ∈ [−1, 1]`, `c_m` in the domain
    RandomBmo { seed: u64 },
}

impl SymbolKind {
    pub fn label(&self) -> String {
        match self {
            SymbolKind::Constant { value } => format!("constant({value})"),
            SymbolKind::Log => "log".into(),
            SymbolKind::AbslogPower { s } => format!("abslog-power({s})"),
            SymbolKind::StepBmo => "step-bmo".into(),
            SymbolKind::RandomBmo { seed } => format!("random-bmo({seed})"),
        }
    }
}

pub fn make_symbol(kind: &SymbolKind, grid: UniformGrid1D) -> Result<GridFunction> {
    let floor = 0.5 * grid.h();
    let reg_ln = move |x: f64| x.abs().max(floor).ln();
    match kind {
        SymbolKind::Constant { value } => GridFunction::constant(grid, *value),
        SymbolKind::Log => GridFunction::from_fn(grid, reg_ln),
        SymbolKind::AbslogPower { s } => {
            if !(*s >= 1.0 && s.is_finite()) {
                return Err(CzError::Domain(format!("abslog power needs s >= 1, got {s}")));
            }
            GridFunction::from_fn(grid, |x| reg_ln(x).abs().powf(1.0 / s))
        }
        SymbolKind::StepBmo => GridFunction::from_fn(grid, |x| if x > 0.0 { 1.0 } else { 0.0 }),
        SymbolKind::RandomBmo { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let terms: Vec<(f64, f64)> =
                (0..4).map(|_| (rng.gen_range(-1.0..=1.0), rng.gen_range(grid.a()..grid.b()))).collect();
            GridFunction::from_fn(grid, |x| terms.iter().map(|(a, c)| a * reg_ln(x - c)).sum())
        }
    }
}

/// Symbols `b_1, …, b_k` with their exponents and measured seminorms.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolSet {
    symbols: Vec<GridFunction>,
    s_params: Vec<f64>,
    seminorms: Vec<f64>,
}

impl SymbolSet {
    /// Measures `‖b_i‖_{Osc_{exp L^{s_i}}}` with the default stride.
    pub fn new(symbols: Vec<GridFunction>, s_params: Vec<f64>) -> Result<Self> {
        let stride = symbols.first().map(|b| default_osc_stride(b.len())).unwrap_or(1);
        Self::with_stride(symbols, s_params, stride)
    }

    pub fn with_stride(symbols: Vec<GridFunction>, s_params: Vec<f64>, stride: usize) -> Result<Self> {
        if symbols.len() != s_params.len() {
            return Err(CzError::Config(format!("{} symbols for {} exponents", symbols.len(), s_params.len())));
        }
        if let Some(s) = s_params.iter().find(|s| !(**s >= 1.0 && s.is_finite())) {
            return Err(CzError::Domain(format!("symbol exponents must be >= 1, got {s}")));
        }
        if let Some(b) = symbols.iter().find(|b| b.grid() != symbols[0].grid()) {
            return Err(CzError::GridMismatch(format!("symbol on a grid of {} cells differs from the first", b.len())));
        }
        let seminorms = symbols.iter().zip(&s_params).map(|(b, s)| osc_expls_norm(b, *s, stride)).collect::<Result<_>>()?;
        Ok(Self { symbols, s_params, seminorms })
    }

    /// Uses precomputed seminorms.
    pub fn with_seminorms(symbols: Vec<GridFunction>, s_params: Vec<f64>, seminorms: Vec<f64>) -> Result<Self> {
        if symbols.len() != s_params.len() || symbols.len() != seminorms.len() {
            return Err(CzError::Config("symbols, exponents and seminorms differ in length".into()));
        }
        Ok(Self { symbols, s_params, seminorms })
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[GridFunction] {
        &self.symbols
    }

    pub fn refs(&self) -> Vec<&GridFunction> {
        self.symbols.iter().collect()
    }

    pub fn s_params(&self) -> &[f64] {
        &self.s_params
    }

    pub fn seminorms(&self) -> &[f64] {
        &self.seminorms
    }

    /// `s` with `1/s = Σ 1/s_i` (infinite for the empty set).
    pub fn s(&self) -> f64 {
        1.0 / self.s_params.iter().map(|s| 1.0 / s).sum::<f64>()
    }

    /// `‖\vec b‖ = Π ‖b_i‖`.
    pub fn norm(&self) -> f64 {
        self.seminorms.iter().product()
    }

    /// `‖\vec σ‖` for the subset given by `mask`.
    pub fn subset_norm(&self, mask: u32) -> f64 {
        self.seminorms.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, v)| v).product()
    }

    /// Symbols in the subset given by `mask`.
    pub fn subset(&self, mask: u32) -> Vec<&GridFunction> {
        self.symbols.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, b)| b).collect()
    }
}
