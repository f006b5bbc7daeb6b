//! Luxemburg norms on intervals and the operators built from them.
//!
//! `‖f‖_{Φ,Q} = inf{λ > 0 : avg_Q Φ(|f|/λ) ≤ 1}` is computed by a
//! safeguarded Newton iteration on `ln λ` inside a bracket that always
//! encloses the root: `λ_hi = max_Q|f| / Φ⁻¹(1)` makes the average at most
//! one, and for convex `Φ` Jensen gives `λ_lo = avg_Q|f| / Φ⁻¹(1)`. Bisection
//! takes over whenever a Newton step leaves the bracket.

use crate::error::{CzError, Result};
use crate::grid::{CellRange, GridFunction};
use crate::sup::{fold_row, sup_containing, IntervalMode};
use crate::young::{check_inverse_condition, YoungFamily, YoungSpec};

/// Default relative tolerance on `λ`.
pub const DEFAULT_NORM_TOL: f64 = 1e-10;

/// Ratio between consecutive value buckets in the pruned maximal operator.
const BUCKET_RATIO: f64 = 1.05;

/// Bracket width in `ln λ` below which the solver stops regardless.
const U_FLOOR: f64 = 1e-14;

/// Luxemburg norm solver for one Young function.
#[derive(Debug, Clone, Copy)]
pub struct Luxemburg {
    spec: YoungSpec,
    /// `Φ⁻¹(1)`
    unit: f64,
    tol: f64,
}

impl Luxemburg {
    pub fn new(spec: YoungSpec, tol: f64) -> Result<Self> {
        if !(tol > 0.0 && tol < 1.0) {
            return Err(CzError::Config(format!("norm tolerance must lie in (0, 1), got {tol}")));
        }
        let unit = match spec.family {
            YoungFamily::PhiRho | YoungFamily::Power | YoungFamily::Identity => 1.0,
            YoungFamily::XRho | YoungFamily::XTildeRho => 1.0,
            YoungFamily::PsiS => 2f64.ln().powf(1.0 / spec.param),
        };
        Ok(Self { spec, unit, tol })
    }

    pub fn spec(&self) -> &YoungSpec {
        &self.spec
    }

    /// Norm of the nonnegative samples `abs` (all cells of equal size).
    pub fn norm(&self, abs: &[f64]) -> f64 {
        self.norm_warm(abs, None)
    }

    pub fn norm_warm(&self, abs: &[f64], warm: Option<f64>) -> f64 {
        let m = abs.len() as f64;
        if abs.is_empty() {
            return 0.0;
        }
        match self.spec.family {
            YoungFamily::Identity => return abs.iter().sum::<f64>() / m,
            YoungFamily::Power => {
                let r = self.spec.param;
                return (abs.iter().map(|a| a.powf(r)).sum::<f64>() / m).powf(1.0 / r);
            }
            _ => {}
        }
        let (mut max, mut sum) = (0.0_f64, 0.0);
        for &a in abs {
            max = max.max(a);
            sum += a;
        }
        if max == 0.0 {
            return 0.0;
        }
        let eval = |u: f64| {
            let scale = (-u).exp();
            let (mut s, mut d) = (0.0, 0.0);
            for &a in abs {
                if a > 0.0 {
                    let t = a * scale;
                    let (v, dv) = self.spec.value_and_log_slope(t, a.ln() - u);
                    s += v;
                    d += dv;
                }
            }
            (s, d)
        };
        self.solve(m, max, sum / m, None, warm, eval)
    }

    /// Norm of a multiset given as `(value, ln value, multiplicity)` buckets.
    fn norm_buckets(&self, reps: &[f64], logs: &[f64], counts: &[u32], active: &[usize], m: f64, max: f64, mean: f64, warm: Option<f64>) -> f64 {
        let eval = |u: f64| {
            let scale = (-u).exp();
            let (mut s, mut d) = (0.0, 0.0);
            for &k in active {
                let c = counts[k] as f64;
                let (v, dv) = self.spec.value_and_log_slope(reps[k] * scale, logs[k] - u);
                s += c * v;
                d += c * dv;
            }
            (s, d)
        };
        self.solve(m, max, mean, None, warm, eval)
    }

    /// Root of `ln(S(u)/m) = 0` where `eval(u) = (Σ Φ(t_i), Σ t_i Φ'(t_i))` at
    /// `t_i = a_i e^{-u}`. `bracket` overrides the default `λ` bracket.
    fn solve(
        &self,
        m: f64,
        max: f64,
        mean: f64,
        bracket: Option<(f64, f64)>,
        warm: Option<f64>,
        mut eval: impl FnMut(f64) -> (f64, f64),
    ) -> f64 {
        let (lo, hi) = match bracket {
            Some(b) => b,
            None => {
                let hi = max / self.unit * (1.0 + 1e-9);
                let lo = if self.spec.is_young() {
                    mean / self.unit * (1.0 - 1e-9)
                } else {
                    let mut lo = hi;
                    for _ in 0..2000 {
                        lo *= 0.5;
                        let (s, _) = eval(lo.ln());
                        if !(s / m <= 1.0) {
                            break;
                        }
                    }
                    lo
                };
                (lo, hi)
            }
        };
        let (mut u_lo, mut u_hi) = (lo.ln(), hi.ln());
        // stop once the average at λ_hi is within [1 − tol, 1]
        let target = (-self.tol).ln_1p();
        let mut g_hi = f64::NEG_INFINITY;
        let mut u = match warm {
            Some(w) if w > 0.0 && w.ln() > u_lo && w.ln() < u_hi => w.ln(),
            _ => 0.5 * (u_lo + u_hi),
        };
        for _ in 0..400 {
            if g_hi >= target || u_hi - u_lo <= U_FLOOR {
                break;
            }
            let (s, d) = eval(u);
            let g = (s / m).ln();
            if !g.is_finite() || g > 0.0 {
                u_lo = u;
            } else {
                u_hi = u;
                g_hi = g;
            }
            let mut next = 0.5 * (u_lo + u_hi);
            if g.is_finite() && d.is_finite() && d > 0.0 {
                let inv_slope = s / d;
                let cand = u + g * inv_slope;
                // aim slightly past the root so the bracket closes from above
                let aim = cand - 0.5 * target * inv_slope;
                if aim > u_lo && aim < u_hi {
                    next = aim;
                }
            }
            u = next;
        }
        u_hi.exp()
    }
}

/// Absolute values of `f` on `q`.
fn abs_on(f: &GridFunction, q: CellRange) -> Vec<f64> {
    f.values()[q.as_range()].iter().map(|v| v.abs()).collect()
}

fn check_range(f: &GridFunction, q: CellRange) -> Result<()> {
    if q.is_empty() || q.end > f.len() {
        return Err(CzError::Domain(format!("interval {}..{} not inside a grid of {} cells", q.start, q.end, f.len())));
    }
    Ok(())
}

/// `‖f‖_{Φ,Q}`.
pub fn luxemburg_norm(f: &GridFunction, q: CellRange, spec: &YoungSpec, tol: f64) -> Result<f64> {
    check_range(f, q)?;
    Ok(Luxemburg::new(*spec, tol)?.norm(&abs_on(f, q)))
}

/// `inf_{μ>0} { μ + μ · avg_Q Φ(|f|/μ) }` by golden-section search in `ln μ`.
///
/// The objective is convex in `μ`, and its minimum lies in
/// `(0, 2‖f‖_{Φ,Q}]`; the search covers `[10⁻⁹‖f‖, 2‖f‖]`, and the value at
/// `μ = ‖f‖` is always a candidate.
pub fn luxemburg_norm_primed(f: &GridFunction, q: CellRange, spec: &YoungSpec, tol: f64) -> Result<f64> {
    check_range(f, q)?;
    let abs = abs_on(f, q);
    let norm = Luxemburg::new(*spec, tol)?.norm(&abs);
    if norm == 0.0 {
        return Ok(0.0);
    }
    let m = abs.len() as f64;
    let objective = |mu: f64| {
        let avg: f64 = abs.iter().map(|&a| spec.value(a / mu)).sum::<f64>() / m;
        mu + mu * avg
    };
    let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = ((norm * 1e-9).ln(), (2.0 * norm).ln());
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (objective(c.exp()), objective(d.exp()));
    let mut best = objective(norm).min(fc).min(fd);
    while b - a > tol.max(1e-14) {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = objective(c.exp());
            best = best.min(fc);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = objective(d.exp());
            best = best.min(fd);
        }
    }
    Ok(best)
}

/// `(‖Π f_i‖_{Φ_0,Q}, k κ Π ‖f_i‖_{Φ_i,Q})`.
///
/// Errors when `Π Φ_i⁻¹ ≤ κ Φ_0⁻¹` fails on the spot-check grid.
pub fn generalized_holder(
    fs: &[&GridFunction],
    specs: &[YoungSpec],
    phi0: &YoungSpec,
    kappa: f64,
    q: CellRange,
    tol: f64,
) -> Result<(f64, f64)> {
    if fs.is_empty() || fs.len() != specs.len() {
        return Err(CzError::Config(format!("{} functions for {} Young functions", fs.len(), specs.len())));
    }
    check_inverse_condition(phi0, specs, kappa)?;
    let grid = *fs[0].grid();
    let mut prod = GridFunction::constant(grid, 1.0)?;
    let mut rhs = fs.len() as f64 * kappa;
    for (f, spec) in fs.iter().zip(specs) {
        prod = prod.mul(f)?;
        rhs *= luxemburg_norm(f, q, spec, tol)?;
    }
    let lhs = luxemburg_norm(&prod, q, phi0, tol)?;
    Ok((lhs, rhs))
}

/// Default stride for [`osc_expls_norm`]: about 256 interval endpoints.
pub fn default_osc_stride(n: usize) -> usize {
    (n / 256).max(1)
}

/// `sup_Q ‖b − b_Q‖_{Ψ_s,Q}` over intervals whose endpoints lie on multiples
/// of `stride` cells; `stride = 1` is every grid-aligned interval.
pub fn osc_expls_norm(b: &GridFunction, s: f64, stride: usize) -> Result<f64> {
    if !(s >= 1.0 && s.is_finite()) {
        return Err(CzError::Domain(format!("Osc exp L^s needs s >= 1, got {s}")));
    }
    if stride == 0 || stride > b.len() {
        return Err(CzError::Config(format!("stride must be in 1..={}, got {stride}", b.len())));
    }
    let lux = Luxemburg::new(YoungSpec::psi(s)?, DEFAULT_NORM_TOL)?;
    let vals = b.values();
    let n = vals.len();
    let mut prefix = vec![0.0; n + 1];
    for i in 0..n {
        prefix[i + 1] = prefix[i] + vals[i];
    }
    let mut best = 0.0_f64;
    let mut buf = Vec::with_capacity(n);
    let mut start = 0;
    while start < n {
        let mut warm = None;
        let mut end = (start + stride).min(n);
        loop {
            if end - start >= 2 {
                let mean = (prefix[end] - prefix[start]) / (end - start) as f64;
                buf.clear();
                buf.extend(vals[start..end].iter().map(|v| (v - mean).abs()));
                let nv = lux.norm_warm(&buf, warm);
                warm = (nv > 0.0).then_some(nv);
                best = best.max(nv);
            }
            if end == n {
                break;
            }
            end = (end + stride).min(n);
        }
        start += stride;
    }
    Ok(best)
}

/// `M_Φ f(x) = sup_{Q ∋ x} ‖f‖_{Φ,Q}`.
pub fn orlicz_maximal(f: &GridFunction, spec: &YoungSpec, mode: IntervalMode) -> Result<GridFunction> {
    let vals = orlicz_maximal_window(f, spec, mode, f.grid().full_range(), DEFAULT_NORM_TOL)?;
    GridFunction::new(*f.grid(), vals)
}

/// [`orlicz_maximal`] evaluated only on the cells of `window`; the result has
/// `window.len()` entries.
///
/// All intervals meeting the window are still taken into account, so the
/// values coincide with the full operator restricted to the window.
pub fn orlicz_maximal_window(
    f: &GridFunction,
    spec: &YoungSpec,
    mode: IntervalMode,
    window: CellRange,
    tol: f64,
) -> Result<Vec<f64>> {
    let n = f.len();
    if window.is_empty() || window.end > n {
        return Err(CzError::Domain(format!("window {}..{} outside grid of {n} cells", window.start, window.end)));
    }
    let lux = Luxemburg::new(*spec, tol)?;
    let abs: Vec<f64> = f.values().iter().map(|v| v.abs()).collect();
    let out = match (spec.family, mode) {
        (YoungFamily::Identity, _) | (YoungFamily::Power, _) => {
            let r = if spec.family == YoungFamily::Power { spec.param } else { 1.0 };
            let powed: Vec<f64> = abs.iter().map(|a| a.powf(r)).collect();
            let prefix = crate::grid::PrefixSums::new(&powed);
            let m = sup_containing(n, mode, window, |q| prefix.mean(q.start, q.end));
            m.into_iter().map(|v| v.max(0.0).powf(1.0 / r)).collect::<Vec<_>>()
        }
        (_, IntervalMode::Dyadic) => sup_containing(n, mode, window, |q| lux.norm(&abs[q.as_range()])),
        (_, IntervalMode::AllIntervals) if spec.is_young() => pruned_all_intervals(&lux, &abs, window),
        (_, IntervalMode::AllIntervals) => {
            let mut warm = None;
            sup_containing(n, mode, window, |q| {
                if q.len() == 1 {
                    warm = None;
                }
                let v = lux.norm_warm(&abs[q.as_range()], warm);
                warm = (v > 0.0).then_some(v);
                v
            })
        }
    };
    Ok(out[window.as_range()].iter().map(|v| v.max(0.0)).collect())
}

/// All-intervals Orlicz maximal function with certified pruning.
///
/// Values are snapped down to a geometric bucket grid of ratio `r`; the norm
/// of the snapped data `L(Q)` satisfies `L(Q) ≤ ‖f‖_{Φ,Q} ≤ r·L(Q)` and costs
/// `O(#buckets)` per interval. With `LB(x) = max_{Q∋x} L(Q)`, an interval
/// can only realize the supremum at some cell if `r·L(Q) ≥ min_{y∈Q} LB(y)`;
/// only those intervals get an exact norm.
fn pruned_all_intervals(lux: &Luxemburg, abs: &[f64], window: CellRange) -> Vec<f64> {
    let n = abs.len();
    let mut out = vec![f64::NEG_INFINITY; n];
    let amax = abs.iter().cloned().fold(0.0, f64::max);
    if amax == 0.0 {
        out.iter_mut().for_each(|v| *v = 0.0);
        return out;
    }
    let amin = abs.iter().cloned().filter(|&a| a > 0.0).fold(f64::INFINITY, f64::min);
    let ln_r = BUCKET_RATIO.ln();
    let nb = ((amax / amin).ln() / ln_r).floor() as usize + 1;
    let reps: Vec<f64> = (0..=nb).map(|k| amin * BUCKET_RATIO.powi(k as i32)).collect();
    let logs: Vec<f64> = reps.iter().map(|r| r.ln()).collect();
    let bucket: Vec<usize> = abs
        .iter()
        .map(|&a| {
            if a <= 0.0 {
                return usize::MAX;
            }
            let mut k = (((a / amin).ln() / ln_r).floor().max(0.0) as usize).min(nb - 1);
            while k > 0 && reps[k] > a {
                k -= 1;
            }
            while k + 1 < nb && reps[k + 1] <= a {
                k += 1;
            }
            k
        })
        .collect();

    // phase 1: bucket lower bounds for every interval meeting the window
    let width = n;
    let mut lower = vec![0f32; width * width];
    let mut lb = vec![f64::NEG_INFINITY; n];
    let mut row = vec![f64::NEG_INFINITY; n];
    let mut counts = vec![0u32; nb];
    let mut active: Vec<usize> = Vec::with_capacity(nb);
    for start in 0..window.end {
        counts.iter_mut().for_each(|c| *c = 0);
        active.clear();
        let (mut max, mut sum) = (0.0_f64, 0.0);
        let mut warm = None;
        for last in start..n {
            let k = bucket[last];
            if k != usize::MAX {
                if counts[k] == 0 {
                    active.push(k);
                }
                counts[k] += 1;
                max = max.max(reps[k]);
                sum += reps[k];
            }
            if last < window.start {
                continue;
            }
            let m = (last - start + 1) as f64;
            let v = if max == 0.0 {
                0.0
            } else {
                lux.norm_buckets(&reps, &logs, &counts, &active, m, max, sum / m, warm)
            };
            warm = (v > 0.0).then_some(v);
            lower[start * width + last] = v as f32;
            row[last] = v * (1.0 - 1e-6);
        }
        fold_row(&mut lb, &row, start, window);
    }

    // phase 2: exact norms for the intervals that can still matter
    for start in 0..window.end {
        let first_last = start.max(window.start);
        let mut run_min = f64::INFINITY;
        let mut warm = None;
        for last in first_last..n {
            if last < window.end {
                run_min = run_min.min(lb[last]);
            }
            let low = lower[start * width + last] as f64;
            let upper = BUCKET_RATIO * low * (1.0 + 1e-6);
            if upper < run_min {
                row[last] = f64::NEG_INFINITY;
                continue;
            }
            let slice = &abs[start..=last];
            let v = if low == 0.0 {
                lux.norm_warm(slice, warm)
            } else {
                let m = slice.len() as f64;
                let eval = |u: f64| {
                    let scale = (-u).exp();
                    let (mut s, mut d) = (0.0, 0.0);
                    for &a in slice {
                        if a > 0.0 {
                            let (v, dv) = lux.spec.value_and_log_slope(a * scale, a.ln() - u);
                            s += v;
                            d += dv;
                        }
                    }
                    (s, d)
                };
                let bracket = (low * (1.0 - 1e-6), upper);
                lux.solve(m, 0.0, 0.0, Some(bracket), warm.or(Some(low * BUCKET_RATIO.sqrt())), eval)
            };
            warm = (v > 0.0).then_some(v);
            row[last] = v;
        }
        fold_row(&mut out, &row, start, window);
    }
    out
}
