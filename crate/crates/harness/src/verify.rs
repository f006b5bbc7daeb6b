//! Both sides of each inequality, evaluated on a materialized experiment.

use std::collections::BTreeMap;

use cz_core::grid::CellRange;
use cz_core::maximal::{hl_maximal, power_maximal, sharp_power};
use cz_core::orlicz::{orlicz_maximal, orlicz_maximal_window, DEFAULT_NORM_TOL};
use cz_core::singular::{hilbert, multilinear_commutator};
use cz_core::weights::{make_weight, Weight};
use cz_core::{GridFunction, IntervalMode, YoungSpec};
use rayon::prelude::*;

use crate::config::{support_of, Experiment, ExperimentConfig, Theorem};
use crate::error::{HarnessError, Result};
use crate::report::{blowup_slope, Contract, ReportMeta, ReportPoint, VerificationReport, DEGENERATE};

/// Measured `[w]_{A_1}` above which a weight is flagged near-degenerate.
pub const NEAR_DEGENERATE_A1: f64 = 1.75;

pub const FEFFERMAN_STEIN: &str = "fefferman-stein";
pub const SHARP_FUNCTION: &str = "sharp-function";
pub const POWER_SHARP: &str = "power-sharp";
pub const HILBERT_SHARP: &str = "hilbert-sharp";

/// Runs the check selected by `cfg.theorem`.
pub fn verify(cfg: &ExperimentConfig) -> Result<VerificationReport> {
    let exp = Experiment::from_config(cfg)?;
    verify_experiment(&exp)
}

pub fn verify_experiment(exp: &Experiment) -> Result<VerificationReport> {
    match exp.cfg.theorem {
        Theorem::Strong => verify_strong_on(exp),
        Theorem::Endpoint => verify_endpoint_on(exp),
        Theorem::Corollary => verify_corollary_on(exp),
        Theorem::TwoWeight => verify_two_weight_on(exp),
        Theorem::Sharp => verify_sharp_pointwise_on(exp),
        Theorem::MaximalLemmas => verify_maximal_lemmas_on(exp),
    }
}

pub fn verify_strong(cfg: &ExperimentConfig) -> Result<VerificationReport> {
    verify_strong_on(&Experiment::from_config(cfg)?)
}

pub fn verify_endpoint(cfg: &ExperimentConfig) -> Result<VerificationReport> {
    verify_endpoint_on(&Experiment::from_config(cfg)?)
}

pub fn verify_corollary(cfg: &ExperimentConfig) -> Result<VerificationReport> {
    verify_corollary_on(&Experiment::from_config(cfg)?)
}

pub fn verify_two_weight(cfg: &ExperimentConfig) -> Result<VerificationReport> {
    verify_two_weight_on(&Experiment::from_config(cfg)?)
}

pub fn verify_sharp_pointwise(cfg: &ExperimentConfig) -> Result<VerificationReport> {
    verify_sharp_pointwise_on(&Experiment::from_config(cfg)?)
}

pub fn verify_maximal_lemmas(cfg: &ExperimentConfig) -> Result<VerificationReport> {
    verify_maximal_lemmas_on(&Experiment::from_config(cfg)?)
}

fn conjugate(p: f64) -> f64 {
    p / (p - 1.0)
}

/// `(Σ |v_i|^p w_i h)^{1/p}`
fn weighted_lp(v: &[f64], w: &[f64], p: f64, h: f64) -> f64 {
    (v.iter().zip(w).map(|(a, b)| a.abs().powf(p) * b).sum::<f64>() * h).powf(1.0 / p)
}

/// `w({|t| > λ})` with a strict inequality.
fn level_set_measure(t: &[f64], w: &[f64], lambda: f64, h: f64) -> f64 {
    t.iter().zip(w).filter(|(v, _)| v.abs() > lambda).map(|(_, w)| w).sum::<f64>() * h
}

fn nonempty(name: &str, list: &[f64]) -> Result<()> {
    if list.is_empty() {
        Err(HarnessError::EmptySweep(format!("{name} list is empty")))
    } else {
        Ok(())
    }
}

fn meta(exp: &Experiment, flags: Vec<String>) -> ReportMeta {
    ReportMeta {
        theorem: exp.cfg.theorem.label().to_string(),
        domain: [exp.grid.a(), exp.grid.b()],
        n: exp.grid.len(),
        mode: exp.mode.label().to_string(),
        k: exp.symbols.len(),
        inv_s: exp.cfg.inv_s(),
        symbol_norm: exp.symbols.norm(),
        input: exp.cfg.input.label(),
        weight: exp.cfg.weight.label(),
        symbols: exp.cfg.symbols.iter().map(|s| format!("{}/s={}", s.symbol.label(), s.s)).collect(),
        seed: exp.cfg.seed,
        slope_tolerance: exp.cfg.slope_tolerance,
        flags,
    }
}

/// `T_{\vec b} f` for the full symbol set (the Hilbert transform when empty).
fn tb_f(exp: &Experiment) -> Result<GridFunction> {
    Ok(multilinear_commutator(&exp.symbols.refs(), &exp.f)?)
}

/// `M_{Φ_ρ} w` on the cells of `window`.
fn weight_maximal(w: &Weight, rho: f64, mode: IntervalMode, window: CellRange) -> Result<Vec<f64>> {
    Ok(orlicz_maximal_window(w.values(), &YoungSpec::phi(rho)?, mode, window, DEFAULT_NORM_TOL)?)
}

/// `‖T_{\vec b}f‖_{L^p(w)}` against
/// `(p′)^{k+1} p^{1+1/s} ((p−1)/δ)^{1/p′} ‖\vec b‖ ‖f‖_{L^p(M_{Φ_ρ}w)}`
/// with `ρ = (1+1/s)p − 1 + δ`.
pub fn verify_strong_on(exp: &Experiment) -> Result<VerificationReport> {
    let cfg = &exp.cfg;
    nonempty("p", &cfg.p_list)?;
    nonempty("delta", &cfg.delta_list)?;
    exp.check_margin()?;
    let k = exp.symbols.len() as i32;
    let inv_s = cfg.inv_s();
    let bnorm = exp.symbols.norm();
    let h = exp.grid.h();
    let tf = tb_f(exp)?;
    let w = exp.weight.values().values();
    let support = exp.support();

    let jobs: Vec<(f64, f64)> = cfg.p_list.iter().flat_map(|p| cfg.delta_list.iter().map(move |d| (*p, *d))).collect();
    let points = jobs
        .par_iter()
        .map(|&(p, delta)| -> Result<ReportPoint> {
            let pp = conjugate(p);
            let structural = pp.powi(k + 1) * p.powf(1.0 + inv_s) * ((p - 1.0) / delta).powf(1.0 / pp);
            let lhs = weighted_lp(tf.values(), w, p, h);
            let rho = (1.0 + inv_s) * p - 1.0 + delta;
            let norm = match support {
                Some(win) => weighted_lp(&exp.f.values()[win.as_range()], &weight_maximal(&exp.weight, rho, exp.mode, win)?, p, h),
                None => 0.0,
            };
            Ok(ReportPoint::new("", &[("p", p), ("delta", delta), ("rho", rho)], lhs, structural * bnorm * norm, structural))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(VerificationReport::assemble(meta(exp, vec![]), points, vec![], vec![]))
}

/// `w({|T_{\vec b}f| > λ})` against
/// `ε^{−(k+1)} ∫ Φ_{1/s}(‖\vec b‖|f|/λ) M_{Φ_{1/s+ε}}w`.
pub fn verify_endpoint_on(exp: &Experiment) -> Result<VerificationReport> {
    let cfg = &exp.cfg;
    nonempty("epsilon", &cfg.eps_list)?;
    nonempty("lambda", &cfg.lambda_list)?;
    exp.check_margin()?;
    let k = exp.symbols.len() as i32;
    let inv_s = cfg.inv_s();
    let phi = YoungSpec::phi(inv_s)?;
    let bnorm = exp.symbols.norm();
    let h = exp.grid.h();
    let tf = tb_f(exp)?;
    let w = exp.weight.values().values();
    let support = exp.support();

    let per_eps = cfg
        .eps_list
        .par_iter()
        .map(|&eps| -> Result<Vec<ReportPoint>> {
            let v = match support {
                Some(win) => weight_maximal(&exp.weight, inv_s + eps, exp.mode, win)?,
                None => Vec::new(),
            };
            let structural = eps.powi(-(k + 1));
            Ok(cfg
                .lambda_list
                .iter()
                .map(|&lambda| {
                    let lhs = level_set_measure(tf.values(), w, lambda, h);
                    let integral = match support {
                        Some(win) => {
                            exp.f.values()[win.as_range()].iter().zip(&v).map(|(f, m)| phi.value(bnorm * f.abs() / lambda) * m).sum::<f64>()
                                * h
                        }
                        None => 0.0,
                    };
                    ReportPoint::new("", &[("epsilon", eps), ("lambda", lambda)], lhs, structural * integral, structural)
                })
                .collect())
        })
        .collect::<Result<Vec<_>>>()?;
    let points: Vec<ReportPoint> = per_eps.into_iter().flatten().collect();

    let bound = (k + 1) as f64 + cfg.slope_tolerance;
    let slopes = cfg
        .lambda_list
        .iter()
        .filter_map(|&lambda| {
            blowup_slope(&format!("lambda={lambda}"), "epsilon", points.iter().filter(|p| p.coord("lambda") == Some(lambda)), Some(bound))
        })
        .collect();
    Ok(VerificationReport::assemble(meta(exp, vec![]), points, slopes, vec![]))
}

/// The `k = 1`, `s = 1` endpoint bound with the weight entering through
/// `[w]_{A_∞}(1 + log⁺[w]_{A_∞})²` (group `a-infinity`) or `Φ([w]_{A_1})²`
/// (group `a1`) and `M_{Φ_ρ}w` replaced by `Mw`.
pub fn verify_corollary_on(exp: &Experiment) -> Result<VerificationReport> {
    let cfg = &exp.cfg;
    if exp.symbols.len() != 1 || exp.symbols.s_params()[0] != 1.0 {
        return Err(HarnessError::Config("the corollary needs exactly one symbol with s = 1".into()));
    }
    nonempty("lambda", &cfg.lambda_list)?;
    exp.check_margin()?;
    let phi = YoungSpec::phi(1.0)?;
    let bmo = exp.symbols.seminorms()[0];
    let h = exp.grid.h();
    let tf = tb_f(exp)?;
    let w = exp.weight.values().values();
    let mw = hl_maximal(exp.weight.values(), exp.mode);
    let a_inf = exp.weight.fujii(exp.mode);
    let a1 = exp.weight.a1();
    let log_plus = a_inf.ln().max(0.0);
    let factors = [("a-infinity", a_inf * (1.0 + log_plus).powi(2)), ("a1", phi.value(a1).powi(2))];
    let mut flags = vec![format!("fujii={a_inf}"), format!("a1={a1}")];
    let near = a1 >= NEAR_DEGENERATE_A1;
    if near {
        flags.push("near-degenerate".into());
    }

    let mut points = Vec::new();
    for &lambda in &cfg.lambda_list {
        let lhs = level_set_measure(tf.values(), w, lambda, h);
        let integral: f64 = exp.f.values().iter().zip(mw.values()).map(|(f, m)| phi.value(bmo * f.abs() / lambda) * m).sum::<f64>() * h;
        for (group, factor) in factors {
            let mut p = ReportPoint::new(group, &[("lambda", lambda)], lhs, factor * integral, factor);
            if near {
                p = p.flag("near-degenerate");
            }
            points.push(p);
        }
    }
    Ok(VerificationReport::assemble(meta(exp, flags), points, vec![], vec![]))
}

/// `‖M_{Φ_{1/s}}f / v‖_{L^{p′}(v)}` against
/// `p^{1+1/s} ((p−1)/δ)^{1/p′} ‖f/w‖_{L^{p′}(w)}`, `v = M_{Φ_ρ}w`.
pub fn verify_two_weight_on(exp: &Experiment) -> Result<VerificationReport> {
    let cfg = &exp.cfg;
    nonempty("p", &cfg.p_list)?;
    nonempty("delta", &cfg.delta_list)?;
    let s_list = if !cfg.s_list.is_empty() {
        cfg.s_list.clone()
    } else if !exp.symbols.is_empty() {
        vec![exp.symbols.s()]
    } else {
        vec![1.0]
    };
    let h = exp.grid.h();
    let f = exp.f.values();
    let w = exp.weight.values().values();
    let full = exp.grid.full_range();

    let mf: Vec<Vec<f64>> = s_list
        .par_iter()
        .map(|&s| Ok(orlicz_maximal(&exp.f, &YoungSpec::phi(1.0 / s)?, exp.mode)?.into_values()))
        .collect::<Result<_>>()?;

    let mut jobs = Vec::new();
    for (si, &s) in s_list.iter().enumerate() {
        for &p in &cfg.p_list {
            for &delta in &cfg.delta_list {
                jobs.push((si, s, p, delta));
            }
        }
    }
    let mut rhos: Vec<f64> = jobs.iter().map(|&(_, s, p, d)| (1.0 + 1.0 / s) * p - 1.0 + d).collect();
    rhos.sort_by(f64::total_cmp);
    rhos.dedup();
    let vs: BTreeMap<u64, Vec<f64>> = rhos
        .par_iter()
        .map(|&rho| Ok((rho.to_bits(), weight_maximal(&exp.weight, rho, exp.mode, full)?)))
        .collect::<Result<_>>()?;

    let points = jobs
        .iter()
        .map(|&(si, s, p, delta)| {
            let pp = conjugate(p);
            let rho = (1.0 + 1.0 / s) * p - 1.0 + delta;
            let v = &vs[&rho.to_bits()];
            let lhs = (mf[si].iter().zip(v).map(|(m, v)| (m / v).powf(pp) * v).sum::<f64>() * h).powf(1.0 / pp);
            let norm = (f.iter().zip(w).map(|(f, w)| (f.abs() / w).powf(pp) * w).sum::<f64>() * h).powf(1.0 / pp);
            let structural = p.powf(1.0 + 1.0 / s) * ((p - 1.0) / delta).powf(1.0 / pp);
            ReportPoint::new("", &[("p", p), ("delta", delta), ("s", s), ("rho", rho)], lhs, structural * norm, structural)
        })
        .collect();
    Ok(VerificationReport::assemble(meta(exp, vec![]), points, vec![], vec![]))
}

/// `sup_x M_δ^♯(T_{\vec b}f)(x) / (‖\vec b‖ M_{Φ_{1/s}}f(x) + Σ_σ ‖\vec σ‖ M_ε(T_{\vec b_{σ′}}f)(x))`
/// per `(δ, ε)`, over nonempty subsets `σ`.
pub fn verify_sharp_pointwise_on(exp: &Experiment) -> Result<VerificationReport> {
    let cfg = &exp.cfg;
    nonempty("delta", &cfg.delta_list)?;
    nonempty("epsilon", &cfg.eps_list)?;
    let dmax = cfg.delta_list.iter().copied().fold(f64::MIN, f64::max);
    let emin = cfg.eps_list.iter().copied().fold(f64::MAX, f64::min);
    if dmax >= emin {
        return Err(HarnessError::Config(format!("need every delta below every epsilon, got delta {dmax} >= epsilon {emin}")));
    }
    exp.check_margin()?;
    let k = exp.symbols.len();
    let inv_s = cfg.inv_s();
    let tf = tb_f(exp)?;
    let mphi = if inv_s == 0.0 {
        hl_maximal(&exp.f, exp.mode)
    } else {
        orlicz_maximal(&exp.f, &YoungSpec::phi(inv_s)?, exp.mode)?
    };
    let full = (1u32 << k) - 1;
    // (‖σ‖, T_{b_{σ′}} f) for nonempty σ
    let partial: Vec<(f64, GridFunction)> = (1..=full)
        .map(|mask| Ok((exp.symbols.subset_norm(mask), multilinear_commutator(&exp.symbols.subset(full ^ mask), &exp.f)?)))
        .collect::<Result<_>>()?;
    let bnorm = exp.symbols.norm();
    let mids = exp.grid.midpoints();

    let sharp: Vec<GridFunction> = cfg.delta_list.par_iter().map(|&d| sharp_power(&tf, d, exp.mode)).collect::<cz_core::Result<_>>()?;
    let rhs_by_eps: Vec<Vec<f64>> = cfg
        .eps_list
        .par_iter()
        .map(|&eps| -> Result<Vec<f64>> {
            let mut r: Vec<f64> = mphi.values().iter().map(|m| bnorm * m).collect();
            for (norm, g) in &partial {
                if *norm == 0.0 {
                    continue;
                }
                let me = power_maximal(g, eps, exp.mode)?;
                for (ri, m) in r.iter_mut().zip(me.values()) {
                    *ri += norm * m;
                }
            }
            Ok(r)
        })
        .collect::<Result<_>>()?;

    let mut points = Vec::new();
    for (di, &delta) in cfg.delta_list.iter().enumerate() {
        for (ei, &eps) in cfg.eps_list.iter().enumerate() {
            let lhs = sharp[di].values();
            let rhs = &rhs_by_eps[ei];
            // a zero rhs with positive lhs gives an infinite ratio and fails the contracts
            let mut best = (0.0_f64, 0usize);
            for i in 0..lhs.len() {
                let r = if rhs[i] == 0.0 {
                    if lhs[i] == 0.0 {
                        0.0
                    } else {
                        f64::INFINITY
                    }
                } else {
                    lhs[i] / rhs[i]
                };
                if r > best.0 {
                    best = (r, i);
                }
            }
            let i = best.1;
            let mut p = ReportPoint::new("", &[("delta", delta), ("epsilon", eps), ("x", mids[i])], lhs[i], rhs[i], 1.0);
            p.implied_constant = best.0;
            points.push(p);
        }
    }
    Ok(VerificationReport::assemble(meta(exp, vec![]), points, vec![], vec![]))
}

/// `‖Mf‖_{L^{1,∞}(w)} = sup_t t·w({Mf > t})`, attained in the limit
/// `t ↑ Mf(x_i)`.
pub fn weak_l1_norm(mf: &[f64], w: &[f64], h: f64) -> f64 {
    let mut pairs: Vec<(f64, f64)> = mf.iter().copied().zip(w.iter().copied()).collect();
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut best = 0.0_f64;
    let mut mass = 0.0;
    let mut i = 0;
    while i < pairs.len() {
        let t = pairs[i].0;
        while i < pairs.len() && pairs[i].0 == t {
            mass += pairs[i].1 * h;
            i += 1;
        }
        best = best.max(t * mass);
    }
    best
}

/// Corpus checks of the dyadic sharp-function bounds, the pointwise sharp
/// bound for the Hilbert transform and the Fefferman–Stein inequality.
pub fn verify_maximal_lemmas_on(exp: &Experiment) -> Result<VerificationReport> {
    let cfg = &exp.cfg;
    if cfg.p_list.is_empty() && cfg.delta_list.is_empty() && cfg.eps_list.is_empty() {
        return Err(HarnessError::EmptySweep("p, delta and epsilon lists are all empty".into()));
    }
    let grid = exp.grid;
    let h = grid.h();
    let mut inputs = vec![(cfg.input.label(), exp.f.clone())];
    for kind in &cfg.corpus.inputs {
        inputs.push((kind.label(), kind.build(grid)?.scale(cfg.input_scale)?));
    }
    let mut weights = vec![(cfg.weight.label(), exp.weight.clone())];
    for kind in &cfg.corpus.weights {
        weights.push((kind.label(), make_weight(kind, grid)?));
    }
    let margin = 0.25 * grid.length();
    let has_margin = |f: &GridFunction| match support_of(f) {
        None => true,
        Some(r) => {
            let lo = grid.a() + r.start as f64 * h;
            let hi = grid.a() + r.end as f64 * h;
            lo - grid.a() >= margin * (1.0 - 1e-9) && grid.b() - hi >= margin * (1.0 - 1e-9)
        }
    };

    struct InputOps {
        abs: Vec<f64>,
        mf: Vec<f64>,
        sharp_delta: Vec<Vec<f64>>,
        sharp_eps: Vec<Vec<f64>>,
        power_eps: Vec<Vec<f64>>,
        hilbert_ratio: Vec<(f64, bool)>,
    }
    let ops = inputs
        .par_iter()
        .map(|(_, f)| -> Result<InputOps> {
            let dy = IntervalMode::Dyadic;
            let mf = hl_maximal(f, exp.mode).into_values();
            let sharp_delta = cfg.delta_list.iter().map(|&d| Ok(sharp_power(f, d, dy)?.into_values())).collect::<Result<_>>()?;
            let sharp_eps = cfg.eps_list.iter().map(|&e| Ok(sharp_power(f, e, dy)?.into_values())).collect::<Result<_>>()?;
            let power_eps = cfg.eps_list.iter().map(|&e| Ok(power_maximal(f, e, dy)?.into_values())).collect::<Result<_>>()?;
            let hf = hilbert(f);
            let hilbert_ratio = cfg
                .delta_list
                .iter()
                .map(|&d| {
                    let s = sharp_power(&hf, d, exp.mode)?;
                    let r = s
                        .values()
                        .iter()
                        .zip(&mf)
                        .map(|(a, m)| if *m == 0.0 { if *a == 0.0 { 0.0 } else { f64::INFINITY } } else { a / m })
                        .fold(0.0, f64::max);
                    Ok((r, has_margin(f)))
                })
                .collect::<Result<_>>()?;
            Ok(InputOps { abs: f.values().iter().map(|v| v.abs()).collect(), mf, sharp_delta, sharp_eps, power_eps, hilbert_ratio })
        })
        .collect::<Result<Vec<_>>>()?;
    let wdata = weights
        .par_iter()
        .map(|(_, w)| (w.fujii(IntervalMode::Dyadic), hl_maximal(w.values(), exp.mode).into_values()))
        .collect::<Vec<_>>();

    let mut points = Vec::new();
    for (ii, op) in ops.iter().enumerate() {
        let fi = ii as f64;
        for (di, &delta) in cfg.delta_list.iter().enumerate() {
            let (r, margin_ok) = op.hilbert_ratio[di];
            let mut p = ReportPoint::new(HILBERT_SHARP, &[("input", fi), ("delta", delta)], r, 1.0, 1.0);
            if !margin_ok {
                p = p.flag("no-margin");
            }
            points.push(p);
        }
        for (wi, (_, w)) in weights.iter().enumerate() {
            let wv = w.values().values();
            let (fujii, mw) = &wdata[wi];
            let wf = wi as f64;
            let fs_rhs = op.abs.iter().zip(mw).map(|(f, m)| f * m).sum::<f64>() * h;
            points.push(ReportPoint::new(FEFFERMAN_STEIN, &[("input", fi), ("weight", wf)], weak_l1_norm(&op.mf, wv, h), fs_rhs, 1.0));
            for &p in &cfg.p_list {
                let structural = p * fujii;
                let f_norm = weighted_lp(&op.abs, wv, p, h);
                for (di, &delta) in cfg.delta_list.iter().enumerate() {
                    let sn = weighted_lp(&op.sharp_delta[di], wv, p, h);
                    let mut pt = ReportPoint::new(SHARP_FUNCTION, &[("input", fi), ("weight", wf), ("p", p), ("delta", delta)], f_norm, structural * sn, structural);
                    if sn == 0.0 && f_norm > 0.0 {
                        pt = pt.flag(DEGENERATE);
                    }
                    points.push(pt);
                }
                for (ei, &eps) in cfg.eps_list.iter().enumerate() {
                    let lhs = weighted_lp(&op.power_eps[ei], wv, p, h);
                    let sn = weighted_lp(&op.sharp_eps[ei], wv, p, h);
                    let mut pt = ReportPoint::new(POWER_SHARP, &[("input", fi), ("weight", wf), ("p", p), ("epsilon", eps)], lhs, structural * sn, structural);
                    if sn == 0.0 && lhs > 0.0 {
                        pt = pt.flag(DEGENERATE);
                    }
                    points.push(pt);
                }
            }
        }
    }
    let mut flags: Vec<String> = inputs.iter().enumerate().map(|(i, (l, _))| format!("input{i}={l}")).collect();
    flags.extend(weights.iter().enumerate().map(|(i, (l, _))| format!("weight{i}={l}")));
    let degenerate = points.iter().filter(|p| p.is_degenerate()).count();
    let contracts = vec![Contract::new("corpus", true, format!("{} points, {degenerate} degenerate and excluded", points.len()))];
    Ok(VerificationReport::assemble(meta(exp, flags), points, vec![], contracts))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weak_norm_by_hand() {
        // values 3, 2, 2, 1 with unit weights and h = 1: max(3·1, 2·3, 1·4) = 6
        assert_eq!(weak_l1_norm(&[2.0, 3.0, 1.0, 2.0], &[1.0; 4], 1.0), 6.0);
        assert_eq!(weak_l1_norm(&[0.0; 3], &[1.0; 3], 1.0), 0.0);
    }

    #[test]
    fn level_set_is_strict() {
        assert_eq!(level_set_measure(&[1.0, -2.0, 0.5], &[1.0, 2.0, 4.0], 1.0, 0.5), 1.0);
    }
}
