use cz_core::orlicz::luxemburg_norm;
use cz_core::singular::{multilinear_commutator, SymbolSet};
use cz_core::{GridFunction, YoungSpec};
use cz_harness::config::InputKind;
use cz_harness::verify::{verify_endpoint_on, verify_strong_on, verify_two_weight_on, FEFFERMAN_STEIN, POWER_SHARP, SHARP_FUNCTION};
use cz_harness::{verify, Experiment, ExperimentConfig, HarnessError, VerificationReport};

fn config(theorem: &str, extra: &str) -> ExperimentConfig {
    let text = format!(
        r#"{{
            "grid": {{ "a": -2.0, "b": 2.0, "levels": 7 }},
            "input": {{ "kind": "indicator", "lo": 0.0, "hi": 1.0 }},
            "symbols": [{{ "symbol": {{ "kind": "log" }}, "s": 1.0 }}],
            "weight": {{ "kind": "power", "alpha": -0.25 }},
            "theorem": "{theorem}",
            "p_list": [1.5, 3.0],
            "delta_list": [0.25],
            "eps_list": [0.25, 0.5, 0.75],
            "lambda_list": [0.5, 1.0],
            "mode": "dyadic"
            {extra}
        }}"#
    );
    ExperimentConfig::from_json(&text).unwrap()
}

fn constant_symbol(cfg: &mut ExperimentConfig) {
    cfg.symbols = serde_json::from_str(r#"[{ "symbol": { "kind": "constant", "value": 2.0 }, "s": 1.0 }]"#).unwrap();
}

fn ratios(r: &VerificationReport) -> Vec<f64> {
    r.points.iter().map(|p| p.implied_constant).collect()
}

fn assert_close(a: &[f64], b: &[f64], rel: f64) {
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(b) {
        assert!((x - y).abs() <= rel * x.abs().max(y.abs()), "{x} vs {y}");
    }
}

/// Every report: finite, nonnegative, and a zero right side only with a zero left side.
fn assert_report_invariants(r: &VerificationReport) {
    for p in &r.points {
        assert!(p.lhs.is_finite() && p.lhs >= 0.0, "{p:?}");
        assert!(p.rhs.is_finite() && p.rhs >= 0.0, "{p:?}");
        assert!(p.implied_constant.is_finite() && p.implied_constant >= 0.0, "{p:?}");
        if p.rhs == 0.0 {
            assert_eq!(p.lhs, 0.0, "{p:?}");
            assert_eq!(p.implied_constant, 0.0);
        }
    }
    assert!(r.contract("finite").is_some());
    assert!(r.contract("homogeneity").is_some());
}

#[test]
fn strong_with_constant_symbol_is_zero() {
    let mut cfg = config("strong", "");
    constant_symbol(&mut cfg);
    let r = verify(&cfg).unwrap();
    assert!(r.points.iter().all(|p| p.lhs == 0.0 && p.implied_constant == 0.0));
    assert_report_invariants(&r);
}

#[test]
fn zero_input_gives_zero_ratios() {
    for theorem in ["strong", "endpoint", "two-weight"] {
        let mut cfg = config(theorem, "");
        cfg.input = InputKind::Zero;
        let r = verify(&cfg).unwrap();
        assert!(r.points.iter().all(|p| p.implied_constant == 0.0), "{theorem}");
        assert_report_invariants(&r);
    }
}

#[test]
fn strong_matches_direct_evaluation() {
    let cfg = config("strong", "");
    let exp = Experiment::from_config(&cfg).unwrap();
    let r = verify_strong_on(&exp).unwrap();
    let tf = multilinear_commutator(&exp.symbols.refs(), &exp.f).unwrap();
    let w = exp.weight.values().values();
    let h = exp.grid.h();
    for pt in &r.points {
        let p = pt.coord("p").unwrap();
        let lhs = (tf.values().iter().zip(w).map(|(t, w)| t.abs().powf(p) * w).sum::<f64>() * h).powf(1.0 / p);
        assert!((pt.lhs - lhs).abs() <= 1e-12 * lhs);
        // the weight maximal function is at least w, so the right side dominates the plain weighted norm
        let plain = (exp.f.values().iter().zip(w).map(|(f, w)| f.abs().powf(p) * w).sum::<f64>() * h).powf(1.0 / p);
        assert!(pt.rhs >= pt.structural * exp.symbols.norm() * plain * (1.0 - 1e-9));
    }
}

#[test]
fn strong_and_two_weight_are_scale_invariant() {
    for theorem in ["strong", "two-weight"] {
        let cfg = config(theorem, r#", "s_list": [1.0, 2.0]"#);
        let exp = Experiment::from_config(&cfg).unwrap();
        let scaled = exp.with_input(exp.f.scale(37.5).unwrap()).unwrap();
        let run = |e: &Experiment| if theorem == "strong" { verify_strong_on(e) } else { verify_two_weight_on(e) };
        assert_close(&ratios(&run(&exp).unwrap()), &ratios(&run(&scaled).unwrap()), 1e-9);
    }
}

#[test]
fn endpoint_scales_with_the_height() {
    let cfg = config("endpoint", "");
    let exp = Experiment::from_config(&cfg).unwrap();
    let c = 4.0;
    let mut scaled = exp.with_input(exp.f.scale(c).unwrap()).unwrap();
    scaled.cfg.lambda_list = cfg.lambda_list.iter().map(|l| l * c).collect();
    assert_close(&ratios(&verify_endpoint_on(&exp).unwrap()), &ratios(&verify_endpoint_on(&scaled).unwrap()), 1e-9);
}

#[test]
fn endpoint_is_unchanged_by_symbol_normalization() {
    let cfg = config("endpoint", "");
    let exp = Experiment::from_config(&cfg).unwrap();
    let norm = exp.symbols.norm();
    let unit_b = exp.symbols.symbols()[0].scale(1.0 / norm).unwrap();
    let mut normalized = exp.with_symbols(SymbolSet::with_seminorms(vec![unit_b], vec![1.0], vec![1.0]).unwrap());
    normalized.cfg.lambda_list = cfg.lambda_list.iter().map(|l| l / norm).collect();
    let a = verify_endpoint_on(&exp).unwrap();
    let b = verify_endpoint_on(&normalized).unwrap();
    assert_close(&ratios(&a), &ratios(&b), 1e-9);
}

#[test]
fn endpoint_above_the_maximum_is_empty() {
    let mut cfg = config("endpoint", "");
    let exp = Experiment::from_config(&cfg).unwrap();
    let top = multilinear_commutator(&exp.symbols.refs(), &exp.f).unwrap().max_abs();
    cfg.lambda_list = vec![1.01 * top];
    let r = verify(&cfg).unwrap();
    assert!(r.points.iter().all(|p| p.lhs == 0.0 && p.implied_constant == 0.0));
    // strict inequality: at exactly the maximum the level set is empty too
    cfg.lambda_list = vec![top];
    assert!(verify(&cfg).unwrap().points.iter().all(|p| p.lhs == 0.0));

    constant_symbol(&mut cfg);
    cfg.lambda_list = vec![0.5];
    assert!(verify(&cfg).unwrap().points.iter().all(|p| p.lhs == 0.0));
}

#[test]
fn endpoint_reports_blowup_slopes() {
    let r = verify(&config("endpoint", "")).unwrap();
    assert_eq!(r.aggregate.slopes.len(), 2);
    for s in &r.aggregate.slopes {
        assert_eq!(s.bound, Some(2.3));
        assert_eq!(s.points, 3);
        assert!(s.slope <= 2.3, "{s:?}");
    }
    assert_report_invariants(&r);
}

#[test]
fn corollary_with_unit_weight_is_the_bare_ratio() {
    let mut cfg = config("corollary", "");
    cfg.weight = serde_json::from_str(r#"{ "kind": "constant" }"#).unwrap();
    let exp = Experiment::from_config(&cfg).unwrap();
    let r = verify(&cfg).unwrap();
    let tf = multilinear_commutator(&exp.symbols.refs(), &exp.f).unwrap();
    let phi = YoungSpec::phi(1.0).unwrap();
    let b = exp.symbols.seminorms()[0];
    let h = exp.grid.h();
    for &lambda in &cfg.lambda_list {
        let lhs = tf.values().iter().filter(|v| v.abs() > lambda).count() as f64 * h;
        let rhs: f64 = exp.f.values().iter().map(|f| phi.value(b * f.abs() / lambda)).sum::<f64>() * h;
        let pts: Vec<_> = r.points.iter().filter(|p| p.coord("lambda") == Some(lambda)).collect();
        assert_eq!(pts.len(), 2);
        for p in pts {
            assert!((p.implied_constant - lhs / rhs).abs() <= 1e-12 * (lhs / rhs), "{p:?}");
        }
    }
}

#[test]
fn corollary_flags_strong_power_weights() {
    let mut cfg = config("corollary", "");
    cfg.weight = serde_json::from_str(r#"{ "kind": "power", "alpha": -0.5 }"#).unwrap();
    cfg.grid.levels = 8;
    let r = verify(&cfg).unwrap();
    assert!(r.meta.flags.iter().any(|f| f == "near-degenerate"));
    assert!(r.points.iter().all(|p| p.implied_constant.is_finite()));

    cfg.weight = serde_json::from_str(r#"{ "kind": "power", "alpha": -0.25 }"#).unwrap();
    let r = verify(&cfg).unwrap();
    assert!(!r.meta.flags.iter().any(|f| f == "near-degenerate"));
    cfg.weight = serde_json::from_str(r#"{ "kind": "step" }"#).unwrap();
    let r = verify(&cfg).unwrap();
    assert!(r.points.iter().all(|p| p.implied_constant.is_finite()));
    assert_report_invariants(&r);
}

#[test]
fn corollary_rejects_other_symbol_sets() {
    let mut cfg = config("corollary", "");
    cfg.symbols.push(cfg.symbols[0].clone());
    assert!(matches!(verify(&cfg), Err(HarnessError::Config(_))));
}

#[test]
fn two_weight_orders_the_orlicz_exponents() {
    let cfg = config("two-weight", r#", "s_list": [1.0, 2.0]"#);
    let r = verify(&cfg).unwrap();
    assert_report_invariants(&r);
    // L(log L)^{1/s} shrinks as s grows, so the left side does too
    for p in [1.5, 3.0] {
        let lhs = |s: f64| r.points.iter().find(|q| q.coord("p") == Some(p) && q.coord("s") == Some(s)).unwrap().lhs;
        assert!(lhs(2.0) <= lhs(1.0), "p = {p}");
    }
}

#[test]
fn two_weight_unit_weight_matches_enumeration() {
    let mut cfg = config("two-weight", "");
    cfg.weight = serde_json::from_str(r#"{ "kind": "constant" }"#).unwrap();
    cfg.grid.levels = 5;
    cfg.mode = Some(cz_core::IntervalMode::AllIntervals);
    cfg.p_list = vec![2.0];
    let exp = Experiment::from_config(&cfg).unwrap();
    let r = verify_two_weight_on(&exp).unwrap();
    // w ≡ 1 makes v ≡ 1; M_{Φ_1} f by brute force over every interval
    let n = exp.grid.len();
    let phi = YoungSpec::phi(1.0).unwrap();
    let mut m = vec![0.0_f64; n];
    for s in 0..n {
        for e in s + 1..=n {
            let v = luxemburg_norm(&exp.f, cz_core::CellRange::new(s, e), &phi, 1e-13).unwrap();
            for x in &mut m[s..e] {
                *x = x.max(v);
            }
        }
    }
    let h = exp.grid.h();
    let lhs = (m.iter().map(|v| v * v).sum::<f64>() * h).sqrt();
    let p = &r.points[0];
    assert!((p.lhs - lhs).abs() <= 1e-8 * lhs, "{} vs {lhs}", p.lhs);
    let f2 = (exp.f.values().iter().map(|v| v * v).sum::<f64>() * h).sqrt();
    let structural = 2f64.powf(2.0) * (1.0 / 0.25f64).powf(0.5);
    assert!((p.rhs - structural * f2).abs() <= 1e-12 * p.rhs);
}

#[test]
fn sharp_requires_delta_below_epsilon() {
    let mut cfg = config("sharp", "");
    cfg.delta_list = vec![0.5];
    cfg.eps_list = vec![0.5];
    assert!(matches!(verify(&cfg), Err(HarnessError::Config(_))));
}

#[test]
fn sharp_with_constant_symbol_vanishes() {
    let mut cfg = config("sharp", "");
    cfg.weight = serde_json::from_str(r#"{ "kind": "constant" }"#).unwrap();
    cfg.eps_list = vec![0.75];
    constant_symbol(&mut cfg);
    let r = verify(&cfg).unwrap();
    assert!(r.points.iter().all(|p| p.lhs == 0.0 && p.implied_constant == 0.0));
}

#[test]
fn sharp_without_symbols_is_finite() {
    let mut cfg = config("sharp", "");
    cfg.symbols.clear();
    cfg.delta_list = vec![0.5];
    cfg.eps_list = vec![0.75];
    let r = verify(&cfg).unwrap();
    assert!(!r.points.is_empty());
    assert!(r.points.iter().all(|p| p.implied_constant.is_finite() && p.implied_constant > 0.0));
    assert_report_invariants(&r);
}

#[test]
fn maximal_lemmas_exclude_constant_inputs() {
    let mut cfg = config("maximal-lemmas", "");
    cfg.input = InputKind::Constant { value: 1.0 };
    cfg.weight = serde_json::from_str(r#"{ "kind": "constant" }"#).unwrap();
    cfg.eps_list = vec![0.5];
    cfg.p_list = vec![2.0];
    let r = verify(&cfg).unwrap();
    let sharp: Vec<_> = r.points.iter().filter(|p| p.group == SHARP_FUNCTION || p.group == POWER_SHARP).collect();
    assert!(!sharp.is_empty());
    assert!(sharp.iter().all(|p| p.is_degenerate()));
    assert!(r.points.iter().any(|p| p.group == FEFFERMAN_STEIN && !p.is_degenerate()));
    assert!(r.all_hold);
}

#[test]
fn fefferman_stein_indicator_on_step_weight_is_finite() {
    let mut cfg = config("maximal-lemmas", "");
    cfg.weight = serde_json::from_str(r#"{ "kind": "step" }"#).unwrap();
    cfg.eps_list = vec![0.5];
    let r = verify(&cfg).unwrap();
    let fs = r.aggregate.max_by_group[FEFFERMAN_STEIN];
    assert!(fs.is_finite() && fs > 0.0);
    assert_report_invariants(&r);
}

#[test]
fn margin_and_empty_sweeps_are_rejected() {
    let mut cfg = config("strong", "");
    cfg.input = InputKind::Indicator { lo: -2.0, hi: -1.5 };
    assert!(matches!(verify(&cfg), Err(HarnessError::Margin(_))));

    let mut cfg = config("strong", "");
    cfg.p_list.clear();
    assert!(matches!(verify(&cfg), Err(HarnessError::EmptySweep(_))));
    let mut cfg = config("endpoint", "");
    cfg.eps_list.clear();
    assert!(matches!(verify(&cfg), Err(HarnessError::EmptySweep(_))));
}

#[test]
fn reports_are_deterministic() {
    let cfg = config("endpoint", "");
    let a = verify(&cfg).unwrap();
    let b = verify(&cfg).unwrap();
    assert_eq!(a.to_json(), b.to_json());
    assert_eq!(a.csv_string(), b.csv_string());
    assert_eq!(VerificationReport::from_json(&a.to_json()).unwrap(), a);
}

#[test]
fn replacement_input_must_share_the_grid() {
    let exp = Experiment::from_config(&config("strong", "")).unwrap();
    let other = GridFunction::zeros(cz_core::UniformGrid1D::with_levels(-2.0, 2.0, 6).unwrap());
    assert!(exp.with_input(other).is_err());
}
