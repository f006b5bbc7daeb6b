use cz_harness::{sweep, Axis, ExperimentConfig, HarnessError};

fn endpoint() -> ExperimentConfig {
    ExperimentConfig::from_json(
        r#"{
            "grid": { "a": -2.0, "b": 2.0, "levels": 7 },
            "input": { "kind": "indicator", "lo": 0.0, "hi": 1.0 },
            "symbols": [{ "symbol": { "kind": "log" }, "s": 1.0 }],
            "weight": { "kind": "power", "alpha": -0.25 },
            "theorem": "endpoint",
            "eps_list": [0.2, 0.4, 0.6, 0.8],
            "lambda_list": [0.5, 1.0],
            "mode": "dyadic",
            "resolution_levels": [6, 7, 8]
        }"#,
    )
    .unwrap()
}

#[test]
fn epsilon_axis_fits_one_slope_per_height() {
    let r = sweep(&endpoint(), Axis::Epsilon).unwrap();
    assert_eq!(r.rows.len(), 8);
    assert_eq!(r.slopes.len(), 2);
    assert!(r.drift.is_none());
    for s in &r.slopes {
        assert_eq!(s.points, 4);
        assert!(s.slope <= 2.0 + 0.3, "{s:?}");
    }
    // the implied constant grows as ε grows: the structural factor ε^{−2} shrinks faster than the rest
    for lambda in [0.5, 1.0] {
        let curve: Vec<f64> =
            r.rows.iter().filter(|p| p.coord("lambda") == Some(lambda)).map(|p| p.implied_constant).collect();
        assert!(curve.windows(2).all(|w| w[0] <= w[1]), "{curve:?}");
    }
}

#[test]
fn resolution_axis_reports_drift() {
    let r = sweep(&endpoint(), Axis::Resolution).unwrap();
    assert_eq!(r.rows.len(), 3 * 8);
    let drift = r.drift.unwrap();
    assert!(drift.is_finite() && drift >= 0.0);
    assert!(r.rows.iter().all(|p| matches!(p.coord("levels"), Some(l) if [6.0, 7.0, 8.0].contains(&l))));
}

#[test]
fn empty_axis_is_an_error() {
    let mut cfg = endpoint();
    cfg.resolution_levels.clear();
    assert!(matches!(sweep(&cfg, Axis::Resolution), Err(HarnessError::EmptySweep(_))));
    assert!(matches!(sweep(&cfg, Axis::P), Err(HarnessError::EmptySweep(_))));
}

#[test]
fn saved_sweeps_have_a_json_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let r = sweep(&endpoint(), Axis::Epsilon).unwrap();
    let path = dir.path().join("eps.csv");
    r.save(&path).unwrap();
    let csv = std::fs::read_to_string(&path).unwrap();
    let header = csv.lines().next().unwrap();
    assert_eq!(header, "group,epsilon,lambda,lhs,rhs,implied_constant,flags");
    assert_eq!(csv.lines().count(), 1 + r.rows.len());
    let json = std::fs::read_to_string(dir.path().join("eps.json")).unwrap();
    assert_eq!(json, r.to_json());

    let bad = dir.path().join("missing").join("eps.csv");
    assert!(matches!(r.save(&bad), Err(HarnessError::Io(_))));
}

#[test]
fn sweeps_are_deterministic() {
    let a = sweep(&endpoint(), Axis::Epsilon).unwrap();
    let b = sweep(&endpoint(), Axis::Epsilon).unwrap();
    assert_eq!(a.to_json(), b.to_json());
}
