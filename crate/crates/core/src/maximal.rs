//! Hardy–Littlewood, power, sharp and `L^r` maximal operators.

use crate::error::{CzError, Result};
use crate::grid::{GridFunction, PrefixSums};
use crate::orlicz::orlicz_maximal;
use crate::sup::{sup_containing, IntervalMode};
use crate::weights::Weight;
use crate::young::YoungSpec;

/// `Mf(x) = sup_{Q ∋ x} avg_Q |f|`.
pub fn hl_maximal(f: &GridFunction, mode: IntervalMode) -> GridFunction {
    let abs: Vec<f64> = f.values().iter().map(|v| v.abs()).collect();
    let prefix = PrefixSums::new(&abs);
    let out = sup_containing(f.len(), mode, f.grid().full_range(), |q| prefix.mean(q.start, q.end));
    GridFunction::new(*f.grid(), out).expect("averages of finite values are finite")
}

/// `M_ε f = M(|f|^ε)^{1/ε}`.
pub fn power_maximal(f: &GridFunction, eps: f64, mode: IntervalMode) -> Result<GridFunction> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(CzError::Domain(format!("power maximal exponent must be positive, got {eps}")));
    }
    if eps == 1.0 {
        return Ok(hl_maximal(f, mode));
    }
    let powed = f.map(|v| v.abs().powf(eps))?;
    hl_maximal(&powed, mode).map(|v| v.powf(1.0 / eps))
}

/// `M♯f(x) = sup_{Q ∋ x} avg_Q |f − f_Q|`.
pub fn sharp_maximal(f: &GridFunction, mode: IntervalMode) -> GridFunction {
    let vals = f.values();
    let prefix = PrefixSums::new(vals);
    let out = sup_containing(f.len(), mode, f.grid().full_range(), |q| {
        let mean = prefix.mean(q.start, q.end);
        vals[q.as_range()].iter().map(|v| (v - mean).abs()).sum::<f64>() / q.len() as f64
    });
    GridFunction::new(*f.grid(), out).expect("oscillations of finite values are finite")
}

/// `M♯_δ f = M♯(|f|^δ)^{1/δ}` for `δ ∈ (0, 1]`.
pub fn sharp_power(f: &GridFunction, delta: f64, mode: IntervalMode) -> Result<GridFunction> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(CzError::Domain(format!("sharp maximal exponent must lie in (0, 1], got {delta}")));
    }
    if delta == 1.0 {
        return Ok(sharp_maximal(f, mode));
    }
    let powed = f.map(|v| v.abs().powf(delta))?;
    sharp_maximal(&powed, mode).map(|v| v.powf(1.0 / delta))
}

/// `M_{L^r} f = M(|f|^r)^{1/r}` for `r ≥ 1`.
pub fn lr_maximal(f: &GridFunction, r: f64, mode: IntervalMode) -> Result<GridFunction> {
    if !(r >= 1.0 && r.is_finite()) {
        return Err(CzError::Domain(format!("L^r maximal needs r >= 1, got {r}")));
    }
    power_maximal(f, r, mode)
}

/// Outcome of [`check_loglog_vs_lr`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogLogReport {
    /// `max_x M_{L(log L)^{1+ε}}w(x) / (α^{-(1+ε)} M_{L^{1+α(1+ε)}}w(x))`
    pub worst_ratio: f64,
    pub worst_cell: usize,
}

/// Compares `M_{L(log L)^{1+ε}} w` with `α^{-(1+ε)} M_{L^{1+α(1+ε)}} w` cell by cell.
pub fn check_loglog_vs_lr(w: &Weight, eps: f64, alpha: f64, mode: IntervalMode) -> Result<LogLogReport> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(CzError::Domain(format!("epsilon must lie in (0, 1), got {eps}")));
    }
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(CzError::Domain(format!("alpha must be positive, got {alpha}")));
    }
    let lhs = orlicz_maximal(w.values(), &YoungSpec::phi(1.0 + eps)?, mode)?;
    let r = 1.0 + alpha * (1.0 + eps);
    let factor = alpha.powf(-(1.0 + eps));
    let rhs = lr_maximal(w.values(), r, mode)?;
    let mut report = LogLogReport { worst_ratio: 0.0, worst_cell: 0 };
    for (i, (l, r)) in lhs.values().iter().zip(rhs.values()).enumerate() {
        let ratio = l / (factor * r);
        if ratio > report.worst_ratio {
            report = LogLogReport { worst_ratio: ratio, worst_cell: i };
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::UniformGrid1D;
    use crate::weights::{make_weight, WeightKind};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn brute(f: &[f64], value: impl Fn(&[f64]) -> f64) -> Vec<f64> {
        let n = f.len();
        let mut out = vec![f64::NEG_INFINITY; n];
        for s in 0..n {
            for e in s + 1..=n {
                let v = value(&f[s..e]);
                for x in &mut out[s..e] {
                    *x = x.max(v);
                }
            }
        }
        out
    }

    fn mean_abs(v: &[f64]) -> f64 {
        v.iter().map(|x| x.abs()).sum::<f64>() / v.len() as f64
    }

    #[test]
    fn constant_maps_to_constant() {
        let g = UniformGrid1D::new(0.0, 1.0, 64).unwrap();
        let one = GridFunction::constant(g, 1.0).unwrap();
        for mode in [IntervalMode::AllIntervals, IntervalMode::Dyadic] {
            for v in hl_maximal(&one, mode).values() {
                assert_relative_eq!(*v, 1.0, max_relative = 1e-14);
            }
            assert!(sharp_maximal(&one, mode).values().iter().all(|v| v.abs() < 1e-14));
        }
        let c = GridFunction::constant(g, 3.0).unwrap();
        for v in power_maximal(&c, 0.5, IntervalMode::AllIntervals).unwrap().values() {
            assert_relative_eq!(*v, 3.0, max_relative = 1e-13);
        }
    }

    #[test]
    fn half_indicator_matches_enumeration() {
        let g = UniformGrid1D::new(0.0, 1.0, 256).unwrap();
        let f = GridFunction::indicator(g, 0.0, 0.5);
        let m = hl_maximal(&f, IntervalMode::AllIntervals);
        let want = brute(f.values(), mean_abs);
        let x = g.cell_of(0.75);
        assert_relative_eq!(m.values()[x], want[x], max_relative = 1e-14);
        // best interval is [0, x⁺]: ½ over its length
        assert_relative_eq!(m.values()[x], 0.5 / ((x + 1) as f64 / 256.0), max_relative = 1e-12);
    }

    #[test]
    fn point_mass_decay() {
        let g = UniformGrid1D::new(-1.0, 1.0, 1024).unwrap();
        let h = g.h();
        let zero = g.cell_of(0.0);
        let f = GridFunction::from_fn(g, |_| 0.0).unwrap();
        let mut vals = f.values().to_vec();
        vals[zero] = 1.0 / h;
        let f = GridFunction::new(g, vals).unwrap();
        let m = hl_maximal(&f, IntervalMode::AllIntervals);
        for x in [0.1, 0.3, -0.5, 0.9] {
            let v = m.values()[g.cell_of(x)];
            let profile = 1.0 / (2.0 * x.abs());
            assert!(v <= 2.0 * profile && v >= 0.5 * profile, "x={x} v={v}");
        }
    }

    #[test]
    fn power_maximal_matches_composition() {
        let g = UniformGrid1D::new(0.0, 1.0, 128).unwrap();
        let f = GridFunction::indicator(g, 0.0, 0.5);
        let m = power_maximal(&f, 0.5, IntervalMode::AllIntervals).unwrap();
        let roots: Vec<f64> = f.values().iter().map(|v| v.sqrt()).collect();
        let want = brute(&roots, mean_abs);
        for (a, b) in m.values().iter().zip(&want) {
            assert_relative_eq!(*a, b * b, max_relative = 1e-13);
        }
        assert_eq!(power_maximal(&f, 1.0, IntervalMode::Dyadic).unwrap(), hl_maximal(&f, IntervalMode::Dyadic));
        assert!(power_maximal(&f, 0.0, IntervalMode::Dyadic).is_err());
    }

    #[test]
    fn sharp_of_linear_is_bounded() {
        let g = UniformGrid1D::new(-1.0, 1.0, 128).unwrap();
        let f = GridFunction::from_fn(g, |x| 2.0 - 3.0 * x).unwrap();
        let m = sharp_maximal(&f, IntervalMode::AllIntervals);
        let want = brute(f.values(), |v| {
            let mean = v.iter().sum::<f64>() / v.len() as f64;
            v.iter().map(|x| (x - mean).abs()).sum::<f64>() / v.len() as f64
        });
        for (a, b) in m.values().iter().zip(&want) {
            assert_relative_eq!(*a, *b, max_relative = 1e-12, epsilon = 1e-14);
            assert!(*a <= 3.0 * 2.0);
        }
        assert_eq!(sharp_power(&f, 1.0, IntervalMode::AllIntervals).unwrap(), m);
        assert!(sharp_power(&f, 1.5, IntervalMode::AllIntervals).is_err());
    }

    #[test]
    fn lr_maximal_dominates_hl() {
        let g = UniformGrid1D::new(-1.0, 1.0, 256).unwrap();
        let w = make_weight(&WeightKind::Power { alpha: -0.25 }, g).unwrap();
        let m = hl_maximal(w.values(), IntervalMode::AllIntervals);
        let l = lr_maximal(w.values(), 1.2, IntervalMode::AllIntervals).unwrap();
        for (a, b) in m.values().iter().zip(l.values()) {
            assert!(b.is_finite() && *b >= *a * (1.0 - 1e-12));
        }
        assert_eq!(lr_maximal(w.values(), 1.0, IntervalMode::Dyadic).unwrap(), hl_maximal(w.values(), IntervalMode::Dyadic));
        assert!(lr_maximal(w.values(), 0.5, IntervalMode::Dyadic).is_err());
    }

    #[test]
    fn loglog_versus_lr() {
        let g = UniformGrid1D::new(-1.0, 1.0, 128).unwrap();
        let one = make_weight(&WeightKind::Constant, g).unwrap();
        let rep = check_loglog_vs_lr(&one, 0.5, 0.5, IntervalMode::AllIntervals).unwrap();
        assert_relative_eq!(rep.worst_ratio, 0.5f64.powf(1.5), max_relative = 1e-9);

        let w = make_weight(&WeightKind::Power { alpha: -0.25 }, g).unwrap();
        for (eps, alpha) in [(0.5, 0.5), (1e-3, 0.5), (0.9, 0.9)] {
            let rep = check_loglog_vs_lr(&w, eps, alpha, IntervalMode::AllIntervals).unwrap();
            assert!(rep.worst_ratio <= 1.0, "eps={eps} alpha={alpha} ratio={}", rep.worst_ratio);
        }
        assert!(check_loglog_vs_lr(&w, 1.0, 0.5, IntervalMode::Dyadic).is_err());
    }

    #[test]
    fn dyadic_below_all_intervals() {
        let g = UniformGrid1D::new(0.0, 1.0, 64).unwrap();
        let f = GridFunction::from_fn(g, |x| (13.0 * x).sin() + 0.3).unwrap();
        let d = hl_maximal(&f, IntervalMode::Dyadic);
        let a = hl_maximal(&f, IntervalMode::AllIntervals);
        for (x, y) in d.values().iter().zip(a.values()) {
            assert!(x <= y);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn sublinear(a in prop::collection::vec(-5.0f64..5.0, 32), b in prop::collection::vec(-5.0f64..5.0, 32)) {
            let g = UniformGrid1D::new(0.0, 1.0, 32).unwrap();
            let fa = GridFunction::new(g, a).unwrap();
            let fb = GridFunction::new(g, b).unwrap();
            let sum = hl_maximal(&fa.add(&fb).unwrap(), IntervalMode::AllIntervals);
            let ma = hl_maximal(&fa, IntervalMode::AllIntervals);
            let mb = hl_maximal(&fb, IntervalMode::AllIntervals);
            for i in 0..32 {
                prop_assert!(sum.values()[i] <= (ma.values()[i] + mb.values()[i]) * (1.0 + 1e-12) + 1e-12);
            }
        }

        #[test]
        fn power_maximal_increases_with_exponent(a in prop::collection::vec(0.0f64..5.0, 32), e1 in 0.1f64..1.0, gap in 0.0f64..2.0) {
            let g = UniformGrid1D::new(0.0, 1.0, 32).unwrap();
            let f = GridFunction::new(g, a).unwrap();
            let m1 = power_maximal(&f, e1, IntervalMode::AllIntervals).unwrap();
            let m2 = power_maximal(&f, e1 + gap, IntervalMode::AllIntervals).unwrap();
            for i in 0..32 {
                prop_assert!(m1.values()[i] <= m2.values()[i] * (1.0 + 1e-12) + 1e-12);
            }
        }

        #[test]
        fn sharp_below_twice_hl(a in prop::collection::vec(-5.0f64..5.0, 32)) {
            let g = UniformGrid1D::new(0.0, 1.0, 32).unwrap();
            let f = GridFunction::new(g, a).unwrap();
            let s = sharp_maximal(&f, IntervalMode::AllIntervals);
            let m = hl_maximal(&f, IntervalMode::AllIntervals);
            for i in 0..32 {
                prop_assert!(s.values()[i] <= 2.0 * m.values()[i] * (1.0 + 1e-12) + 1e-12);
            }
        }
    }
}
