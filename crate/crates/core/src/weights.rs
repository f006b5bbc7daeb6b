//! Weights, Muckenhoupt constants and the reverse Hölder check.

use std::collections::BTreeMap;
use std::sync::{Mutex, OnceLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{CzError, Result};
use crate::grid::{GridFunction, PrefixSums, UniformGrid1D};
use crate::sup::IntervalMode;

/// Reverse Hölder constant `τ` used by [`reverse_holder_check`] callers.
///
/// Produced by [`calibrate_tau`] on the [`weight_menu`] at `n = 2¹⁰` over
/// `[-1, 1]`, safety factor included.
pub const CALIBRATED_TAU: f64 = 0.98716;

/// Safety factor applied on top of the smallest admissible `τ`.
pub const TAU_SAFETY: f64 = 2.0;

/// A strictly positive grid function with lazily computed constants.
#[derive(Debug)]
pub struct Weight {
    f: GridFunction,
    a1: OnceLock<f64>,
    fujii_all: OnceLock<f64>,
    fujii_dyadic: OnceLock<f64>,
    ap: Mutex<BTreeMap<u64, f64>>,
}

impl Clone for Weight {
    fn clone(&self) -> Self {
        let w = Weight::unchecked(self.f.clone());
        if let Some(v) = self.a1.get() {
            let _ = w.a1.set(*v);
        }
        if let Some(v) = self.fujii_all.get() {
            let _ = w.fujii_all.set(*v);
        }
        if let Some(v) = self.fujii_dyadic.get() {
            let _ = w.fujii_dyadic.set(*v);
        }
        *w.ap.lock().unwrap() = self.ap.lock().unwrap().clone();
        w
    }
}

impl PartialEq for Weight {
    fn eq(&self, other: &Self) -> bool {
        self.f == other.f
    }
}

impl Weight {
    pub fn new(f: GridFunction) -> Result<Self> {
        if let Some((i, v)) = f.values().iter().enumerate().find(|(_, v)| !(**v > 0.0)) {
            return Err(CzError::Domain(format!("weight must be strictly positive, cell {i} has {v}")));
        }
        Ok(Self::unchecked(f))
    }

    fn unchecked(f: GridFunction) -> Self {
        Self { f, a1: OnceLock::new(), fujii_all: OnceLock::new(), fujii_dyadic: OnceLock::new(), ap: Mutex::new(BTreeMap::new()) }
    }

    pub fn values(&self) -> &GridFunction {
        &self.f
    }

    pub fn grid(&self) -> &UniformGrid1D {
        self.f.grid()
    }

    /// `w(E)` for the cells where `mask` is set.
    pub fn measure_of(&self, mask: impl Fn(usize) -> bool) -> f64 {
        let h = self.grid().h();
        self.f.values().iter().enumerate().filter(|(i, _)| mask(*i)).map(|(_, w)| w * h).sum()
    }

    /// `[w]_{A_1} = sup_Q avg_Q w / min_Q w` over grid-aligned intervals.
    pub fn a1(&self) -> f64 {
        *self.a1.get_or_init(|| a1_constant(self.f.values()))
    }

    /// `[w]_{A_p}`.
    pub fn ap(&self, p: f64) -> Result<f64> {
        if !(p > 1.0 && p.is_finite()) {
            return Err(CzError::Domain(format!("A_p needs 1 < p < ∞, got {p}")));
        }
        let key = p.to_bits();
        if let Some(v) = self.ap.lock().unwrap().get(&key) {
            return Ok(*v);
        }
        let v = ap_constant(self.f.values(), p);
        self.ap.lock().unwrap().insert(key, v);
        Ok(v)
    }

    /// Fujii `[w]_{A_∞}` with the maximal operator taken per `mode`.
    pub fn fujii(&self, mode: IntervalMode) -> f64 {
        match mode {
            IntervalMode::AllIntervals => *self.fujii_all.get_or_init(|| fujii_all_intervals(self.f.values())),
            IntervalMode::Dyadic => *self.fujii_dyadic.get_or_init(|| fujii_dyadic(self.f.values())),
        }
    }
}

fn a1_constant(w: &[f64]) -> f64 {
    let n = w.len();
    let mut best = 1.0_f64;
    for s in 0..n {
        let (mut sum, mut min) = (0.0, f64::INFINITY);
        for (e, &v) in w.iter().enumerate().skip(s) {
            sum += v;
            min = min.min(v);
            best = best.max(sum / ((e - s + 1) as f64 * min));
        }
    }
    best
}

fn ap_constant(w: &[f64], p: f64) -> f64 {
    let dual: Vec<f64> = w.iter().map(|v| v.powf(-1.0 / (p - 1.0))).collect();
    let pw = PrefixSums::new(w);
    let pd = PrefixSums::new(&dual);
    let n = w.len();
    let mut best = 1.0_f64;
    for s in 0..n {
        for e in s + 1..=n {
            best = best.max(pw.mean(s, e) * pd.mean(s, e).powf(p - 1.0));
        }
    }
    best
}

/// `sup_Q (1/w(Q)) ∫_Q M(χ_Q w)`: for a fixed start the interval grows to
/// the right and `M(χ_Q w)` on `Q` is updated with the averages ending at
/// the new cell.
fn fujii_all_intervals(w: &[f64]) -> f64 {
    let n = w.len();
    let prefix = PrefixSums::new(w);
    let mut best = 1.0_f64;
    let mut m = vec![0.0; n];
    for s in 0..n {
        let mut mass = 0.0;
        for e in s..n {
            mass += w[e];
            let mut run = f64::NEG_INFINITY;
            let mut total = 0.0;
            for x in s..=e {
                run = run.max(prefix.mean(x, e + 1));
                m[x] = if x == e { run } else { m[x].max(run) };
                total += m[x];
            }
            best = best.max(total / mass);
        }
    }
    best
}

fn fujii_dyadic(w: &[f64]) -> f64 {
    let n = w.len();
    let depth = n.trailing_zeros();
    let prefix = PrefixSums::new(w);
    let mut best = 1.0_f64;
    let mut m = vec![0.0_f64; n];
    for gen in 0..=depth {
        let width = n >> gen;
        for idx in 0..(1usize << gen) {
            let (s, e) = (idx * width, (idx + 1) * width);
            m[s..e].iter_mut().for_each(|v| *v = 0.0);
            for sub in gen..=depth {
                let sw = n >> sub;
                let mut q = s;
                while q < e {
                    let avg = prefix.mean(q, q + sw);
                    for v in &mut m[q..q + sw] {
                        *v = v.max(avg);
                    }
                    q += sw;
                }
            }
            let total: f64 = m[s..e].iter().sum();
            best = best.max(total / prefix.sum(s, e));
        }
    }
    best
}

/// Outcome of [`reverse_holder_check`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReverseHolderReport {
    pub tau: f64,
    pub fujii: f64,
    /// `1 + 1/(τ [w]_{A_∞})`
    pub r_w: f64,
    /// `max_Q (avg_Q w^{r_w})^{1/r_w} / (2 avg_Q w)`
    pub worst_ratio: f64,
}

/// Sharp reverse Hölder inequality with exponent `r_w = 1 + 1/(τ[w]_{A_∞})`.
pub fn reverse_holder_check(w: &Weight, tau: f64, mode: IntervalMode) -> Result<ReverseHolderReport> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(CzError::Domain(format!("tau must be positive, got {tau}")));
    }
    let fujii = w.fujii(mode);
    let r_w = 1.0 + 1.0 / (tau * fujii);
    let worst_ratio = reverse_holder_ratio(w.values().values(), r_w);
    Ok(ReverseHolderReport { tau, fujii, r_w, worst_ratio })
}

fn reverse_holder_ratio(w: &[f64], r: f64) -> f64 {
    let powed: Vec<f64> = w.iter().map(|v| v.powf(r)).collect();
    let pw = PrefixSums::new(w);
    let pr = PrefixSums::new(&powed);
    let n = w.len();
    let mut worst = 0.0_f64;
    for s in 0..n {
        for e in s + 1..=n {
            worst = worst.max(pr.mean(s, e).powf(1.0 / r) / (2.0 * pw.mean(s, e)));
        }
    }
    worst
}

/// Test weight families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum WeightKind {
    /// `w ≡ 1`
    Constant,
    /// 1 on the left half of the domain, 2 on the right half
    Step,
    /// `|x|^α` evaluated at cell midpoints, `α ∈ (-1, 1)`
    Power { alpha: f64 },
    /// `1 + |ln|x||`
    Loglike,
    /// `exp(B·g)` with `g` a seeded piecewise-linear function, `|g| ≤ 1`
    #[serde(rename = "random-ainf")]
    RandomAinf { seed: u64, bound: f64 },
}

impl WeightKind {
    pub fn label(&self) -> String {
        match self {
            WeightKind::Constant => "constant".into(),
            WeightKind::Step => "step".into(),
            WeightKind::Power { alpha } => format!("power({alpha})"),
            WeightKind::Loglike => "loglike".into(),
            WeightKind::RandomAinf { seed, bound } => format!("random-ainf({seed},{bound})"),
        }
    }
}

/// Number of nodes of the piecewise-linear exponent of random weights.
const RANDOM_NODES: usize = 17;

pub fn make_weight(kind: &WeightKind, grid: UniformGrid1D) -> Result<Weight> {
    let f = match kind {
        WeightKind::Constant => GridFunction::constant(grid, 1.0)?,
        WeightKind::Step => {
            let mid = 0.5 * (grid.a() + grid.b());
            GridFunction::from_fn(grid, |x| if x < mid { 1.0 } else { 2.0 })?
        }
        WeightKind::Power { alpha } => {
            if !(*alpha > -1.0 && *alpha < 1.0) {
                return Err(CzError::Domain(format!("power weight exponent must lie in (-1, 1), got {alpha}")));
            }
            GridFunction::from_fn(grid, |x| x.abs().powf(*alpha))?
        }
        WeightKind::Loglike => GridFunction::from_fn(grid, |x| 1.0 + x.abs().ln().abs())?,
        WeightKind::RandomAinf { seed, bound } => {
            if !(*bound >= 0.0 && bound.is_finite()) {
                return Err(CzError::Domain(format!("oscillation bound must be nonnegative, got {bound}")));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let nodes: Vec<f64> = (0..RANDOM_NODES).map(|_| rng.gen_range(-1.0..=1.0)).collect();
            let (a, len) = (grid.a(), grid.length());
            GridFunction::from_fn(grid, |x| {
                let s = (x - a) / len * (RANDOM_NODES - 1) as f64;
                let i = (s.floor() as usize).min(RANDOM_NODES - 2);
                let t = s - i as f64;
                (bound * ((1.0 - t) * nodes[i] + t * nodes[i + 1])).exp()
            })?
        }
    };
    Weight::new(f)
}

/// The weight families used for calibration and acceptance.
pub fn weight_menu() -> Vec<WeightKind> {
    let mut menu = vec![WeightKind::Constant, WeightKind::Step, WeightKind::Loglike];
    for alpha in [-0.75, -0.5, -0.25, 0.25, 0.5, 0.75] {
        menu.push(WeightKind::Power { alpha });
    }
    for seed in 1..=4 {
        menu.push(WeightKind::RandomAinf { seed, bound: 1.0 });
    }
    menu
}

/// Smallest `τ` (to relative precision `1e-3`) with every reverse Hölder
/// ratio over `weights` at most one, times [`TAU_SAFETY`].
pub fn calibrate_tau(weights: &[Weight], mode: IntervalMode) -> Result<f64> {
    if weights.is_empty() {
        return Err(CzError::Config("calibration needs at least one weight".into()));
    }
    let worst = |tau: f64| -> f64 {
        weights
            .iter()
            .map(|w| reverse_holder_ratio(w.values().values(), 1.0 + 1.0 / (tau * w.fujii(mode))))
            .fold(0.0, f64::max)
    };
    let (mut lo, mut hi) = (1e-4_f64, 1e4_f64);
    if worst(hi) > 1.0 {
        return Err(CzError::Estimation(format!("reverse Hölder fails even at tau = {hi}")));
    }
    if worst(lo) <= 1.0 {
        return Ok(lo * TAU_SAFETY);
    }
    while hi / lo > 1.0 + 1e-3 {
        let mid = (lo * hi).sqrt();
        if worst(mid) <= 1.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi * TAU_SAFETY)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn sym(n: usize) -> UniformGrid1D {
        UniformGrid1D::new(-1.0, 1.0, n).unwrap()
    }

    fn brute_intervals(n: usize, mut value: impl FnMut(usize, usize) -> f64) -> f64 {
        let mut best = f64::NEG_INFINITY;
        for s in 0..n {
            for e in s + 1..=n {
                best = best.max(value(s, e));
            }
        }
        best
    }

    #[test]
    fn constant_weight_constants() {
        let w = make_weight(&WeightKind::Constant, sym(64)).unwrap();
        assert_eq!(w.a1(), 1.0);
        assert_relative_eq!(w.ap(2.0).unwrap(), 1.0, max_relative = 1e-14);
        assert_relative_eq!(w.fujii(IntervalMode::AllIntervals), 1.0, max_relative = 1e-14);
        assert_relative_eq!(w.fujii(IntervalMode::Dyadic), 1.0, max_relative = 1e-14);
        let rh = reverse_holder_check(&w, 1.0, IntervalMode::AllIntervals).unwrap();
        assert_relative_eq!(rh.worst_ratio, 0.5, max_relative = 1e-14);
        assert!(w.ap(1.0).is_err());
    }

    #[test]
    fn step_weight_matches_enumeration() {
        let g = UniformGrid1D::new(0.0, 1.0, 256).unwrap();
        let w = make_weight(&WeightKind::Step, g).unwrap();
        let v = w.values().values().to_vec();
        let a1 = brute_intervals(256, |s, e| {
            let q = &v[s..e];
            q.iter().sum::<f64>() / q.len() as f64 / q.iter().cloned().fold(f64::INFINITY, f64::min)
        });
        assert_relative_eq!(w.a1(), a1, max_relative = 1e-13);
        let a2 = brute_intervals(256, |s, e| {
            let q = &v[s..e];
            let m = q.len() as f64;
            q.iter().sum::<f64>() / m * q.iter().map(|x| 1.0 / x).sum::<f64>() / m
        });
        assert_relative_eq!(w.ap(2.0).unwrap(), a2, max_relative = 1e-13);
        let rh = reverse_holder_check(&w, 4.0, IntervalMode::AllIntervals).unwrap();
        assert!(rh.worst_ratio <= 1.0);
    }

    /// `M(χ_Q w)` on `Q` by enumerating subintervals of `Q`.
    fn brute_fujii(w: &[f64]) -> f64 {
        let n = w.len();
        brute_intervals(n, |s, e| {
            let mut total = 0.0;
            for x in s..e {
                let mut m = 0.0_f64;
                for a in s..=x {
                    for b in x + 1..=e {
                        m = m.max(w[a..b].iter().sum::<f64>() / (b - a) as f64);
                    }
                }
                total += m;
            }
            total / w[s..e].iter().sum::<f64>()
        })
    }

    #[test]
    fn fujii_matches_enumeration() {
        for kind in [WeightKind::Step, WeightKind::Power { alpha: -0.5 }, WeightKind::RandomAinf { seed: 3, bound: 2.0 }] {
            let w = make_weight(&kind, sym(32)).unwrap();
            assert_relative_eq!(w.fujii(IntervalMode::AllIntervals), brute_fujii(w.values().values()), max_relative = 1e-12);
        }
    }

    #[test]
    fn dyadic_fujii_by_hand() {
        // w = (1, 3): on the root M(χ_Q w) = (2, 3), so (2 + 3)/4; leaves give 1
        let g = UniformGrid1D::new(0.0, 1.0, 2).unwrap();
        let w = Weight::new(GridFunction::new(g, vec![1.0, 3.0]).unwrap()).unwrap();
        assert_relative_eq!(w.fujii(IntervalMode::Dyadic), 1.25, max_relative = 1e-15);
        assert_relative_eq!(w.fujii(IntervalMode::AllIntervals), 1.25, max_relative = 1e-15);
    }

    #[test]
    fn power_weight_values_and_growth() {
        let g = sym(64);
        let w = make_weight(&WeightKind::Power { alpha: -0.5 }, g).unwrap();
        for (i, v) in w.values().values().iter().enumerate() {
            assert_relative_eq!(*v, g.midpoint(i).abs().powf(-0.5), max_relative = 1e-15);
        }
        let fine = make_weight(&WeightKind::Power { alpha: -0.5 }, sym(256)).unwrap();
        assert!(fine.a1() > w.a1() && w.a1().is_finite());
        assert!(make_weight(&WeightKind::Power { alpha: 1.0 }, g).is_err());
        assert!(make_weight(&WeightKind::Power { alpha: -1.0 }, g).is_err());
    }

    #[test]
    fn random_weight_is_bounded() {
        let bound = 1.5;
        let w = make_weight(&WeightKind::RandomAinf { seed: 9, bound }, sym(256)).unwrap();
        assert!(w.values().values().iter().all(|v| *v > 0.0));
        assert!(w.a1() <= (2.0 * bound).exp());
        let again = make_weight(&WeightKind::RandomAinf { seed: 9, bound }, sym(256)).unwrap();
        assert_eq!(w, again);
    }

    #[test]
    fn fujii_below_a1_on_menu() {
        for kind in weight_menu() {
            let w = make_weight(&kind, sym(128)).unwrap();
            let f = w.fujii(IntervalMode::AllIntervals);
            assert!(f >= 1.0 && f <= w.a1() * (1.0 + 1e-12), "{}: fujii {f} a1 {}", kind.label(), w.a1());
        }
    }

    #[test]
    fn calibrated_tau_is_reproduced() {
        let weights: Vec<Weight> = weight_menu().iter().map(|k| make_weight(k, sym(1 << 10)).unwrap()).collect();
        let tau = calibrate_tau(&weights, IntervalMode::AllIntervals).unwrap();
        assert_relative_eq!(tau, CALIBRATED_TAU, max_relative = 2e-3);
    }

    #[test]
    fn clone_keeps_cache() {
        let w = make_weight(&WeightKind::Step, sym(16)).unwrap();
        let a = w.a1();
        let c = w.clone();
        assert_eq!(c.a1.get(), Some(&a));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn ap_nonincreasing_in_p(v in prop::collection::vec(0.1f64..10.0, 32), p in 1.1f64..4.0, gap in 0.0f64..3.0) {
            let g = sym(32);
            let w = Weight::new(GridFunction::new(g, v).unwrap()).unwrap();
            prop_assert!(w.ap(p + gap).unwrap() <= w.ap(p).unwrap() * (1.0 + 1e-12));
        }

        #[test]
        fn constants_are_scale_invariant(v in prop::collection::vec(0.1f64..10.0, 16), c in 0.01f64..100.0) {
            let g = sym(16);
            let w = Weight::new(GridFunction::new(g, v.clone()).unwrap()).unwrap();
            let cw = Weight::new(GridFunction::new(g, v.iter().map(|x| c * x).collect()).unwrap()).unwrap();
            prop_assert!((w.a1() - cw.a1()).abs() <= 1e-12 * w.a1());
            prop_assert!((w.ap(3.0).unwrap() - cw.ap(3.0).unwrap()).abs() <= 1e-12 * w.ap(3.0).unwrap());
            for mode in [IntervalMode::AllIntervals, IntervalMode::Dyadic] {
                prop_assert!((w.fujii(mode) - cw.fujii(mode)).abs() <= 1e-12 * w.fujii(mode));
            }
        }
    }
}
