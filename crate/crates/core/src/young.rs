//! Scalar calculus of the Young-type functions used throughout the crate.
//!
//! Families:
//!
//! | family      | formula                                   |
//! |-------------|-------------------------------------------|
//! | `PhiRho`    | `t (1 + log⁺ t)^ρ`                        |
//! | `PsiS`      | `exp(t^s) − 1`                            |
//! | `XRho`      | `t / (1 + log⁺ t)^ρ`                      |
//! | `XTildeRho` | `t / (1 + log⁺(t / ρ^ρ))^ρ`, `ρ > 1`      |
//! | `Power`     | `t^r`                                     |
//! | `Identity`  | `t`                                       |
//!
//! `log⁺ t = max(ln t, 0)` with `log⁺ 0 = 0`.  `PsiS` saturates to `+∞` once
//! `t^s` exceeds [`PSI_OVERFLOW_EXPONENT`].

use serde::{Deserialize, Serialize};

use crate::error::{CzError, Result};

/// `exp(x)` is not representable for `x` much beyond this.
pub const PSI_OVERFLOW_EXPONENT: f64 = 700.0;

/// Default relative tolerance for [`YoungSpec::invert`].
pub const DEFAULT_INVERT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum YoungFamily {
    PhiRho,
    PsiS,
    XRho,
    XTildeRho,
    Power,
    Identity,
}

/// A member of one of the parametric families above.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct YoungSpec {
    pub family: YoungFamily,
    #[serde(default)]
    pub param: f64,
}

#[inline]
fn log_plus(t: f64) -> f64 {
    if t > 1.0 {
        t.ln()
    } else {
        0.0
    }
}

impl YoungSpec {
    /// `Φ_ρ(t) = t (1 + log⁺ t)^ρ`. `ρ = 0` is the identity.
    pub fn phi(rho: f64) -> Result<Self> {
        if !(rho.is_finite() && rho >= 0.0) {
            return Err(CzError::Domain(format!("PhiRho needs rho >= 0, got {rho}")));
        }
        Ok(Self { family: YoungFamily::PhiRho, param: rho })
    }

    /// `Ψ_s(t) = exp(t^s) − 1`.
    pub fn psi(s: f64) -> Result<Self> {
        if !(s.is_finite() && s > 0.0) {
            return Err(CzError::Domain(format!("PsiS needs s > 0, got {s}")));
        }
        Ok(Self { family: YoungFamily::PsiS, param: s })
    }

    pub fn x_rho(rho: f64) -> Result<Self> {
        if !(rho.is_finite() && rho >= 0.0) {
            return Err(CzError::Domain(format!("XRho needs rho >= 0, got {rho}")));
        }
        Ok(Self { family: YoungFamily::XRho, param: rho })
    }

    pub fn x_tilde(rho: f64) -> Result<Self> {
        if !(rho.is_finite() && rho > 1.0) {
            return Err(CzError::Domain(format!("XTildeRho needs rho > 1, got {rho}")));
        }
        Ok(Self { family: YoungFamily::XTildeRho, param: rho })
    }

    pub fn power(r: f64) -> Result<Self> {
        if !(r.is_finite() && r > 0.0) {
            return Err(CzError::Domain(format!("Power needs r > 0, got {r}")));
        }
        Ok(Self { family: YoungFamily::Power, param: r })
    }

    pub fn identity() -> Self {
        Self { family: YoungFamily::Identity, param: 1.0 }
    }

    /// Re-checks the parameter constraints of a deserialized spec.
    pub fn validated(self) -> Result<Self> {
        match self.family {
            YoungFamily::PhiRho => Self::phi(self.param),
            YoungFamily::PsiS => Self::psi(self.param),
            YoungFamily::XRho => Self::x_rho(self.param),
            YoungFamily::XTildeRho => Self::x_tilde(self.param),
            YoungFamily::Power => Self::power(self.param),
            YoungFamily::Identity => Ok(Self::identity()),
        }
    }

    /// True when the function is a Young function in the strict sense
    /// (convex, increasing, zero at zero, unbounded).
    pub fn is_young(&self) -> bool {
        match self.family {
            YoungFamily::PhiRho | YoungFamily::Identity => true,
            YoungFamily::PsiS | YoungFamily::Power => self.param >= 1.0,
            YoungFamily::XRho | YoungFamily::XTildeRho => false,
        }
    }

    /// True when `t ↦ evaluate(t)` is nondecreasing on `[0, ∞)`.
    pub fn is_increasing(&self) -> bool {
        match self.family {
            YoungFamily::PhiRho | YoungFamily::PsiS | YoungFamily::Power | YoungFamily::Identity => true,
            // derivative of t/(1+ln t)^ρ is (1+ln t)^{-ρ-1}(1 + ln t − ρ)
            YoungFamily::XRho => self.param <= 1.0,
            YoungFamily::XTildeRho => false,
        }
    }

    pub fn label(&self) -> String {
        match self.family {
            YoungFamily::PhiRho => format!("L(log L)^{}", self.param),
            YoungFamily::PsiS => format!("exp L^{}", self.param),
            YoungFamily::XRho => format!("X_{}", self.param),
            YoungFamily::XTildeRho => format!("X~_{}", self.param),
            YoungFamily::Power => format!("L^{}", self.param),
            YoungFamily::Identity => "L^1".to_string(),
        }
    }

    /// Closed-form value, without argument checks. May return `+∞` for `PsiS`.
    #[inline]
    pub fn value(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let p = self.param;
        match self.family {
            YoungFamily::Identity => t,
            YoungFamily::Power => t.powf(p),
            YoungFamily::PhiRho => {
                let lp = log_plus(t);
                if lp == 0.0 {
                    t
                } else {
                    t * (1.0 + lp).powf(p)
                }
            }
            YoungFamily::XRho => {
                let lp = log_plus(t);
                if lp == 0.0 {
                    t
                } else {
                    t / (1.0 + lp).powf(p)
                }
            }
            YoungFamily::XTildeRho => {
                let t_rho = p.powf(p);
                let lp = log_plus(t / t_rho);
                if lp == 0.0 {
                    t
                } else {
                    t / (1.0 + lp).powf(p)
                }
            }
            YoungFamily::PsiS => {
                let ts = t.powf(p);
                if ts > PSI_OVERFLOW_EXPONENT {
                    f64::INFINITY
                } else {
                    ts.exp_m1()
                }
            }
        }
    }

    /// `(Φ(t), t·Φ'(t))` given `t > 0` and `ln t`.
    ///
    /// Used by the Luxemburg solver, which works in `ln λ` and needs the
    /// logarithmic derivative of the Orlicz average.
    #[inline]
    pub(crate) fn value_and_log_slope(&self, t: f64, ln_t: f64) -> (f64, f64) {
        let p = self.param;
        match self.family {
            YoungFamily::Identity => (t, t),
            YoungFamily::Power => {
                let v = (p * ln_t).exp();
                (v, p * v)
            }
            YoungFamily::PhiRho => {
                if ln_t <= 0.0 {
                    (t, t)
                } else {
                    let q = 1.0 + ln_t;
                    let v = t * (p * q.ln()).exp();
                    (v, v * (1.0 + p / q))
                }
            }
            YoungFamily::XRho => {
                if ln_t <= 0.0 {
                    (t, t)
                } else {
                    let q = 1.0 + ln_t;
                    let v = t * (-p * q.ln()).exp();
                    (v, v * (1.0 - p / q))
                }
            }
            YoungFamily::XTildeRho => {
                let shifted = ln_t - p * p.ln();
                if shifted <= 0.0 {
                    (t, t)
                } else {
                    let q = 1.0 + shifted;
                    let v = t * (-p * q.ln()).exp();
                    (v, v * (1.0 - p / q))
                }
            }
            YoungFamily::PsiS => {
                let ts = (p * ln_t).exp();
                if ts > PSI_OVERFLOW_EXPONENT {
                    (f64::INFINITY, f64::INFINITY)
                } else {
                    (ts.exp_m1(), p * ts * ts.exp())
                }
            }
        }
    }

    /// Checked evaluation: `t` must be finite and nonnegative.
    pub fn evaluate(&self, t: f64) -> Result<f64> {
        if !t.is_finite() || t < 0.0 {
            return Err(CzError::Domain(format!("Young function argument must be finite and >= 0, got {t}")));
        }
        Ok(self.value(t))
    }

    /// Generalized inverse by geometric bracketing and bisection.
    ///
    /// Returns `t` with `|Φ(t) − y| ≤ tol·max(1, y)`.
    pub fn invert(&self, y: f64, tol: f64) -> Result<f64> {
        if !(tol > 0.0) || !tol.is_finite() {
            return Err(CzError::Config(format!("inversion tolerance must be positive, got {tol}")));
        }
        if !y.is_finite() || y < 0.0 {
            return Err(CzError::Domain(format!("cannot invert at y = {y}")));
        }
        if !self.is_increasing() {
            return Err(CzError::Domain(format!("{} is not monotone; no inverse", self.label())));
        }
        if y == 0.0 {
            return Ok(0.0);
        }
        let slack = tol * y.max(1.0);
        let mut lo = 0.0_f64;
        let mut hi = 1.0_f64;
        while self.value(hi) < y {
            lo = hi;
            hi *= 2.0;
            if !hi.is_finite() {
                return Err(CzError::Domain(format!("no bracket found for y = {y}")));
            }
        }
        for _ in 0..400 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let v = self.value(mid);
            if (v - y).abs() <= slack {
                return Ok(mid);
            }
            if v < y {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        // bracket collapsed to adjacent floats; pick the closer end
        let (vl, vh) = (self.value(lo), self.value(hi));
        Ok(if (vl - y).abs() <= (vh - y).abs() { lo } else { hi })
    }
}

/// `(lower, value, upper)` from one of the inverse-function lemmas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LemmaTriple {
    pub lower: f64,
    pub value: f64,
    pub upper: f64,
}

impl LemmaTriple {
    /// `lower ≤ value ≤ upper` up to relative slack `rel`.
    pub fn is_ordered(&self, rel: f64) -> bool {
        let scale = self.value.abs().max(self.upper.abs()).max(f64::MIN_POSITIVE);
        self.lower <= self.value + rel * scale && self.value <= self.upper + rel * scale
    }
}

fn check_lemma_args(t: f64, rho: f64) -> Result<()> {
    if !t.is_finite() || t < 0.0 {
        return Err(CzError::Domain(format!("t must be finite and >= 0, got {t}")));
    }
    if !rho.is_finite() || rho <= 0.0 {
        return Err(CzError::Domain(format!("rho must be positive, got {rho}")));
    }
    Ok(())
}

/// `((1+ρ)^{-ρ} t, X_ρ(A_ρ(t)), t)` where `A_ρ = Φ_ρ`.
pub fn check_lemma_42(t: f64, rho: f64) -> Result<LemmaTriple> {
    check_lemma_args(t, rho)?;
    let a = YoungSpec::phi(rho)?.evaluate(t)?;
    let value = YoungSpec::x_rho(rho)?.evaluate(a)?;
    Ok(LemmaTriple { lower: (1.0 + rho).powf(-rho) * t, value, upper: t })
}

/// `((1−1/e)^ρ t, A_ρ(X̃_ρ(t)), t (1 + ρ ln ρ)^ρ)`, `ρ > 1`.
pub fn check_lemma_43(t: f64, rho: f64) -> Result<LemmaTriple> {
    check_lemma_args(t, rho)?;
    if rho <= 1.0 {
        return Err(CzError::Domain(format!("lemma requires rho > 1, got {rho}")));
    }
    let xt = YoungSpec::x_tilde(rho)?.evaluate(t)?;
    let value = YoungSpec::phi(rho)?.evaluate(xt)?;
    let lower = (1.0 - (-1.0f64).exp()).powf(rho) * t;
    let upper = t * (1.0 + rho * rho.ln()).powf(rho);
    Ok(LemmaTriple { lower, value, upper })
}

/// Log-spaced abscissae on which inverse conditions are spot-checked.
pub fn spot_check_grid() -> Vec<f64> {
    // 1e-8 .. 1e14, 20 points per decade
    (0..=440).map(|i| 10f64.powf(-8.0 + i as f64 / 20.0)).collect()
}

/// `sup_t Π_i Φ_i^{-1}(t) / Φ_0^{-1}(t)` over [`spot_check_grid`]: the
/// smallest `κ` the grid can certify for `Π Φ_i^{-1} ≤ κ Φ_0^{-1}`.
pub fn inverse_condition_constant(phi0: &YoungSpec, factors: &[YoungSpec]) -> Result<f64> {
    let mut worst = 0.0_f64;
    for t in spot_check_grid() {
        let mut prod = 1.0;
        for s in factors {
            prod *= s.invert(t, DEFAULT_INVERT_TOL)?;
        }
        let base = phi0.invert(t, DEFAULT_INVERT_TOL)?;
        if base > 0.0 {
            worst = worst.max(prod / base);
        }
    }
    Ok(worst)
}

/// Errors unless `Π Φ_i^{-1}(t) ≤ κ Φ_0^{-1}(t)` on the spot-check grid.
pub fn check_inverse_condition(phi0: &YoungSpec, factors: &[YoungSpec], kappa: f64) -> Result<()> {
    if !(kappa > 0.0) {
        return Err(CzError::Config(format!("kappa must be positive, got {kappa}")));
    }
    let needed = inverse_condition_constant(phi0, factors)?;
    if needed > kappa * (1.0 + 1e-9) {
        return Err(CzError::Precondition(format!(
            "inverse condition fails: product of inverses needs kappa >= {needed:.6e}, got {kappa:.6e}"
        )));
    }
    Ok(())
}

/// `(Φ_0(Π x_i / κ), Σ Φ_i(x_i))`; the first never exceeds the second when
/// the inverse condition holds.
pub fn check_scalar_product_bound(
    phi0: &YoungSpec,
    factors: &[YoungSpec],
    kappa: f64,
    xs: &[f64],
) -> Result<(f64, f64)> {
    if factors.len() != xs.len() || factors.is_empty() {
        return Err(CzError::Config(format!(
            "need one argument per factor: {} factors, {} arguments",
            factors.len(),
            xs.len()
        )));
    }
    check_inverse_condition(phi0, factors, kappa)?;
    let mut prod = 1.0;
    let mut rhs = 0.0;
    for (s, &x) in factors.iter().zip(xs) {
        rhs += s.evaluate(x)?;
        prod *= x;
    }
    let lhs = phi0.evaluate(prod / kappa)?;
    Ok((lhs, rhs))
}
