//! k-deformed gamma and Pochhammer machinery.

use crate::error::{ensure_positive, Error, Result};
use crate::special::{gamma, ln_gamma};
use serde::{Deserialize, Serialize};

/// The four structure parameters `(α, β, γ, k)` of the generalized
/// Mittag-Leffler function. All strictly positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MLParams {
    alpha: f64,
    beta: f64,
    gamma: f64,
    k: f64,
}

impl MLParams {
    pub fn new(alpha: f64, beta: f64, gamma: f64, k: f64) -> Result<Self> {
        ensure_positive("alpha", alpha)?;
        ensure_positive("beta", beta)?;
        ensure_positive("gamma", gamma)?;
        ensure_positive("k", k)?;
        let p = MLParams {
            alpha,
            beta,
            gamma,
            k,
        };
        if !(p.gamma_over_k().is_finite() && p.beta_over_alpha().is_finite()) {
            return Err(Error::domain(
                "parameter ratios gamma/k and beta/alpha must be finite",
            ));
        }
        Ok(p)
    }

    /// `α = β = γ = k = 1`, where the function reduces to `exp`.
    pub fn unit() -> Self {
        MLParams {
            alpha: 1.0,
            beta: 1.0,
            gamma: 1.0,
            k: 1.0,
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn beta(&self) -> f64 {
        self.beta
    }
    pub fn gamma(&self) -> f64 {
        self.gamma
    }
    pub fn k(&self) -> f64 {
        self.k
    }

    /// `γ/k`, the numerator parameter of the equivalent ₁F₁.
    pub fn gamma_over_k(&self) -> f64 {
        self.gamma / self.k
    }

    /// `β/α`, the denominator parameter of the equivalent ₁F₁.
    pub fn beta_over_alpha(&self) -> f64 {
        self.beta / self.alpha
    }

    /// `k/α`, the argument scale of the equivalent ₁F₁.
    pub fn k_over_alpha(&self) -> f64 {
        self.k / self.alpha
    }
}

const LN_MAX: f64 = 709.782_712_893_384;

/// `Γ_k(x) = k^{x/k - 1} Γ(x/k)`.
pub fn k_gamma(x: f64, k: f64) -> Result<f64> {
    ensure_positive("x", x)?;
    ensure_positive("k", k)?;
    let s = x / k;
    let g = gamma(s);
    let p = k.powf(s - 1.0);
    let direct = g * p;
    if g.is_finite() && p.is_finite() && direct.is_finite() && direct > 0.0 {
        return Ok(direct);
    }
    let ln = ln_k_gamma(x, k)?;
    if ln > LN_MAX {
        return Err(Error::Overflow(format!("k_gamma({x}, {k}) = exp({ln})")));
    }
    Ok(ln.exp())
}

/// `ln Γ_k(x)`; never overflows.
pub fn ln_k_gamma(x: f64, k: f64) -> Result<f64> {
    ensure_positive("x", x)?;
    ensure_positive("k", k)?;
    let s = x / k;
    Ok((s - 1.0) * k.ln() + ln_gamma(s))
}

/// Pochhammer k-symbol `(x)_{n,k} = x (x + k) ⋯ (x + (n-1)k)`, evaluated as
/// the direct product. `k = 0` gives `x^n`.
pub fn k_pochhammer(x: f64, n: u32, k: f64) -> Result<f64> {
    ensure_positive("x", x)?;
    if !(k >= 0.0) || !k.is_finite() {
        return Err(Error::domain("k must be non-negative"));
    }
    let mut acc = 1.0;
    for j in 0..n {
        acc *= x + j as f64 * k;
    }
    if !acc.is_finite() {
        return Err(Error::Overflow(format!("k_pochhammer({x}, {n}, {k})")));
    }
    Ok(acc)
}

/// `ln (x)_{n,k}` via the gamma-ratio form `n ln k + ln Γ(x/k + n) - ln Γ(x/k)`
/// (or `n ln x` when `k = 0`).
pub fn ln_k_pochhammer(x: f64, n: u32, k: f64) -> Result<f64> {
    ensure_positive("x", x)?;
    if !(k >= 0.0) || !k.is_finite() {
        return Err(Error::domain("k must be non-negative"));
    }
    if n == 0 {
        return Ok(0.0);
    }
    if k == 0.0 {
        return Ok(n as f64 * x.ln());
    }
    let s = x / k;
    Ok(n as f64 * k.ln() + ln_gamma(s + n as f64) - ln_gamma(s))
}

/// `Γ_α(β + αn) = Γ(β) (β)_{n,α}`.
pub fn gen_gamma(params: &MLParams, n: u32) -> Result<f64> {
    let head = gamma(params.beta);
    let value = head * k_pochhammer(params.beta, n, params.alpha)?;
    if !value.is_finite() {
        return Err(Error::Overflow(format!(
            "gen_gamma(n = {n}) exceeds f64 range"
        )));
    }
    Ok(value)
}

/// `ln Γ_α(β + αn)`, finite for any `n` representable as `u32`.
pub fn ln_gen_gamma(params: &MLParams, n: u32) -> Result<f64> {
    Ok(ln_gamma(params.beta) + ln_k_pochhammer(params.beta, n, params.alpha)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_reject_non_positive() {
        assert!(MLParams::new(0.0, 1.0, 1.0, 1.0).is_err());
        assert!(MLParams::new(1.0, -1.0, 1.0, 1.0).is_err());
        assert!(MLParams::new(1.0, 1.0, f64::NAN, 1.0).is_err());
        let e = MLParams::new(1.0, 1.0, 1.0, 0.0).unwrap_err();
        assert_eq!(e.to_string(), "k must be positive");
    }

    #[test]
    fn k_gamma_examples() {
        assert!((k_gamma(5.0, 1.0).unwrap() - 24.0).abs() < 1e-12);
        let sqrt_pi = std::f64::consts::PI.sqrt();
        assert!((k_gamma(0.5, 1.0).unwrap() - sqrt_pi).abs() < 1e-14);
        assert!((k_gamma(2.0, 2.0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn k_gamma_domain_and_overflow() {
        assert!(matches!(k_gamma(0.0, 1.0), Err(Error::Domain(_))));
        assert!(matches!(k_gamma(1.0, -2.0), Err(Error::Domain(_))));
        assert!(matches!(k_gamma(400.0, 1.0), Err(Error::Overflow(_))));
        assert!(ln_k_gamma(400.0, 1.0).unwrap().is_finite());
    }

    #[test]
    fn pochhammer_examples() {
        assert_eq!(k_pochhammer(3.7, 0, 2.0).unwrap(), 1.0);
        assert_eq!(k_pochhammer(3.0, 4, 0.0).unwrap(), 81.0);
        assert_eq!(k_pochhammer(2.0, 3, 1.0).unwrap(), 24.0);
        assert!(matches!(k_pochhammer(0.0, 3, 1.0), Err(Error::Domain(_))));
        assert!(matches!(k_pochhammer(1.0, 3, -1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn gen_gamma_examples() {
        let unit = MLParams::unit();
        assert!((gen_gamma(&unit, 4).unwrap() - 24.0).abs() < 1e-12);
        let p = MLParams::new(2.0, 3.0, 1.0, 1.0).unwrap();
        assert!((gen_gamma(&p, 0).unwrap() - 2.0).abs() < 1e-14);
        assert!((gen_gamma(&p, 2).unwrap() - 30.0).abs() < 1e-12);
    }

    #[test]
    fn gen_gamma_overflow_is_distinguishable() {
        let p = MLParams::new(3.0, 1.0, 1.0, 1.0).unwrap();
        assert!(matches!(gen_gamma(&p, 1000), Err(Error::Overflow(_))));
        let ln = ln_gen_gamma(&p, 1_000_000).unwrap();
        assert!(ln.is_finite() && ln > 0.0);
    }
}
