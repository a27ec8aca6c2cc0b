//! Barut-Girardello coherent states over the generalized Mittag-Leffler Fock
//! structure, in a truncated number basis.

use crate::error::{ensure_non_negative, Error, Result};
use crate::kcore::MLParams;
use crate::mlfunc::{ml_eval, ml_eval_complex, EvalConfig};
use crate::special::Compensated;
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::TAU;

/// Discarded probability mass allowed when truncating a coherent state.
pub const TAIL_MASS: f64 = 1e-12;

/// Largest top-of-window amplitude that raising may silently drop.
pub const RAISE_SLACK: f64 = 1e-14;

/// A complex label `z = |z| e^{iφ}` with the phase wrapped to `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CSLabel {
    modulus: f64,
    phase: f64,
}

impl CSLabel {
    pub fn new(modulus: f64, phase: f64) -> Result<Self> {
        ensure_non_negative("modulus", modulus)?;
        if !phase.is_finite() {
            return Err(Error::domain("phase must be finite"));
        }
        let mut phase = phase.rem_euclid(TAU);
        if phase >= TAU {
            phase = 0.0;
        }
        Ok(CSLabel { modulus, phase })
    }

    /// A real, non-negative label.
    pub fn real(modulus: f64) -> Result<Self> {
        Self::new(modulus, 0.0)
    }

    pub fn from_complex(z: Complex64) -> Result<Self> {
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::domain("label must be finite"));
        }
        Self::new(z.norm(), z.arg())
    }

    pub fn modulus(&self) -> f64 {
        self.modulus
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    /// `|z|²`
    pub fn abs2(&self) -> f64 {
        self.modulus * self.modulus
    }

    pub fn to_complex(&self) -> Complex64 {
        if self.phase == 0.0 {
            Complex64::new(self.modulus, 0.0)
        } else {
            Complex64::from_polar(self.modulus, self.phase)
        }
    }
}

/// Amplitudes `c_0..c_N` of a state in the number basis.
#[derive(Debug, Clone, PartialEq)]
pub struct FockExpansion {
    coeffs: Vec<Complex64>,
    params: MLParams,
    tail_mass: f64,
}

impl FockExpansion {
    pub fn new(coeffs: Vec<Complex64>, params: MLParams) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::domain("expansion needs at least one coefficient"));
        }
        if coeffs
            .iter()
            .any(|c| !(c.re.is_finite() && c.im.is_finite()))
        {
            return Err(Error::domain("coefficients must be finite"));
        }
        Ok(FockExpansion {
            coeffs,
            params,
            tail_mass: 0.0,
        })
    }

    /// The number state `|n⟩` in a window of `dim` levels.
    pub fn basis(params: MLParams, n: usize, dim: usize) -> Result<Self> {
        if n >= dim {
            return Err(Error::domain(format!(
                "level {n} does not fit in a window of {dim}"
            )));
        }
        let mut coeffs = vec![Complex64::new(0.0, 0.0); dim];
        coeffs[n] = Complex64::new(1.0, 0.0);
        Ok(FockExpansion {
            coeffs,
            params,
            tail_mass: 0.0,
        })
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn params(&self) -> &MLParams {
        &self.params
    }

    /// Index `N` of the highest retained level.
    pub fn truncation(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Upper bound on the probability mass beyond the window.
    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    pub fn norm_sqr(&self) -> f64 {
        let mut acc = Compensated::default();
        for c in &self.coeffs {
            acc.add(c.norm_sqr());
        }
        acc.value()
    }

    /// `⟨self|other⟩ = Σ c_n* d_n` over the common window.
    pub fn inner(&self, other: &FockExpansion) -> Complex64 {
        let mut re = Compensated::default();
        let mut im = Compensated::default();
        for (a, b) in self.coeffs.iter().zip(&other.coeffs) {
            let p = a.conj() * b;
            re.add(p.re);
            im.add(p.im);
        }
        Complex64::new(re.value(), im.value())
    }

    pub fn scale(&self, s: Complex64) -> FockExpansion {
        FockExpansion {
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
            params: self.params,
            tail_mass: self.tail_mass * s.norm_sqr(),
        }
    }

    /// Euclidean distance between two expansions, padding the shorter with zeros.
    pub fn distance(&self, other: &FockExpansion) -> f64 {
        let n = self.coeffs.len().max(other.coeffs.len());
        let zero = Complex64::new(0.0, 0.0);
        let mut acc = Compensated::default();
        for i in 0..n {
            let a = self.coeffs.get(i).copied().unwrap_or(zero);
            let b = other.coeffs.get(i).copied().unwrap_or(zero);
            acc.add((a - b).norm_sqr());
        }
        acc.value().sqrt()
    }
}

/// Structure constant `e(n) = n (β + α(n-1)) / (γ + k(n-1))`, `n ≥ 1`.
pub fn structure_e(params: &MLParams, n: u32) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("structure constant needs n >= 1"));
    }
    let m = (n - 1) as f64;
    Ok(n as f64 * (params.beta() + params.alpha() * m) / (params.gamma() + params.k() * m))
}

/// The linear-spectrum form `e(n) = (β/γ) n` reached formally at `α = k = 0`.
pub fn linear_structure_e(beta: f64, gamma: f64, n: u32) -> Result<f64> {
    crate::error::ensure_positive("beta", beta)?;
    crate::error::ensure_positive("gamma", gamma)?;
    if n == 0 {
        return Err(Error::domain("structure constant needs n >= 1"));
    }
    Ok(beta / gamma * n as f64)
}

fn e_of(params: &MLParams, n: usize) -> f64 {
    structure_e(params, n as u32).expect("n >= 1")
}

/// `A₋`: `c'_{n-1} = √e(n) c_n`, `c'_N = 0`. Not renormalized.
pub fn ladder_lower(state: &FockExpansion) -> FockExpansion {
    let n = state.coeffs.len();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for i in 1..n {
        out[i - 1] = state.coeffs[i] * e_of(&state.params, i).sqrt();
    }
    FockExpansion {
        coeffs: out,
        params: state.params,
        tail_mass: 0.0,
    }
}

/// `A₊`: `c'_{n+1} = √e(n+1) c_n`. The window is kept fixed, so the top
/// coefficient must be negligible.
pub fn ladder_raise(state: &FockExpansion) -> Result<FockExpansion> {
    let n = state.coeffs.len();
    let top = state.coeffs[n - 1].norm();
    if top > RAISE_SLACK {
        return Err(Error::TruncationOverflow { amplitude: top });
    }
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for i in 0..n - 1 {
        out[i + 1] = state.coeffs[i] * e_of(&state.params, i + 1).sqrt();
    }
    Ok(FockExpansion {
        coeffs: out,
        params: state.params,
        tail_mass: 0.0,
    })
}

/// The coherent state `|z⟩` with
/// `c_n = E(|z|²)^{-1/2} √[(γ)_{n,k} / (Γ_α(β+αn) n!)] zⁿ`,
/// truncated once the remaining probability mass is below [`TAIL_MASS`].
pub fn cs_build(z: CSLabel, params: &MLParams, cfg: &EvalConfig) -> Result<FockExpansion> {
    cs_build_with_tail(z, params, cfg, TAIL_MASS)
}

/// [`cs_build`] with an explicit bound on the discarded probability mass.
pub fn cs_build_with_tail(
    z: CSLabel,
    params: &MLParams,
    cfg: &EvalConfig,
    tail_mass: f64,
) -> Result<FockExpansion> {
    if !(tail_mass > 0.0 && tail_mass < 1.0) {
        return Err(Error::domain("tail mass must lie in (0, 1)"));
    }
    let (probs, tail) = cs_probabilities(z.abs2(), params, cfg, tail_mass)?;
    let coeffs = probs
        .iter()
        .enumerate()
        .map(|(n, p)| {
            let a = p.sqrt();
            if z.phase == 0.0 {
                Complex64::new(a, 0.0)
            } else {
                Complex64::from_polar(a, n as f64 * z.phase)
            }
        })
        .collect();
    Ok(FockExpansion {
        coeffs,
        params: *params,
        tail_mass: tail,
    })
}

/// `|c_n|²` for `n = 0..=N` together with a bound on the discarded mass.
fn cs_probabilities(
    x: f64,
    params: &MLParams,
    cfg: &EvalConfig,
    tail_mass: f64,
) -> Result<(Vec<f64>, f64)> {
    if x == 0.0 {
        return Ok((vec![1.0], 0.0));
    }
    let norm = ml_eval(params, x, cfg)?.value;
    let (alpha, beta, gamma, k) = (params.alpha(), params.beta(), params.gamma(), params.k());
    // Log-space recursion keeps p_0 = 1/(Γ(β) E(x)) meaningful when it underflows.
    let mut lp = -crate::special::ln_gamma(beta) - norm.ln();
    let mut probs = Vec::new();
    for n in 0..cfg.max_terms() {
        let nf = n as f64;
        probs.push(lp.exp());
        let num = gamma + nf * k;
        let den = (beta + nf * alpha) * (nf + 1.0);
        let rho = x * (num / (beta + nf * alpha)).max(k / alpha) / (nf + 1.0);
        if rho < 0.5 {
            let tail = lp.exp() * rho / (1.0 - rho);
            if tail < tail_mass {
                return Ok((probs, tail));
            }
        }
        lp += (x * num / den).ln();
    }
    Err(Error::NonConvergence {
        partial: probs.iter().sum(),
        tail: f64::NAN,
        terms: cfg.max_terms(),
    })
}

/// `⟨z1|z2⟩ = E(z1* z2) / √(E(|z1|²) E(|z2|²))`, with the numerator summed as a
/// complex series.
pub fn overlap(z1: CSLabel, z2: CSLabel, params: &MLParams, cfg: &EvalConfig) -> Result<Complex64> {
    let (a, b) = (z1.to_complex(), z2.to_complex());
    let num = ml_eval_complex(params, a.conj() * b, cfg)?.value;
    // Denominators go through the same routine so that ⟨z|z⟩ is exactly 1.
    let d1 = ml_eval_complex(params, a.conj() * a, cfg)?.value.re;
    let d2 = ml_eval_complex(params, b.conj() * b, cfg)?.value.re;
    let prod = d1 * d2;
    if prod.is_finite() && prod >= f64::MIN_POSITIVE {
        return Ok(num / prod.sqrt());
    }
    if a == b {
        return Ok(Complex64::new(1.0, 0.0));
    }
    Ok(num / d1.sqrt() / d2.sqrt())
}

/// The ordered expectation `⟨z| #(A₊A₋)^m# |z⟩ = |z|^{2m}`.
pub fn expectation_ordered_power(z: CSLabel, m: u32) -> f64 {
    z.abs2().powi(m as i32)
}

/// `‖A₋^m ψ‖² = ⟨ψ|A₊^m A₋^m|ψ⟩`, the same expectation computed in the number
/// basis by repeated lowering.
pub fn expectation_ordered_power_fock(state: &FockExpansion, m: u32) -> f64 {
    let mut s = state.clone();
    for _ in 0..m {
        s = ladder_lower(&s);
    }
    s.norm_sqr()
}

/// Photon-number probabilities `p_n = |c_n|²` of a coherent state.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhotonDistribution {
    pub probabilities: Vec<f64>,
    pub tail_mass: f64,
}

pub fn photon_distribution(
    z: CSLabel,
    params: &MLParams,
    cfg: &EvalConfig,
) -> Result<PhotonDistribution> {
    let (probabilities, tail_mass) = cs_probabilities(z.abs2(), params, cfg, TAIL_MASS)?;
    Ok(PhotonDistribution {
        probabilities,
        tail_mass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> EvalConfig {
        EvalConfig::default()
    }

    fn p2311() -> MLParams {
        MLParams::new(2.0, 3.0, 1.0, 1.0).unwrap()
    }

    #[test]
    fn label_wraps_phase() {
        let z = CSLabel::new(1.0, -std::f64::consts::FRAC_PI_2).unwrap();
        assert!((z.phase() - 1.5 * std::f64::consts::PI).abs() < 1e-15);
        assert_eq!(CSLabel::new(2.0, TAU).unwrap().phase(), 0.0);
        assert!(CSLabel::new(-1.0, 0.0).is_err());
    }

    #[test]
    fn structure_constants() {
        assert_eq!(structure_e(&MLParams::unit(), 7).unwrap(), 7.0);
        assert_eq!(structure_e(&p2311(), 2).unwrap(), 5.0);
        assert!(structure_e(&p2311(), 0).is_err());
        assert_eq!(linear_structure_e(2.0, 4.0, 3).unwrap(), 1.5);
    }

    #[test]
    fn ladder_examples() {
        let unit = MLParams::unit();
        let vac = FockExpansion::basis(unit, 0, 4).unwrap();
        assert_eq!(ladder_lower(&vac).norm_sqr(), 0.0);
        let up = ladder_raise(&vac).unwrap();
        assert_eq!(up.coeffs()[1], Complex64::new(1.0, 0.0));

        let three = FockExpansion::basis(unit, 3, 5).unwrap();
        let down = ladder_lower(&three);
        assert!((down.coeffs()[2].re - 3f64.sqrt()).abs() < 1e-15);

        let two = FockExpansion::basis(p2311(), 2, 4).unwrap();
        assert!((ladder_lower(&two).coeffs()[1].re - 5f64.sqrt()).abs() < 1e-15);
        let one = FockExpansion::basis(p2311(), 1, 4).unwrap();
        assert!((ladder_raise(&one).unwrap().coeffs()[2].re - 5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn raising_past_window_is_an_error() {
        let top = FockExpansion::basis(MLParams::unit(), 3, 4).unwrap();
        assert!(matches!(
            ladder_raise(&top),
            Err(Error::TruncationOverflow { .. })
        ));
    }

    #[test]
    fn vacuum_and_glauber_states() {
        let unit = MLParams::unit();
        let vac = cs_build(CSLabel::real(0.0).unwrap(), &p2311(), &cfg()).unwrap();
        assert_eq!(vac.coeffs(), &[Complex64::new(1.0, 0.0)]);

        let s = cs_build(CSLabel::real(1.0).unwrap(), &unit, &cfg()).unwrap();
        let mut fact = 1.0;
        for (n, c) in s.coeffs().iter().enumerate() {
            if n > 0 {
                fact *= n as f64;
            }
            let want = (-0.5f64).exp() / fact.sqrt();
            assert!((c.re - want).abs() < 1e-12 * want, "n={n}");
        }
        assert!((s.norm_sqr() - 1.0).abs() < 1e-10);
        assert!(s.tail_mass() < TAIL_MASS);
    }

    #[test]
    fn eigenvalue_property() {
        let z = CSLabel::new(1.3, 0.7).unwrap();
        let s = cs_build(z, &p2311(), &cfg()).unwrap();
        let lowered = ladder_lower(&s);
        let want = s.scale(z.to_complex());
        // The top coefficient has no partner above it in the window.
        for n in 0..s.truncation() {
            assert!((lowered.coeffs()[n] - want.coeffs()[n]).norm() < 1e-12);
        }
    }

    #[test]
    fn overlap_examples() {
        let unit = MLParams::unit();
        let one = CSLabel::real(1.0).unwrap();
        let two = CSLabel::real(2.0).unwrap();
        let o = overlap(one, two, &unit, &cfg()).unwrap();
        assert!((o.re - (-0.5f64).exp()).abs() < 1e-12);
        let z = CSLabel::new(1.7, 2.1).unwrap();
        assert_eq!(
            overlap(z, z, &p2311(), &cfg()).unwrap(),
            Complex64::new(1.0, 0.0)
        );
    }

    #[test]
    fn ordered_expectations() {
        let z = CSLabel::new(1.5, 0.3).unwrap();
        assert_eq!(expectation_ordered_power(z, 0), 1.0);
        assert_eq!(
            expectation_ordered_power(CSLabel::real(2.0).unwrap(), 1),
            4.0
        );
        assert_eq!(expectation_ordered_power(z, 2), 5.0625);
        let s = cs_build_with_tail(z, &p2311(), &cfg(), 1e-24).unwrap();
        for m in 0..4 {
            let fock = expectation_ordered_power_fock(&s, m);
            assert!(
                (fock - z.abs2().powi(m as i32)).abs() < 1e-9,
                "m={m}: {fock}"
            );
        }
    }

    #[test]
    fn photon_statistics() {
        let unit = MLParams::unit();
        let d = photon_distribution(CSLabel::real(0.0).unwrap(), &unit, &cfg()).unwrap();
        assert_eq!(d.probabilities, vec![1.0]);

        let lambda: f64 = 2.5;
        let d = photon_distribution(CSLabel::real(lambda.sqrt()).unwrap(), &unit, &cfg()).unwrap();
        let mut poisson = (-lambda).exp();
        for (n, p) in d.probabilities.iter().enumerate() {
            if n > 0 {
                poisson *= lambda / n as f64;
            }
            assert!((p - poisson).abs() < 1e-12 * poisson);
        }

        let p = p2311();
        let d = photon_distribution(CSLabel::real(1.0).unwrap(), &p, &cfg()).unwrap();
        for n in 0..d.probabilities.len() - 1 {
            let nf = n as f64;
            let want = (p.gamma() + nf * p.k()) / ((p.beta() + nf * p.alpha()) * (nf + 1.0));
            let ratio = d.probabilities[n + 1] / d.probabilities[n];
            assert!((ratio / want - 1.0).abs() < 1e-12);
        }
        assert!((d.probabilities.iter().sum::<f64>() - 1.0).abs() < 1e-10);
    }
}
