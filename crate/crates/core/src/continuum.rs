//! Continuous-spectrum counterparts: the nu-function, the integral
//! Mittag-Leffler function, and thermal distributions over `|E⟩`, `E ≥ 0`.
//!
//! All integrals over `E` are formed in log space around the integrand peak
//! `E*`, so that `ν(x) = e^{f(E*)} ∫ e^{f(E) - f(E*)} dE` stays finite well past
//! the point where `ν` itself overflows.

use crate::coherent::CSLabel;
use crate::error::{ensure_non_negative, ensure_positive, Error, Result};
use crate::kcore::MLParams;
use crate::quadrature::{self, composite_gauss_legendre, gauss_kronrod, QuadratureSpec};
use crate::special::{digamma, ln_gamma};
use num_complex::Complex64;
use serde::Serialize;

/// `ln` of the integrand `[(γ̃)_{E,k} / Γ̃_α(β+αE)] xᴱ / Γ(E+1)`.
#[derive(Debug, Clone, Copy)]
struct Kernel {
    ln_x: f64,
    /// `(γ/k, β/α)`, absent at unit parameters.
    ratio: Option<(f64, f64)>,
    ln_const: f64,
}

impl Kernel {
    fn unit(ln_x: f64) -> Self {
        Kernel {
            ln_x,
            ratio: None,
            ln_const: 0.0,
        }
    }

    fn general(params: &MLParams, x: f64) -> Self {
        let (a, b) = (params.gamma_over_k(), params.beta_over_alpha());
        if a == 1.0 && b == 1.0 && params.beta() == 1.0 {
            return Kernel {
                ln_x: (params.k_over_alpha() * x).ln(),
                ratio: None,
                ln_const: 0.0,
            };
        }
        Kernel {
            ln_x: (params.k_over_alpha() * x).ln(),
            ratio: Some((a, b)),
            ln_const: ln_gamma(b) - ln_gamma(a) - ln_gamma(params.beta()),
        }
    }

    fn log_f(&self, e: f64) -> f64 {
        let mut v = e * self.ln_x + self.ln_const - ln_gamma(e + 1.0);
        if let Some((a, b)) = self.ratio {
            v += ln_gamma(a + e) - ln_gamma(b + e);
        }
        v
    }

    fn slope(&self, e: f64) -> f64 {
        let mut v = self.ln_x - digamma(e + 1.0);
        if let Some((a, b)) = self.ratio {
            v += digamma(a + e) - digamma(b + e);
        }
        v
    }

    fn peak(&self) -> f64 {
        if self.slope(0.0) <= 0.0 {
            return 0.0;
        }
        let mut lo = 0.0;
        let mut hi = 1.0;
        while self.slope(hi) > 0.0 && hi < 1e9 {
            lo = hi;
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.slope(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-12 * hi {
                break;
            }
        }
        0.5 * (lo + hi)
    }

    /// Integration range `[0, cutoff]` and interior breakpoints.
    fn layout(&self, quad: &QuadratureSpec) -> (f64, Vec<f64>) {
        let peak = self.peak();
        let cutoff = quad
            .upper_cutoff
            .unwrap_or(peak + 40.0 + 10.0 * peak.sqrt());
        // Below x = 1 the integrand decays on the scale 1/|ln x| near E = 0.
        let first = if self.ln_x < 0.0 {
            (1.0 / -self.ln_x).min(1.0)
        } else {
            1.0
        };
        let mut points = vec![0.0];
        let mut p = first;
        while p < peak.min(cutoff) {
            points.push(p);
            p *= 4.0;
        }
        if peak > 0.0 && peak < cutoff {
            points.push(peak);
        }
        let mut p = first.max(peak);
        let step = if peak > 0.0 {
            peak.sqrt().max(1.0)
        } else {
            first
        };
        let mut width = step;
        while p + width < cutoff {
            p += width;
            points.push(p);
            width *= 2.0;
        }
        points.push(cutoff);
        points.sort_by(f64::total_cmp);
        points.dedup();
        (peak, points)
    }
}

/// Quadrature scheme for integrals over the energy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Scheme {
    /// Adaptive Gauss-Kronrod between breakpoints.
    Adaptive,
    /// Fixed composite Gauss-Legendre, non-adaptive.
    FixedRule,
}

/// `(shift, integral)` with `value = e^{shift} · integral`.
fn log_integral(k: &Kernel, quad: &QuadratureSpec, scheme: Scheme) -> Result<(f64, f64)> {
    quad.validate()?;
    let (peak, points) = k.layout(quad);
    let shift = k.log_f(peak);
    let f = |e: f64| Ok((k.log_f(e) - shift).exp());
    let mut total = 0.0;
    let mut budget = quad.max_nodes;
    for w in points.windows(2) {
        let (a, b) = (w[0], w[1]);
        let part = match scheme {
            Scheme::Adaptive => {
                let r = gauss_kronrod(f, a, b, 1e-300, quad.rel_tol.min(1e-12), budget)?;
                budget = budget.saturating_sub(r.evaluations);
                r.value
            }
            Scheme::FixedRule => {
                let panels = ((b - a) / 0.5).ceil().max(1.0) as usize;
                composite_gauss_legendre(f, a, b, panels, 24)?
            }
        };
        total += part;
    }
    Ok((shift, total))
}

fn nu_parts(x: f64, quad: &QuadratureSpec, scheme: Scheme) -> Result<(f64, f64)> {
    ensure_non_negative("x", x)?;
    if x == 0.0 {
        return Ok((f64::NEG_INFINITY, 0.0));
    }
    log_integral(&Kernel::unit(x.ln()), quad, scheme)
}

fn finish(parts: (f64, f64)) -> Result<f64> {
    let (shift, integral) = parts;
    if integral == 0.0 {
        return Ok(0.0);
    }
    let v = shift.exp() * integral;
    if !v.is_finite() {
        return Err(Error::Overflow(format!(
            "value exp({}) exceeds f64 range",
            shift + integral.ln()
        )));
    }
    Ok(v)
}

/// `ν(x) = ∫₀^∞ xᴱ / Γ(E+1) dE`; `ν(0) = 0`.
pub fn nu_function(x: f64, quad: &QuadratureSpec) -> Result<f64> {
    finish(nu_parts(x, quad, Scheme::Adaptive)?)
}

/// [`nu_function`] with a fixed composite Gauss-Legendre rule, as a second scheme.
pub fn nu_function_fixed_rule(x: f64, quad: &QuadratureSpec) -> Result<f64> {
    finish(nu_parts(x, quad, Scheme::FixedRule)?)
}

/// `ln ν(x)`, finite for every `x > 0`.
pub fn ln_nu_function(x: f64, quad: &QuadratureSpec) -> Result<f64> {
    ensure_positive("x", x)?;
    let (shift, integral) = nu_parts(x, quad, Scheme::Adaptive)?;
    Ok(shift + integral.ln())
}

/// `∫₀^∞ [(γ̃)_{E,k} / Γ̃_α(β+αE)] xᴱ / Γ(E+1) dE` with
/// `(γ̃)_{E,k} = kᴱ Γ(γ/k+E)/Γ(γ/k)` and `Γ̃_α(β+αE) = Γ(β) αᴱ Γ(β/α+E)/Γ(β/α)`.
pub fn tilde_ml(params: &MLParams, x: f64, quad: &QuadratureSpec) -> Result<f64> {
    tilde_ml_with(params, x, quad, Scheme::Adaptive)
}

pub fn tilde_ml_with(
    params: &MLParams,
    x: f64,
    quad: &QuadratureSpec,
    scheme: Scheme,
) -> Result<f64> {
    ensure_non_negative("x", x)?;
    if x == 0.0 {
        return Ok(0.0);
    }
    finish(log_integral(&Kernel::general(params, x), quad, scheme)?)
}

/// `h̃(x) = e^{-x} ν(x)`.
pub fn continuum_measure_weight(x: f64, quad: &QuadratureSpec) -> Result<f64> {
    let (shift, integral) = nu_parts(x, quad, Scheme::Adaptive)?;
    if integral == 0.0 {
        return Ok(0.0);
    }
    Ok((shift - x).exp() * integral)
}

/// `∫₀^∞ h̃(x)/ν(x) · xᴱ dx`, which should equal `Γ(E+1)`.
pub fn continuum_moment(e: f64, quad: &QuadratureSpec) -> Result<f64> {
    ensure_non_negative("E", e)?;
    let r = quadrature::semi_infinite(
        |x| {
            if x == 0.0 {
                return Ok(0.0);
            }
            let ratio = continuum_measure_weight(x, quad)? / nu_function(x, quad)?;
            Ok(ratio * x.powf(e))
        },
        quad,
    )?;
    Ok(r.value)
}

/// `Z̃ = ∫₀^∞ e^{-β_B E} dE = 1/β_B`.
pub fn continuum_partition(beta_b: f64) -> Result<f64> {
    ensure_positive("betaB", beta_b)?;
    Ok(1.0 / beta_b)
}

/// The same partition function by quadrature.
pub fn continuum_partition_quadrature(beta_b: f64, quad: &QuadratureSpec) -> Result<f64> {
    ensure_positive("betaB", beta_b)?;
    Ok(quadrature::semi_infinite(|e| Ok((-beta_b * e).exp()), quad)?.value)
}

/// `ν(e^{-β_B} x) / ν(x)`, formed from log-shifted parts; `1` at `x = 0`,
/// which is the limit of the ratio.
pub fn nu_ratio(x: f64, beta_b: f64, quad: &QuadratureSpec, scheme: Scheme) -> Result<f64> {
    ensure_positive("betaB", beta_b)?;
    ensure_non_negative("x", x)?;
    if x == 0.0 {
        return Ok(1.0);
    }
    // The shifted argument is passed as a logarithm so that it cannot underflow.
    let (s1, i1) = log_integral(&Kernel::unit(x.ln() - beta_b), quad, scheme)?;
    let (s2, i2) = nu_parts(x, quad, scheme)?;
    if !(i2 > 0.0) {
        return Err(Error::Singular(format!("nu({x}) vanished in quadrature")));
    }
    Ok((s1 - s2).exp() * i1 / i2)
}

/// `Q̃(|z|²) = (1/Z̃) ν(e^{-β_B}|z|²) / ν(|z|²)`.
pub fn continuum_husimi(z: CSLabel, beta_b: f64, quad: &QuadratureSpec) -> Result<f64> {
    Ok(nu_ratio(z.abs2(), beta_b, quad, Scheme::Adaptive)? / continuum_partition(beta_b)?)
}

pub fn continuum_husimi_fixed_rule(z: CSLabel, beta_b: f64, quad: &QuadratureSpec) -> Result<f64> {
    Ok(nu_ratio(z.abs2(), beta_b, quad, Scheme::FixedRule)? / continuum_partition(beta_b)?)
}

/// Sign convention for the continuum P function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PConvention {
    /// `(1/Z̃) e^{β_B} exp[-(e^{β_B} - 1)|z|²]`, the form consistent with the
    /// discrete reduction and with the diagonal reproduction.
    Decaying,
    /// `(1/Z̃) exp[-(1 - e^{β_B})|z|²]` with the opposite exponent sign; grows with `|z|²`.
    Growing,
}

pub fn continuum_p_function(z: CSLabel, beta_b: f64, convention: PConvention) -> Result<f64> {
    let zt = continuum_partition(beta_b)?;
    let x = z.abs2();
    let g = beta_b.exp_m1();
    Ok(match convention {
        PConvention::Decaying => beta_b.exp() * (-g * x).exp() / zt,
        PConvention::Growing => (g * x).exp() / zt,
    })
}

/// Normalization of the continuum state density `c(E)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DensityConvention {
    /// `c(E) = zᴱ / (√ν Γ(E+1))`; `∫|c|² dE` is not 1 in general.
    FullGamma,
    /// `c(E) = zᴱ / √(ν Γ(E+1))`, normalized to one.
    SqrtGamma,
}

/// The continuum coherent state `|z̃⟩ = ∫ c(E) |E⟩ dE`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyDensityState {
    z: CSLabel,
    norm: f64,
    convention: DensityConvention,
}

impl EnergyDensityState {
    pub fn new(z: CSLabel, convention: DensityConvention, quad: &QuadratureSpec) -> Result<Self> {
        let norm = nu_function(z.abs2(), quad)?;
        if !(norm > 0.0) {
            return Err(Error::Singular(
                "nu(|z|^2) vanishes; the continuum state is undefined at z = 0".into(),
            ));
        }
        Ok(EnergyDensityState {
            z,
            norm,
            convention,
        })
    }

    pub fn label(&self) -> CSLabel {
        self.z
    }

    /// `ν(|z|²)`
    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn convention(&self) -> DensityConvention {
        self.convention
    }

    /// `|c(E)|²`
    pub fn density(&self, e: f64) -> f64 {
        let lg = ln_gamma(e + 1.0);
        let ln = e * self.z.abs2().ln()
            - self.norm.ln()
            - match self.convention {
                DensityConvention::FullGamma => 2.0 * lg,
                DensityConvention::SqrtGamma => lg,
            };
        ln.exp()
    }

    /// `c(E)`, with phase `e^{iEφ}`.
    pub fn amplitude(&self, e: f64) -> Complex64 {
        Complex64::from_polar(self.density(e).sqrt(), e * self.z.phase())
    }

    /// `∫₀^∞ |c(E)|² dE`
    pub fn normalization(&self, quad: &QuadratureSpec) -> Result<f64> {
        let x = self.z.abs2();
        let ln_norm = self.norm.ln();
        Ok(match self.convention {
            DensityConvention::SqrtGamma => {
                let (s, i) = nu_parts(x, quad, Scheme::Adaptive)?;
                (s - ln_norm).exp() * i
            }
            DensityConvention::FullGamma => {
                // ∫ xᴱ/Γ(E+1)² dE: the unit kernel with one more Γ(E+1).
                let k = SquaredGammaKernel { ln_x: x.ln() };
                let (s, i) = k.integrate(quad)?;
                (s - ln_norm).exp() * i
            }
        })
    }
}

struct SquaredGammaKernel {
    ln_x: f64,
}

impl SquaredGammaKernel {
    fn log_f(&self, e: f64) -> f64 {
        e * self.ln_x - 2.0 * ln_gamma(e + 1.0)
    }

    fn integrate(&self, quad: &QuadratureSpec) -> Result<(f64, f64)> {
        let slope = |e: f64| self.ln_x - 2.0 * digamma(e + 1.0);
        let mut peak = 0.0;
        if slope(0.0) > 0.0 {
            let (mut lo, mut hi) = (0.0, 1.0);
            while slope(hi) > 0.0 {
                lo = hi;
                hi *= 2.0;
            }
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if slope(mid) > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            peak = 0.5 * (lo + hi);
        }
        let shift = self.log_f(peak);
        let cutoff = peak + 40.0 + 10.0 * f64::sqrt(peak);
        let f = |e: f64| Ok((self.log_f(e) - shift).exp());
        let mut total = 0.0;
        let mut lo = 0.0;
        for hi in [peak, cutoff] {
            if hi > lo {
                total += gauss_kronrod(f, lo, hi, 1e-300, quad.rel_tol.min(1e-12), quad.max_nodes)?
                    .value;
                lo = hi;
            }
        }
        Ok((shift, total))
    }
}

/// `∫₀^∞ h̃(x) P̃(x) |c_E(x)|² dx`, to be compared with `e^{-β_B E}/Z̃`.
pub fn continuum_diagonal(
    beta_b: f64,
    e: f64,
    p_convention: PConvention,
    density: DensityConvention,
    quad: &QuadratureSpec,
) -> Result<f64> {
    ensure_non_negative("E", e)?;
    let r = quadrature::semi_infinite(
        |x| {
            if x == 0.0 {
                return Ok(0.0);
            }
            let z = CSLabel::real(x.sqrt())?;
            let state = EnergyDensityState::new(z, density, quad)?;
            let p = continuum_p_function(z, beta_b, p_convention)?;
            Ok(continuum_measure_weight(x, quad)? * p * state.density(e))
        },
        quad,
    )?;
    Ok(r.value)
}
