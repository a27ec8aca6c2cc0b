//! The Meijer-G weight of the coherent-state resolution of identity and the
//! moment problem that determines it.
//!
//! With `A = γ/k`, `b = β/α` and `y = (k/α) x` the weight is
//!
//! ```text
//! G(y) = G^{2,0}_{1,2}(y | A-1; 0, b-1) = e^{-y} U(A - b, 2 - b, y)
//! ```
//!
//! whose Mellin transform is `Γ(s) Γ(b-1+s) / Γ(A-1+s)`.

use crate::error::{ensure_non_negative, Error, Result};
use crate::kcore::MLParams;
use crate::mlfunc::{ml_eval, EvalConfig};
use crate::quadrature::{self, QuadratureSpec};
use crate::special::{
    digamma, gamma, is_non_positive_integer, ln_gamma, ln_gamma_complex, tricomi_u,
    tricomi_u_polynomial,
};
use num_complex::Complex64;
use serde::Serialize;
use std::collections::HashMap;
use std::f64::consts::PI;

/// Relative disagreement above which the two G routes are reported as a failure.
pub const ROUTE_TOLERANCE: f64 = 1e-6;

/// Both sides of the moment equation for `s = 1..s_max`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentReport {
    pub s_values: Vec<f64>,
    pub lhs: Vec<f64>,
    pub rhs: Vec<f64>,
    pub max_rel_err: f64,
}

impl MomentReport {
    pub fn from_sides(s_values: Vec<f64>, lhs: Vec<f64>, rhs: Vec<f64>) -> Self {
        let max_rel_err = lhs
            .iter()
            .zip(&rhs)
            .map(|(l, r)| ((l - r) / r).abs())
            .fold(0.0, f64::max);
        MomentReport {
            s_values,
            lhs,
            rhs,
            max_rel_err,
        }
    }
}

struct Indices {
    a: f64,
    b: f64,
    scale: f64,
}

fn indices(params: &MLParams) -> Indices {
    Indices {
        a: params.gamma_over_k(),
        b: params.beta_over_alpha(),
        scale: params.k_over_alpha(),
    }
}

/// `e^{y} G(y) = U(A - b, 2 - b, y)`; finite and slowly varying, so ratios of
/// weights can be formed without underflow.
pub fn meijer_g_weight_scaled(params: &MLParams, x: f64) -> Result<f64> {
    ensure_non_negative("x", x)?;
    let Indices { a, b, scale } = indices(params);
    let y = scale * x;
    if y > 0.0 {
        return tricomi_u(a - b, 2.0 - b, y);
    }
    let (ua, ub) = (a - b, 2.0 - b);
    if is_non_positive_integer(ua) {
        return Ok(tricomi_u_polynomial((-ua) as u32, ub, 0.0));
    }
    let singular = || Error::Singular(format!("weight diverges at x = 0 for beta/alpha = {b}"));
    if is_non_positive_integer(a - 1.0) {
        // U = y^{b-1} U(A-1, b, y) with a terminating second factor.
        return match b.partial_cmp(&1.0) {
            Some(std::cmp::Ordering::Greater) => Ok(0.0),
            Some(std::cmp::Ordering::Equal) => Ok(tricomi_u_polynomial((1.0 - a) as u32, b, 0.0)),
            _ => Err(singular()),
        };
    }
    if b > 1.0 {
        Ok(gamma(b - 1.0) / gamma(a - 1.0))
    } else {
        Err(singular())
    }
}

/// `G^{2,0}_{1,2}((k/α) x | γ/k - 1; 0, β/α - 1)` through the Tricomi reduction.
pub fn meijer_g_weight(params: &MLParams, x: f64) -> Result<f64> {
    let s = meijer_g_weight_scaled(params, x)?;
    Ok((-params.k_over_alpha() * x).exp() * s)
}

/// Real abscissa of the Mellin-Barnes contour: the saddle of
/// `|y^{-c} Γ(c) Γ(c+b-1) / Γ(c+A-1)|`, kept away from the leftmost poles.
fn contour_abscissa(a: f64, b: f64, ln_y: f64) -> f64 {
    let c_min = 0f64.max(1.0 - b);
    let slope = |c: f64| digamma(c) + digamma(c + b - 1.0) - digamma(c + a - 1.0) - ln_y;
    let mut lo = c_min + 1e-6;
    let mut hi = c_min + 1.0;
    if slope(lo) > 0.0 {
        return c_min + 0.05;
    }
    while slope(hi) < 0.0 && hi < 1e5 {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if slope(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (0.5 * (lo + hi)).max(c_min + 0.05)
}

/// The same weight from the Mellin-Barnes integral
/// `G(y) = (1/π) ∫₀^∞ Re[Γ(s) Γ(s+b-1) / Γ(s+A-1) · y^{-s}]_{s=c+it} dt`.
pub fn meijer_g_mellin_barnes(params: &MLParams, x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain("Mellin-Barnes route needs x > 0"));
    }
    let Indices { a, b, scale } = indices(params);
    let ln_y = (scale * x).ln();
    let c = contour_abscissa(a, b, ln_y);
    let log_kernel = |t: f64| {
        let s = Complex64::new(c, t);
        ln_gamma_complex(s) + ln_gamma_complex(s + (b - 1.0))
            - ln_gamma_complex(s + (a - 1.0))
            - s * ln_y
    };
    let l0 = log_kernel(0.0).re;
    let spec = QuadratureSpec {
        upper_cutoff: None,
        abs_tol: 1e-300,
        rel_tol: 1e-11,
        max_nodes: 200_000,
        first_panel: 1.0,
    };
    let r = quadrature::semi_infinite(|t| Ok((log_kernel(t) - l0).exp().re), &spec)?;
    Ok(l0.exp() * r.value / PI)
}

/// Evaluates both routes and fails with [`Error::RouteMismatch`] when they
/// disagree by more than [`ROUTE_TOLERANCE`].
pub fn meijer_g_weight_checked(params: &MLParams, x: f64) -> Result<f64> {
    let primary = meijer_g_weight(params, x)?;
    if x == 0.0 {
        return Ok(primary);
    }
    let referee = meijer_g_mellin_barnes(params, x)?;
    if (primary - referee).abs() > ROUTE_TOLERANCE * primary.abs().max(referee.abs()) {
        return Err(Error::RouteMismatch { primary, referee });
    }
    Ok(primary)
}

fn ln_measure_prefactor(params: &MLParams) -> f64 {
    params.k_over_alpha().ln() + ln_gamma(params.gamma_over_k()) + ln_gamma(params.beta())
        - ln_gamma(params.beta_over_alpha())
}

/// Radial weight `h(x) = (k/α) Γ(γ/k) Γ(β) / Γ(β/α) · E(x) · G((k/α) x)` of
/// `dμ(z) = h(|z|²) d(|z|²) dφ / 2π`.
pub fn measure_weight_h(params: &MLParams, x: f64, cfg: &EvalConfig) -> Result<f64> {
    ensure_non_negative("x", x)?;
    let s = meijer_g_weight_scaled(params, x)?;
    let e = ml_eval(params, x, cfg)?.value;
    let y = params.k_over_alpha() * x;
    Ok((ln_measure_prefactor(params) + e.ln() - y).exp() * s)
}

/// `(α/k)^s Γ(s) Γ(β/α-1+s) / Γ(γ/k-1+s)`, the closed-form moment.
pub fn moment_closed_form(params: &MLParams, s: f64) -> Result<f64> {
    let Indices { a, b, scale } = indices(params);
    if !(s > 0.0 && b - 1.0 + s > 0.0 && a - 1.0 + s > 0.0) {
        return Err(Error::domain(format!(
            "moment s = {s} needs positive gamma arguments (beta/alpha - 1 + s = {}, gamma/k - 1 + s = {})",
            b - 1.0 + s,
            a - 1.0 + s
        )));
    }
    Ok((-s * scale.ln() + ln_gamma(s) + ln_gamma(b - 1.0 + s) - ln_gamma(a - 1.0 + s)).exp())
}

/// `∫₀^∞ x^{s-1} G((k/α) x) dx` by quadrature.
pub fn moment_quadrature(params: &MLParams, s: f64, quad: &QuadratureSpec) -> Result<f64> {
    let scale = params.k_over_alpha();
    let r = quadrature::semi_infinite(
        |x| {
            if x == 0.0 {
                return Ok(0.0);
            }
            let g = meijer_g_weight_scaled(params, x)?;
            Ok(((s - 1.0) * x.ln() - scale * x).exp() * g)
        },
        quad,
    );
    r.map(|i| i.value).map_err(|e| match e {
        Error::Quadrature {
            reason,
            estimate,
            error,
        } => Error::Quadrature {
            reason: format!("moment s = {s}: {reason}"),
            estimate,
            error,
        },
        other => other,
    })
}

/// Checks the moment equation for `s = 1..=s_max`.
pub fn verify_resolution(
    params: &MLParams,
    s_max: u32,
    quad: &QuadratureSpec,
) -> Result<MomentReport> {
    if s_max < 1 {
        return Err(Error::domain("s_max must be at least 1"));
    }
    let s_values: Vec<f64> = (1..=s_max).map(f64::from).collect();
    let mut lhs = Vec::with_capacity(s_values.len());
    let mut rhs = Vec::with_capacity(s_values.len());
    for &s in &s_values {
        rhs.push(moment_closed_form(params, s)?);
        lhs.push(moment_quadrature(params, s, quad)?);
    }
    Ok(MomentReport::from_sides(s_values, lhs, rhs))
}

/// `∫ dμ(z) c_m(z)* c_n(z)` for `m, n ≤ n_max`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResolutionMatrix {
    pub real: Vec<Vec<f64>>,
    pub imag: Vec<Vec<f64>>,
    /// `max |M_{mn} - δ_{mn}|`
    pub max_deviation: f64,
}

/// Coefficient-space resolution of identity. The angular integral is the
/// trapezoid rule on `2(n_max+1)` points, exact for these Fourier modes; the
/// radial integrals `∫ h(x)/E(x) x^{(m+n)/2} dx` are done by quadrature.
pub fn resolution_matrix(
    params: &MLParams,
    n_max: usize,
    quad: &QuadratureSpec,
    cfg: &EvalConfig,
) -> Result<ResolutionMatrix> {
    let dim = n_max + 1;
    let points = 2 * dim;
    let angular = |d: i64| -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..points {
            let phi = 2.0 * PI * j as f64 / points as f64;
            acc += Complex64::from_polar(1.0, d as f64 * phi);
        }
        acc / points as f64
    };

    // ln of (γ)_{n,k} / (Γ_α(β+αn) n!)
    let mut ln_w = Vec::with_capacity(dim);
    let mut lw = -ln_gamma(params.beta());
    for n in 0..dim {
        ln_w.push(lw);
        let nf = n as f64;
        lw += ((params.gamma() + nf * params.k())
            / ((params.beta() + nf * params.alpha()) * (nf + 1.0)))
            .ln();
    }

    let mut cache: HashMap<u64, f64> = HashMap::new();
    let mut radial = Vec::with_capacity(2 * dim - 1);
    for j in 0..2 * dim - 1 {
        let power = 0.5 * j as f64;
        let r = quadrature::semi_infinite(
            |x| {
                if x == 0.0 {
                    return Ok(0.0);
                }
                let base = match cache.get(&x.to_bits()) {
                    Some(v) => *v,
                    None => {
                        let v = measure_weight_h(params, x, cfg)? / ml_eval(params, x, cfg)?.value;
                        cache.insert(x.to_bits(), v);
                        v
                    }
                };
                Ok(base * x.powf(power))
            },
            quad,
        )?;
        radial.push(r.value);
    }

    let mut real = vec![vec![0.0; dim]; dim];
    let mut imag = vec![vec![0.0; dim]; dim];
    let mut max_deviation: f64 = 0.0;
    for m in 0..dim {
        for n in 0..dim {
            let amp = (0.5 * (ln_w[m] + ln_w[n])).exp() * radial[m + n];
            let v = angular(n as i64 - m as i64) * amp;
            real[m][n] = v.re;
            imag[m][n] = v.im;
            let delta = if m == n { 1.0 } else { 0.0 };
            max_deviation = max_deviation.max((v - delta).norm());
        }
    }
    Ok(ResolutionMatrix {
        real,
        imag,
        max_deviation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn unit_weight_is_exponential() {
        let unit = MLParams::unit();
        for x in [0.0, 0.3, 2.0, 17.0] {
            assert!(rel(meijer_g_weight(&unit, x).unwrap(), (-x).exp()) < 1e-15);
        }
        for x in [0.01, 1.0, 10.0] {
            let mb = meijer_g_mellin_barnes(&unit, x).unwrap();
            assert!(rel(mb, (-x).exp()) < 1e-8, "x={x}: {mb}");
        }
    }

    #[test]
    fn closed_form_weights() {
        let p = MLParams::new(1.0, 2.0, 1.0, 1.0).unwrap();
        let q = MLParams::new(2.0, 3.0, 1.0, 1.0).unwrap();
        for x in [0.5, 3.0] {
            assert!(rel(meijer_g_weight(&p, x).unwrap(), x * (-x).exp()) < 1e-14);
            let y = 0.5 * x;
            assert!(rel(meijer_g_weight(&q, x).unwrap(), y.sqrt() * (-y).exp()) < 1e-14);
        }
        assert_eq!(meijer_g_weight(&p, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn finite_limit_at_origin() {
        // A = 2.5, b = 1.7: G(0) = Γ(0.7)/Γ(1.5)
        let p = MLParams::new(1.0, 1.7, 2.5, 1.0).unwrap();
        let want = gamma(0.7) / gamma(1.5);
        assert!(rel(meijer_g_weight(&p, 0.0).unwrap(), want) < 1e-14);
        let near = meijer_g_mellin_barnes(&p, 1e-9).unwrap();
        assert!(rel(near, want) < 1e-5, "{near} vs {want}");
    }

    #[test]
    fn divergent_origin_is_reported() {
        let p = MLParams::new(1.0, 0.5, 2.0, 1.0).unwrap();
        assert!(matches!(meijer_g_weight(&p, 0.0), Err(Error::Singular(_))));
        assert!(meijer_g_weight(&p, 0.1).unwrap() > 0.0);
    }

    #[test]
    fn routes_agree_on_generic_parameters() {
        let p = MLParams::new(1.0, 1.7, 2.5, 1.0).unwrap();
        for x in [1e-3, 0.1, 1.0, 5.0, 20.0, 50.0] {
            meijer_g_weight_checked(&p, x).unwrap();
        }
    }

    #[test]
    fn h_examples() {
        let cfg = EvalConfig::default();
        let unit = MLParams::unit();
        for x in [0.0, 1.0, 7.5] {
            assert!((measure_weight_h(&unit, x, &cfg).unwrap() - 1.0).abs() < 1e-11);
        }
        let p = MLParams::new(1.0, 1.7, 2.5, 1.0).unwrap();
        let want = gamma(2.5) / gamma(1.7) * meijer_g_weight(&p, 0.0).unwrap();
        assert!(rel(measure_weight_h(&p, 0.0, &cfg).unwrap(), want) < 1e-13);
        let q = MLParams::new(1.0, 2.0, 1.0, 1.0).unwrap();
        assert!(measure_weight_h(&q, 2.0, &cfg).unwrap() > 0.0);
    }

    #[test]
    fn unit_moments_are_factorials() {
        let r = verify_resolution(&MLParams::unit(), 6, &QuadratureSpec::default()).unwrap();
        assert_eq!(r.s_values.len(), 6);
        assert!((r.lhs[3] - 6.0).abs() < 1e-8);
        assert!(r.max_rel_err < 1e-8, "{r:?}");
    }

    #[test]
    fn moment_rhs_domain() {
        let p = MLParams::new(1.0, 0.5, 0.5, 1.0).unwrap();
        assert!(moment_closed_form(&p, 0.25).is_err());
        assert!(moment_closed_form(&p, 1.0).is_ok());
    }

    #[test]
    fn small_resolution_matrix() {
        let m = resolution_matrix(
            &MLParams::new(1.0, 2.0, 1.0, 1.0).unwrap(),
            3,
            &QuadratureSpec::default(),
            &EvalConfig::default(),
        )
        .unwrap();
        assert!(m.max_deviation < 1e-8, "{m:?}");
    }
}
