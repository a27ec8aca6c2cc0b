//! Numerical integration: adaptive Gauss-Kronrod, tanh-sinh, composite
//! Gauss-Legendre, and a panel-doubling driver for `[0, ∞)`.
//!
//! Integrands are fallible (`FnMut(f64) -> Result<f64>`) so that evaluation
//! errors inside special-function kernels propagate instead of turning into NaN.

use crate::error::{Error, Result};
use std::f64::consts::FRAC_PI_2;

/// Value and error estimate of a quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub abs_error: f64,
    pub evaluations: usize,
}

/// Integration controls for semi-infinite integrals.
///
/// `upper_cutoff = None` means the range is extended by doubling panels until
/// the contribution of the last panels is negligible.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub upper_cutoff: Option<f64>,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_nodes: usize,
    /// Width of the first panel `[0, first_panel]`, integrated with the
    /// endpoint-singularity-tolerant tanh-sinh rule.
    pub first_panel: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            upper_cutoff: None,
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            max_nodes: 100_000,
            first_panel: 1.0,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0) || !(self.rel_tol >= 0.0) {
            return Err(Error::domain("quadrature tolerances must be positive"));
        }
        if self.max_nodes < 100 {
            return Err(Error::domain("max_nodes must be at least 100"));
        }
        if !(self.first_panel > 0.0) {
            return Err(Error::domain("first_panel must be positive"));
        }
        if let Some(c) = self.upper_cutoff {
            if !(c > 0.0) {
                return Err(Error::domain("upper_cutoff must be positive"));
            }
        }
        Ok(())
    }

    /// Tighter relative tolerance, same everything else.
    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_abs_tol(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }

    fn target(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

// Gauss-Kronrod 7/15 abscissae and weights.
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    floor: f64,
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut err = err.abs();
    if res_asc != 0.0 && err != 0.0 {
        let scale = (200.0 * err / res_asc).powf(1.5);
        err = if scale < 1.0 {
            res_asc * scale
        } else {
            res_asc
        };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    err
}

/// Returns `(value, error, roundoff floor of the error)`.
fn gk15<F>(f: &mut F, a: f64, b: f64) -> Result<(f64, f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center)?;
    let mut res_g = fc * WG[3];
    let mut res_k = fc * WGK[7];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx)?;
        let f2 = f(center + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let h = half.abs();
    let value = res_k * half;
    let err = rescale_error((res_k - res_g) * half, res_abs * h, res_asc * h);
    if !value.is_finite() {
        return Err(Error::Quadrature {
            reason: format!("non-finite integrand on [{a:e}, {b:e}]"),
            estimate: value,
            error: f64::INFINITY,
        });
    }
    Ok((value, err, 50.0 * f64::EPSILON * res_abs * h))
}

/// Globally adaptive Gauss-Kronrod (7/15) on a finite interval.
pub fn gauss_kronrod<F>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_evals: usize,
) -> Result<Integral>
where
    F: FnMut(f64) -> Result<f64>,
{
    if a == b {
        return Ok(Integral {
            value: 0.0,
            abs_error: 0.0,
            evaluations: 0,
        });
    }
    let (v, e, fl) = gk15(&mut f, a, b)?;
    let mut evals = 15;
    let mut segs = vec![Segment {
        a,
        b,
        value: v,
        error: e,
        floor: fl,
    }];
    // Segments too narrow to split further, or already at their roundoff
    // floor, are parked here.
    let mut frozen_value = 0.0;
    let mut frozen_error = 0.0;
    loop {
        let total: f64 = frozen_value + segs.iter().map(|s| s.value).sum::<f64>();
        let err: f64 = frozen_error + segs.iter().map(|s| s.error).sum::<f64>();
        if err <= abs_tol.max(rel_tol * total.abs()) || segs.is_empty() {
            return Ok(Integral {
                value: total,
                abs_error: err,
                evaluations: evals,
            });
        }
        if evals + 30 > max_evals {
            return Err(Error::Quadrature {
                reason: format!("node budget {max_evals} exhausted"),
                estimate: total,
                error: err,
            });
        }
        let worst = segs
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, _)| i)
            .unwrap();
        let seg = segs.swap_remove(worst);
        let mid = 0.5 * (seg.a + seg.b);
        if !(mid > seg.a.min(seg.b) && mid < seg.a.max(seg.b)) || seg.error <= seg.floor {
            frozen_value += seg.value;
            frozen_error += seg.error;
            continue;
        }
        let (v1, e1, f1) = gk15(&mut f, seg.a, mid)?;
        let (v2, e2, f2) = gk15(&mut f, mid, seg.b)?;
        evals += 30;
        segs.push(Segment {
            a: seg.a,
            b: mid,
            value: v1,
            error: e1,
            floor: f1,
        });
        segs.push(Segment {
            a: mid,
            b: seg.b,
            value: v2,
            error: e2,
            floor: f2,
        });
    }
}

/// Tanh-sinh (double exponential) rule on `[a, b]`.
///
/// Tolerates integrable algebraic singularities at either endpoint. The
/// integrand is never evaluated at the endpoints themselves; abscissae are
/// formed from the endpoint distance so that points close to `a = 0` are
/// resolved to full relative precision.
pub fn tanh_sinh<F>(mut f: F, a: f64, b: f64, rel_tol: f64) -> Result<Integral>
where
    F: FnMut(f64) -> Result<f64>,
{
    if a == b {
        return Ok(Integral {
            value: 0.0,
            abs_error: 0.0,
            evaluations: 0,
        });
    }
    let half = 0.5 * (b - a);
    let t_max = 6.5;
    let mut evals = 0;

    // Contribution of abscissa pair at parameter t > 0 (or the center at t = 0).
    let mut pair = |t: f64, f: &mut F| -> Result<f64> {
        let u = FRAC_PI_2 * t.sinh();
        let w = FRAC_PI_2 * t.cosh() / (u.cosh() * u.cosh());
        if t == 0.0 {
            evals += 1;
            return Ok(w * f(a + half)?);
        }
        // 1 - tanh(u) = 2 e^{-2u} / (1 + e^{-2u})
        let e = (-2.0 * u).exp();
        let delta = half * 2.0 * e / (1.0 + e);
        if delta == 0.0 || w == 0.0 {
            return Ok(0.0);
        }
        evals += 2;
        Ok(w * (f(a + delta)? + f(b - delta)?))
    };

    let mut h = 1.0;
    let mut sum = pair(0.0, &mut f)?;
    let mut k = 1;
    while (k as f64) * h <= t_max {
        sum += pair(k as f64 * h, &mut f)?;
        k += 1;
    }
    let mut estimate = sum * h * half;
    let mut error = f64::INFINITY;
    for _level in 0..10 {
        h *= 0.5;
        let mut extra = 0.0;
        let mut k = 1;
        while (k as f64) * h <= t_max {
            extra += pair(k as f64 * h, &mut f)?;
            k += 2;
        }
        sum += extra;
        let next = sum * h * half;
        error = (next - estimate).abs();
        estimate = next;
        if !estimate.is_finite() {
            break;
        }
        if error <= rel_tol * estimate.abs() || error == 0.0 {
            return Ok(Integral {
                value: estimate,
                abs_error: error,
                evaluations: evals,
            });
        }
    }
    Err(Error::Quadrature {
        reason: "tanh-sinh refinement did not converge".into(),
        estimate,
        error,
    })
}

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`.
pub fn gauss_legendre_rule(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p0 = 1.0;
            let mut p1 = x;
            for j in 2..=n {
                let jf = j as f64;
                let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 1 { x } else { p1 };
            let pm1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * p - pm1) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Composite Gauss-Legendre rule: `panels` equal panels of `order` points each.
/// Non-adaptive; serves as an independent check on the adaptive routes.
pub fn composite_gauss_legendre<F>(
    mut f: F,
    a: f64,
    b: f64,
    panels: usize,
    order: usize,
) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (nodes, weights) = gauss_legendre_rule(order);
    let width = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let lo = a + width * p as f64;
        let c = lo + 0.5 * width;
        let mut s = 0.0;
        for (x, w) in nodes.iter().zip(&weights) {
            s += w * f(c + 0.5 * width * x)?;
        }
        total += 0.5 * width * s;
    }
    Ok(total)
}

/// Integral over `[0, ∞)` (or `[0, upper_cutoff]`).
///
/// The first panel uses tanh-sinh, which absorbs power-law behaviour at the
/// origin. Subsequent panels double in width and are integrated by adaptive
/// Gauss-Kronrod; the range stops growing once the panel contributions are
/// decreasing and below tolerance twice in a row.
pub fn semi_infinite<F>(mut f: F, spec: &QuadratureSpec) -> Result<Integral>
where
    F: FnMut(f64) -> Result<f64>,
{
    spec.validate()?;
    let first_end = match spec.upper_cutoff {
        Some(c) => spec.first_panel.min(c),
        None => spec.first_panel,
    };
    let head = tanh_sinh(&mut f, 0.0, first_end, spec.rel_tol.max(1e-14))?;
    let mut total = head.value;
    let mut error = head.abs_error;
    let mut evals = head.evaluations;

    let mut lo = first_end;
    let mut width = first_end;
    let mut quiet = 0;
    let mut prev = f64::INFINITY;
    loop {
        let mut hi = lo + width;
        if let Some(c) = spec.upper_cutoff {
            if lo >= c {
                break;
            }
            hi = hi.min(c);
        }
        let budget = spec.max_nodes.saturating_sub(evals);
        if budget < 30 {
            return Err(Error::Quadrature {
                reason: format!("node budget {} exhausted at x = {lo:e}", spec.max_nodes),
                estimate: total,
                error,
            });
        }
        let panel = gauss_kronrod(
            &mut f,
            lo,
            hi,
            0.1 * spec.abs_tol,
            0.1 * spec.rel_tol,
            budget,
        )
        .map_err(|e| match e {
            Error::Quadrature {
                reason,
                estimate,
                error: perr,
            } => Error::Quadrature {
                reason,
                estimate: total + estimate,
                error: error + perr,
            },
            other => other,
        })?;
        total += panel.value;
        error += panel.abs_error;
        evals += panel.evaluations;
        let small = panel.value.abs() <= 0.1 * spec.target(total);
        if small && panel.value.abs() <= prev {
            quiet += 1;
        } else {
            quiet = 0;
        }
        prev = panel.value.abs();
        if spec.upper_cutoff.is_none() && quiet >= 2 {
            break;
        }
        if !lo.is_finite() || lo > 1e300 {
            return Err(Error::Quadrature {
                reason: "integrand does not decay".into(),
                estimate: total,
                error,
            });
        }
        lo = hi;
        width *= 2.0;
    }
    Ok(Integral {
        value: total,
        abs_error: error,
        evaluations: evals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gk_polynomial_is_exact() {
        let r = gauss_kronrod(|x| Ok(x * x * x - 2.0 * x), 0.0, 2.0, 1e-14, 1e-14, 1000).unwrap();
        assert!((r.value - 0.0).abs() < 1e-14);
    }

    #[test]
    fn gk_reports_budget_exhaustion() {
        let r = gauss_kronrod(|x| Ok((1.0 / x).sin()), 1e-9, 1.0, 1e-15, 1e-15, 200);
        assert!(matches!(r, Err(Error::Quadrature { .. })));
    }

    #[test]
    fn tanh_sinh_handles_sqrt_singularity() {
        let r = tanh_sinh(|x| Ok(1.0 / x.sqrt()), 0.0, 1.0, 1e-13).unwrap();
        assert!((r.value - 2.0).abs() < 1e-12, "{}", r.value);
    }

    #[test]
    fn legendre_rule_integrates_degree_2n_minus_1() {
        let (x, w) = gauss_legendre_rule(10);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(18)).sum();
        assert!((s - 2.0 / 19.0).abs() < 1e-14);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn semi_infinite_gamma_integrals() {
        let spec = QuadratureSpec::default().with_rel_tol(1e-12);
        let r = semi_infinite(|x: f64| Ok(x.powi(5) * (-x).exp()), &spec).unwrap();
        assert!((r.value - 120.0).abs() < 1e-9);
        let r = semi_infinite(|x: f64| Ok(x.powf(-0.5) * (-x).exp()), &spec).unwrap();
        assert!((r.value - std::f64::consts::PI.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn semi_infinite_respects_cutoff() {
        let spec = QuadratureSpec {
            upper_cutoff: Some(3.0),
            ..QuadratureSpec::default()
        };
        let r = semi_infinite(|_| Ok(1.0), &spec).unwrap();
        assert!((r.value - 3.0).abs() < 1e-12);
    }
}
