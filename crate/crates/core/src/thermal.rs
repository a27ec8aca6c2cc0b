//! Thermal states over the Fock structure: partition functions, the Husimi
//! distribution and the diagonal-representation P function.
//!
//! Energies are dimensionless. For the linear spectrum `E_n = s·n` the Boltzmann
//! factor is `qⁿ` with `q = e^{-λ}`, `λ = β_B s`.

use crate::coherent::{photon_distribution, CSLabel};
use crate::error::{ensure_positive, Error, Result};
use crate::kcore::MLParams;
use crate::measure::{measure_weight_h, meijer_g_weight_scaled};
use crate::mlfunc::{ml_eval, EvalConfig, SeriesResult};
use crate::quadrature::{self, QuadratureSpec};
use crate::special::{ln_gamma, Compensated};
use serde::Serialize;

/// Energy levels `E_n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Spectrum {
    /// `E_n = slope · n`
    Linear { slope: f64 },
    /// `E_n = A n + B n²`
    Quadratic { a: f64, b: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThermalConfig {
    beta_b: f64,
    spectrum: Spectrum,
    ansatz_terms: usize,
}

impl ThermalConfig {
    pub fn linear(beta_b: f64, slope: f64) -> Result<Self> {
        ensure_positive("betaB", beta_b)?;
        ensure_positive("slope", slope)?;
        Ok(ThermalConfig {
            beta_b,
            spectrum: Spectrum::Linear { slope },
            ansatz_terms: 8,
        })
    }

    /// Linear spectrum with slope `β/γ`.
    pub fn linear_from_params(beta_b: f64, params: &MLParams) -> Result<Self> {
        Self::linear(beta_b, params.beta() / params.gamma())
    }

    pub fn quadratic(beta_b: f64, a: f64, b: f64, ansatz_terms: usize) -> Result<Self> {
        ensure_positive("betaB", beta_b)?;
        ensure_positive("A", a)?;
        if !b.is_finite() {
            return Err(Error::domain("B must be finite"));
        }
        if ansatz_terms == 0 {
            return Err(Error::domain("ansatz terms J must be positive"));
        }
        Ok(ThermalConfig {
            beta_b,
            spectrum: Spectrum::Quadratic { a, b },
            ansatz_terms,
        })
    }

    /// Quadratic spectrum with `A = (β/γ)(1-α)`, `B = (β/γ)α`, the `k = 0`
    /// reading of the structure constants. Needs `α < 1` for `A > 0`.
    pub fn quadratic_from_params(
        beta_b: f64,
        params: &MLParams,
        ansatz_terms: usize,
    ) -> Result<Self> {
        let r = params.beta() / params.gamma();
        Self::quadratic(
            beta_b,
            r * (1.0 - params.alpha()),
            r * params.alpha(),
            ansatz_terms,
        )
    }

    pub fn beta_b(&self) -> f64 {
        self.beta_b
    }

    pub fn spectrum(&self) -> Spectrum {
        self.spectrum
    }

    pub fn ansatz_terms(&self) -> usize {
        self.ansatz_terms
    }

    pub fn energy(&self, n: u32) -> f64 {
        let n = n as f64;
        match self.spectrum {
            Spectrum::Linear { slope } => slope * n,
            Spectrum::Quadratic { a, b } => a * n + b * n * n,
        }
    }

    fn lambda(&self) -> Result<f64> {
        match self.spectrum {
            Spectrum::Linear { slope } => Ok(self.beta_b * slope),
            Spectrum::Quadratic { .. } => Err(Error::domain(
                "operation is defined for linear spectra only",
            )),
        }
    }
}

/// `Z = Σ e^{-λn} = 1/(1 - e^{-λ})`.
pub fn partition_linear(cfg: &ThermalConfig) -> Result<f64> {
    Ok(bose(cfg.lambda()?))
}

fn bose(lambda: f64) -> f64 {
    -1.0 / (-lambda).exp_m1()
}

/// Ansatz evaluation of the quadratic-spectrum partition function, with the
/// direct sum as referee.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadraticPartition {
    pub ansatz: SeriesResult,
    /// `Σ_n e^{-β_B(An + Bn²)}`
    pub direct: f64,
    pub rel_diff: f64,
    /// The j-th term `(-β_B B)^j / j! · Σ_n n^{2j} qⁿ`.
    pub terms: Vec<f64>,
    /// Relative error against `direct` of the partial sums `j = 0..=J`.
    pub error_by_j: Vec<f64>,
    /// Truncation index just before the smallest term.
    pub optimal_truncation: usize,
    /// Set when the magnitude of the last term exceeds that of its predecessor.
    pub diverging: bool,
}

/// Eulerian numbers `A(m, k)`, `k = 0..m`.
fn eulerian_row(m: usize) -> Vec<f64> {
    let mut row = vec![1.0];
    for r in 1..=m {
        let mut next = vec![0.0; r];
        for (k, slot) in next.iter_mut().enumerate() {
            let keep = if k < row.len() {
                (k + 1) as f64 * row[k]
            } else {
                0.0
            };
            let shift = if k >= 1 && k - 1 < row.len() {
                (r - k) as f64 * row[k - 1]
            } else {
                0.0
            };
            *slot = keep + shift;
        }
        row = next;
    }
    row
}

/// `Σ_{n≥0} n^m qⁿ`, in closed form through the Eulerian polynomial.
pub fn power_geometric_sum(m: usize, q: f64) -> f64 {
    if m == 0 {
        return 1.0 / (1.0 - q);
    }
    let row = eulerian_row(m);
    let mut poly = 0.0;
    for c in row.iter().rev() {
        poly = poly * q + c;
    }
    q * poly / (1.0 - q).powi(m as i32 + 1)
}

fn direct_quadratic_sum(beta_b: f64, a: f64, b: f64) -> Result<f64> {
    if b < 0.0 {
        return Err(Error::Divergent(format!(
            "Boltzmann sum diverges for B = {b} < 0"
        )));
    }
    let mut acc = Compensated::default();
    for n in 0..10_000_000u64 {
        let nf = n as f64;
        let t = (-beta_b * (a * nf + b * nf * nf)).exp();
        acc.add(t);
        if t < 1e-18 * acc.value() {
            return Ok(acc.value());
        }
    }
    Err(Error::NonConvergence {
        partial: acc.value(),
        tail: f64::NAN,
        terms: 10_000_000,
    })
}

/// `Z_J = Σ_{j=0}^{J} (-β_B B)^j / j! · Σ_n n^{2j} e^{-β_B A n}`.
///
/// The expansion is asymptotic in `B`: terms eventually grow factorially, so
/// the report carries the per-`J` error against the direct sum.
pub fn partition_quadratic(cfg: &ThermalConfig) -> Result<QuadraticPartition> {
    let (a, b) = match cfg.spectrum {
        Spectrum::Quadratic { a, b } => (a, b),
        Spectrum::Linear { .. } => {
            return Err(Error::domain(
                "partition_quadratic needs a quadratic spectrum",
            ))
        }
    };
    let beta_b = cfg.beta_b;
    let q = (-beta_b * a).exp();
    let direct = direct_quadratic_sum(beta_b, a, b)?;
    let x = -beta_b * b;
    let mut terms = Vec::with_capacity(cfg.ansatz_terms + 1);
    let mut coef = 1.0;
    for j in 0..=cfg.ansatz_terms {
        if j > 0 {
            coef *= x / j as f64;
        }
        // B = 0 keeps exactly the j = 0 term.
        let t = if coef == 0.0 {
            0.0
        } else {
            coef * power_geometric_sum(2 * j, q)
        };
        terms.push(t);
    }
    let mut acc = Compensated::default();
    let mut error_by_j = Vec::with_capacity(terms.len());
    for t in &terms {
        acc.add(*t);
        error_by_j.push(((acc.value() - direct) / direct).abs());
    }
    let value = acc.value();
    let smallest = terms
        .iter()
        .enumerate()
        .min_by(|x, y| x.1.abs().total_cmp(&y.1.abs()))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let n = terms.len();
    let diverging = n >= 2 && terms[n - 1].abs() > terms[n - 2].abs();
    let last = terms[n - 1].abs();
    Ok(QuadraticPartition {
        ansatz: SeriesResult {
            value,
            terms_used: n,
            tail_bound: last,
            converged: !diverging,
        },
        direct,
        rel_diff: ((value - direct) / direct).abs(),
        terms,
        error_by_j,
        optimal_truncation: smallest.saturating_sub(1),
        diverging,
    })
}

/// `Q(|z|²) = E(e^{-λ}|z|²) / (Z E(|z|²))`.
pub fn husimi_q(
    z: CSLabel,
    params: &MLParams,
    cfg: &ThermalConfig,
    eval: &EvalConfig,
) -> Result<f64> {
    let lambda = cfg.lambda()?;
    let x = z.abs2();
    let num = ml_eval(params, (-lambda).exp() * x, eval)?.value;
    let den = ml_eval(params, x, eval)?.value;
    Ok(num / (bose(lambda) * den))
}

/// The same distribution as `(1/Z) Σ_n e^{-λn} |c_n(z)|²`.
pub fn husimi_q_fock(
    z: CSLabel,
    params: &MLParams,
    cfg: &ThermalConfig,
    eval: &EvalConfig,
) -> Result<f64> {
    let lambda = cfg.lambda()?;
    let d = photon_distribution(z, params, eval)?;
    let mut acc = Compensated::default();
    for (n, p) in d.probabilities.iter().enumerate() {
        acc.add((-lambda * n as f64).exp() * p);
    }
    Ok(acc.value() / bose(lambda))
}

/// `P(|z|²) = (e^{λ}/Z) G((k/α) e^{λ}|z|²) / G((k/α)|z|²)`.
pub fn p_function(z: CSLabel, params: &MLParams, cfg: &ThermalConfig) -> Result<f64> {
    let lambda = cfg.lambda()?;
    let x = z.abs2();
    let grow = lambda.exp();
    let den = meijer_g_weight_scaled(params, x)?;
    if !(den.abs() > f64::MIN_POSITIVE) || !den.is_finite() {
        return Err(Error::Singular(format!("weight G vanishes at |z|^2 = {x}")));
    }
    let y = params.k_over_alpha() * x;
    let (ln_num, sign_num) = ln_scaled_weight(params, grow * x)?;
    // Assembled in log space: the Gaussian factor alone can underflow while num/den is huge.
    let ln_p = lambda - bose(lambda).ln() + (-lambda).exp_m1() * grow * y + ln_num - den.abs().ln();
    Ok(sign_num * den.signum() * ln_p.exp())
}

/// `(ln|S|, sign S)` for the scaled weight `S = U(A-b, 2-b, y)`. Where `S`
/// overflows, `y` is far into the range where `U ~ y^{-(A-b)}`.
fn ln_scaled_weight(params: &MLParams, x: f64) -> Result<(f64, f64)> {
    let s = meijer_g_weight_scaled(params, x);
    match s {
        Ok(v) if v.is_finite() => Ok((v.abs().ln(), v.signum())),
        _ => {
            let a = params.gamma_over_k() - params.beta_over_alpha();
            let y = params.k_over_alpha() * x;
            let next = (a * (a - (2.0 - params.beta_over_alpha()) + 1.0)).abs();
            if y > 1e8 * (1.0 + next) {
                Ok((-a * y.ln(), 1.0))
            } else {
                s.map(|v| (v.abs().ln(), v.signum()))
            }
        }
    }
}

/// `∫₀^∞ h(x) Q(x) dx`, which should be 1.
pub fn husimi_normalization(
    params: &MLParams,
    cfg: &ThermalConfig,
    eval: &EvalConfig,
    quad: &QuadratureSpec,
) -> Result<f64> {
    let r = quadrature::semi_infinite(
        |x| {
            let q = husimi_q(CSLabel::real(x.sqrt())?, params, cfg, eval)?;
            Ok(measure_weight_h(params, x, eval)? * q)
        },
        quad,
    )?;
    Ok(r.value)
}

/// `∫₀^∞ h(x) P(x) |c_n(x)|² dx`, to be compared with `e^{-λn}/Z`.
pub fn p_diagonal(
    params: &MLParams,
    cfg: &ThermalConfig,
    n: u32,
    eval: &EvalConfig,
    quad: &QuadratureSpec,
) -> Result<f64> {
    cfg.lambda()?;
    let mut ln_w = -ln_gamma(params.beta());
    for j in 0..n {
        let jf = j as f64;
        ln_w += ((params.gamma() + jf * params.k())
            / ((params.beta() + jf * params.alpha()) * (jf + 1.0)))
            .ln();
    }
    let r = quadrature::semi_infinite(
        |x| {
            if x == 0.0 {
                return Ok(0.0);
            }
            let e = ml_eval(params, x, eval)?.value;
            let pn = (ln_w + n as f64 * x.ln() - e.ln()).exp();
            let p = p_function(CSLabel::real(x.sqrt())?, params, cfg)?;
            Ok(measure_weight_h(params, x, eval)? * p * pn)
        },
        quad,
    )?;
    Ok(r.value)
}

/// `e^{-λn}/Z`, the Boltzmann diagonal of the linear-spectrum density operator.
pub fn boltzmann_diagonal(cfg: &ThermalConfig, n: u32) -> Result<f64> {
    let lambda = cfg.lambda()?;
    Ok((-lambda * n as f64).exp() / bose(lambda))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eval() -> EvalConfig {
        EvalConfig::default()
    }

    #[test]
    fn linear_partition_examples() {
        let z =
            partition_linear(&ThermalConfig::linear(std::f64::consts::LN_2, 1.0).unwrap()).unwrap();
        assert!((z - 2.0).abs() < 1e-15);
        let z = partition_linear(&ThermalConfig::linear(50.0, 1.0).unwrap()).unwrap();
        assert!((z - 1.0).abs() < 1e-10);
        let z = partition_linear(&ThermalConfig::linear(1.0, 1.0).unwrap()).unwrap();
        assert!((z - 1.581_976_706_869_326_4).abs() < 1e-14);
    }

    #[test]
    fn eulerian_sums_match_direct() {
        let q: f64 = 0.37;
        for m in 0..12 {
            let direct: f64 = (0..2000)
                .map(|n| (n as f64).powi(m as i32) * q.powi(n))
                .sum();
            let closed = power_geometric_sum(m, q);
            assert!(((closed - direct) / direct).abs() < 1e-12, "m={m}");
        }
    }

    #[test]
    fn quadratic_with_zero_b_is_linear() {
        for beta_b in [1.0, 2.0] {
            let cfg = ThermalConfig::quadratic(beta_b, 1.0, 0.0, 8).unwrap();
            let r = partition_quadratic(&cfg).unwrap();
            let lin = partition_linear(&ThermalConfig::linear(beta_b, 1.0).unwrap()).unwrap();
            assert_eq!(r.ansatz.value, lin);
            assert!(r.rel_diff < 1e-15);
        }
    }

    #[test]
    fn small_b_ansatz_is_accurate() {
        let r = partition_quadratic(&ThermalConfig::quadratic(1.0, 1.0, 1e-3, 8).unwrap()).unwrap();
        assert!(r.rel_diff < 1e-5, "{r:?}");
    }

    #[test]
    fn large_b_ansatz_diverges() {
        let r = partition_quadratic(&ThermalConfig::quadratic(1.0, 1.0, 0.5, 8).unwrap()).unwrap();
        assert!(r.diverging);
        assert!(!r.ansatz.converged);
        assert!(r.error_by_j[8] > r.error_by_j[2]);
    }

    #[test]
    fn negative_b_is_divergent() {
        let cfg = ThermalConfig::quadratic(1.0, 1.0, -0.1, 4).unwrap();
        assert!(matches!(
            partition_quadratic(&cfg),
            Err(Error::Divergent(_))
        ));
    }

    #[test]
    fn husimi_examples() {
        let unit = MLParams::unit();
        let cfg = ThermalConfig::linear_from_params(1.0, &unit).unwrap();
        let one = CSLabel::real(1.0).unwrap();
        let q = husimi_q(one, &unit, &cfg, &eval()).unwrap();
        let want = (1.0 - (-1f64).exp()) * ((-1f64).exp() - 1.0).exp();
        assert!((q - want).abs() < 1e-12);
        assert!((husimi_q_fock(one, &unit, &cfg, &eval()).unwrap() - q).abs() < 1e-9);

        let p = MLParams::new(2.0, 3.0, 1.0, 1.0).unwrap();
        let cfg = ThermalConfig::linear_from_params(0.7, &p).unwrap();
        let q0 = husimi_q(CSLabel::real(0.0).unwrap(), &p, &cfg, &eval()).unwrap();
        assert!((q0 - 1.0 / partition_linear(&cfg).unwrap()).abs() < 1e-15);

        let cold = ThermalConfig::linear_from_params(50.0, &p).unwrap();
        let z = CSLabel::real(1.2).unwrap();
        let vac = 1.0 / (crate::special::gamma(3.0) * ml_eval(&p, 1.44, &eval()).unwrap().value);
        assert!((husimi_q(z, &p, &cold, &eval()).unwrap() - vac).abs() < 1e-10);
    }

    #[test]
    fn p_function_unit_parameters() {
        let unit = MLParams::unit();
        let beta_b: f64 = 0.8;
        let cfg = ThermalConfig::linear_from_params(beta_b, &unit).unwrap();
        let zpart = partition_linear(&cfg).unwrap();
        for x in [0.0, 0.5, 2.0] {
            let p = p_function(CSLabel::real(f64::sqrt(x)).unwrap(), &unit, &cfg).unwrap();
            let want = beta_b.exp() / zpart * (-(beta_b.exp() - 1.0) * x).exp();
            assert!(((p - want) / want).abs() < 1e-13, "x={x}");
        }
    }

    #[test]
    fn p_function_reports_vanishing_weight() {
        let p = MLParams::new(1.0, 2.0, 1.0, 1.0).unwrap();
        let cfg = ThermalConfig::linear_from_params(1.0, &p).unwrap();
        assert!(matches!(
            p_function(CSLabel::real(0.0).unwrap(), &p, &cfg),
            Err(Error::Singular(_))
        ));
    }

    #[test]
    fn diagonal_and_normalization() {
        let p = MLParams::new(1.0, 2.0, 1.0, 1.0).unwrap();
        let cfg = ThermalConfig::linear_from_params(1.0, &p).unwrap();
        let quad = QuadratureSpec::default();
        let norm = husimi_normalization(&p, &cfg, &eval(), &quad).unwrap();
        assert!((norm - 1.0).abs() < 1e-5, "{norm}");
        for n in [0, 3] {
            let d = p_diagonal(&p, &cfg, n, &eval(), &quad).unwrap();
            let want = boltzmann_diagonal(&cfg, n).unwrap();
            assert!(((d - want) / want).abs() < 1e-5, "n={n}: {d} vs {want}");
        }
    }
}
