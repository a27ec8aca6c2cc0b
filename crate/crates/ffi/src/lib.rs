//! C ABI for `mlcs`.
//!
//! Every function returns an [`MlcsStatus`] and writes results through out
//! pointers. On failure the message is kept per thread and can be read with
//! [`mlcs_last_error`]. Parameter sets and coherent states are opaque handles
//! that must be released with their `_free` function.

use mlcs::coherent::{self, CSLabel, FockExpansion};
use mlcs::quadrature::QuadratureSpec;
use mlcs::{continuum, kcore, measure, mlfunc, thermal, Error, EvalConfig, MLParams};
use num_complex::Complex64;
use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

/// Result code of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MlcsStatus {
    Ok = 0,
    /// Invalid argument or parameter outside the domain.
    Domain = 1,
    Overflow = 2,
    /// Series hit its term budget; partial results are still written.
    NonConvergence = 3,
    Divergent = 4,
    Quadrature = 5,
    TruncationOverflow = 6,
    RouteMismatch = 7,
    Singular = 8,
    NullPointer = 9,
    /// A Rust panic was caught at the boundary.
    Panic = 10,
}

/// Opaque parameter set `(α, β, γ, k)`.
pub struct MlcsParams(MLParams);

/// Opaque truncated coherent state.
pub struct MlcsState(FockExpansion);

/// Value of a series evaluation.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct MlcsSeries {
    pub value: f64,
    pub terms_used: usize,
    pub tail_bound: f64,
    pub converged: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> MlcsStatus {
    match e {
        Error::Domain(_) => MlcsStatus::Domain,
        Error::Overflow(_) => MlcsStatus::Overflow,
        Error::NonConvergence { .. } => MlcsStatus::NonConvergence,
        Error::Divergent(_) => MlcsStatus::Divergent,
        Error::Quadrature { .. } => MlcsStatus::Quadrature,
        Error::TruncationOverflow { .. } => MlcsStatus::TruncationOverflow,
        Error::RouteMismatch { .. } => MlcsStatus::RouteMismatch,
        Error::Singular(_) => MlcsStatus::Singular,
    }
}

fn fail(e: Error) -> MlcsStatus {
    let s = status_of(&e);
    set_error(e.to_string());
    s
}

/// Runs `f`, turning errors and panics into status codes.
fn guard<F: FnOnce() -> Result<(), MlcsStatus>>(f: F) -> MlcsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => MlcsStatus::Ok,
        Ok(Err(s)) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("panic: {msg}"));
            MlcsStatus::Panic
        }
    }
}

fn null(what: &str) -> MlcsStatus {
    set_error(format!("null pointer: {what}"));
    MlcsStatus::NullPointer
}

unsafe fn params_ref<'a>(p: *const MlcsParams) -> Result<&'a MLParams, MlcsStatus> {
    p.as_ref().map(|p| &p.0).ok_or_else(|| null("params"))
}

unsafe fn write<T>(out: *mut T, v: T, what: &str) -> Result<(), MlcsStatus> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(v);
    Ok(())
}

fn label(re: f64, im: f64) -> Result<CSLabel, MlcsStatus> {
    CSLabel::from_complex(Complex64::new(re, im)).map_err(fail)
}

/// Message of the last failed call on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn mlcs_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Creates a parameter set.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for a handle.
#[no_mangle]
pub unsafe extern "C" fn mlcs_params_new(
    alpha: f64,
    beta: f64,
    gamma: f64,
    k: f64,
    out: *mut *mut MlcsParams,
) -> MlcsStatus {
    guard(|| {
        let p = MLParams::new(alpha, beta, gamma, k).map_err(fail)?;
        write(out, Box::into_raw(Box::new(MlcsParams(p))), "out")
    })
}

/// Releases a parameter set. Null is ignored.
///
/// # Safety
/// `p` must come from [`mlcs_params_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn mlcs_params_free(p: *mut MlcsParams) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

unsafe fn series(
    params: *const MlcsParams,
    z: f64,
    rel_tol: f64,
    max_terms: usize,
    out: *mut MlcsSeries,
    route: fn(&MLParams, f64, &EvalConfig) -> mlcs::Result<mlfunc::SeriesResult>,
) -> MlcsStatus {
    guard(|| {
        let p = params_ref(params)?;
        let cfg = EvalConfig::new(rel_tol, max_terms).map_err(fail)?;
        match route(p, z, &cfg) {
            Ok(r) => write(
                out,
                MlcsSeries {
                    value: r.value,
                    terms_used: r.terms_used,
                    tail_bound: r.tail_bound,
                    converged: r.converged,
                },
                "out",
            ),
            Err(Error::NonConvergence {
                partial,
                tail,
                terms,
            }) => {
                write(
                    out,
                    MlcsSeries {
                        value: partial,
                        terms_used: terms,
                        tail_bound: tail,
                        converged: false,
                    },
                    "out",
                )?;
                Err(fail(Error::NonConvergence {
                    partial,
                    tail,
                    terms,
                }))
            }
            Err(e) => Err(fail(e)),
        }
    })
}

/// The generalized Mittag-Leffler function at real `z` by its defining series.
/// On non-convergence the partial sum is still written.
///
/// # Safety
/// `params` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mlcs_ml_eval(
    params: *const MlcsParams,
    z: f64,
    rel_tol: f64,
    max_terms: usize,
    out: *mut MlcsSeries,
) -> MlcsStatus {
    series(params, z, rel_tol, max_terms, out, mlfunc::ml_eval)
}

/// The same function through the confluent hypergeometric route.
///
/// # Safety
/// `params` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mlcs_ml_eval_1f1(
    params: *const MlcsParams,
    z: f64,
    rel_tol: f64,
    max_terms: usize,
    out: *mut MlcsSeries,
) -> MlcsStatus {
    series(params, z, rel_tol, max_terms, out, mlfunc::ml_eval_via_1f1)
}

/// `Γ_k(x)`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mlcs_k_gamma(x: f64, k: f64, out: *mut f64) -> MlcsStatus {
    guard(|| write(out, kcore::k_gamma(x, k).map_err(fail)?, "out"))
}

/// `(x)_{n,k}`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mlcs_k_pochhammer(x: f64, n: u32, k: f64, out: *mut f64) -> MlcsStatus {
    guard(|| write(out, kcore::k_pochhammer(x, n, k).map_err(fail)?, "out"))
}

/// Structure constant `e(n)`, `n ≥ 1`.
///
/// # Safety
/// `params` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mlcs_structure_e(
    params: *const MlcsParams,
    n: u32,
    out: *mut f64,
) -> MlcsStatus {
    guard(|| {
        let p = params_ref(params)?;
        write(out, coherent::structure_e(p, n).map_err(fail)?, "out")
    })
}

/// `⟨z1|z2⟩`, written as real and imaginary parts.
///
/// # Safety
/// `params` must be a live handle; `out_re` and `out_im` writable.
#[no_mangle]
pub unsafe extern "C" fn mlcs_overlap(
    params: *const MlcsParams,
    z1_re: f64,
    z1_im: f64,
    z2_re: f64,
    z2_im: f64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> MlcsStatus {
    guard(|| {
        let p = params_ref(params)?;
        let o = coherent::overlap(
            label(z1_re, z1_im)?,
            label(z2_re, z2_im)?,
            p,
            &EvalConfig::default(),
        )
        .map_err(fail)?;
        write(out_re, o.re, "out_re")?;
        write(out_im, o.im, "out_im")
    })
}

/// Builds the coherent state `|z⟩` in the number basis.
///
/// # Safety
/// `params` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mlcs_cs_build(
    params: *const MlcsParams,
    z_re: f64,
    z_im: f64,
    out: *mut *mut MlcsState,
) -> MlcsStatus {
    guard(|| {
        let p = params_ref(params)?;
        let s = coherent::cs_build(label(z_re, z_im)?, p, &EvalConfig::default()).map_err(fail)?;
        write(out, Box::into_raw(Box::new(MlcsState(s))), "out")
    })
}

/// Releases a state. Null is ignored.
///
/// # Safety
/// `s` must come from [`mlcs_cs_build`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn mlcs_state_free(s: *mut MlcsState) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Number of stored coefficients.
///
/// # Safety
/// `s` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mlcs_state_len(s: *const MlcsState, out: *mut usize) -> MlcsStatus {
    guard(|| {
        let s = s.as_ref().ok_or_else(|| null("state"))?;
        write(out, s.0.coeffs().len(), "out")
    })
}

/// Coefficient `c_n`.
///
/// # Safety
/// `s` must be a live handle; `out_re` and `out_im` writable.
#[no_mangle]
pub unsafe extern "C" fn mlcs_state_coeff(
    s: *const MlcsState,
    n: usize,
    out_re: *mut f64,
    out_im: *mut f64,
) -> MlcsStatus {
    guard(|| {
        let s = s.as_ref().ok_or_else(|| null("state"))?;
        let c = *s.0.coeffs().get(n).ok_or_else(|| {
            fail(Error::Domain(format!(
                "index {n} outside a window of {}",
                s.0.coeffs().len()
            )))
        })?;
        write(out_re, c.re, "out_re")?;
        write(out_im, c.im, "out_im")
    })
}

/// Probability mass discarded by the truncation.
///
/// # Safety
/// `s` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mlcs_state_tail_mass(s: *const MlcsState, out: *mut f64) -> MlcsStatus {
    guard(|| {
        let s = s.as_ref().ok_or_else(|| null("state"))?;
        write(out, s.0.tail_mass(), "out")
    })
}

/// The Meijer-G weight `G((k/α) x)`.
///
/// # Safety
/// `params` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mlcs_meijer_g_weight(
    params: *const MlcsParams,
    x: f64,
    out: *mut f64,
) -> MlcsStatus {
    guard(|| {
        let p = params_ref(params)?;
        write(out, measure::meijer_g_weight(p, x).map_err(fail)?, "out")
    })
}

/// Radial density `h(x)` of the resolving measure.
///
/// # Safety
/// `params` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mlcs_measure_weight_h(
    params: *const MlcsParams,
    x: f64,
    out: *mut f64,
) -> MlcsStatus {
    guard(|| {
        let p = params_ref(params)?;
        write(
            out,
            measure::measure_weight_h(p, x, &EvalConfig::default()).map_err(fail)?,
            "out",
        )
    })
}

/// Husimi function of the thermal state with spectrum `E_n = (β/γ) n`.
///
/// # Safety
/// `params` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mlcs_husimi_q(
    params: *const MlcsParams,
    beta_b: f64,
    z_re: f64,
    z_im: f64,
    out: *mut f64,
) -> MlcsStatus {
    guard(|| {
        let p = params_ref(params)?;
        let t = thermal::ThermalConfig::linear_from_params(beta_b, p).map_err(fail)?;
        let v =
            thermal::husimi_q(label(z_re, z_im)?, p, &t, &EvalConfig::default()).map_err(fail)?;
        write(out, v, "out")
    })
}

/// P function of the same thermal state.
///
/// # Safety
/// `params` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mlcs_p_function(
    params: *const MlcsParams,
    beta_b: f64,
    z_re: f64,
    z_im: f64,
    out: *mut f64,
) -> MlcsStatus {
    guard(|| {
        let p = params_ref(params)?;
        let t = thermal::ThermalConfig::linear_from_params(beta_b, p).map_err(fail)?;
        write(
            out,
            thermal::p_function(label(z_re, z_im)?, p, &t).map_err(fail)?,
            "out",
        )
    })
}

/// Partition function of the linear spectrum `E_n = slope·n`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mlcs_partition_linear(
    beta_b: f64,
    slope: f64,
    out: *mut f64,
) -> MlcsStatus {
    guard(|| {
        let t = thermal::ThermalConfig::linear(beta_b, slope).map_err(fail)?;
        write(out, thermal::partition_linear(&t).map_err(fail)?, "out")
    })
}

/// `ν(x) = ∫₀^∞ x^E / Γ(E+1) dE`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mlcs_nu(x: f64, out: *mut f64) -> MlcsStatus {
    guard(|| {
        write(
            out,
            continuum::nu_function(x, &QuadratureSpec::default()).map_err(fail)?,
            "out",
        )
    })
}

/// Husimi function of the continuum thermal state.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mlcs_continuum_husimi(
    beta_b: f64,
    z_re: f64,
    z_im: f64,
    out: *mut f64,
) -> MlcsStatus {
    guard(|| {
        let v = continuum::continuum_husimi(label(z_re, z_im)?, beta_b, &QuadratureSpec::default())
            .map_err(fail)?;
        write(out, v, "out")
    })
}
