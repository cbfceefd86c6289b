//! C interface to `inflation-core`.
//!
//! Series and rate functions live behind opaque handles created by the
//! `infl_series_*` and `infl_rate_*` constructors and released with the matching
//! `*_free`. Every fallible call returns an [`InflStatus`]; results are
//! written through out-pointers only on success. The message for the most
//! recent call on the current thread is available from
//! [`infl_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use inflation_core::presets::published_direct_rate;
use inflation_core::timebase::bundled_series;
use inflation_core::{
    accumulate, functional_residual, log_linear_model, parse_cpi_csv, piecewise_affine_model, rate_from_cpi,
    real_value, CpiSeries, Error, FitReport, QuadratureConfig, RateFunction,
};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InflStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// Malformed input: bad lengths, invalid UTF-8, unsorted knots, bad report.
    InvalidArgument = 2,
    /// CSV text could not be parsed.
    Parse = 3,
    /// Time outside the function's domain, or a model value not positive.
    Domain = 4,
    /// `1 + rate <= 0` somewhere on the interval.
    RateDomain = 5,
    /// Quadrature could not reach the tolerance.
    Accuracy = 6,
    /// Internal panic; the library state is unchanged.
    Panic = 7,
}

/// Opaque CPI series.
pub struct InflSeries(CpiSeries);

/// Opaque rate-per-unit-time function.
pub struct InflRate(RateFunction);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Failure(InflStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Parse { .. } => InflStatus::Parse,
            Error::RateDomain { .. } | Error::IntegrandDomain { .. } | Error::InfeasibleStart => InflStatus::RateDomain,
            Error::Accuracy { .. } => InflStatus::Accuracy,
            Error::Domain(_) | Error::Positivity { .. } | Error::Basis { .. } => InflStatus::Domain,
            Error::Series(_) | Error::Report(_) => InflStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn invalid(message: impl Into<String>) -> Failure {
    Failure(InflStatus::InvalidArgument, message.into())
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> InflStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            InflStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_last_error(&message);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            InflStatus::Panic
        }
    }
}

unsafe fn non_null<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| Failure(InflStatus::NullPointer, format!("{name} is null")))
}

unsafe fn out_ptr<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| Failure(InflStatus::NullPointer, format!("{name} is null")))
}

unsafe fn slice<'a>(p: *const f64, len: usize, name: &str) -> Result<&'a [f64], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Failure(InflStatus::NullPointer, format!("{name} is null")));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn text<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(InflStatus::NullPointer, format!("{name} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| invalid(format!("{name} is not valid UTF-8")))
}

fn quad(tol: f64) -> Result<QuadratureConfig, Failure> {
    if tol <= 0.0 {
        return Ok(QuadratureConfig::default());
    }
    let q = QuadratureConfig::with_tol(tol);
    q.validate()?;
    Ok(q)
}

/// Message describing the last failed call on this thread, or an empty
/// string if it succeeded. Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn infl_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Parses `time,value` CSV text (month codes such as `1993.01` allowed).
///
/// # Safety
/// `csv` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn infl_series_from_csv(csv: *const c_char, out: *mut *mut InflSeries) -> InflStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let series = parse_cpi_csv(text(csv, "csv")?)?;
        *out = Box::into_raw(Box::new(InflSeries(series)));
        Ok(())
    })
}

/// Builds a series from `len` decimal-year times and positive values.
///
/// # Safety
/// `times` and `values` must each point to `len` doubles; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn infl_series_from_arrays(
    times: *const f64,
    values: *const f64,
    len: usize,
    out: *mut *mut InflSeries,
) -> InflStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let times = slice(times, len, "times")?;
        let values = slice(values, len, "values")?;
        let pairs: Vec<(f64, f64)> = times.iter().copied().zip(values.iter().copied()).collect();
        *out = Box::into_raw(Box::new(InflSeries(CpiSeries::from_pairs(&pairs)?)));
        Ok(())
    })
}

/// The monthly CPI series compiled into the library.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn infl_series_bundled(out: *mut *mut InflSeries) -> InflStatus {
    guard(|| {
        *out_ptr(out, "out")? = Box::into_raw(Box::new(InflSeries(bundled_series())));
        Ok(())
    })
}

/// Number of observations, or 0 for a null handle.
///
/// # Safety
/// `series` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn infl_series_len(series: *const InflSeries) -> usize {
    series.as_ref().map_or(0, |s| s.0.len())
}

/// # Safety
/// `series` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn infl_series_free(series: *mut InflSeries) {
    if !series.is_null() {
        drop(Box::from_raw(series));
    }
}

fn new_rate(out: &mut *mut InflRate, rate: RateFunction) {
    *out = Box::into_raw(Box::new(InflRate(rate)));
}

/// Constant rate `i` per unit time.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn infl_rate_constant(i: f64, out: *mut *mut InflRate) -> InflStatus {
    guard(|| {
        if !i.is_finite() {
            return Err(invalid("rate must be finite"));
        }
        new_rate(out_ptr(out, "out")?, RateFunction::Constant(i));
        Ok(())
    })
}

/// Piecewise-constant rate: `values[k]` on `[knots[k], knots[k + 1])`, so
/// `knots` holds `n_values + 1` strictly increasing times.
///
/// # Safety
/// `knots` must point to `n_values + 1` doubles and `values` to `n_values`;
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn infl_rate_piecewise(
    knots: *const f64,
    values: *const f64,
    n_values: usize,
    out: *mut *mut InflRate,
) -> InflStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let knots = slice(knots, n_values + 1, "knots")?.to_vec();
        let values = slice(values, n_values, "values")?.to_vec();
        new_rate(out, RateFunction::piecewise_constant(knots, values)?);
        Ok(())
    })
}

/// Rate of the piecewise-affine interpolant through the series.
///
/// # Safety
/// `series` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn infl_rate_affine(series: *const InflSeries, out: *mut *mut InflRate) -> InflStatus {
    guard(|| {
        let s = non_null(series, "series")?;
        new_rate(out_ptr(out, "out")?, rate_from_cpi(&piecewise_affine_model(&s.0)));
        Ok(())
    })
}

/// Rate of the log-linear interpolant through the series (piecewise constant).
///
/// # Safety
/// `series` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn infl_rate_loglinear(series: *const InflSeries, out: *mut *mut InflRate) -> InflStatus {
    guard(|| {
        let s = non_null(series, "series")?;
        new_rate(out_ptr(out, "out")?, rate_from_cpi(&log_linear_model(&s.0)));
        Ok(())
    })
}

/// Published eight-term trigonometric rate for the bundled series.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn infl_rate_published_trig(out: *mut *mut InflRate) -> InflStatus {
    guard(|| {
        new_rate(out_ptr(out, "out")?, published_direct_rate());
        Ok(())
    })
}

/// Rate described by a JSON fit report as written by `inflation --json`.
///
/// # Safety
/// `json` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn infl_rate_from_report(json: *const c_char, out: *mut *mut InflRate) -> InflStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let report = FitReport::from_json(text(json, "json")?)?;
        new_rate(out, report.rate_function()?);
        Ok(())
    })
}

/// # Safety
/// `rate` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn infl_rate_free(rate: *mut InflRate) {
    if !rate.is_null() {
        drop(Box::from_raw(rate));
    }
}

/// Rate per unit time at `t` (right-hand limit at knots).
///
/// # Safety
/// `rate` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn infl_rate_eval(rate: *const InflRate, t: f64, out: *mut f64) -> InflStatus {
    guard(|| {
        let r = non_null(rate, "rate")?;
        *out_ptr(out, "out")? = r.0.eval(t)?;
        Ok(())
    })
}

/// Rate and growth factor over `[t0, t1]`. `tol <= 0` selects the default
/// quadrature tolerance. Either out-pointer may be null.
///
/// # Safety
/// `rate` must be a live handle; non-null out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn infl_accumulate(
    rate: *const InflRate,
    t0: f64,
    t1: f64,
    tol: f64,
    rate_out: *mut f64,
    growth_out: *mut f64,
) -> InflStatus {
    guard(|| {
        let r = non_null(rate, "rate")?;
        let acc = accumulate(&r.0, t0, t1, &quad(tol)?)?;
        if let Some(p) = rate_out.as_mut() {
            *p = acc.rate;
        }
        if let Some(p) = growth_out.as_mut() {
            *p = acc.growth_factor;
        }
        Ok(())
    })
}

/// Real value at `t1` of `x0` held from `t0`.
///
/// # Safety
/// `rate` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn infl_real_value(
    rate: *const InflRate,
    x0: f64,
    t0: f64,
    t1: f64,
    tol: f64,
    out: *mut f64,
) -> InflStatus {
    guard(|| {
        let r = non_null(rate, "rate")?;
        *out_ptr(out, "out")? = real_value(&r.0, x0, t0, t1, &quad(tol)?)?;
        Ok(())
    })
}

/// Sum over consecutive observations of the squared gap between the rate's
/// growth factor and the observed CPI ratio.
///
/// # Safety
/// `rate` and `series` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn infl_functional_residual(
    rate: *const InflRate,
    series: *const InflSeries,
    tol: f64,
    out: *mut f64,
) -> InflStatus {
    guard(|| {
        let r = non_null(rate, "rate")?;
        let s = non_null(series, "series")?;
        *out_ptr(out, "out")? = functional_residual(&r.0, &s.0, &quad(tol)?)?;
        Ok(())
    })
}
