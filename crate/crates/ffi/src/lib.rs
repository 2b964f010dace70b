//! C ABI over `infdiv`.
//!
//! Every fallible call returns an [`InfdivStatus`]; on failure the message is
//! available from [`infdiv_last_error`] on the same thread. Handles are
//! opaque and must be released with their matching `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use infdiv::bounds::{cr_constant, gamma_fn, gaussian_abs_moment, root_z0};
use infdiv::cf_core::{ecf_point, Sample};
use infdiv::idtest::{run_test, Decision, Statistic, TestConfig, TestReport};
use infdiv::refdist::RefDist;
use infdiv::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InfdivStatus {
    Ok = 0,
    InvalidArgument = 1,
    NumericFailure = 2,
    DataError = 3,
    NullPointer = 4,
    Panic = 5,
}

pub const INFDIV_STAT_T3: u32 = 1;
pub const INFDIV_STAT_T4: u32 = 2;
pub const INFDIV_STAT_TMOM: u32 = 4;
pub const INFDIV_STAT_T2: u32 = 8;

/// Opaque sample handle.
pub struct InfdivSample {
    inner: Sample,
}

/// Opaque test report handle.
pub struct InfdivReport {
    inner: TestReport,
}

/// Test settings. Zero or negative optional fields mean "not set".
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct InfdivTestConfig {
    /// Largest grid point; `<= 0` selects `8 / sigma` from the data.
    pub grid_t_max: f64,
    pub grid_points: u32,
    /// Bitwise OR of `INFDIV_STAT_*`.
    pub statistics: u32,
    pub r_order: f64,
    pub bootstrap_b: u32,
    pub alpha: f64,
    pub seed: u64,
    /// m-divisibility hypothesis, `0` for none.
    pub m_hypothesis: u32,
    /// Nonzero: data already symmetric about 0.
    pub symmetric: u8,
    /// `<= 0` estimates the radius from the data.
    pub support_radius: f64,
    pub max_pairs: u32,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct InfdivStatisticResult {
    /// One of `INFDIV_STAT_*`.
    pub statistic: u32,
    pub observed: f64,
    pub p_value: f64,
    pub adjusted_p_value: f64,
    pub critical_value: f64,
    /// NaN when the statistic has no grid location.
    pub argmax_t: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> InfdivStatus {
    match err {
        Error::InvalidArgument(_) => InfdivStatus::InvalidArgument,
        Error::NumericFailure(_) | Error::UndefinedIterate { .. } => InfdivStatus::NumericFailure,
        Error::Data { .. } | Error::DataSet(_) | Error::Io(_) => InfdivStatus::DataError,
    }
}

/// Runs `f`, converting errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), InfdivStatus>) -> InfdivStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => InfdivStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic".into());
            InfdivStatus::Panic
        }
    }
}

fn lift<T>(r: infdiv::Result<T>) -> Result<T, InfdivStatus> {
    r.map_err(|e| {
        set_error(e.to_string());
        status_of(&e)
    })
}

fn non_null<T>(p: *const T, name: &str) -> Result<(), InfdivStatus> {
    if p.is_null() {
        set_error(format!("{name} is null"));
        return Err(InfdivStatus::NullPointer);
    }
    Ok(())
}

fn stat_code(s: Statistic) -> u32 {
    match s {
        Statistic::T3 => INFDIV_STAT_T3,
        Statistic::T4 => INFDIV_STAT_T4,
        Statistic::Tmom => INFDIV_STAT_TMOM,
        Statistic::T2 => INFDIV_STAT_T2,
    }
}

/// Message for the last failed call on this thread, or null. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn infdiv_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Copies `n` finite values into a new sample.
///
/// # Safety
/// `values` must point to `n` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn infdiv_sample_new(
    values: *const f64,
    n: usize,
    out: *mut *mut InfdivSample,
) -> InfdivStatus {
    guard(|| {
        non_null(values, "values")?;
        non_null(out, "out")?;
        let data = std::slice::from_raw_parts(values, n).to_vec();
        let inner = lift(Sample::new(data))?;
        *out = Box::into_raw(Box::new(InfdivSample { inner }));
        Ok(())
    })
}

/// Draws `n` values from a registry distribution with default parameters.
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn infdiv_sample_from_registry(
    name: *const c_char,
    n: usize,
    seed: u64,
    out: *mut *mut InfdivSample,
) -> InfdivStatus {
    guard(|| {
        non_null(name, "name")?;
        non_null(out, "out")?;
        let name = CStr::from_ptr(name).to_str().map_err(|_| {
            set_error("name is not valid UTF-8".into());
            InfdivStatus::InvalidArgument
        })?;
        let dist = lift(RefDist::by_name(name))?;
        let inner = lift(dist.sample(n, seed))?;
        *out = Box::into_raw(Box::new(InfdivSample { inner }));
        Ok(())
    })
}

/// Number of values in the sample, 0 for null.
///
/// # Safety
/// `sample` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn infdiv_sample_len(sample: *const InfdivSample) -> usize {
    sample.as_ref().map_or(0, |s| s.inner.n())
}

/// # Safety
/// `sample` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn infdiv_sample_free(sample: *mut InfdivSample) {
    if !sample.is_null() {
        drop(Box::from_raw(sample));
    }
}

#[no_mangle]
pub extern "C" fn infdiv_test_config_default() -> InfdivTestConfig {
    let d = TestConfig::default();
    InfdivTestConfig {
        grid_t_max: 0.0,
        grid_points: d.grid_points as u32,
        statistics: d
            .statistics
            .iter()
            .map(|&s| stat_code(s))
            .fold(0, |a, b| a | b),
        r_order: d.r_order,
        bootstrap_b: d.bootstrap_b as u32,
        alpha: d.alpha,
        seed: d.seed,
        m_hypothesis: 0,
        symmetric: 0,
        support_radius: 0.0,
        max_pairs: d.max_pairs as u32,
    }
}

fn to_config(c: &InfdivTestConfig) -> TestConfig {
    let statistics = [Statistic::T3, Statistic::T4, Statistic::Tmom, Statistic::T2]
        .into_iter()
        .filter(|&s| c.statistics & stat_code(s) != 0)
        .collect();
    TestConfig {
        grid_t_max: (c.grid_t_max > 0.0).then_some(c.grid_t_max),
        grid_points: c.grid_points as usize,
        statistics,
        r_order: c.r_order,
        bootstrap_b: c.bootstrap_b as usize,
        alpha: c.alpha,
        seed: c.seed,
        m_hypothesis: (c.m_hypothesis > 0).then_some(c.m_hypothesis),
        symmetric: c.symmetric != 0,
        support_radius: (c.support_radius > 0.0).then_some(c.support_radius),
        max_pairs: c.max_pairs as usize,
    }
}

/// Runs the bootstrap test.
///
/// # Safety
/// `sample` and `config` must be valid pointers; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn infdiv_run_test(
    sample: *const InfdivSample,
    config: *const InfdivTestConfig,
    out: *mut *mut InfdivReport,
) -> InfdivStatus {
    guard(|| {
        non_null(sample, "sample")?;
        non_null(config, "config")?;
        non_null(out, "out")?;
        let report = lift(run_test(&(*sample).inner, &to_config(&*config)))?;
        *out = Box::into_raw(Box::new(InfdivReport { inner: report }));
        Ok(())
    })
}

/// # Safety
/// `report` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn infdiv_report_free(report: *mut InfdivReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// 1 for a rejection, 0 for no evidence against, -1 for a null handle.
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn infdiv_report_decision(report: *const InfdivReport) -> i32 {
    match report.as_ref() {
        None => -1,
        Some(r) => i32::from(r.inner.decision == Decision::RejectId),
    }
}

/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn infdiv_report_statistic_count(report: *const InfdivReport) -> usize {
    report.as_ref().map_or(0, |r| r.inner.statistics.len())
}

/// # Safety
/// `report` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn infdiv_report_statistic(
    report: *const InfdivReport,
    index: usize,
    out: *mut InfdivStatisticResult,
) -> InfdivStatus {
    guard(|| {
        non_null(report, "report")?;
        non_null(out, "out")?;
        let stats = &(*report).inner.statistics;
        let Some(s) = stats.get(index) else {
            set_error(format!(
                "statistic index {index} out of range ({} available)",
                stats.len()
            ));
            return Err(InfdivStatus::InvalidArgument);
        };
        *out = InfdivStatisticResult {
            statistic: stat_code(s.statistic),
            observed: s.observed,
            p_value: s.p_value,
            adjusted_p_value: s.adjusted_p_value,
            critical_value: s.critical_value,
            argmax_t: s.argmax_t.unwrap_or(f64::NAN),
        };
        Ok(())
    })
}

/// JSON rendering of the report, identical to the CLI's. Free the string
/// with [`infdiv_string_free`].
///
/// # Safety
/// `report` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn infdiv_report_to_json(
    report: *const InfdivReport,
    out: *mut *mut c_char,
) -> InfdivStatus {
    guard(|| {
        non_null(report, "report")?;
        non_null(out, "out")?;
        let json = serde_json::to_string_pretty(&(*report).inner).map_err(|e| {
            set_error(e.to_string());
            InfdivStatus::NumericFailure
        })?;
        *out = CString::new(json).unwrap_or_default().into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must be null or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn infdiv_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// First positive root of `sin z - z cos z`.
///
/// # Safety
/// `value` must be writable; `residual` may be null.
#[no_mangle]
pub unsafe extern "C" fn infdiv_root_z0(value: *mut f64, residual: *mut f64) -> InfdivStatus {
    guard(|| {
        non_null(value, "value")?;
        let r = root_z0();
        *value = r.value;
        if !residual.is_null() {
            *residual = r.residual;
        }
        Ok(())
    })
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn infdiv_gamma(x: f64, out: *mut f64) -> InfdivStatus {
    guard(|| {
        non_null(out, "out")?;
        *out = lift(gamma_fn(x))?;
        Ok(())
    })
}

/// `E|Y|^r` for `Y ~ N(0, sigma^2)`, `0 < r < 2`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn infdiv_gaussian_abs_moment(
    sigma: f64,
    r: f64,
    out: *mut f64,
) -> InfdivStatus {
    guard(|| {
        non_null(out, "out")?;
        *out = lift(gaussian_abs_moment(sigma, r))?;
        Ok(())
    })
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn infdiv_cr_constant(r: f64, out: *mut f64) -> InfdivStatus {
    guard(|| {
        non_null(out, "out")?;
        *out = lift(cr_constant(r))?;
        Ok(())
    })
}

/// Empirical CF at `len` points. Any of the output arrays may be null;
/// `sym_out` receives the symmetrized (U-statistic) values.
///
/// # Safety
/// `sample` must be a live handle, `t` must hold `len` doubles and each
/// non-null output must have room for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn infdiv_ecf(
    sample: *const InfdivSample,
    t: *const f64,
    len: usize,
    re_out: *mut f64,
    im_out: *mut f64,
    sym_out: *mut f64,
) -> InfdivStatus {
    guard(|| {
        non_null(sample, "sample")?;
        non_null(t, "t")?;
        let s = &(*sample).inner;
        if !sym_out.is_null() {
            lift(s.require_estimable())?;
        }
        let n = s.n() as f64;
        for (k, &tk) in std::slice::from_raw_parts(t, len).iter().enumerate() {
            if !tk.is_finite() {
                set_error(format!("t[{k}] is not finite"));
                return Err(InfdivStatus::InvalidArgument);
            }
            let z = ecf_point(s.values(), tk);
            if !re_out.is_null() {
                *re_out.add(k) = z.re;
            }
            if !im_out.is_null() {
                *im_out.add(k) = z.im;
            }
            if !sym_out.is_null() {
                *sym_out.add(k) = (n * z.norm_sqr() - 1.0) / (n - 1.0);
            }
        }
        Ok(())
    })
}
