//! C ABI over `deltabound-core`.
//!
//! Every entry point returns a [`DbStatus`]. On failure the message is kept
//! per thread and can be read with [`db_last_error_message`]. Reports are
//! opaque [`DbReport`] handles released with [`db_report_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use deltabound::delta_bounds::BoundReport;
use deltabound::error::Error;
use deltabound::heat_kernel::{k1, KernelPoint};
use deltabound::huber::{huber_chain, HuberOverrides};
use deltabound::invariants::{BoundOptions, CoveringKind, CoveringScenario, Mode, SurfaceInvariants};
use deltabound::numerics::QuadratureSpec;
use deltabound::scenario::{evaluate, report_json, ScenarioFile, SCHEMA_VERSION};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DbStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Config = 3,
    Usage = 4,
    Domain = 5,
    Convergence = 6,
    OutOfRange = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DbMode {
    PaperFaithful = 0,
    Tight = 1,
}

impl From<DbMode> for Mode {
    fn from(m: DbMode) -> Self {
        match m {
            DbMode::PaperFaithful => Mode::PaperFaithful,
            DbMode::Tight => Mode::Tight,
        }
    }
}

/// Genus, systole and first nonzero eigenvalue of a surface.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DbSurface {
    pub genus: u64,
    pub systole: f64,
    pub lambda1: f64,
}

impl From<DbSurface> for SurfaceInvariants {
    fn from(s: DbSurface) -> Self {
        SurfaceInvariants {
            genus: s.genus,
            systole: s.systole,
            lambda1: s.lambda1,
            n_ev: None,
            n_geo5: None,
            diameter: None,
        }
    }
}

/// An evaluated bound.
pub struct DbReport {
    report: BoundReport,
    labels: Vec<CString>,
    json: CString,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_last_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(e: &Error) -> DbStatus {
    match e {
        Error::Config(_) => DbStatus::Config,
        Error::Usage(_) => DbStatus::Usage,
        Error::Domain(_) => DbStatus::Domain,
        Error::Convergence { .. } => DbStatus::Convergence,
    }
}

/// Runs `f`, recording errors and turning panics into [`DbStatus::Panic`].
fn guard(f: impl FnOnce() -> Result<(), (DbStatus, String)>) -> DbStatus {
    clear_last_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DbStatus::Ok,
        Ok(Err((status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".to_string());
            set_last_error(format!("panic: {msg}"));
            DbStatus::Panic
        }
    }
}

fn core_err(e: Error) -> (DbStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(name: &str) -> (DbStatus, String) {
    (DbStatus::NullPointer, format!("{name} is null"))
}

fn make_report(file: &ScenarioFile, rounded: bool) -> Result<Box<DbReport>, (DbStatus, String)> {
    let ev = file.evaluation(None, rounded);
    let outcome = evaluate(file, &ev).map_err(core_err)?;
    let json = CString::new(report_json(file, &outcome)).expect("reports contain no NUL");
    let labels = outcome
        .main
        .terms
        .iter()
        .map(|t| CString::new(t.label).expect("labels contain no NUL"))
        .collect();
    Ok(Box::new(DbReport {
        report: outcome.main,
        labels,
        json,
    }))
}

fn scenario_file(scenario: CoveringScenario, mode: DbMode) -> Result<ScenarioFile, (DbStatus, String)> {
    scenario.validate().map_err(core_err)?;
    Ok(ScenarioFile {
        schema_version: SCHEMA_VERSION,
        scenario,
        mode: mode.into(),
        quadrature: None,
        spectrum: None,
        parshin: None,
    })
}

unsafe fn store(out: *mut *mut DbReport, r: Box<DbReport>) {
    *out = Box::into_raw(r);
}

/// Evaluates a scenario given as JSON text. `mode_override` < 0 keeps the
/// file's mode; 0 and 1 select a [`DbMode`].
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn db_bound_from_json(
    json: *const c_char,
    mode_override: i32,
    rounded: bool,
    out: *mut *mut DbReport,
) -> DbStatus {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|e| (DbStatus::InvalidUtf8, format!("json is not UTF-8: {e}")))?;
        let mut file = ScenarioFile::parse(text).map_err(core_err)?;
        match mode_override {
            m if m < 0 => {}
            0 => file.mode = Mode::PaperFaithful,
            1 => file.mode = Mode::Tight,
            m => return Err((DbStatus::OutOfRange, format!("unknown mode {m}"))),
        }
        store(out, make_report(&file, rounded)?);
        Ok(())
    })
}

/// Bound for a single surface.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn db_intrinsic_bound(
    surface: DbSurface,
    mode: DbMode,
    rounded: bool,
    out: *mut *mut DbReport,
) -> DbStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let file = scenario_file(CoveringScenario::trivial(surface.into()), mode)?;
        store(out, make_report(&file, rounded)?);
        Ok(())
    })
}

/// Bound for an unramified covering of `base`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn db_unramified_bound(
    base: DbSurface,
    cover: DbSurface,
    mode: DbMode,
    rounded: bool,
    out: *mut *mut DbReport,
) -> DbStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let file = scenario_file(CoveringScenario::unramified(base.into(), cover.into()), mode)?;
        store(out, make_report(&file, rounded)?);
        Ok(())
    })
}

/// Bound for a covering ramified over points whose mutual distances and
/// the base systole lie in `[r0, big_r0]`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn db_ramified_bound(
    base: DbSurface,
    cover: DbSurface,
    r0: f64,
    big_r0: f64,
    mode: DbMode,
    rounded: bool,
    out: *mut *mut DbReport,
) -> DbStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let scenario = CoveringScenario {
            base: base.into(),
            cover: Some(cover.into()),
            kind: CoveringKind::Ramified { r0, big_r0 },
        };
        let file = scenario_file(scenario, mode)?;
        store(out, make_report(&file, rounded)?);
        Ok(())
    })
}

/// Weight-one heat kernel at `(t, rho)` with its quadrature error estimate.
///
/// # Safety
/// `value` and `error_estimate` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn db_k1(t: f64, rho: f64, value: *mut f64, error_estimate: *mut f64) -> DbStatus {
    guard(|| {
        if value.is_null() || error_estimate.is_null() {
            return Err(null("output pointer"));
        }
        let p = KernelPoint::new(t, rho).map_err(core_err)?;
        let r = k1(p, &QuadratureSpec::default()).map_err(core_err)?;
        *value = r.value;
        *error_estimate = r.error_estimate;
        Ok(())
    })
}

/// Natural log of the geodesic counting constant for a surface.
///
/// # Safety
/// `ln_value` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn db_huber_constant(
    surface: DbSurface,
    mode: DbMode,
    rounded: bool,
    ln_value: *mut f64,
) -> DbStatus {
    guard(|| {
        if ln_value.is_null() {
            return Err(null("ln_value"));
        }
        let opts = BoundOptions {
            mode: mode.into(),
            rounded,
        };
        let b = huber_chain(
            surface.genus,
            surface.systole,
            surface.lambda1,
            opts,
            HuberOverrides::default(),
        )
        .map_err(core_err)?;
        *ln_value = b.final_bound.ln_abs();
        Ok(())
    })
}

fn with_report<T>(r: *const DbReport, f: impl FnOnce(&DbReport) -> T) -> Result<T, (DbStatus, String)> {
    if r.is_null() {
        return Err(null("report"));
    }
    // SAFETY: non-null handles come from Box::into_raw in this crate.
    Ok(f(unsafe { &*r }))
}

/// Sign (-1, 0 or 1), natural log and base-10 log of the bound's absolute value.
///
/// # Safety
/// `report` must be a live handle; output pointers may be null.
#[no_mangle]
pub unsafe extern "C" fn db_report_value(
    report: *const DbReport,
    sign: *mut i32,
    ln_abs: *mut f64,
    log10_abs: *mut f64,
) -> DbStatus {
    guard(|| {
        let v = with_report(report, |r| r.report.final_value)?;
        if !sign.is_null() {
            *sign = v.sign() as i32;
        }
        if !ln_abs.is_null() {
            *ln_abs = v.ln_abs();
        }
        if !log10_abs.is_null() {
            *log10_abs = v.log10_abs();
        }
        Ok(())
    })
}

/// Number of labelled terms, or 0 for a null handle.
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn db_report_term_count(report: *const DbReport) -> usize {
    if report.is_null() {
        0
    } else {
        (*report).labels.len()
    }
}

/// Label and natural log of term `index`. The label lives as long as the
/// report.
///
/// # Safety
/// `report` must be a live handle; output pointers may be null.
#[no_mangle]
pub unsafe extern "C" fn db_report_term(
    report: *const DbReport,
    index: usize,
    label: *mut *const c_char,
    ln_abs: *mut f64,
) -> DbStatus {
    guard(|| {
        let (l, v) = with_report(report, |r| {
            r.labels
                .get(index)
                .map(|l| (l.as_ptr(), r.report.terms[index].value.ln_abs()))
        })?
        .ok_or_else(|| (DbStatus::OutOfRange, format!("term index {index} out of range")))?;
        if !label.is_null() {
            *label = l;
        }
        if !ln_abs.is_null() {
            *ln_abs = v;
        }
        Ok(())
    })
}

/// The JSON report, identical to the command-line output. Owned by the
/// report; null for a null handle.
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn db_report_json(report: *const DbReport) -> *const c_char {
    if report.is_null() {
        ptr::null()
    } else {
        (*report).json.as_ptr()
    }
}

/// Releases a report. Null is ignored.
///
/// # Safety
/// `report` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn db_report_free(report: *mut DbReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next call on the same thread.
#[no_mangle]
pub extern "C" fn db_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn db_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
