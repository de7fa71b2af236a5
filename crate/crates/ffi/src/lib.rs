//! C ABI over `qdverify`.
//!
//! Every fallible function returns a [`QdStatus`] and writes its result through
//! an out-pointer. On failure the out-pointer is left untouched and
//! [`qd_last_error_message`] describes the problem. Storage analyses are
//! returned as opaque [`QdStorageReport`] handles released with
//! [`qd_storage_report_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use qdverify::applications::{
    self, squeezed_storage_analysis, CoherentTask, StorageMode, StorageRecord, StorageReport,
};
use qdverify::criterion::{self, Degeneracy, FidelityPair, Method, OverlapPair, PriorEnsemble, Verdict};
use qdverify::gaussian::{self, CovMat2, GaussianState};
use qdverify::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QdStatus {
    Ok = 0,
    InvalidInput = 1,
    Domain = 2,
    Completeness = 3,
    Truncation = 4,
    OracleMismatch = 5,
    Io = 6,
    NullPointer = 7,
    BufferTooSmall = 8,
    Internal = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QdMethod {
    ClosedForm = 0,
    NumericSup = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QdDegeneracy {
    None = 0,
    /// `B = 0`.
    NoNonorthogonality = 1,
    /// `|b − a| ≥ B`.
    SlopeExceedsBenchmarkRange = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QdStorageMode {
    AsPublished = 0,
    PureTarget = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QdVerdict {
    pub is_quantum_domain: bool,
    /// `(a + b) / 2`.
    pub lhs: f64,
    pub rhs: f64,
    pub method: QdMethod,
    pub degenerate: QdDegeneracy,
    pub marginal: bool,
    pub labels_swapped: bool,
}

/// Mean `(m1, m2)` and covariance entries, vacuum covariance = identity.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QdGaussianState {
    pub m1: f64,
    pub m2: f64,
    pub c11: f64,
    pub c12: f64,
    pub c22: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QdStorageSummary {
    pub mode: QdStorageMode,
    pub a: f64,
    pub b: f64,
    pub lhs: f64,
    pub rhs_min: f64,
    pub theta_min: f64,
    /// NaN when the mode uses the literal output covariances as targets.
    pub target_r: f64,
    pub verdict: QdVerdict,
}

/// Opaque squeezed-storage analysis.
pub struct QdStorageReport {
    report: StorageReport,
    label: CString,
    notes: Vec<CString>,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> QdStatus {
    match e {
        Error::InvalidInput(_) | Error::Json(_) => QdStatus::InvalidInput,
        Error::Domain(_) => QdStatus::Domain,
        Error::Completeness(_) => QdStatus::Completeness,
        Error::DimensionMismatch { .. } | Error::Truncation { .. } => QdStatus::Truncation,
        Error::OracleMismatch(_) => QdStatus::OracleMismatch,
        Error::Io(_) => QdStatus::Io,
    }
}

enum Failure {
    Lib(Error),
    Status(QdStatus, String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn null() -> Failure {
    Failure::Status(QdStatus::NullPointer, "null pointer argument".into())
}

/// Runs `f`, records any error or panic, and converts to a status code.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> QdStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            QdStatus::Ok
        }
        Ok(Err(Failure::Lib(e))) => {
            set_error(&e.to_string());
            status_of(&e)
        }
        Ok(Err(Failure::Status(s, msg))) => {
            set_error(&msg);
            s
        }
        Err(_) => {
            set_error("internal panic");
            QdStatus::Internal
        }
    }
}

/// # Safety
/// `out` must be null or valid for writes.
unsafe fn write<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null());
    }
    out.write(value);
    Ok(())
}

impl From<&Verdict> for QdVerdict {
    fn from(v: &Verdict) -> Self {
        QdVerdict {
            is_quantum_domain: v.is_quantum_domain,
            lhs: v.lhs,
            rhs: v.rhs,
            method: match v.method {
                Method::ClosedForm => QdMethod::ClosedForm,
                Method::NumericSup => QdMethod::NumericSup,
            },
            degenerate: match v.degenerate {
                None => QdDegeneracy::None,
                Some(Degeneracy::NoNonorthogonality) => QdDegeneracy::NoNonorthogonality,
                Some(Degeneracy::SlopeExceedsBenchmarkRange { .. }) => QdDegeneracy::SlopeExceedsBenchmarkRange,
            },
            marginal: v.marginal,
            labels_swapped: v.labels_swapped,
        }
    }
}

fn to_state(s: &QdGaussianState) -> GaussianState {
    GaussianState { mean: [s.m1, s.m2], cov: CovMat2 { c11: s.c11, c12: s.c12, c22: s.c22 } }
}

/// Message for the most recent failed call on this thread; empty after a
/// success. Valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn qd_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version, static storage.
#[no_mangle]
pub extern "C" fn qd_version() -> *const c_char {
    static VERSION: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
        Ok(c) => c,
        Err(_) => panic!("version contains NUL"),
    };
    VERSION.as_ptr()
}

/// `B = (1 − γ'²)·γ²`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qd_total_nonorthogonality(gamma: f64, gamma_prime: f64, out: *mut f64) -> QdStatus {
    guard(|| {
        let b = criterion::total_nonorthogonality(&OverlapPair::new(gamma, gamma_prime)?);
        write(out, b)
    })
}

/// Classical benchmark `F_c` at prior `p_plus`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qd_classical_fidelity_bound(b: f64, p_plus: f64, out: *mut f64) -> QdStatus {
    guard(|| {
        if !(0.0..=1.0).contains(&b) {
            return Err(Failure::Status(QdStatus::InvalidInput, format!("B = {b} outside [0, 1]")));
        }
        write(out, criterion::classical_fidelity_bound(b, PriorEnsemble::new(p_plus)?))
    })
}

/// Prior at which `F_c` has slope `slope`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qd_tangency_prior(b: f64, slope: f64, out: *mut f64) -> QdStatus {
    guard(|| write(out, criterion::tangency_prior(b, slope)?))
}

/// Closed-form quantum-domain test.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qd_criterion(a: f64, b: f64, big_b: f64, tolerance: f64, out: *mut QdVerdict) -> QdStatus {
    guard(|| {
        let v = criterion::qd_criterion_with_tolerance(FidelityPair::new(a, b)?, big_b, tolerance)?;
        write(out, QdVerdict::from(&v))
    })
}

/// Quantum-domain test by direct numerical supremum.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qd_criterion_numeric(
    a: f64,
    b: f64,
    big_b: f64,
    tolerance: f64,
    out: *mut QdVerdict,
) -> QdStatus {
    guard(|| {
        let v = criterion::qd_criterion_numeric_with_tolerance(FidelityPair::new(a, b)?, big_b, tolerance)?;
        write(out, QdVerdict::from(&v))
    })
}

/// Boundary curve into caller buffers of `capacity` entries each. Returns
/// `BUFFER_TOO_SMALL` with `*written` set to the required size when
/// `capacity < n_points`.
///
/// # Safety
/// `out_a` and `out_b` must be valid for `capacity` writes; `written` valid for one.
#[no_mangle]
pub unsafe extern "C" fn qd_boundary_curve(
    big_b: f64,
    n_points: usize,
    out_a: *mut f64,
    out_b: *mut f64,
    capacity: usize,
    written: *mut usize,
) -> QdStatus {
    guard(|| {
        if written.is_null() {
            return Err(null());
        }
        let curve = criterion::boundary_curve(big_b, n_points)?;
        if capacity < curve.len() {
            written.write(curve.len());
            return Err(Failure::Status(
                QdStatus::BufferTooSmall,
                format!("need {} entries, buffer holds {capacity}", curve.len()),
            ));
        }
        if out_a.is_null() || out_b.is_null() {
            return Err(null());
        }
        for (i, p) in curve.iter().enumerate() {
            out_a.add(i).write(p.a);
            out_b.add(i).write(p.b);
        }
        written.write(curve.len());
        Ok(())
    })
}

/// Unsquared Uhlmann fidelity of two single-mode Gaussian states.
///
/// # Safety
/// `s1`, `s2` must point to valid states; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qd_gaussian_fidelity(
    s1: *const QdGaussianState,
    s2: *const QdGaussianState,
    out: *mut f64,
) -> QdStatus {
    guard(|| {
        let (s1, s2) = match (s1.as_ref(), s2.as_ref()) {
            (Some(x), Some(y)) => (x, y),
            _ => return Err(null()),
        };
        write(out, gaussian::uhlmann_fidelity_gaussian(&to_state(s1), &to_state(s2))?)
    })
}

/// Two-state teleportation test at `B = 1/4`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qd_teleport_check(a: f64, b: f64, out: *mut QdVerdict) -> QdStatus {
    guard(|| {
        let v = applications::teleport_two_state_check(FidelityPair::new(a, b)?)?;
        write(out, QdVerdict::from(&v))
    })
}

/// Binary coherent states `|±α⟩` through a line of transmissivity `eta`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qd_coherent_verify(alpha: f64, eta: f64, a: f64, b: f64, out: *mut QdVerdict) -> QdStatus {
    guard(|| {
        let task = CoherentTask::new(alpha, eta)?;
        let v = applications::coherent_verify(&task, FidelityPair::new(a, b)?)?;
        write(out, QdVerdict::from(&v))
    })
}

/// Squeezed-vacuum storage analysis from dB figures. `label` may be null.
/// On success `*out` owns a handle to release with [`qd_storage_report_free`].
///
/// # Safety
/// `label` must be null or a NUL-terminated string; `out` valid for writes.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn qd_storage_analyze(
    label: *const c_char,
    x_db: f64,
    y_db: f64,
    xp_db: f64,
    yp_db: f64,
    theta_points: usize,
    mode: QdStorageMode,
    out: *mut *mut QdStorageReport,
) -> QdStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        let label = match label.is_null() {
            true => String::new(),
            false => CStr::from_ptr(label)
                .to_str()
                .map_err(|_| Failure::Status(QdStatus::InvalidInput, "label is not UTF-8".into()))?
                .to_owned(),
        };
        let mode = match mode {
            QdStorageMode::AsPublished => StorageMode::AsPublished,
            QdStorageMode::PureTarget => StorageMode::PureTarget,
        };
        let rec = StorageRecord::new(&label, x_db, y_db, xp_db, yp_db);
        let report = squeezed_storage_analysis(&rec, theta_points, mode)?;
        let c = |s: &str| CString::new(s.replace('\0', " ")).unwrap_or_default();
        let handle =
            QdStorageReport { label: c(&report.label), notes: report.notes.iter().map(|n| c(n)).collect(), report };
        out.write(Box::into_raw(Box::new(handle)));
        Ok(())
    })
}

/// # Safety
/// `report` must be null or a handle from [`qd_storage_analyze`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qd_storage_report_free(report: *mut QdStorageReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// # Safety
/// `report` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qd_storage_report_summary(
    report: *const QdStorageReport,
    out: *mut QdStorageSummary,
) -> QdStatus {
    guard(|| {
        let r = &report.as_ref().ok_or_else(null)?.report;
        write(
            out,
            QdStorageSummary {
                mode: match r.mode {
                    StorageMode::AsPublished => QdStorageMode::AsPublished,
                    StorageMode::PureTarget => QdStorageMode::PureTarget,
                },
                a: r.a,
                b: r.b,
                lhs: r.lhs,
                rhs_min: r.rhs_min,
                theta_min: r.theta_min,
                target_r: r.target_r.unwrap_or(f64::NAN),
                verdict: QdVerdict::from(&r.verdict),
            },
        )
    })
}

/// Number of θ samples in the scan; 0 for a null handle.
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qd_storage_report_len(report: *const QdStorageReport) -> usize {
    report.as_ref().map_or(0, |r| r.report.theta.len())
}

/// Copies the θ scan: angle, `γ²`, `γ'²`, `B` and criterion rhs. Any output
/// pointer may be null to skip that column.
///
/// # Safety
/// `report` must be a live handle; non-null outputs valid for `capacity` writes.
#[no_mangle]
pub unsafe extern "C" fn qd_storage_report_scan(
    report: *const QdStorageReport,
    theta: *mut f64,
    gamma_sq: *mut f64,
    gamma_prime_sq: *mut f64,
    nonorthogonality: *mut f64,
    rhs: *mut f64,
    capacity: usize,
) -> QdStatus {
    guard(|| {
        let r = &report.as_ref().ok_or_else(null)?.report;
        if capacity < r.theta.len() {
            return Err(Failure::Status(
                QdStatus::BufferTooSmall,
                format!("need {} entries, buffer holds {capacity}", r.theta.len()),
            ));
        }
        for (dst, src) in [
            (theta, &r.theta),
            (gamma_sq, &r.gamma_sq),
            (gamma_prime_sq, &r.gamma_prime_sq),
            (nonorthogonality, &r.nonorthogonality),
            (rhs, &r.rhs),
        ] {
            if !dst.is_null() {
                ptr::copy_nonoverlapping(src.as_ptr(), dst, src.len());
            }
        }
        Ok(())
    })
}

/// Label of the analysed record; owned by the handle.
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qd_storage_report_label(report: *const QdStorageReport) -> *const c_char {
    report.as_ref().map_or(ptr::null(), |r| r.label.as_ptr())
}

/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qd_storage_report_note_count(report: *const QdStorageReport) -> usize {
    report.as_ref().map_or(0, |r| r.notes.len())
}

/// Note `index`, or null when out of range; owned by the handle.
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qd_storage_report_note(report: *const QdStorageReport, index: usize) -> *const c_char {
    report.as_ref().and_then(|r| r.notes.get(index)).map_or(ptr::null(), |n| n.as_ptr())
}
