//! C ABI over `oraclesep`.
//!
//! Every fallible function returns an [`OsStatus`] and writes results through
//! out-pointers. On failure a message is kept per thread and can be read with
//! [`oraclesep_last_error`]. Handles are opaque; free them with the matching
//! `_free` function.
//!
//! Bit strings cross the boundary as `uint64_t` values. Their lengths are
//! implied: λ for f inputs, programs and randomness, 3λ for obfuscations.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use oraclesep::bits::BitString;
use oraclesep::oracle::bundle::MAX_LAMBDA;
use oraclesep::oracle::{sample_bundle, OracleBundle};
use oraclesep::separations::owp::Challenge;
use oraclesep::separations::{owp_hybrid_experiment, Hybrid, OwpAdversary, OwpConfig};
use oraclesep::verify::{run_suite, SlackReport, Suite};

/// Status codes. Zero is success.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    OutOfRange = 3,
    Bot = 4,
    Internal = 5,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).expect("NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn fail(status: OsStatus, msg: impl Into<String>) -> OsStatus {
    set_error(msg);
    status
}

/// Runs `f`, turning a panic into [`OsStatus::Internal`].
fn guard(f: impl FnOnce() -> OsStatus) -> OsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            fail(OsStatus::Internal, msg)
        }
    }
}

/// Message for the last failure on this thread, or NULL. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn oraclesep_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn oraclesep_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// A sampled oracle bundle (f, Obf, Eval).
pub struct OsBundle(OracleBundle);

/// Samples the bundle for `lambda` and `seed`.
///
/// # Safety
///
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn oraclesep_bundle_new(lambda: u32, seed: u64, out: *mut *mut OsBundle) -> OsStatus {
    guard(|| {
        if out.is_null() {
            return fail(OsStatus::NullPointer, "out is NULL");
        }
        match sample_bundle(lambda as usize, seed) {
            Ok(b) => {
                *out = Box::into_raw(Box::new(OsBundle(b)));
                OsStatus::Ok
            }
            Err(e) => fail(OsStatus::InvalidArgument, e.to_string()),
        }
    })
}

/// # Safety
///
/// `bundle` must be NULL or a handle from [`oraclesep_bundle_new`] that has
/// not been freed.
#[no_mangle]
pub unsafe extern "C" fn oraclesep_bundle_free(bundle: *mut OsBundle) {
    if !bundle.is_null() {
        drop(Box::from_raw(bundle));
    }
}

/// # Safety
///
/// `bundle` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn oraclesep_bundle_lambda(bundle: *const OsBundle) -> u32 {
    bundle.as_ref().map_or(0, |b| b.0.lambda() as u32)
}

unsafe fn bundle_ref<'a>(bundle: *const OsBundle) -> Result<&'a OracleBundle, OsStatus> {
    bundle.as_ref().map(|b| &b.0).ok_or_else(|| fail(OsStatus::NullPointer, "bundle is NULL"))
}

fn bits(value: u64, len: usize, what: &str) -> Result<BitString, OsStatus> {
    if len < 64 && value >> len != 0 {
        return Err(fail(OsStatus::OutOfRange, format!("{what} = {value} does not fit in {len} bits")));
    }
    Ok(BitString::new(value, len))
}

fn answer(v: Option<BitString>, out: *mut u64) -> OsStatus {
    match v {
        Some(v) => {
            // SAFETY: callers check `out` before computing `v`.
            unsafe { *out = v.value() };
            OsStatus::Ok
        }
        None => fail(OsStatus::Bot, "⊥"),
    }
}

/// `f(x)`.
///
/// # Safety
///
/// `bundle` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn oraclesep_bundle_f(bundle: *const OsBundle, x: u64, out: *mut u64) -> OsStatus {
    guard(|| {
        let b = match bundle_ref(bundle) {
            Ok(b) => b,
            Err(s) => return s,
        };
        if out.is_null() {
            return fail(OsStatus::NullPointer, "out is NULL");
        }
        match bits(x, b.lambda(), "x") {
            Ok(x) => answer(b.f(&x), out),
            Err(s) => s,
        }
    })
}

/// `Obf(c, r)`.
///
/// # Safety
///
/// `bundle` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn oraclesep_bundle_obf(bundle: *const OsBundle, c: u64, r: u64, out: *mut u64) -> OsStatus {
    guard(|| {
        let b = match bundle_ref(bundle) {
            Ok(b) => b,
            Err(s) => return s,
        };
        if out.is_null() {
            return fail(OsStatus::NullPointer, "out is NULL");
        }
        let l = b.lambda();
        match (bits(c, l, "c"), bits(r, l, "r")) {
            (Ok(c), Ok(r)) => answer(b.obf(&c, &r), out),
            (Err(s), _) | (_, Err(s)) => s,
        }
    })
}

/// `Eval(ct, x)`; [`OsStatus::Bot`] when `ct` is not in the image of Obf.
///
/// # Safety
///
/// `bundle` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn oraclesep_bundle_eval(bundle: *const OsBundle, ct: u64, x: u64, out: *mut u64) -> OsStatus {
    guard(|| {
        let b = match bundle_ref(bundle) {
            Ok(b) => b,
            Err(s) => return s,
        };
        if out.is_null() {
            return fail(OsStatus::NullPointer, "out is NULL");
        }
        let l = b.lambda();
        match (bits(ct, 3 * l, "ct"), bits(x, l, "x")) {
            (Ok(ct), Ok(x)) => answer(b.view().eval(&ct, &x), out),
            (Err(s), _) | (_, Err(s)) => s,
        }
    })
}

/// One checked inequality `lhs ≤ rhs`.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct OsSlackReport {
    pub seed: u64,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub pass: bool,
}

/// Rows from a verification suite.
pub struct OsReports {
    rows: Vec<SlackReport>,
    ids: Vec<CString>,
}

/// Runs a named suite (`ow2h`, `distances`, `bbbv`, `markov`, `abcd`,
/// `punc`, `qcol`, `csto`). `trials` of 0 picks the suite's default.
///
/// # Safety
///
/// `suite` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn oraclesep_run_suite(
    suite: *const c_char,
    seed: u64,
    trials: u32,
    out: *mut *mut OsReports,
) -> OsStatus {
    guard(|| {
        if suite.is_null() || out.is_null() {
            return fail(OsStatus::NullPointer, "suite or out is NULL");
        }
        let name = match CStr::from_ptr(suite).to_str() {
            Ok(s) => s,
            Err(_) => return fail(OsStatus::InvalidArgument, "suite name is not UTF-8"),
        };
        let suite: Suite = match name.parse() {
            Ok(s) => s,
            Err(e) => return fail(OsStatus::InvalidArgument, e),
        };
        let n = if trials == 0 { suite.default_trials() } else { trials as usize };
        let rows = run_suite(suite, seed, n);
        let ids = rows.iter().map(|r| CString::new(r.lemma_id.clone()).expect("ids have no NUL")).collect();
        *out = Box::into_raw(Box::new(OsReports { rows, ids }));
        OsStatus::Ok
    })
}

/// # Safety
///
/// `reports` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn oraclesep_reports_len(reports: *const OsReports) -> usize {
    reports.as_ref().map_or(0, |r| r.rows.len())
}

/// Number of rows that failed.
///
/// # Safety
///
/// `reports` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn oraclesep_reports_failures(reports: *const OsReports) -> usize {
    reports.as_ref().map_or(0, |r| r.rows.iter().filter(|x| !x.pass).count())
}

/// Copies row `index` into `out`.
///
/// # Safety
///
/// `reports` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn oraclesep_reports_get(
    reports: *const OsReports,
    index: usize,
    out: *mut OsSlackReport,
) -> OsStatus {
    guard(|| {
        let (Some(r), false) = (reports.as_ref(), out.is_null()) else {
            return fail(OsStatus::NullPointer, "reports or out is NULL");
        };
        let Some(row) = r.rows.get(index) else {
            return fail(OsStatus::OutOfRange, format!("index {index} of {}", r.rows.len()));
        };
        *out = OsSlackReport { seed: row.seed, lhs: row.lhs, rhs: row.rhs, slack: row.slack, pass: row.pass };
        OsStatus::Ok
    })
}

/// Lemma id of row `index`, owned by the handle; NULL when out of range.
///
/// # Safety
///
/// `reports` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn oraclesep_reports_lemma_id(reports: *const OsReports, index: usize) -> *const c_char {
    reports.as_ref().and_then(|r| r.ids.get(index)).map_or(ptr::null(), |s| s.as_ptr())
}

/// # Safety
///
/// `reports` must be NULL or a handle from [`oraclesep_run_suite`] that has
/// not been freed.
#[no_mangle]
pub unsafe extern "C" fn oraclesep_reports_free(reports: *mut OsReports) {
    if !reports.is_null() {
        drop(Box::from_raw(reports));
    }
}

/// Adversaries for [`oraclesep_owp_experiment`].
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OsOwpAdversary {
    RandomGuess = 0,
    Echo = 1,
    Exhaustive = 2,
    BoundedSearch = 3,
    EvalSearch = 4,
    EvalProbe = 5,
}

/// Hit counts of a hybrid experiment.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OsOwpCounts {
    pub trials: u64,
    pub hit_x: u64,
    pub hit_x2: u64,
    pub hit_differ: u64,
}

/// Runs `trials` plays of hybrid `hybrid` (1 to 4). `budget` is the query
/// budget of the search adversaries and is ignored by the others.
///
/// # Safety
///
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn oraclesep_owp_experiment(
    lambda: u32,
    hybrid: u32,
    adversary: OsOwpAdversary,
    budget: u32,
    trials: u64,
    seed: u64,
    out: *mut OsOwpCounts,
) -> OsStatus {
    guard(|| {
        if out.is_null() {
            return fail(OsStatus::NullPointer, "out is NULL");
        }
        let Some(&hybrid) = Hybrid::ALL.get((hybrid as usize).wrapping_sub(1)) else {
            return fail(OsStatus::InvalidArgument, format!("hybrid {hybrid} outside 1..=4"));
        };
        if lambda == 0 || lambda as usize > MAX_LAMBDA {
            return fail(OsStatus::InvalidArgument, format!("λ = {lambda} outside 1..={MAX_LAMBDA}"));
        }
        let k = budget as usize;
        let adversary = match adversary {
            OsOwpAdversary::RandomGuess => OwpAdversary::RandomGuess,
            OsOwpAdversary::Echo => OwpAdversary::Echo,
            OsOwpAdversary::Exhaustive => OwpAdversary::Exhaustive,
            OsOwpAdversary::BoundedSearch => OwpAdversary::BoundedSearch(k),
            OsOwpAdversary::EvalSearch => OwpAdversary::EvalSearch(k),
            OsOwpAdversary::EvalProbe => OwpAdversary::EvalProbe,
        };
        let cfg = OwpConfig {
            lambda: lambda as usize,
            hybrid,
            adversary,
            trials: trials as usize,
            seed,
            find_augmented: false,
            challenge: Challenge::Default,
        };
        match owp_hybrid_experiment(&cfg) {
            Ok(c) => {
                *out = OsOwpCounts {
                    trials: c.trials as u64,
                    hit_x: c.hit_x as u64,
                    hit_x2: c.hit_x2 as u64,
                    hit_differ: c.hit_differ as u64,
                };
                OsStatus::Ok
            }
            Err(e) => fail(OsStatus::Internal, e.to_string()),
        }
    })
}
