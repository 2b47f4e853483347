//! C interface. Problems and outcomes are opaque handles owned by the
//! caller and released with the matching `_free`. Every call returns an
//! `McStatus`; on failure `mc_last_error` describes what went wrong.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::time::Duration;

use matcop::check::check_proof;
use matcop::parse::parse_problem;
use matcop::problem::Problem;
use matcop::proof::{Mode, ProofDocument};
use matcop::prover::{prove, Config, Verdict};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum McStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    Rejected = 4,
    Internal = 5,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum McVerdict {
    Theorem = 0,
    NonTheorem = 1,
    Unknown = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum McMode {
    Tableau = 0,
    Matrix = 1,
    Core = 2,
    Avatar = 3,
}

/// Zero for `timeout_ms` or `max_solves` means unlimited.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct McConfig {
    pub mode: McMode,
    pub max_depth: u32,
    pub timeout_ms: u64,
    pub max_solves: u64,
    pub copy_order: bool,
    pub subst_order: bool,
    pub instance_sym: bool,
    pub epr_caps: bool,
}

pub struct McProblem {
    problem: Problem,
}

pub struct McOutcome {
    verdict: McVerdict,
    proof: Option<CString>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn fail(status: McStatus, msg: impl Into<String>) -> McStatus {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
    status
}

fn guarded(f: impl FnOnce() -> McStatus) -> McStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| fail(McStatus::Internal, "panic inside the prover"))
}

unsafe fn text<'a>(s: *const c_char) -> Result<&'a str, McStatus> {
    if s.is_null() {
        return Err(fail(McStatus::NullArgument, "null string"));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| fail(McStatus::InvalidUtf8, "string is not UTF-8"))
}

/// Parses TPTP CNF text into a new problem handle written to `out`.
/// `src` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mc_problem_parse(src: *const c_char, out: *mut *mut McProblem) -> McStatus {
    guarded(|| {
        if out.is_null() {
            return fail(McStatus::NullArgument, "null output pointer");
        }
        *out = ptr::null_mut();
        let s = match text(src) {
            Ok(s) => s,
            Err(st) => return st,
        };
        match parse_problem(s) {
            Ok(problem) => {
                *out = Box::into_raw(Box::new(McProblem { problem }));
                McStatus::Ok
            }
            Err(e) => fail(McStatus::ParseError, e.to_string()),
        }
    })
}

/// `p` must come from `mc_problem_parse` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn mc_problem_free(p: *mut McProblem) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// `p` must be null or a live problem handle.
#[no_mangle]
pub unsafe extern "C" fn mc_problem_clause_count(p: *const McProblem) -> usize {
    p.as_ref().map_or(0, |p| p.problem.clauses.len())
}

#[no_mangle]
pub extern "C" fn mc_config_default() -> McConfig {
    let d = Config::default();
    McConfig {
        mode: McMode::Core,
        max_depth: d.max_depth,
        timeout_ms: 0,
        max_solves: 0,
        copy_order: d.copy_order,
        subst_order: d.subst_order,
        instance_sym: d.instance_sym,
        epr_caps: d.epr_caps,
    }
}

fn config(c: &McConfig) -> Config {
    Config {
        mode: match c.mode {
            McMode::Tableau => Mode::Tableau,
            McMode::Matrix => Mode::Matrix,
            McMode::Core => Mode::Core,
            McMode::Avatar => Mode::Avatar,
        },
        max_depth: c.max_depth,
        timeout: (c.timeout_ms > 0).then(|| Duration::from_millis(c.timeout_ms)),
        max_solves: (c.max_solves > 0).then_some(c.max_solves),
        copy_order: c.copy_order,
        subst_order: c.subst_order,
        instance_sym: c.instance_sym,
        epr_caps: c.epr_caps,
        ..Config::default()
    }
}

/// Runs the prover; a null `cfg` means `mc_config_default()`.
/// `p` must be a live problem handle, `cfg` null or valid, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn mc_prove(p: *const McProblem, cfg: *const McConfig, out: *mut *mut McOutcome) -> McStatus {
    guarded(|| {
        if out.is_null() {
            return fail(McStatus::NullArgument, "null output pointer");
        }
        *out = ptr::null_mut();
        let Some(p) = p.as_ref() else {
            return fail(McStatus::NullArgument, "null problem");
        };
        let cfg = cfg.as_ref().copied().unwrap_or_else(|| mc_config_default());
        let report = prove(&p.problem, &config(&cfg));
        let outcome = match report.verdict {
            Verdict::Theorem(doc) => McOutcome {
                verdict: McVerdict::Theorem,
                proof: CString::new(doc.render(&p.problem)).ok(),
            },
            Verdict::NonTheorem => McOutcome {
                verdict: McVerdict::NonTheorem,
                proof: None,
            },
            Verdict::Unknown(_) => McOutcome {
                verdict: McVerdict::Unknown,
                proof: None,
            },
        };
        *out = Box::into_raw(Box::new(outcome));
        McStatus::Ok
    })
}

/// `o` must be a live outcome handle.
#[no_mangle]
pub unsafe extern "C" fn mc_outcome_verdict(o: *const McOutcome) -> McVerdict {
    o.as_ref().map_or(McVerdict::Unknown, |o| o.verdict)
}

/// The proof document, or null unless the verdict is a theorem. The string
/// lives as long as the outcome.
/// `o` must be null or a live outcome handle.
#[no_mangle]
pub unsafe extern "C" fn mc_outcome_proof(o: *const McOutcome) -> *const c_char {
    o.as_ref()
        .and_then(|o| o.proof.as_ref())
        .map_or(ptr::null(), |s| s.as_ptr())
}

/// `o` must come from `mc_prove` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn mc_outcome_free(o: *mut McOutcome) {
    if !o.is_null() {
        drop(Box::from_raw(o));
    }
}

/// `MC_STATUS_OK` when the document proves the problem,
/// `MC_STATUS_REJECTED` when it does not.
/// `p` must be a live problem handle and `proof` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn mc_check_proof(p: *const McProblem, proof: *const c_char) -> McStatus {
    guarded(|| {
        let Some(p) = p.as_ref() else {
            return fail(McStatus::NullArgument, "null problem");
        };
        let s = match text(proof) {
            Ok(s) => s,
            Err(st) => return st,
        };
        let doc = match ProofDocument::parse(s, &p.problem) {
            Ok(d) => d,
            Err(e) => return fail(McStatus::ParseError, e.to_string()),
        };
        match check_proof(&doc, &p.problem) {
            Ok(()) => McStatus::Ok,
            Err(r) => fail(McStatus::Rejected, r.to_string()),
        }
    })
}

/// Message for the last failed call on this thread, or null. Valid until
/// the next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn mc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}
