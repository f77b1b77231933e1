//! C interface to the regret-forge solvers.
//!
//! Instances and reports are opaque handles owned by the caller and
//! released with their `_free` function. Every fallible call returns an
//! [`RfStatus`]; on failure [`rf_last_error_message`] describes the error on
//! the calling thread. Panics are caught at the boundary and reported as
//! [`RfStatus::Panic`].
#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use regret_forge::instances::{parse_native, serialize_native};
use regret_forge::mmr::{evaluate_max_regret, run_algorithm, RunOptions};
use regret_forge::{
    AlgorithmKind, AlgorithmReport, BinarySolution, BipInstance, Direction, MmrError, ReportStatus,
    TimeBudget,
};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    Infeasible = 4,
    TimeLimit = 5,
    Numerical = 6,
    Io = 7,
    NoSolution = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RfAlgorithm {
    Fix = 0,
    Ds = 1,
    IdsH = 2,
    IdsB = 3,
    Bc = 4,
    Oracle = 5,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RfDirection {
    Max = 0,
    Min = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RfReportStatus {
    Optimal = 0,
    Feasible = 1,
    TimeLimit = 2,
    Infeasible = 3,
}

/// Solver settings. A negative or non-finite `time_limit_s` means no limit.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RfSolveOptions {
    pub time_limit_s: f64,
    /// Hamming radius for `RF_ALGORITHM_IDS_H`.
    pub d: u32,
    pub local_exact: bool,
}

/// Opaque instance handle.
pub struct RfInstance {
    inner: BipInstance,
}

/// Opaque report handle.
pub struct RfReport {
    inner: AlgorithmReport,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let text = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

fn fail(status: RfStatus, msg: impl Into<String>) -> RfStatus {
    set_error(msg);
    status
}

fn mmr_status(e: &MmrError) -> RfStatus {
    match e {
        MmrError::Infeasible => RfStatus::Infeasible,
        MmrError::TimeLimit => RfStatus::TimeLimit,
        MmrError::Solver(_) => RfStatus::Numerical,
        _ => RfStatus::InvalidArgument,
    }
}

/// Runs `f`, turning a panic into [`RfStatus::Panic`].
fn guard(f: impl FnOnce() -> RfStatus) -> RfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(RfStatus::Panic, format!("internal panic: {msg}"))
        }
    }
}

unsafe fn c_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, RfStatus> {
    if p.is_null() {
        return Err(fail(RfStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        fail(
            RfStatus::InvalidArgument,
            format!("{what} is not valid UTF-8"),
        )
    })
}

fn parse_into(text: &str, out: *mut *mut RfInstance) -> RfStatus {
    match parse_native(text) {
        Ok(inst) => {
            unsafe { *out = Box::into_raw(Box::new(RfInstance { inner: inst })) };
            RfStatus::Ok
        }
        Err(e) => fail(RfStatus::Parse, e.to_string()),
    }
}

/// Message of the last failed call on this thread, or null. The pointer is
/// valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn rf_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn rf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

#[no_mangle]
pub extern "C" fn rf_solve_options_default() -> RfSolveOptions {
    RfSolveOptions {
        time_limit_s: -1.0,
        d: 1,
        local_exact: false,
    }
}

/// Parses an instance in the native text format.
#[no_mangle]
pub unsafe extern "C" fn rf_instance_parse_native(
    text: *const c_char,
    out: *mut *mut RfInstance,
) -> RfStatus {
    guard(|| {
        if out.is_null() {
            return fail(RfStatus::NullPointer, "output pointer is null");
        }
        match c_str(text, "text") {
            Ok(t) => parse_into(t, out),
            Err(s) => s,
        }
    })
}

/// Reads and parses a native-format file.
#[no_mangle]
pub unsafe extern "C" fn rf_instance_load(
    path: *const c_char,
    out: *mut *mut RfInstance,
) -> RfStatus {
    guard(|| {
        if out.is_null() {
            return fail(RfStatus::NullPointer, "output pointer is null");
        }
        let path = match c_str(path, "path") {
            Ok(p) => p,
            Err(s) => return s,
        };
        match std::fs::read_to_string(path) {
            Ok(text) => parse_into(&text, out),
            Err(e) => fail(RfStatus::Io, format!("{path}: {e}")),
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn rf_instance_free(inst: *mut RfInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

/// Number of binary variables, 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn rf_instance_num_vars(inst: *const RfInstance) -> usize {
    inst.as_ref().map_or(0, |i| i.inner.num_vars())
}

/// Number of constraint rows, 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn rf_instance_num_constraints(inst: *const RfInstance) -> usize {
    inst.as_ref().map_or(0, |i| i.inner.num_constraints())
}

#[no_mangle]
pub unsafe extern "C" fn rf_instance_direction(
    inst: *const RfInstance,
    out: *mut RfDirection,
) -> RfStatus {
    let (Some(i), false) = (inst.as_ref(), out.is_null()) else {
        return fail(RfStatus::NullPointer, "null argument");
    };
    *out = match i.inner.direction() {
        Direction::Max => RfDirection::Max,
        Direction::Min => RfDirection::Min,
    };
    RfStatus::Ok
}

/// Serializes the instance; release the string with [`rf_string_free`].
#[no_mangle]
pub unsafe extern "C" fn rf_instance_to_native(
    inst: *const RfInstance,
    out: *mut *mut c_char,
) -> RfStatus {
    guard(|| {
        let (Some(i), false) = (inst.as_ref(), out.is_null()) else {
            return fail(RfStatus::NullPointer, "null argument");
        };
        match CString::new(serialize_native(&i.inner)) {
            Ok(s) => {
                *out = s.into_raw();
                RfStatus::Ok
            }
            Err(_) => fail(RfStatus::InvalidArgument, "instance text contains NUL"),
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn rf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Runs `algorithm` on `inst`. `opts` may be null for the defaults. Budget
/// exhaustion and empty feasible regions are reported through the report
/// status, not through the return code.
#[no_mangle]
pub unsafe extern "C" fn rf_solve(
    inst: *const RfInstance,
    algorithm: RfAlgorithm,
    opts: *const RfSolveOptions,
    out: *mut *mut RfReport,
) -> RfStatus {
    guard(|| {
        let (Some(i), false) = (inst.as_ref(), out.is_null()) else {
            return fail(RfStatus::NullPointer, "null argument");
        };
        let o = opts
            .as_ref()
            .copied()
            .unwrap_or_else(|| rf_solve_options_default());
        let budget = if o.time_limit_s.is_finite() && o.time_limit_s >= 0.0 {
            TimeBudget::from_secs_f64(o.time_limit_s)
        } else {
            TimeBudget::unlimited()
        };
        let kind = match algorithm {
            RfAlgorithm::Fix => AlgorithmKind::Fix,
            RfAlgorithm::Ds => AlgorithmKind::Ds,
            RfAlgorithm::IdsH => AlgorithmKind::IdsH,
            RfAlgorithm::IdsB => AlgorithmKind::IdsB,
            RfAlgorithm::Bc => AlgorithmKind::Bc,
            RfAlgorithm::Oracle => AlgorithmKind::Oracle,
        };
        let run = RunOptions {
            budget,
            d: o.d,
            local_exact: o.local_exact,
        };
        match run_algorithm(&i.inner, kind, &run) {
            Ok(r) => {
                *out = Box::into_raw(Box::new(RfReport { inner: r }));
                RfStatus::Ok
            }
            Err(e) => fail(mmr_status(&e), e.to_string()),
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn rf_report_free(rep: *mut RfReport) {
    if !rep.is_null() {
        drop(Box::from_raw(rep));
    }
}

#[no_mangle]
pub unsafe extern "C" fn rf_report_status(
    rep: *const RfReport,
    out: *mut RfReportStatus,
) -> RfStatus {
    let (Some(r), false) = (rep.as_ref(), out.is_null()) else {
        return fail(RfStatus::NullPointer, "null argument");
    };
    *out = match r.inner.status {
        ReportStatus::Optimal => RfReportStatus::Optimal,
        ReportStatus::Feasible => RfReportStatus::Feasible,
        ReportStatus::TimeLimit => RfReportStatus::TimeLimit,
        ReportStatus::Infeasible => RfReportStatus::Infeasible,
    };
    RfStatus::Ok
}

/// Max regret of the reported solution; `RF_STATUS_NO_SOLUTION` if none.
#[no_mangle]
pub unsafe extern "C" fn rf_report_max_regret(rep: *const RfReport, out: *mut i64) -> RfStatus {
    let (Some(r), false) = (rep.as_ref(), out.is_null()) else {
        return fail(RfStatus::NullPointer, "null argument");
    };
    match r.inner.max_regret {
        Some(v) => {
            *out = v;
            RfStatus::Ok
        }
        None => fail(RfStatus::NoSolution, "the run produced no solution"),
    }
}

#[no_mangle]
pub unsafe extern "C" fn rf_report_lower_bound(rep: *const RfReport) -> i64 {
    rep.as_ref().map_or(0, |r| r.inner.lower_bound)
}

#[no_mangle]
pub unsafe extern "C" fn rf_report_iterations(rep: *const RfReport) -> usize {
    rep.as_ref().map_or(0, |r| r.inner.iterations)
}

#[no_mangle]
pub unsafe extern "C" fn rf_report_elapsed_seconds(rep: *const RfReport) -> f64 {
    rep.as_ref().map_or(0.0, |r| r.inner.elapsed.as_secs_f64())
}

/// Copies the solution into `buf` as 0/1 bytes; `len` must equal the number
/// of variables.
#[no_mangle]
pub unsafe extern "C" fn rf_report_solution(
    rep: *const RfReport,
    buf: *mut u8,
    len: usize,
) -> RfStatus {
    let (Some(r), false) = (rep.as_ref(), buf.is_null()) else {
        return fail(RfStatus::NullPointer, "null argument");
    };
    let Some(x) = &r.inner.incumbent else {
        return fail(RfStatus::NoSolution, "the run produced no solution");
    };
    if x.len() != len {
        return fail(
            RfStatus::InvalidArgument,
            format!("buffer holds {len} entries, solution has {}", x.len()),
        );
    }
    let out = std::slice::from_raw_parts_mut(buf, len);
    for (j, o) in out.iter_mut().enumerate() {
        *o = u8::from(x.get(j));
    }
    RfStatus::Ok
}

/// Exact max regret of the 0/1 vector `x` of length `len`.
#[no_mangle]
pub unsafe extern "C" fn rf_evaluate_max_regret(
    inst: *const RfInstance,
    x: *const u8,
    len: usize,
    out: *mut i64,
) -> RfStatus {
    guard(|| {
        let (Some(i), false, false) = (inst.as_ref(), x.is_null(), out.is_null()) else {
            return fail(RfStatus::NullPointer, "null argument");
        };
        let bits = std::slice::from_raw_parts(x, len);
        if bits.iter().any(|&b| b > 1) {
            return fail(RfStatus::InvalidArgument, "solution entries must be 0 or 1");
        }
        let sol = BinarySolution::new(bits.iter().map(|&b| b == 1).collect());
        match evaluate_max_regret(&i.inner, &sol, &TimeBudget::unlimited()) {
            Ok(ev) => {
                *out = ev.max_regret;
                RfStatus::Ok
            }
            Err(e) => fail(mmr_status(&e), e.to_string()),
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const KP: &str = "MMRBIP v1 kp MAX 3 1\n4 7\n5 9\n6 10\nLE 7 3 0 3 1 4 2 5\n";

    fn load(text: &str) -> *mut RfInstance {
        let c = CString::new(text).unwrap();
        let mut inst = ptr::null_mut();
        assert_eq!(
            unsafe { rf_instance_parse_native(c.as_ptr(), &mut inst) },
            RfStatus::Ok
        );
        inst
    }

    #[test]
    fn solve_and_query() {
        let inst = load(KP);
        unsafe {
            assert_eq!(rf_instance_num_vars(inst), 3);
            assert_eq!(rf_instance_num_constraints(inst), 1);
            let mut rep = ptr::null_mut();
            assert_eq!(
                rf_solve(inst, RfAlgorithm::Bc, ptr::null(), &mut rep),
                RfStatus::Ok
            );
            let mut oracle = ptr::null_mut();
            assert_eq!(
                rf_solve(inst, RfAlgorithm::Oracle, ptr::null(), &mut oracle),
                RfStatus::Ok
            );
            let (mut a, mut b) = (0i64, 0i64);
            assert_eq!(rf_report_max_regret(rep, &mut a), RfStatus::Ok);
            assert_eq!(rf_report_max_regret(oracle, &mut b), RfStatus::Ok);
            assert_eq!(a, b);
            let mut st = RfReportStatus::Feasible;
            assert_eq!(rf_report_status(rep, &mut st), RfStatus::Ok);
            assert_eq!(st, RfReportStatus::Optimal);
            let mut x = [9u8; 3];
            assert_eq!(rf_report_solution(rep, x.as_mut_ptr(), 3), RfStatus::Ok);
            let mut r = -1;
            assert_eq!(
                rf_evaluate_max_regret(inst, x.as_ptr(), 3, &mut r),
                RfStatus::Ok
            );
            assert_eq!(r, a);
            assert_eq!(
                rf_report_solution(rep, x.as_mut_ptr(), 2),
                RfStatus::InvalidArgument
            );
            rf_report_free(rep);
            rf_report_free(oracle);
            rf_instance_free(inst);
        }
    }

    #[test]
    fn errors_are_coded_and_described() {
        unsafe {
            let bad = CString::new("MMRBIP v1 t MAX 1 0\n3 2\n").unwrap();
            let mut inst = ptr::null_mut();
            assert_eq!(
                rf_instance_parse_native(bad.as_ptr(), &mut inst),
                RfStatus::Parse
            );
            assert!(inst.is_null());
            let msg = CStr::from_ptr(rf_last_error_message()).to_str().unwrap();
            assert!(msg.starts_with("line 2"), "{msg}");

            assert_eq!(
                rf_instance_parse_native(ptr::null(), &mut inst),
                RfStatus::NullPointer
            );
            let missing = CString::new("/definitely/not/here.mmr").unwrap();
            assert_eq!(rf_instance_load(missing.as_ptr(), &mut inst), RfStatus::Io);

            let inst = load(KP);
            let mut r = 0;
            let infeasible = [1u8, 1, 1];
            assert_eq!(
                rf_evaluate_max_regret(inst, infeasible.as_ptr(), 3, &mut r),
                RfStatus::InvalidArgument
            );
            let two = [2u8, 0, 0];
            assert_eq!(
                rf_evaluate_max_regret(inst, two.as_ptr(), 3, &mut r),
                RfStatus::InvalidArgument
            );
            rf_instance_free(inst);
        }
    }

    #[test]
    fn empty_region_is_a_report_status() {
        let inst = load("MMRBIP v1 e MIN 1 1\n1 2\nGE 2 1 0 1\n");
        unsafe {
            let mut rep = ptr::null_mut();
            assert_eq!(
                rf_solve(inst, RfAlgorithm::IdsB, ptr::null(), &mut rep),
                RfStatus::Ok
            );
            let mut st = RfReportStatus::Optimal;
            rf_report_status(rep, &mut st);
            assert_eq!(st, RfReportStatus::Infeasible);
            let mut v = 0;
            assert_eq!(rf_report_max_regret(rep, &mut v), RfStatus::NoSolution);
            rf_report_free(rep);
            rf_instance_free(inst);
        }
    }

    #[test]
    fn native_text_round_trip() {
        let inst = load(KP);
        unsafe {
            let mut s = ptr::null_mut();
            assert_eq!(rf_instance_to_native(inst, &mut s), RfStatus::Ok);
            assert_eq!(CStr::from_ptr(s).to_str().unwrap(), KP);
            rf_string_free(s);
            let mut dir = RfDirection::Min;
            assert_eq!(rf_instance_direction(inst, &mut dir), RfStatus::Ok);
            assert_eq!(dir, RfDirection::Max);
            rf_instance_free(inst);
            assert!(!CStr::from_ptr(rf_version()).to_bytes().is_empty());
        }
    }
}
