//! C ABI for the porec core.
//!
//! Every entry point returns a [`PorecStatus`]. On failure the message is kept
//! per thread and read back with [`porec_last_error`]. Strings handed out by
//! the library must be released with [`porec_string_free`], strategies with
//! [`porec_strategy_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use num_traits::ToPrimitive;
use porec::classical::{self, ClassicalError, Encoding};
use porec::io::{IoError, StrategyFile};
use porec::quantum::{self, QuantumError};
use porec::Task;

/// Tolerance on the parity deviation of floating-point strategies.
pub const POREC_PARITY_TOL: f64 = 1e-8;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PorecStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    InvalidStrategy = 4,
    Io = 5,
    Overflow = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PorecTask {
    Exclusion = 0,
    Retrieval = 1,
}

impl From<PorecTask> for Task {
    fn from(t: PorecTask) -> Task {
        match t {
            PorecTask::Exclusion => Task::Exclusion,
            PorecTask::Retrieval => Task::Retrieval,
        }
    }
}

/// Opaque strategy handle.
pub struct PorecStrategy {
    file: StrategyFile,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(PorecStatus, String);

impl From<ClassicalError> for Failure {
    fn from(e: ClassicalError) -> Self {
        let status = match e {
            ClassicalError::DecoderSpaceOverflow { .. } => PorecStatus::Overflow,
            ClassicalError::InvalidStrategy(_) => PorecStatus::InvalidStrategy,
            _ => PorecStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

impl From<QuantumError> for Failure {
    fn from(e: QuantumError) -> Self {
        Failure(PorecStatus::InvalidArgument, e.to_string())
    }
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        let status = match e {
            IoError::Json(_) => PorecStatus::Parse,
            IoError::File { .. } => PorecStatus::Io,
            _ => PorecStatus::InvalidStrategy,
        };
        Failure(status, e.to_string())
    }
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> PorecStatus {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PorecStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            PorecStatus::Panic
        }
    }
}

fn non_null<T>(p: *const T, name: &str) -> Result<(), Failure> {
    if p.is_null() {
        Err(Failure(PorecStatus::NullPointer, format!("{name} is null")))
    } else {
        Ok(())
    }
}

unsafe fn read_str<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    non_null(p, name)?;
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(PorecStatus::InvalidArgument, format!("{name} is not UTF-8")))
}

fn to_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).unwrap_or_default().into_raw()
}

fn handle<'a>(s: *const PorecStrategy) -> Result<&'a PorecStrategy, Failure> {
    non_null(s, "strategy")?;
    Ok(unsafe { &*s })
}

/// Message of the last failure on this thread, or null after a success.
/// The pointer stays valid until the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn porec_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by the library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn porec_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Noncontextual bound for `n` digits over `m` symbols.
/// `out_exact` may be null; otherwise it receives a "p/q" string.
///
/// # Safety
/// `out_value` must be writable; `out_exact` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn porec_noncontextual_bound(
    n: usize,
    m: u32,
    task: PorecTask,
    out_value: *mut f64,
    out_exact: *mut *mut c_char,
) -> PorecStatus {
    guard(|| {
        non_null(out_value, "out_value")?;
        let q = classical::noncontextual_bound(n, m, task.into())?;
        *out_value = q.to_f64().unwrap_or(f64::NAN);
        if !out_exact.is_null() {
            *out_exact = to_c_string(q.to_string());
        }
        Ok(())
    })
}

/// Exact classical optimum over parity-oblivious strategies with `k` messages.
///
/// # Safety
/// Same pointer rules as [`porec_noncontextual_bound`].
#[no_mangle]
pub unsafe extern "C" fn porec_classical_oracle(
    n: usize,
    m: u32,
    k: usize,
    task: PorecTask,
    out_value: *mut f64,
    out_exact: *mut *mut c_char,
) -> PorecStatus {
    guard(|| {
        non_null(out_value, "out_value")?;
        let report = classical::classical_bound_oracle(n, m, k, task.into())?;
        *out_value = report.value_f64();
        if !out_exact.is_null() {
            *out_exact = to_c_string(report.value.to_string());
        }
        Ok(())
    })
}

/// Best success probability of projective qubit strategies for two digits.
///
/// # Safety
/// `out_value` must be writable.
#[no_mangle]
pub unsafe extern "C" fn porec_projective_qubit_bound(m: u32, out_value: *mut f64) -> PorecStatus {
    guard(|| {
        non_null(out_value, "out_value")?;
        *out_value = quantum::projective_qubit_bound(m)?;
        Ok(())
    })
}

/// Depolarizing weight at which `value` falls to the noncontextual bound.
///
/// # Safety
/// `out_value` must be writable.
#[no_mangle]
pub unsafe extern "C" fn porec_noise_threshold(
    value: f64,
    n: usize,
    m: u32,
    out_value: *mut f64,
) -> PorecStatus {
    guard(|| {
        non_null(out_value, "out_value")?;
        *out_value = quantum::noise_threshold(value, n, m)?;
        Ok(())
    })
}

fn boxed(file: StrategyFile, out: *mut *mut PorecStrategy) -> Result<(), Failure> {
    non_null(out, "out")?;
    unsafe { *out = Box::into_raw(Box::new(PorecStrategy { file })) };
    Ok(())
}

/// Parses a strategy document.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn porec_strategy_from_json(
    json: *const c_char,
    out: *mut *mut PorecStrategy,
) -> PorecStatus {
    guard(|| {
        let text = read_str(json, "json")?;
        boxed(StrategyFile::from_json(text)?, out)
    })
}

/// Loads a strategy file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn porec_strategy_read(
    path: *const c_char,
    out: *mut *mut PorecStrategy,
) -> PorecStatus {
    guard(|| {
        let path = read_str(path, "path")?;
        boxed(StrategyFile::read(Path::new(path))?, out)
    })
}

/// The optimal qubit strategy for two trits.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn porec_strategy_qubit_optimum(
    task: PorecTask,
    out: *mut *mut PorecStrategy,
) -> PorecStatus {
    guard(|| {
        let task: Task = task.into();
        let (states, measurements) = match task {
            Task::Exclusion => quantum::optimal_qubit_construction(),
            Task::Retrieval => quantum::optimal_qubit_retrieval_construction(),
        };
        boxed(StrategyFile::Quantum { task, states, measurements }, out)
    })
}

/// Serializes a strategy. Release the result with [`porec_string_free`].
///
/// # Safety
/// `s` must be a live handle; `out_json` must be writable.
#[no_mangle]
pub unsafe extern "C" fn porec_strategy_to_json(
    s: *const PorecStrategy,
    out_json: *mut *mut c_char,
) -> PorecStatus {
    guard(|| {
        let s = handle(s)?;
        non_null(out_json, "out_json")?;
        *out_json = to_c_string(s.file.to_json());
        Ok(())
    })
}

/// Success probability of the strategy on the task stored with it.
///
/// # Safety
/// `s` must be a live handle; `out_value` must be writable.
#[no_mangle]
pub unsafe extern "C" fn porec_strategy_success(
    s: *const PorecStrategy,
    out_value: *mut f64,
) -> PorecStatus {
    guard(|| {
        let s = handle(s)?;
        non_null(out_value, "out_value")?;
        *out_value = match &s.file {
            StrategyFile::Classical { task, strategy } => {
                classical::evaluate_classical(strategy, *task)
            }
            StrategyFile::Quantum { task, states, measurements } => {
                quantum::success_probability(states, measurements, *task)?
            }
        };
        Ok(())
    })
}

/// Largest parity deviation of the strategy's preparations.
///
/// # Safety
/// `s` must be a live handle; `out_value` must be writable.
#[no_mangle]
pub unsafe extern "C" fn porec_strategy_parity_deviation(
    s: *const PorecStrategy,
    out_value: *mut f64,
) -> PorecStatus {
    guard(|| {
        let s = handle(s)?;
        non_null(out_value, "out_value")?;
        *out_value = deviation(&s.file)?;
        Ok(())
    })
}

fn deviation(file: &StrategyFile) -> Result<f64, Failure> {
    Ok(match file {
        StrategyFile::Classical { strategy, .. } => {
            classical::check_parity_oblivious_classical(strategy)?
        }
        StrategyFile::Quantum { states, .. } => quantum::parity_deviation(states)?,
    })
}

/// Whether the strategy is parity-oblivious and beats the noncontextual bound.
///
/// # Safety
/// `s` must be a live handle; `out_certified` must be writable.
#[no_mangle]
pub unsafe extern "C" fn porec_strategy_certifies_contextuality(
    s: *const PorecStrategy,
    out_certified: *mut bool,
) -> PorecStatus {
    guard(|| {
        let s = handle(s)?;
        non_null(out_certified, "out_certified")?;
        let dev = deviation(&s.file)?;
        let oblivious = match &s.file {
            StrategyFile::Classical { strategy, .. } => match strategy.encoding() {
                Encoding::Exact(_) => dev == 0.0,
                Encoding::Float(_) => dev <= POREC_PARITY_TOL,
            },
            StrategyFile::Quantum { .. } => dev <= POREC_PARITY_TOL,
        };
        let mut value = 0.0;
        let status = porec_strategy_success(s, &mut value);
        if status != PorecStatus::Ok {
            return Err(Failure(status, "evaluation failed".into()));
        }
        let space = s.file.space();
        let bound = classical::noncontextual_bound(space.n(), space.m(), s.file.task())?;
        *out_certified =
            oblivious && value - 1e-9 > bound.to_f64().unwrap_or(f64::NAN);
        Ok(())
    })
}

/// Releases a strategy handle. Null is ignored.
///
/// # Safety
/// `s` must come from this library and must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn porec_strategy_free(s: *mut PorecStrategy) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}
