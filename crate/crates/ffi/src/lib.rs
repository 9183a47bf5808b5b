//! C interface to the genfw solvers.
//!
//! Problems and traces are opaque heap handles released with their `_free`
//! function. Every call returns a [`GenfwStatus`]; on failure the message is
//! available from [`genfw_last_error_message`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;

use genfw::objectives::{LogisticRegression, Quadratic};
use genfw::sets::{L2Ball, LInfBall, Simplex};
use genfw::solvers::{self, SolverConfig, SolverKind};
use genfw::{Error, FeasibleSet, Problem, Regime, TerminationReason, Trace, Vector};
use nalgebra::DMatrix;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenfwStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    NotPositiveDefinite = 4,
    InnerLoopCap = 5,
    OutOfRange = 6,
    Internal = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenfwSolver {
    Classic = 0,
    AdaptiveClassic = 1,
    L0l1 = 2,
    AdaptL0l1 = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenfwSetKind {
    /// Euclidean ball around the origin; `param` is the radius.
    L2Ball = 0,
    /// `{x >= 0, sum x = param}`.
    Simplex = 1,
    /// Box `[-param, param]^d`.
    LInfBall = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenfwTermination {
    GapTol = 0,
    MaxIter = 1,
    ZeroDirection = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenfwOptions {
    pub max_iter: usize,
    pub gap_tol: f64,
    /// Adaptive `(L0, L1)` solver only.
    pub rho: f64,
    pub l0_init: f64,
    pub l1_init: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenfwRecord {
    pub iter: usize,
    pub f: f64,
    pub gap: f64,
    pub alpha: f64,
    pub a_k: f64,
    pub l0_k: f64,
    pub l1_k: f64,
    pub grad_norm: f64,
    pub inner_checks: u32,
    /// 1 when `L0 <= L1 ||g||`, else 0.
    pub t_regime: u8,
}

pub struct GenfwProblem {
    inner: Problem,
}

pub struct GenfwTrace {
    inner: Trace,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> GenfwStatus {
    match e {
        Error::DimensionMismatch { .. } => GenfwStatus::DimensionMismatch,
        Error::NotPositiveDefinite => GenfwStatus::NotPositiveDefinite,
        Error::InnerLoopCap { .. } => GenfwStatus::InnerLoopCap,
        Error::Run { source, .. } => status_of(source),
        _ => GenfwStatus::InvalidArgument,
    }
}

/// Runs `f`, converting errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), (GenfwStatus, String)>) -> GenfwStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => GenfwStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            GenfwStatus::Internal
        }
    }
}

fn lib(e: Error) -> (GenfwStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (GenfwStatus, String) {
    (GenfwStatus::NullPointer, format!("{what} is null"))
}

/// # Safety
/// `p` must be null or valid for `len` reads.
unsafe fn slice<'a>(p: *const f64, len: usize, what: &str) -> Result<&'a [f64], (GenfwStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

fn build_set(kind: GenfwSetKind, param: f64, dim: usize) -> genfw::Result<Arc<dyn FeasibleSet>> {
    Ok(match kind {
        GenfwSetKind::L2Ball => Arc::new(L2Ball::centered(dim, param)?),
        GenfwSetKind::Simplex => Arc::new(Simplex::new(dim, param)?),
        GenfwSetKind::LInfBall => Arc::new(LInfBall::centered(dim, param)?),
    })
}

fn emit_problem(problem: Problem, out: *mut *mut GenfwProblem) {
    // SAFETY: callers check `out` before building the problem
    unsafe { *out = Box::into_raw(Box::new(GenfwProblem { inner: problem })) };
}

/// Defaults matching the library: 10000 iterations, gap tolerance 1e-6,
/// `rho = 2`, initial `L0 = L1 = 1`.
#[no_mangle]
pub extern "C" fn genfw_options_default() -> GenfwOptions {
    let c = SolverConfig::default();
    GenfwOptions {
        max_iter: c.max_iter,
        gap_tol: c.gap_tol,
        rho: c.adaptive.rho,
        l0_init: c.adaptive.l0_0,
        l1_init: c.adaptive.l1_0,
    }
}

/// Logistic regression on the row-major `n x d` matrix `a` with labels `±1`.
///
/// # Safety
/// `a` must hold `n * d` doubles, `labels` `n` doubles, and `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn genfw_problem_logistic_new(
    a: *const f64,
    labels: *const f64,
    n: usize,
    d: usize,
    set: GenfwSetKind,
    set_param: f64,
    out: *mut *mut GenfwProblem,
) -> GenfwStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let len = n
            .checked_mul(d)
            .ok_or((GenfwStatus::InvalidArgument, "n * d overflows".to_string()))?;
        let a = slice(a, len, "a")?;
        let y = slice(labels, n, "labels")?;
        let obj =
            LogisticRegression::new(DMatrix::from_row_slice(n, d, a), Vector::from_column_slice(y)).map_err(lib)?;
        let problem = Problem::new(Arc::new(obj), build_set(set, set_param, d).map_err(lib)?).map_err(lib)?;
        emit_problem(problem, out);
        Ok(())
    })
}

/// `x^T Q x / 2 - b^T x` with the row-major symmetric positive definite `q`.
///
/// # Safety
/// `q` must hold `d * d` doubles, `b` `d` doubles, and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn genfw_problem_quadratic_new(
    q: *const f64,
    b: *const f64,
    d: usize,
    set: GenfwSetKind,
    set_param: f64,
    out: *mut *mut GenfwProblem,
) -> GenfwStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let len = d
            .checked_mul(d)
            .ok_or((GenfwStatus::InvalidArgument, "d * d overflows".to_string()))?;
        let q = slice(q, len, "q")?;
        let b = slice(b, d, "b")?;
        let obj = Quadratic::new(DMatrix::from_row_slice(d, d, q), Vector::from_column_slice(b)).map_err(lib)?;
        let problem = Problem::new(Arc::new(obj), build_set(set, set_param, d).map_err(lib)?).map_err(lib)?;
        emit_problem(problem, out);
        Ok(())
    })
}

/// Replaces the starting point.
///
/// # Safety
/// `problem` must come from a constructor here; `x0` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn genfw_problem_set_start(
    problem: *mut GenfwProblem,
    x0: *const f64,
    len: usize,
) -> GenfwStatus {
    guard(|| {
        let p = problem.as_mut().ok_or_else(|| null("problem"))?;
        let x0 = slice(x0, len, "x0")?;
        p.inner = p.inner.clone().with_start(Vector::from_column_slice(x0)).map_err(lib)?;
        Ok(())
    })
}

/// Dimension of the problem, or 0 for a null handle.
///
/// # Safety
/// `problem` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn genfw_problem_dim(problem: *const GenfwProblem) -> usize {
    problem.as_ref().map_or(0, |p| p.inner.dim())
}

/// # Safety
/// `problem` must be null or a live handle; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn genfw_problem_free(problem: *mut GenfwProblem) {
    if !problem.is_null() {
        drop(Box::from_raw(problem));
    }
}

/// Runs `solver` on `problem`. A null `options` uses the defaults.
///
/// # Safety
/// `problem` must be a live handle, `options` null or valid, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn genfw_solve(
    problem: *const GenfwProblem,
    solver: GenfwSolver,
    options: *const GenfwOptions,
    out: *mut *mut GenfwTrace,
) -> GenfwStatus {
    guard(|| {
        let p = problem.as_ref().ok_or_else(|| null("problem"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let o = options.as_ref().copied().unwrap_or_else(|| genfw_options_default());
        let mut cfg = SolverConfig {
            max_iter: o.max_iter,
            gap_tol: o.gap_tol,
            ..SolverConfig::default()
        }
        .with_problem_constants(&p.inner)
        .map_err(lib)?;
        cfg.adaptive.rho = o.rho;
        cfg.adaptive.l0_0 = o.l0_init;
        cfg.adaptive.l1_0 = o.l1_init;
        let kind = match solver {
            GenfwSolver::Classic => SolverKind::Classic,
            GenfwSolver::AdaptiveClassic => SolverKind::AdaptiveClassic,
            GenfwSolver::L0l1 => SolverKind::L0l1,
            GenfwSolver::AdaptL0l1 => SolverKind::AdaptL0l1,
        };
        let trace = solvers::run(kind, &p.inner, &cfg).map_err(lib)?;
        *out = Box::into_raw(Box::new(GenfwTrace { inner: trace }));
        Ok(())
    })
}

/// Number of records, or 0 for a null handle.
///
/// # Safety
/// `trace` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn genfw_trace_len(trace: *const GenfwTrace) -> usize {
    trace.as_ref().map_or(0, |t| t.inner.records.len())
}

/// # Safety
/// `trace` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn genfw_trace_record(
    trace: *const GenfwTrace,
    index: usize,
    out: *mut GenfwRecord,
) -> GenfwStatus {
    guard(|| {
        let t = trace.as_ref().ok_or_else(|| null("trace"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let r = t.inner.records.get(index).ok_or((
            GenfwStatus::OutOfRange,
            format!("record {index} of {}", t.inner.records.len()),
        ))?;
        *out = GenfwRecord {
            iter: r.iter,
            f: r.f_value,
            gap: r.fw_gap,
            alpha: r.alpha,
            a_k: r.a_k,
            l0_k: r.l0_k,
            l1_k: r.l1_k,
            grad_norm: r.grad_norm,
            inner_checks: r.inner_checks,
            t_regime: u8::from(r.regime == Regime::T),
        };
        Ok(())
    })
}

/// # Safety
/// `trace` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn genfw_trace_termination(trace: *const GenfwTrace, out: *mut GenfwTermination) -> GenfwStatus {
    guard(|| {
        let t = trace.as_ref().ok_or_else(|| null("trace"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = match t.inner.termination {
            TerminationReason::GapTol => GenfwTermination::GapTol,
            TerminationReason::MaxIter => GenfwTermination::MaxIter,
            TerminationReason::ZeroDirection => GenfwTermination::ZeroDirection,
        };
        Ok(())
    })
}

/// Copies the final iterate into `buf`, which must hold exactly the problem
/// dimension.
///
/// # Safety
/// `trace` must be a live handle and `buf` writable for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn genfw_trace_final_point(trace: *const GenfwTrace, buf: *mut f64, len: usize) -> GenfwStatus {
    guard(|| {
        let t = trace.as_ref().ok_or_else(|| null("trace"))?;
        if buf.is_null() {
            return Err(null("buf"));
        }
        let x = &t.inner.final_point;
        if x.len() != len {
            return Err((
                GenfwStatus::DimensionMismatch,
                format!("buffer holds {len}, point has {}", x.len()),
            ));
        }
        ptr::copy_nonoverlapping(x.as_ptr(), buf, len);
        Ok(())
    })
}

/// # Safety
/// `trace` must be null or a live handle; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn genfw_trace_free(trace: *mut GenfwTrace) {
    if !trace.is_null() {
        drop(Box::from_raw(trace));
    }
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length without the NUL, or
/// 0 when there is none.
///
/// # Safety
/// `buf` must be null or writable for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn genfw_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else { return 0 };
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn genfw_status_str(status: GenfwStatus) -> *const c_char {
    let s: &'static [u8] = match status {
        GenfwStatus::Ok => b"ok\0",
        GenfwStatus::NullPointer => b"null pointer\0",
        GenfwStatus::InvalidArgument => b"invalid argument\0",
        GenfwStatus::DimensionMismatch => b"dimension mismatch\0",
        GenfwStatus::NotPositiveDefinite => b"matrix not positive definite\0",
        GenfwStatus::InnerLoopCap => b"inner loop cap reached\0",
        GenfwStatus::OutOfRange => b"index out of range\0",
        GenfwStatus::Internal => b"internal error\0",
    };
    s.as_ptr().cast()
}
