//! C interface to `regret-cap`.
//!
//! Markets and policies cross the boundary as opaque handles created by the
//! `*_parse`, `*_load` and `rc_policy_optimal` constructors and released with the
//! matching `*_free`. Every fallible call returns an [`RcStatus`]; on failure
//! [`rc_last_error`] describes what went wrong on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use regret_cap::adversary::{certify, SearchConfig, Verdict, MIN_RESOLUTION};
use regret_cap::firm::FirmSolver;
use regret_cap::{constants, optimal_policy, scenario, Error, Market, Policy, TieBreak};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    Io = 4,
    /// The policy rejects every choice the firm could make in the market.
    NoFeasibleChoice = 5,
    /// The output buffer is shorter than the number of results; the count is still reported.
    BufferTooSmall = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RcTie {
    AgainstRegulator = 0,
    ForRegulator = 1,
    All = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RcVerdict {
    AttainsOptimum = 0,
    Suboptimal = 1,
    LowerBoundViolated = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RcConstants {
    pub alpha: f64,
    pub v_bar: f64,
    pub k_alpha: f64,
    pub r_alpha: f64,
    pub q_alpha: f64,
    pub s_alpha: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RcOutcome {
    pub q: f64,
    pub p: f64,
    pub revenue: f64,
    pub fp: f64,
    pub cs: f64,
    pub dstr: f64,
    pub rgrt: f64,
    pub opt: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RcCertification {
    pub r_alpha: f64,
    /// Largest regret found on the extremal families.
    pub lower_bound: f64,
    /// Largest regret over the families and the random markets.
    pub upper_sweep: f64,
    pub scenarios: usize,
    pub verdict: RcVerdict,
}

/// Opaque market handle.
pub struct RcMarket(Market);

/// Opaque policy handle.
pub struct RcPolicy(Policy);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior NUL");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Fail(RcStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Parse { .. } => RcStatus::Parse,
            Error::Io(_) => RcStatus::Io,
            _ => RcStatus::InvalidArgument,
        };
        Fail(status, e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> RcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            RcStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            RcStatus::Panic
        }
    }
}

fn null(what: &str) -> Fail {
    Fail(RcStatus::NullPointer, format!("{what} is null"))
}

unsafe fn text<'a>(ptr: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if ptr.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(ptr)
        .to_str()
        .map_err(|_| Fail(RcStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn out<'a, T>(ptr: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    ptr.as_mut().ok_or_else(|| null(what))
}

unsafe fn handle<'a, T>(ptr: *const T, what: &str) -> Result<&'a T, Fail> {
    ptr.as_ref().ok_or_else(|| null(what))
}

fn check_alpha(alpha: f64) -> Result<(), Fail> {
    if (0.0..=1.0).contains(&alpha) {
        Ok(())
    } else {
        Err(Fail(RcStatus::InvalidArgument, format!("alpha = {alpha} is outside [0, 1]")))
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn rc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failed call on this thread, or null after a success.
/// The pointer stays valid until the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn rc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `out_constants` must point to writable memory for one `RcConstants`.
#[no_mangle]
pub unsafe extern "C" fn rc_constants(alpha: f64, v_bar: f64, out_constants: *mut RcConstants) -> RcStatus {
    guard(|| {
        let dst = out(out_constants, "out_constants")?;
        let c = constants(alpha, v_bar)?;
        *dst = RcConstants {
            alpha: c.alpha,
            v_bar: c.v_bar,
            k_alpha: c.k_alpha,
            r_alpha: c.r_alpha,
            q_alpha: c.q_alpha,
            s_alpha: c.s_alpha,
        };
        Ok(())
    })
}

fn market_from(doc: scenario::Document, source: &str) -> Result<*mut RcMarket, Fail> {
    let m = doc.require_market(source)?.clone();
    Ok(Box::into_raw(Box::new(RcMarket(m))))
}

fn policy_from(doc: scenario::Document, source: &str) -> Result<*mut RcPolicy, Fail> {
    let p = doc.require_policy(source)?.clone();
    Ok(Box::into_raw(Box::new(RcPolicy(p))))
}

/// Parses the `[market]` part of a scenario document.
///
/// # Safety
/// `document` must be a NUL-terminated string; `out_market` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rc_market_parse(document: *const c_char, out_market: *mut *mut RcMarket) -> RcStatus {
    guard(|| {
        let dst = out(out_market, "out_market")?;
        let doc = scenario::parse(text(document, "document")?, None)?;
        *dst = market_from(doc, "document")?;
        Ok(())
    })
}

/// # Safety
/// `path` must be a NUL-terminated string; `out_market` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rc_market_load(path: *const c_char, out_market: *mut *mut RcMarket) -> RcStatus {
    guard(|| {
        let dst = out(out_market, "out_market")?;
        let path = text(path, "path")?;
        let doc = scenario::load(Path::new(path)).map_err(|e| match e {
            Error::Input { .. } => Fail(RcStatus::Io, e.to_string()),
            other => other.into(),
        })?;
        *dst = market_from(doc, path)?;
        Ok(())
    })
}

/// # Safety
/// `market` must come from a market constructor and not have been freed. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn rc_market_free(market: *mut RcMarket) {
    if !market.is_null() {
        drop(Box::from_raw(market));
    }
}

/// Parses the `[policy]` part of a scenario document. Table files resolve
/// against the working directory.
///
/// # Safety
/// `document` must be a NUL-terminated string; `out_policy` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rc_policy_parse(document: *const c_char, out_policy: *mut *mut RcPolicy) -> RcStatus {
    guard(|| {
        let dst = out(out_policy, "out_policy")?;
        let doc = scenario::parse(text(document, "document")?, None)?;
        *dst = policy_from(doc, "document")?;
        Ok(())
    })
}

/// # Safety
/// `path` must be a NUL-terminated string; `out_policy` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rc_policy_load(path: *const c_char, out_policy: *mut *mut RcPolicy) -> RcStatus {
    guard(|| {
        let dst = out(out_policy, "out_policy")?;
        let path = text(path, "path")?;
        let doc = scenario::load(Path::new(path)).map_err(|e| match e {
            Error::Input { .. } => Fail(RcStatus::Io, e.to_string()),
            other => other.into(),
        })?;
        *dst = policy_from(doc, path)?;
        Ok(())
    })
}

/// The cap `k_alpha` with subsidy cap `s`; pass NaN for `s` to use `s_alpha`.
///
/// # Safety
/// `out_policy` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rc_policy_optimal(alpha: f64, v_bar: f64, s: f64, out_policy: *mut *mut RcPolicy) -> RcStatus {
    guard(|| {
        let dst = out(out_policy, "out_policy")?;
        let c = constants(alpha, v_bar)?;
        let pol = optimal_policy(&c, if s.is_nan() { c.s_alpha } else { s })?;
        *dst = Box::into_raw(Box::new(RcPolicy(pol)));
        Ok(())
    })
}

/// # Safety
/// `policy` must come from a policy constructor and not have been freed. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn rc_policy_free(policy: *mut RcPolicy) {
    if !policy.is_null() {
        drop(Box::from_raw(policy));
    }
}

/// Regret of `market` under `policy` when the firm breaks ties against the regulator.
///
/// # Safety
/// Handles must be live; `out_regret` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rc_policy_regret(
    policy: *const RcPolicy,
    market: *const RcMarket,
    alpha: f64,
    out_regret: *mut f64,
) -> RcStatus {
    guard(|| {
        let (pol, m) = (&handle(policy, "policy")?.0, &handle(market, "market")?.0);
        let dst = out(out_regret, "out_regret")?;
        check_alpha(alpha)?;
        let r = FirmSolver::default().regret(pol, m, alpha);
        if r == f64::NEG_INFINITY {
            return Err(Fail(RcStatus::NoFeasibleChoice, format!("{} admits no feasible choice", pol.id())));
        }
        *dst = r;
        Ok(())
    })
}

/// Writes up to `capacity` tied best responses into `buffer` in the order
/// `tie` asks for and stores the total number in `out_count`. `tie` must be one
/// of the `RcTie` values.
///
/// # Safety
/// Handles must be live; `buffer` must hold `capacity` elements (it may be null
/// when `capacity` is 0); `out_count` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rc_best_responses(
    policy: *const RcPolicy,
    market: *const RcMarket,
    alpha: f64,
    tie: RcTie,
    buffer: *mut RcOutcome,
    capacity: usize,
    out_count: *mut usize,
) -> RcStatus {
    guard(|| {
        let (pol, m) = (&handle(policy, "policy")?.0, &handle(market, "market")?.0);
        let count = out(out_count, "out_count")?;
        check_alpha(alpha)?;
        if buffer.is_null() && capacity > 0 {
            return Err(null("buffer"));
        }
        let tie = match tie {
            RcTie::AgainstRegulator => TieBreak::AgainstRegulator,
            RcTie::ForRegulator => TieBreak::ForRegulator,
            RcTie::All => TieBreak::All,
        };
        let found = regret_cap::best_responses(pol, m, alpha, tie);
        *count = found.len();
        if found.is_empty() {
            return Err(Fail(RcStatus::NoFeasibleChoice, format!("{} admits no feasible choice", pol.id())));
        }
        for (i, o) in found.iter().take(capacity).enumerate() {
            *buffer.add(i) = RcOutcome {
                q: o.q,
                p: o.p,
                revenue: o.revenue,
                fp: o.fp,
                cs: o.cs,
                dstr: o.dstr,
                rgrt: o.rgrt,
                opt: o.opt,
            };
        }
        if capacity < found.len() {
            return Err(Fail(
                RcStatus::BufferTooSmall,
                format!("{} responses, buffer holds {capacity}", found.len()),
            ));
        }
        Ok(())
    })
}

/// Searches the adversarial library at `resolution` points per axis plus
/// `random_count` random markets drawn from `seed`.
///
/// # Safety
/// `policy` must be live; `out_report` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rc_certify(
    policy: *const RcPolicy,
    alpha: f64,
    v_bar: f64,
    resolution: usize,
    random_count: usize,
    seed: u64,
    out_report: *mut RcCertification,
) -> RcStatus {
    guard(|| {
        let pol = &handle(policy, "policy")?.0;
        let dst = out(out_report, "out_report")?;
        if resolution < MIN_RESOLUTION {
            return Err(Fail(
                RcStatus::InvalidArgument,
                format!("resolution {resolution} is below {MIN_RESOLUTION}"),
            ));
        }
        let c = constants(alpha, v_bar)?;
        let rep = certify(pol, &c, &SearchConfig::with_resolution(resolution), random_count, seed)?;
        *dst = RcCertification {
            r_alpha: rep.r_alpha,
            lower_bound: rep.lower_bound.regret,
            upper_sweep: rep.upper_sweep.regret,
            scenarios: rep.scenarios,
            verdict: match rep.verdict {
                Verdict::AttainsOptimum => RcVerdict::AttainsOptimum,
                Verdict::Suboptimal => RcVerdict::Suboptimal,
                Verdict::LowerBoundViolated => RcVerdict::LowerBoundViolated,
            },
        };
        Ok(())
    })
}
