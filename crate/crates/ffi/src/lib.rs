//! C ABI over the workbench.
//!
//! Every call returns a [`VgStatus`]. Objects cross the boundary as opaque
//! handles that the caller releases with the matching `*_free` function.
//! The text of the last error on the calling thread is available through
//! [`vg_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_traits::ToPrimitive;
use vgame::best_response::best_response;
use vgame::epsilon_table::{approx_factor, build_table, rat, EpsilonTable, Rational};
use vgame::game_engine::{play, verify_bounds, PlayParams};
use vgame::geometry::{FacilitySet, Point, UserSet};
use vgame::p1_strategies::StrategyKind;
use vgame::VgError;

/// Result code of every exported function.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    DimensionMismatch = 3,
    UnsupportedDimension = 4,
    FacilityCollision = 5,
    Degenerate = 6,
    OutOfRange = 7,
    Verification = 8,
    /// A value does not fit the C output type (for example a huge rational).
    Overflow = 9,
    Panic = 10,
}

/// Player 1 strategies reachable from C.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VgStrategy {
    Centerpoint = 0,
    MustafaRay = 1,
    DiskNet = 2,
    BallNet = 3,
}

/// Opaque set of users.
pub struct VgUserSet {
    inner: UserSet,
}

/// Opaque table of ε̄ values for one dimension.
pub struct VgEpsilonTable {
    inner: EpsilonTable,
}

/// Best response of Player 2. Unused coordinates are zero.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct VgBestResponse {
    pub location: [f64; 3],
    pub payoff: usize,
}

/// Summary of one played episode.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct VgGameSummary {
    pub n: usize,
    /// Facilities actually placed by Player 1.
    pub k: usize,
    pub p1_payoff: usize,
    pub p2_payoff: usize,
    pub halfcell_payoff: usize,
    pub bounds_ok: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &VgError) -> VgStatus {
    match err {
        VgError::DimensionMismatch { .. } => VgStatus::DimensionMismatch,
        VgError::UnsupportedDimension(_) => VgStatus::UnsupportedDimension,
        VgError::InvalidInput(_) => VgStatus::InvalidInput,
        VgError::FacilityCollision(_) => VgStatus::FacilityCollision,
        VgError::Degenerate(_) => VgStatus::Degenerate,
        VgError::OutOfRange(_) => VgStatus::OutOfRange,
        VgError::Verification(_) => VgStatus::Verification,
    }
}

/// Runs `f`, records any error message and turns panics into a status.
fn guard(f: impl FnOnce() -> Result<(), (VgStatus, String)>) -> VgStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => VgStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            VgStatus::Panic
        }
    }
}

fn core<T>(r: vgame::Result<T>) -> Result<T, (VgStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (VgStatus, String) {
    (VgStatus::NullPointer, format!("{what} is null"))
}

/// # Safety
/// `coords` must point to `count * dim` readable doubles when `count > 0`.
unsafe fn read_points<'a>(coords: *const f64, count: usize, dim: usize) -> Result<Vec<Point>, (VgStatus, String)> {
    if count == 0 {
        return Ok(Vec::new());
    }
    if coords.is_null() {
        return Err(null("coords"));
    }
    if !(2..=3).contains(&dim) {
        return Err((VgStatus::UnsupportedDimension, format!("unsupported dimension {dim}")));
    }
    let flat: &'a [f64] = std::slice::from_raw_parts(coords, count * dim);
    flat.chunks(dim).map(|c| core(Point::from_slice(c))).collect()
}

fn to_i64_pair(q: &Rational) -> Result<(i64, i64), (VgStatus, String)> {
    match (q.numer().to_i64(), q.denom().to_i64()) {
        (Some(n), Some(d)) => Ok((n, d)),
        _ => Err((VgStatus::Overflow, format!("{q} does not fit in 64 bits"))),
    }
}

/// Message of the last failed call on this thread, or null. The pointer
/// stays valid until the next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn vg_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Builds a user set from `count` points stored row by row.
///
/// # Safety
/// `coords` must hold `count * dim` doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vg_users_new(
    coords: *const f64,
    count: usize,
    dim: usize,
    allow_degenerate: bool,
    out: *mut *mut VgUserSet,
) -> VgStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let pts = read_points(coords, count, dim)?;
        let inner = core(UserSet::new_checked(pts, allow_degenerate))?;
        *out = Box::into_raw(Box::new(VgUserSet { inner }));
        Ok(())
    })
}

/// Number of users, or 0 for a null handle.
///
/// # Safety
/// `users` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn vg_users_len(users: *const VgUserSet) -> usize {
    users.as_ref().map_or(0, |u| u.inner.len())
}

/// Releases a user set. Null is ignored.
///
/// # Safety
/// `users` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn vg_users_free(users: *mut VgUserSet) {
    if !users.is_null() {
        drop(Box::from_raw(users));
    }
}

/// Builds the ε̄ table for dimension `dim` up to `kmax`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vg_table_new(dim: usize, kmax: i64, out: *mut *mut VgEpsilonTable) -> VgStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let inner = core(build_table(dim, kmax))?;
        *out = Box::into_raw(Box::new(VgEpsilonTable { inner }));
        Ok(())
    })
}

/// Exact ε̄_k as a fraction.
///
/// # Safety
/// `table` must be a live handle; `num` and `den` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vg_table_value(table: *const VgEpsilonTable, k: usize, num: *mut i64, den: *mut i64) -> VgStatus {
    guard(|| {
        let t = table.as_ref().ok_or_else(|| null("table"))?;
        if num.is_null() || den.is_null() {
            return Err(null("num/den"));
        }
        let (n, d) = to_i64_pair(core(t.inner.value(k))?)?;
        *num = n;
        *den = d;
        Ok(())
    })
}

/// Exact approximation factor of the k-point recursive strategy.
///
/// # Safety
/// `table` must be a live handle; `num` and `den` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vg_table_factor(table: *const VgEpsilonTable, k: usize, num: *mut i64, den: *mut i64) -> VgStatus {
    guard(|| {
        let t = table.as_ref().ok_or_else(|| null("table"))?;
        if num.is_null() || den.is_null() {
            return Err(null("num/den"));
        }
        let (n, d) = to_i64_pair(&core(approx_factor(k, &t.inner))?)?;
        *num = n;
        *den = d;
        Ok(())
    })
}

/// Releases a table. Null is ignored.
///
/// # Safety
/// `table` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn vg_table_free(table: *mut VgEpsilonTable) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}

/// Exact best response of Player 2 against `k` Player 1 facilities.
///
/// # Safety
/// `f1` must hold `k * dim` doubles where `dim` is the user dimension,
/// `users` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn vg_best_response(
    users: *const VgUserSet,
    f1: *const f64,
    k: usize,
    out: *mut VgBestResponse,
) -> VgStatus {
    guard(|| {
        let u = users.as_ref().ok_or_else(|| null("users"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        if k == 0 {
            return Err((VgStatus::InvalidInput, "at least one facility is required".into()));
        }
        let pts = read_points(f1, k, u.inner.dim())?;
        let fs = core(FacilitySet::p1(pts))?;
        let br = core(best_response(&u.inner, &fs))?;
        *out = VgBestResponse { location: br.location.raw(), payoff: br.payoff };
        Ok(())
    })
}

/// Plays one episode. `epsilon_den == 0` means no ε is given, which the
/// net strategies then derive from `k`.
///
/// # Safety
/// `users` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn vg_play(
    users: *const VgUserSet,
    k: usize,
    strategy: VgStrategy,
    epsilon_num: i64,
    epsilon_den: i64,
    out: *mut VgGameSummary,
) -> VgStatus {
    guard(|| {
        let u = users.as_ref().ok_or_else(|| null("users"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let kind = match strategy {
            VgStrategy::Centerpoint => StrategyKind::Centerpoint,
            VgStrategy::MustafaRay => StrategyKind::MustafaRay,
            VgStrategy::DiskNet => StrategyKind::DiskNet,
            VgStrategy::BallNet => StrategyKind::BallNet,
        };
        let epsilon = match epsilon_den {
            0 => None,
            d => Some(rat(epsilon_num, d)),
        };
        let table = core(build_table(u.inner.dim(), k.max(1) as i64))?;
        let params = PlayParams { epsilon, table: Some(&table), instance_id: None };
        let res = core(play(&u.inner, k, kind, &params))?;
        let report = verify_bounds(&res, &table);
        *out = VgGameSummary {
            n: res.n,
            k: res.k,
            p1_payoff: res.p1_payoff,
            p2_payoff: res.p2_payoff,
            halfcell_payoff: res.halfcell_payoff,
            bounds_ok: report.ok,
        };
        Ok(())
    })
}
