//! C ABI over the mapgenus engines.
//!
//! Everything crosses the boundary as opaque handles, plain integers and
//! NUL-terminated strings. Every fallible call returns an [`MgStatus`]; on
//! failure a message is available from [`mg_last_error`] on the same thread.
//! Strings handed out by the library are released with [`mg_string_free`],
//! handles with their matching `*_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use mapgenus::counts::{regular, two_legged, CountError, CountKind, CountResult};
use mapgenus::oracle::{enumerate_with, GenusHistogram, OracleError, DEFAULT_CAP};
use mapgenus::series::{build_tables, FreeTable, RecTable};

/// Count kind selector: maps without legs.
pub const MG_KIND_REGULAR: u32 = 0;
/// Count kind selector: maps with two univalent legs.
pub const MG_KIND_TWO_LEGGED: u32 = 1;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    /// The requested (g, j) lies outside the tables the handle was built for.
    NotCovered = 3,
    /// The value does not fit the requested integer type.
    Overflow = 4,
    Engine = 5,
    Panic = 6,
}

/// Series tables for all g ≤ g_max, j ≤ j_max.
pub struct MgTables {
    rec: RecTable,
    free: FreeTable,
}

/// Per-genus histogram from the brute-force oracle.
pub struct MgHistogram {
    inner: GenusHistogram,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let s = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(s));
}

fn fail(status: MgStatus, msg: impl Into<String>) -> MgStatus {
    set_error(msg);
    status
}

/// Runs `f`, turning a panic into `MgStatus::Panic`.
fn guard(f: impl FnOnce() -> MgStatus) -> MgStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(MgStatus::Panic, msg)
        }
    }
}

fn kind_of(kind: u32) -> Result<CountKind, MgStatus> {
    match kind {
        MG_KIND_REGULAR => Ok(CountKind::Regular),
        MG_KIND_TWO_LEGGED => Ok(CountKind::TwoLegged),
        k => Err(fail(MgStatus::InvalidArgument, format!("unknown kind {k}"))),
    }
}

fn count_status(e: CountError) -> MgStatus {
    let s = match e {
        CountError::Missing { .. } => MgStatus::NotCovered,
        _ => MgStatus::Engine,
    };
    fail(s, e.to_string())
}

fn result_for(t: &MgTables, kind: u32, g: u32, j: u32) -> Result<CountResult, MgStatus> {
    let r = match kind_of(kind)? {
        CountKind::TwoLegged => two_legged(g, j, &t.rec),
        CountKind::Regular => regular(g, j, &t.free),
    };
    r.map_err(count_status)
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> MgStatus {
    match CString::new(s) {
        Ok(c) => {
            *out = c.into_raw();
            MgStatus::Ok
        }
        Err(_) => fail(MgStatus::Engine, "interior NUL in output"),
    }
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn mg_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failed call on this thread, or NULL. The pointer
/// stays valid until the next library call on this thread.
#[no_mangle]
pub extern "C" fn mg_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must be NULL or a pointer obtained from this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds the symbolic tables up to genus `g_max` and order `j_max`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn mg_tables_new(g_max: u32, j_max: u32, out: *mut *mut MgTables) -> MgStatus {
    guard(|| {
        if out.is_null() {
            return fail(MgStatus::NullPointer, "out is NULL");
        }
        *out = ptr::null_mut();
        match build_tables(g_max, j_max) {
            Ok((rec, free)) => {
                *out = Box::into_raw(Box::new(MgTables { rec, free }));
                MgStatus::Ok
            }
            Err(e) => fail(MgStatus::Engine, e.to_string()),
        }
    })
}

/// # Safety
/// `t` must be NULL or a handle from `mg_tables_new` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mg_tables_free(t: *mut MgTables) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// The count 𝒩_g(2ν, j) of the given kind as a decimal string.
///
/// # Safety
/// `t` must be a live handle and `out` valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn mg_count(t: *const MgTables, kind: u32, g: u32, j: u32, nu: i64, out: *mut *mut c_char) -> MgStatus {
    guard(|| {
        let (Some(t), false) = (t.as_ref(), out.is_null()) else {
            return fail(MgStatus::NullPointer, "NULL argument");
        };
        if nu < 1 {
            return fail(MgStatus::InvalidArgument, "nu must be at least 1");
        }
        match result_for(t, kind, g, j).map(|r| r.value_int(nu)) {
            Ok(Some(v)) => write_string(out, v.to_string()),
            Ok(None) => fail(MgStatus::Engine, "count is not an integer"),
            Err(s) => s,
        }
    })
}

/// Same as `mg_count`, as an unsigned 64-bit integer.
///
/// # Safety
/// `t` must be a live handle and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn mg_count_u64(t: *const MgTables, kind: u32, g: u32, j: u32, nu: i64, out: *mut u64) -> MgStatus {
    guard(|| {
        let (Some(t), false) = (t.as_ref(), out.is_null()) else {
            return fail(MgStatus::NullPointer, "NULL argument");
        };
        if nu < 1 {
            return fail(MgStatus::InvalidArgument, "nu must be at least 1");
        }
        match result_for(t, kind, g, j).map(|r| r.value_int(nu)) {
            Ok(Some(v)) => match u64::try_from(&v) {
                Ok(x) => {
                    *out = x;
                    MgStatus::Ok
                }
                Err(_) => fail(MgStatus::Overflow, format!("{v} does not fit in 64 bits")),
            },
            Ok(None) => fail(MgStatus::Engine, "count is not an integer"),
            Err(s) => s,
        }
    })
}

/// The count polynomial in ν (Q for two-legged maps, S for regular ones).
///
/// # Safety
/// `t` must be a live handle and `out` valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn mg_polynomial(t: *const MgTables, kind: u32, g: u32, j: u32, out: *mut *mut c_char) -> MgStatus {
    guard(|| {
        let (Some(t), false) = (t.as_ref(), out.is_null()) else {
            return fail(MgStatus::NullPointer, "NULL argument");
        };
        match result_for(t, kind, g, j) {
            Ok(r) => write_string(out, r.polynomial.to_string()),
            Err(s) => s,
        }
    })
}

/// Enumerates every matching of j vertices of valence 2ν plus `legs` legs
/// (0 or 2). `threads` = 0 uses the default pool size.
///
/// # Safety
/// `out` must be valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn mg_oracle_enumerate(nu: u32, j: u32, legs: u32, threads: u32, out: *mut *mut MgHistogram) -> MgStatus {
    guard(|| {
        if out.is_null() {
            return fail(MgStatus::NullPointer, "out is NULL");
        }
        *out = ptr::null_mut();
        if nu < 1 || j < 1 {
            return fail(MgStatus::InvalidArgument, "nu and j must be at least 1");
        }
        let threads = (threads > 0).then_some(threads as usize);
        match enumerate_with(nu as usize, j as usize, legs as usize, DEFAULT_CAP, threads) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(MgHistogram { inner }));
                MgStatus::Ok
            }
            Err(e @ (OracleError::CapExceeded { .. } | OracleError::BadLegs(_) | OracleError::OddHalfEdges(_))) => {
                fail(MgStatus::InvalidArgument, e.to_string())
            }
            Err(e) => fail(MgStatus::Engine, e.to_string()),
        }
    })
}

/// Number of connected maps of genus g (0 beyond the largest genus seen).
///
/// # Safety
/// `h` must be a live histogram and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn mg_histogram_count(h: *const MgHistogram, g: u32, out: *mut u64) -> MgStatus {
    let (Some(h), false) = (h.as_ref(), out.is_null()) else {
        return fail(MgStatus::NullPointer, "NULL argument");
    };
    *out = h.inner.get(g);
    MgStatus::Ok
}

/// Largest genus with a nonzero count.
///
/// # Safety
/// `h` must be a live histogram and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn mg_histogram_max_genus(h: *const MgHistogram, out: *mut u32) -> MgStatus {
    let (Some(h), false) = (h.as_ref(), out.is_null()) else {
        return fail(MgStatus::NullPointer, "NULL argument");
    };
    match h.inner.counts.keys().next_back() {
        Some(&g) => {
            *out = g;
            MgStatus::Ok
        }
        None => fail(MgStatus::InvalidArgument, "histogram is empty"),
    }
}

/// Total matchings visited, connected or not.
///
/// # Safety
/// `h` must be a live histogram and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn mg_histogram_total(h: *const MgHistogram, out: *mut u64) -> MgStatus {
    let (Some(h), false) = (h.as_ref(), out.is_null()) else {
        return fail(MgStatus::NullPointer, "NULL argument");
    };
    *out = h.inner.total_matchings;
    MgStatus::Ok
}

/// # Safety
/// `h` must be NULL or a histogram from `mg_oracle_enumerate` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mg_histogram_free(h: *mut MgHistogram) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Borrow a library string as UTF-8 (test and binding helper).
///
/// # Safety
/// `s` must be NULL or a valid NUL-terminated string.
pub unsafe fn borrow_str<'a>(s: *const c_char) -> Option<&'a str> {
    (!s.is_null()).then(|| CStr::from_ptr(s).to_str().ok()).flatten()
}
