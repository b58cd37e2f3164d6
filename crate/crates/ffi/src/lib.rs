//! C ABI over the `kakutani` library.
//!
//! Fallible calls return a [`KkStatus`]; on failure a message for the calling
//! thread is available from [`kk_last_error`] until the next failing call.
//! Handles are opaque and released with their `_free` function. Strings
//! written through `char **` belong to the caller and go to [`kk_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use kakutani::cover::verify_cover;
use kakutani::engine::{generate_patch_capped, FlowTime, KakutaniRule, Patch};
use kakutani::params::{solve_alpha, RatioClass};
use kakutani::spectral::{classify_alpha, classify_spreadness, SpreadVerdict, Verdict};
use kakutani::Error;
use num_traits::ToPrimitive;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KkStatus {
    Ok = 0,
    InvalidArgument = 1,
    ResourceLimit = 2,
    Numeric = 3,
    NullPointer = 4,
    /// The result does not fit the output type.
    Overflow = 5,
    /// A Rust panic was caught at the boundary.
    Internal = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KkVerdictKind {
    Spread = 0,
    NotSpread = 1,
    Boundary = 2,
}

/// Classification result.
pub struct KkVerdict {
    inner: SpreadVerdict,
}

/// Materialized patch of tiles.
pub struct KkPatch {
    inner: Patch,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(KkStatus, String);

type Outcome = Result<(), Failure>;

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parameter(_) => KkStatus::InvalidArgument,
            Error::Resource { .. } => KkStatus::ResourceLimit,
            Error::Numeric(_) => KkStatus::Numeric,
        };
        Failure(code, e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Outcome) -> KkStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => KkStatus::Ok,
        Ok(Err(Failure(code, msg))) => {
            set_error(msg);
            code
        }
        Err(_) => {
            set_error("internal error".into());
            KkStatus::Internal
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(KkStatus::NullPointer, format!("{what} is null"))
}

/// # Safety
/// `p` is null or valid for writes of `T`.
unsafe fn write<T>(p: *mut T, v: T, what: &str) -> Outcome {
    if p.is_null() {
        return Err(null(what));
    }
    p.write(v);
    Ok(())
}

/// Boxes `v` into a new handle; nothing is allocated when `out` is null.
///
/// # Safety
/// `out` is null or valid for writes.
unsafe fn give<T>(out: *mut *mut T, v: T) -> Outcome {
    if out.is_null() {
        return Err(null("out"));
    }
    out.write(Box::into_raw(Box::new(v)));
    Ok(())
}

/// # Safety
/// `p` is null or a live handle.
unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

/// Library version, a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn kk_version() -> *const c_char {
    static VERSION: &str = concat!("kakutani ", env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr().cast()
}

/// Message of the last failure on this thread, or NULL. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn kk_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Frees a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` is null or came from this library and was not freed before.
#[no_mangle]
pub unsafe extern "C" fn kk_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// α ∈ (0, 1/2] with α^m = (1−α)^n.
///
/// # Safety
/// `out` is null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn kk_solve_alpha(n: u32, m: u32, out: *mut f64) -> KkStatus {
    guard(|| write(out, solve_alpha(n, m)?, "out"))
}

/// Classifies the commensurable ratio n/m. Free the result with
/// [`kk_verdict_free`].
///
/// # Safety
/// `out` is null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn kk_classify_ratio(n: u32, m: u32, out: *mut *mut KkVerdict) -> KkStatus {
    guard(|| {
        let v = classify_spreadness(&RatioClass::commensurable(n, m)?)?;
        give(out, KkVerdict { inner: v })
    })
}

/// Classifies α after detecting its ratio class with denominators up to
/// `max_denominator`.
///
/// # Safety
/// `out` is null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn kk_classify_alpha(
    alpha: f64,
    max_denominator: u32,
    out: *mut *mut KkVerdict,
) -> KkStatus {
    guard(|| {
        let v = classify_alpha(alpha, max_denominator)?;
        give(out, KkVerdict { inner: v })
    })
}

/// # Safety
/// `v` is null or a live verdict; `out` is null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn kk_verdict_kind(v: *const KkVerdict, out: *mut KkVerdictKind) -> KkStatus {
    guard(|| {
        let kind = match handle(v, "verdict")?.inner.verdict() {
            Verdict::Spread => KkVerdictKind::Spread,
            Verdict::NotSpread => KkVerdictKind::NotSpread,
            Verdict::Boundary => KkVerdictKind::Boundary,
        };
        write(out, kind, "out")
    })
}

/// # Safety
/// `v` is null or a live verdict; `out` is null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn kk_verdict_alpha(v: *const KkVerdict, out: *mut f64) -> KkStatus {
    guard(|| write(out, handle(v, "verdict")?.inner.alpha, "out"))
}

/// Whether r_α is one of 1, 3/2, 2, 3, 4.
///
/// # Safety
/// `v` is null or a live verdict; `out` is null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn kk_verdict_theorem(v: *const KkVerdict, out: *mut bool) -> KkStatus {
    guard(|| write(out, handle(v, "verdict")?.inner.theorem_verdict, "out"))
}

/// Perron root; `KK_STATUS_INVALID_ARGUMENT` for incommensurable α, which
/// has no substitution matrix.
///
/// # Safety
/// `v` is null or a live verdict; `out` is null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn kk_verdict_lambda1(v: *const KkVerdict, out: *mut f64) -> KkStatus {
    guard(|| {
        let s = handle(v, "verdict")?.inner.spectral.as_ref();
        let s = s.ok_or(Failure(
            KkStatus::InvalidArgument,
            "no spectrum for incommensurable alpha".into(),
        ))?;
        write(out, s.lambda1, "out")
    })
}

/// # Safety
/// `v` is null or a live verdict; `out` is null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn kk_verdict_lambda2_modulus(
    v: *const KkVerdict,
    out: *mut f64,
) -> KkStatus {
    guard(|| {
        let s = handle(v, "verdict")?.inner.spectral.as_ref();
        let s = s.ok_or(Failure(
            KkStatus::InvalidArgument,
            "no spectrum for incommensurable alpha".into(),
        ))?;
        write(out, s.lambda2_modulus, "out")
    })
}

/// Flat JSON record of the verdict, freed with [`kk_string_free`].
///
/// # Safety
/// `v` is null or a live verdict; `out` is null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn kk_verdict_to_json(
    v: *const KkVerdict,
    out: *mut *mut c_char,
) -> KkStatus {
    guard(|| {
        let text = handle(v, "verdict")?.inner.record().to_string();
        if out.is_null() {
            return Err(null("out"));
        }
        let c = CString::new(text).map_err(|e| Failure(KkStatus::Internal, e.to_string()))?;
        write(out, c.into_raw(), "out")
    })
}

/// # Safety
/// `v` is null or a live verdict not freed before.
#[no_mangle]
pub unsafe extern "C" fn kk_verdict_free(v: *mut KkVerdict) {
    if !v.is_null() {
        drop(Box::from_raw(v));
    }
}

/// F_t(I) with I's left endpoint at −offset·e^t, offset ∈ (0, 1). Fails with
/// `KK_STATUS_RESOURCE_LIMIT` above `max_tiles` tiles.
///
/// # Safety
/// `out` is null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn kk_patch_generate(
    alpha: f64,
    t: f64,
    offset: f64,
    max_tiles: u64,
    out: *mut *mut KkPatch,
) -> KkStatus {
    guard(|| {
        let p = generate_patch_capped(alpha, t, offset, max_tiles)?;
        give(out, KkPatch { inner: p })
    })
}

/// F_t(I) after `ell` steps of the commensurable rule n/m, anchored at 0.
///
/// # Safety
/// `out` is null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn kk_patch_generate_steps(
    n: u32,
    m: u32,
    ell: u32,
    max_tiles: u64,
    out: *mut *mut KkPatch,
) -> KkStatus {
    guard(|| {
        let p = KakutaniRule::commensurable(n, m)?.patch(FlowTime::Steps(ell), max_tiles)?;
        give(out, KkPatch { inner: p })
    })
}

/// # Safety
/// `p` is null or a live patch; `out` is null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn kk_patch_len(p: *const KkPatch, out: *mut usize) -> KkStatus {
    guard(|| write(out, handle(p, "patch")?.inner.len(), "out"))
}

/// Left end and length of tile `i`, in left-to-right order.
///
/// # Safety
/// `p` is null or a live patch; the outputs are null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn kk_patch_tile(
    p: *const KkPatch,
    i: usize,
    position: *mut f64,
    length: *mut f64,
) -> KkStatus {
    guard(|| {
        let p = &handle(p, "patch")?.inner;
        if i >= p.len() {
            return Err(Failure(
                KkStatus::InvalidArgument,
                format!("tile {i} out of range 0..{}", p.len()),
            ));
        }
        if position.is_null() || length.is_null() {
            return Err(null("output"));
        }
        write(position, p.real_position(i), "position")?;
        write(length, p.real_length(i), "length")
    })
}

/// # Safety
/// `p` is null or a live patch not freed before.
#[no_mangle]
pub unsafe extern "C" fn kk_patch_free(p: *mut KkPatch) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Number of tiles of F_t(I), without materializing them.
///
/// # Safety
/// `out` is null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn kk_count_tiles(alpha: f64, t: f64, out: *mut u64) -> KkStatus {
    guard(|| {
        let c = kakutani::engine::count_tiles(alpha, t)?;
        let c = c.to_u64().ok_or(Failure(
            KkStatus::Overflow,
            format!("{c} tiles exceed 64 bits"),
        ))?;
        write(out, c, "out")
    })
}

/// Whether the ℓ-th iterate of the primitive cover reproduces F_{ℓg}(I)
/// exactly.
///
/// # Safety
/// `out` is null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn kk_verify_cover(
    n: u32,
    m: u32,
    ell: u32,
    max_tiles: u64,
    out: *mut bool,
) -> KkStatus {
    guard(|| write(out, verify_cover(n, m, ell, max_tiles)?.agree, "out"))
}
