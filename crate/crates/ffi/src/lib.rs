//! C ABI over `ckp-core`.
//!
//! Every function returns a [`CkpStatus`] and writes its result through an
//! out-pointer. On failure the message is kept per thread and read with
//! [`ckp_last_error_message`]. Objects with internal state are handed out
//! as opaque pointers and released with the matching `_free` function.
//!
//! Integer selectors (`family`, `part`, `target`) use the `CKP_*` constants.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ckp_core::constants::{
    favard, predict_limit, predict_rate, shared_spline_constants, spline_wavelet_lower_bound, FavardTable,
    LimitTarget, RateTarget,
};
use ckp_core::daubechies::{daub_mask, DaubechiesMask};
use ckp_core::norms::{
    ckp, fejer_extremal_ratio, verify_bernstein_spline, weighted_lp_norm, Family, Part, WeightedNormQuery,
};
use ckp_core::splines::{euler_frobenius, EulerFrobenius};
use ckp_core::tensor::{tensor_ckp, TensorIndex, TensorKind, TensorWavelet};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CkpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ComputationFailed = 3,
    BufferTooSmall = 4,
    Panic = 5,
}

pub const CKP_FAMILY_SPLINE: i32 = 0;
pub const CKP_FAMILY_DAUBECHIES: i32 = 1;
pub const CKP_PART_PHI: i32 = 0;
pub const CKP_PART_PSI: i32 = 1;

pub const CKP_LIMIT_DAUB_PHI: i32 = 0;
pub const CKP_LIMIT_DAUB_PSI: i32 = 1;
pub const CKP_LIMIT_SPLINE_PHI: i32 = 2;
pub const CKP_LIMIT_SPLINE_PSI: i32 = 3;
pub const CKP_LIMIT_DAUB_RATIO: i32 = 4;
pub const CKP_LIMIT_SPLINE_RATIO: i32 = 5;

pub const CKP_RATE_DAUB: i32 = 0;
pub const CKP_RATE_SPLINE: i32 = 1;
pub const CKP_RATE_RATIO: i32 = 2;
pub const CKP_RATE_FIXED_K: i32 = 3;

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CkpSplineConstants {
    pub phi_peak: f64,
    pub phi_peak_value: f64,
    pub phi_curvature: f64,
    pub psi_peak: f64,
    pub psi_peak_value: f64,
    pub psi_curvature: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CkpRatio {
    pub numerator: f64,
    pub denominator: f64,
    pub ratio: f64,
    pub certified_rel_error: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CkpNorm {
    pub value: f64,
    pub rel_error: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CkpBernsteinCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Opaque Daubechies filter.
pub struct CkpDaubechiesMask(DaubechiesMask);

/// Opaque Euler-Frobenius polynomial with its roots.
pub struct CkpEulerFrobenius(EulerFrobenius);

/// Opaque precomputed Favard constants.
pub struct CkpFavardTable(FavardTable);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

struct Failure(CkpStatus, String);

impl<E: std::error::Error> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(CkpStatus::ComputationFailed, e.to_string())
    }
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure(CkpStatus::InvalidArgument, msg.into())
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

/// Runs `f`, converting errors and panics into a status plus message.
fn guard<F: FnOnce() -> Result<(), Failure>>(f: F) -> CkpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            CkpStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            CkpStatus::Panic
        }
    }
}

/// # Safety
/// `out` must be null or valid for a write of `T`.
unsafe fn write<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure(CkpStatus::NullPointer, "null output pointer".into()));
    }
    out.write(value);
    Ok(())
}

fn family(f: i32) -> Result<Family, Failure> {
    match f {
        CKP_FAMILY_SPLINE => Ok(Family::Spline),
        CKP_FAMILY_DAUBECHIES => Ok(Family::Daubechies),
        _ => Err(invalid(format!("unknown family {f}"))),
    }
}

fn part(p: i32) -> Result<Part, Failure> {
    match p {
        CKP_PART_PHI => Ok(Part::Phi),
        CKP_PART_PSI => Ok(Part::Psi),
        _ => Err(invalid(format!("unknown part {p}"))),
    }
}

/// Copies `src` into `buf` of capacity `cap`; `len_out` always receives
/// the required length.
///
/// # Safety
/// `buf` must be valid for `cap` writes when `cap > 0`; `len_out` valid or null.
unsafe fn copy_out(src: &[f64], buf: *mut f64, cap: usize, len_out: *mut usize) -> Result<(), Failure> {
    if !len_out.is_null() {
        len_out.write(src.len());
    }
    if cap < src.len() {
        return Err(Failure(
            CkpStatus::BufferTooSmall,
            format!("need {} entries, buffer holds {cap}", src.len()),
        ));
    }
    if buf.is_null() {
        return Err(Failure(CkpStatus::NullPointer, "null buffer".into()));
    }
    ptr::copy_nonoverlapping(src.as_ptr(), buf, src.len());
    Ok(())
}

/// Message of the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn ckp_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ckp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Favard constant `K_j`.
///
/// # Safety
/// `out` must be valid for writing one `double`.
#[no_mangle]
pub unsafe extern "C" fn ckp_favard(j: u32, out: *mut f64) -> CkpStatus {
    guard(|| write(out, favard(j as usize)))
}

/// # Safety
/// `out` must be valid for writing one `CkpSplineConstants`.
#[no_mangle]
pub unsafe extern "C" fn ckp_spline_constants(out: *mut CkpSplineConstants) -> CkpStatus {
    guard(|| {
        let c = shared_spline_constants();
        write(
            out,
            CkpSplineConstants {
                phi_peak: c.phi_peak,
                phi_peak_value: c.phi_peak_value,
                phi_curvature: c.phi_curvature,
                psi_peak: c.psi_peak,
                psi_peak_value: c.psi_peak_value,
                psi_curvature: c.psi_curvature,
            },
        )
    })
}

/// Weighted-norm ratio for order `k`.
///
/// # Safety
/// `out` must be valid for writing one `CkpRatio`.
#[no_mangle]
pub unsafe extern "C" fn ckp_ratio(
    family_id: i32,
    part_id: i32,
    m: u32,
    k: u32,
    p: f64,
    tol: f64,
    out: *mut CkpRatio,
) -> CkpStatus {
    guard(|| {
        let r = ckp(family(family_id)?, part(part_id)?, m as usize, k, p, tol)?;
        write(
            out,
            CkpRatio {
                numerator: r.numerator,
                denominator: r.denominator,
                ratio: r.ratio,
                certified_rel_error: r.certified_rel_error,
            },
        )
    })
}

/// `(int |w|^{alpha p} |f^(w)|^p dw)^{1/p}`.
///
/// # Safety
/// `out` must be valid for writing one `CkpNorm`.
#[no_mangle]
pub unsafe extern "C" fn ckp_weighted_norm(
    family_id: i32,
    part_id: i32,
    m: u32,
    alpha: f64,
    p: f64,
    tol: f64,
    out: *mut CkpNorm,
) -> CkpStatus {
    guard(|| {
        let n = weighted_lp_norm(&WeightedNormQuery {
            family: family(family_id)?,
            part: part(part_id)?,
            m: m as usize,
            alpha,
            p,
            tol,
        })?;
        write(out, CkpNorm { value: n.value, rel_error: n.rel_error })
    })
}

/// Large-order limit; `psi_order` is used only by `CKP_LIMIT_DAUB_RATIO`.
///
/// # Safety
/// `out` must be valid for writing one `double`.
#[no_mangle]
pub unsafe extern "C" fn ckp_predict_limit(target: i32, k: u32, p: f64, psi_order: u32, out: *mut f64) -> CkpStatus {
    guard(|| {
        let t = match target {
            CKP_LIMIT_DAUB_PHI => LimitTarget::DaubPhiMinusK,
            CKP_LIMIT_DAUB_PSI => LimitTarget::DaubPsiK,
            CKP_LIMIT_SPLINE_PHI => LimitTarget::SplinePhiK,
            CKP_LIMIT_SPLINE_PSI => LimitTarget::SplinePsiK,
            CKP_LIMIT_DAUB_RATIO => LimitTarget::PhiPsiRatioDaub { psi_order },
            CKP_LIMIT_SPLINE_RATIO => LimitTarget::PhiPsiRatioSpline,
            _ => return Err(invalid(format!("unknown limit target {target}"))),
        };
        write(out, predict_limit(t, k, p)?)
    })
}

/// # Safety
/// `out` must be valid for writing one `double`.
#[no_mangle]
pub unsafe extern "C" fn ckp_predict_rate(target: i32, out: *mut f64) -> CkpStatus {
    guard(|| {
        let t = match target {
            CKP_RATE_DAUB => RateTarget::DaubGeom,
            CKP_RATE_SPLINE => RateTarget::SplineGeom,
            CKP_RATE_RATIO => RateTarget::GeomRatio,
            CKP_RATE_FIXED_K => RateTarget::FixedKRatio,
            _ => return Err(invalid(format!("unknown rate target {target}"))),
        };
        write(out, predict_rate(t))
    })
}

/// # Safety
/// `out` must be valid for writing one `double`.
#[no_mangle]
pub unsafe extern "C" fn ckp_spline_wavelet_lower_bound(m: u32, k: u32, out: *mut f64) -> CkpStatus {
    guard(|| {
        if m == 0 {
            return Err(invalid("m must be positive"));
        }
        write(out, spline_wavelet_lower_bound(m as usize, k as usize))
    })
}

/// Checks the spline Bernstein inequality for `coeffs[0..len]`.
///
/// # Safety
/// `coeffs` must be valid for `len` reads; `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn ckp_verify_bernstein(
    m: u32,
    k: u32,
    h: u32,
    p: f64,
    coeffs: *const f64,
    len: usize,
    tol: f64,
    out: *mut CkpBernsteinCheck,
) -> CkpStatus {
    guard(|| {
        if coeffs.is_null() {
            return Err(Failure(CkpStatus::NullPointer, "null coefficients".into()));
        }
        let c = std::slice::from_raw_parts(coeffs, len);
        let r = verify_bernstein_spline(m as usize, k as usize, h, p, c, tol)?;
        write(out, CkpBernsteinCheck { lhs: r.lhs, rhs: r.rhs, holds: r.holds })
    })
}

/// Fejer-kernel extremal ratio at index `j`.
///
/// # Safety
/// `out` must be valid for writing one `double`.
#[no_mangle]
pub unsafe extern "C" fn ckp_fejer_ratio(m: u32, p: f64, j: u32, tol: f64, out: *mut f64) -> CkpStatus {
    guard(|| write(out, fejer_extremal_ratio(m as usize, p, j, tol)?))
}

/// Tensor-product constant; `kind` is 1 (psi x phi), 2 (phi x psi) or
/// 3 (psi x psi).
///
/// # Safety
/// `out` must be valid for writing one `double`.
#[no_mangle]
pub unsafe extern "C" fn ckp_tensor_ratio(
    kind: u8,
    family_id: i32,
    m: u32,
    k1: u32,
    k2: u32,
    p: f64,
    tol: f64,
    out: *mut f64,
) -> CkpStatus {
    guard(|| {
        let kind = TensorKind::from_index(kind).ok_or_else(|| invalid(format!("unknown tensor kind {kind}")))?;
        let w = TensorWavelet {
            kind,
            family: family(family_id)?,
            m: m as usize,
        };
        write(out, tensor_ckp(w, TensorIndex::new(k1, k2), p, tol)?)
    })
}

/// # Safety
/// `out` must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn ckp_daubechies_mask_new(m: u32, out: *mut *mut CkpDaubechiesMask) -> CkpStatus {
    guard(|| {
        let mask = daub_mask(m as usize)?;
        write(out, Box::into_raw(Box::new(CkpDaubechiesMask(mask))))
    })
}

/// Copies the `2m` coefficients into `buf`.
///
/// # Safety
/// `mask` must come from [`ckp_daubechies_mask_new`]; see [`copy_out`].
#[no_mangle]
pub unsafe extern "C" fn ckp_daubechies_mask_coeffs(
    mask: *const CkpDaubechiesMask,
    buf: *mut f64,
    cap: usize,
    len_out: *mut usize,
) -> CkpStatus {
    guard(|| {
        let mask = mask.as_ref().ok_or(Failure(CkpStatus::NullPointer, "null mask".into()))?;
        copy_out(mask.0.coeffs(), buf, cap, len_out)
    })
}

/// # Safety
/// `mask` must be null or come from [`ckp_daubechies_mask_new`], freed once.
#[no_mangle]
pub unsafe extern "C" fn ckp_daubechies_mask_free(mask: *mut CkpDaubechiesMask) {
    if !mask.is_null() {
        drop(Box::from_raw(mask));
    }
}

/// # Safety
/// `out` must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn ckp_euler_frobenius_new(m: u32, out: *mut *mut CkpEulerFrobenius) -> CkpStatus {
    guard(|| {
        let ef = euler_frobenius(m as usize)?;
        write(out, Box::into_raw(Box::new(CkpEulerFrobenius(ef))))
    })
}

/// Copies all `2m - 2` roots, ascending, into `buf`.
///
/// # Safety
/// `ef` must come from [`ckp_euler_frobenius_new`]; see [`copy_out`].
#[no_mangle]
pub unsafe extern "C" fn ckp_euler_frobenius_roots(
    ef: *const CkpEulerFrobenius,
    buf: *mut f64,
    cap: usize,
    len_out: *mut usize,
) -> CkpStatus {
    guard(|| {
        let ef = ef.as_ref().ok_or(Failure(CkpStatus::NullPointer, "null polynomial".into()))?;
        copy_out(ef.0.roots(), buf, cap, len_out)
    })
}

/// # Safety
/// `ef` must be null or come from [`ckp_euler_frobenius_new`], freed once.
#[no_mangle]
pub unsafe extern "C" fn ckp_euler_frobenius_free(ef: *mut CkpEulerFrobenius) {
    if !ef.is_null() {
        drop(Box::from_raw(ef));
    }
}

/// # Safety
/// `out` must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn ckp_favard_table_new(j_max: u32, out: *mut *mut CkpFavardTable) -> CkpStatus {
    guard(|| write(out, Box::into_raw(Box::new(CkpFavardTable(FavardTable::new(j_max as usize))))))
}

/// `K_j` from the table; `j` beyond the table is an invalid argument.
///
/// # Safety
/// `table` must come from [`ckp_favard_table_new`]; `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn ckp_favard_table_get(table: *const CkpFavardTable, j: u32, out: *mut f64) -> CkpStatus {
    guard(|| {
        let t = table.as_ref().ok_or(Failure(CkpStatus::NullPointer, "null table".into()))?;
        let v = t
            .0
            .values()
            .get(j as usize)
            .copied()
            .ok_or_else(|| invalid(format!("j = {j} exceeds table size {}", t.0.j_max())))?;
        write(out, v)
    })
}

/// # Safety
/// `table` must be null or come from [`ckp_favard_table_new`], freed once.
#[no_mangle]
pub unsafe extern "C" fn ckp_favard_table_free(table: *mut CkpFavardTable) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}
