use std::ffi::CStr;
use std::ptr;

use ckp_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(ckp_last_error_message()) }.to_string_lossy().into_owned()
}

#[test]
fn favard_values() {
    let mut v = 0.0;
    assert_eq!(unsafe { ckp_favard(1, &mut v) }, CkpStatus::Ok);
    assert!((v - std::f64::consts::FRAC_PI_2).abs() < 1e-14);
    assert_eq!(unsafe { ckp_favard(1, ptr::null_mut()) }, CkpStatus::NullPointer);
}

#[test]
fn spline_constants_struct() {
    let mut c = CkpSplineConstants::default();
    assert_eq!(unsafe { ckp_spline_constants(&mut c) }, CkpStatus::Ok);
    assert!((c.phi_peak - 1.165_561_185_207_211).abs() < 1e-12);
    assert!((c.psi_peak_value - 0.697_065_566_211_488).abs() < 1e-12);
}

#[test]
fn ratio_and_errors() {
    let mut r = CkpRatio::default();
    let s = unsafe { ckp_ratio(CKP_FAMILY_SPLINE, CKP_PART_PSI, 6, 1, 2.0, 1e-8, &mut r) };
    assert_eq!(s, CkpStatus::Ok);
    let mut lb = 0.0;
    assert_eq!(unsafe { ckp_spline_wavelet_lower_bound(6, 1, &mut lb) }, CkpStatus::Ok);
    assert!(r.ratio >= lb);
    assert!(last_error().is_empty());

    let s = unsafe { ckp_ratio(7, CKP_PART_PSI, 6, 1, 2.0, 1e-8, &mut r) };
    assert_eq!(s, CkpStatus::InvalidArgument);
    assert!(last_error().contains("family"));
    let s = unsafe { ckp_ratio(CKP_FAMILY_SPLINE, CKP_PART_PSI, 6, 1, 0.5, 1e-8, &mut r) };
    assert_eq!(s, CkpStatus::ComputationFailed);
    assert!(!last_error().is_empty());
}

#[test]
fn norm_parseval() {
    let mut n = CkpNorm::default();
    let s = unsafe { ckp_weighted_norm(CKP_FAMILY_DAUBECHIES, CKP_PART_PSI, 3, 0.0, 2.0, 1e-8, &mut n) };
    assert_eq!(s, CkpStatus::Ok);
    assert!((n.value - 1.0).abs() < 1e-6);
}

#[test]
fn predictions() {
    let mut v = 0.0;
    assert_eq!(unsafe { ckp_predict_rate(CKP_RATE_DAUB, &mut v) }, CkpStatus::Ok);
    assert_eq!(v, 0.5);
    assert_eq!(unsafe { ckp_predict_limit(CKP_LIMIT_DAUB_PSI, 1, 2.0, 0, &mut v) }, CkpStatus::Ok);
    assert!((v - 0.5f64.sqrt() / std::f64::consts::PI).abs() < 1e-15);
    assert_eq!(unsafe { ckp_predict_limit(99, 1, 2.0, 0, &mut v) }, CkpStatus::InvalidArgument);
}

#[test]
fn bernstein_and_fejer() {
    let c = [1.0, -0.5, 0.25];
    let mut out = CkpBernsteinCheck::default();
    let s = unsafe { ckp_verify_bernstein(3, 1, 1, 2.0, c.as_ptr(), c.len(), 1e-9, &mut out) };
    assert_eq!(s, CkpStatus::Ok);
    assert!(out.holds && out.lhs <= out.rhs * (1.0 + 1e-8));
    let mut r = 0.0;
    assert_eq!(unsafe { ckp_fejer_ratio(2, 2.0, 8, 1e-9, &mut r) }, CkpStatus::Ok);
    assert!(r > 0.0);
}

#[test]
fn tensor_kinds() {
    let mut v = 0.0;
    let s = unsafe { ckp_tensor_ratio(3, CKP_FAMILY_SPLINE, 4, 0, 0, 2.0, 1e-8, &mut v) };
    assert_eq!(s, CkpStatus::Ok);
    assert_eq!(v, 1.0);
    let s = unsafe { ckp_tensor_ratio(4, CKP_FAMILY_SPLINE, 4, 0, 0, 2.0, 1e-8, &mut v) };
    assert_eq!(s, CkpStatus::InvalidArgument);
}

#[test]
fn mask_handle() {
    let mut mask = ptr::null_mut();
    assert_eq!(unsafe { ckp_daubechies_mask_new(2, &mut mask) }, CkpStatus::Ok);
    let mut len = 0;
    let s = unsafe { ckp_daubechies_mask_coeffs(mask, ptr::null_mut(), 0, &mut len) };
    assert_eq!((s, len), (CkpStatus::BufferTooSmall, 4));
    let mut buf = [0.0; 4];
    let s = unsafe { ckp_daubechies_mask_coeffs(mask, buf.as_mut_ptr(), buf.len(), &mut len) };
    assert_eq!(s, CkpStatus::Ok);
    let r3 = 3f64.sqrt();
    let want = [(1.0 + r3) / 8.0, (3.0 + r3) / 8.0, (3.0 - r3) / 8.0, (1.0 - r3) / 8.0];
    for (a, b) in buf.iter().zip(want) {
        assert!((a - b).abs() < 1e-14);
    }
    unsafe { ckp_daubechies_mask_free(mask) };
    unsafe { ckp_daubechies_mask_free(ptr::null_mut()) };

    let s = unsafe { ckp_daubechies_mask_new(0, &mut mask) };
    assert_eq!(s, CkpStatus::ComputationFailed);
}

#[test]
fn euler_frobenius_handle() {
    let mut ef = ptr::null_mut();
    assert_eq!(unsafe { ckp_euler_frobenius_new(2, &mut ef) }, CkpStatus::Ok);
    let mut buf = [0.0; 2];
    let mut len = 0;
    let s = unsafe { ckp_euler_frobenius_roots(ef, buf.as_mut_ptr(), 2, &mut len) };
    assert_eq!((s, len), (CkpStatus::Ok, 2));
    // 1 + 4z + z^2
    let r3 = 3f64.sqrt();
    assert!((buf[0] + 2.0 + r3).abs() < 1e-12 && (buf[1] + 2.0 - r3).abs() < 1e-12);
    unsafe { ckp_euler_frobenius_free(ef) };
}

#[test]
fn favard_table_handle() {
    let mut t = ptr::null_mut();
    assert_eq!(unsafe { ckp_favard_table_new(10, &mut t) }, CkpStatus::Ok);
    let mut v = 0.0;
    assert_eq!(unsafe { ckp_favard_table_get(t, 2, &mut v) }, CkpStatus::Ok);
    assert!((v - std::f64::consts::PI.powi(2) / 8.0).abs() < 1e-14);
    assert_eq!(unsafe { ckp_favard_table_get(t, 11, &mut v) }, CkpStatus::InvalidArgument);
    unsafe { ckp_favard_table_free(t) };
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(ckp_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
