//! The lattice-sum norm engine against brute-force quadrature of the
//! closed-form spline-wavelet spectrum at p = 2.

use ckp_core::norms::{ckp, Family, Part};
use ckp_core::splines::spline_wavelet_weighted_magnitude;

/// `int_R |w|^{-2k} |psi^(w)|^2` by composite Simpson on [0, w_max].
fn brute_force(m: usize, k: u32) -> f64 {
    let (w_max, n) = (600.0, 240_000);
    let h = w_max / n as f64;
    let f = |w: f64| spline_wavelet_weighted_magnitude(m, k, w).unwrap().powi(2);
    // The integrand vanishes at the origin for k < m.
    assert!((k as usize) < m);
    let mut s = f(w_max);
    for i in 1..n {
        s += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    2.0 * s * h / 3.0
}

#[test]
fn ratio_matches_brute_force() {
    for (m, k) in [(2, 1), (3, 1), (3, 2), (4, 2), (5, 3)] {
        let want = (brute_force(m, k) / brute_force(m, 0)).sqrt();
        let got = ckp(Family::Spline, Part::Psi, m, k, 2.0, 1e-10).unwrap();
        let rel = (got.ratio - want).abs() / want;
        assert!(rel < 1e-6, "m={m} k={k}: {} vs {want} (rel {rel:.2e})", got.ratio);
    }
}
