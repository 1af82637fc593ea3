use std::f64::consts::PI;

use ckp_core::constants::{favard, spline_wavelet_lower_bound};
use ckp_core::daubechies::{daub_mask, daub_symbol_squared, SymbolSquared};
use ckp_core::norms::{
    ckp, verify_bernstein_spline, weighted_norm_of, DaubechiesSpectrum, Family, Part, ScaledSpectrum,
    SplineSpectrum,
};
use ckp_core::numerics::{integrate, poly_real_roots, Interval, PeriodizedSinc, PolynomialReal, QuadratureOptions};
use ckp_core::splines::bspline_value;
use ckp_core::tensor::{tensor_ckp, tensor_lower_bound, TensorIndex, TensorKind, TensorWavelet};
use proptest::prelude::*;

fn poly_from_roots(roots: &[f64]) -> PolynomialReal {
    let mut c = vec![1.0];
    for &r in roots {
        let mut next = vec![0.0; c.len() + 1];
        for (i, &a) in c.iter().enumerate() {
            next[i] -= a * r;
            next[i + 1] += a;
        }
        c = next;
    }
    PolynomialReal::new(c)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn real_roots_are_recovered(mut roots in prop::collection::vec(-4.0f64..4.0, 1..6)) {
        roots.sort_by(f64::total_cmp);
        prop_assume!(roots.windows(2).all(|w| w[1] - w[0] > 0.2));
        let found = poly_real_roots(&poly_from_roots(&roots)).unwrap();
        prop_assert_eq!(found.len(), roots.len());
        for (a, b) in found.iter().zip(&roots) {
            prop_assert!((a - b).abs() < 1e-9, "{} vs {}", a, b);
        }
    }

    #[test]
    fn quadrature_matches_monomials(n in 0i32..8, a in -2.0f64..0.0, b in 0.1f64..3.0) {
        let r = integrate(|x| x.powi(n), Interval::new(a, b).unwrap(), QuadratureOptions::relative(1e-13)).unwrap();
        let exact = (b.powi(n + 1) - a.powi(n + 1)) / (n + 1) as f64;
        prop_assert!((r.value - exact).abs() <= 1e-12 * exact.abs().max(1.0));
    }

    #[test]
    fn lattice_sum_is_periodic_and_even(theta in -PI..PI, power in 2.5f64..20.0) {
        let s = PeriodizedSinc::new(power, 0.0).unwrap();
        let v = s.eval(theta);
        prop_assert!((s.eval(theta + 2.0 * PI) - v).abs() <= 1e-12 * v);
        prop_assert!((s.eval(-theta) - v).abs() <= 1e-12 * v);
    }

    #[test]
    fn qmf_closed_form(m in 1usize..=15, w in -10.0f64..10.0) {
        let s = SymbolSquared::new(m).unwrap();
        let a = s.eval(w);
        prop_assert!((0.0..=1.0).contains(&a));
        prop_assert!((a + s.eval(w + PI) - 1.0).abs() < 1e-12);
        prop_assert!((daub_symbol_squared(m, w).unwrap() - a).abs() < 1e-15);
    }

    #[test]
    fn qmf_mask(m in 1usize..=12, w in 0.0f64..(2.0 * PI)) {
        let mask = daub_mask(m).unwrap();
        prop_assert!(mask.qmf_defect(w) < 1e-10);
    }

    #[test]
    fn bspline_symmetric_nonnegative(m in 1usize..=12, t in 0.0f64..1.0) {
        let x = t * m as f64;
        let v = bspline_value(m, x).unwrap();
        prop_assert!(v >= 0.0);
        prop_assert!((v - bspline_value(m, m as f64 - x).unwrap()).abs() < 1e-13);
    }

    #[test]
    fn favard_brackets_limit(j in 0usize..200) {
        let limit = 4.0 / PI;
        let kj = favard(j);
        if j % 2 == 0 {
            prop_assert!(kj <= limit + 1e-15);
        } else {
            prop_assert!(kj >= limit - 1e-15);
        }
        prop_assert!(kj >= 1.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    // a |f^(d w)| has norm a d^{-alpha - 1/p} times that of |f^|.
    #[test]
    fn norm_scaling_covariance(
        m in 2usize..6,
        d in 0.5f64..3.0,
        a in 0.2f64..5.0,
        p in prop::sample::select(vec![1.5, 2.0, 3.0]),
        k in 0u32..2,
    ) {
        let alpha = -(k as f64);
        let base = SplineSpectrum { part: Part::Psi, m };
        let n0 = weighted_norm_of(&base, alpha, p, 1e-10).unwrap().value;
        let scaled = ScaledSpectrum { inner: base, dilation: d, amplitude: a };
        let n1 = weighted_norm_of(&scaled, alpha, p, 1e-10).unwrap().value;
        let want = a * d.powf(-alpha - 1.0 / p) * n0;
        prop_assert!((n1 - want).abs() < 1e-8 * want, "{} vs {}", n1, want);
    }

    #[test]
    fn daubechies_scaling_covariance(m in 2usize..6, d in 0.5f64..2.0) {
        let base = DaubechiesSpectrum::new(Part::Psi, m, 1e-12).unwrap();
        let n0 = weighted_norm_of(&base, -1.0, 2.0, 1e-9).unwrap().value;
        let scaled = ScaledSpectrum { inner: base, dilation: d, amplitude: 1.0 };
        let n1 = weighted_norm_of(&scaled, -1.0, 2.0, 1e-9).unwrap().value;
        let want = d.powf(1.0 - 0.5) * n0;
        prop_assert!((n1 - want).abs() < 1e-7 * want);
    }

    // Refining the knots by h rescales both sides of the Bernstein
    // inequality the same way.
    #[test]
    fn bernstein_knot_refinement(
        c in prop::collection::vec(-1.0f64..1.0, 1..6),
        m in 2usize..5,
        p in prop::sample::select(vec![1.5, 2.0, 3.0]),
    ) {
        prop_assume!(c.iter().any(|x| x.abs() > 1e-3));
        let k = 1;
        let one = verify_bernstein_spline(m, k, 1, p, &c, 1e-10).unwrap();
        let two = verify_bernstein_spline(m, k, 2, p, &c, 1e-10).unwrap();
        let lhs_scale = 2f64.powf(k as f64 + 1.0 / p - 1.0);
        prop_assert!((two.lhs - lhs_scale * one.lhs).abs() < 1e-8 * two.lhs);
        prop_assert!((two.lhs / two.rhs - one.lhs / one.rhs).abs() < 1e-8);
    }

    #[test]
    fn spline_wavelet_above_lower_bound(m in 1usize..9, k in 0u32..3, p in prop::sample::select(vec![1.5, 2.0, 3.0])) {
        prop_assume!(k as usize <= m);
        let r = ckp(Family::Spline, Part::Psi, m, k, p, 1e-9).unwrap();
        prop_assert!(r.ratio >= spline_wavelet_lower_bound(m, k as usize) * (1.0 - 1e-8));
    }

    #[test]
    fn tensor_is_a_product(
        m in 2usize..7,
        k1 in 0u32..3,
        k2 in 0u32..3,
        kind in prop::sample::select(vec![1u8, 2, 3]),
    ) {
        let kind = TensorKind::from_index(kind).unwrap();
        let w = TensorWavelet { kind, family: Family::Spline, m };
        let parts = match kind {
            TensorKind::PsiPhi => [Part::Psi, Part::Phi],
            TensorKind::PhiPsi => [Part::Phi, Part::Psi],
            TensorKind::PsiPsi => [Part::Psi, Part::Psi],
        };
        let a = ckp(Family::Spline, parts[0], m, k1, 2.0, 1e-9);
        let b = ckp(Family::Spline, parts[1], m, k2, 2.0, 1e-9);
        let joint = tensor_ckp(w, TensorIndex::new(k1, k2), 2.0, 1e-9);
        match (a, b, joint) {
            (Ok(a), Ok(b), Ok(j)) => prop_assert!((j - a.ratio * b.ratio).abs() <= 1e-12 * j),
            (a, b, j) => prop_assert!(j.is_err() && (a.is_err() || b.is_err())),
        }
        let lb = tensor_lower_bound(w, TensorIndex::new(k1, k2)).unwrap();
        let swapped = TensorWavelet { kind: TensorKind::PsiPsi, family: Family::Spline, m };
        let split = tensor_lower_bound(swapped, TensorIndex::new(k1, 0)).unwrap()
            * tensor_lower_bound(swapped, TensorIndex::new(0, k2)).unwrap();
        prop_assert!(lb >= split * (1.0 - 1e-13));
    }
}
