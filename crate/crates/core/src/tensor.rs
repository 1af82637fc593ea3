//! Two-dimensional tensor-product wavelets. Every quantity factorizes over
//! the axes, so everything here delegates to the one-dimensional engines.

use std::f64::consts::PI;

use thiserror::Error;

use crate::constants::{predict_limit, ConstantsError, FavardTable, LimitTarget};
use crate::norms::{ckp, Family, NormsError, Part};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TensorError {
    #[error("axis {axis}: {source}")]
    Axis {
        axis: u8,
        #[source]
        source: Box<NormsError>,
    },
    #[error("lower bounds are only available for the spline family")]
    NotSpline,
    #[error("{0}")]
    OutOfDomain(String),
    #[error(transparent)]
    Constants(#[from] ConstantsError),
}

pub type Result<T> = std::result::Result<T, TensorError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct TensorIndex {
    pub k1: u32,
    pub k2: u32,
}

impl TensorIndex {
    pub fn new(k1: u32, k2: u32) -> Self {
        Self { k1, k2 }
    }

    pub fn swapped(self) -> Self {
        Self {
            k1: self.k2,
            k2: self.k1,
        }
    }
}

/// Which factor sits on which axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TensorKind {
    /// `psi (x) phi`
    PsiPhi = 1,
    /// `phi (x) psi`
    PhiPsi = 2,
    /// `psi (x) psi`
    PsiPsi = 3,
}

impl TensorKind {
    pub fn from_index(kind: u8) -> Option<Self> {
        match kind {
            1 => Some(Self::PsiPhi),
            2 => Some(Self::PhiPsi),
            3 => Some(Self::PsiPsi),
            _ => None,
        }
    }

    pub fn index(self) -> u8 {
        self as u8
    }

    fn parts(self) -> [Part; 2] {
        match self {
            Self::PsiPhi => [Part::Psi, Part::Phi],
            Self::PhiPsi => [Part::Phi, Part::Psi],
            Self::PsiPsi => [Part::Psi, Part::Psi],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TensorWavelet {
    pub kind: TensorKind,
    pub family: Family,
    pub m: usize,
}

/// `C_{k,p}` of the tensor wavelet: the product of the per-axis values.
/// Scaling-function axes use the `+k` weight, like [`ckp`].
pub fn tensor_ckp(w: TensorWavelet, k: TensorIndex, p: f64, tol: f64) -> Result<f64> {
    let [a, b] = w.kind.parts();
    let axis = |n: u8, part, kk| {
        ckp(w.family, part, w.m, kk, p, tol)
            .map(|c| c.ratio)
            .map_err(|e| TensorError::Axis {
                axis: n,
                source: Box::new(e),
            })
    };
    Ok(axis(1, a, k.k1)? * axis(2, b, k.k2)?)
}

/// Spline lower bound
/// `c_kind sqrt(K_{2(m+k1)+1} K_{2(m+k2)+1}) / K_{2m+1}` with prefactor
/// `2^{-k1} pi^{-k1-k2}`, `2^{-k2} pi^{-k1-k2}` or `(2 pi)^{-k1-k2}`.
pub fn tensor_lower_bound(w: TensorWavelet, k: TensorIndex) -> Result<f64> {
    if w.family != Family::Spline {
        return Err(TensorError::NotSpline);
    }
    let t = FavardTable::shared();
    let m = w.m;
    let (k1, k2) = (k.k1 as i32, k.k2 as i32);
    let favard = (t.get(2 * (m + k.k1 as usize) + 1) * t.get(2 * (m + k.k2 as usize) + 1)).sqrt()
        / t.get(2 * m + 1);
    let pi_part = PI.powi(-(k1 + k2));
    let two_part = match w.kind {
        TensorKind::PsiPhi => 2f64.powi(-k1),
        TensorKind::PhiPsi => 2f64.powi(-k2),
        TensorKind::PsiPsi => 2f64.powi(-(k1 + k2)),
    };
    Ok(two_part * pi_part * favard)
}

fn daub_phi_axis(k: u32) -> Result<f64> {
    // Integer k <= 1/p with p > 1 leaves only k = 0, where the factor is 1.
    if k == 0 {
        Ok(1.0)
    } else {
        Err(TensorError::OutOfDomain(format!(
            "the scaling-function axis admits only k = 0, got {k}"
        )))
    }
}

fn daub_psi_axis(k: u32, p: f64) -> Result<f64> {
    if !(p * k as f64 > 1.0) {
        return Err(TensorError::OutOfDomain(format!(
            "wavelet axis needs p*k > 1, got p = {p}, k = {k}"
        )));
    }
    Ok(predict_limit(LimitTarget::DaubPsiK, k, p)?)
}

/// Large-`m` limit of [`tensor_ckp`].
pub fn tensor_limit(w: TensorWavelet, k: TensorIndex, p: f64) -> Result<f64> {
    match w.family {
        Family::Spline => {
            let psi = |kk| predict_limit(LimitTarget::SplinePsiK, kk, p);
            let phi = |kk| predict_limit(LimitTarget::SplinePhiK, kk, p);
            Ok(match w.kind {
                TensorKind::PsiPhi => psi(k.k1)? * phi(k.k2)?,
                TensorKind::PhiPsi => phi(k.k1)? * psi(k.k2)?,
                TensorKind::PsiPsi => psi(k.k1)? * psi(k.k2)?,
            })
        }
        Family::Daubechies => match w.kind {
            TensorKind::PsiPhi => Ok(daub_psi_axis(k.k1, p)? * daub_phi_axis(k.k2)?),
            TensorKind::PhiPsi => Ok(daub_phi_axis(k.k1)? * daub_psi_axis(k.k2, p)?),
            TensorKind::PsiPsi => Ok(daub_psi_axis(k.k1, p)? * daub_psi_axis(k.k2, p)?),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::favard;

    fn tw(kind: TensorKind, family: Family, m: usize) -> TensorWavelet {
        TensorWavelet { kind, family, m }
    }

    #[test]
    fn zero_index_is_one() {
        for kind in [TensorKind::PsiPhi, TensorKind::PhiPsi, TensorKind::PsiPsi] {
            let v = tensor_ckp(tw(kind, Family::Spline, 3), TensorIndex::default(), 2.0, 1e-8).unwrap();
            assert_eq!(v, 1.0);
        }
        let b = tensor_lower_bound(tw(TensorKind::PsiPsi, Family::Spline, 4), TensorIndex::default()).unwrap();
        assert!((b - 1.0).abs() < 1e-15);
    }

    #[test]
    fn product_law_and_symmetry() {
        let (m, p, tol) = (4, 2.0, 1e-9);
        let k = TensorIndex::new(1, 2);
        let v = tensor_ckp(tw(TensorKind::PsiPsi, Family::Spline, m), k, p, tol).unwrap();
        let a = ckp(Family::Spline, Part::Psi, m, 1, p, tol).unwrap().ratio;
        let b = ckp(Family::Spline, Part::Psi, m, 2, p, tol).unwrap().ratio;
        assert!((v - a * b).abs() < 1e-10 * v);
        let k = TensorIndex::new(2, 1);
        let v1 = tensor_ckp(tw(TensorKind::PsiPhi, Family::Spline, m), k, p, tol).unwrap();
        let v2 = tensor_ckp(tw(TensorKind::PhiPsi, Family::Spline, m), k.swapped(), p, tol).unwrap();
        assert!((v1 - v2).abs() < 1e-12 * v1);
    }

    #[test]
    fn axis_errors_name_the_axis() {
        let e = tensor_ckp(tw(TensorKind::PsiPsi, Family::Spline, 2), TensorIndex::new(1, 3), 2.0, 1e-8);
        assert!(matches!(e, Err(TensorError::Axis { axis: 2, .. })));
    }

    #[test]
    fn lower_bounds() {
        let b = tensor_lower_bound(tw(TensorKind::PsiPhi, Family::Spline, 2), TensorIndex::new(1, 1)).unwrap();
        let want = favard(7) / (2.0 * PI * PI * favard(5));
        assert!((b - want).abs() < 1e-14);
        for m in 1..=10 {
            for k1 in 0..=4 {
                for k2 in 0..=4 {
                    let k = TensorIndex::new(k1, k2);
                    let b1 = tensor_lower_bound(tw(TensorKind::PsiPhi, Family::Spline, m), k).unwrap();
                    let b3 = tensor_lower_bound(tw(TensorKind::PsiPsi, Family::Spline, m), k).unwrap();
                    assert!((b1 / b3 - 2f64.powi(k2 as i32)).abs() < 1e-12);
                    let w3 = tw(TensorKind::PsiPsi, Family::Spline, m);
                    let split = tensor_lower_bound(w3, TensorIndex::new(k1, 0)).unwrap()
                        * tensor_lower_bound(w3, TensorIndex::new(0, k2)).unwrap();
                    assert!((b3 - split).abs() < 1e-13 * b3);
                }
            }
        }
        assert!(matches!(
            tensor_lower_bound(tw(TensorKind::PsiPsi, Family::Daubechies, 3), TensorIndex::default()),
            Err(TensorError::NotSpline)
        ));
    }

    #[test]
    fn limits() {
        let s3 = tw(TensorKind::PsiPsi, Family::Spline, 1);
        let v = tensor_limit(s3, TensorIndex::new(1, 1), 2.0).unwrap();
        let base = predict_limit(LimitTarget::SplinePsiK, 1, 2.0).unwrap();
        assert!((v - base * base).abs() < 1e-15);
        let s1 = tw(TensorKind::PsiPhi, Family::Spline, 1);
        assert!((tensor_limit(s1, TensorIndex::new(1, 0), 2.0).unwrap() - base).abs() < 1e-15);
        let s2 = tw(TensorKind::PhiPsi, Family::Spline, 1);
        for (k1, k2) in [(1, 2), (3, 1), (0, 2)] {
            let full = tensor_limit(s3, TensorIndex::new(k1, k2), 2.0).unwrap();
            let split = tensor_limit(s1, TensorIndex::new(k1, 0), 2.0).unwrap()
                * tensor_limit(s2, TensorIndex::new(0, k2), 2.0).unwrap();
            assert!((full - split).abs() < 1e-15 * full);
        }
        let d3 = tw(TensorKind::PsiPsi, Family::Daubechies, 1);
        let v = tensor_limit(d3, TensorIndex::new(1, 1), 2.0).unwrap();
        assert!((v - 0.5 / (PI * PI)).abs() < 1e-15);
        assert!(tensor_limit(d3, TensorIndex::new(0, 1), 2.0).is_err());
        let d1 = tw(TensorKind::PsiPhi, Family::Daubechies, 1);
        assert!(tensor_limit(d1, TensorIndex::new(1, 1), 2.0).is_err());
        assert!(tensor_limit(d1, TensorIndex::new(1, 0), 2.0).is_ok());
    }
}
