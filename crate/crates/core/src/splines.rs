//! Cardinal B-splines, Euler-Frobenius polynomials, autocorrelation
//! symbols and the semiorthogonal spline wavelet.
//!
//! Fourier transforms use the unitary convention
//! `f^(w) = (2 pi)^{-1/2} int f(x) e^{-iwx} dx`, so
//! `N_m^(w) = (2 pi)^{-1/2} (e^{-iw/2} sinc(w/2))^m`.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::numerics::{poly_real_roots, NumericsError, PeriodizedSinc, PolynomialReal};

pub type RationalValue = BigRational;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SplineError {
    #[error("order m = {m} is invalid, need m >= {min}")]
    InvalidOrder { m: usize, min: usize },
    #[error("weight |w|^-{k} is singular at w = 0")]
    SingularWeight { k: u32 },
    #[error("expected {expected} Euler-Frobenius roots, found {found}")]
    RootCount { expected: usize, found: usize },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

pub type Result<T> = std::result::Result<T, SplineError>;

fn check_order(m: usize, min: usize) -> Result<()> {
    if m < min {
        Err(SplineError::InvalidOrder { m, min })
    } else {
        Ok(())
    }
}

pub(crate) fn ln_sqrt_2pi() -> f64 {
    0.5 * (2.0 * PI).ln()
}

/// `|sin(x)/x|`, with the removable singularity filled in.
pub(crate) fn sinc_abs(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        (x.sin() / x).abs()
    }
}

/// Value of the B-spline `N_m` at `x` by the two-term recurrence
/// `N_r(y) = (y N_{r-1}(y) + (r - y) N_{r-1}(y - 1)) / (r - 1)`.
/// Every term is nonnegative, so there is no cancellation.
pub fn bspline_value(m: usize, x: f64) -> Result<f64> {
    check_order(m, 1)?;
    if !(x >= 0.0 && x < m as f64) {
        return Ok(0.0);
    }
    let i = x.floor() as usize;
    // w[t] = N_r(x - (i - t)), t = 0..r
    let mut w = vec![0.0; m];
    w[0] = 1.0;
    for r in 2..=m {
        for t in (0..r).rev() {
            let y = x - i as f64 + t as f64;
            let here = if t < r - 1 { w[t] } else { 0.0 };
            let below = if t >= 1 { w[t - 1] } else { 0.0 };
            w[t] = (y * here + (r as f64 - y) * below) / (r - 1) as f64;
        }
    }
    Ok(w.get(i).copied().unwrap_or(0.0))
}

/// Exact values `N_m(0..=m)` by the integer-point recurrence.
fn integer_table(m: usize) -> Vec<RationalValue> {
    let mut vals: Vec<RationalValue> = vec![BigRational::one(), BigRational::zero()];
    for r in 2..=m {
        let mut next = vec![BigRational::zero(); r + 1];
        let denom = BigRational::from_integer(BigInt::from(r - 1));
        for (j, slot) in next.iter_mut().enumerate() {
            let here = vals.get(j).cloned().unwrap_or_else(BigRational::zero);
            let below = if j >= 1 {
                vals[j - 1].clone()
            } else {
                BigRational::zero()
            };
            let a = BigRational::from_integer(BigInt::from(j)) * here;
            let b = BigRational::from_integer(BigInt::from(r - j)) * below;
            *slot = (a + b) / denom.clone();
        }
        vals = next;
    }
    vals
}

/// Exact `N_m(1), ..., N_m(m-1)`.
pub fn bspline_integer_values(m: usize) -> Result<Vec<RationalValue>> {
    check_order(m, 1)?;
    let table = integer_table(m);
    Ok(table[1..m].to_vec())
}

/// `ln |N_m^(w)|`.
pub fn bspline_ft_log_magnitude(m: usize, omega: f64) -> f64 {
    m as f64 * sinc_abs(0.5 * omega).ln() - ln_sqrt_2pi()
}

/// `|N_m^(w)| = (2 pi)^{-1/2} |sinc(w/2)|^m`, evaluated in the log domain.
pub fn bspline_ft_magnitude(m: usize, omega: f64) -> Result<f64> {
    check_order(m, 1)?;
    Ok(bspline_ft_log_magnitude(m, omega).exp())
}

/// The Euler-Frobenius polynomial of order `2m - 1`, with coefficients
/// `(2m-1)! N_{2m}(nu + 1)`, `nu = 0..=2m-2`, and its roots.
#[derive(Debug, Clone, PartialEq)]
pub struct EulerFrobenius {
    m: usize,
    coeffs: Vec<BigInt>,
    roots: Vec<f64>,
}

impl EulerFrobenius {
    pub fn m(&self) -> usize {
        self.m
    }

    /// Integer coefficients in ascending degree.
    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn polynomial(&self) -> PolynomialReal {
        PolynomialReal::new(self.coeffs.iter().map(|c| c.to_f64().unwrap_or(f64::INFINITY)).collect())
    }

    /// All `2m - 2` roots, ascending. All are negative.
    pub fn roots(&self) -> &[f64] {
        &self.roots
    }

    /// The `m - 1` roots in `(-1, 0)`, ordered `lambda_1 > lambda_2 > ...`.
    pub fn roots_in_unit_interval(&self) -> Vec<f64> {
        let mut inner: Vec<f64> = self.roots.iter().copied().filter(|&r| r > -1.0).collect();
        inner.sort_by(|a, b| b.total_cmp(a));
        inner
    }

    /// Autocorrelation symbol from the root factorization:
    /// `prod (1 - 2 lambda cos w + lambda^2)/|lambda| / (2m-1)!`.
    pub fn symbol_from_roots(&self, omega: f64) -> f64 {
        let c = omega.cos();
        let ln_fact: f64 = (1..2 * self.m).map(|i| (i as f64).ln()).sum();
        let ln_prod: f64 = self
            .roots_in_unit_interval()
            .iter()
            .map(|&l| ((1.0 - 2.0 * l * c + l * l) / l.abs()).ln())
            .sum();
        (ln_prod - ln_fact).exp()
    }
}

pub fn euler_frobenius(m: usize) -> Result<EulerFrobenius> {
    check_order(m, 2)?;
    let values = integer_table(2 * m);
    let fact: BigInt = (1..2 * m).map(BigInt::from).product();
    let coeffs: Vec<BigInt> = (0..=2 * m - 2)
        .map(|nu| {
            let v = &values[nu + 1] * BigRational::from_integer(fact.clone());
            debug_assert!(v.is_integer());
            v.to_integer()
        })
        .collect();
    let poly = PolynomialReal::new(coeffs.iter().map(|c| c.to_f64().unwrap_or(f64::INFINITY)).collect());
    let roots = poly_real_roots(&poly)?;
    if roots.len() != 2 * m - 2 {
        return Err(SplineError::RootCount {
            expected: 2 * m - 2,
            found: roots.len(),
        });
    }
    Ok(EulerFrobenius { m, coeffs, roots })
}

/// `sum_{|k| < m} N_{2m}(m + k) cos(k w)`.
///
/// Under the unitary transform this equals
/// `2 pi sum_l |N_m^(w + 2 pi l)|^2`.
pub fn autocorrelation_symbol(m: usize, omega: f64) -> Result<f64> {
    check_order(m, 1)?;
    let values = integer_table(2 * m);
    let mut sum = values[m].to_f64().unwrap_or(f64::NAN);
    for k in 1..m {
        sum += 2.0 * values[m + k].to_f64().unwrap_or(f64::NAN) * (k as f64 * omega).cos();
    }
    Ok(sum)
}

/// The autocorrelation symbol evaluated as the positive lattice sum
/// `sum_l sinc^{2m}((w + 2 pi l)/2)`; free of cancellation for large `m`.
pub fn autocorrelation_symbol_lattice(m: usize, omega: f64) -> Result<f64> {
    check_order(m, 1)?;
    Ok(PeriodizedSinc::new(2.0 * m as f64, 0.0)?.eval(omega))
}

/// `L(w) = |1 - e^{-iw}|^2 sum|N_{m-1}^|^2 / sum|N_m^|^2`; the sharp
/// Bernstein constant squared for `k = 1`, `p = 2` is `max L`.
pub fn bernstein_symbol_ratio(m: usize, omega: f64) -> Result<f64> {
    check_order(m, 2)?;
    let num = autocorrelation_symbol_lattice(m - 1, omega)?;
    let den = autocorrelation_symbol_lattice(m, omega)?;
    Ok(2.0 * (1.0 - omega.cos()) * num / den)
}

/// Semiorthogonal spline wavelet coefficients
/// `q_nu = (-1)^nu 2^{1-m} N_{2m}(nu + 1)`, `nu = 0..=2m-2`.
#[derive(Debug, Clone, PartialEq)]
pub struct SplineWavelet {
    m: usize,
    exact: Vec<RationalValue>,
    coeffs: Vec<f64>,
}

impl SplineWavelet {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn exact_coeffs(&self) -> &[RationalValue] {
        &self.exact
    }

    /// Support of the wavelet in x.
    pub fn support(&self) -> (f64, f64) {
        (0.0, (2 * self.m - 1) as f64)
    }

    /// `Q(theta) = sum_nu q_nu e^{-i nu theta}`.
    pub fn symbol(&self, theta: f64) -> Complex64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(nu, &q)| q * Complex64::from_polar(1.0, -(nu as f64) * theta))
            .sum()
    }

    /// `|Q(theta)| = 2^{1-m} A_m(theta + pi)` with the autocorrelation
    /// symbol `A_m` summed as a positive lattice series.
    pub fn symbol_abs(&self, theta: f64) -> f64 {
        let a = autocorrelation_symbol_lattice(self.m, theta + PI).unwrap_or(f64::NAN);
        a * 2f64.powi(1 - self.m as i32)
    }

    /// Complex spectrum `psi^(w) = (1/2) Q(w/2) (i w/2)^m N_{2m}^(w/2)`.
    pub fn spectrum(&self, omega: f64) -> Complex64 {
        let xi = 0.5 * omega;
        let m = self.m as i32;
        // The even power makes sinc^{2m} nonnegative.
        let n_hat = Complex64::from_polar(
            (2.0 * m as f64 * sinc_abs(0.5 * xi).ln() - ln_sqrt_2pi()).exp(),
            -(m as f64) * xi,
        );
        let deriv = Complex64::new(0.0, xi).powi(m);
        0.5 * self.symbol(xi) * deriv * n_hat
    }
}

pub fn spline_wavelet(m: usize) -> Result<SplineWavelet> {
    check_order(m, 1)?;
    let values = integer_table(2 * m);
    let scale = BigRational::new(BigInt::one(), BigInt::from(2).pow((m - 1) as u32));
    let exact: Vec<RationalValue> = (0..=2 * m - 2)
        .map(|nu| {
            let v = &values[nu + 1] * &scale;
            if nu % 2 == 0 {
                v
            } else {
                -v
            }
        })
        .collect();
    let coeffs = exact.iter().map(|q| q.to_f64().unwrap_or(f64::NAN)).collect();
    Ok(SplineWavelet { m, exact, coeffs })
}

/// `|w|^{-k} |psi_m^S^(w)|` by the closed form
/// `2^{-2k} (2 pi)^{-1/2} |sin^2(w/4)/(w/4)|^m |w/4|^{-k} E(pi - w/2)`,
/// `E(t) = |2 sin(t/2)|^{2m} sum_l (t + 2 pi l)^{-2m}`.
pub fn spline_wavelet_weighted_magnitude(m: usize, k: u32, omega: f64) -> Result<f64> {
    check_order(m, 1)?;
    if omega == 0.0 {
        return if k > 0 {
            Err(SplineError::SingularWeight { k })
        } else {
            Ok(0.0)
        };
    }
    let q = 0.25 * omega;
    let tilde = PI - 0.5 * omega;
    let e = PeriodizedSinc::new(2.0 * m as f64, 0.0)?.eval(tilde);
    let ln = -2.0 * k as f64 * std::f64::consts::LN_2 - ln_sqrt_2pi()
        + m as f64 * (2.0 * q.sin().abs().ln() - q.abs().ln())
        - k as f64 * q.abs().ln()
        + e.ln();
    Ok(ln.exp())
}
