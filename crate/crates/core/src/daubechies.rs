//! Daubechies orthonormal masks and the magnitudes of their scaling and
//! wavelet spectra.
//!
//! All norm computations need only `|a^(w)|^2`, which has the closed form
//! `cos^{2m}(w/2) sum_{nu<m} C(m-1+nu, nu) sin^{2nu}(w/2)`; the mask itself
//! is only built by spectral factorization when coefficients are asked for.

use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

use crate::numerics::{
    integrate, poly_complex_roots, Interval, NumericsError, PolynomialReal, QuadratureOptions,
};
use crate::splines::ln_sqrt_2pi;

pub const MAX_MASK_ORDER: usize = 20;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DaubechiesError {
    #[error("order m = {m} is invalid, need 1 <= m <= {max}")]
    InvalidOrder { m: usize, max: usize },
    #[error("tolerance must be positive, got {0}")]
    InvalidTolerance(f64),
    #[error("spectral factorization for m = {m} is ill-conditioned: reconstruction defect {defect:e}")]
    Factorization { m: usize, defect: f64 },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

pub type Result<T> = std::result::Result<T, DaubechiesError>;

fn check_order(m: usize, max: usize) -> Result<()> {
    if m == 0 || m > max {
        Err(DaubechiesError::InvalidOrder { m, max })
    } else {
        Ok(())
    }
}

/// `c_m = Gamma(m + 1/2) / (sqrt(pi) Gamma(m))`, normalizing
/// `c_m int_0^pi sin^{2m-1} = 1`.
pub fn integral_form_constant(m: usize) -> f64 {
    (1..m).fold(0.5, |c, j| c * (2 * j + 1) as f64 / (2 * j) as f64)
}

/// Closed-form `|a^(w)|^2` and its complement `|a^(w + pi)|^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolSquared {
    m: usize,
    binom: Vec<f64>,
    c_m: f64,
}

impl SymbolSquared {
    pub fn new(m: usize) -> Result<Self> {
        check_order(m, usize::MAX)?;
        let mut binom = Vec::with_capacity(m);
        let mut b = 1.0;
        for nu in 0..m {
            binom.push(b);
            b *= (m + nu) as f64 / (nu + 1) as f64;
        }
        Ok(Self {
            m,
            binom,
            c_m: integral_form_constant(m),
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    fn poly(&self, x: f64) -> f64 {
        self.binom.iter().rev().fold(0.0, |acc, &b| acc * x + b)
    }

    pub fn eval(&self, omega: f64) -> f64 {
        // Near the origin the direct form rounds above 1.
        let comp = self.complement(omega);
        if comp < 0.5 {
            return 1.0 - comp;
        }
        let h = 0.5 * omega;
        let (s, c) = (h.sin().powi(2), h.cos().powi(2));
        c.powi(self.m as i32) * self.poly(s)
    }

    /// `1 - |a^(w)|^2`, computed as the positive sum `|a^(w + pi)|^2`.
    pub fn complement(&self, omega: f64) -> f64 {
        let h = 0.5 * omega;
        let (s, c) = (h.sin().powi(2), h.cos().powi(2));
        s.powi(self.m as i32) * self.poly(c)
    }

    /// `ln |a^(w)|`, accurate near `w = 0` where `|a^|` is within
    /// rounding of 1.
    pub fn ln_abs(&self, omega: f64) -> f64 {
        let comp = self.complement(omega);
        if comp < 0.5 {
            0.5 * (-comp).ln_1p()
        } else {
            0.5 * self.eval(omega).ln()
        }
    }

    /// Upper bound on `1 - |a^(theta)|^2` from the integral form:
    /// `c_m int_0^theta sin^{2m-1} <= c_m theta^{2m} / (2m)`.
    pub fn complement_bound(&self, theta: f64) -> f64 {
        self.c_m * theta.abs().powi(2 * self.m as i32) / (2 * self.m) as f64
    }

    /// Number of dyadic factors `|a^(2^-l w)|`, `l = 1..=L`, after which the
    /// remaining infinite product lies in `[1 - tol, 1]`.
    pub fn truncation_depth(&self, omega: f64, tol: f64) -> usize {
        let geometric = 1.0 / (1.0 - 0.25f64.powi(self.m as i32));
        let mut theta = 0.5 * omega.abs();
        let mut depth = 0;
        loop {
            let eps = self.complement_bound(theta) * geometric;
            // -ln prod_{j} |a^(theta_j)| <= sum eps_j once eps_0 <= 0.79.
            if eps <= tol && eps <= 0.79 {
                return depth;
            }
            depth += 1;
            theta *= 0.5;
        }
    }
}

/// `|a^(w)|^2` by the closed cosine/sine polynomial.
pub fn daub_symbol_squared(m: usize, omega: f64) -> Result<f64> {
    Ok(SymbolSquared::new(m)?.eval(omega))
}

/// `|a^(w)|^2` by the integral form `1 - c_m int_0^t sin^{2m-1}`, where
/// `t` is `w` folded into `[0, pi]`.
pub fn daub_symbol_squared_integral(m: usize, omega: f64) -> Result<f64> {
    check_order(m, usize::MAX)?;
    let mut t = omega.rem_euclid(2.0 * PI);
    if t > PI {
        t = 2.0 * PI - t;
    }
    if t == 0.0 {
        return Ok(1.0);
    }
    let c = integral_form_constant(m);
    let r = integrate(
        |x: f64| x.sin().powi(2 * m as i32 - 1),
        Interval::new(0.0, t)?,
        QuadratureOptions {
            abs_tol: 1e-15 / c,
            rel_tol: 1e-14,
            ..QuadratureOptions::default()
        },
    )?;
    Ok(1.0 - c * r.value)
}

/// `|phi^(w)|` for the Daubechies scaling function of order `m`:
/// `(2 pi)^{-1/2} prod_{l>=1} |a^(2^-l w)|`, truncated with the tail
/// certified to multiply the result by a factor in `[1 - tol, 1]`.
pub fn daub_phi_hat_magnitude(m: usize, omega: f64, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(DaubechiesError::InvalidTolerance(tol));
    }
    let sym = SymbolSquared::new(m)?;
    Ok(phi_hat_ln(&sym, omega, tol).exp())
}

/// `|psi^(w)| = (2 pi)^{-1/2} |a^(w/2 + pi)| prod_{l>=1} |a^(2^{-l-1} w)|`.
pub fn daub_psi_hat_magnitude(m: usize, omega: f64, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(DaubechiesError::InvalidTolerance(tol));
    }
    let sym = SymbolSquared::new(m)?;
    Ok(psi_hat_ln(&sym, omega, tol).exp())
}

pub(crate) fn phi_hat_ln(sym: &SymbolSquared, omega: f64, tol: f64) -> f64 {
    let depth = sym.truncation_depth(omega, tol);
    let mut acc = -ln_sqrt_2pi();
    let mut theta = 0.5 * omega;
    for _ in 0..depth {
        acc += sym.ln_abs(theta);
        if acc == f64::NEG_INFINITY {
            break;
        }
        theta *= 0.5;
    }
    acc
}

pub(crate) fn psi_hat_ln(sym: &SymbolSquared, omega: f64, tol: f64) -> f64 {
    let half = 0.5 * omega;
    0.5 * sym.complement(half).ln() + phi_hat_ln(sym, half, tol)
}

/// Real mask `a(0..2m)` normalized to `a^(0) = 1`, where
/// `a^(w) = sum a(nu) e^{-i nu w}`.
#[derive(Debug, Clone, PartialEq)]
pub struct DaubechiesMask {
    m: usize,
    coeffs: Vec<f64>,
}

impl DaubechiesMask {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn symbol(&self, omega: f64) -> Complex64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(nu, &a)| a * Complex64::from_polar(1.0, -(nu as f64) * omega))
            .sum()
    }

    pub fn symbol_squared(&self, omega: f64) -> f64 {
        self.symbol(omega).norm_sqr()
    }

    /// `| |a^(w)|^2 + |a^(w + pi)|^2 - 1 |`.
    pub fn qmf_defect(&self, omega: f64) -> f64 {
        (self.symbol_squared(omega) + self.symbol_squared(omega + PI) - 1.0).abs()
    }

    /// Complex `phi^(w)`. The phase of the omitted factors decays only
    /// linearly in the argument, so the product runs until
    /// `|a^(theta) - 1| <= tol / 2`.
    pub fn phi_hat(&self, omega: f64, tol: f64) -> Complex64 {
        let first_moment: f64 = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(nu, a)| nu as f64 * a.abs())
            .sum();
        let mut acc = Complex64::new(1.0 / (2.0 * PI).sqrt(), 0.0);
        let mut theta = 0.5 * omega;
        // |a^(theta) - 1| <= theta * sum nu |a(nu)|, and the omitted tail sums
        // to twice the first omitted term.
        while 2.0 * theta.abs() * first_moment > 0.5 * tol {
            acc *= self.symbol(theta);
            theta *= 0.5;
        }
        acc
    }

    /// Complex `psi^(w) = e^{-iw/2} conj(a^(w/2 + pi)) phi^(w/2)`.
    pub fn psi_hat(&self, omega: f64, tol: f64) -> Complex64 {
        let half = 0.5 * omega;
        Complex64::from_polar(1.0, -half) * self.symbol(half + PI).conj() * self.phi_hat(half, tol)
    }
}

/// Minimal-phase Daubechies mask with `m` vanishing moments.
///
/// `P(y) = sum_{nu<m} C(m-1+nu, nu) y^nu` is factored over the complex
/// numbers, each root is lifted through `y = (2 - z - 1/z)/4` and the root
/// of each reciprocal pair inside the unit disk is kept. The returned
/// coefficients are ordered so that the zeros of the transfer function
/// `sum a(nu) z^{-nu}` lie inside the closed unit disk.
pub fn daub_mask(m: usize) -> Result<DaubechiesMask> {
    check_order(m, MAX_MASK_ORDER)?;
    let sym = SymbolSquared::new(m)?;
    let mut poly = vec![Complex64::new(1.0, 0.0)];
    let mul_linear = |poly: &mut Vec<Complex64>, root: Complex64| {
        let mut next = vec![Complex64::new(0.0, 0.0); poly.len() + 1];
        for (i, &c) in poly.iter().enumerate() {
            next[i] -= c * root;
            next[i + 1] += c;
        }
        *poly = next;
    };
    for _ in 0..m {
        mul_linear(&mut poly, Complex64::new(-1.0, 0.0));
    }
    if m > 1 {
        let p = PolynomialReal::new(sym.binom.clone());
        for y in poly_complex_roots(&p)?.all() {
            let b = Complex64::new(2.0, 0.0) - 4.0 * y;
            let disc = (b * b - 4.0).sqrt();
            let big = if (b + disc).norm() >= (b - disc).norm() {
                0.5 * (b + disc)
            } else {
                0.5 * (b - disc)
            };
            mul_linear(&mut poly, big.inv());
        }
    }
    let at_one: Complex64 = poly.iter().sum();
    let mut coeffs: Vec<f64> = poly.iter().map(|c| (c / at_one).re).collect();
    coeffs.reverse();
    let mask = DaubechiesMask { m, coeffs };

    let defect = (0..64)
        .map(|i| {
            let w = PI * i as f64 / 63.0;
            (mask.symbol_squared(w) - sym.eval(w)).abs()
        })
        .fold(0.0, f64::max);
    if !(defect <= 1e-8) {
        return Err(DaubechiesError::Factorization { m, defect });
    }
    Ok(mask)
}
