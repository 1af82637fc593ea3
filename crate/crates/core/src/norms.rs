//! Weighted `L_p` norms of wavelet spectra and the quantities built on them:
//! `C_{k,p}`, spline Bernstein checks, Fejer sharpness ratios, moment
//! orders, coefficient bounds and large-order sweeps.
//!
//! Spline spectra are integrated exactly over one period after folding the
//! real line onto `[-pi, pi]`: every spline integrand is a `2 pi`-periodic
//! factor times a power of `|sinc|` and of `|w|`, and the lattice sum of the
//! latter is [`PeriodizedSinc`]. Other spectra go through an octave engine
//! that integrates `[2^j s, 2^{j+1} s]` one octave at a time and closes
//! the sum with a geometric tail fitted to the last octaves.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::constants::{
    self, predict_limit, predict_norm_leading, predict_rate, ConstantsError, LimitTarget,
    NormTarget, RateTarget,
};
use crate::daubechies::{self, daub_mask, DaubechiesError, SymbolSquared};
use crate::numerics::{
    integrate_breakpoints, NumericsError, PeriodizedSinc, QuadratureOptions,
};
use crate::splines::{
    bspline_ft_log_magnitude, ln_sqrt_2pi, spline_wavelet, spline_wavelet_weighted_magnitude,
    SplineError,
};

const MAX_OCTAVES: usize = 18;
const MAX_BREAKPOINTS_PER_OCTAVE: usize = 4096;
const GRADED_LEVELS: i32 = 60;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NormsError {
    #[error("exponent p = {0} must lie in (1, inf)")]
    InvalidExponent(f64),
    #[error("tolerance must be positive, got {0}")]
    InvalidTolerance(f64),
    #[error("order m = {0} must be positive")]
    InvalidOrder(usize),
    #[error("k = {k} exceeds the {m} vanishing moments")]
    TooManyDerivatives { k: u32, m: usize },
    #[error("integrand is not integrable: {0}")]
    Nonintegrable(String),
    #[error("tolerance not met: estimate {value:e} has relative error {rel_error:e}")]
    ToleranceNotMet { value: f64, rel_error: f64 },
    #[error("log-log slope fit is unreliable (residual {residual:e})")]
    SlopeFit { residual: f64 },
    #[error("{0}")]
    InvalidInput(String),
    #[error("m = {m}: {source}")]
    AtOrder {
        m: usize,
        #[source]
        source: Box<NormsError>,
    },
    #[error(transparent)]
    Constants(#[from] ConstantsError),
    #[error(transparent)]
    Spline(#[from] SplineError),
    #[error(transparent)]
    Daubechies(#[from] DaubechiesError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

pub type Result<T> = std::result::Result<T, NormsError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    Spline,
    Daubechies,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Part {
    Phi,
    Psi,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Spline => "spline",
            Family::Daubechies => "daubechies",
        })
    }
}

impl FromStr for Family {
    type Err = NormsError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "spline" => Ok(Family::Spline),
            "daubechies" => Ok(Family::Daubechies),
            _ => Err(NormsError::InvalidInput(format!("unknown family '{s}'"))),
        }
    }
}

impl fmt::Display for Part {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Part::Phi => "phi",
            Part::Psi => "psi",
        })
    }
}

impl FromStr for Part {
    type Err = NormsError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "phi" => Ok(Part::Phi),
            "psi" => Ok(Part::Psi),
            _ => Err(NormsError::InvalidInput(format!("unknown part '{s}'"))),
        }
    }
}

/// `(int |w|^{alpha p} |f^(w)|^p dw)^{1/p}` for a family member.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedNormQuery {
    pub family: Family,
    pub part: Part,
    pub m: usize,
    pub alpha: f64,
    pub p: f64,
    pub tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormEstimate {
    pub value: f64,
    pub rel_error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CkpResult {
    pub numerator: f64,
    pub denominator: f64,
    pub ratio: f64,
    pub certified_rel_error: f64,
}

fn check_p_tol(p: f64, tol: f64) -> Result<()> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(NormsError::InvalidExponent(p));
    }
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(NormsError::InvalidTolerance(tol));
    }
    Ok(())
}

/// A spectrum magnitude `w -> |f^(w)|`, evaluated in the log domain.
pub trait SpectrumMagnitude: Sync {
    /// `ln |f^(w)|`; `-inf` at zeros.
    fn ln_magnitude(&self, omega: f64) -> f64;

    /// `nu` with `|f^(w)| ~ |w|^nu` as `w -> 0`.
    fn origin_order(&self) -> f64 {
        0.0
    }

    /// `s` with `|f^(w)| <= C |w|^{-s}` at infinity, when known.
    fn decay_order(&self) -> Option<f64> {
        None
    }

    /// Spacing of the regular zeros, used as quadrature breakpoints.
    fn zero_spacing(&self) -> Option<f64> {
        None
    }

    /// Whether `|f^(-w)| = |f^(w)|`.
    fn symmetric(&self) -> bool {
        true
    }

    /// Frequency at which the octave decomposition starts.
    fn scale(&self) -> f64 {
        PI
    }
}

/// Closed-form B-spline and spline-wavelet spectra.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplineSpectrum {
    pub part: Part,
    pub m: usize,
}

impl SpectrumMagnitude for SplineSpectrum {
    fn ln_magnitude(&self, omega: f64) -> f64 {
        match self.part {
            Part::Phi => bspline_ft_log_magnitude(self.m, omega),
            Part::Psi => spline_wavelet_weighted_magnitude(self.m, 0, omega)
                .map(f64::ln)
                .unwrap_or(f64::NEG_INFINITY),
        }
    }
    fn origin_order(&self) -> f64 {
        match self.part {
            Part::Phi => 0.0,
            Part::Psi => self.m as f64,
        }
    }
    fn decay_order(&self) -> Option<f64> {
        Some(self.m as f64)
    }
    fn zero_spacing(&self) -> Option<f64> {
        Some(match self.part {
            Part::Phi => 2.0 * PI,
            Part::Psi => 4.0 * PI,
        })
    }
}

/// Daubechies spectra through the truncated infinite product.
#[derive(Debug, Clone, PartialEq)]
pub struct DaubechiesSpectrum {
    part: Part,
    symbol: SymbolSquared,
    product_tol: f64,
}

impl DaubechiesSpectrum {
    pub fn new(part: Part, m: usize, product_tol: f64) -> Result<Self> {
        if !(product_tol > 0.0) {
            return Err(NormsError::InvalidTolerance(product_tol));
        }
        Ok(Self {
            part,
            symbol: SymbolSquared::new(m)?,
            product_tol,
        })
    }
}

impl SpectrumMagnitude for DaubechiesSpectrum {
    fn ln_magnitude(&self, omega: f64) -> f64 {
        match self.part {
            Part::Phi => daubechies::phi_hat_ln(&self.symbol, omega, self.product_tol),
            Part::Psi => daubechies::psi_hat_ln(&self.symbol, omega, self.product_tol),
        }
    }
    fn origin_order(&self) -> f64 {
        match self.part {
            Part::Phi => 0.0,
            Part::Psi => self.symbol.m() as f64,
        }
    }
    fn zero_spacing(&self) -> Option<f64> {
        Some(2.0 * PI)
    }
}

/// `amplitude * |f^(dilation * w)|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledSpectrum<S> {
    pub inner: S,
    pub dilation: f64,
    pub amplitude: f64,
}

impl<S: SpectrumMagnitude> SpectrumMagnitude for ScaledSpectrum<S> {
    fn ln_magnitude(&self, omega: f64) -> f64 {
        self.amplitude.ln() + self.inner.ln_magnitude(self.dilation * omega)
    }
    fn origin_order(&self) -> f64 {
        self.inner.origin_order()
    }
    fn decay_order(&self) -> Option<f64> {
        self.inner.decay_order()
    }
    fn zero_spacing(&self) -> Option<f64> {
        self.inner.zero_spacing().map(|s| s / self.dilation)
    }
    fn symmetric(&self) -> bool {
        self.inner.symmetric()
    }
    fn scale(&self) -> f64 {
        self.inner.scale() / self.dilation
    }
}

/// A spectrum given by a closure for `ln |f^(w)|`.
pub struct FnSpectrum<F> {
    pub ln_magnitude: F,
    pub origin_order: f64,
    pub symmetric: bool,
    pub scale: f64,
}

impl<F: Fn(f64) -> f64 + Sync> SpectrumMagnitude for FnSpectrum<F> {
    fn ln_magnitude(&self, omega: f64) -> f64 {
        (self.ln_magnitude)(omega)
    }
    fn origin_order(&self) -> f64 {
        self.origin_order
    }
    fn symmetric(&self) -> bool {
        self.symmetric
    }
    fn scale(&self) -> f64 {
        self.scale
    }
}

/// Breakpoints `0, s 2^{-L}, ..., s/2, s`, resolving power behavior at 0.
fn graded_points(scale: f64) -> Vec<f64> {
    graded_points_to(scale, GRADED_LEVELS)
}

fn graded_points_to(scale: f64, levels: i32) -> Vec<f64> {
    let mut pts = vec![0.0];
    pts.extend((0..=levels).rev().map(|i| scale * 0.5f64.powi(i)));
    pts
}

fn octave_points(lo: f64, hi: f64, spacing: Option<f64>) -> Vec<f64> {
    let by_zeros = spacing.map(|s| ((hi - lo) / s).ceil() as usize);
    match by_zeros {
        Some(n) if (1..=MAX_BREAKPOINTS_PER_OCTAVE).contains(&n) => {
            let s = spacing.unwrap();
            let first = (lo / s).floor() as i64 + 1;
            let mut pts = vec![lo];
            let mut i = first;
            loop {
                let x = s * i as f64;
                if x >= hi * (1.0 - 1e-15) {
                    break;
                }
                if x > lo * (1.0 + 1e-15) {
                    pts.push(x);
                }
                i += 1;
            }
            pts.push(hi);
            pts
        }
        _ => {
            let n = by_zeros.map_or(16, |n| n.clamp(16, MAX_BREAKPOINTS_PER_OCTAVE));
            (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect()
        }
    }
}

/// `int_0^inf g(w) dw` for nonnegative `g`, by octaves with a fitted
/// geometric tail. Returns the value and its estimated absolute error.
fn half_line_integral<G: Fn(f64) -> f64>(
    g: G,
    scale: f64,
    spacing: Option<f64>,
    tol: f64,
) -> Result<(f64, f64)> {
    let opts = QuadratureOptions {
        abs_tol: 0.0,
        rel_tol: tol / 4.0,
        max_panels: 1_000_000,
    };
    let inner = integrate_breakpoints(&g, &graded_points(scale), opts)?;
    let mut total = inner.value;
    let mut error = inner.error_estimate;
    let mut octaves: Vec<f64> = Vec::new();
    let mut previous_tail: Option<f64> = None;
    for j in 0..MAX_OCTAVES {
        let lo = scale * 2f64.powi(j as i32);
        let pts = octave_points(lo, 2.0 * lo, spacing);
        let opts = QuadratureOptions {
            abs_tol: tol * total / 64.0,
            ..opts
        };
        let r = integrate_breakpoints(&g, &pts, opts)?;
        total += r.value;
        error += r.error_estimate;
        octaves.push(r.value);
        if r.value == 0.0 {
            return Ok((total, error));
        }
        if j < 2 {
            continue;
        }
        let ratio = r.value / octaves[j - 1];
        if !(ratio < 1.0) {
            if j >= 6 {
                return Err(NormsError::Nonintegrable(format!(
                    "octave integrals grow by a factor {ratio:.4} near |w| = {lo:e}"
                )));
            }
            previous_tail = None;
            continue;
        }
        let tail = r.value * ratio / (1.0 - ratio);
        // The previous estimate predicted this octave plus everything after.
        let uncertainty = match previous_tail {
            Some(t) => (t - r.value - tail).abs(),
            None => tail,
        };
        previous_tail = Some(tail);
        let budget = tol * total / 8.0;
        if tail <= budget || (j >= 3 && uncertainty <= budget) {
            return Ok((total + tail, error + uncertainty.min(tail)));
        }
    }
    let tail = previous_tail.unwrap_or(f64::INFINITY);
    Err(NormsError::ToleranceNotMet {
        value: total,
        rel_error: tail / total,
    })
}

/// `(int |w|^{alpha p} |f^(w)|^p dw)^{1/p}` for any [`SpectrumMagnitude`].
pub fn weighted_norm_of<S: SpectrumMagnitude + ?Sized>(
    spectrum: &S,
    alpha: f64,
    p: f64,
    tol: f64,
) -> Result<NormEstimate> {
    check_p_tol(p, tol)?;
    let g = alpha * p;
    let at_origin = (spectrum.origin_order() + alpha) * p;
    if !(at_origin > -1.0) {
        return Err(NormsError::Nonintegrable(format!(
            "|w|^{at_origin} at the origin: need (moment order + alpha) p > -1"
        )));
    }
    if let Some(s) = spectrum.decay_order() {
        if !((s - alpha) * p > 1.0) {
            return Err(NormsError::Nonintegrable(format!(
                "decay |w|^{} at infinity: need (decay - alpha) p > 1",
                -(s - alpha) * p
            )));
        }
    }
    let integrand = |sign: f64| {
        move |w: f64| {
            if w == 0.0 {
                return 0.0;
            }
            let l = spectrum.ln_magnitude(sign * w);
            if l == f64::NEG_INFINITY {
                0.0
            } else {
                (g * w.ln() + p * l).exp()
            }
        }
    };
    let (mut value, mut error) =
        half_line_integral(integrand(1.0), spectrum.scale(), spectrum.zero_spacing(), tol)?;
    if spectrum.symmetric() {
        value *= 2.0;
        error *= 2.0;
    } else {
        let (v, e) =
            half_line_integral(integrand(-1.0), spectrum.scale(), spectrum.zero_spacing(), tol)?;
        value += v;
        error += e;
    }
    finish_norm(value.ln(), value, error, p, tol)
}

fn finish_norm(ln_scaled: f64, integral: f64, abs_error: f64, p: f64, tol: f64) -> Result<NormEstimate> {
    if !(integral > 0.0) {
        return Err(NormsError::InvalidInput("spectrum vanishes identically".into()));
    }
    let rel_error = abs_error / integral / p;
    let value = (ln_scaled / p).exp();
    if rel_error > tol {
        return Err(NormsError::ToleranceNotMet { value, rel_error });
    }
    Ok(NormEstimate { value, rel_error })
}

/// `int_{-pi}^{pi} |P(theta)|^p S(theta) d theta` for even `|P|`, with
/// `ln_weight = p ln |P|`. Returns value and absolute error.
fn circle_integral<F: Fn(f64) -> f64>(
    ln_weight: F,
    lattice: PeriodizedSinc,
    tol: f64,
) -> Result<(f64, f64)> {
    let f = |t: f64| {
        let s = lattice.eval(t);
        if s == 0.0 {
            return 0.0;
        }
        let lw = ln_weight(t);
        if lw == f64::NEG_INFINITY {
            0.0
        } else {
            (lw + s.ln()).exp()
        }
    };
    // Adaptive bisection resolves the endpoint behavior; the short graded
    // runs only seed it.
    let mut pts = graded_points_to(0.5 * PI, 12);
    pts.extend((1..=8).map(|i| PI * (1.0 - 0.5f64.powi(i + 1))));
    pts.push(PI);
    let opts = QuadratureOptions {
        abs_tol: 0.0,
        rel_tol: tol,
        max_panels: 1_000_000,
    };
    let r = integrate_breakpoints(f, &pts, opts)?;
    Ok((2.0 * r.value, 2.0 * r.error_estimate))
}

fn lattice_for(sinc_power: f64, weight_power: f64) -> Result<PeriodizedSinc> {
    if !(weight_power > -1.0) {
        return Err(NormsError::Nonintegrable(format!(
            "|w|^{weight_power} at the origin: need exponent > -1"
        )));
    }
    if !(sinc_power - weight_power > 1.0) {
        return Err(NormsError::Nonintegrable(format!(
            "decay |w|^{} at infinity: need exponent < -1",
            weight_power - sinc_power
        )));
    }
    Ok(PeriodizedSinc::new(sinc_power, weight_power)?)
}

/// `ln |Q(theta)|` for the spline-wavelet symbol, `|Q| = 2^{1-m} A_m(theta + pi)`.
fn spline_symbol_ln(autocorrelation: &PeriodizedSinc, m: usize, theta: f64) -> f64 {
    (1.0 - m as f64) * std::f64::consts::LN_2 + autocorrelation.eval(theta + PI).ln()
}

fn spline_norm(part: Part, m: usize, alpha: f64, p: f64, tol: f64) -> Result<NormEstimate> {
    let mf = m as f64;
    match part {
        Part::Phi => {
            let lattice = lattice_for(mf * p, alpha * p)?;
            let (i, e) = circle_integral(|_| 0.0, lattice, tol)?;
            finish_norm(-p * ln_sqrt_2pi() + i.ln(), i, e, p, tol)
        }
        Part::Psi => {
            // w = 2 theta folds |w|^{alpha p} |psi^(w)|^p onto |Q|^p times
            // the lattice sum of |sinc(t/2)|^{2mp} |t|^{(m + alpha) p}.
            let lattice = lattice_for(2.0 * mf * p, (mf + alpha) * p)?;
            let auto = PeriodizedSinc::new(2.0 * mf, 0.0)?;
            let (i, e) = circle_integral(|t| p * spline_symbol_ln(&auto, m, t), lattice, tol)?;
            let ln_pre = ((alpha - 1.0) * p + 1.0) * std::f64::consts::LN_2 - p * ln_sqrt_2pi();
            finish_norm(ln_pre + i.ln(), i, e, p, tol)
        }
    }
}

pub fn weighted_lp_norm(q: &WeightedNormQuery) -> Result<NormEstimate> {
    check_p_tol(q.p, q.tol)?;
    if q.m == 0 {
        return Err(NormsError::InvalidOrder(0));
    }
    match q.family {
        Family::Spline => spline_norm(q.part, q.m, q.alpha, q.p, q.tol),
        Family::Daubechies => {
            let spectrum = DaubechiesSpectrum::new(q.part, q.m, q.tol / (8.0 * q.p))?;
            weighted_norm_of(&spectrum, q.alpha, q.p, q.tol)
        }
    }
}

/// `C_{k,p}`: `||(iw)^{-k} psi^||_p / ||psi^||_p` for wavelets and
/// `||(iw)^{+k} phi^||_p / ||phi^||_p` for scaling functions.
pub fn ckp(family: Family, part: Part, m: usize, k: u32, p: f64, tol: f64) -> Result<CkpResult> {
    if part == Part::Psi && k as usize > m {
        return Err(NormsError::TooManyDerivatives { k, m });
    }
    let alpha = match part {
        Part::Psi => -(k as f64),
        Part::Phi => k as f64,
    };
    let query = |alpha| WeightedNormQuery {
        family,
        part,
        m,
        alpha,
        p,
        tol,
    };
    let den = weighted_lp_norm(&query(0.0))?;
    if k == 0 {
        return Ok(CkpResult {
            numerator: den.value,
            denominator: den.value,
            ratio: 1.0,
            certified_rel_error: 0.0,
        });
    }
    let num = weighted_lp_norm(&query(alpha))?;
    Ok(CkpResult {
        numerator: num.value,
        denominator: den.value,
        ratio: num.value / den.value,
        certified_rel_error: num.rel_error + den.rel_error,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BernsteinCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Checks `||s^(k)||_p <= C ||s||_p` for `s(x) = sum c_nu N_m(h x - nu)`,
/// both sides evaluated in the frequency domain.
pub fn verify_bernstein_spline(
    m: usize,
    k: usize,
    h: u32,
    p: f64,
    coeffs: &[f64],
    tol: f64,
) -> Result<BernsteinCheck> {
    check_p_tol(p, tol)?;
    let constant = constants::spline_bernstein_constant(m, k, h)?;
    if coeffs.is_empty() || coeffs.iter().all(|&c| c == 0.0) {
        return Err(NormsError::InvalidInput("coefficient sequence is zero".into()));
    }
    if coeffs.iter().any(|c| !c.is_finite()) {
        return Err(NormsError::InvalidInput("coefficients must be finite".into()));
    }
    let symbol_ln = |t: f64| {
        let c: Complex64 = coeffs
            .iter()
            .enumerate()
            .map(|(nu, &c)| c * Complex64::from_polar(1.0, -(nu as f64) * t))
            .sum();
        p * c.norm().ln()
    };
    let mf = m as f64;
    let kf = k as f64;
    let (num, _) = circle_integral(symbol_ln, lattice_for(mf * p, kf * p)?, tol)?;
    let (den, _) = circle_integral(symbol_ln, lattice_for(mf * p, 0.0)?, tol)?;
    // s^(w) = h^{-1} c^(w/h) N_m^(w/h): rescaling w pulls out h^{k + 1/p - 1}
    // on the left and h^{1/p - 1} on the right.
    let hf = h as f64;
    let ln_base = -ln_sqrt_2pi();
    let lhs = (ln_base + num.ln() / p + (kf + 1.0 / p - 1.0) * hf.ln()).exp();
    let norm = (ln_base + den.ln() / p + (1.0 / p - 1.0) * hf.ln()).exp();
    let rhs = constant * norm;
    Ok(BernsteinCheck {
        lhs,
        rhs,
        holds: lhs <= rhs * (1.0 + 4.0 * tol),
    })
}

/// Fejer kernel `(1/(j+1)) (sin((j+1)x/2) / sin(x/2))^2`, of unit mean.
pub fn fejer_kernel(j: u32, x: f64) -> f64 {
    let n = (j + 1) as f64;
    let s = (0.5 * x).sin();
    if s.abs() < 1e-12 {
        // Even expansion around the peak, exact to rounding at this size.
        let xr = x - 2.0 * PI * (x / (2.0 * PI)).round();
        return n * (1.0 - (n * n - 1.0) * xr * xr / 12.0);
    }
    let r = (0.5 * n * x).sin() / s;
    r * r / n
}

/// `||w s_j^||_p / ||s_j^||_p` for the spline with `|c^|^p = Phi_j(. - pi)/(2 pi)`.
pub fn fejer_extremal_ratio(m: usize, p: f64, j: u32, tol: f64) -> Result<f64> {
    check_p_tol(p, tol)?;
    if m < 2 || j == 0 {
        return Err(NormsError::InvalidInput(format!(
            "need m >= 2 and j >= 1, got m = {m}, j = {j}"
        )));
    }
    let weight = |t: f64| (fejer_kernel(j, t - PI) / (2.0 * PI)).ln();
    let mf = m as f64;
    let (num, _) = circle_integral(weight, lattice_for(mf * p, p)?, tol)?;
    let (den, _) = circle_integral(weight, lattice_for(mf * p, 0.0)?, tol)?;
    Ok((num / den).powf(1.0 / p))
}

/// `j -> inf` limit of [`fejer_extremal_ratio`]: the kernel concentrates at
/// `theta = pi`, leaving the ratio of the two lattice sums there.
pub fn fejer_limit_ratio(m: usize, p: f64) -> Result<f64> {
    check_p_tol(p, 1.0)?;
    let mf = m as f64;
    let num = lattice_for(mf * p, p)?.eval(PI);
    let den = lattice_for(mf * p, 0.0)?.eval(PI);
    Ok((num / den).powf(1.0 / p))
}

fn psi_ln_magnitude(family: Family, m: usize, tol: f64) -> Result<Box<dyn Fn(f64) -> f64 + Sync>> {
    Ok(match family {
        Family::Spline => {
            spline_wavelet_weighted_magnitude(m, 0, 1.0)?;
            Box::new(move |w| {
                spline_wavelet_weighted_magnitude(m, 0, w)
                    .map(f64::ln)
                    .unwrap_or(f64::NEG_INFINITY)
            })
        }
        Family::Daubechies => {
            let s = DaubechiesSpectrum::new(Part::Psi, m, tol)?;
            Box::new(move |w| s.ln_magnitude(w))
        }
    })
}

/// Order of the zero of `psi^` at the origin, from the log-log slope of
/// `|psi^|` on `w = 2^-4 .. 2^-12`.
pub fn vanishing_moment_order(family: Family, m: usize, tol: f64) -> Result<usize> {
    if m == 0 {
        return Err(NormsError::InvalidOrder(0));
    }
    if !(tol > 0.0) {
        return Err(NormsError::InvalidTolerance(tol));
    }
    let ln_mag = psi_ln_magnitude(family, m, 1e-14)?;
    let pts: Vec<(f64, f64)> = (4..=12)
        .map(|e| {
            let w = 0.5f64.powi(e);
            (w.ln(), ln_mag(w))
        })
        .collect();
    let (slope, intercept) = least_squares(&pts);
    let residual = pts
        .iter()
        .map(|(x, y)| (y - slope * x - intercept).abs())
        .fold(0.0, f64::max);
    // O(w^2) corrections bend the log-log line slightly on this window.
    let off_integer = (slope - slope.round()).abs();
    if !(residual <= tol.max(1e-2) && off_integer <= 0.05) {
        return Err(NormsError::SlopeFit { residual: residual.max(off_integer) });
    }
    Ok(slope.round().max(0.0) as usize)
}

fn least_squares(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / n, sy / n);
    let (sxy, sxx) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| {
        (a + (x - mx) * (y - my), b + (x - mx) * (x - mx))
    });
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientBound {
    /// `|<f, psi_{j,nu}>|`.
    pub lhs: f64,
    /// `C_{k,p}(psi) 2^{-j(k + 1/p - 1/2)} ||psi^||_p ||(iw)^k f^||_{p'}`.
    pub rhs: f64,
    /// Exact Holder bound
    /// `||(iw)^k f^||_{p'} ||(iw)^{-k} psi_{j,nu}^||_p`, whose level
    /// scaling is `2^{-j(k + 1/2 - 1/p)}`.
    pub holder_rhs: f64,
    pub holds: bool,
}

/// Complex `psi^(w)` for a family member.
pub fn psi_spectrum(family: Family, m: usize, tol: f64) -> Result<Box<dyn Fn(f64) -> Complex64 + Sync>> {
    Ok(match family {
        Family::Spline => {
            let w = spline_wavelet(m)?;
            Box::new(move |x| w.spectrum(x))
        }
        Family::Daubechies => {
            let mask = daub_mask(m)?;
            Box::new(move |x| mask.psi_hat(x, tol))
        }
    })
}

/// `int_R g` for an integrable real `g`, by octaves on both half-lines
/// until the octave mass of `|g|` is negligible.
fn line_integral<G: Fn(f64) -> f64>(g: G, scale: f64, tol: f64) -> Result<f64> {
    let opts = QuadratureOptions {
        abs_tol: 0.0,
        rel_tol: tol / 4.0,
        max_panels: 1_000_000,
    };
    let mut value = 0.0;
    let mut mass = 0.0;
    for sign in [1.0, -1.0] {
        let h = |w: f64| g(sign * w);
        let habs = |w: f64| g(sign * w).abs();
        let pts = graded_points(scale);
        value += integrate_breakpoints(h, &pts, opts)?.value;
        mass += integrate_breakpoints(habs, &pts, opts)?.value;
        let mut quiet = 0;
        for j in 0..40 {
            let lo = scale * 2f64.powi(j);
            let pts = octave_points(lo, 2.0 * lo, Some(scale));
            let opts = QuadratureOptions {
                abs_tol: tol * mass / 64.0,
                ..opts
            };
            let v = integrate_breakpoints(h, &pts, opts)?.value;
            let a = integrate_breakpoints(habs, &pts, opts)?.value;
            value += v;
            mass += a;
            quiet = if a <= tol * mass / 1024.0 { quiet + 1 } else { 0 };
            if quiet >= 2 {
                break;
            }
        }
    }
    Ok(value)
}

/// Checks the wavelet-coefficient bound for `f` at level `j`, shift `nu`.
#[allow(clippy::too_many_arguments)]
pub fn coefficient_bound_check<F: Fn(f64) -> Complex64 + Sync>(
    f_hat: F,
    family: Family,
    m: usize,
    level: i32,
    shift: i64,
    k: u32,
    p: f64,
    tol: f64,
) -> Result<CoefficientBound> {
    check_p_tol(p, tol)?;
    let psi = psi_spectrum(family, m, tol * 1e-2)?;
    let dil = 2f64.powi(level);
    let psi_jn = |w: f64| {
        let x = w / dil;
        dil.powf(-0.5) * Complex64::from_polar(1.0, -(shift as f64) * x) * psi(x)
    };
    let scale = PI * dil;
    let re = line_integral(|w| (f_hat(w) * psi_jn(w).conj()).re, scale, tol)?;
    let im = line_integral(|w| (f_hat(w) * psi_jn(w).conj()).im, scale, tol)?;
    let lhs = re.hypot(im);

    let conj_p = p / (p - 1.0);
    let f_spec = FnSpectrum {
        ln_magnitude: |w: f64| f_hat(w).norm().ln(),
        origin_order: 0.0,
        symmetric: false,
        scale,
    };
    let f_norm = weighted_norm_of(&f_spec, k as f64, conj_p, tol)?.value;
    let c = ckp(family, Part::Psi, m, k, p, tol)?;
    let kf = k as f64;
    let printed_scaling = 2f64.powf(-(level as f64) * (kf + 1.0 / p - 0.5));
    let exact_scaling = 2f64.powf(-(level as f64) * (kf + 0.5 - 1.0 / p));
    let rhs = c.ratio * printed_scaling * c.denominator * f_norm;
    let holder_rhs = c.numerator * exact_scaling * f_norm;
    Ok(CoefficientBound {
        lhs,
        rhs,
        holder_rhs,
        holds: lhs <= rhs * (1.0 + tol),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SweepTarget {
    /// Measured weighted norm against its leading-order formula.
    Norm(NormTarget),
    /// Measured constant against its large-order limit.
    Limit(LimitTarget),
    /// Measured `m`-th root against its geometric rate.
    Rate(RateTarget),
}

#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticReport {
    pub m_grid: Vec<usize>,
    pub measured: Vec<f64>,
    pub predicted: Vec<f64>,
    pub rel_error: Vec<f64>,
    /// Slope of `ln rel_error` against `ln m`.
    pub fitted_decay_exponent: f64,
    /// Quadratic extrapolation in `m^{-1/2}` through the last three points.
    pub extrapolated: Option<f64>,
}

impl AsymptoticReport {
    pub fn from_measurements(m_grid: Vec<usize>, measured: Vec<f64>, predicted: Vec<f64>) -> Self {
        let rel_error: Vec<f64> = measured
            .iter()
            .zip(&predicted)
            .map(|(a, b)| (a - b).abs() / b.abs())
            .collect();
        let pts: Vec<(f64, f64)> = m_grid
            .iter()
            .zip(&rel_error)
            .filter(|(_, e)| **e > 0.0 && e.is_finite())
            .map(|(&m, e)| ((m as f64).ln(), e.ln()))
            .collect();
        let fitted_decay_exponent = if pts.len() >= 2 {
            least_squares(&pts).0
        } else {
            f64::NAN
        };
        let extrapolated = richardson_sqrt(&m_grid, &measured);
        Self {
            m_grid,
            measured,
            predicted,
            rel_error,
            fitted_decay_exponent,
            extrapolated,
        }
    }

    /// Relative distance of the extrapolated value from the last prediction.
    pub fn extrapolated_rel_error(&self) -> Option<f64> {
        let target = *self.predicted.last()?;
        self.extrapolated.map(|e| (e - target).abs() / target.abs())
    }
}

/// Value at `x = 0` of the quadratic through the last three
/// `(m^{-1/2}, value)` points.
pub fn richardson_sqrt(m_grid: &[usize], values: &[f64]) -> Option<f64> {
    let n = m_grid.len().min(values.len());
    if n < 3 {
        return None;
    }
    let xs: Vec<f64> = m_grid[n - 3..n].iter().map(|&m| (m as f64).powf(-0.5)).collect();
    let ys = &values[n - 3..n];
    let mut total = 0.0;
    for i in 0..3 {
        let mut basis = 1.0;
        for j in 0..3 {
            if i != j {
                basis *= xs[j] / (xs[j] - xs[i]);
            }
        }
        total += ys[i] * basis;
    }
    Some(total)
}

fn measure(target: SweepTarget, m: usize, k: u32, p: f64, tol: f64) -> Result<(f64, f64)> {
    let norm = |family, part, alpha: f64| {
        weighted_lp_norm(&WeightedNormQuery {
            family,
            part,
            m,
            alpha,
            p,
            tol,
        })
        .map(|n| n.value)
    };
    let kf = k as f64;
    let mu = m as u32;
    Ok(match target {
        SweepTarget::Norm(t) => {
            let measured = match t {
                NormTarget::SplinePhi => norm(Family::Spline, Part::Phi, -kf)?,
                NormTarget::SplinePsi => norm(Family::Spline, Part::Psi, -kf)?,
                NormTarget::SplinePsiFullOrder => norm(Family::Spline, Part::Psi, -(m as f64))?,
                NormTarget::DaubPhiMinusK => norm(Family::Daubechies, Part::Phi, kf)?,
                NormTarget::DaubPsiK => norm(Family::Daubechies, Part::Psi, -kf)?,
                NormTarget::DaubPhiFractional { order } => {
                    norm(Family::Daubechies, Part::Phi, -order)?
                }
            };
            (measured, predict_norm_leading(t, m, k, p)?)
        }
        SweepTarget::Limit(t) => {
            let measured = match t {
                LimitTarget::DaubPhiMinusK => ckp(Family::Daubechies, Part::Phi, m, k, p, tol)?.ratio,
                LimitTarget::DaubPsiK => ckp(Family::Daubechies, Part::Psi, m, k, p, tol)?.ratio,
                LimitTarget::SplinePhiK => ckp(Family::Spline, Part::Phi, m, k, p, tol)?.ratio,
                LimitTarget::SplinePsiK => ckp(Family::Spline, Part::Psi, m, k, p, tol)?.ratio,
                LimitTarget::PhiPsiRatioDaub { psi_order } => {
                    norm(Family::Daubechies, Part::Phi, kf)?
                        / norm(Family::Daubechies, Part::Psi, -(psi_order as f64))?
                }
                LimitTarget::PhiPsiRatioSpline => (norm(Family::Spline, Part::Phi, -kf)?
                    / norm(Family::Spline, Part::Psi, -kf)?)
                .powf(1.0 / m as f64),
            };
            (measured, predict_limit(t, k, p)?)
        }
        SweepTarget::Rate(t) => {
            let root = |family| -> Result<f64> {
                Ok(ckp(family, Part::Psi, m, mu, p, tol)?.ratio.powf(1.0 / m as f64))
            };
            let measured = match t {
                RateTarget::DaubGeom => root(Family::Daubechies)?,
                RateTarget::SplineGeom => root(Family::Spline)?,
                RateTarget::GeomRatio => root(Family::Spline)? / root(Family::Daubechies)?,
                RateTarget::FixedKRatio => {
                    if k == 0 {
                        return Err(NormsError::InvalidInput("the ratio rate needs k >= 1".into()));
                    }
                    (ckp(Family::Spline, Part::Psi, m, k, p, tol)?.ratio
                        / ckp(Family::Daubechies, Part::Psi, m, k, p, tol)?.ratio)
                        .powf(1.0 / kf)
                }
            };
            (measured, predict_rate(t))
        }
    })
}

/// Measures `target` on every `m` of an ascending grid, in parallel.
pub fn asymptotic_sweep(
    target: SweepTarget,
    k: u32,
    p: f64,
    m_grid: &[usize],
    tol: f64,
) -> Result<AsymptoticReport> {
    check_p_tol(p, tol)?;
    if m_grid.is_empty() || m_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(NormsError::InvalidInput("m grid must be nonempty and strictly ascending".into()));
    }
    let results: Vec<Result<(f64, f64)>> = m_grid
        .par_iter()
        .map(|&m| {
            measure(target, m, k, p, tol).map_err(|e| NormsError::AtOrder {
                m,
                source: Box::new(e),
            })
        })
        .collect();
    let mut measured = Vec::with_capacity(m_grid.len());
    let mut predicted = Vec::with_capacity(m_grid.len());
    for r in results {
        let (a, b) = r?;
        measured.push(a);
        predicted.push(b);
    }
    Ok(AsymptoticReport::from_measurements(m_grid.to_vec(), measured, predicted))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::{favard, spline_wavelet_lower_bound};

    fn q(family: Family, part: Part, m: usize, alpha: f64, p: f64) -> WeightedNormQuery {
        WeightedNormQuery {
            family,
            part,
            m,
            alpha,
            p,
            tol: 1e-9,
        }
    }

    #[test]
    fn box_function_parseval() {
        let n = weighted_lp_norm(&q(Family::Spline, Part::Phi, 1, 0.0, 2.0)).unwrap();
        assert!((n.value - 1.0).abs() < 1e-10, "{}", n.value);
    }

    #[test]
    fn spline_norm_against_midpoint_oracle() {
        // Dense midpoint rule on [-200, 200]; the tail beyond is below
        // int_200^inf (2/w)^{12} dw ~ 1e-23.
        let m = 4;
        let p = 3.0;
        let n = 2_000_000;
        let h = 400.0 / n as f64;
        let mut s = 0.0;
        for i in 0..n {
            let w = -200.0 + (i as f64 + 0.5) * h;
            s += (p * bspline_ft_log_magnitude(m, w)).exp();
        }
        let oracle = (s * h).powf(1.0 / p);
        let got = weighted_lp_norm(&q(Family::Spline, Part::Phi, m, 0.0, p)).unwrap();
        assert!((got.value - oracle).abs() < 1e-5 * oracle, "{} {}", got.value, oracle);
    }

    #[test]
    fn spline_psi_engine_matches_generic() {
        for (m, alpha, p) in [(2, -1.0, 2.0), (3, 0.0, 3.0), (4, -2.0, 1.5), (5, -5.0, 2.0)] {
            let a = weighted_lp_norm(&q(Family::Spline, Part::Psi, m, alpha, p)).unwrap();
            let b = weighted_norm_of(&SplineSpectrum { part: Part::Psi, m }, alpha, p, 1e-9).unwrap();
            assert!((a.value - b.value).abs() < 1e-7 * a.value, "{m}: {} {}", a.value, b.value);
        }
    }

    #[test]
    fn daubechies_parseval() {
        for m in [3, 6, 10] {
            for part in [Part::Phi, Part::Psi] {
                let mut query = q(Family::Daubechies, part, m, 0.0, 2.0);
                query.tol = 1e-7;
                let n = weighted_lp_norm(&query).unwrap();
                assert!((n.value - 1.0).abs() < 1e-6, "m={m} {part}: {}", n.value);
            }
        }
    }

    #[test]
    fn nonintegrable_is_reported() {
        assert!(matches!(
            weighted_lp_norm(&q(Family::Spline, Part::Phi, 3, -1.0, 2.0)),
            Err(NormsError::Nonintegrable(_))
        ));
        assert!(matches!(
            weighted_lp_norm(&q(Family::Spline, Part::Phi, 2, 2.0, 2.0)),
            Err(NormsError::Nonintegrable(_))
        ));
        assert!(matches!(
            ckp(Family::Spline, Part::Psi, 2, 3, 2.0, 1e-8),
            Err(NormsError::TooManyDerivatives { .. })
        ));
    }

    #[test]
    fn ckp_identity_and_lower_bound() {
        let c = ckp(Family::Spline, Part::Psi, 4, 0, 2.0, 1e-8).unwrap();
        assert_eq!(c.ratio, 1.0);
        for m in [1, 3, 6] {
            for k in 1..=3u32.min(m as u32) {
                let c = ckp(Family::Spline, Part::Psi, m, k, 2.0, 1e-8).unwrap();
                assert!(c.ratio >= spline_wavelet_lower_bound(m, k as usize) * (1.0 - 2e-8));
            }
        }
    }

    #[test]
    fn scaling_and_amplitude_invariance() {
        let base = SplineSpectrum { part: Part::Psi, m: 3 };
        let (alpha, p) = (-1.0, 2.5);
        let n0 = weighted_norm_of(&base, alpha, p, 1e-9).unwrap().value;
        let dilated = ScaledSpectrum { inner: base, dilation: 2.0, amplitude: 1.0 };
        let n1 = weighted_norm_of(&dilated, alpha, p, 1e-9).unwrap().value;
        let want = 2f64.powf(-alpha - 1.0 / p) * n0;
        assert!((n1 - want).abs() < 1e-6 * want);

        let amp = ScaledSpectrum { inner: base, dilation: 1.0, amplitude: 7.3 };
        let r0 = weighted_norm_of(&base, alpha, p, 1e-10).unwrap().value
            / weighted_norm_of(&base, 0.0, p, 1e-10).unwrap().value;
        let r1 = weighted_norm_of(&amp, alpha, p, 1e-10).unwrap().value
            / weighted_norm_of(&amp, 0.0, p, 1e-10).unwrap().value;
        assert!((r0 - r1).abs() < 1e-10 * r0);
    }

    #[test]
    fn bernstein_single_coefficient() {
        let r = verify_bernstein_spline(3, 1, 1, 2.0, &[1.0], 1e-9).unwrap();
        assert!(r.holds && r.lhs > 0.0);
        let h2 = verify_bernstein_spline(3, 1, 2, 2.0, &[1.0], 1e-9).unwrap();
        assert!((h2.lhs / h2.rhs - r.lhs / r.rhs).abs() < 1e-9);
        assert!(verify_bernstein_spline(3, 3, 1, 2.0, &[1.0], 1e-9).is_err());
        assert!(verify_bernstein_spline(3, 1, 1, 2.0, &[0.0], 1e-9).is_err());
    }

    #[test]
    fn fejer_ratio_behavior() {
        let limit = fejer_limit_ratio(2, 2.0).unwrap();
        // At p = 2 the limit is pi sqrt(K_1/K_3) = sqrt(12).
        assert!((limit - 12f64.sqrt()).abs() < 1e-10, "{limit}");
        let r1 = fejer_extremal_ratio(2, 2.0, 1, 1e-10).unwrap();
        let r8 = fejer_extremal_ratio(2, 2.0, 8, 1e-10).unwrap();
        let r64 = fejer_extremal_ratio(2, 2.0, 64, 1e-10).unwrap();
        assert!(0.0 < r1 && r1 < r8 && r8 < r64 && r64 < limit);
        assert!((r64 - 10f64.sqrt()).abs() < 0.1 * 10f64.sqrt());
        let bound = PI * (favard(3) / favard(5)).sqrt();
        assert!(r1 < bound);
        // Sharp value sits above the printed k=1 bound for m = 2.
        assert!(r64 > bound);
        for m in 4..7 {
            let lim = fejer_limit_ratio(m, 2.0).unwrap();
            assert!((lim - PI).abs() < 0.1, "{m}: {lim}");
        }
    }

    #[test]
    fn fejer_kernel_unit_mean() {
        for j in [1, 5, 30] {
            let n = 20_000;
            let h = 2.0 * PI / n as f64;
            let mean: f64 =
                (0..n).map(|i| fejer_kernel(j, -PI + (i as f64 + 0.5) * h)).sum::<f64>() * h / (2.0 * PI);
            assert!((mean - 1.0).abs() < 1e-10);
            assert!((fejer_kernel(j, 0.0) - (j + 1) as f64).abs() < 1e-12);
            assert!((fejer_kernel(j, 1e-13) - (j + 1) as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn moment_orders() {
        assert_eq!(vanishing_moment_order(Family::Spline, 1, 1e-6).unwrap(), 1);
        assert_eq!(vanishing_moment_order(Family::Spline, 5, 1e-6).unwrap(), 5);
        assert_eq!(vanishing_moment_order(Family::Daubechies, 3, 1e-6).unwrap(), 3);
    }

    #[test]
    fn richardson_is_exact_on_quadratics() {
        let grid = [4, 9, 16, 25];
        let vals: Vec<f64> = grid
            .iter()
            .map(|&m| {
                let x = (m as f64).powf(-0.5);
                2.0 + 3.0 * x - 5.0 * x * x
            })
            .collect();
        assert!((richardson_sqrt(&grid, &vals).unwrap() - 2.0).abs() < 1e-12);
        assert!(richardson_sqrt(&grid[..2], &vals[..2]).is_none());
    }

    #[test]
    fn sweep_reports_in_grid_order() {
        let grid = [5, 7, 9];
        let r = asymptotic_sweep(SweepTarget::Limit(LimitTarget::SplinePsiK), 1, 2.0, &grid, 1e-8).unwrap();
        assert_eq!(r.m_grid, grid);
        for (i, &m) in grid.iter().enumerate() {
            let c = ckp(Family::Spline, Part::Psi, m, 1, 2.0, 1e-8).unwrap().ratio;
            assert_eq!(r.measured[i], c);
        }
        assert!(asymptotic_sweep(SweepTarget::Limit(LimitTarget::SplinePsiK), 1, 2.0, &[5, 4], 1e-8).is_err());
    }

    #[test]
    fn coefficient_bound_gaussian() {
        let gauss = |w: f64| Complex64::new((-0.5 * w * w).exp() / (2.0 * PI).sqrt(), 0.0);
        let r = coefficient_bound_check(gauss, Family::Spline, 3, 0, 0, 2, 2.0, 1e-7).unwrap();
        assert!(r.holds && r.lhs <= r.holder_rhs * (1.0 + 1e-7));
        assert!((r.rhs - r.holder_rhs).abs() < 1e-9 * r.rhs);
    }
}
