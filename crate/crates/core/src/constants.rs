//! Favard constants, the transcendental constants of the large-order spline
//! asymptotics, sharp spline Bernstein constants and the leading-order
//! predictions for norms, limits and geometric rates.

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::OnceLock;

use thiserror::Error;

use crate::numerics::{
    find_root_bracketed, hurwitz_tail, sum_alternating_series, Interval, NumericsError,
};

pub const DEFAULT_FAVARD_MAX: usize = 200;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConstantsError {
    #[error("derivative order k = {k} must satisfy 1 <= k < m = {m}")]
    OrderOutOfRange { m: usize, k: usize },
    #[error("step h must be positive")]
    ZeroStep,
    #[error("exponent p = {0} must lie in (1, inf)")]
    InvalidExponent(f64),
    #[error("{0}")]
    OutOfDomain(String),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

pub type Result<T> = std::result::Result<T, ConstantsError>;

fn check_p(p: f64) -> Result<()> {
    if p > 1.0 && p.is_finite() {
        Ok(())
    } else {
        Err(ConstantsError::InvalidExponent(p))
    }
}

/// `K_j = (4/pi) sum_l (-1)^{l(j+1)} (2l+1)^{-(j+1)}`.
///
/// `j >= 1` goes through Hurwitz tails: odd `j` is `2^{-s} zeta(s, 1/2)` and
/// even `j` is `4^{-s} (zeta(s, 1/4) - zeta(s, 3/4))` with `s = j + 1`.
pub fn favard(j: usize) -> f64 {
    let s = (j + 1) as f64;
    let sum = match j {
        0 => {
            sum_alternating_series(
                |l| if l % 2 == 0 { 1.0 } else { -1.0 } / (2 * l + 1) as f64,
                1e-16,
            )
            .map(|r| r.value)
            .unwrap_or(PI / 4.0)
        }
        // Beyond this the first term alone is exact in double precision.
        _ if j > 60 => 1.0,
        _ if j % 2 == 1 => 1.0 + 2f64.powf(-s) * hurwitz_tail(0.5, s, 1),
        _ => {
            let q = 4f64.powf(-s);
            1.0 + q * (hurwitz_tail(0.25, s, 1) - hurwitz_tail(0.75, s, 0))
        }
    };
    4.0 / PI * sum
}

/// Favard constants `K_0..=K_max`, computed once.
#[derive(Debug, Clone, PartialEq)]
pub struct FavardTable {
    values: Vec<f64>,
}

impl FavardTable {
    pub fn new(j_max: usize) -> Self {
        Self {
            values: (0..=j_max).map(favard).collect(),
        }
    }

    /// Shared table up to [`DEFAULT_FAVARD_MAX`].
    pub fn shared() -> &'static FavardTable {
        static TABLE: OnceLock<FavardTable> = OnceLock::new();
        TABLE.get_or_init(|| FavardTable::new(DEFAULT_FAVARD_MAX))
    }

    pub fn j_max(&self) -> usize {
        self.values.len() - 1
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `K_j`, falling back to direct evaluation past the table.
    pub fn get(&self, j: usize) -> f64 {
        self.values.get(j).copied().unwrap_or_else(|| favard(j))
    }
}

fn k(j: usize) -> f64 {
    FavardTable::shared().get(j)
}

/// Peak locations, peak values and log-curvatures governing the large-`m`
/// behavior of the B-spline and spline-wavelet spectra.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplineAsymptoticConstants {
    /// Maximizer of `sin^2(x)/x` on `(0, pi)`.
    pub phi_peak: f64,
    /// `sin^2(phi_peak)/phi_peak`.
    pub phi_peak_value: f64,
    /// `-1/2` times the second derivative of `ln(sin^2 x / x)` at the peak.
    pub phi_curvature: f64,
    /// Maximizer of `g(u) = cos^2(u) sin^2(u) / ((pi/2 - u) u^2)` on
    /// `(0, pi/2)`.
    pub psi_peak: f64,
    /// `g(psi_peak)`.
    pub psi_peak_value: f64,
    /// `-1/2` times the second derivative of `ln g` at the peak.
    pub psi_curvature: f64,
}

/// `2 cot x - 1/x`, the stationarity condition of `sin^2(x)/x`.
pub fn phi_peak_equation(x: f64) -> f64 {
    2.0 / x.tan() - 1.0 / x
}

/// `(2 pi u - 4u^2) cos 2u + (3u - pi) sin 2u`, proportional to `(ln g)'`.
pub fn psi_peak_equation(u: f64) -> f64 {
    (2.0 * PI * u - 4.0 * u * u) * (2.0 * u).cos() + (3.0 * u - PI) * (2.0 * u).sin()
}

fn psi_profile(u: f64) -> f64 {
    let (s, c) = u.sin_cos();
    (c * c * s * s) / ((FRAC_PI_2 - u) * u * u)
}

fn first_sign_change<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, steps: usize) -> Result<Interval> {
    let h = (hi - lo) / steps as f64;
    let mut a = lo;
    let mut fa = f(a);
    for i in 1..=steps {
        let b = lo + h * i as f64;
        let fb = f(b);
        if fa * fb <= 0.0 {
            return Ok(Interval::new(a, b)?);
        }
        a = b;
        fa = fb;
    }
    Err(NumericsError::NoSignChange { lo, hi }.into())
}

pub fn spline_constants() -> Result<SplineAsymptoticConstants> {
    let tol = 1e-15;
    let bracket = first_sign_change(phi_peak_equation, 0.1, PI - 0.1, 64)?;
    let x = find_root_bracketed(phi_peak_equation, bracket, tol)?;
    let sx = x.sin();
    let phi_peak_value = sx * sx / x;
    // d^2/dx^2 ln(sin^2 x / x) = -2/sin^2 x + 1/x^2
    let phi_curvature = 1.0 / (sx * sx) - 0.5 / (x * x);

    // u = 0 is a double zero of the psi equation, so scan away from it.
    let bracket = first_sign_change(psi_peak_equation, 0.01, FRAC_PI_2 - 0.01, 256)?;
    let u = find_root_bracketed(psi_peak_equation, bracket, tol)?;
    let (su, cu) = u.sin_cos();
    let r = FRAC_PI_2 - u;
    let second = -2.0 / (cu * cu) - 2.0 / (su * su) + 1.0 / (r * r) + 2.0 / (u * u);
    Ok(SplineAsymptoticConstants {
        phi_peak: x,
        phi_peak_value,
        phi_curvature,
        psi_peak: u,
        psi_peak_value: psi_profile(u),
        psi_curvature: -0.5 * second,
    })
}

/// Cached [`spline_constants`]; the root brackets are fixed so this cannot
/// fail in practice.
pub fn shared_spline_constants() -> &'static SplineAsymptoticConstants {
    static CONSTS: OnceLock<SplineAsymptoticConstants> = OnceLock::new();
    CONSTS.get_or_init(|| spline_constants().expect("fixed brackets contain the roots"))
}

/// Sharp constant in `||s^(k)||_p <= C ||s||_p` for splines of order `m`
/// with knot spacing `1/h`: `(pi h)^k sqrt(K_{2(m-k)+1} / K_{2m+1})`.
pub fn spline_bernstein_constant(m: usize, k_order: usize, h: u32) -> Result<f64> {
    if k_order == 0 || k_order >= m {
        return Err(ConstantsError::OrderOutOfRange { m, k: k_order });
    }
    if h == 0 {
        return Err(ConstantsError::ZeroStep);
    }
    let ratio = k(2 * (m - k_order) + 1) / k(2 * m + 1);
    Ok((PI * h as f64).powi(k_order as i32) * ratio.sqrt())
}

/// Lower bound `(2 pi)^{-k} sqrt(K_{2(m+k)+1} / K_{2m+1})` for the
/// spline-wavelet constant.
pub fn spline_wavelet_lower_bound(m: usize, k_order: usize) -> f64 {
    let ratio = k(2 * (m + k_order) + 1) / k(2 * m + 1);
    (2.0 * PI).powi(-(k_order as i32)) * ratio.sqrt()
}

/// `((1 - 2^{1-pk}) / (pk - 1))^{1/p}`, the Daubechies wavelet factor.
fn daub_psi_factor(k_order: f64, p: f64) -> Result<f64> {
    let pk = p * k_order;
    if pk <= 1.0 {
        return Err(ConstantsError::OutOfDomain(format!(
            "p*k = {pk} must exceed 1 for the Daubechies wavelet limit"
        )));
    }
    Ok(((1.0 - 2f64.powf(1.0 - pk)) / (pk - 1.0)).powf(1.0 / p))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimitTarget {
    /// Daubechies scaling function with weight `|w|^{+k}`.
    DaubPhiMinusK,
    DaubPsiK,
    SplinePhiK,
    SplinePsiK,
    /// Ratio of the `+k` weighted Daubechies scaling norm to the
    /// `psi_order`-weighted wavelet norm.
    PhiPsiRatioDaub { psi_order: u32 },
    PhiPsiRatioSpline,
}

/// Large-`m` limit of the chosen constant.
pub fn predict_limit(target: LimitTarget, k_order: u32, p: f64) -> Result<f64> {
    check_p(p)?;
    let c = shared_spline_constants();
    let kf = k_order as f64;
    Ok(match target {
        LimitTarget::DaubPhiMinusK => PI.powf(kf) / (1.0 + p * kf).powf(1.0 / p),
        LimitTarget::DaubPsiK => {
            if k_order == 0 {
                1.0
            } else {
                PI.powf(-kf) * daub_psi_factor(kf, p)?
            }
        }
        LimitTarget::SplinePhiK => (2.0 * c.phi_peak).powf(-kf),
        LimitTarget::SplinePsiK => (2.0 * PI - 4.0 * c.psi_peak).powf(-kf),
        LimitTarget::PhiPsiRatioDaub { psi_order } => {
            let k2 = psi_order as f64;
            let pk2 = p * k2;
            if pk2 <= 1.0 {
                return Err(ConstantsError::OutOfDomain(format!(
                    "p*k2 = {pk2} must exceed 1 for the Daubechies ratio limit"
                )));
            }
            PI.powf(kf + k2) * (1.0 - 2f64.powf(1.0 - pk2)).powf(-1.0 / p)
                * ((p * kf + 1.0) / (pk2 - 1.0)).powf(1.0 / p)
        }
        LimitTarget::PhiPsiRatioSpline => {
            (c.phi_peak_value / (c.phi_peak * c.psi_peak_value.powi(2))).sqrt()
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RateTarget {
    /// `(C_{m,p}(psi^D_m))^{1/m}`.
    DaubGeom,
    /// `(C_{m,p}(psi^S_m))^{1/m}`.
    SplineGeom,
    /// Ratio of the two geometric rates.
    GeomRatio,
    /// `lim_k lim_m (C_k(psi^S)/C_k(psi^D))^{1/k}`.
    FixedKRatio,
}

pub fn predict_rate(target: RateTarget) -> f64 {
    let c = shared_spline_constants();
    match target {
        RateTarget::DaubGeom => 0.5,
        RateTarget::SplineGeom => 16.0 / (c.psi_peak_value * PI.powi(4)),
        RateTarget::GeomRatio => 32.0 / (c.psi_peak_value * PI.powi(4)),
        RateTarget::FixedKRatio => PI / (2.0 * PI - 4.0 * c.psi_peak),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormTarget {
    /// `||(iw)^{-k} N_m^||_p` for the B-spline.
    SplinePhi,
    /// `||(iw)^{-k} psi^S_m^||_p`.
    SplinePsi,
    /// `||(iw)^{-m} psi^S_m^||_p`; `k` is ignored.
    SplinePsiFullOrder,
    /// Limit of `||(iw)^{+k} phi^D_m^||_p`.
    DaubPhiMinusK,
    /// Limit of `||(iw)^{-k} psi^D_m^||_p`.
    DaubPsiK,
    /// Limit of `||(iw)^{-order} phi^D_m^||_p` for real `order < 1/p`.
    DaubPhiFractional { order: f64 },
}

/// Leading-order value of the norm, without the `1 + O(m^{-1/2})` factor.
pub fn predict_norm_leading(target: NormTarget, m: usize, k_order: u32, p: f64) -> Result<f64> {
    check_p(p)?;
    let c = shared_spline_constants();
    let kf = k_order as f64;
    let mf = m as f64;
    let base = (2.0 * PI).powf(1.0 / p - 0.5);
    let needs_m = || {
        if m == 0 {
            Err(ConstantsError::OutOfDomain("order m must be positive".into()))
        } else {
            Ok(())
        }
    };
    Ok(match target {
        NormTarget::SplinePhi => {
            needs_m()?;
            8f64.powf(1.0 / p)
                * (2.0 * PI).powf(-(1.0 - 1.0 / p) / 2.0)
                * (c.phi_curvature * mf * p).powf(-0.5 / p)
                * (2.0 * c.phi_peak).powf(-kf)
                * (c.phi_peak_value / c.phi_peak).powf(mf / 2.0)
        }
        NormTarget::SplinePsi => {
            needs_m()?;
            2f64.powf(3.0 / p)
                * (2.0 * PI).powf(-(1.0 - 1.0 / p) / 2.0)
                * (2.0 * PI - 4.0 * c.psi_peak).powf(-kf)
                * (2.0 * c.psi_curvature * mf * p).powf(-0.5 / p)
                * c.psi_peak_value.powf(mf)
        }
        NormTarget::SplinePsiFullOrder => {
            needs_m()?;
            2f64.powf(1.0 / p)
                * (2.0 * PI).powf(-(1.0 - 1.0 / p) / 2.0)
                * (PI / (PI * PI - 8.0).sqrt()).powf(1.0 / p)
                * (2.0 * mf * p).powf(-0.5 / p)
                * (16.0 / PI.powi(4)).powf(mf)
        }
        NormTarget::DaubPhiMinusK => PI.powf(kf) * base / (1.0 + p * kf).powf(1.0 / p),
        NormTarget::DaubPsiK => {
            if k_order == 0 {
                return Err(ConstantsError::OutOfDomain(
                    "the Daubechies wavelet limit needs k >= 1".into(),
                ));
            }
            base * PI.powf(-kf) * daub_psi_factor(kf, p)?
        }
        NormTarget::DaubPhiFractional { order } => {
            let gap = 1.0 - p * order;
            if !(gap > 0.0) {
                return Err(ConstantsError::OutOfDomain(format!(
                    "1 - p*order = {gap} must be positive"
                )));
            }
            PI.powf(-order) * base / gap.powf(1.0 / p)
        }
    })
}
