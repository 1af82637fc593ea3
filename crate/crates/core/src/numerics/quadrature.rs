use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::{NumericsError, Result};

/// Closed integration interval with `lo < hi`, both finite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_finite() && hi.is_finite() && lo < hi {
            Ok(Self { lo, hi })
        } else {
            Err(NumericsError::InvalidInterval { lo, hi })
        }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub error_estimate: f64,
    pub panels: usize,
}

/// Stopping rule: the summed panel error must fall below
/// `max(abs_tol, rel_tol * |value|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_panels: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 0.0,
            max_panels: 100_000,
        }
    }
}

impl QuadratureOptions {
    pub fn absolute(tol: f64) -> Self {
        Self {
            abs_tol: tol,
            ..Self::default()
        }
    }

    pub fn relative(tol: f64) -> Self {
        Self {
            abs_tol: 0.0,
            rel_tol: tol,
            ..Self::default()
        }
    }
}

// 15-point Kronrod extension of the 7-point Gauss rule.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
    // Error estimate sits at the rounding floor; bisection cannot lower it.
    roundoff: bool,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.lo.total_cmp(&self.lo))
    }
}

fn kronrod_panel<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> Result<Panel> {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let eval = |x: f64| -> Result<f64> {
        let y = f(x);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(NumericsError::NonFiniteIntegrand(x))
        }
    };

    let fc = eval(center)?;
    let mut res_k = fc * WGK[7];
    let mut res_g = fc * WG[3];
    let mut res_abs = res_k.abs();
    let mut fv = [(0.0, 0.0); 7];
    for (j, node) in XGK.iter().take(7).enumerate() {
        let dx = half * node;
        let f1 = eval(center - dx)?;
        let f2 = eval(center + dx)?;
        fv[j] = (f1, f2);
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }

    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for (j, (f1, f2)) in fv.iter().enumerate() {
        res_asc += WGK[j] * ((f1 - mean).abs() + (f2 - mean).abs());
    }

    let scale = half.abs();
    let value = res_k * half;
    res_abs *= scale;
    res_asc *= scale;
    let mut error = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    let mut roundoff = false;
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        let floor = 50.0 * f64::EPSILON * res_abs;
        if error <= floor {
            error = floor;
            roundoff = true;
        }
    }
    Ok(Panel {
        lo,
        hi,
        value,
        error,
        roundoff,
    })
}

/// Integrates `f` over `iv` to absolute tolerance `tol`.
pub fn adaptive_integrate<F: Fn(f64) -> f64>(
    f: F,
    iv: Interval,
    tol: f64,
) -> Result<QuadratureResult> {
    integrate(f, iv, QuadratureOptions::absolute(tol))
}

pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    iv: Interval,
    opts: QuadratureOptions,
) -> Result<QuadratureResult> {
    integrate_breakpoints(f, &[iv.lo, iv.hi], opts)
}

/// Global adaptive Gauss-Kronrod over the panels delimited by `points`
/// (ascending). The panel with the largest error is bisected until the
/// summed error meets the tolerance.
pub fn integrate_breakpoints<F: Fn(f64) -> f64>(
    f: F,
    points: &[f64],
    opts: QuadratureOptions,
) -> Result<QuadratureResult> {
    let tol_ok = |t: f64| t.is_finite() && t >= 0.0;
    if !tol_ok(opts.abs_tol) || !tol_ok(opts.rel_tol) || opts.abs_tol + opts.rel_tol <= 0.0 {
        return Err(NumericsError::InvalidTolerance(
            opts.abs_tol.max(opts.rel_tol),
        ));
    }
    if points.len() < 2 {
        return Err(NumericsError::InvalidInterval {
            lo: points.first().copied().unwrap_or(f64::NAN),
            hi: f64::NAN,
        });
    }
    for w in points.windows(2) {
        Interval::new(w[0], w[1])?;
    }

    let mut heap = BinaryHeap::new();
    let mut frozen: Vec<Panel> = Vec::new();
    let mut panels = 0usize;
    for w in points.windows(2) {
        heap.push(kronrod_panel(&f, w[0], w[1])?);
        panels += 1;
    }

    let totals = |heap: &BinaryHeap<Panel>, frozen: &[Panel]| {
        heap.iter()
            .chain(frozen.iter())
            .fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error))
    };

    let (mut value, mut error) = totals(&heap, &frozen);
    loop {
        let target = opts.abs_tol.max(opts.rel_tol * value.abs());
        if error <= target {
            break;
        }
        let Some(worst) = heap.pop() else {
            break;
        };
        let mid = 0.5 * (worst.lo + worst.hi);
        if worst.roundoff || !(worst.lo < mid && mid < worst.hi) {
            frozen.push(worst);
            continue;
        }
        if panels + 2 > opts.max_panels {
            heap.push(worst);
            let (value, error_estimate) = totals(&heap, &frozen);
            return Err(NumericsError::QuadratureNoConvergence {
                value,
                error_estimate,
                panels,
            });
        }
        let left = kronrod_panel(&f, worst.lo, mid)?;
        let right = kronrod_panel(&f, mid, worst.hi)?;
        panels += 2;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        // Periodic resummation keeps the running totals from drifting.
        if panels.is_multiple_of(512) {
            (value, error) = totals(&heap, &frozen);
        }
    }

    let (value, error_estimate) = totals(&heap, &frozen);
    let target = opts.abs_tol.max(opts.rel_tol * value.abs());
    let limited_by_rounding = frozen.iter().all(|p| p.roundoff);
    if error_estimate > target && heap.is_empty() && !limited_by_rounding {
        return Err(NumericsError::QuadratureNoConvergence {
            value,
            error_estimate,
            panels,
        });
    }
    Ok(QuadratureResult {
        value,
        error_estimate,
        panels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn linear_and_sine() {
        let r = adaptive_integrate(|x| x, Interval::new(0.0, 1.0).unwrap(), 1e-12).unwrap();
        assert_abs_diff_eq!(r.value, 0.5, epsilon = 1e-12);
        let r = adaptive_integrate(f64::sin, Interval::new(0.0, std::f64::consts::PI).unwrap(), 1e-12)
            .unwrap();
        assert_abs_diff_eq!(r.value, 2.0, epsilon = 1e-12);
        assert!(r.panels >= 1);
    }

    #[test]
    fn sinc_power_against_midpoint_oracle() {
        let f = |w: f64| (w.sin().powi(2) / w).powi(4);
        let n = 1_000_000;
        let h = std::f64::consts::PI / n as f64;
        let oracle: f64 = (0..n).map(|i| f((i as f64 + 0.5) * h)).sum::<f64>() * h;
        let r = adaptive_integrate(f, Interval::new(0.0, std::f64::consts::PI).unwrap(), 1e-10)
            .unwrap();
        assert!((r.value - oracle).abs() <= 1e-6 * oracle.abs());
    }

    #[test]
    fn singular_weight_at_origin() {
        // int_0^1 x^{-1/2} dx = 2
        let r = integrate(
            |x: f64| x.powf(-0.5),
            Interval::new(0.0, 1.0).unwrap(),
            QuadratureOptions::relative(1e-10),
        )
        .unwrap();
        assert_abs_diff_eq!(r.value, 2.0, epsilon = 1e-8);
    }

    #[test]
    fn budget_exhaustion_reports_best_estimate() {
        let opts = QuadratureOptions {
            abs_tol: 1e-15,
            rel_tol: 0.0,
            max_panels: 5,
        };
        let err = integrate(|x: f64| (50.0 * x).sin().abs(), Interval::new(0.0, 10.0).unwrap(), opts)
            .unwrap_err();
        assert!(matches!(err, NumericsError::QuadratureNoConvergence { .. }));
    }

    #[test]
    fn bad_inputs() {
        assert!(Interval::new(1.0, 1.0).is_err());
        assert!(Interval::new(0.0, f64::INFINITY).is_err());
        assert!(adaptive_integrate(|x| x, Interval::new(0.0, 1.0).unwrap(), 0.0).is_err());
    }
}
