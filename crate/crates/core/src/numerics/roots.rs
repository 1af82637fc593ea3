use super::{Interval, NumericsError, Result};

const MAX_ITER: usize = 200;

/// Root of `f` on a sign-changing bracket.
///
/// Illinois-modified regula falsi (a safeguarded secant step) with a
/// bisection step forced whenever the bracket fails to halve.
pub fn find_root_bracketed<F: Fn(f64) -> f64>(f: F, iv: Interval, tol: f64) -> Result<f64> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(NumericsError::InvalidTolerance(tol));
    }
    let (mut a, mut b) = (iv.lo, iv.hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if !(fa.is_finite() && fb.is_finite()) || fa.signum() == fb.signum() {
        return Err(NumericsError::NoSignChange { lo: a, hi: b });
    }

    let mut side = 0i8;
    let mut last_width = b - a;
    for _ in 0..MAX_ITER {
        let width = b - a;
        if width <= 2.0 * tol {
            return Ok(0.5 * (a + b));
        }
        let mut x = (a * fb - b * fa) / (fb - fa);
        if !(x > a && x < b) || width > 0.5 * last_width {
            x = 0.5 * (a + b);
        }
        last_width = width;
        if x <= a || x >= b {
            // Bracket is down to adjacent floats.
            return Ok(if fa.abs() < fb.abs() { a } else { b });
        }
        let fx = f(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if fx.signum() == fb.signum() {
            b = x;
            fb = fx;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            a = x;
            fa = fx;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
    }
    Err(NumericsError::MaxIterations(MAX_ITER))
}
