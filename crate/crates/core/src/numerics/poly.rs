use num_complex::Complex64;

use super::{NumericsError, Result};

const MAX_ABERTH_ITER: usize = 1000;
/// Roots whose Fujiwara radius bound exceeds this are treated as escaping
/// to infinity: the leading coefficient is numerically zero.
const MAX_ROOT_RADIUS: f64 = 1e150;

/// Real polynomial with coefficients in ascending degree. Trailing exact
/// zeros are trimmed at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialReal {
    coeffs: Vec<f64>,
}

impl PolynomialReal {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.len() > 1 && coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// Sum of |c_k| |x|^k, the natural scale for the rounding error of
    /// evaluating the polynomial at `x`.
    pub fn magnitude_scale(&self, x: f64) -> f64 {
        let ax = x.abs();
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * ax + c.abs())
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Self::new(vec![0.0]);
        }
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| k as f64 * c)
                .collect(),
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexRoots {
    /// Real roots, ascending.
    pub real: Vec<f64>,
    /// One representative (positive imaginary part) per conjugate pair.
    pub conjugate_pairs: Vec<Complex64>,
}

impl ComplexRoots {
    /// All roots, each conjugate pair expanded.
    pub fn all(&self) -> Vec<Complex64> {
        let mut out: Vec<Complex64> = self.real.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        for z in &self.conjugate_pairs {
            out.push(*z);
            out.push(z.conj());
        }
        out
    }
}

/// All real roots, ascending, polished to near machine precision.
pub fn poly_real_roots(p: &PolynomialReal) -> Result<Vec<f64>> {
    Ok(poly_complex_roots(p)?.real)
}

/// All roots of a real polynomial via Aberth-Ehrlich simultaneous
/// iteration seeded from the Newton polygon.
pub fn poly_complex_roots(p: &PolynomialReal) -> Result<ComplexRoots> {
    let d = p.degree();
    if d < 1 {
        return Err(NumericsError::DegreeTooLow(d));
    }
    let c = p.coeffs();
    if c.iter().any(|x| !x.is_finite()) {
        return Err(NumericsError::IllConditioned(
            "non-finite coefficient".into(),
        ));
    }
    let radius = fujiwara_bound(c);
    if !(radius.is_finite() && radius < MAX_ROOT_RADIUS) {
        return Err(NumericsError::IllConditioned(format!(
            "leading coefficient {:e} too small relative to the others (root radius bound {:e})",
            c[d], radius
        )));
    }

    let zeros = c.iter().take_while(|&&x| x == 0.0).count();
    let reduced = &c[zeros..];
    let mut roots = vec![Complex64::new(0.0, 0.0); zeros];
    if reduced.len() > 1 {
        roots.extend(aberth(reduced)?);
    }

    let mut real = Vec::new();
    let mut pairs = Vec::new();
    for z in roots {
        if z.im.abs() <= 1e-7 * z.norm() {
            real.push(polish_real(c, z.re));
        } else if z.im > 0.0 {
            pairs.push(z);
        }
    }
    real.sort_by(f64::total_cmp);
    pairs.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(ComplexRoots {
        real,
        conjugate_pairs: pairs,
    })
}

fn fujiwara_bound(c: &[f64]) -> f64 {
    let d = c.len() - 1;
    let lead = c[d].abs();
    let mut bound: f64 = 0.0;
    for i in 1..=d {
        let mut r = (c[d - i].abs() / lead).powf(1.0 / i as f64);
        if i == d {
            r *= 0.5f64.powf(1.0 / d as f64);
        }
        bound = bound.max(r);
    }
    2.0 * bound
}

/// Newton correction p(z)/p'(z) and whether |p(z)| is already at the
/// rounding level. For |z| > 1 the reversed polynomial is evaluated at 1/z
/// so that wide root spreads do not overflow.
fn newton_ratio(c: &[f64], z: Complex64) -> (Complex64, bool) {
    let d = c.len() - 1;
    let eps = f64::EPSILON * (4 * d) as f64;
    if z.norm() <= 1.0 {
        let mut pv = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        let mut scale = 0.0;
        let az = z.norm();
        for &ck in c.iter().rev() {
            dp = dp * z + pv;
            pv = pv * z + ck;
            scale = scale * az + ck.abs();
        }
        (pv / dp, pv.norm() <= eps * scale)
    } else {
        let w = z.inv();
        let aw = w.norm();
        let mut q = Complex64::new(0.0, 0.0);
        let mut dq = Complex64::new(0.0, 0.0);
        let mut scale = 0.0;
        for &ck in c.iter() {
            dq = dq * w + q;
            q = q * w + ck;
            scale = scale * aw + ck.abs();
        }
        let denom = w * (q * d as f64 - w * dq);
        (q / denom, q.norm() <= eps * scale)
    }
}

fn initial_guesses(c: &[f64]) -> Vec<Complex64> {
    let d = c.len() - 1;
    let pts: Vec<(usize, f64)> = c
        .iter()
        .enumerate()
        .filter(|(_, &x)| x != 0.0)
        .map(|(k, &x)| (k, x.abs().ln()))
        .collect();
    // Upper convex hull of (k, ln|c_k|).
    let mut hull: Vec<(usize, f64)> = Vec::new();
    for &pt in &pts {
        while hull.len() >= 2 {
            let (k1, y1) = hull[hull.len() - 2];
            let (k2, y2) = hull[hull.len() - 1];
            let cross = (k2 as f64 - k1 as f64) * (pt.1 - y1) - (y2 - y1) * (pt.0 as f64 - k1 as f64);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }
    let mut out = Vec::with_capacity(d);
    let sigma = 0.7;
    for (edge, w) in hull.windows(2).enumerate() {
        let (k1, y1) = w[0];
        let (k2, y2) = w[1];
        let n = k2 - k1;
        let r = ((y1 - y2) / n as f64).exp();
        for t in 0..n {
            let theta = 2.0 * std::f64::consts::PI * t as f64 / n as f64
                + 2.0 * std::f64::consts::PI * edge as f64 / d as f64
                + sigma;
            out.push(Complex64::from_polar(r, theta));
        }
    }
    out
}

fn aberth(c: &[f64]) -> Result<Vec<Complex64>> {
    let d = c.len() - 1;
    if d == 1 {
        return Ok(vec![Complex64::new(-c[0] / c[1], 0.0)]);
    }
    let mut z = initial_guesses(c);
    let mut done = vec![false; d];
    for _ in 0..MAX_ABERTH_ITER {
        let mut all_done = true;
        for i in 0..d {
            if done[i] {
                continue;
            }
            let (ratio, converged) = newton_ratio(c, z[i]);
            if converged || !ratio.is_finite() {
                done[i] = converged;
                if !converged {
                    // Stationary point of p: nudge off it.
                    z[i] *= Complex64::new(1.0 + 1e-6, 1e-6);
                    all_done = false;
                }
                continue;
            }
            all_done = false;
            let s: Complex64 = (0..d)
                .filter(|&j| j != i)
                .map(|j| (z[i] - z[j]).inv())
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            z[i] -= step;
            if step.norm() <= f64::EPSILON * z[i].norm() {
                done[i] = true;
            }
        }
        if all_done {
            return Ok(z);
        }
    }
    let worst = z
        .iter()
        .map(|&zi| newton_ratio(c, zi).0.norm() / zi.norm().max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max);
    if worst < 1e-8 {
        Ok(z)
    } else {
        Err(NumericsError::RootsNoConvergence(worst))
    }
}

fn polish_real(c: &[f64], mut x: f64) -> f64 {
    for _ in 0..20 {
        let (ratio, converged) = newton_ratio(c, Complex64::new(x, 0.0));
        if converged || !ratio.re.is_finite() {
            break;
        }
        let next = x - ratio.re;
        if (next - x).abs() <= 2.0 * f64::EPSILON * x.abs() {
            x = next;
            break;
        }
        x = next;
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn difference_of_squares() {
        let r = poly_real_roots(&PolynomialReal::new(vec![-1.0, 0.0, 1.0])).unwrap();
        assert_eq!(r.len(), 2);
        assert!((r[0] + 1.0).abs() < 1e-14 && (r[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn quadratic_against_formula() {
        let r = poly_real_roots(&PolynomialReal::new(vec![1.0, 4.0, 1.0])).unwrap();
        let s3 = 3f64.sqrt();
        assert!((r[0] - (-2.0 - s3)).abs() < 1e-13);
        assert!((r[1] - (-2.0 + s3)).abs() < 1e-14);
    }

    #[test]
    fn complex_pairs() {
        // (z^2 + 1)(z - 2)
        let p = PolynomialReal::new(vec![-2.0, 1.0, -2.0, 1.0]);
        let r = poly_complex_roots(&p).unwrap();
        assert_eq!(r.real.len(), 1);
        assert!((r.real[0] - 2.0).abs() < 1e-14);
        assert_eq!(r.conjugate_pairs.len(), 1);
        assert!((r.conjugate_pairs[0] - Complex64::new(0.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn zero_roots_are_exact() {
        let r = poly_real_roots(&PolynomialReal::new(vec![0.0, 0.0, -1.0, 1.0])).unwrap();
        assert_eq!(r, vec![0.0, 0.0, 1.0]);
    }

    #[test]
    fn wide_spread_roots() {
        // Roots at -10^k for k = -6..6.
        let mut c = vec![1.0];
        for k in -6..=6 {
            let r = 10f64.powi(k);
            let mut next = vec![0.0; c.len() + 1];
            for (i, &ci) in c.iter().enumerate() {
                next[i] += ci * r;
                next[i + 1] += ci;
            }
            c = next;
        }
        let roots = poly_real_roots(&PolynomialReal::new(c)).unwrap();
        assert_eq!(roots.len(), 13);
        for (root, k) in roots.iter().zip((-6..=6).rev()) {
            let want = -(10f64.powi(k));
            assert!((root - want).abs() <= 1e-10 * want.abs(), "{root} vs {want}");
        }
    }

    #[test]
    fn degenerate_inputs() {
        assert!(matches!(
            poly_real_roots(&PolynomialReal::new(vec![3.0, 0.0])),
            Err(NumericsError::DegreeTooLow(0))
        ));
        assert!(matches!(
            poly_real_roots(&PolynomialReal::new(vec![1.0, 1.0, 1e-320])),
            Err(NumericsError::IllConditioned(_))
        ));
    }
}
