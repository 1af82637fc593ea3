use super::{NumericsError, Result};

const PROBE_TERMS: u64 = 8;
const MAX_EULER_TERMS: usize = 80;
const MAX_HEAD: u64 = 1 << 16;
// Largest index handed to a term closure; keeps index arithmetic inside
// callers (and its conversion to f64) exact.
const MAX_INDEX: u64 = 1 << 52;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesSum {
    pub value: f64,
    pub error_bound: f64,
    pub terms_used: u64,
}

/// Sums `term(0) + term(1) + ...` to absolute tolerance `tol`.
///
/// Strictly alternating series are summed directly up to a head index and
/// the tail is accelerated with the Euler transform. Series whose terms all
/// share a sign are first rewritten as alternating series with the
/// Van Wijngaarden transform.
pub fn sum_alternating_series<F: Fn(u64) -> f64>(term: F, tol: f64) -> Result<SeriesSum> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(NumericsError::InvalidTolerance(tol));
    }
    let probe: Vec<f64> = (0..PROBE_TERMS).map(&term).collect();
    if probe.iter().any(|t| !t.is_finite()) {
        return Err(NumericsError::Divergent("non-finite term".into()));
    }
    let alternating = probe.windows(2).all(|w| w[0] * w[1] < 0.0);
    let same_sign = probe.iter().all(|&t| t > 0.0) || probe.iter().all(|&t| t < 0.0);
    if alternating {
        let magnitude = |n: u64| term(n).abs();
        let sign = probe[0].signum();
        let s = euler_sum(&magnitude, tol)?;
        Ok(SeriesSum {
            value: sign * s.value,
            ..s
        })
    } else if same_sign {
        let sign = probe[0].signum();
        let magnitude = |n: u64| term(n).abs();
        let condensed = |j: u64| -> f64 { condensed_term(&magnitude, j, tol) };
        // Surface divergence of the inner condensation sums as an error.
        let first = condensed(0);
        if !first.is_finite() {
            return Err(NumericsError::Divergent(
                "condensed terms do not decay (harmonic-type series)".into(),
            ));
        }
        let s = euler_sum(&|j| condensed(j), tol)?;
        if !s.value.is_finite() {
            return Err(NumericsError::Divergent(
                "condensed terms do not decay (harmonic-type series)".into(),
            ));
        }
        Ok(SeriesSum {
            value: sign * s.value,
            ..s
        })
    } else {
        Err(NumericsError::MixedSigns)
    }
}

/// Van Wijngaarden term w_j = sum_i 2^i a(2^i (j+1) - 1), returning
/// infinity when the inner sum shows no geometric decay.
fn condensed_term<F: Fn(u64) -> f64>(a: &F, j: u64, tol: f64) -> f64 {
    let mut sum = 0.0;
    let mut weight = 1.0;
    let mut prev = f64::INFINITY;
    let mut ratio: f64 = 1.0;
    for i in 0..63u32 {
        let Some(idx) = (j + 1).checked_mul(1u64 << i).filter(|&n| n <= MAX_INDEX) else {
            break;
        };
        let t = weight * a(idx - 1);
        sum += t;
        if t == 0.0 {
            return sum;
        }
        ratio = t / prev;
        prev = t;
        if i > 0 && ratio < 0.9 {
            let remainder = t * ratio / (1.0 - ratio);
            if remainder <= 1e-3 * tol.min(f64::EPSILON * sum.abs()).max(f64::MIN_POSITIVE) {
                return sum;
            }
        }
        weight *= 2.0;
    }
    if ratio < 0.9 {
        // Index range exhausted while decaying geometrically: close the
        // sum with its geometric tail.
        sum + prev * ratio / (1.0 - ratio)
    } else {
        f64::INFINITY
    }
}

/// Sum of (-1)^n a_n for positive, eventually decreasing a_n.
fn euler_sum<F: Fn(u64) -> f64>(a: &F, tol: f64) -> Result<SeriesSum> {
    let mut head = 16u64;
    let mut previous: Option<SeriesSum> = None;
    while head <= MAX_HEAD {
        let a_head = a(head);
        let a_far = a(4 * head);
        if !(a_head.is_finite() && a_far.is_finite()) {
            return Err(NumericsError::Divergent("non-finite term".into()));
        }
        if a_far >= a_head && a_head > tol {
            return Err(NumericsError::Divergent(format!(
                "term magnitude {a_far:e} at n={} is not below {a_head:e} at n={head}",
                4 * head
            )));
        }
        let current = euler_from(a, head, tol);
        if let (Some(cur), Some(prev)) = (current, previous) {
            let agree = (cur.value - prev.value).abs();
            if agree <= tol.max(cur.error_bound) {
                return Ok(SeriesSum {
                    error_bound: cur.error_bound.max(agree),
                    ..cur
                });
            }
        }
        previous = current;
        head *= 2;
    }
    let best = previous.unwrap_or(SeriesSum {
        value: f64::NAN,
        error_bound: f64::INFINITY,
        terms_used: 0,
    });
    Err(NumericsError::SeriesNoConvergence {
        value: best.value,
        bound: best.error_bound,
        tol,
    })
}

/// Partial sum of the first `head` terms plus the Euler-transformed tail
/// sum_k (-1)^k (Delta^k a)_head / 2^{k+1}.
fn euler_from<F: Fn(u64) -> f64>(a: &F, head: u64, tol: f64) -> Option<SeriesSum> {
    let mut partial = 0.0;
    let mut comp = 0.0;
    for n in 0..head {
        let t = if n % 2 == 0 { a(n) } else { -a(n) };
        // Kahan summation keeps the head accurate for slowly decaying terms.
        let y = t - comp;
        let s = partial + y;
        comp = (s - partial) - y;
        partial = s;
    }
    let mut diffs: Vec<f64> = (0..MAX_EULER_TERMS as u64 + 1).map(|i| a(head + i)).collect();
    let mut tail = 0.0;
    let mut bound = f64::INFINITY;
    let mut scale = 0.5;
    for k in 0..MAX_EULER_TERMS {
        let t = diffs[0] * scale * if k % 2 == 0 { 1.0 } else { -1.0 };
        tail += t;
        bound = t.abs();
        if bound <= 0.25 * tol || bound <= f64::EPSILON * 0.25 * (partial + tail).abs() {
            break;
        }
        for i in 0..diffs.len() - 1 - k {
            diffs[i] = diffs[i + 1] - diffs[i];
        }
        scale *= 0.5;
    }
    let sign = if head.is_multiple_of(2) { 1.0 } else { -1.0 };
    let value = partial + sign * tail;
    Some(SeriesSum {
        value,
        error_bound: 2.0 * bound + 4.0 * f64::EPSILON * value.abs(),
        terms_used: head + MAX_EULER_TERMS as u64,
    })
}
