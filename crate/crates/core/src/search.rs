//! One-dimensional searches used by the projection code.

/// `1 / φ` where `φ` is the golden ratio.
const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GoldenResult {
    pub x: f64,
    pub value: f64,
    /// Final bracket `[lo, hi]`; the minimizer set of a unimodal function meets it.
    pub bracket: (f64, f64),
    pub evaluations: usize,
}

/// Golden-section search for the minimum of a unimodal (quasi-convex) `f` on `[lo, hi]`.
///
/// Stops when the bracket is narrower than `tol`. Ties keep the left sub-bracket.
pub fn golden_section<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, tol: f64) -> GoldenResult {
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut evaluations = 2;
    while b - a > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
        evaluations += 1;
    }
    let (x, value) = if fc <= fd { (c, fc) } else { (d, fd) };
    GoldenResult {
        x,
        value,
        bracket: (a, b),
        evaluations,
    }
}

/// Largest `t` in `[lo, hi]` (to `tol`) at which a monotone predicate still holds,
/// assuming it holds on an initial segment of the interval. Returns `lo` when the
/// predicate fails everywhere and `hi` when it never fails.
pub fn bisect_last_true<P: FnMut(f64) -> bool>(mut pred: P, lo: f64, hi: f64, tol: f64) -> f64 {
    if !pred(lo) {
        return lo;
    }
    if pred(hi) {
        return hi;
    }
    let (mut a, mut b) = (lo, hi);
    while b - a > tol {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if pred(m) {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}
