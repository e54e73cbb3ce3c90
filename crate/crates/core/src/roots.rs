//! Scalar root finding and minimization used throughout the crate.
//!
//! Everything here is derivative-free and bracketing, so it cannot wander
//! outside an open mean domain.

/// Bisection for a nondecreasing `f` with `f(lo) <= 0 <= f(hi)`.
///
/// Returns the midpoint of the final bracket once it is narrower than `tol`
/// or cannot be split further in floating point.
pub(crate) fn bisect_increasing<F>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> f64
where
    F: FnMut(f64) -> f64,
{
    debug_assert!(lo <= hi);
    for _ in 0..2000 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Root of a nondecreasing `f` with `f(lo) < 0 < f(hi)` by the Illinois
/// variant of regula falsi. Falls back to bisection while an end value is
/// not finite, so `f(hi)` may be `+∞`.
pub(crate) fn illinois_increasing<F>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> f64
where
    F: FnMut(f64) -> f64,
{
    let mut flo = f(lo);
    let mut fhi = f(hi);
    if flo >= 0.0 {
        return lo;
    }
    if fhi <= 0.0 {
        return hi;
    }
    // which end was kept on the previous step: -1 lo, +1 hi
    let mut kept = 0;
    for _ in 0..500 {
        if hi - lo <= tol {
            break;
        }
        let mut x = if flo.is_finite() && fhi.is_finite() {
            lo - flo * (hi - lo) / (fhi - flo)
        } else {
            0.5 * (lo + hi)
        };
        if !(x > lo && x < hi) {
            x = 0.5 * (lo + hi);
        }
        let fx = f(x);
        if fx == 0.0 {
            return x;
        }
        if fx < 0.0 {
            lo = x;
            flo = fx;
            if kept == 1 {
                fhi *= 0.5;
            }
            kept = 1;
        } else {
            hi = x;
            fhi = fx;
            if kept == -1 {
                flo *= 0.5;
            }
            kept = -1;
        }
    }
    0.5 * (lo + hi)
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for the minimum of a unimodal `f` on `[a, b]`.
///
/// Endpoints are never evaluated, so `f` may blow up at either end. Returns
/// `(argmin, min)`.
pub(crate) fn golden_section_min<F>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64)
where
    F: FnMut(f64) -> f64,
{
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..500 {
        if (b - a).abs() <= tol {
            break;
        }
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
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}
