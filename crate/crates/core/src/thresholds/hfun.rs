//! `h(u) = u - ln u`, its inverse on `[1, ∞)`, and the envelope `h̃_z`.

use crate::error::{domain, Result};

/// `h(u) = u - ln u`, increasing on `[1, ∞)`.
pub fn h(u: f64) -> Result<f64> {
    if !(u >= 1.0) || u.is_infinite() {
        return Err(domain("u", u, "[1, inf)"));
    }
    Ok(u - u.ln())
}

/// Upper end of the bracket for `h⁻¹(x)`: `x + ln(x + √(2(x - 1)))`.
pub fn h_inverse_upper_bound(x: f64) -> f64 {
    x + (x + (2.0 * (x - 1.0)).sqrt()).ln()
}

/// `h⁻¹(x)` for `x ≥ 1`: the unique `u ≥ 1` with `u - ln u = x`.
///
/// Equivalently `-W₋₁(-e^{-x})`. Computed by Newton steps from the upper end
/// of the bracket `[x, x + ln(x + √(2(x-1)))]`, falling back to bisection
/// whenever a step leaves the bracket.
pub fn h_inverse(x: f64) -> Result<f64> {
    if !(x >= 1.0) || x.is_infinite() {
        return Err(domain("x", x, "[1, inf)"));
    }
    Ok(h_inverse_unchecked(x))
}

pub(crate) fn h_inverse_unchecked(x: f64) -> f64 {
    if x == 1.0 {
        return 1.0;
    }
    // residual h(u) - x written around u = 1 to avoid cancellation
    let xm1 = x - 1.0;
    let residual = |u: f64| {
        let v = u - 1.0;
        (v - v.ln_1p()) - xm1
    };
    let mut lo = x;
    let mut hi = h_inverse_upper_bound(x);
    let mut u = hi;
    for _ in 0..200 {
        let f = residual(u);
        if f == 0.0 {
            return u;
        }
        if f > 0.0 {
            hi = u;
        } else {
            lo = u;
        }
        if hi - lo <= 1e-13 * hi {
            break;
        }
        let slope = 1.0 - 1.0 / u;
        let mut next = u - f / slope;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - u).abs() <= 1e-15 * u {
            u = next;
            break;
        }
        u = next;
    }
    u
}

/// `h̃_z(x) = min_{y ∈ [1, z]} y (x - ln ln y)` for `z ∈ (1, e]`, `x ≥ 0`.
///
/// Closed form: `e^{1/h⁻¹(x)} h⁻¹(x)` when `x ≥ h(1/ln z)` (interior
/// minimizer `y = e^{1/h⁻¹(x)}`), otherwise `z (x - ln ln z)` (minimum at
/// the right end). `z = 1` is rejected: the feasible set is `{1}` and the
/// objective is `+∞` there.
pub fn h_tilde(z: f64, x: f64) -> Result<f64> {
    if !(z > 1.0 && z <= std::f64::consts::E) {
        return Err(domain("z", z, "(1, e]"));
    }
    if !(x >= 0.0) || x.is_infinite() {
        return Err(domain("x", x, "[0, inf)"));
    }
    Ok(h_tilde_unchecked(z, x))
}

pub(crate) fn h_tilde_unchecked(z: f64, x: f64) -> f64 {
    let lnz = z.ln();
    let u0 = 1.0 / lnz;
    let switch = u0 - u0.ln();
    if x >= switch {
        let u = h_inverse_unchecked(x);
        (1.0 / u).exp() * u
    } else {
        z * (x - lnz.ln())
    }
}
