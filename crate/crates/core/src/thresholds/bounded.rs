//! Thresholds valid uniformly over a bounded horizon `t ≤ n`.

use super::hfun::h_inverse_unchecked;
use super::spec::CorrectionClass;
use crate::error::{domain, Error, Result};
use crate::roots::bisect_increasing;

fn check_horizon(n: f64) -> Result<()> {
    if n >= 3.0 && n.is_finite() {
        Ok(())
    } else {
        Err(domain("n", n, "[3, inf)"))
    }
}

fn check_x(x: f64) -> Result<()> {
    if x >= 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(domain("x", x, "[0, inf)"))
    }
}

/// Single-arm bound `h⁻¹(1 + ln ln n + x)` on `N_a d⁺(μ̂_a, μ_a)` over
/// `t ≤ n`.
pub fn bounded_garivier(x: f64, n: f64) -> Result<f64> {
    check_x(x)?;
    check_horizon(n)?;
    Ok(h_inverse_unchecked(1.0 + n.ln().ln() + x))
}

/// `f̃(u) = u - 2 ln u`, increasing on `[2, ∞)`.
fn f_tilde(u: f64) -> f64 {
    u - 2.0 * u.ln()
}

/// Subset bound `|S| f̃⁻¹(1 + ln ln n + (x + 1)/|S|)` with `f̃(u) = u - 2 ln u`
/// inverted on `[2, ∞)`.
pub fn bounded_combes(x: f64, n: f64, set_size: usize) -> Result<f64> {
    check_x(x)?;
    check_horizon(n)?;
    if set_size == 0 {
        return Err(Error::Invalid("set size must be at least 1".into()));
    }
    let s = set_size as f64;
    let target = 1.0 + n.ln().ln() + (x + 1.0) / s;
    if target < f_tilde(2.0) {
        return Err(domain("f~ argument", target, "[2 - 2 ln 2, inf)"));
    }
    let mut hi = 4.0;
    while f_tilde(hi) < target {
        hi *= 2.0;
    }
    let u = bisect_increasing(|u| f_tilde(u) - target, 2.0, hi, 1e-12);
    Ok(s * u)
}

/// Our bounded-horizon threshold for a subset of `set_size` arms:
/// `|S| c ln(d + ln n) + |S| 𝒞(x / |S|)` with the constants and threshold
/// curve of `class`. Each of the `|S|` per-arm corrections `c ln(d + ln N_a)`
/// is at most `c ln(d + ln n)` when `t ≤ n`.
pub fn bounded_time_threshold(x: f64, n: f64, set_size: usize, class: CorrectionClass) -> Result<f64> {
    check_x(x)?;
    check_horizon(n)?;
    if set_size == 0 {
        return Err(Error::Invalid("set size must be at least 1".into()));
    }
    let s = set_size as f64;
    let curve = class.curve(super::Sides::Two);
    let per_arm = class.c() * (class.d() + n.ln()).ln();
    Ok(s * per_arm + s * curve.evaluate_unchecked(x / s))
}
