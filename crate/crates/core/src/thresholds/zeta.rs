//! Riemann zeta on `s > 1` through the alternating (Dirichlet eta) series,
//! accelerated with Borwein's Chebyshev-weighted partial sums.
//!
//! `ζ(s) = η(s) / (1 - 2^(1-s))` and `η(s) = Σ (-1)^(k-1) k^(-s)`. With
//! `n` terms the truncation error of the accelerated sum is below
//! `3 (3 + √8)^(-n)`, so 40 terms are far past double precision.

use std::sync::OnceLock;

use crate::error::{domain, Result};

const TERMS: usize = 40;

struct Borwein {
    /// `(-1)^k (d_n - d_k) / d_n`
    weights: [f64; TERMS],
    /// `ln(k + 1)`
    logs: [f64; TERMS],
}

fn borwein() -> &'static Borwein {
    static TABLE: OnceLock<Borwein> = OnceLock::new();
    TABLE.get_or_init(|| {
        let n = TERMS;
        // d_k = n Σ_{i ≤ k} (n+i-1)! 4^i / ((n-i)! (2i)!)
        let mut d = [0.0f64; TERMS + 1];
        let mut term = 1.0f64;
        let mut acc = 0.0;
        for (i, slot) in d.iter_mut().enumerate() {
            acc += term;
            *slot = acc;
            let i = i as f64;
            let nf = n as f64;
            term *= 4.0 * (nf + i) * (nf - i) / ((2.0 * i + 1.0) * (2.0 * i + 2.0));
        }
        let dn = d[n];
        let mut weights = [0.0; TERMS];
        let mut logs = [0.0; TERMS];
        for k in 0..n {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            weights[k] = sign * (dn - d[k]) / dn;
            logs[k] = ((k + 1) as f64).ln();
        }
        Borwein { weights, logs }
    })
}

/// `(η(s), η'(s))`.
fn eta_with_derivative(s: f64) -> (f64, f64) {
    let b = borwein();
    let mut eta = 0.0;
    let mut deta = 0.0;
    for k in 0..TERMS {
        let t = b.weights[k] * (-s * b.logs[k]).exp();
        eta += t;
        deta -= t * b.logs[k];
    }
    (eta, deta)
}

/// Riemann zeta function for real `s > 1`.
pub fn zeta(s: f64) -> Result<f64> {
    if !(s > 1.0 && s.is_finite()) {
        return Err(domain("s", s, "(1, inf)"));
    }
    Ok(zeta_unchecked(s))
}

pub(crate) fn zeta_unchecked(s: f64) -> f64 {
    let (eta, _) = eta_with_derivative(s);
    eta / one_minus_two_pow(s)
}

/// `(ζ(s), ζ'(s))` for `s > 1`.
pub(crate) fn zeta_with_derivative(s: f64) -> (f64, f64) {
    let (eta, deta) = eta_with_derivative(s);
    let den = one_minus_two_pow(s);
    let dden = (-(s - 1.0) * std::f64::consts::LN_2).exp() * std::f64::consts::LN_2;
    (eta / den, (deta * den - eta * dden) / (den * den))
}

/// `1 - 2^(1-s)`, accurate as `s → 1`.
fn one_minus_two_pow(s: f64) -> f64 {
    -((1.0 - s) * std::f64::consts::LN_2).exp_m1()
}

/// `ζ(2) = π²/6`.
pub const ZETA_2: f64 = std::f64::consts::PI * std::f64::consts::PI / 6.0;
