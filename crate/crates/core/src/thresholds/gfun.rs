//! Threshold functions `C^g(x) = min_{λ ∈ Λ} (g(λ) + x) / λ` for the convex
//! cost functions `g` of the Gaussian, Gamma and idealized chi-square cases.
//!
//! A process is `g`-dominated when, after exponential tilting by any
//! `λ ∈ Λ`, it sits below a test martingale up to a factor `e^{g(λ)}`. Doob's
//! inequality then bounds the probability that a sum over `|S|` arms ever
//! crosses `|S| C^g(x/|S|)` by `e^{-x}`.
//!
//! For strictly convex `g` the objective `(g(λ) + x)/λ` has at most one
//! stationary point, solving `λ g'(λ) - g(λ) = x`; the left side is
//! increasing in `λ` (its derivative is `λ g''(λ)`), so bisection finds it.

use serde::{Deserialize, Serialize};

use super::zeta::{zeta_unchecked, zeta_with_derivative};
use crate::error::{domain, Result};
use crate::roots::{bisect_increasing, golden_section_min};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GFunction {
    /// `g_G(λ) = 2λ - 2λ ln(4λ) + ln ζ(2λ) - ½ ln(1 - λ)` on `(1/2, 1)`.
    Gaussian,
    /// `g_Γ(λ) = 2λ - 2λ ln(4λ) + ln ζ(2λ) - ln(1 - λ)` on `(1/2, 1)`.
    Gamma,
    /// `g_χ²(λ) = -½ ln(1 - λ)` on `(0, 1)`.
    IdealChiSq,
}

/// Distance kept from the open ends of `Λ`.
const EDGE: f64 = 1e-9;
const LAMBDA_TOL: f64 = 1e-12;

impl GFunction {
    /// The open interval `Λ`.
    pub fn domain(&self) -> (f64, f64) {
        match self {
            GFunction::Gaussian | GFunction::Gamma => (0.5, 1.0),
            GFunction::IdealChiSq => (0.0, 1.0),
        }
    }

    fn tail_weight(&self) -> f64 {
        match self {
            GFunction::Gaussian | GFunction::IdealChiSq => 0.5,
            GFunction::Gamma => 1.0,
        }
    }

    /// `g(λ)`; `+∞` outside `Λ`.
    pub fn value(&self, lambda: f64) -> f64 {
        let (lo, hi) = self.domain();
        if !(lambda > lo && lambda < hi) {
            return f64::INFINITY;
        }
        let tail = -self.tail_weight() * (-lambda).ln_1p();
        match self {
            GFunction::IdealChiSq => tail,
            _ => {
                2.0 * lambda - 2.0 * lambda * (4.0 * lambda).ln()
                    + zeta_unchecked(2.0 * lambda).ln()
                    + tail
            }
        }
    }

    /// `g'(λ)` inside `Λ`.
    pub fn derivative(&self, lambda: f64) -> f64 {
        let tail = self.tail_weight() / (1.0 - lambda);
        match self {
            GFunction::IdealChiSq => tail,
            _ => {
                let (z, dz) = zeta_with_derivative(2.0 * lambda);
                -2.0 * (4.0 * lambda).ln() + 2.0 * dz / z + tail
            }
        }
    }

    /// Convex conjugate `g*(u) = sup_{λ ∈ Λ} (λu - g(λ))`.
    pub fn conjugate(&self, u: f64) -> f64 {
        let (lo, hi) = self.domain();
        let (_, neg) = golden_section_min(|l| self.value(l) - l * u, lo, hi, 1e-12);
        -neg
    }

    /// `C^g(x)` for `x > 0`.
    pub fn threshold(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) || x.is_infinite() {
            return Err(domain("x", x, "(0, inf)"));
        }
        Ok(self.threshold_unchecked(x))
    }

    pub(crate) fn threshold_unchecked(&self, x: f64) -> f64 {
        let lambda = self.minimizer(x);
        (self.value(lambda) + x) / lambda
    }

    /// The `λ ∈ Λ` attaining `C^g(x)`.
    pub fn minimizer(&self, x: f64) -> f64 {
        let (lo, hi) = self.domain();
        let (a, b) = (lo + EDGE, hi - EDGE);
        let stationarity = |l: f64| l * self.derivative(l) - self.value(l) - x;
        let fa = stationarity(a);
        let fb = stationarity(b);
        if fa <= 0.0 && fb >= 0.0 {
            return bisect_increasing(stationarity, a, b, LAMBDA_TOL);
        }
        // no sign change inside the searched interval: take the better end
        let objective = |l: f64| (self.value(l) + x) / l;
        if objective(a) <= objective(b) {
            a
        } else {
            b
        }
    }
}

/// `C^g(x)`.
pub fn c_g(g: GFunction, x: f64) -> Result<f64> {
    g.threshold(x)
}
