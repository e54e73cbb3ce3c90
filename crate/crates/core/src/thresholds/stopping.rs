//! Stopping thresholds `ĉ_t(δ)` for the GLR stopping rule.

use serde::{Deserialize, Serialize};

use super::universal::{universal_unchecked, Sides};
use crate::error::{domain, Error, Result};

/// Which stopping threshold to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StoppingThreshold {
    /// `3 Σ_a ln(1 + ln N_a) + K 𝒯(ln(1/δ)/K)`, valid for any problem.
    Universal { arms: usize },
    /// `6 ln(ln(t/2) + 1) + 2 𝒯(ln((K-1)/δ)/2)` for best-arm identification.
    BaiImproved { arms: usize },
    /// `3R ln(1 + ln(t/R)) + R 𝒯(ln((M-1)/δ)/R)` for a problem of rank `R`
    /// with `M` hypotheses.
    RankBased { rank: usize, hypotheses: usize },
}

/// `ln(1 + ln u)` with `u` clamped at 1, where the expression vanishes.
fn ln1p_ln(u: f64) -> f64 {
    u.max(1.0).ln().ln_1p()
}

impl StoppingThreshold {
    pub fn validate(&self) -> Result<()> {
        match *self {
            StoppingThreshold::Universal { arms } if arms >= 1 => Ok(()),
            StoppingThreshold::BaiImproved { arms } if arms >= 2 => Ok(()),
            StoppingThreshold::RankBased { rank, hypotheses } if rank >= 1 && hypotheses >= 2 => {
                Ok(())
            }
            other => Err(Error::Invalid(format!("bad stopping threshold {other:?}"))),
        }
    }

    /// Evaluates the threshold at the counts `N_a(t)`, with `t = Σ N_a`.
    ///
    /// Only the universal variant looks at individual counts; arms never
    /// pulled contribute no correction.
    pub fn evaluate(&self, counts: &[u64], delta: f64) -> Result<f64> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(domain("delta", delta, "(0, 1)"));
        }
        self.validate()?;
        if let StoppingThreshold::Universal { arms } = *self {
            if counts.len() != arms {
                return Err(Error::Invalid(format!(
                    "expected {arms} counts, got {}",
                    counts.len()
                )));
            }
        }
        let t: u64 = counts.iter().sum();
        if t == 0 {
            return Err(domain("t", 0.0, "[1, inf)"));
        }
        Ok(self.evaluate_unchecked(counts, t as f64, delta))
    }

    /// Evaluates a time-only variant at `t`. The universal variant needs the
    /// counts and is rejected.
    pub fn evaluate_at(&self, t: f64, delta: f64) -> Result<f64> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(domain("delta", delta, "(0, 1)"));
        }
        if !(t >= 1.0) || t.is_infinite() {
            return Err(domain("t", t, "[1, inf)"));
        }
        self.validate()?;
        if matches!(self, StoppingThreshold::Universal { .. }) {
            return Err(Error::Invalid(
                "the universal stopping threshold depends on per-arm counts".into(),
            ));
        }
        Ok(self.evaluate_unchecked(&[], t, delta))
    }

    pub(crate) fn evaluate_unchecked(&self, counts: &[u64], t: f64, delta: f64) -> f64 {
        self.time_part(counts, t) + self.constant_part(delta)
    }

    /// The `δ`-dependent term, fixed over an episode.
    pub(crate) fn constant_part(&self, delta: f64) -> f64 {
        let curve = |x: f64| universal_unchecked(x, Sides::Two);
        match *self {
            StoppingThreshold::Universal { arms } => {
                let k = arms as f64;
                k * curve((1.0 / delta).ln() / k)
            }
            StoppingThreshold::BaiImproved { arms } => {
                let k = arms as f64;
                2.0 * curve(((k - 1.0) / delta).ln() / 2.0)
            }
            StoppingThreshold::RankBased { rank, hypotheses } => {
                let r = rank as f64;
                let m = hypotheses as f64;
                r * curve(((m - 1.0) / delta).ln() / r)
            }
        }
    }

    /// The iterated-logarithm term that grows with the counts.
    pub(crate) fn time_part(&self, counts: &[u64], t: f64) -> f64 {
        match *self {
            StoppingThreshold::Universal { .. } => {
                3.0 * counts
                    .iter()
                    .filter(|&&n| n > 0)
                    .map(|&n| ln1p_ln(n as f64))
                    .sum::<f64>()
            }
            StoppingThreshold::BaiImproved { .. } => 6.0 * ln1p_ln(t / 2.0),
            StoppingThreshold::RankBased { rank, .. } => {
                let r = rank as f64;
                3.0 * r * ln1p_ln(t / r)
            }
        }
    }
}
