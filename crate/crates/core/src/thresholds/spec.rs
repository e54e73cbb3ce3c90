use serde::{Deserialize, Serialize};

use super::bounded::{bounded_combes, bounded_garivier};
use super::gfun::GFunction;
use super::universal::{universal_unchecked, Sides};
use crate::error::{domain, Result};
use crate::expfam::ArmFamily;

/// A named threshold function `x ↦ 𝒞(x)`, nondecreasing in `x ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ThresholdSpec {
    /// `𝒯`, two- or one-sided.
    Universal { one_sided: bool },
    /// `C^g`.
    Cg { g: GFunction },
    /// Single-arm bounded-horizon baseline.
    GarivierBounded { horizon: f64 },
    /// Subset bounded-horizon baseline.
    CombesBounded { horizon: f64, set_size: usize },
}

impl ThresholdSpec {
    pub fn universal(sides: Sides) -> Self {
        ThresholdSpec::Universal {
            one_sided: sides == Sides::One,
        }
    }

    pub fn evaluate(&self, x: f64) -> Result<f64> {
        if !(x >= 0.0) || x.is_infinite() {
            return Err(domain("x", x, "[0, inf)"));
        }
        match *self {
            ThresholdSpec::GarivierBounded { horizon } => bounded_garivier(x, horizon),
            ThresholdSpec::CombesBounded { horizon, set_size } => {
                bounded_combes(x, horizon, set_size)
            }
            _ => Ok(self.evaluate_unchecked(x)),
        }
    }

    /// Evaluation without argument checks. `C^g` at `x = 0` is its limit
    /// `min_λ g(λ)/λ`.
    pub(crate) fn evaluate_unchecked(&self, x: f64) -> f64 {
        match *self {
            ThresholdSpec::Universal { one_sided } => {
                universal_unchecked(x, if one_sided { Sides::One } else { Sides::Two })
            }
            ThresholdSpec::Cg { g } => g.threshold_unchecked(x),
            ThresholdSpec::GarivierBounded { horizon } => {
                bounded_garivier(x, horizon).unwrap_or(f64::NAN)
            }
            ThresholdSpec::CombesBounded { horizon, set_size } => {
                bounded_combes(x, horizon, set_size).unwrap_or(f64::NAN)
            }
        }
    }
}

/// Per-arm correction `c ln(d + ln N_a)` together with the matching
/// threshold curve.
///
/// Gaussian and Gamma arms admit `c = 2, d = 4` with `C^{g_G}` and
/// `C^{g_Γ}`; every other family uses `c = 3, d = 1` with `𝒯`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorrectionClass {
    General,
    Gaussian,
    Gamma,
}

impl CorrectionClass {
    /// The tightest class valid for every arm in `families`.
    pub fn for_families(families: &[ArmFamily]) -> Self {
        if families
            .iter()
            .all(|f| matches!(f, ArmFamily::Gaussian { .. }))
        {
            CorrectionClass::Gaussian
        } else if families.iter().all(|f| matches!(f, ArmFamily::Gamma { .. })) {
            CorrectionClass::Gamma
        } else {
            CorrectionClass::General
        }
    }

    pub fn c(&self) -> f64 {
        match self {
            CorrectionClass::General => 3.0,
            CorrectionClass::Gaussian | CorrectionClass::Gamma => 2.0,
        }
    }

    pub fn d(&self) -> f64 {
        match self {
            CorrectionClass::General => 1.0,
            CorrectionClass::Gaussian | CorrectionClass::Gamma => 4.0,
        }
    }

    /// `c ln(d + ln n)`; zero for an arm never pulled.
    pub fn correction(&self, count: u64) -> f64 {
        if count == 0 {
            0.0
        } else {
            self.c() * (self.d() + (count as f64).ln()).ln()
        }
    }

    pub fn curve(&self, sides: Sides) -> ThresholdSpec {
        match self {
            CorrectionClass::General => ThresholdSpec::universal(sides),
            CorrectionClass::Gaussian => ThresholdSpec::Cg {
                g: GFunction::Gaussian,
            },
            CorrectionClass::Gamma => ThresholdSpec::Cg { g: GFunction::Gamma },
        }
    }

    /// Whether the per-arm deviations are clipped at zero before summing.
    ///
    /// The general-family inequality controls `[N_a d - 3 ln(1 + ln N_a)]⁺`;
    /// the Gaussian and Gamma ones control the unclipped difference.
    pub fn clipped(&self) -> bool {
        matches!(self, CorrectionClass::General)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_spec_is_nondecreasing() {
        let specs = [
            ThresholdSpec::Universal { one_sided: false },
            ThresholdSpec::Universal { one_sided: true },
            ThresholdSpec::Cg { g: GFunction::Gaussian },
            ThresholdSpec::Cg { g: GFunction::Gamma },
            ThresholdSpec::Cg { g: GFunction::IdealChiSq },
            ThresholdSpec::GarivierBounded { horizon: 1e5 },
            ThresholdSpec::CombesBounded { horizon: 1e5, set_size: 3 },
        ];
        for spec in specs {
            let mut prev = f64::NEG_INFINITY;
            for i in 0..1000 {
                let x = i as f64 * 0.1;
                let v = spec.evaluate(x).unwrap();
                assert!(v >= prev - 1e-9, "{spec:?} at {x}: {v} < {prev}");
                prev = v;
            }
        }
    }

    #[test]
    fn class_selection() {
        let g = ArmFamily::Gaussian { sigma: 1.0 };
        assert_eq!(CorrectionClass::for_families(&[g, g]), CorrectionClass::Gaussian);
        assert_eq!(
            CorrectionClass::for_families(&[ArmFamily::exponential()]),
            CorrectionClass::Gamma
        );
        assert_eq!(
            CorrectionClass::for_families(&[g, ArmFamily::Bernoulli]),
            CorrectionClass::General
        );
        assert_eq!(CorrectionClass::General.correction(1), 0.0);
        assert_eq!(CorrectionClass::Gaussian.correction(0), 0.0);
    }
}
