//! Threshold calculus: `h`, `h⁻¹`, `h̃_z`, the universal threshold `𝒯`, the
//! `C^g` engine, bounded-horizon thresholds and stopping thresholds.

mod bounded;
mod gfun;
mod hfun;
mod spec;
mod stopping;
mod universal;
mod zeta;

pub use bounded::{bounded_combes, bounded_garivier, bounded_time_threshold};
pub use gfun::{c_g, GFunction};
pub use hfun::{h, h_inverse, h_inverse_upper_bound, h_tilde};
pub use spec::{CorrectionClass, ThresholdSpec};
pub use stopping::StoppingThreshold;
pub use universal::{
    one_arm_threshold, tuning_cross_check, tuning_inner_min, tuning_objective,
    universal_threshold, Sides,
};
pub use zeta::{zeta, ZETA_2};

