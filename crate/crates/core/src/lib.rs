//! Time-uniform confidence regions and sequential identification for
//! bandit models with one-parameter exponential-family arms.
//!
//! * [`expfam`]: families, divergences, sufficient statistics and the
//!   two-arm transportation cost.
//! * [`thresholds`]: threshold curves, per-arm corrections and stopping
//!   thresholds.
//! * [`confseq`]: confidence regions over subsets of arms and the bounds
//!   derived from them.
//! * [`identify`]: GLR statistics, oracle weights and Track-and-Stop
//!   episodes.
//!
//! ```
//! use banditconf::thresholds::{universal_threshold, Sides};
//!
//! let t = universal_threshold(10.0, Sides::Two).unwrap();
//! assert!(t > 10.0);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod confseq;
pub mod expfam;
pub mod identify;
mod roots;
pub mod thresholds;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/divergences.md")]
    mod divergences {}
    #[doc = include_str!("../../../book/src/thresholds.md")]
    mod thresholds {}
    #[doc = include_str!("../../../book/src/confidence.md")]
    mod confidence {}
    #[doc = include_str!("../../../book/src/identification.md")]
    mod identification {}
    #[doc = include_str!("../../../book/src/harness.md")]
    mod harness {}
}
