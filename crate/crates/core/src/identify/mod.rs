//! Sequential identification: problems, the GLR statistic, oracle weights,
//! D-Tracking and full episodes.

mod episode;
mod glr;
mod oracle;
mod problem;
mod tracking;

pub use episode::{
    replication_seed, run_episode, EpisodeConfig, RunRecord, SamplingRule, TraceStep,
    DEFAULT_CACHE_RADIUS,
};
pub use glr::{glr_statistic, Glr};
pub use oracle::{oracle_value, oracle_weights, oracle_weights_with, OracleOptions, OracleSolution, Witness};
pub use problem::{AltInfimum, IdentificationProblem};
pub use tracking::{tracking_floor, tracking_step, uniform_step};
