//! Semantic relay link model and a penalty-based joint placement and
//! bandwidth optimizer with grid-search baselines.

// `!(x > 0.0)` style checks are kept on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod barrier;
pub mod config;
pub mod error;
pub mod oracle_baselines;
pub mod penalty_solver;
pub mod sca_bounds;
pub mod subproblems;
pub mod sweep;
pub mod system_model;

pub use config::{load_config, parse_config, Config, ConfigError};
pub use error::ModelError;
pub use oracle_baselines::GridSpec;
pub use penalty_solver::{run, PenaltyConfig, SolveReport, SolveStatus};
pub use system_model::{DesignPoint, LinkRate, SigmoidFit, SystemParams};
