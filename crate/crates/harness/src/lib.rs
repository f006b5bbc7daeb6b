//! Experiment driver: assembles inputs, symbols and weights on a grid,
//! evaluates both sides of the weighted inequalities and reports implied
//! constants, sweeps and regression baselines.

pub mod baseline;
pub mod config;
pub mod error;
pub mod lemmas;
pub mod report;
pub mod sweep;
pub mod verify;

pub use config::{Experiment, ExperimentConfig, Theorem};
pub use error::{HarnessError, Result};
pub use report::VerificationReport;
pub use sweep::{sweep, Axis, SweepResult};
pub use verify::{
    verify, verify_corollary, verify_endpoint, verify_maximal_lemmas, verify_sharp_pointwise, verify_strong, verify_two_weight,
};
