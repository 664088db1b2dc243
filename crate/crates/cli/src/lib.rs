//! Experiment harness for tree-structured cross-validation.
//!
//! The `treecv` binary wraps these modules: [`run`] writes one CSV row per
//! cross-validation run, [`report`] aggregates those rows, [`bench`] times
//! both schedulers over a grid of dataset sizes and [`stability`] measures
//! how much chunked training drifts from single-pass training.

pub mod bench;
pub mod learner;
pub mod plan;
pub mod records;
pub mod report;
pub mod run;
pub mod stability;

use std::fmt;

/// Bad input from the user: flags, plan values or dataset contents.
/// The binary maps it to exit code 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Invalid(pub String);

impl fmt::Display for Invalid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Invalid {}

pub(crate) fn invalid(msg: impl Into<String>) -> anyhow::Error {
    Invalid(msg.into()).into()
}

pub use learner::{AnyLearner, LearnerSpec};
pub use plan::{DataSource, ExperimentPlan, KChoice, SynthSpec};
pub use records::RunRecord;
