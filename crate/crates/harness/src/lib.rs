//! Experiment harness for the `drg-core` integrators: JSON configs, the run,
//! order, drift and level-curve studies, and their CSV output.

pub mod config;
pub mod csvio;
pub mod methods;
pub mod studies;

pub use config::{ConfigError, ExperimentSpec, Norm, ProblemSpec, Reference};
pub use methods::{MethodId, MethodOptions};
