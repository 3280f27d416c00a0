//! Experiment harness around `afdm-core`: declarative experiment
//! configs, a deterministic Monte Carlo runner, canned comparison
//! recipes, and CSV records shared by the CLI and the test suite.

pub mod config;
pub mod error;
pub mod records;
pub mod recipes;
pub mod runner;
pub mod validate;

pub use error::{Result, SimError};
