//! Verification suites, configuration, reports and the command line for the
//! `heatlab-core` numerical kernels.

pub mod app;
pub mod config;
pub mod error;
pub mod harness;
pub mod report;

pub use error::{exit, HarnessError, HarnessResult};
