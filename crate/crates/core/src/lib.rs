//! Numerical core for verifying two-term Neumann heat-trace asymptotics on
//! convex domains.
//!
//! Everything here is a pure function of immutable inputs and runs without
//! `std`: exact convex geometry for polygons, boxes and balls, rolling-ball
//! good sets, Neumann heat kernels on intervals and boxes with certified
//! truncation, box heat traces, adaptive quadrature and a seeded Monte Carlo
//! volume estimator. IO, configuration and the experiment suites live in the
//! `heatlab` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

mod error;
pub mod geometry;
pub mod good_sets;
pub mod kernels;
pub mod montecarlo;
pub mod quadrature;
pub mod spectra;

pub use error::{Error, Result};
pub use geometry::{BodyMetrics, ConvexBody, HalfPlane, Vec2};
