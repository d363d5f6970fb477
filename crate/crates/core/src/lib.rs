//! Simulation and verification toolkit for diffusion approximations of
//! Markov chains driven by Poisson random measures.
//!
//! The crate is split along the objects it manipulates:
//!
//! - [`measures`]: reproducible random streams, marked Poisson measures and
//!   the analytic bound functions used to check interpolation errors.
//! - [`paths`]: right-continuous step paths, piecewise-affine grid paths and
//!   the Lipschitz operators acting on them (interpolation, running max,
//!   local time, reflection, time change, linear ODE map).
//! - [`models`]: chain descriptors, exact thinning simulation, fluid limits
//!   and diffusion-limit samplers for the builtin model zoo.
//! - [`hawkes`]: exponential-kernel Hawkes processes and their scaling limits.
//! - [`distance`]: empirical distance surrogates and log-log rate fits.
//! - [`stats`]: goodness-of-fit tests and summary helpers shared by the
//!   experiment runner and the test suites.

pub mod distance;
pub mod error;
pub mod hawkes;
pub mod measures;
pub mod models;
pub mod paths;
pub mod stats;

pub use error::{Error, Result};
