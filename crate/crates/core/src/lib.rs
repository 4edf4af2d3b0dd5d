//! Simulation and estimation for the alpha-Brownian bridge
//! `dX_t = dW_t - alpha X_t / (1 - t) dt` on `[0, 1)`.
//!
//! - [`bridge`]: exact and Euler path generation, transition laws, rescaling.
//! - [`stats`]: the weighted energy `I_T`, the closed-form MLE and the likelihood.
//! - [`analytic`]: the exact expectation of the MLE and the bias-corrected estimator.
//! - [`bayes`]: Jeffreys and uniform priors, posterior mean and median.
//! - [`study`]: the Monte Carlo bias/MSE study.

pub mod analytic;
pub mod bayes;
pub mod bridge;
pub mod error;
pub mod quad;
pub mod rng;
pub mod roots;
pub mod stats;
pub mod study;
mod util;

pub use error::{Error, Result};
