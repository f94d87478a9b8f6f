//! Estimation and inference for the joint moments of market microstructure
//! noise from high-frequency prices.
//!
//! The estimators pair each observation with forward block averages so that
//! the latent efficient price cancels and products of the remaining noise
//! terms estimate `R(j) = E[chi_{j_1} ... chi_{j_q}]`. Feasible central limit
//! theorems come with long-run variance estimates truncated at lag `k'_n`.
//!
//! Modules:
//! - [`index`]: lag tuples `j`.
//! - [`estimators`]: block statistics, covariance/correlation estimators and their variances.
//! - [`inference`]: z-statistics, p-values, confidence bands.
//! - [`oracle`]: Gaussian/AR(1) reference values.
//! - [`simulator`]: OU-with-jumps prices with AR(1) noise.
//! - [`montecarlo`]: replication engine for coverage and normality checks.
//! - [`ticks`]: `time,price` CSV input and output.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod accum;
pub mod error;
pub mod estimators;
pub mod exec;
pub mod index;
pub mod inference;
pub mod montecarlo;
pub mod normal;
pub mod oracle;
pub mod series;
pub mod simulator;
pub mod ticks;
pub mod windows;

pub use error::{Error, Result};
pub use estimators::{BlockSum, NoiseEstimator, PreAveraged};
pub use exec::Execution;
pub use index::IndexTuple;
pub use inference::{Estimate, Flag, Sided, Target};
pub use series::{NoiseRegime, ObservationSeries};
pub use simulator::{SimulatedPath, SimulationConfig};
pub use windows::{TuningWindows, WindowRule};
