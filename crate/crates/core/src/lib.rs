//! Random holomorphic functions with real zeros, built from sampled point processes.
//!
//! The crate samples point processes on the line (unfolded circular ensembles,
//! rescaled Gaussian β-ensembles, Poisson and sine-kernel processes), evaluates the
//! compensated principal-value products whose zeros are those points, and provides
//! the Monte Carlo diagnostics used to check the convergence of these functions as
//! the ensemble size grows.
//!
//! Module map:
//!
//! * [`point_process`]: sorted configurations, signed counting functions, unfolding maps.
//! * [`ensembles`]: seeded samplers for every supported ensemble.
//! * [`kernels`]: correlation kernels, determinantal correlations, sine-kernel DPP sampling.
//! * [`compensators`]: deterministic compensator measures and their principal-value integrals.
//! * [`holo`]: truncated and Weierstrass products, log-derivatives, zero counting.
//! * [`diagnostics`]: counting statistics, bound fitting, stabilization across sizes.
//! * [`zeta`]: zeta-zero tables, rescaled windows and comparison with the sine kernel.

pub mod compensators;
pub mod diagnostics;
pub mod ensembles;
mod error;
pub mod holo;
pub mod kernels;
pub mod linalg;
pub mod point_process;
pub mod quad;
pub mod rng;
pub mod stats;
pub mod zeta;

pub use error::{Error, Result};
pub use num_complex::Complex64;
