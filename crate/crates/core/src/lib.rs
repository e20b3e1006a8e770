//! Sign changes in segments of a stationary Gaussian AR(1) process.
//!
//! `S_n` counts the indices `i < n` with `X_i X_{i+1} < 0` in a segment of
//! `X_t = ρ X_{t-1} + √(1 - ρ²) ε_t`. This crate computes its mean and
//! variance three ways: closed forms built from Gaussian orthant
//! probabilities (exact up to `n = 4`), a randomized quasi-Monte Carlo
//! orthant engine for longer segments, and direct simulation. It also
//! implements the independent interval approximation for `E(S_n²)`.

pub mod error;
pub mod iia;
pub mod mc;
pub mod moments;
pub mod mvn;
pub mod orthant;
pub mod pattern;
pub mod quadrature;
pub mod specfun;

pub use error::{Error, Result};
pub use iia::{iia_second_moment, iia_variance, separation_search, IiaSequence, Separation, Side};
pub use mc::{simulate, SimConfig, SimResult};
pub use moments::{mean_sign_changes, pattern_probability, variance_exact, variance_numeric, MomentReport};
pub use mvn::{ar1_matrix, orthant_qmc, CorrelationMatrix, Method, ProbEstimate, QmcConfig};
pub use orthant::{ChengArgs, FourDimFactor, JArgs, Rho};
pub use pattern::SignPattern;
pub use specfun::{dilog, dilog_real_part_pair, ComplexValue};
