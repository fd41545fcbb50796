//! Simulation and verification toolkit for the random coefficients `A(n)` of
//! `exp(Σ_{k≥1} X(k)/√k · z^k)` with independent standard complex Gaussian
//! `X(k)`.
//!
//! - [`gaussian`]: sampling, exponential series (naive recurrence and a fast
//!   divide-and-conquer path), circle evaluation and Cauchy recovery.
//! - [`partition`]: brute-force partition oracles for `A(n)`, its
//!   `A0..A3` split and exact restricted second moments.
//! - [`blocks`]: the dyadic block schedule and martingale diagnostics.
//! - [`concentration`]: empirical checks of tail, maximal and chaos-moment
//!   inequalities, plus exact second-moment bound evaluators.
//! - [`harness`]: reproducible Monte Carlo campaigns behind the `rmc` CLI.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod blocks;
pub mod concentration;
pub mod error;
pub mod gaussian;
pub mod harness;
pub mod partition;
pub mod rng;
pub mod stats;

pub use error::{Error, Result};
pub use num_complex::Complex64;
