//! Gaussian inputs and the coefficient series of their exponentials.
//!
//! The model is the formal identity
//!
//! ```text
//!     exp( Σ_{k≥1} X(k)/√k · z^k ) = Σ_{n≥0} A(n) z^n
//! ```
//!
//! with `X(k)` independent standard complex Gaussians (real and imaginary
//! parts each of variance 1/2). Exponent coefficients are stored indexed by
//! power: `exponent[k]` multiplies `z^k`, and `exponent[0]` is always zero.

mod circle;
mod relaxed;
mod sample;
mod series;

pub use circle::{
    cauchy_coefficients, cauchy_coefficients_adaptive, coeff_via_cauchy, eval_exponent_on_circle,
    eval_on_circle, mean_square_adaptive, CauchyEstimate, CircleEvaluator, CircleSamples, MeanSquare,
    CAUCHY_MAX_POINTS, CAUCHY_TOL,
};
pub use relaxed::exp_series_fast;
pub(crate) use sample::draw;
pub use sample::{GaussianSequence, InputModel, MAX_TERMS};
pub use series::{exp_series_naive, exp_series_real};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Which coefficients of the infinite exponent a series was built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesKind {
    /// Every exponent term that can influence `A(0..=N)` was present.
    Full,
    /// Exponent truncated after `z^R` with `R < N`.
    Truncated(usize),
    /// Exponential of the terms with `k <= max_part`: coefficients are sums
    /// of `a(λ)` over partitions with largest part at most `max_part`.
    Restricted(usize),
}

/// Method used to exponentiate a series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    #[default]
    Naive,
    Fast,
}

impl std::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "naive" => Ok(Method::Naive),
            "fast" => Ok(Method::Fast),
            other => Err(format!("unknown method `{other}` (expected naive|fast)")),
        }
    }
}

/// Coefficients `A(0..=N)` of an exponential series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientSeries {
    pub coeffs: Vec<Complex64>,
    pub kind: SeriesKind,
}

impl CoefficientSeries {
    /// Largest index `N` held by the series.
    pub fn n_max(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn get(&self, n: usize) -> Option<Complex64> {
        self.coeffs.get(n).copied()
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Largest absolute deviation from `other` over the common index range.
    pub fn max_abs_diff(&self, other: &CoefficientSeries) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

/// Kind tag for exponentiating an exponent whose last index is `r` up to `n_max`.
pub(crate) fn kind_for(r: usize, n_max: usize) -> SeriesKind {
    if r >= n_max {
        SeriesKind::Full
    } else {
        SeriesKind::Truncated(r)
    }
}

/// Dispatches to the naive or fast exponential.
pub fn exp_series(exponent: &[Complex64], n_max: usize, method: Method) -> CoefficientSeries {
    match method {
        Method::Naive => exp_series_naive(exponent, n_max),
        Method::Fast => exp_series_fast(exponent, n_max),
    }
}
