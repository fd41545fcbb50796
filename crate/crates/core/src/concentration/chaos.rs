use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::{CircleEvaluator, InputModel};
use crate::rng::SeedPath;
use crate::stats::{median_of_means, MCEstimate, RunningStats};

/// Settings for [`chaos_moment_estimate`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChaosConfig {
    pub q: f64,
    /// Radius, `1 <= r <= e^{1/R}` for every `R` of the grid.
    pub radius: f64,
    pub trials: usize,
    /// Median-of-means block count.
    pub blocks: usize,
    pub master_seed: u64,
    pub input: InputModel,
    /// Quadrature points per unit of `R` (rounded up to a power of two).
    pub oversample: usize,
}

impl Default for ChaosConfig {
    fn default() -> Self {
        ChaosConfig {
            q: 1.0,
            radius: 1.0,
            trials: 10_000,
            blocks: 20,
            master_seed: 0,
            input: InputModel::Gaussian,
            oversample: 8,
        }
    }
}

/// Estimates of `E[((1/2π)∫|F_R(r e^{iθ})|² dθ)^q]` across an `R` grid,
/// with the shape `(R / (1 + (1-q)√log R))^q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentFitReport {
    pub r_grid: Vec<usize>,
    pub q: f64,
    pub radius: f64,
    /// Mean field is the median of means; variance and stderr are those of
    /// the plain sample.
    pub estimates: Vec<MCEstimate>,
    pub bound_shape: Vec<f64>,
    pub fitted_constants: Vec<f64>,
}

impl MomentFitReport {
    /// Largest over smallest fitted constant.
    pub fn constant_spread(&self) -> f64 {
        let lo = self.fitted_constants.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = self.fitted_constants.iter().copied().fold(0.0, f64::max);
        hi / lo
    }
}

pub fn bound_shape(r: usize, q: f64) -> f64 {
    let r = r as f64;
    (r / (1.0 + (1.0 - q) * r.ln().sqrt())).powf(q)
}

/// `e^{H_R}`, the exact first moment at `q = 1`, `r = 1`.
pub fn chaos_first_moment(r: usize) -> f64 {
    (1..=r).map(|k| 1.0 / k as f64).sum::<f64>().exp()
}

pub fn chaos_moment_estimate(r_grid: &[usize], cfg: ChaosConfig) -> Result<MomentFitReport> {
    if !(0.5..=1.0).contains(&cfg.q) {
        return Err(Error::Domain(format!("q must lie in [1/2, 1], got {}", cfg.q)));
    }
    if cfg.trials < 100 {
        return Err(Error::Domain(format!("need at least 100 trials, got {}", cfg.trials)));
    }
    let mut estimates = Vec::with_capacity(r_grid.len());
    for (i, &r) in r_grid.iter().enumerate() {
        if r == 0 {
            return Err(Error::Domain("R must be at least 1".into()));
        }
        let r_hi = (1.0 / r as f64).exp();
        if !(cfg.radius >= 1.0 && cfg.radius <= r_hi * (1.0 + 1e-15)) {
            return Err(Error::Domain(format!(
                "radius {} outside [1, e^(1/R)] for R = {r}",
                cfg.radius
            )));
        }
        let eval = CircleEvaluator::new((cfg.oversample.max(2) * r).next_power_of_two().max(256))?;
        let seed = cfg.master_seed.wrapping_add(i as u64);
        let values: Vec<f64> = (0..cfg.trials as u64)
            .into_par_iter()
            .map(|t| -> Result<f64> {
                let x = cfg.input.sample(r, SeedPath::new(seed, t))?;
                Ok(eval.mean_square(&x.exponent(r)?, cfg.radius)?.powf(cfg.q))
            })
            .collect::<Result<_>>()?;
        let plain: RunningStats = values.iter().copied().collect();
        let mom = median_of_means(&values, cfg.blocks);
        estimates.push(MCEstimate::from_parts(plain.count(), mom, plain.variance(), seed));
    }
    let shape: Vec<f64> = r_grid.iter().map(|&r| bound_shape(r, cfg.q)).collect();
    let fitted = estimates.iter().zip(&shape).map(|(e, s)| e.mean / s).collect();
    Ok(MomentFitReport {
        r_grid: r_grid.to_vec(),
        q: cfg.q,
        radius: cfg.radius,
        estimates,
        bound_shape: shape,
        fitted_constants: fitted,
    })
}
