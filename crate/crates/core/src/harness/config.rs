use serde::{Deserialize, Serialize};

use crate::blocks::{ScheduleParams, Thresholds};
use crate::error::{Error, Result};
use crate::gaussian::{InputModel, Method};

/// Environment variable consulted when the thread count is left on auto.
pub const THREADS_ENV: &str = "RMC_THREADS";

/// Budget on `trials · cost(N)`, counted in complex multiply-adds.
pub const DEFAULT_WORK_BUDGET: f64 = 2e13;

/// Everything that determines the output of a campaign.
///
/// `threads` is excluded from serialization: results are identical for any
/// thread count, and so is the echoed configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignConfig {
    pub n_max: usize,
    /// Indices reported by simulations; defaults to `2^3..=2^13` clipped to `n_max`.
    pub n_grid: Vec<usize>,
    pub trials: usize,
    pub master_seed: u64,
    pub method: Method,
    pub input: InputModel,
    pub schedule: ScheduleParams,
    pub thresholds: Thresholds,
    /// Lower end `n₀` of the growth window.
    pub growth_n0: usize,
    #[serde(skip)]
    pub threads: usize,
    pub work_budget: f64,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        let n_max = 1 << 13;
        CampaignConfig {
            n_max,
            n_grid: log_grid(n_max),
            trials: 1000,
            master_seed: 0,
            method: Method::Fast,
            input: InputModel::Gaussian,
            schedule: ScheduleParams::desk(),
            thresholds: Thresholds::default(),
            growth_n0: 3,
            threads: 0,
            work_budget: DEFAULT_WORK_BUDGET,
        }
    }
}

/// `2^3, 2^4, ...` up to `n_max`, plus `n_max` itself when it is not a power of two.
pub fn log_grid(n_max: usize) -> Vec<usize> {
    let mut g: Vec<usize> = (3..usize::BITS).map(|e| 1usize << e).take_while(|&n| n <= n_max).collect();
    if g.last() != Some(&n_max) && n_max >= 1 {
        g.push(n_max);
    }
    g
}

impl CampaignConfig {
    /// Default configuration with `n_max` and the matching log grid.
    pub fn with_n_max(n_max: usize) -> Self {
        CampaignConfig {
            n_max,
            n_grid: log_grid(n_max),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.n_max == 0 {
            return Err(Error::Config("n_max must be at least 1".into()));
        }
        if let Some(&bad) = self.n_grid.iter().find(|&&n| n == 0 || n > self.n_max) {
            return Err(Error::Config(format!("grid point {bad} outside [1, {}]", self.n_max)));
        }
        if !self.n_grid.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::Config("n grid must be strictly increasing".into()));
        }
        Ok(())
    }

    /// Estimated multiply-adds for `trials` series up to `n`.
    pub fn work(&self, n: usize) -> f64 {
        let n = n as f64 + 1.0;
        let per_trial = match self.method {
            Method::Naive => n * n / 2.0,
            Method::Fast => 40.0 * n * n.log2().max(1.0).powi(2),
        };
        per_trial * self.trials as f64
    }

    pub fn check_budget(&self, n: usize) -> Result<()> {
        let w = self.work(n);
        if w > self.work_budget {
            return Err(Error::Budget(format!(
                "{} trials up to n = {n} need about {w:.2e} operations, over the budget of {:.2e}",
                self.trials, self.work_budget
            )));
        }
        Ok(())
    }

    /// Resolved worker count: the explicit value, else `RMC_THREADS`, else
    /// rayon's default.
    pub fn resolved_threads(&self) -> Result<usize> {
        if self.threads > 0 {
            return Ok(self.threads);
        }
        match std::env::var(THREADS_ENV) {
            Ok(v) => v
                .trim()
                .parse::<usize>()
                .map_err(|_| Error::Config(format!("{THREADS_ENV}={v} is not a thread count"))),
            Err(_) => Ok(0),
        }
    }

    /// Runs `f` on a pool sized by [`CampaignConfig::resolved_threads`].
    pub fn install<T: Send>(&self, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.resolved_threads()?)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
        pool.install(f)
    }
}
