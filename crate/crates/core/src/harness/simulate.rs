use std::ops::Range;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::CampaignConfig;
use crate::error::{Error, Result};
use crate::rng::SeedPath;
use crate::stats::{quantile, MCEstimate, RunningStats};

/// Trials are generated in chunks of this size, then folded in trial order.
const CHUNK: u64 = 1024;

/// One row of the per-trial file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialRow {
    pub trial: u64,
    pub n: usize,
    #[serde(rename = "re_A")]
    pub re_a: f64,
    #[serde(rename = "im_A")]
    pub im_a: f64,
    #[serde(rename = "abs_A")]
    pub abs_a: f64,
}

/// One row of the aggregate file. `stderr` belongs to `mean_sq`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub n: usize,
    pub count: u64,
    pub mean_abs: f64,
    pub mean_sq: f64,
    pub stderr: f64,
}

/// Streaming moments of `|A(n)|` and `|A(n)|²` over the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Aggregator {
    pub grid: Vec<usize>,
    abs: Vec<RunningStats>,
    sq: Vec<RunningStats>,
}

impl Aggregator {
    pub fn new(grid: Vec<usize>) -> Self {
        let k = grid.len();
        Aggregator {
            grid,
            abs: vec![RunningStats::new(); k],
            sq: vec![RunningStats::new(); k],
        }
    }

    fn push(&mut self, values: &[Complex64]) {
        for (i, a) in values.iter().enumerate() {
            let s = a.norm_sqr();
            self.abs[i].push(s.sqrt());
            self.sq[i].push(s);
        }
    }

    pub fn merge(&mut self, other: &Aggregator) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::Contract("merging aggregates over different grids".into()));
        }
        for i in 0..self.grid.len() {
            self.abs[i].merge(&other.abs[i]);
            self.sq[i].merge(&other.sq[i]);
        }
        Ok(())
    }

    pub fn rows(&self) -> Vec<AggregateRow> {
        (0..self.grid.len())
            .map(|i| AggregateRow {
                n: self.grid[i],
                count: self.sq[i].count(),
                mean_abs: self.abs[i].mean(),
                mean_sq: self.sq[i].mean(),
                stderr: self.sq[i].stderr(),
            })
            .collect()
    }

    pub fn abs_estimate(&self, i: usize, seed: u64) -> MCEstimate {
        self.abs[i].estimate(seed)
    }

    pub fn sq_estimate(&self, i: usize, seed: u64) -> MCEstimate {
        self.sq[i].estimate(seed)
    }
}

/// `A(0..=n_max)` for one trial.
pub fn trial_series(cfg: &CampaignConfig, trial: u64) -> Result<Vec<Complex64>> {
    let x = cfg.input.sample(cfg.n_max, SeedPath::new(cfg.master_seed, trial))?;
    let s = x.coefficients(cfg.n_max, cfg.method)?;
    if !s.is_finite() {
        return Err(Error::NonFinite(format!("trial {trial} produced a non-finite coefficient")));
    }
    Ok(s.coeffs)
}

/// Runs `per_trial` on trials `range` in parallel and hands the results to
/// `fold` in trial order.
pub(crate) fn for_trials<T: Send>(
    range: Range<u64>,
    per_trial: impl Fn(u64) -> Result<T> + Sync,
    mut fold: impl FnMut(u64, T) -> Result<()>,
) -> Result<()> {
    let mut start = range.start;
    while start < range.end {
        let end = (start + CHUNK).min(range.end);
        let chunk: Vec<T> = (start..end).into_par_iter().map(&per_trial).collect::<Result<_>>()?;
        for (t, v) in (start..end).zip(chunk) {
            fold(t, v)?;
        }
        start = end;
    }
    Ok(())
}

/// Aggregates over trials `range`, calling `on_row` for every per-trial row
/// in `(trial, n)` order. Runs on the current rayon pool.
pub fn aggregate_trials(
    cfg: &CampaignConfig,
    range: Range<u64>,
    mut on_row: impl FnMut(&TrialRow) -> Result<()>,
) -> Result<Aggregator> {
    cfg.validate()?;
    cfg.check_budget(cfg.n_max)?;
    let mut agg = Aggregator::new(cfg.n_grid.clone());
    let grid = &cfg.n_grid;
    for_trials(
        range,
        |t| {
            let a = trial_series(cfg, t)?;
            Ok(grid.iter().map(|&n| a[n]).collect::<Vec<_>>())
        },
        |t, values| {
            for (&n, a) in grid.iter().zip(&values) {
                on_row(&TrialRow {
                    trial: t,
                    n,
                    re_a: a.re,
                    im_a: a.im,
                    abs_a: a.norm(),
                })?;
            }
            agg.push(&values);
            Ok(())
        },
    )?;
    Ok(agg)
}

/// Aggregates of a simulation campaign.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationDataset {
    pub aggregates: Vec<AggregateRow>,
    /// `|mean_sq - 1| > 5 · stderr` at some `n`, for Gaussian input.
    pub second_moment_flags: Vec<usize>,
}

/// Runs every trial of `cfg` on its own pool, streaming per-trial rows to `on_row`.
pub fn run_simulation(
    cfg: &CampaignConfig,
    on_row: impl FnMut(&TrialRow) -> Result<()> + Send,
) -> Result<SimulationDataset> {
    let agg = cfg.install(|| aggregate_trials(cfg, 0..cfg.trials as u64, on_row))?;
    let aggregates = agg.rows();
    let second_moment_flags = match cfg.input {
        crate::gaussian::InputModel::Gaussian => aggregates
            .iter()
            .filter(|r| r.count > 1 && (r.mean_sq - 1.0).abs() > 5.0 * r.stderr)
            .map(|r| r.n)
            .collect(),
        crate::gaussian::InputModel::Zero => Vec::new(),
    };
    Ok(SimulationDataset {
        aggregates,
        second_moment_flags,
    })
}

/// One point of the first-moment curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentPoint {
    pub n: usize,
    pub mean_abs: MCEstimate,
    /// `(log n)^{-1/4}`.
    pub reference: f64,
    /// `est(n)/est(previous n)`, next to `(log prev / log n)^{1/4}`.
    pub ratio: Option<f64>,
    pub reference_ratio: Option<f64>,
    /// Estimate exceeds the previous one by more than two combined stderrs.
    pub increase_flag: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentCurve {
    pub points: Vec<MomentPoint>,
    /// Every estimate is zero (e.g. `X ≡ 0`), so ratios are meaningless.
    pub degenerate: bool,
}

/// `E|A(n)|` over the grid against the `(log n)^{-1/4}` profile.
pub fn moment_curve(cfg: &CampaignConfig) -> Result<MomentCurve> {
    let agg = cfg.install(|| aggregate_trials(cfg, 0..cfg.trials as u64, |_| Ok(())))?;
    let mut points: Vec<MomentPoint> = Vec::with_capacity(agg.grid.len());
    for (i, &n) in agg.grid.iter().enumerate() {
        let est = agg.abs_estimate(i, cfg.master_seed);
        let reference = if n >= 2 { (n as f64).ln().powf(-0.25) } else { f64::NAN };
        let (ratio, reference_ratio, increase_flag) = match points.last() {
            Some(p) if p.n >= 2 => {
                let ratio = (p.mean_abs.mean > 0.0).then(|| est.mean / p.mean_abs.mean);
                let rr = ((p.n as f64).ln() / (n as f64).ln()).powf(0.25);
                let slack = 2.0 * (est.stderr.powi(2) + p.mean_abs.stderr.powi(2)).sqrt();
                (ratio, Some(rr), est.mean > p.mean_abs.mean + slack)
            }
            _ => (None, None, false),
        };
        points.push(MomentPoint {
            n,
            mean_abs: est,
            reference,
            ratio,
            reference_ratio,
            increase_flag,
        });
    }
    let degenerate = points.iter().all(|p| p.mean_abs.mean == 0.0);
    Ok(MomentCurve { points, degenerate })
}

pub const GROWTH_CAVEAT: &str = "log log n barely moves at these sizes: G is a sanity \
diagnostic of the normalised maximum, not evidence for or against the almost sure growth rate";

/// Distribution of `G = max_{n₀<=n<=N} |A(n)| / (log n)^{3/4+ε}` over trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthReport {
    pub n0: usize,
    pub n_max: usize,
    pub epsilon: f64,
    pub values: Vec<f64>,
    pub median: f64,
    pub p90: f64,
    pub p99: f64,
    pub max: f64,
    /// Level compared against; the large-value threshold for `|A(n)|`.
    pub constant: f64,
    pub exceedances: usize,
    pub caveat: String,
}

pub fn growth_statistic(a: &[Complex64], n0: usize, epsilon: f64) -> f64 {
    let e = 0.75 + epsilon;
    (n0..a.len())
        .map(|n| a[n].norm() / (n as f64).ln().powf(e))
        .fold(0.0, f64::max)
}

pub fn growth_report(cfg: &CampaignConfig) -> Result<GrowthReport> {
    cfg.validate()?;
    if cfg.growth_n0 < 3 {
        return Err(Error::Config(format!("n0 must be at least 3, got {}", cfg.growth_n0)));
    }
    if cfg.growth_n0 > cfg.n_max {
        return Err(Error::Config(format!("n0 = {} exceeds n_max = {}", cfg.growth_n0, cfg.n_max)));
    }
    cfg.check_budget(cfg.n_max)?;
    let eps = cfg.schedule.epsilon;
    let mut values = Vec::with_capacity(cfg.trials);
    cfg.install(|| {
        for_trials(
            0..cfg.trials as u64,
            |t| Ok(growth_statistic(&trial_series(cfg, t)?, cfg.growth_n0, eps)),
            |_, g| {
                values.push(g);
                Ok(())
            },
        )
    })?;
    let constant = cfg.thresholds.total;
    Ok(GrowthReport {
        n0: cfg.growth_n0,
        n_max: cfg.n_max,
        epsilon: eps,
        median: quantile(&values, 0.5),
        p90: quantile(&values, 0.9),
        p99: quantile(&values, 0.99),
        max: values.iter().copied().fold(0.0, f64::max),
        constant,
        exceedances: values.iter().filter(|&&g| g > constant).count(),
        values,
        caveat: GROWTH_CAVEAT.into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::{InputModel, Method};

    fn small() -> CampaignConfig {
        CampaignConfig {
            n_max: 64,
            n_grid: vec![8, 16, 64],
            trials: 300,
            master_seed: 5,
            ..CampaignConfig::default()
        }
    }

    #[test]
    fn split_and_merge_agree() {
        let cfg = small();
        let whole = aggregate_trials(&cfg, 0..300, |_| Ok(())).unwrap();
        let mut a = aggregate_trials(&cfg, 0..137, |_| Ok(())).unwrap();
        let b = aggregate_trials(&cfg, 137..300, |_| Ok(())).unwrap();
        a.merge(&b).unwrap();
        for (x, y) in whole.rows().iter().zip(a.rows()) {
            assert_eq!(x.count, y.count);
            assert!((x.mean_abs - y.mean_abs).abs() < 1e-12);
            assert!((x.mean_sq - y.mean_sq).abs() < 1e-12);
        }
    }

    #[test]
    fn rows_stream_in_order() {
        let cfg = CampaignConfig {
            trials: 3,
            ..small()
        };
        let mut seen = Vec::new();
        run_simulation(&cfg, |r| {
            seen.push((r.trial, r.n));
            Ok(())
        })
        .unwrap();
        let want: Vec<_> = (0..3).flat_map(|t| [8, 16, 64].map(|n| (t, n))).collect();
        assert_eq!(seen, want);
    }

    #[test]
    fn methods_agree_on_aggregates() {
        let naive = CampaignConfig {
            method: Method::Naive,
            trials: 20,
            ..small()
        };
        let fast = CampaignConfig {
            method: Method::Fast,
            ..naive.clone()
        };
        let a = run_simulation(&naive, |_| Ok(())).unwrap();
        let b = run_simulation(&fast, |_| Ok(())).unwrap();
        for (x, y) in a.aggregates.iter().zip(&b.aggregates) {
            assert!((x.mean_sq - y.mean_sq).abs() < 1e-9 * x.mean_sq.max(1.0));
        }
    }

    #[test]
    fn zero_input_curve_is_degenerate() {
        let cfg = CampaignConfig {
            input: InputModel::Zero,
            trials: 5,
            ..small()
        };
        let c = moment_curve(&cfg).unwrap();
        assert!(c.degenerate);
        assert!(c.points.iter().all(|p| p.ratio.is_none() || p.mean_abs.mean == 0.0));
        let g = growth_report(&cfg).unwrap();
        assert!(g.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn reference_ratio_16_256() {
        let cfg = CampaignConfig {
            n_max: 256,
            n_grid: vec![16, 256],
            trials: 10,
            ..small()
        };
        let c = moment_curve(&cfg).unwrap();
        assert!((c.points[1].reference_ratio.unwrap() - 0.5f64.powf(0.25)).abs() < 1e-12);
    }

    #[test]
    fn growth_rejects_small_n0() {
        let cfg = CampaignConfig {
            growth_n0: 2,
            ..small()
        };
        assert!(matches!(growth_report(&cfg), Err(Error::Config(_))));
    }
}
