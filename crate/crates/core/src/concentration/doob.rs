use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::TailReport;
use crate::blocks::{compute_ij_fixed, expected_i0, BlockSchedule};
use crate::error::{Error, Result};
use crate::gaussian::{exp_series_naive, CircleEvaluator, InputModel};
use crate::partition::restricted_second_moment_generating;
use crate::rng::SeedPath;
use crate::stats::{MCEstimate, Proportion, RunningStats};

/// A non-negative supermartingale `I_0, I_1, ...` with known `E[I_0]`.
pub trait SupermartingaleSequence: Sync {
    fn expected_start(&self) -> f64;
    fn sample(&self, path: SeedPath) -> Result<Vec<f64>>;
}

/// `I_j = c` for every `j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantSequence {
    pub value: f64,
    pub len: usize,
}

impl SupermartingaleSequence for ConstantSequence {
    fn expected_start(&self) -> f64 {
        self.value
    }

    fn sample(&self, _path: SeedPath) -> Result<Vec<f64>> {
        Ok(vec![self.value; self.len])
    }
}

/// `I_0..I_J` on a block schedule, each at the same quadrature size.
#[derive(Debug, Clone)]
pub struct IjSequence {
    pub sched: BlockSchedule,
    pub input: InputModel,
    eval: CircleEvaluator,
}

impl IjSequence {
    pub fn new(sched: BlockSchedule, input: InputModel, points: usize) -> Result<Self> {
        Ok(IjSequence {
            sched,
            input,
            eval: CircleEvaluator::new(points)?,
        })
    }
}

impl SupermartingaleSequence for IjSequence {
    /// Exact for any quadrature size, since `E|F_{y0}|² = e^{H_{y0}}` pointwise.
    fn expected_start(&self) -> f64 {
        match self.input {
            InputModel::Gaussian => expected_i0(&self.sched),
            InputModel::Zero => self.sched.ij_prefactor(0),
        }
    }

    fn sample(&self, path: SeedPath) -> Result<Vec<f64>> {
        let len = self.sched.y_usize(self.sched.j_max)?;
        let x = self.input.sample(len, path)?;
        (0..=self.sched.j_max)
            .map(|j| Ok(compute_ij_fixed(&x, &self.sched, j, &self.eval)?.value))
            .collect()
    }
}

/// Empirical `P[max_j I_j > λ]` against `E[I_0]/λ`, per `λ`.
pub fn doob_max_check(
    seq: &dyn SupermartingaleSequence,
    lambda_grid: &[f64],
    trials: usize,
    master_seed: u64,
) -> Result<TailReport> {
    let maxima: Vec<f64> = (0..trials as u64)
        .into_par_iter()
        .map(|t| -> Result<f64> {
            let v = seq.sample(SeedPath::new(master_seed, t))?;
            if let Some((j, bad)) = v.iter().enumerate().find(|(_, x)| !(**x >= 0.0)) {
                return Err(Error::Contract(format!(
                    "supermartingale value I_{j} = {bad} is negative or NaN"
                )));
            }
            Ok(v.iter().copied().fold(0.0, f64::max))
        })
        .collect::<Result<_>>()?;
    let e0 = seq.expected_start();
    let empirical = lambda_grid
        .iter()
        .map(|&l| Proportion::new(maxima.iter().filter(|&&m| m > l).count() as u64, trials as u64))
        .collect();
    let bounds = lambda_grid.iter().map(|&l| (e0 / l).min(1.0)).collect();
    Ok(TailReport::new(lambda_grid.to_vec(), empirical, bounds))
}

/// `E[max_{lo<β<=hi} |E_β(r)|²] <= 4 E[|E_hi(r)|²]` where
/// `E_β(r) = Σ_{|λ|=r, λ₁<=β} a(λ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DoobL2Report {
    pub lo: usize,
    pub hi: usize,
    pub r: usize,
    pub max_sq: MCEstimate,
    pub final_sq: MCEstimate,
    /// `4 E|E_hi(r)|²`, exact for Gaussian input.
    pub bound: f64,
    /// `max_sq.mean <= bound + 4 · stderr`.
    pub holds: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DoobL2Config {
    pub lo: usize,
    pub hi: usize,
    pub r: usize,
    pub trials: usize,
    pub master_seed: u64,
    pub input: InputModel,
}

pub fn doob_l2_check(cfg: DoobL2Config) -> Result<DoobL2Report> {
    let DoobL2Config {
        lo,
        hi,
        r,
        trials,
        master_seed,
        input,
    } = cfg;
    if lo >= hi {
        return Err(Error::Domain(format!("empty β range ({lo}, {hi}]")));
    }
    let rows: Vec<(f64, f64)> = (0..trials as u64)
        .into_par_iter()
        .map(|t| -> Result<(f64, f64)> {
            let x = input.sample(hi, SeedPath::new(master_seed, t))?;
            let full = x.exponent(hi)?;
            let mut max_sq = 0.0f64;
            let mut last = 0.0;
            for beta in (lo + 1)..=hi {
                let e = exp_series_naive(&full[..=beta], r).coeffs[r].norm_sqr();
                max_sq = max_sq.max(e);
                last = e;
            }
            Ok((max_sq, last))
        })
        .collect::<Result<_>>()?;
    let max_sq: RunningStats = rows.iter().map(|r| r.0).collect();
    let final_sq: RunningStats = rows.iter().map(|r| r.1).collect();
    let exact = match input {
        InputModel::Gaussian => restricted_second_moment_generating(r as u32, Some(hi as u32))?,
        InputModel::Zero => f64::from(u8::from(r == 0)),
    };
    let bound = 4.0 * exact;
    let max_est = max_sq.estimate(master_seed);
    Ok(DoobL2Report {
        lo,
        hi,
        r,
        holds: max_est.mean <= bound + 4.0 * max_est.stderr,
        max_sq: max_est,
        final_sq: final_sq.estimate(master_seed),
        bound,
    })
}
