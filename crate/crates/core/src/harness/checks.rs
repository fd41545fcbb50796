use serde::{Deserialize, Serialize};

use super::simulate::for_trials;
use super::CampaignConfig;
use crate::blocks::{block_sweep, build_schedule};
use crate::error::{Error, Result};
use crate::gaussian::{exp_series_fast, exp_series_naive};
use crate::partition::{a_oracle, decompose};
use crate::rng::SeedPath;

/// Largest `n` compared against partition enumeration by default.
pub const DEFAULT_ORACLE_N: usize = 12;
/// Largest `n` split by enumeration in [`decompose_check`]; above it only the
/// sweep split is checked against the series.
pub const DECOMPOSE_ENUMERATION_N: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub trials: usize,
    pub oracle_n: usize,
    pub n_max: usize,
    /// `max |naive - oracle| / |oracle|` over trials and `n <= oracle_n`.
    pub naive_vs_oracle: f64,
    /// `max_n |fast - naive| / max_n |naive|` over trials, up to `n_max`.
    pub fast_vs_naive: f64,
    pub oracle_tol: f64,
    pub fast_tol: f64,
    pub passed: bool,
}

/// Naive series against enumeration, and the fast series against the naive one.
pub fn oracle_check(cfg: &CampaignConfig, oracle_n: usize) -> Result<OracleReport> {
    cfg.validate()?;
    if oracle_n > 30 {
        return Err(Error::Config(format!("oracle comparison is capped at n = 30, got {oracle_n}")));
    }
    let naive_cfg = CampaignConfig {
        method: crate::gaussian::Method::Naive,
        ..cfg.clone()
    };
    naive_cfg.check_budget(cfg.n_max)?;
    let len = cfg.n_max.max(oracle_n).max(1);
    let (mut worst_oracle, mut worst_fast) = (0.0f64, 0.0f64);
    cfg.install(|| {
        for_trials(
            0..cfg.trials as u64,
            |t| -> Result<(f64, f64)> {
                let x = cfg.input.sample(len, SeedPath::new(cfg.master_seed, t))?;
                let exponent = x.exponent(len)?;
                let naive = exp_series_naive(&exponent, len);
                let mut rel = 0.0f64;
                for n in 0..=oracle_n {
                    let want = a_oracle(n as u32, &x)?;
                    let err = (naive.coeffs[n] - want).norm();
                    rel = rel.max(if want.norm() > 0.0 { err / want.norm() } else { err });
                }
                let fast = exp_series_fast(&exponent, len);
                let scale = naive.max_abs().max(f64::MIN_POSITIVE);
                Ok((rel, fast.max_abs_diff(&naive) / scale))
            },
            |_, (a, b)| {
                worst_oracle = worst_oracle.max(a);
                worst_fast = worst_fast.max(b);
                Ok(())
            },
        )
    })?;
    let (oracle_tol, fast_tol) = (1e-9, 1e-8);
    Ok(OracleReport {
        trials: cfg.trials,
        oracle_n,
        n_max: len,
        naive_vs_oracle: worst_oracle,
        fast_vs_naive: worst_fast,
        oracle_tol,
        fast_tol,
        passed: worst_oracle <= oracle_tol && worst_fast <= fast_tol,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecomposeReport {
    pub trials: usize,
    pub y0: usize,
    pub n_lo: usize,
    pub n_hi: usize,
    /// `max |A0+A1+A2+A3 - A(n)|` with the split read off the sweep.
    pub sweep_identity: f64,
    /// `max |A0+A1+A2+A3 - A(n)|` with the split from enumeration (`n <= 40`).
    pub enumeration_identity: f64,
    /// `max_r |A_r(sweep) - A_r(enumeration)|`.
    pub sweep_vs_enumeration: f64,
    pub tol: f64,
    pub passed: bool,
}

/// The four-way split on every `n` of `(X_{ℓ-1}, X_ℓ]`.
pub fn decompose_check(cfg: &CampaignConfig) -> Result<DecomposeReport> {
    cfg.validate()?;
    let sched = build_schedule(cfg.schedule)?;
    let (n_lo, n_hi) = sched.n_range()?;
    let y0 = sched.y_usize(0)?;
    let mut worst = [0.0f64; 3];
    cfg.install(|| {
        for_trials(
            0..cfg.trials as u64,
            |t| -> Result<[f64; 3]> {
                let x = cfg.input.sample(n_hi, SeedPath::new(cfg.master_seed, t))?;
                let series = exp_series_naive(&x.exponent(n_hi)?, n_hi);
                let sweep = block_sweep(&x, &sched, n_lo, n_hi, None)?;
                let mut w = [0.0f64; 3];
                for n in n_lo..=n_hi {
                    let p = sweep.parts_at(n).expect("n in sweep range");
                    let a = series.coeffs[n];
                    w[0] = w[0].max((p.iter().sum::<num_complex::Complex64>() - a).norm());
                    if n <= DECOMPOSE_ENUMERATION_N {
                        let d = decompose(n as u32, &x, y0 as u32)?;
                        w[1] = w[1].max((d.total() - a).norm());
                        for (q, e) in p.iter().zip(d.parts()) {
                            w[2] = w[2].max((q - e).norm());
                        }
                    }
                }
                Ok(w)
            },
            |_, w| {
                for i in 0..3 {
                    worst[i] = worst[i].max(w[i]);
                }
                Ok(())
            },
        )
    })?;
    let tol = 1e-12;
    Ok(DecomposeReport {
        trials: cfg.trials,
        y0,
        n_lo,
        n_hi,
        sweep_identity: worst[0],
        enumeration_identity: worst[1],
        sweep_vs_enumeration: worst[2],
        tol,
        passed: worst.iter().all(|&w| w <= tol),
    })
}
