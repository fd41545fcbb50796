//! Conditional-expectation checks by nested Monte Carlo: freeze a prefix of
//! `X`, redraw the rest, and compare the inner mean with its predicted value.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::schedule::{b_factor, BlockSchedule};
use crate::error::{Error, Result};
use crate::gaussian::{draw, exp_series_naive, CircleEvaluator, GaussianSequence};
use crate::rng::SeedPath;
use crate::stats::{MCEstimate, RunningStats};

/// `E[X(k)/√k · S | X(1..k)] = 0` for `S = Σ_{|λ|=n-k, λ₁<k} a(λ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IncrementCheck {
    pub n: usize,
    pub k: usize,
    pub inner_sum: Complex64,
    pub re: MCEstimate,
    pub im: MCEstimate,
}

impl IncrementCheck {
    pub fn max_abs_z(&self) -> f64 {
        self.re.z_score(0.0).abs().max(self.im.z_score(0.0).abs())
    }
}

/// Inner sample `i` of the check at `path` uses the stream `path.child(i)`.
pub fn a1_increment_check(
    x: &GaussianSequence,
    n: usize,
    k: usize,
    inner: usize,
    path: SeedPath,
) -> Result<IncrementCheck> {
    if k == 0 || k > n {
        return Err(Error::Domain(format!("need 1 <= k <= n, got k = {k}, n = {n}")));
    }
    let s = exp_series_naive(&x.exponent(k - 1)?, n - k).coeffs[n - k];
    let scale = 1.0 / (k as f64).sqrt();
    let mut re = RunningStats::new();
    let mut im = RunningStats::new();
    for i in 0..inner as u64 {
        let xk = draw(&mut path.child(i).rng());
        let z = xk * scale * s;
        re.push(z.re);
        im.push(z.im);
    }
    Ok(IncrementCheck {
        n,
        k,
        inner_sum: s,
        re: re.estimate(path.master_seed),
        im: im.estimate(path.master_seed),
    })
}

/// `E[I_j | X(1..=y_{j-1})]` against `b_j I_{j-1}` at a fixed quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupermartingaleCheck {
    pub j: usize,
    pub i_prev: f64,
    pub b_j: f64,
    pub target: f64,
    pub estimate: MCEstimate,
}

impl SupermartingaleCheck {
    pub fn z(&self) -> f64 {
        self.estimate.z_score(self.target)
    }
}

pub fn supermartingale_check(
    x: &GaussianSequence,
    sched: &BlockSchedule,
    j: usize,
    inner: usize,
    eval: &CircleEvaluator,
    path: SeedPath,
) -> Result<SupermartingaleCheck> {
    let b = b_factor(sched, j)?;
    let lo = sched.y_usize(j - 1)?;
    let hi = sched.y_usize(j)?;
    let m = eval.points() as f64;
    let prev_sq = eval.abs_sq(&x.exponent(lo)?, 1.0)?;
    let i_prev = sched.ij_prefactor(j - 1) * prev_sq.iter().sum::<f64>() / m;
    let pre_j = sched.ij_prefactor(j);
    let mut block = vec![Complex64::new(0.0, 0.0); hi + 1];
    let mut stats = RunningStats::new();
    for i in 0..inner as u64 {
        let mut rng = path.child(i).rng();
        for (k, slot) in block.iter_mut().enumerate().skip(lo + 1) {
            *slot = draw(&mut rng) / (k as f64).sqrt();
        }
        let blk_sq = eval.abs_sq(&block, 1.0)?;
        let ms: f64 = prev_sq.iter().zip(&blk_sq).map(|(p, q)| p * q).sum::<f64>() / m;
        stats.push(pre_j * ms);
    }
    Ok(SupermartingaleCheck {
        j,
        i_prev,
        b_j: b.value,
        target: b.value * i_prev,
        estimate: stats.estimate(path.master_seed),
    })
}

/// `E[|E_{β+1}(r)| | X(1..=β)] >= |E_β(r)|`, where
/// `E_β(r) = Σ_{|λ|=r, λ₁<=β} a(λ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubmartingaleCheck {
    pub beta: usize,
    pub r: usize,
    pub current: f64,
    pub estimate: MCEstimate,
}

impl SubmartingaleCheck {
    /// Standard errors by which the inner mean exceeds the current value;
    /// negative when it falls short.
    pub fn z(&self) -> f64 {
        self.estimate.z_score(self.current)
    }
}

pub fn submartingale_check(
    x: &GaussianSequence,
    beta: usize,
    r: usize,
    inner: usize,
    path: SeedPath,
) -> Result<SubmartingaleCheck> {
    let e = exp_series_naive(&x.exponent(beta)?, r).coeffs;
    let step = beta + 1;
    let scale = 1.0 / (step as f64).sqrt();
    let mut stats = RunningStats::new();
    for i in 0..inner as u64 {
        let c = draw(&mut path.child(i).rng()) * scale;
        let mut v = e[r];
        let mut pw = Complex64::new(1.0, 0.0);
        let mut mult = 1;
        while mult * step <= r {
            pw = pw * c / mult as f64;
            v += pw * e[r - mult * step];
            mult += 1;
        }
        stats.push(v.norm());
    }
    Ok(SubmartingaleCheck {
        beta,
        r,
        current: e[r].norm(),
        estimate: stats.estimate(path.master_seed),
    })
}

/// Settings for [`martingale_checks`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NestedConfig {
    pub master_seed: u64,
    pub outer: usize,
    pub inner: usize,
    /// Quadrature size for the `I_j` checks.
    pub points: usize,
}

impl Default for NestedConfig {
    fn default() -> Self {
        NestedConfig {
            master_seed: 0,
            outer: 200,
            inner: 2000,
            points: 1024,
        }
    }
}

/// Per-block pooled result of the supermartingale checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupermartingaleBlock {
    pub j: usize,
    pub b_j: f64,
    /// Mean over outer samples of `inner mean / I_{j-1}`.
    pub mean_ratio: f64,
    /// `Σ (mean - target) / sqrt(Σ stderr²)` over outer samples.
    pub pooled_z: f64,
    /// Outer samples whose own `|z| > 4`.
    pub outer_exceed: usize,
    pub outer: usize,
}

/// Summary of every nested check over all outer samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MartingaleSummary {
    pub config: NestedConfig,
    pub increment_checks: usize,
    pub increment_max_abs_z: f64,
    /// Increment checks with `|z| > 5` in either component.
    pub increment_exceed: usize,
    pub supermartingale: Vec<SupermartingaleBlock>,
    pub submartingale_checks: usize,
    pub submartingale_min_z: f64,
    /// Submartingale checks falling more than 4 standard errors short.
    pub submartingale_exceed: usize,
}

impl MartingaleSummary {
    /// Increments within 5 stderr of zero, pooled supermartingale ratios
    /// within 4 stderr of `b_j`, and no submartingale shortfall beyond 4 stderr.
    pub fn passes(&self) -> bool {
        self.increment_exceed == 0
            && self.submartingale_exceed == 0
            && self.supermartingale.iter().all(|b| b.pooled_z.abs() <= 4.0)
    }
}

struct OuterResult {
    increments: Vec<IncrementCheck>,
    supers: Vec<SupermartingaleCheck>,
    subs: Vec<SubmartingaleCheck>,
}

/// Runs the three nested checks on every outer sample of the block
/// `(X_{ℓ-1}, X_ℓ]`:
///
/// - increments for `n = X_ℓ` and every `y0 < k <= n`;
/// - `I_j` against `b_j I_{j-1}` for `1 <= j <= J`;
/// - `|E_β(r)|` for `1 <= β <= min(8, y_J - 1)` and `r ∈ {β+1, 2β+2, X_ℓ}`.
///
/// Outer sample `o` draws `X` from `(seed, o)`; each check draws its inner
/// samples from a child path of that stream.
pub fn martingale_checks(sched: &BlockSchedule, cfg: NestedConfig) -> Result<MartingaleSummary> {
    let (_, n) = sched.n_range()?;
    let y0 = sched.y_usize(0)?;
    let y_last = sched.y_usize(sched.j_max)?;
    let len = n.max(y_last);
    let eval = CircleEvaluator::new(cfg.points)?;
    let betas: Vec<usize> = (1..=8.min(y_last.saturating_sub(1))).collect();

    let outers: Vec<OuterResult> = (0..cfg.outer as u64)
        .into_par_iter()
        .map(|o| -> Result<OuterResult> {
            let path = SeedPath::new(cfg.master_seed, o);
            let x = GaussianSequence::sample(len, path)?;
            let mut tag = 0u64;
            let mut next = || {
                tag += 1;
                path.child(tag)
            };
            let increments = ((y0 + 1)..=n)
                .map(|k| a1_increment_check(&x, n, k, cfg.inner, next()))
                .collect::<Result<Vec<_>>>()?;
            let supers = (1..=sched.j_max)
                .map(|j| supermartingale_check(&x, sched, j, cfg.inner, &eval, next()))
                .collect::<Result<Vec<_>>>()?;
            let mut subs = Vec::new();
            for &beta in &betas {
                for r in [beta + 1, 2 * beta + 2, n] {
                    subs.push(submartingale_check(&x, beta, r, cfg.inner, next())?);
                }
            }
            Ok(OuterResult {
                increments,
                supers,
                subs,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut increment_checks = 0;
    let mut increment_max_abs_z = 0.0f64;
    let mut increment_exceed = 0;
    let mut submartingale_checks = 0;
    let mut submartingale_min_z = f64::INFINITY;
    let mut submartingale_exceed = 0;
    for o in &outers {
        for c in &o.increments {
            increment_checks += 1;
            let z = c.max_abs_z();
            increment_max_abs_z = increment_max_abs_z.max(z);
            increment_exceed += usize::from(z > 5.0);
        }
        for c in &o.subs {
            submartingale_checks += 1;
            let z = c.z();
            submartingale_min_z = submartingale_min_z.min(z);
            submartingale_exceed += usize::from(z < -4.0);
        }
    }
    let supermartingale = (1..=sched.j_max)
        .map(|j| {
            let checks: Vec<&SupermartingaleCheck> =
                outers.iter().map(|o| &o.supers[j - 1]).collect();
            let diff: f64 = checks.iter().map(|c| c.estimate.mean - c.target).sum();
            let var: f64 = checks.iter().map(|c| c.estimate.stderr.powi(2)).sum();
            let pooled_z = if var > 0.0 { diff / var.sqrt() } else { 0.0 };
            SupermartingaleBlock {
                j,
                b_j: checks.first().map_or(f64::NAN, |c| c.b_j),
                mean_ratio: checks
                    .iter()
                    .map(|c| c.estimate.mean / c.i_prev)
                    .sum::<f64>()
                    / checks.len().max(1) as f64,
                pooled_z,
                outer_exceed: checks.iter().filter(|c| c.z().abs() > 4.0).count(),
                outer: checks.len(),
            }
        })
        .collect();
    Ok(MartingaleSummary {
        config: cfg,
        increment_checks,
        increment_max_abs_z,
        increment_exceed,
        supermartingale,
        submartingale_checks,
        submartingale_min_z,
        submartingale_exceed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blocks::{build_schedule, ScheduleParams};

    fn desk() -> BlockSchedule {
        build_schedule(ScheduleParams::desk()).unwrap()
    }

    #[test]
    fn increment_mean_is_zero() {
        let x = GaussianSequence::sample(16, SeedPath::new(5, 0)).unwrap();
        let c = a1_increment_check(&x, 12, 5, 4000, SeedPath::new(5, 100)).unwrap();
        assert!(c.max_abs_z() < 5.0);
        assert!(a1_increment_check(&x, 4, 5, 10, SeedPath::new(5, 1)).is_err());
    }

    #[test]
    fn supermartingale_target_matches() {
        let s = desk();
        let x = GaussianSequence::sample(20, SeedPath::new(6, 0)).unwrap();
        let eval = CircleEvaluator::new(1024).unwrap();
        for j in 1..=s.j_max {
            let c = supermartingale_check(&x, &s, j, 4000, &eval, SeedPath::new(6, j as u64)).unwrap();
            assert!(c.z().abs() < 5.0, "j = {j}: {c:?}");
        }
    }

    #[test]
    fn zero_prefix_submartingale() {
        // With X ≡ 0 up to β, E_β(r) = 0 for r >= 1 and the inner mean is >= 0.
        let x = GaussianSequence::zeros(10).unwrap();
        let c = submartingale_check(&x, 2, 3, 500, SeedPath::new(7, 0)).unwrap();
        assert_eq!(c.current, 0.0);
        assert!(c.estimate.mean > 0.0);
    }

    #[test]
    fn summary_is_thread_independent() {
        let s = desk();
        let cfg = NestedConfig {
            master_seed: 9,
            outer: 4,
            inner: 50,
            points: 256,
        };
        let a = martingale_checks(&s, cfg).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let b = pool.install(|| martingale_checks(&s, cfg).unwrap());
        assert_eq!(a, b);
        assert_eq!(a.supermartingale.len(), s.j_max);
    }
}
