//! Streaming estimators shared by the Monte Carlo checks.

use serde::{Deserialize, Serialize};

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Mean and variance accumulator (Welford updates, Chan merges).
///
/// Merging two accumulators built from a split of the same data agrees with
/// the single-pass result to rounding.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct RunningStats {
    count: u64,
    mean: f64,
    m2: f64,
}

impl RunningStats {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&mut self, other: &RunningStats) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let n = (self.count + other.count) as f64;
        let delta = other.mean - self.mean;
        let w = other.count as f64 / n;
        self.mean += delta * w;
        self.m2 += other.m2 + delta * delta * self.count as f64 * w;
        self.count += other.count;
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance (0 for fewer than two samples).
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    pub fn stderr(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            (self.variance() / self.count as f64).sqrt()
        }
    }

    pub fn estimate(&self, seed: u64) -> MCEstimate {
        MCEstimate::from_parts(self.count, self.mean, self.variance(), seed)
    }
}

impl FromIterator<f64> for RunningStats {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = RunningStats::new();
        for x in iter {
            s.push(x);
        }
        s
    }
}

/// Monte Carlo estimate with its provenance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MCEstimate {
    pub count: u64,
    pub mean: f64,
    pub variance: f64,
    pub stderr: f64,
    pub ci95: (f64, f64),
    pub seed: u64,
}

impl MCEstimate {
    pub fn from_parts(count: u64, mean: f64, variance: f64, seed: u64) -> Self {
        let stderr = if count == 0 {
            0.0
        } else {
            (variance / count as f64).sqrt()
        };
        MCEstimate {
            count,
            mean,
            variance,
            stderr,
            ci95: (mean - Z95 * stderr, mean + Z95 * stderr),
            seed,
        }
    }

    /// Number of standard errors separating the mean from `target`.
    pub fn z_score(&self, target: f64) -> f64 {
        let d = self.mean - target;
        if self.stderr == 0.0 {
            if d == 0.0 {
                0.0
            } else {
                f64::INFINITY * d.signum()
            }
        } else {
            d / self.stderr
        }
    }

    pub fn within(&self, target: f64, sigmas: f64) -> bool {
        self.z_score(target).abs() <= sigmas
    }
}

/// Empirical frequency with a Wilson score interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Proportion {
    pub hits: u64,
    pub trials: u64,
    pub p: f64,
    pub lo: f64,
    pub hi: f64,
}

impl Proportion {
    pub fn new(hits: u64, trials: u64) -> Self {
        let (lo, hi) = wilson_interval(hits, trials, Z95);
        let p = if trials == 0 {
            0.0
        } else {
            hits as f64 / trials as f64
        };
        Proportion {
            hits,
            trials,
            p,
            lo,
            hi,
        }
    }

    pub fn stderr(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            (self.p * (1.0 - self.p) / self.trials as f64).sqrt()
        }
    }
}

/// Wilson score interval for `hits` successes out of `trials`.
pub fn wilson_interval(hits: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = hits as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    // Pin the exact endpoints that rounding would otherwise miss.
    let lo = if hits == 0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if hits >= trials { 1.0 } else { (centre + half).min(1.0) };
    (lo, hi)
}

/// Median-of-means over `blocks` contiguous blocks, in input order.
///
/// Trailing samples that do not fill a block are dropped. With `blocks == 1`
/// this is the plain mean.
pub fn median_of_means(values: &[f64], blocks: usize) -> f64 {
    let blocks = blocks.clamp(1, values.len().max(1));
    let size = values.len() / blocks;
    if size == 0 {
        return f64::NAN;
    }
    let mut means: Vec<f64> = values
        .chunks_exact(size)
        .take(blocks)
        .map(|c| c.iter().sum::<f64>() / size as f64)
        .collect();
    means.sort_by(|a, b| a.total_cmp(b));
    let m = means.len();
    if m % 2 == 1 {
        means[m / 2]
    } else {
        0.5 * (means[m / 2 - 1] + means[m / 2])
    }
}

/// Empirical quantile with linear interpolation; `values` need not be sorted.
pub fn quantile(values: &[f64], q: f64) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let pos = q.clamp(0.0, 1.0) * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    v[lo] + (v[hi] - v[lo]) * (pos - lo as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn running_stats_matches_two_pass() {
        let xs = [1.0, 4.0, 2.5, -3.0, 8.0, 0.25];
        let s: RunningStats = xs.iter().copied().collect();
        let mean = xs.iter().sum::<f64>() / 6.0;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 5.0;
        assert!((s.mean() - mean).abs() < 1e-14);
        assert!((s.variance() - var).abs() < 1e-12);
    }

    #[test]
    fn wilson_degenerate_cases() {
        let (lo, hi) = wilson_interval(0, 100, Z95);
        assert!(lo.abs() < 1e-15);
        assert!(hi > 0.0 && hi < 0.05);
        let (lo, hi) = wilson_interval(100, 100, Z95);
        assert!(lo > 0.95);
        assert!((hi - 1.0).abs() < 1e-15);
    }

    #[test]
    fn ci_contains_mean() {
        let e = MCEstimate::from_parts(10, 2.0, 4.0, 0);
        assert!(e.ci95.0 <= e.mean && e.mean <= e.ci95.1);
        assert!((e.stderr - (0.4f64).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn median_of_means_one_block_is_mean() {
        let xs = [1.0, 2.0, 3.0, 10.0];
        assert_eq!(median_of_means(&xs, 1), 4.0);
        assert_eq!(median_of_means(&xs, 2), 4.0);
        assert_eq!(median_of_means(&xs, 4), 2.5);
    }

    proptest! {
        #[test]
        fn split_merge_agrees(xs in prop::collection::vec(-1e3f64..1e3, 2..200), cut in 0usize..200) {
            let cut = cut.min(xs.len());
            let whole: RunningStats = xs.iter().copied().collect();
            let mut left: RunningStats = xs[..cut].iter().copied().collect();
            let right: RunningStats = xs[cut..].iter().copied().collect();
            left.merge(&right);
            prop_assert_eq!(left.count(), whole.count());
            prop_assert!((left.mean() - whole.mean()).abs() <= 1e-12 * (1.0 + whole.mean().abs()));
            prop_assert!((left.variance() - whole.variance()).abs() <= 1e-9 * (1.0 + whole.variance()));
        }
    }
}
