use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default budget on `log2(X_ℓ)`; schedules must fit in `u128`.
pub const DEFAULT_SCALE_BUDGET_LOG2: u32 = 120;

/// Inputs to [`build_schedule`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScheduleParams {
    pub ell: u32,
    /// Exponent `K` in `X_ℓ = 2^{ℓ^K}`.
    pub k_exponent: f64,
    pub epsilon: f64,
    /// `C₀`; `None` selects `1 + 100K`.
    pub c0: Option<f64>,
    pub budget_log2: u32,
}

impl ScheduleParams {
    pub fn new(ell: u32, k_exponent: f64) -> Self {
        ScheduleParams {
            ell,
            k_exponent,
            epsilon: 0.25,
            c0: None,
            budget_log2: DEFAULT_SCALE_BUDGET_LOG2,
        }
    }

    /// The default desk profile `ℓ = 2, K = 2, ε = 0.25`.
    pub fn desk() -> Self {
        Self::new(2, 2.0)
    }
}

/// Every deterministic scale parameter of the dyadic block decomposition.
///
/// With `X_ℓ = 2^{ℓ^K}` the blocks are cut at
/// `ỹ_j = 2^{ℓ^K} e^{j/ℓ} / 2^{Kℓ^{K-1}}`, `y_j = ⌊ỹ_j⌋`, for `j = 0..=J` with
/// `J` minimal such that `y_J >= X_ℓ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockSchedule {
    pub ell: u32,
    pub k_exponent: f64,
    pub epsilon: f64,
    pub c0: f64,
    /// `X_{ℓ-1} = 2^{(ℓ-1)^K}`.
    pub x_prev: u128,
    /// `X_ℓ = 2^{ℓ^K}`.
    pub x_ell: u128,
    pub y: Vec<u128>,
    pub y_tilde: Vec<f64>,
    /// Index of the last block.
    pub j_max: usize,
    /// `⌈K ℓ^K log 2⌉`, an upper bound for `j_max`.
    pub j_ceiling: usize,
    /// `T(ℓ) = ℓ^10`.
    pub t_ell: f64,
    /// `T₁(ℓ) = T(ℓ) / (ℓ log ℓ)`.
    pub t1_ell: f64,
}

/// Builds the schedule, failing with a scale error when `ℓ^K` exceeds the
/// budget on `log2 X_ℓ`.
pub fn build_schedule(params: ScheduleParams) -> Result<BlockSchedule> {
    let ScheduleParams {
        ell,
        k_exponent: k,
        epsilon,
        c0,
        budget_log2,
    } = params;
    if ell < 2 {
        return Err(Error::Domain(format!("ℓ must be at least 2, got {ell}")));
    }
    if !(k >= 1.0 && k.is_finite()) {
        return Err(Error::Domain(format!("K must be at least 1, got {k}")));
    }
    if !(epsilon > 0.0) {
        return Err(Error::Domain(format!("ε must be positive, got {epsilon}")));
    }
    let c0 = c0.unwrap_or(1.0 + 100.0 * k);
    if !(c0 > 0.0) {
        return Err(Error::Domain(format!("C₀ must be positive, got {c0}")));
    }
    let budget_log2 = budget_log2.min(126);
    let l = ell as f64;
    let log2_x = l.powf(k);
    if !(log2_x <= budget_log2 as f64) {
        return Err(Error::Scale {
            log2_magnitude: log2_x,
            budget_log2,
        });
    }
    let x_ell = pow2_floor(log2_x);
    let x_prev = pow2_floor((l - 1.0).powf(k));

    // log ỹ_j = (ℓ^K - Kℓ^{K-1}) log 2 + j/ℓ
    let log_y0 = (log2_x - k * l.powf(k - 1.0)) * std::f64::consts::LN_2;
    if log_y0 < 0.0 {
        return Err(Error::Domain(format!(
            "y0 = 2^(ℓ^K - Kℓ^(K-1)) < 1 for ℓ = {ell}, K = {k}; need ℓ > K"
        )));
    }
    let mut y = Vec::new();
    let mut y_tilde = Vec::new();
    loop {
        let j = y.len();
        let yt = (log_y0 + j as f64 / l).exp();
        let yj = yt.floor() as u128;
        y.push(yj);
        y_tilde.push(yt);
        if yj >= x_ell {
            break;
        }
    }
    let j_max = y.len() - 1;
    let j_ceiling = (k * log2_x * std::f64::consts::LN_2).ceil() as usize;
    if j_max > j_ceiling {
        return Err(Error::Domain(format!(
            "minimal J = {j_max} exceeds ⌈Kℓ^K log 2⌉ = {j_ceiling}"
        )));
    }
    let t_ell = l.powi(10);
    Ok(BlockSchedule {
        ell,
        k_exponent: k,
        epsilon,
        c0,
        x_prev,
        x_ell,
        y,
        y_tilde,
        j_max,
        j_ceiling,
        t_ell,
        t1_ell: t_ell / (l * l.ln()),
    })
}

/// `⌊2^e⌋` for `0 <= e < 127`.
fn pow2_floor(e: f64) -> u128 {
    if e.fract() == 0.0 {
        1u128 << (e as u32)
    } else {
        e.exp2().floor() as u128
    }
}

impl BlockSchedule {
    pub fn y0(&self) -> u128 {
        self.y[0]
    }

    /// `ℓ^K` as used in the exponents `1/ℓ^K`.
    pub fn ell_pow_k(&self) -> f64 {
        (self.ell as f64).powf(self.k_exponent)
    }

    /// `ℓ^{K/2}`.
    pub fn ell_half_k(&self) -> f64 {
        (self.ell as f64).powf(self.k_exponent / 2.0)
    }

    /// `ℓ log ℓ`.
    pub fn ell_log_ell(&self) -> f64 {
        let l = self.ell as f64;
        l * l.ln()
    }

    /// Block `j` with `y_{j-1} < k <= y_j`, if any (`1 <= j <= J`).
    pub fn block_of(&self, k: u128) -> Option<usize> {
        if k <= self.y[0] || k > self.y[self.j_max] {
            return None;
        }
        // y is non-decreasing; first j with y_j >= k.
        Some(self.y.partition_point(|&yj| yj < k))
    }

    /// True when block `j` belongs to the far range `n / y_j > ℓ^{100K}`.
    pub fn is_far_block(&self, n: u128, j: usize) -> bool {
        let cutoff = (self.ell as f64).powf(100.0 * self.k_exponent);
        let yj = self.y[j] as f64;
        yj > 0.0 && (n as f64 / yj) > cutoff
    }

    /// `y_j` as a `usize`, failing when it does not fit the simulation budget.
    pub fn y_usize(&self, j: usize) -> Result<usize> {
        usize::try_from(self.y[j]).map_err(|_| Error::Budget(format!("y_{j} = {} is too large", self.y[j])))
    }

    /// `(X_{ℓ-1}, X_ℓ]` as `usize` bounds.
    pub fn n_range(&self) -> Result<(usize, usize)> {
        let lo = usize::try_from(self.x_prev + 1).map_err(|_| Error::Budget("X_{ℓ-1} too large".into()))?;
        let hi = usize::try_from(self.x_ell).map_err(|_| Error::Budget("X_ℓ too large".into()))?;
        Ok((lo, hi))
    }

    /// Prefactor of `I_j`: `(1/ỹ_j)(ỹ_j/ỹ_0)^{-1/ℓ^K} = e^{-j/ℓ^{K+1}} / ỹ_j`.
    pub fn ij_prefactor(&self, j: usize) -> f64 {
        let l = self.ell as f64;
        (-(j as f64) / l.powf(self.k_exponent + 1.0)).exp() / self.y_tilde[j]
    }
}

/// `Σ_{a < k <= b} 1/k`, exact summation for short ranges and an
/// Euler-Maclaurin difference otherwise.
pub fn harmonic_range(a: u128, b: u128) -> f64 {
    const DIRECT: u128 = 1_000_000;
    if b <= a {
        0.0
    } else if b - a <= DIRECT {
        ((a + 1)..=b).rev().map(|k| 1.0 / k as f64).sum()
    } else if a >= DIRECT {
        harmonic_asymptotic(a, b)
    } else {
        harmonic_range(a, DIRECT) + harmonic_asymptotic(DIRECT, b)
    }
}

fn harmonic_asymptotic(a: u128, b: u128) -> f64 {
    let (af, bf) = (a as f64, b as f64);
    let h = |n: f64| 1.0 / (2.0 * n) - 1.0 / (12.0 * n * n) + 1.0 / (120.0 * n.powi(4));
    ((bf - af) / af).ln_1p() + h(bf) - h(af)
}

/// One-step supermartingale factor
/// `b_j = exp(-1/ℓ - 1/ℓ^{K+1} + Σ_{y_{j-1} < k <= y_j} 1/k)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BFactor {
    pub j: usize,
    pub value: f64,
    pub log_value: f64,
    pub at_most_one: bool,
}

pub fn b_factor(sched: &BlockSchedule, j: usize) -> Result<BFactor> {
    if j == 0 || j > sched.j_max {
        return Err(Error::Domain(format!(
            "b_j needs 1 <= j <= J = {}, got {j}",
            sched.j_max
        )));
    }
    let l = sched.ell as f64;
    let log_value = -1.0 / l - 1.0 / l.powf(sched.k_exponent + 1.0)
        + harmonic_range(sched.y[j - 1], sched.y[j]);
    Ok(BFactor {
        j,
        value: log_value.exp(),
        log_value,
        at_most_one: log_value <= 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn desk_schedule() {
        let s = build_schedule(ScheduleParams::desk()).unwrap();
        assert_eq!(s.x_prev, 2);
        assert_eq!(s.x_ell, 16);
        assert_eq!(s.y, vec![1, 1, 2, 4, 7, 12, 20]);
        assert_eq!(s.j_max, 6);
        assert_eq!(s.j_ceiling, 6);
        assert_eq!(s.c0, 201.0);
        assert!((s.t_ell - 1024.0).abs() < 1e-12);
        assert!((s.t1_ell - s.t_ell / (2.0 * 2f64.ln())).abs() < 1e-12);
    }

    #[test]
    fn schedule_invariants() {
        for (ell, k) in [(2, 2.0), (3, 2.0), (4, 2.0), (4, 3.0), (5, 1.5), (40, 1.2)] {
            let s = build_schedule(ScheduleParams::new(ell, k)).unwrap();
            let ratio = (1.0 / ell as f64).exp();
            for j in 1..=s.j_max {
                assert!((s.y_tilde[j] / s.y_tilde[j - 1] / ratio - 1.0).abs() < 1e-12);
            }
            for (yj, yt) in s.y.iter().zip(&s.y_tilde) {
                assert_eq!(*yj, yt.floor() as u128);
            }
            assert!(s.y[s.j_max] >= s.x_ell);
            assert!(s.y[s.j_max - 1] < s.x_ell);
            assert!(s.j_max <= s.j_ceiling);
        }
    }

    #[test]
    fn unreachable_scale_is_rejected() {
        let e = build_schedule(ScheduleParams::new(3, 25.0)).unwrap_err();
        assert!(matches!(e, Error::Scale { .. }));
        assert_eq!(e.exit_code(), 3);
    }

    #[test]
    fn bad_params() {
        assert!(build_schedule(ScheduleParams::new(1, 2.0)).is_err());
        assert!(build_schedule(ScheduleParams::new(2, 0.5)).is_err());
        assert!(build_schedule(ScheduleParams::new(2, 3.0)).is_err());
    }

    #[test]
    fn block_lookup() {
        let s = build_schedule(ScheduleParams::desk()).unwrap();
        assert_eq!(s.block_of(1), None);
        assert_eq!(s.block_of(2), Some(2));
        assert_eq!(s.block_of(3), Some(3));
        assert_eq!(s.block_of(4), Some(3));
        assert_eq!(s.block_of(13), Some(6));
        assert_eq!(s.block_of(21), None);
        assert!(!s.is_far_block(16, 6));
    }

    #[test]
    fn b_factor_desk_j1() {
        let s = build_schedule(ScheduleParams::desk()).unwrap();
        let b = b_factor(&s, 1).unwrap();
        assert!((b.value - (-5.0f64 / 8.0).exp()).abs() < 1e-12);
        assert!((b.value - 0.535_261_428_518_990).abs() < 1e-12);
        assert!(b.at_most_one);
        assert!(b_factor(&s, 0).is_err());
        assert!(b_factor(&s, 7).is_err());
    }

    #[test]
    fn b_factor_large_ell() {
        let s = build_schedule(ScheduleParams::new(40, 1.2)).unwrap();
        for j in 1..=s.j_max {
            assert!(b_factor(&s, j).unwrap().at_most_one, "j = {j}");
        }
    }

    #[test]
    fn harmonic_routes_agree() {
        let direct: f64 = (1_000_001..=3_000_000u128).map(|k| 1.0 / k as f64).sum();
        let asym = harmonic_asymptotic(1_000_000, 3_000_000);
        assert!((direct - asym).abs() < 1e-12);
        assert_eq!(harmonic_range(5, 5), 0.0);
        assert!((harmonic_range(0, 4) - 25.0 / 12.0).abs() < 1e-15);
    }

    #[test]
    fn ij_prefactor_desk() {
        let s = build_schedule(ScheduleParams::desk()).unwrap();
        assert!((s.ij_prefactor(2) - (-1.25f64).exp()).abs() < 1e-12);
        assert!((s.ij_prefactor(0) - 1.0).abs() < 1e-15);
    }
}
