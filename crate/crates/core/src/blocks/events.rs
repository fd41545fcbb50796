//! Per-trial indicators of the large-value and variance events on one block
//! `(X_{ℓ-1}, X_ℓ]`.

use serde::{Deserialize, Serialize};

use super::diagnostics::{block_sweep, DIAGNOSTIC_N_MAX};
use super::ij::ij_sequence;
use super::schedule::BlockSchedule;
use crate::error::{Error, Result};
use crate::gaussian::GaussianSequence;

/// Levels for the large-value events, relative to `(log n)^{3/4+ε}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    /// Level for `|A(n)|`.
    pub total: f64,
    /// Level for each `|A_r(n)|`.
    pub part: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            total: 4.0,
            part: 1.0,
        }
    }
}

impl Thresholds {
    pub fn scaled(self, s: f64) -> Self {
        Thresholds {
            total: self.total * s,
            part: self.part * s,
        }
    }
}

/// Event indicators for one trial. `true` means the event occurred.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventRecord {
    pub n_lo: usize,
    pub n_hi: usize,
    pub thresholds: Thresholds,
    /// `sup_n |A(n)| / (log n)^{3/4+ε}`.
    pub sup_ratio: f64,
    /// The same for `A_0..A_3`.
    pub sup_part_ratio: [f64; 4],
    /// `B_ℓ`: `sup_ratio > total`.
    pub b_ell: bool,
    /// `B_ℓ^(r)`: `sup_part_ratio[r] > part`.
    pub b_parts: [bool; 4],
    pub sup_v: f64,
    pub sup_v_tilde: f64,
    pub sup_v_block: f64,
    pub sup_v2: f64,
    pub sup_v2_tilde: f64,
    pub sup_v2_block: f64,
    /// `T`: `sup V <= 2C₀ T(ℓ) ℓ^{K/2}`.
    pub t_event: bool,
    /// `T_n` for each `n` in range, in order.
    pub t_n: Vec<bool>,
    /// `sup_{n,j} V(n, y_j) > T₁(ℓ) ℓ^{K/2}`.
    pub p1_event: bool,
    /// `sup_n Ṽ(n) > T(ℓ) ℓ^{K/2}`.
    pub p1_tilde_event: bool,
    /// `I_0..I_J`.
    pub i: Vec<f64>,
    /// `S_j`: `I_j <= T₁^{1/2} / ℓ^{K/2}`.
    pub s_j: Vec<bool>,
    pub s_event: bool,
    /// `I_0 <= T₁^{1/4} / ℓ^{K/2}`.
    pub i0_small: bool,
    pub t2_event: bool,
    pub t2_n: Vec<bool>,
    pub p2_event: bool,
    pub p2_tilde_event: bool,
}

impl EventRecord {
    /// `1[B_ℓ] <= Σ_r 1[B_ℓ^(r)]`, valid whenever `total >= 4 · part`.
    pub fn b_union_holds(&self) -> bool {
        if self.thresholds.total < 4.0 * self.thresholds.part {
            return true;
        }
        !self.b_ell || self.b_parts.iter().any(|&b| b)
    }

    /// `1[not T] <= 1[P^(1) event] + 1[P̃^(1) event]`.
    pub fn t_union_holds(&self) -> bool {
        self.t_event || self.p1_event || self.p1_tilde_event
    }

    /// The `V^(2)` analogue of [`EventRecord::t_union_holds`].
    pub fn t2_union_holds(&self) -> bool {
        self.t2_event || self.p2_event || self.p2_tilde_event
    }
}

/// Evaluates every event on `(X_{ℓ-1}, X_ℓ]`; needs `X(1..=max(X_ℓ, y_J))`.
pub fn evaluate_events(
    x: &GaussianSequence,
    sched: &BlockSchedule,
    thresholds: Thresholds,
    quad_tol: f64,
) -> Result<EventRecord> {
    let (n_lo, n_hi) = sched.n_range()?;
    if n_hi > DIAGNOSTIC_N_MAX {
        return Err(Error::Budget(format!(
            "X_ℓ = {n_hi} exceeds the diagnostic cap {DIAGNOSTIC_N_MAX}"
        )));
    }
    let sweep = block_sweep(x, sched, n_lo, n_hi, None)?;
    let i: Vec<f64> = ij_sequence(x, sched, quad_tol)?
        .into_iter()
        .map(|v| v.value)
        .collect();

    let exponent = 0.75 + sched.epsilon;
    let mut sup_ratio = 0.0f64;
    let mut sup_part_ratio = [0.0f64; 4];
    for n in n_lo..=n_hi {
        let scale = (n as f64).ln().powf(exponent);
        sup_ratio = sup_ratio.max(sweep.a[n].norm() / scale);
        let p = sweep.parts_at(n).expect("n in sweep range");
        for r in 0..4 {
            sup_part_ratio[r] = sup_part_ratio[r].max(p[r].norm() / scale);
        }
    }

    let sup = |f: &dyn Fn(&super::DiagnosticsRecord) -> f64| {
        sweep.records.iter().map(f).fold(0.0, f64::max)
    };
    let sup_v = sup(&|r| r.v);
    let sup_v_tilde = sup(&|r| r.v_tilde);
    let sup_v_block = sup(&|r| r.sup_v_block());
    let sup_v2 = sup(&|r| r.v2);
    let sup_v2_tilde = sup(&|r| r.v2_tilde);
    let sup_v2_block = sup(&|r| r.sup_v2_block());

    let half_k = sched.ell_half_k();
    let t_level = 2.0 * sched.c0 * sched.t_ell * half_k;
    let t_n: Vec<bool> = sweep.records.iter().map(|r| r.v <= t_level).collect();
    let t2_n: Vec<bool> = sweep.records.iter().map(|r| r.v2 <= t_level).collect();
    let s_level = sched.t1_ell.sqrt() / half_k;
    let s_j: Vec<bool> = i.iter().map(|&v| v <= s_level).collect();

    Ok(EventRecord {
        n_lo,
        n_hi,
        thresholds,
        sup_ratio,
        sup_part_ratio,
        b_ell: sup_ratio > thresholds.total,
        b_parts: sup_part_ratio.map(|v| v > thresholds.part),
        sup_v,
        sup_v_tilde,
        sup_v_block,
        sup_v2,
        sup_v2_tilde,
        sup_v2_block,
        t_event: t_n.iter().all(|&b| b),
        t_n,
        p1_event: sup_v_block > sched.t1_ell * half_k,
        p1_tilde_event: sup_v_tilde > sched.t_ell * half_k,
        s_event: s_j.iter().all(|&b| b),
        s_j,
        i0_small: i[0] <= sched.t1_ell.powf(0.25) / half_k,
        i,
        t2_event: t2_n.iter().all(|&b| b),
        t2_n,
        p2_event: sup_v2_block > sched.t1_ell * half_k,
        p2_tilde_event: sup_v2_tilde > sched.t_ell * half_k,
    })
}
