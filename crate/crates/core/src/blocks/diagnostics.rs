//! The variance proxies `V`, `Ṽ`, `V(n, y_j)`, `W`, the `V^(2)` family and
//! the block maxima `U_j`, evaluated in one streaming pass.
//!
//! Every inner sum is a coefficient of a truncated exponential:
//! `Σ_{|λ|=m, λ₁<=t} a(λ) = [z^m] exp(Σ_{k<=t} c_k z^k) =: E_t(m)`. The sweep
//! keeps one row `E_t(0..L)` and multiplies it by `exp(c_t z^t)` for
//! `t = 1, 2, ...`, reading every quantity off the row at the step where its
//! constraint matches.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::schedule::BlockSchedule;
use crate::error::{Error, Result};
use crate::gaussian::GaussianSequence;
use crate::partition::{restricted_sum, PartitionConstraint};
use crate::rng::SeedPath;

/// Largest `n`, `r_max` and `y_J` accepted by [`block_sweep`].
pub const DIAGNOSTIC_N_MAX: usize = 1 << 13;

/// How inner restricted sums are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InnerRoute {
    /// Truncated-exponential coefficients from the streaming sweep.
    #[default]
    Series,
    /// Brute-force partition sums; needs `n - y0 - 1 <= 60`.
    Enumeration,
}

/// Diagnostics at a single `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRecord {
    pub n: usize,
    pub v: f64,
    pub v_tilde: f64,
    /// `V(n, y_j)` at index `j`; index 0 is unused and stays 0.
    pub v_block: Vec<f64>,
    pub w: f64,
    pub v2: f64,
    pub v2_tilde: f64,
    /// `V^(2)(n, y_j)` at index `j`; index 0 is unused and stays 0.
    pub v2_block: Vec<f64>,
    pub seed_path: Option<SeedPath>,
}

impl DiagnosticsRecord {
    fn zero(n: usize, blocks: usize, seed_path: Option<SeedPath>) -> Self {
        DiagnosticsRecord {
            n,
            v: 0.0,
            v_tilde: 0.0,
            v_block: vec![0.0; blocks],
            w: 0.0,
            v2: 0.0,
            v2_tilde: 0.0,
            v2_block: vec![0.0; blocks],
            seed_path,
        }
    }

    pub fn sup_v_block(&self) -> f64 {
        self.v_block.iter().copied().fold(0.0, f64::max)
    }

    pub fn sup_v2_block(&self) -> f64 {
        self.v2_block.iter().copied().fold(0.0, f64::max)
    }

    /// True when every component is finite and non-negative.
    pub fn is_valid(&self) -> bool {
        let ok = |v: f64| v.is_finite() && v >= 0.0;
        [self.v, self.v_tilde, self.w, self.v2, self.v2_tilde]
            .into_iter()
            .chain(self.v_block.iter().copied())
            .chain(self.v2_block.iter().copied())
            .all(ok)
    }
}

/// Block maxima truncated at `r <= r_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UTable {
    pub r_max: usize,
    /// `U_j = (1/y_j) Σ_{r<=r_max} max_{y_{j-1}<=β<=y_j} |E_β(r)|²` at index `j`.
    pub u: Vec<f64>,
    /// The same with `E_{⌊β/2⌋}`, dominating `V^(2)(n, y_j)`.
    pub u2: Vec<f64>,
}

/// Output of [`block_sweep`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockSweep {
    pub n_lo: usize,
    pub n_hi: usize,
    /// One record per `n` in `n_lo..=n_hi`.
    pub records: Vec<DiagnosticsRecord>,
    /// `A(0..=n_hi)`.
    pub a: Vec<Complex64>,
    /// `[A0, A1, A2, A3](n)` for `n` in `n_lo..=n_hi`, split at `y0`.
    pub parts: Vec<[Complex64; 4]>,
    pub u: Option<UTable>,
}

impl BlockSweep {
    pub fn record(&self, n: usize) -> Option<&DiagnosticsRecord> {
        n.checked_sub(self.n_lo).and_then(|i| self.records.get(i))
    }

    pub fn parts_at(&self, n: usize) -> Option<[Complex64; 4]> {
        n.checked_sub(self.n_lo).and_then(|i| self.parts.get(i)).copied()
    }
}

/// Streams `E_t` for `t = 0..=max(n_hi, y_J)` and accumulates every
/// diagnostic for `n` in `n_lo..=n_hi` (empty when `n_lo > n_hi`).
///
/// With `r_max` set the block maxima `U_j` are also collected; this needs
/// `X(1..=y_J)`. Otherwise `X(1..=n_hi)` suffices.
pub fn block_sweep(
    x: &GaussianSequence,
    sched: &BlockSchedule,
    n_lo: usize,
    n_hi: usize,
    r_max: Option<usize>,
) -> Result<BlockSweep> {
    let n_hi_eff = if n_lo > n_hi { 0 } else { n_hi };
    if n_hi_eff > DIAGNOSTIC_N_MAX || r_max.is_some_and(|r| r > DIAGNOSTIC_N_MAX) {
        return Err(Error::Budget(format!(
            "diagnostic sweep is capped at n, r_max <= {DIAGNOSTIC_N_MAX}"
        )));
    }
    let jm = sched.j_max;
    let y_last = if r_max.is_some() {
        let y = sched.y_usize(jm)?;
        if y > DIAGNOSTIC_N_MAX {
            return Err(Error::Budget(format!(
                "y_J = {y} exceeds the sweep cap {DIAGNOSTIC_N_MAX}"
            )));
        }
        y
    } else {
        0
    };
    let t_end = n_hi_eff.max(y_last);
    x.require(t_end)?;
    let c = x.exponent(t_end)?;
    let len = n_hi_eff.max(r_max.unwrap_or(0)) + 1;
    // y0 may exceed usize on huge schedules; then no k in range clears it.
    let y0 = usize::try_from(sched.y0()).unwrap_or(usize::MAX);
    let y_f: Vec<f64> = sched.y.iter().map(|&y| y as f64).collect();
    let far_cut = (sched.ell as f64).powf(100.0 * sched.k_exponent);
    let is_far = |n: usize, j: usize| (n as f64 / y_f[j]) > far_cut;
    let block_of = |k: usize| sched.block_of(k as u128);

    let zero = Complex64::new(0.0, 0.0);
    let count = if n_lo > n_hi { 0 } else { n_hi - n_lo + 1 };
    let mut recs: Vec<DiagnosticsRecord> = (0..count)
        .map(|i| DiagnosticsRecord::zero(n_lo + i, jm + 1, x.seed_path()))
        .collect();
    let mut parts = vec![[zero; 4]; count];
    let mut umax = vec![vec![0.0f64; len]; if r_max.is_some() { jm + 1 } else { 0 }];
    let mut u2max = umax.clone();
    let u_ranges: Vec<(usize, usize)> = if r_max.is_some() {
        (1..=jm)
            .map(|j| Ok((sched.y_usize(j - 1)?, sched.y_usize(j)?)))
            .collect::<Result<_>>()?
    } else {
        Vec::new()
    };

    let mut row = vec![zero; len];
    row[0] = Complex64::new(1.0, 0.0);
    let mut powers = Vec::new();
    for t in 0..=t_end {
        if t >= 1 {
            multiply_exp_monomial(&mut row, c[t], t, &mut powers);
        }
        if t == y0.min(t_end) {
            for (i, p) in parts.iter_mut().enumerate() {
                p[0] = row[n_lo + i];
            }
        }

        // Terms with λ₁ < k read E_{k-1}: k = t + 1.
        let k = t + 1;
        if k > y0 && k <= n_hi_eff {
            let ck = c[k];
            let kf = k as f64;
            let j = block_of(k);
            for n in k.max(n_lo)..=n_hi_eff {
                let i = n - n_lo;
                let rec = &mut recs[i];
                let e = row[n - k];
                let sq = e.norm_sqr();
                rec.v += sq / kf;
                if let Some(j) = j {
                    rec.v_block[j] += sq / y_f[j];
                    if is_far(n, j) {
                        rec.v_tilde += sq / kf;
                    }
                }
                parts[i][1] += ck * e;
                // Top part k repeated mult >= 2 times.
                let mut pw = ck;
                let mut mult = 2;
                while mult * k <= n {
                    pw = pw * ck / mult as f64;
                    let e_m = row[n - mult * k];
                    if mult == 2 {
                        parts[i][2] += pw * e_m;
                        rec.w += e_m.norm_sqr() / (2.0 * kf * kf);
                    } else {
                        parts[i][3] += pw * e_m;
                    }
                    mult += 1;
                }
            }
        }

        // Terms with λ₁ < k/2 read E_{⌈k/2⌉-1}: k ∈ {2t+1, 2t+2}.
        for k in [2 * t + 1, 2 * t + 2] {
            if k <= y0 || k > n_hi_eff {
                continue;
            }
            let kf = k as f64;
            let j = block_of(k);
            for n in k.max(n_lo)..=n_hi_eff {
                let rec = &mut recs[n - n_lo];
                let sq = row[n - k].norm_sqr();
                rec.v2 += sq / kf;
                if let Some(j) = j {
                    rec.v2_block[j] += sq / y_f[j];
                    if is_far(n, j) {
                        rec.v2_tilde += sq / kf;
                    }
                }
            }
        }

        if r_max.is_some() {
            for (jj, &(lo, hi)) in u_ranges.iter().enumerate() {
                let j = jj + 1;
                if lo <= t && t <= hi {
                    fold_max(&mut umax[j], &row);
                }
                if (lo..=hi).contains(&(2 * t)) || (lo..=hi).contains(&(2 * t + 1)) {
                    fold_max(&mut u2max[j], &row);
                }
            }
        }
    }

    let u = r_max.map(|r_max| {
        let total = |m: &[f64], j: usize| {
            if j == 0 {
                0.0
            } else {
                m[..=r_max].iter().sum::<f64>() / y_f[j]
            }
        };
        UTable {
            r_max,
            u: (0..=jm).map(|j| total(&umax[j], j)).collect(),
            u2: (0..=jm).map(|j| total(&u2max[j], j)).collect(),
        }
    });
    Ok(BlockSweep {
        n_lo,
        n_hi,
        records: recs,
        a: row[..=n_hi_eff].to_vec(),
        parts,
        u,
    })
}

fn fold_max(acc: &mut [f64], row: &[Complex64]) {
    for (a, e) in acc.iter_mut().zip(row) {
        *a = a.max(e.norm_sqr());
    }
}

/// `row <- row · exp(c z^t)` in place, truncated to `row.len()`.
fn multiply_exp_monomial(row: &mut [Complex64], c: Complex64, t: usize, powers: &mut Vec<Complex64>) {
    let len = row.len();
    if c == Complex64::new(0.0, 0.0) || t >= len {
        return;
    }
    let imax = (len - 1) / t;
    powers.clear();
    powers.push(Complex64::new(1.0, 0.0));
    for i in 1..=imax {
        let p = powers[i - 1] * c / i as f64;
        powers.push(p);
    }
    // Descending m: row[m - i t] still holds the old row.
    for m in (t..len).rev() {
        let mut acc = Complex64::new(0.0, 0.0);
        let mut idx = m - t;
        let mut i = 1;
        loop {
            acc += powers[i] * row[idx];
            if idx < t {
                break;
            }
            idx -= t;
            i += 1;
        }
        row[m] += acc;
    }
}

/// `S_k = Σ_{|λ|=n-k, λ₁<k} a(λ)` for `k = 1..=n`, at index `k - 1`.
///
/// `A_1(n) = Σ_{y0<k<=n} X(k)/√k · S_k`, and `S_k` depends on `X(1..k)` only.
pub fn a1_inner_sums(x: &GaussianSequence, n: usize) -> Result<Vec<Complex64>> {
    if n > DIAGNOSTIC_N_MAX {
        return Err(Error::Budget(format!(
            "n = {n} exceeds the diagnostic cap {DIAGNOSTIC_N_MAX}"
        )));
    }
    let c = x.exponent(n.saturating_sub(1))?;
    let mut row = vec![Complex64::new(0.0, 0.0); n + 1];
    row[0] = Complex64::new(1.0, 0.0);
    let mut powers = Vec::new();
    let mut out = Vec::with_capacity(n);
    for k in 1..=n {
        if k >= 2 {
            multiply_exp_monomial(&mut row, c[k - 1], k - 1, &mut powers);
        }
        out.push(row[n - k]);
    }
    Ok(out)
}

/// All diagnostics at `n` through the chosen inner route.
pub fn diagnostics(
    n: usize,
    x: &GaussianSequence,
    sched: &BlockSchedule,
    route: InnerRoute,
) -> Result<DiagnosticsRecord> {
    match route {
        InnerRoute::Series => {
            let mut s = block_sweep(x, sched, n, n, None)?;
            Ok(s.records.remove(0))
        }
        InnerRoute::Enumeration => diagnostics_enumerated(n, x, sched),
    }
}

fn diagnostics_enumerated(
    n: usize,
    x: &GaussianSequence,
    sched: &BlockSchedule,
) -> Result<DiagnosticsRecord> {
    x.require(n)?;
    let mut rec = DiagnosticsRecord::zero(n, sched.j_max + 1, x.seed_path());
    let y0 = usize::try_from(sched.y0()).unwrap_or(usize::MAX);
    let inner = |m: usize, max_part: usize| {
        restricted_sum(m as i64, x, PartitionConstraint::max_part(max_part as u32))
    };
    for k in (y0.saturating_add(1))..=n {
        let kf = k as f64;
        let j = sched.block_of(k as u128);
        let far = j.is_some_and(|j| sched.is_far_block(n as u128, j));
        let sq = inner(n - k, k - 1)?.norm_sqr();
        rec.v += sq / kf;
        let sq2 = inner(n - k, (k - 1) / 2)?.norm_sqr();
        rec.v2 += sq2 / kf;
        if let Some(j) = j {
            let yj = sched.y[j] as f64;
            rec.v_block[j] += sq / yj;
            rec.v2_block[j] += sq2 / yj;
            if far {
                rec.v_tilde += sq / kf;
                rec.v2_tilde += sq2 / kf;
            }
        }
        if 2 * k <= n {
            rec.w += inner(n - 2 * k, k - 1)?.norm_sqr() / (2.0 * kf * kf);
        }
    }
    Ok(rec)
}

/// `V(n) = Σ_{y0<k<=n} (1/k)|Σ_{|λ|=n-k, λ₁<k} a(λ)|²`.
pub fn compute_v(n: usize, x: &GaussianSequence, sched: &BlockSchedule, route: InnerRoute) -> Result<f64> {
    Ok(diagnostics(n, x, sched, route)?.v)
}

/// `Ṽ(n)`: the part of `V(n)` from blocks with `n/y_j > ℓ^{100K}`.
pub fn compute_v_tilde(n: usize, x: &GaussianSequence, sched: &BlockSchedule, route: InnerRoute) -> Result<f64> {
    Ok(diagnostics(n, x, sched, route)?.v_tilde)
}

/// `V(n, y_j) = (1/y_j) Σ_{y_{j-1}<k<=y_j} |Σ_{|λ|=n-k, λ₁<k} a(λ)|²`.
pub fn compute_v_block(
    n: usize,
    j: usize,
    x: &GaussianSequence,
    sched: &BlockSchedule,
    route: InnerRoute,
) -> Result<f64> {
    check_block(sched, j)?;
    Ok(diagnostics(n, x, sched, route)?.v_block[j])
}

/// `W(n) = Σ_{y0<k<=n/2} |Σ_{|λ|=n-2k, λ₁<k} a(λ)|² / (2k²)`.
pub fn compute_w(n: usize, x: &GaussianSequence, sched: &BlockSchedule, route: InnerRoute) -> Result<f64> {
    Ok(diagnostics(n, x, sched, route)?.w)
}

/// `V^(2)(n)`: as `V(n)` with the inner constraint `λ₁ < k/2`.
pub fn compute_v2(n: usize, x: &GaussianSequence, sched: &BlockSchedule, route: InnerRoute) -> Result<f64> {
    Ok(diagnostics(n, x, sched, route)?.v2)
}

pub fn compute_v2_tilde(n: usize, x: &GaussianSequence, sched: &BlockSchedule, route: InnerRoute) -> Result<f64> {
    Ok(diagnostics(n, x, sched, route)?.v2_tilde)
}

pub fn compute_v2_block(
    n: usize,
    j: usize,
    x: &GaussianSequence,
    sched: &BlockSchedule,
    route: InnerRoute,
) -> Result<f64> {
    check_block(sched, j)?;
    Ok(diagnostics(n, x, sched, route)?.v2_block[j])
}

fn check_block(sched: &BlockSchedule, j: usize) -> Result<()> {
    if j == 0 || j > sched.j_max {
        return Err(Error::Domain(format!(
            "block index must satisfy 1 <= j <= J = {}, got {j}",
            sched.j_max
        )));
    }
    Ok(())
}

/// `U_j` truncated at `r_max`, with a bound on the expected tail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UjReport {
    pub j: usize,
    pub value: f64,
    pub r_max: usize,
    /// Bound on `E[Σ_{r>r_max} ...] / y_j`: the maximal factor 4 times
    /// `ρ^{-(r_max+1)} exp(Σ_{k<=y_j} ρ^k/k) / (1 - 1/ρ)` at `ρ = e^{1/y_j}`.
    pub tail_bound: f64,
}

pub fn compute_uj(x: &GaussianSequence, sched: &BlockSchedule, j: usize, r_max: usize) -> Result<UjReport> {
    check_block(sched, j)?;
    let s = block_sweep(x, sched, 1, 0, Some(r_max))?;
    let u = s.u.expect("sweep was asked for U");
    Ok(UjReport {
        j,
        value: u.u[j],
        r_max,
        tail_bound: u_tail_bound(sched, j, r_max),
    })
}

/// See [`UjReport::tail_bound`].
pub fn u_tail_bound(sched: &BlockSchedule, j: usize, r_max: usize) -> f64 {
    let yj = sched.y[j] as f64;
    let k_top = sched.y[j].min(1 << 24) as usize;
    let log_gen: f64 = (1..=k_top).map(|k| (k as f64 / yj).exp() / k as f64).sum();
    let log_tail = log_gen - (r_max as f64 + 1.0) / yj - (-(-1.0 / yj).exp_m1()).ln();
    4.0 / yj * log_tail.exp()
}

/// An inequality `lhs <= rhs` evaluated on one sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

impl BoundCheck {
    /// Allows relative rounding slack of `1e-12`.
    pub fn new(lhs: f64, rhs: f64) -> Self {
        BoundCheck {
            lhs,
            rhs,
            holds: lhs <= rhs + 1e-12 * rhs.abs(),
        }
    }
}

/// `V(n) <= C₀(Ṽ(n) + ℓ log ℓ · sup_j V(n, y_j))`.
pub fn v_decomposition_check(rec: &DiagnosticsRecord, sched: &BlockSchedule) -> BoundCheck {
    BoundCheck::new(
        rec.v,
        sched.c0 * (rec.v_tilde + sched.ell_log_ell() * rec.sup_v_block()),
    )
}

/// The `V^(2)` analogue of [`v_decomposition_check`].
pub fn v2_decomposition_check(rec: &DiagnosticsRecord, sched: &BlockSchedule) -> BoundCheck {
    BoundCheck::new(
        rec.v2,
        sched.c0 * (rec.v2_tilde + sched.ell_log_ell() * rec.sup_v2_block()),
    )
}

/// `W(n)` against `V^(2)(n)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WBoundReport {
    /// `W <= V^(2)/y0`, which holds termwise.
    pub proven: BoundCheck,
    /// `W <= V^(2)/(2y0)`, which needs every contributing `k >= 2y0`.
    pub halved: BoundCheck,
}

pub fn w_bound_check(rec: &DiagnosticsRecord, sched: &BlockSchedule) -> WBoundReport {
    let y0 = sched.y0() as f64;
    WBoundReport {
        proven: BoundCheck::new(rec.w, rec.v2 / y0),
        halved: BoundCheck::new(rec.w, rec.v2 / (2.0 * y0)),
    }
}

/// `V(n, y_j) <= U_j` and `V^(2)(n, y_j) <= U^(2)_j` for one `(n, j)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UDomination {
    pub n: usize,
    pub j: usize,
    pub v: BoundCheck,
    pub v2: BoundCheck,
}

/// Every `(n, j)` domination check of a sweep run with `r_max >= n_hi`.
pub fn u_domination_checks(sweep: &BlockSweep) -> Result<Vec<UDomination>> {
    let u = sweep
        .u
        .as_ref()
        .ok_or_else(|| Error::Domain("sweep has no U table; pass r_max".into()))?;
    if u.r_max < sweep.n_hi {
        return Err(Error::Domain(format!(
            "U truncated at r_max = {} cannot dominate V(n, y_j) for n up to {}",
            u.r_max, sweep.n_hi
        )));
    }
    let mut out = Vec::new();
    for rec in &sweep.records {
        for j in 1..rec.v_block.len() {
            out.push(UDomination {
                n: rec.n,
                j,
                v: BoundCheck::new(rec.v_block[j], u.u[j]),
                v2: BoundCheck::new(rec.v2_block[j], u.u2[j]),
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blocks::{build_schedule, ScheduleParams};
    use crate::partition::{a_oracle, decompose};

    fn desk() -> BlockSchedule {
        build_schedule(ScheduleParams::desk()).unwrap()
    }

    fn sample(len: usize, trial: u64) -> GaussianSequence {
        GaussianSequence::sample(len, SeedPath::new(0xd1a6, trial)).unwrap()
    }

    #[test]
    fn zero_input_v() {
        let s = desk();
        let z = GaussianSequence::zeros(32).unwrap();
        assert!((compute_v(5, &z, &s, InnerRoute::Series).unwrap() - 0.2).abs() < 1e-15);
        assert_eq!(compute_v(1, &z, &s, InnerRoute::Series).unwrap(), 0.0);
        // y_3 = 4 < 6 <= 7 = y_4
        let vb = compute_v_block(6, 4, &z, &s, InnerRoute::Series).unwrap();
        assert!((vb - 1.0 / 7.0).abs() < 1e-15);
        assert_eq!(compute_v_tilde(16, &z, &s, InnerRoute::Series).unwrap(), 0.0);
    }

    #[test]
    fn zero_input_w() {
        let s = desk();
        let z = GaussianSequence::zeros(16).unwrap();
        assert!((compute_w(10, &z, &s, InnerRoute::Series).unwrap() - 0.02).abs() < 1e-15);
        assert_eq!(compute_w(11, &z, &s, InnerRoute::Series).unwrap(), 0.0);
    }

    #[test]
    fn desk_has_no_far_blocks() {
        let s = desk();
        let x = sample(20, 1);
        let sweep = block_sweep(&x, &s, 3, 16, None).unwrap();
        assert!(sweep.records.iter().all(|r| r.v_tilde == 0.0 && r.v2_tilde == 0.0));
    }

    #[test]
    fn series_matches_enumeration() {
        let s = desk();
        for trial in 0..5 {
            let x = sample(20, trial);
            for n in 1..=16 {
                let a = diagnostics(n, &x, &s, InnerRoute::Series).unwrap();
                let b = diagnostics(n, &x, &s, InnerRoute::Enumeration).unwrap();
                for (p, q) in [(a.v, b.v), (a.w, b.w), (a.v2, b.v2)] {
                    assert!((p - q).abs() <= 1e-12 * (1.0 + q), "n = {n}: {p} vs {q}");
                }
                for j in 0..a.v_block.len() {
                    assert!((a.v_block[j] - b.v_block[j]).abs() <= 1e-12 * (1.0 + b.v_block[j]));
                    assert!((a.v2_block[j] - b.v2_block[j]).abs() <= 1e-12 * (1.0 + b.v2_block[j]));
                }
            }
        }
    }

    #[test]
    fn v_matches_direct_double_loop() {
        // y0 = 8 on (ℓ=3, K=2).
        let s = build_schedule(ScheduleParams::new(3, 2.0)).unwrap();
        let x = sample(40, 9);
        let n = 30;
        let y0 = s.y0() as usize;
        let mut want = 0.0;
        for k in (y0 + 1)..=n {
            let inner = restricted_sum(
                (n - k) as i64,
                &x,
                PartitionConstraint::max_part_strict(k as u32).unwrap(),
            )
            .unwrap();
            want += inner.norm_sqr() / k as f64;
        }
        let got = compute_v(n, &x, &s, InnerRoute::Series).unwrap();
        assert!((got - want).abs() < 1e-12 * (1.0 + want));
    }

    #[test]
    fn sweep_reproduces_coefficients_and_split() {
        let s = desk();
        let x = sample(20, 3);
        let sweep = block_sweep(&x, &s, 3, 16, None).unwrap();
        for n in 3..=16u32 {
            let a = a_oracle(n, &x).unwrap();
            assert!((sweep.a[n as usize] - a).norm() < 1e-12);
            let d = decompose(n, &x, 1).unwrap();
            let p = sweep.parts_at(n as usize).unwrap();
            for (got, want) in p.iter().zip(d.parts()) {
                assert!((got - want).norm() < 1e-12, "n = {n}");
            }
        }
    }

    #[test]
    fn bounds_hold_on_desk() {
        let s = desk();
        for trial in 0..20 {
            let x = sample(20, trial);
            let sweep = block_sweep(&x, &s, 3, 16, Some(16)).unwrap();
            for rec in &sweep.records {
                assert!(rec.is_valid());
                assert!(v_decomposition_check(rec, &s).holds);
                assert!(v2_decomposition_check(rec, &s).holds);
                let w = w_bound_check(rec, &s);
                assert!(w.proven.holds && w.halved.holds);
            }
            for d in u_domination_checks(&sweep).unwrap() {
                assert!(d.v.holds && d.v2.holds, "{d:?}");
            }
        }
    }

    #[test]
    fn u_zero_input_and_padding() {
        let s = desk();
        let z = GaussianSequence::zeros(20).unwrap();
        for j in 1..=s.j_max {
            let u = compute_uj(&z, &s, j, 10).unwrap();
            assert!((u.value - 1.0 / s.y[j] as f64).abs() < 1e-15);
            assert!(u.tail_bound > 0.0);
        }
        let x = sample(20, 5);
        let mut padded = x.values().to_vec();
        padded.extend(std::iter::repeat_n(Complex64::new(0.0, 0.0), 30));
        let xp = GaussianSequence::from_values(padded).unwrap();
        for j in 1..=s.j_max {
            let a = compute_uj(&x, &s, j, 12).unwrap().value;
            let b = compute_uj(&xp, &s, j, 12).unwrap().value;
            assert_eq!(a, b);
        }
    }

    #[test]
    fn inner_sums_match_enumeration() {
        let x = sample(12, 8);
        let s = a1_inner_sums(&x, 12).unwrap();
        for k in 1..=12usize {
            let want = restricted_sum(
                (12 - k) as i64,
                &x,
                PartitionConstraint::max_part_strict(k as u32).unwrap(),
            )
            .unwrap();
            assert!((s[k - 1] - want).norm() < 1e-13);
        }
    }

    #[test]
    fn tail_bound_shrinks() {
        let s = desk();
        assert!(u_tail_bound(&s, 3, 200) < u_tail_bound(&s, 3, 20));
    }

    #[test]
    fn missing_input_and_budget() {
        let s = desk();
        let x = sample(8, 0);
        assert!(matches!(
            compute_v(10, &x, &s, InnerRoute::Series),
            Err(Error::MissingInput { .. })
        ));
        let big = sample(4, 0);
        assert!(matches!(
            block_sweep(&big, &s, 1, DIAGNOSTIC_N_MAX + 1, None),
            Err(Error::Budget(_))
        ));
        assert!(compute_v_block(5, 0, &x, &s, InnerRoute::Series).is_err());
    }
}
