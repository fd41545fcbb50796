use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{enumerate_partitions, Partition, PartitionConstraint, ENUMERATION_CAP};
use crate::error::{Error, Result};
use crate::gaussian::{exp_series_real, GaussianSequence};

/// `a(λ) = Π_k (X(k)/√k)^{m_k} / m_k!`; the empty partition gives 1.
pub fn a_coeff(lambda: &Partition, x: &GaussianSequence) -> Result<Complex64> {
    x.require(lambda.largest() as usize)?;
    let mut prod = Complex64::new(1.0, 0.0);
    for (k, m) in lambda.multiplicities() {
        let c = x.x(k as usize) / (k as f64).sqrt();
        prod *= c.powi(m as i32) / factorial(m);
    }
    Ok(prod)
}

/// `E|a(λ)|² = Π_k 1/(k^{m_k} m_k!)`.
pub fn a_second_moment(lambda: &Partition) -> f64 {
    lambda
        .multiplicities()
        .into_iter()
        .map(|(k, m)| 1.0 / ((k as f64).powi(m as i32) * factorial(m)))
        .product()
}

/// `A(n)` as the sum of `a(λ)` over all partitions of `n`.
pub fn a_oracle(n: u32, x: &GaussianSequence) -> Result<Complex64> {
    restricted_sum(n as i64, x, PartitionConstraint::none())
}

/// The four pieces of `A(n)` split by the largest part and its multiplicity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    /// `λ₁ <= y0`.
    pub a0: Complex64,
    /// `λ₁ > y0`, `m_{λ₁} = 1`.
    pub a1: Complex64,
    /// `λ₁ > y0`, `m_{λ₁} = 2`.
    pub a2: Complex64,
    /// `λ₁ > y0`, `m_{λ₁} >= 3`.
    pub a3: Complex64,
}

impl Decomposition {
    pub fn total(&self) -> Complex64 {
        self.a0 + self.a1 + self.a2 + self.a3
    }

    pub fn parts(&self) -> [Complex64; 4] {
        [self.a0, self.a1, self.a2, self.a3]
    }
}

/// Splits `A(n)` into `A0 + A1 + A2 + A3` in one enumeration pass.
pub fn decompose(n: u32, x: &GaussianSequence, y0: u32) -> Result<Decomposition> {
    if y0 == 0 {
        return Err(Error::Domain("y0 must be at least 1".into()));
    }
    let zero = Complex64::new(0.0, 0.0);
    let mut d = Decomposition {
        a0: zero,
        a1: zero,
        a2: zero,
        a3: zero,
    };
    for p in enumerate_partitions(n, PartitionConstraint::none())? {
        let a = a_coeff(&p, x)?;
        let slot = if p.largest() <= y0 {
            &mut d.a0
        } else {
            match p.top_multiplicity() {
                1 => &mut d.a1,
                2 => &mut d.a2,
                _ => &mut d.a3,
            }
        };
        *slot += a;
    }
    Ok(d)
}

/// `Σ a(λ)` over partitions of `m` admitted by `c`; zero for `m < 0`.
pub fn restricted_sum(m: i64, x: &GaussianSequence, c: PartitionConstraint) -> Result<Complex64> {
    if m < 0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let m = u32::try_from(m).map_err(|_| Error::Size(format!("m = {m} is too large")))?;
    let mut s = Complex64::new(0.0, 0.0);
    for p in enumerate_partitions(m, c)? {
        s += a_coeff(&p, x)?;
    }
    Ok(s)
}

/// Exact `E|Σ_restricted a(λ)|²`, by enumeration when `n` is within the cap
/// and through the generating function `exp(Σ_{k<=β} z^k/k)` otherwise.
pub fn restricted_second_moment(n: u32, c: PartitionConstraint) -> Result<f64> {
    if n <= ENUMERATION_CAP {
        restricted_second_moment_enumerated(n, c)
    } else if c.is_max_part_only() {
        restricted_second_moment_generating(n, c.max_part_bound())
    } else {
        Err(Error::UnsupportedConstraint(format!(
            "n = {n} is beyond enumeration and {c:?} has no generating-function form"
        )))
    }
}

/// Enumeration path of [`restricted_second_moment`].
pub fn restricted_second_moment_enumerated(n: u32, c: PartitionConstraint) -> Result<f64> {
    Ok(enumerate_partitions(n, c)?.map(|p| a_second_moment(&p)).sum())
}

/// `[z^n] exp(Σ_{k<=β} z^k/k)`, the second moment of the sum over `λ₁ <= β`
/// (`β = n` when unbounded).
pub fn restricted_second_moment_generating(n: u32, max_part: Option<u32>) -> Result<f64> {
    let beta = max_part.map_or(n, |b| b.min(n)) as usize;
    let c: Vec<f64> = (0..=beta)
        .map(|k| if k == 0 { 0.0 } else { 1.0 / k as f64 })
        .collect();
    Ok(exp_series_real(&c, n as usize)?[n as usize])
}

fn factorial(m: u32) -> f64 {
    (1..=m).map(|i| i as f64).product()
}
