//! Exact ground truth by brute-force partition enumeration.
//!
//! `A(n) = Σ_{|λ|=n} a(λ)` with `a(λ) = Π_k (X(k)/√k)^{m_k} / m_k!`, and
//! `E|a(λ)|² = Π_k 1/(k^{m_k} m_k!)`. Everything here is exponential in `n`
//! and exists to check the fast paths.

mod enumerate;
mod oracle;

pub use enumerate::{enumerate_partitions, partition_count, Partitions, ENUMERATION_CAP};
pub use oracle::{
    a_coeff, a_oracle, a_second_moment, decompose, restricted_second_moment,
    restricted_second_moment_enumerated, restricted_second_moment_generating, restricted_sum,
    Decomposition,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A partition `λ₁ >= λ₂ >= ... > 0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Partition {
    parts: Vec<u32>,
}

impl Partition {
    /// Builds a partition from parts in any order; zero parts are dropped.
    pub fn new(mut parts: Vec<u32>) -> Self {
        parts.retain(|&p| p > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition { parts }
    }

    pub fn empty() -> Self {
        Partition { parts: Vec::new() }
    }

    pub(crate) fn from_sorted(parts: Vec<u32>) -> Self {
        debug_assert!(parts.windows(2).all(|w| w[0] >= w[1]));
        Partition { parts }
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    /// `|λ|`.
    pub fn size(&self) -> u64 {
        self.parts.iter().map(|&p| p as u64).sum()
    }

    /// Largest part, 0 for the empty partition.
    pub fn largest(&self) -> u32 {
        self.parts.first().copied().unwrap_or(0)
    }

    /// `m_{λ₁}`, 0 for the empty partition.
    pub fn top_multiplicity(&self) -> usize {
        let top = self.largest();
        self.parts.iter().take_while(|&&p| p == top).count()
    }

    /// `(k, m_k)` for every part size present, largest first.
    pub fn multiplicities(&self) -> Vec<(u32, u32)> {
        let mut out: Vec<(u32, u32)> = Vec::new();
        for &p in &self.parts {
            match out.last_mut() {
                Some((k, m)) if *k == p => *m += 1,
                _ => out.push((p, 1)),
            }
        }
        out
    }
}

/// Constraint on `m_{λ₁}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TopMultiplicity {
    #[default]
    Any,
    One,
    Two,
    AtLeastThree,
}

impl TopMultiplicity {
    fn admits(self, m: usize) -> bool {
        match self {
            TopMultiplicity::Any => true,
            TopMultiplicity::One => m == 1,
            TopMultiplicity::Two => m == 2,
            TopMultiplicity::AtLeastThree => m >= 3,
        }
    }
}

/// Which partitions a restricted sum ranges over.
///
/// The empty partition has `λ₁ = 0`: it satisfies every upper bound on the
/// largest part, fails every `λ₁ > y0` bound, and has no top part, so it is
/// excluded by any multiplicity constraint other than `Any`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PartitionConstraint {
    /// Inclusive upper bound on `λ₁`.
    max_part: Option<u32>,
    /// Exclusive lower bound: `λ₁ > min_top_exclusive`.
    min_top_exclusive: Option<u32>,
    top_multiplicity: TopMultiplicity,
}

impl PartitionConstraint {
    pub fn none() -> Self {
        Self::default()
    }

    /// `λ₁ <= bound`.
    pub fn max_part(bound: u32) -> Self {
        PartitionConstraint {
            max_part: Some(bound),
            ..Self::default()
        }
    }

    /// `λ₁ < bound`. A bound of 0 admits nothing, not even the empty partition.
    pub fn max_part_strict(bound: u32) -> Result<Self> {
        match bound.checked_sub(1) {
            Some(b) => Ok(Self::max_part(b)),
            None => Err(Error::Domain("λ₁ < 0 admits no partition".into())),
        }
    }

    /// `λ₁ > y0` together with a constraint on `m_{λ₁}`.
    pub fn large_top(y0: u32, top: TopMultiplicity) -> Self {
        PartitionConstraint {
            max_part: None,
            min_top_exclusive: Some(y0),
            top_multiplicity: top,
        }
    }

    /// Adds an inclusive upper bound, rejecting an empty admissible range.
    pub fn with_max_part(mut self, bound: u32) -> Result<Self> {
        self.max_part = Some(bound);
        self.validate()?;
        Ok(self)
    }

    pub fn with_min_top(mut self, y0: u32) -> Result<Self> {
        self.min_top_exclusive = Some(y0);
        self.validate()?;
        Ok(self)
    }

    pub fn with_top_multiplicity(mut self, top: TopMultiplicity) -> Self {
        self.top_multiplicity = top;
        self
    }

    fn validate(&self) -> Result<()> {
        if let (Some(max), Some(min)) = (self.max_part, self.min_top_exclusive) {
            if max <= min {
                return Err(Error::Domain(format!(
                    "inconsistent constraint: λ₁ <= {max} and λ₁ > {min}"
                )));
            }
        }
        Ok(())
    }

    pub fn max_part_bound(&self) -> Option<u32> {
        self.max_part
    }

    pub fn min_top_bound(&self) -> Option<u32> {
        self.min_top_exclusive
    }

    pub fn top(&self) -> TopMultiplicity {
        self.top_multiplicity
    }

    /// True when only the largest part is bounded above, so the generating
    /// function `exp(Σ_{k<=β} ...)` describes the constrained sum.
    pub fn is_max_part_only(&self) -> bool {
        self.min_top_exclusive.is_none() && self.top_multiplicity == TopMultiplicity::Any
    }

    pub fn admits(&self, p: &Partition) -> bool {
        let top = p.largest();
        if let Some(max) = self.max_part {
            if top > max {
                return false;
            }
        }
        if let Some(min) = self.min_top_exclusive {
            if top <= min {
                return false;
            }
        }
        match self.top_multiplicity {
            TopMultiplicity::Any => true,
            t => !p.parts.is_empty() && t.admits(p.top_multiplicity()),
        }
    }
}
