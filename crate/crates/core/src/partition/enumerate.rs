use super::{Partition, PartitionConstraint};
use crate::error::{Error, Result};

/// Largest `n` whose partitions may be enumerated (`p(60) = 966467`).
pub const ENUMERATION_CAP: u32 = 60;

/// Streams the partitions of `n` admitted by `c`, in reverse lexicographic
/// order, each exactly once.
pub fn enumerate_partitions(n: u32, c: PartitionConstraint) -> Result<Partitions> {
    if n > ENUMERATION_CAP {
        return Err(Error::Size(format!(
            "partition enumeration is capped at n = {ENUMERATION_CAP}, got {n}"
        )));
    }
    let max = c.max_part_bound().map_or(n, |b| b.min(n));
    let mut parts = Vec::new();
    let feasible = n == 0 || max > 0;
    if feasible {
        fill(&mut parts, n, max);
    }
    Ok(Partitions {
        parts,
        started: false,
        done: !feasible,
        constraint: c,
    })
}

/// Iterator returned by [`enumerate_partitions`].
#[derive(Debug, Clone)]
pub struct Partitions {
    parts: Vec<u32>,
    started: bool,
    done: bool,
    constraint: PartitionConstraint,
}

impl Partitions {
    /// Moves to the next partition in reverse lexicographic order.
    fn advance(&mut self) -> bool {
        let mut rem = 0u32;
        while self.parts.last() == Some(&1) {
            self.parts.pop();
            rem += 1;
        }
        let Some(last) = self.parts.pop() else {
            return false;
        };
        let cap = last - 1;
        self.parts.push(cap);
        fill(&mut self.parts, rem + 1, cap);
        true
    }
}

impl Iterator for Partitions {
    type Item = Partition;

    fn next(&mut self) -> Option<Partition> {
        loop {
            if self.done {
                return None;
            }
            if self.started && !self.advance() {
                self.done = true;
                return None;
            }
            self.started = true;
            if let Some(min) = self.constraint.min_top_bound() {
                // Reverse lexicographic order: once λ₁ <= y0 it stays there.
                if self.parts.first().copied().unwrap_or(0) <= min {
                    self.done = true;
                    return None;
                }
            }
            let p = Partition::from_sorted(self.parts.clone());
            if self.constraint.admits(&p) {
                return Some(p);
            }
        }
    }
}

/// Appends the greedy partition of `rem` into parts of size at most `cap`.
fn fill(parts: &mut Vec<u32>, mut rem: u32, cap: u32) {
    while rem > 0 {
        let take = cap.min(rem);
        parts.push(take);
        rem -= take;
    }
}

/// `p(n)` by Euler's pentagonal-number recurrence.
pub fn partition_count(n: u32) -> u64 {
    let n = n as usize;
    let mut p = vec![0u64; n + 1];
    p[0] = 1;
    for m in 1..=n {
        let mut total: i128 = 0;
        for j in 1.. {
            let g1 = j * (3 * j - 1) / 2;
            if g1 > m {
                break;
            }
            let sign: i128 = if j % 2 == 1 { 1 } else { -1 };
            total += sign * p[m - g1] as i128;
            let g2 = j * (3 * j + 1) / 2;
            if g2 <= m {
                total += sign * p[m - g2] as i128;
            }
        }
        p[m] = total as u64;
    }
    p[n]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::TopMultiplicity;
    use std::collections::HashSet;

    fn all(n: u32, c: PartitionConstraint) -> Vec<Partition> {
        enumerate_partitions(n, c).unwrap().collect()
    }

    #[test]
    fn five_has_seven() {
        let ps = all(5, PartitionConstraint::none());
        assert_eq!(ps.len(), 7);
        assert_eq!(ps.first().unwrap().parts(), &[5]);
        assert_eq!(ps.last().unwrap().parts(), &[1, 1, 1, 1, 1]);
    }

    #[test]
    fn zero_is_the_empty_partition() {
        let ps = all(0, PartitionConstraint::none());
        assert_eq!(ps, vec![Partition::empty()]);
        assert_eq!(all(0, PartitionConstraint::max_part(0)).len(), 1);
        assert!(all(0, PartitionConstraint::large_top(0, TopMultiplicity::Any)).is_empty());
    }

    #[test]
    fn nine_large_triple_top() {
        let ps = all(9, PartitionConstraint::large_top(2, TopMultiplicity::AtLeastThree));
        assert_eq!(ps, vec![Partition::new(vec![3, 3, 3])]);
    }

    #[test]
    fn counts_match_pentagonal_recurrence() {
        for n in 0..=40 {
            let count = enumerate_partitions(n, PartitionConstraint::none()).unwrap().count() as u64;
            assert_eq!(count, partition_count(n), "n = {n}");
        }
        assert_eq!(partition_count(60), 966_467);
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(
            enumerate_partitions(61, PartitionConstraint::none()),
            Err(Error::Size(_))
        ));
    }

    #[test]
    fn each_partition_once_and_valid() {
        let n = 14;
        let ps = all(n, PartitionConstraint::none());
        let set: HashSet<_> = ps.iter().cloned().collect();
        assert_eq!(set.len(), ps.len());
        for p in &ps {
            assert_eq!(p.size(), n as u64);
            assert!(p.parts().windows(2).all(|w| w[0] >= w[1]));
            assert!(p.parts().iter().all(|&x| x > 0));
        }
    }

    #[test]
    fn constraints_agree_with_filtering() {
        let n = 16;
        let everything = all(n, PartitionConstraint::none());
        let cases = [
            PartitionConstraint::max_part(3),
            PartitionConstraint::max_part(0),
            PartitionConstraint::large_top(4, TopMultiplicity::One),
            PartitionConstraint::large_top(2, TopMultiplicity::Two),
            PartitionConstraint::large_top(1, TopMultiplicity::AtLeastThree),
            PartitionConstraint::large_top(2, TopMultiplicity::Any).with_max_part(6).unwrap(),
        ];
        for c in cases {
            let direct = all(n, c);
            let filtered: Vec<_> = everything.iter().filter(|p| c.admits(p)).cloned().collect();
            assert_eq!(direct, filtered, "{c:?}");
        }
    }

    #[test]
    fn max_part_zero_excludes_nonempty() {
        assert!(all(3, PartitionConstraint::max_part(0)).is_empty());
    }
}
