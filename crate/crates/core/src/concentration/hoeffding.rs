use rand::RngExt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::TailReport;
use crate::blocks::a1_inner_sums;
use crate::error::{Error, Result};
use crate::gaussian::{draw, GaussianSequence};
use crate::rng::SeedPath;
use crate::stats::Proportion;

/// A real martingale difference sequence with a predictable envelope.
pub trait IncrementProcess: Sync {
    /// Fills `z` with the increments `Z_1..Z_N` of one trial and `s` with
    /// the envelopes `S_1..S_N`, where `S_n` depends only on the past and
    /// `|Z_n| <= S_n`.
    fn run(&self, path: SeedPath, z: &mut Vec<f64>, s: &mut Vec<f64>) -> Result<()>;
}

/// `Z ≡ 0` with `S ≡ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroIncrements {
    pub steps: usize,
}

impl IncrementProcess for ZeroIncrements {
    fn run(&self, _path: SeedPath, z: &mut Vec<f64>, s: &mut Vec<f64>) -> Result<()> {
        z.resize(self.steps, 0.0);
        s.resize(self.steps, 0.0);
        Ok(())
    }
}

/// Independent fair `±1` steps with `S ≡ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymmetricSteps {
    pub steps: usize,
}

impl IncrementProcess for SymmetricSteps {
    fn run(&self, path: SeedPath, z: &mut Vec<f64>, s: &mut Vec<f64>) -> Result<()> {
        let mut rng = path.rng();
        z.extend((0..self.steps).map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }));
        s.resize(self.steps, 1.0);
        Ok(())
    }
}

/// Real parts of the increments of `A_1(n)`:
/// `Z_k = Re(X(k)/√k · S_k)` for `y0 < k <= n`, with
/// `S_k = Σ_{|λ|=n-k, λ₁<k} a(λ)`.
///
/// The bound needs `|Z_k| <= envelope_k`, so every `X(k)` is drawn from the
/// complex Gaussian conditioned on `|X(k)| <= radius`. The conditioned law is
/// still rotation invariant, so the increments keep mean zero, and the
/// envelope `radius · |S_k| / √k` is predictable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct A1Increments {
    pub n: usize,
    pub y0: usize,
    pub radius: f64,
}

impl A1Increments {
    fn sample_inputs(&self, path: SeedPath) -> Result<GaussianSequence> {
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(Error::Contract(format!(
                "A1 increments need a finite truncation radius, got {}",
                self.radius
            )));
        }
        let mut rng = path.rng();
        let values = (0..self.n.max(1))
            .map(|_| loop {
                let v = draw(&mut rng);
                if v.norm() <= self.radius {
                    break v;
                }
            })
            .collect();
        GaussianSequence::from_values(values)
    }
}

impl IncrementProcess for A1Increments {
    fn run(&self, path: SeedPath, z: &mut Vec<f64>, s: &mut Vec<f64>) -> Result<()> {
        let x = self.sample_inputs(path)?;
        let inner = a1_inner_sums(&x, self.n)?;
        for k in (self.y0 + 1)..=self.n {
            let scale = 1.0 / (k as f64).sqrt();
            let sk = inner[k - 1];
            z.push((x.x(k) * scale * sk).re);
            s.push(self.radius * scale * sk.norm());
        }
        Ok(())
    }
}

/// `2 exp(-ε²/(10 T))`.
pub fn hoeffding_bound(epsilon: f64, t_cap: f64) -> f64 {
    2.0 * (-epsilon * epsilon / (10.0 * t_cap)).exp()
}

/// Empirical `P[{|Σ Z_n| >= ε} ∩ {Σ S_n² <= T}]` against the bound, per `ε`.
///
/// Fails with a contract error if any trial produces `|Z_n| > S_n` or a
/// non-finite envelope.
pub fn hoeffding_check(
    process: &dyn IncrementProcess,
    t_cap: f64,
    eps_grid: &[f64],
    trials: usize,
    master_seed: u64,
) -> Result<TailReport> {
    if !(t_cap > 0.0) {
        return Err(Error::Domain(format!("T must be positive, got {t_cap}")));
    }
    let outcomes: Vec<(f64, bool)> = (0..trials as u64)
        .into_par_iter()
        .map_init(
            || (Vec::new(), Vec::new()),
            |(z, s), t| -> Result<(f64, bool)> {
                z.clear();
                s.clear();
                process.run(SeedPath::new(master_seed, t), z, s)?;
                if z.len() != s.len() {
                    return Err(Error::Contract("increments and envelopes differ in length".into()));
                }
                for (i, (&zi, &si)) in z.iter().zip(s.iter()).enumerate() {
                    if !si.is_finite() || zi.abs() > si * (1.0 + 1e-12) {
                        return Err(Error::Contract(format!(
                            "|Z_{}| = {} exceeds the declared envelope {si}",
                            i + 1,
                            zi.abs()
                        )));
                    }
                }
                let total: f64 = z.iter().sum();
                let var: f64 = s.iter().map(|v| v * v).sum();
                Ok((total.abs(), var <= t_cap))
            },
        )
        .collect::<Result<_>>()?;
    let empirical: Vec<Proportion> = eps_grid
        .iter()
        .map(|&eps| {
            let hits = outcomes.iter().filter(|(a, ok)| *ok && *a >= eps).count();
            Proportion::new(hits as u64, trials as u64)
        })
        .collect();
    let bounds: Vec<f64> = eps_grid.iter().map(|&e| hoeffding_bound(e, t_cap)).collect();
    Ok(TailReport::new(eps_grid.to_vec(), empirical, bounds))
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Liar;

    impl IncrementProcess for Liar {
        fn run(&self, _path: SeedPath, z: &mut Vec<f64>, s: &mut Vec<f64>) -> Result<()> {
            z.push(2.0);
            s.push(1.0);
            Ok(())
        }
    }

    #[test]
    fn bound_value() {
        assert!((hoeffding_bound(60.0, 100.0) - 2.0 * (-3.6f64).exp()).abs() < 1e-15);
        assert!((hoeffding_bound(60.0, 100.0) - 0.05465).abs() < 1e-4);
    }

    #[test]
    fn zero_process_never_exceeds() {
        let r = hoeffding_check(&ZeroIncrements { steps: 10 }, 1.0, &[0.1, 1.0], 100, 0).unwrap();
        assert!(r.empirical.iter().all(|p| p.hits == 0));
        assert_eq!(r.violations, 0);
    }

    #[test]
    fn symmetric_steps_far_tail() {
        let r = hoeffding_check(&SymmetricSteps { steps: 100 }, 100.0, &[60.0], 2000, 1).unwrap();
        assert_eq!(r.empirical[0].hits, 0);
        assert_eq!(r.violations, 0);
    }

    #[test]
    fn declared_envelope_is_enforced() {
        assert!(matches!(
            hoeffding_check(&Liar, 1.0, &[1.0], 3, 0),
            Err(Error::Contract(_))
        ));
        let unbounded = A1Increments {
            n: 8,
            y0: 1,
            radius: f64::INFINITY,
        };
        assert!(matches!(
            hoeffding_check(&unbounded, 1.0, &[1.0], 3, 0),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn a1_increments_are_centred() {
        let p = A1Increments {
            n: 8,
            y0: 1,
            radius: 4.0,
        };
        let (mut z, mut s) = (Vec::new(), Vec::new());
        let mut sum = crate::stats::RunningStats::new();
        for t in 0..4000 {
            z.clear();
            s.clear();
            p.run(SeedPath::new(3, t), &mut z, &mut s).unwrap();
            assert_eq!(z.len(), 7);
            sum.push(z.iter().sum());
        }
        assert!(sum.estimate(3).within(0.0, 5.0));
    }
}
