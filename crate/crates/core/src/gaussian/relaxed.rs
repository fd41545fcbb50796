//! Divide-and-conquer exponentiation.
//!
//! The recurrence `n A(n) = Σ_{i<n} b(n-i) A(i)` with `b(k) = k c_k` is an
//! online convolution: `A(n)` depends on every earlier coefficient. Solving
//! `[l, r)` recursively, the finished left half `[l, m)` is convolved with
//! `b` once by FFT and its contributions are pushed into the right half,
//! giving `O(N log² N)` overall.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::{kind_for, CoefficientSeries};

/// Segments at or below this width are finished by direct summation.
const LEAF: usize = 64;

/// Same contract as [`super::exp_series_naive`], computed in `O(N log² N)`.
pub fn exp_series_fast(exponent: &[Complex64], n_max: usize) -> CoefficientSeries {
    let r = exponent.len().saturating_sub(1);
    let zero = Complex64::new(0.0, 0.0);
    let mut b = vec![zero; n_max + 1];
    for (k, slot) in b.iter_mut().enumerate().take(r.min(n_max) + 1).skip(1) {
        *slot = exponent[k] * k as f64;
    }
    let mut solver = Solver {
        b,
        a: vec![zero; n_max + 1],
        acc: vec![zero; n_max + 1],
        planner: FftPlanner::new(),
    };
    solver.a[0] = Complex64::new(1.0, 0.0);
    solver.solve(0, n_max + 1);
    CoefficientSeries {
        coeffs: solver.a,
        kind: kind_for(r, n_max),
    }
}

struct Solver {
    b: Vec<Complex64>,
    a: Vec<Complex64>,
    /// `acc[n]` holds `Σ b(n-i) A(i)` over every `i` already pushed forward.
    acc: Vec<Complex64>,
    planner: FftPlanner<f64>,
}

impl Solver {
    fn solve(&mut self, l: usize, r: usize) {
        if r - l <= LEAF {
            for n in l.max(1)..r {
                let mut s = self.acc[n];
                for i in l..n {
                    s += self.b[n - i] * self.a[i];
                }
                self.a[n] = s / n as f64;
            }
            return;
        }
        let m = (l + r) / 2;
        self.solve(l, m);
        self.push_forward(l, m, r);
        self.solve(m, r);
    }

    /// Adds the contributions of `A(l..m)` to `acc[m..r]`.
    fn push_forward(&mut self, l: usize, m: usize, r: usize) {
        let width = r - l;
        // Cyclic length `width` is enough: wrapped terms only land below
        // index `m - l`, which is never read.
        let size = width.next_power_of_two();
        let zero = Complex64::new(0.0, 0.0);
        let mut lhs = vec![zero; size];
        lhs[..m - l].copy_from_slice(&self.a[l..m]);
        let mut rhs = vec![zero; size];
        rhs[..width].copy_from_slice(&self.b[..width]);

        let forward: Arc<dyn Fft<f64>> = self.planner.plan_fft_forward(size);
        let inverse: Arc<dyn Fft<f64>> = self.planner.plan_fft_inverse(size);
        forward.process(&mut lhs);
        forward.process(&mut rhs);
        for (x, y) in lhs.iter_mut().zip(&rhs) {
            *x *= y;
        }
        inverse.process(&mut lhs);
        let scale = 1.0 / size as f64;
        for n in m..r {
            self.acc[n] += lhs[n - l] * scale;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::{exp_series_naive, GaussianSequence};
    use crate::rng::SeedPath;

    #[test]
    fn zero_input_n1024() {
        let s = exp_series_fast(&[Complex64::new(0.0, 0.0); 1025], 1024);
        assert_eq!(s.coeffs[0], Complex64::new(1.0, 0.0));
        assert!(s.coeffs[1..].iter().all(|c| c.norm() == 0.0));
    }

    #[test]
    fn matches_naive_across_leaf_boundaries() {
        for n in [0, 1, 2, 63, 64, 65, 127, 128, 129, 300, 1000] {
            let x = GaussianSequence::sample(n.max(1), SeedPath::new(5, n as u64)).unwrap();
            let c = x.exponent(n.max(1)).unwrap();
            let naive = exp_series_naive(&c, n);
            let fast = exp_series_fast(&c, n);
            let tol = 1e-10 * (1.0 + naive.max_abs());
            assert!(naive.max_abs_diff(&fast) <= tol, "n = {n}");
            assert_eq!(naive.kind, fast.kind);
        }
    }

    #[test]
    fn truncated_exponent_matches_naive() {
        let x = GaussianSequence::sample(10, SeedPath::new(8, 0)).unwrap();
        let c = x.exponent(10).unwrap();
        let naive = exp_series_naive(&c, 500);
        let fast = exp_series_fast(&c, 500);
        assert!(naive.max_abs_diff(&fast) <= 1e-9 * (1.0 + naive.max_abs()));
    }
}
