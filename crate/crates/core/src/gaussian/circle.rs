//! Sampling `F_R(z) = exp(Σ_{k<=R} X(k)/√k z^k)` on circles and recovering
//! coefficients with the discretized Cauchy integral.

use std::f64::consts::TAU;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use super::GaussianSequence;
use crate::error::{Error, Result};

/// Successive-estimate tolerance for adaptive Cauchy recovery.
pub const CAUCHY_TOL: f64 = 1e-8;
/// Largest quadrature size the adaptive loops will try.
pub const CAUCHY_MAX_POINTS: usize = 1 << 22;
const CAUCHY_MIN_POINTS: usize = 1024;

/// Values of `F_R` at `M` equally spaced points of the circle of radius `r`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircleSamples {
    /// `values[m] = F_R(r e^{2πi m / M})`.
    pub values: Vec<Complex64>,
    pub radius: f64,
    /// Truncation length of the exponent.
    pub r_trunc: usize,
}

impl CircleSamples {
    pub fn points(&self) -> usize {
        self.values.len()
    }

    /// `(1/M) Σ_m |F_R(r e^{iθ_m})|²`, the quadrature of `(1/2π)∫|F_R|²`.
    pub fn mean_square(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() / self.values.len() as f64
    }
}

/// Samples `F_R` for the Gaussian input, using `X(1..=r_trunc)`.
pub fn eval_on_circle(
    x: &GaussianSequence,
    r_trunc: usize,
    radius: f64,
    points: usize,
) -> Result<CircleSamples> {
    let exponent = x.exponent(r_trunc)?;
    eval_exponent_on_circle(&exponent, radius, points)
}

/// Samples `exp(P)` for an arbitrary exponent polynomial `P` (power-indexed).
///
/// `P` is evaluated at all points with one inverse FFT (terms of degree
/// `>= M` are folded modulo `M`, which is exact on the grid) and then
/// exponentiated pointwise.
pub fn eval_exponent_on_circle(
    exponent: &[Complex64],
    radius: f64,
    points: usize,
) -> Result<CircleSamples> {
    CircleEvaluator::new(points)?.eval(exponent, radius)
}

/// Circle sampler with a cached FFT plan, for repeated evaluations at a
/// fixed point count.
#[derive(Clone)]
pub struct CircleEvaluator {
    points: usize,
    fft: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for CircleEvaluator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CircleEvaluator")
            .field("points", &self.points)
            .finish()
    }
}

impl CircleEvaluator {
    pub fn new(points: usize) -> Result<Self> {
        if points < 2 || !points.is_power_of_two() {
            return Err(Error::Domain(format!(
                "point count must be a power of two >= 2, got {points}"
            )));
        }
        Ok(CircleEvaluator {
            points,
            fft: FftPlanner::new().plan_fft_inverse(points),
        })
    }

    pub fn points(&self) -> usize {
        self.points
    }

    /// `P(r e^{iθ_m})` for every grid point, without exponentiating.
    pub fn eval_polynomial(&self, exponent: &[Complex64], radius: f64) -> Result<Vec<Complex64>> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::Domain(format!("radius must be positive, got {radius}")));
        }
        let mut buf = vec![Complex64::new(0.0, 0.0); self.points];
        let mut rk = 1.0;
        for (k, c) in exponent.iter().enumerate().skip(1) {
            rk *= radius;
            buf[k % self.points] += c * rk;
        }
        self.fft.process(&mut buf);
        Ok(buf)
    }

    pub fn eval(&self, exponent: &[Complex64], radius: f64) -> Result<CircleSamples> {
        let mut buf = self.eval_polynomial(exponent, radius)?;
        for (m, v) in buf.iter_mut().enumerate() {
            let e = v.exp();
            if !(e.re.is_finite() && e.im.is_finite()) {
                return Err(Error::NonFinite(format!(
                    "exp(P) overflowed at point {m} of {} (Re P = {:.3})",
                    self.points, v.re
                )));
            }
            *v = e;
        }
        Ok(CircleSamples {
            values: buf,
            radius,
            r_trunc: exponent.len().saturating_sub(1),
        })
    }

    /// `|exp(P)|² = exp(2 Re P)` at every grid point.
    pub fn abs_sq(&self, exponent: &[Complex64], radius: f64) -> Result<Vec<f64>> {
        let buf = self.eval_polynomial(exponent, radius)?;
        buf.iter()
            .enumerate()
            .map(|(m, v)| {
                let e = (2.0 * v.re).exp();
                if e.is_finite() {
                    Ok(e)
                } else {
                    Err(Error::NonFinite(format!(
                        "|exp(P)|² overflowed at point {m} of {} (Re P = {:.3})",
                        self.points, v.re
                    )))
                }
            })
            .collect()
    }

    /// `(1/M) Σ_m |exp(P(r e^{iθ_m}))|²`.
    pub fn mean_square(&self, exponent: &[Complex64], radius: f64) -> Result<f64> {
        Ok(self.abs_sq(exponent, radius)?.iter().sum::<f64>() / self.points as f64)
    }
}

/// Discretized Cauchy integral for the coefficient of `z^n`:
/// `(1/M) Σ_m F(r e^{iθ_m}) e^{-inθ_m} r^{-n}`.
pub fn coeff_via_cauchy(samples: &CircleSamples, n: usize) -> Result<Complex64> {
    check_cauchy_range(samples, n)?;
    let m_pts = samples.points();
    let mut s = Complex64::new(0.0, 0.0);
    for (m, v) in samples.values.iter().enumerate() {
        let phase = ((n * m) % m_pts) as f64 / m_pts as f64;
        s += v * Complex64::cis(-TAU * phase);
    }
    Ok(s / m_pts as f64 / samples.radius.powi(n as i32))
}

/// All coefficients `0..=n_max` from one forward FFT.
pub fn cauchy_coefficients(samples: &CircleSamples, n_max: usize) -> Result<Vec<Complex64>> {
    check_cauchy_range(samples, n_max)?;
    let m_pts = samples.points();
    let mut buf = samples.values.clone();
    FftPlanner::new().plan_fft_forward(m_pts).process(&mut buf);
    let mut scale = 1.0 / m_pts as f64;
    let inv_r = 1.0 / samples.radius;
    Ok(buf[..=n_max]
        .iter()
        .map(|v| {
            let out = v * scale;
            scale *= inv_r;
            out
        })
        .collect())
}

fn check_cauchy_range(samples: &CircleSamples, n: usize) -> Result<()> {
    if n > samples.r_trunc {
        return Err(Error::Domain(format!(
            "Cauchy recovery needs n <= R, got n = {n} > R = {}",
            samples.r_trunc
        )));
    }
    if 2 * samples.r_trunc > samples.points() {
        return Err(Error::Domain(format!(
            "alias guard: R = {} exceeds M/2 = {}",
            samples.r_trunc,
            samples.points() / 2
        )));
    }
    Ok(())
}

/// Result of adaptive Cauchy recovery.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CauchyEstimate {
    pub coeffs: Vec<Complex64>,
    /// Quadrature size at which the loop stopped.
    pub points: usize,
    /// Largest coefficient change between the last two sizes.
    pub last_change: f64,
}

/// Recovers `A(0..=n_max)` from `F_R` on the circle of radius `radius`,
/// doubling `M` from `max(2R, 1024)` until successive estimates differ by
/// less than `tol` (absolute, over all `n`).
pub fn cauchy_coefficients_adaptive(
    x: &GaussianSequence,
    r_trunc: usize,
    radius: f64,
    n_max: usize,
    tol: f64,
) -> Result<CauchyEstimate> {
    if n_max > r_trunc {
        return Err(Error::Domain(format!(
            "Cauchy recovery needs n <= R, got n = {n_max} > R = {r_trunc}"
        )));
    }
    let exponent = x.exponent(r_trunc)?;
    let mut points = (2 * r_trunc).max(CAUCHY_MIN_POINTS).next_power_of_two();
    let mut prev = cauchy_coefficients(&eval_exponent_on_circle(&exponent, radius, points)?, n_max)?;
    loop {
        if points >= CAUCHY_MAX_POINTS {
            return Err(Error::Budget(format!(
                "Cauchy quadrature did not settle below {tol:e} by M = {points}"
            )));
        }
        points *= 2;
        let next = cauchy_coefficients(&eval_exponent_on_circle(&exponent, radius, points)?, n_max)?;
        let change = prev
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        if change < tol {
            return Ok(CauchyEstimate {
                coeffs: next,
                points,
                last_change: change,
            });
        }
        prev = next;
    }
}

/// Adaptive quadrature of `(1/2π)∫|exp(P(r e^{iθ}))|² dθ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanSquare {
    pub value: f64,
    pub points: usize,
}

/// Doubles `M` from `start` until the relative change of the mean square
/// drops below `rel_tol`, up to [`CAUCHY_MAX_POINTS`].
pub fn mean_square_adaptive(
    exponent: &[Complex64],
    radius: f64,
    start: usize,
    rel_tol: f64,
) -> Result<MeanSquare> {
    let mut points = start.max(2).next_power_of_two();
    let mut prev = eval_exponent_on_circle(exponent, radius, points)?.mean_square();
    loop {
        if points >= CAUCHY_MAX_POINTS {
            return Err(Error::Budget(format!(
                "circle quadrature did not settle below {rel_tol:e} by M = {points}"
            )));
        }
        points *= 2;
        let next = eval_exponent_on_circle(exponent, radius, points)?.mean_square();
        if (next - prev).abs() <= rel_tol * next.abs() {
            return Ok(MeanSquare { value: next, points });
        }
        prev = next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::exp_series_naive;
    use crate::rng::SeedPath;

    fn single(x1: f64, len: usize) -> GaussianSequence {
        let mut v = vec![Complex64::new(0.0, 0.0); len];
        v[0] = Complex64::new(x1, 0.0);
        GaussianSequence::from_values(v).unwrap()
    }

    #[test]
    fn zero_input_samples_are_one() {
        let x = GaussianSequence::zeros(8).unwrap();
        let s = eval_on_circle(&x, 8, 1.0, 1 << 16).unwrap();
        assert!(s.values.iter().all(|v| (v - Complex64::new(1.0, 0.0)).norm() < 1e-15));
        assert!((s.mean_square() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn single_term_at_theta_zero() {
        let s = eval_on_circle(&single(1.0, 1), 1, 1.0, 16).unwrap();
        assert!((s.values[0].re - std::f64::consts::E).abs() < 1e-14);
        assert!(s.values[0].im.abs() < 1e-15);
    }

    #[test]
    fn cauchy_recovers_exp_z() {
        let x = single(1.0, 64);
        let s = eval_on_circle(&x, 64, 1.0, 1024).unwrap();
        let c3 = coeff_via_cauchy(&s, 3).unwrap();
        assert!((c3 - Complex64::new(1.0 / 6.0, 0.0)).norm() < 1e-8);
        let z = eval_on_circle(&GaussianSequence::zeros(16).unwrap(), 16, 1.0, 64).unwrap();
        assert!((coeff_via_cauchy(&z, 0).unwrap() - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        for n in 1..=16 {
            assert!(coeff_via_cauchy(&z, n).unwrap().norm() < 1e-15);
        }
    }

    #[test]
    fn single_and_batch_agree() {
        let x = GaussianSequence::sample(32, SeedPath::new(1, 2)).unwrap();
        let s = eval_on_circle(&x, 32, 1.01, 256).unwrap();
        let all = cauchy_coefficients(&s, 32).unwrap();
        for n in [0, 1, 7, 32] {
            assert!((all[n] - coeff_via_cauchy(&s, n).unwrap()).norm() < 1e-10);
        }
    }

    #[test]
    fn n_above_r_is_domain_error() {
        let x = GaussianSequence::zeros(4).unwrap();
        let s = eval_on_circle(&x, 4, 1.0, 64).unwrap();
        assert!(matches!(coeff_via_cauchy(&s, 5), Err(Error::Domain(_))));
    }

    #[test]
    fn alias_guard() {
        let x = GaussianSequence::zeros(40).unwrap();
        let s = eval_on_circle(&x, 40, 1.0, 64).unwrap();
        assert!(matches!(coeff_via_cauchy(&s, 1), Err(Error::Domain(_))));
    }

    #[test]
    fn bad_grid_rejected() {
        let x = GaussianSequence::zeros(4).unwrap();
        assert!(eval_on_circle(&x, 4, 1.0, 100).is_err());
        assert!(eval_on_circle(&x, 4, 0.0, 64).is_err());
        assert!(matches!(
            eval_on_circle(&x, 5, 1.0, 64),
            Err(Error::MissingInput { .. })
        ));
    }

    #[test]
    fn overflow_is_reported() {
        let x = single(1000.0, 1);
        assert!(matches!(eval_on_circle(&x, 1, 1.0, 8), Err(Error::NonFinite(_))));
    }

    #[test]
    fn adaptive_matches_recurrence() {
        let x = GaussianSequence::sample(128, SeedPath::new(77, 0)).unwrap();
        let est = cauchy_coefficients_adaptive(&x, 128, 1.0, 64, CAUCHY_TOL).unwrap();
        let rec = exp_series_naive(&x.exponent(128).unwrap(), 64);
        for n in 0..=64 {
            assert!((est.coeffs[n] - rec.coeffs[n]).norm() < 1e-6, "n = {n}");
        }
    }
}
