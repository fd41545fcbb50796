use num_complex::Complex64;

use super::{kind_for, CoefficientSeries};
use crate::error::{Error, Result};

/// Coefficients of `exp(Σ_{k>=1} exponent[k] z^k)` up to `z^n_max`.
///
/// Uses the log-derivative recurrence `n A(n) = Σ_{k<=min(n,R)} k c_k A(n-k)`,
/// `O(N · min(N, R))` operations. `exponent[0]` is ignored.
pub fn exp_series_naive(exponent: &[Complex64], n_max: usize) -> CoefficientSeries {
    let r = exponent.len().saturating_sub(1);
    let weighted: Vec<Complex64> = exponent
        .iter()
        .enumerate()
        .map(|(k, c)| c * k as f64)
        .collect();
    let mut a = vec![Complex64::new(0.0, 0.0); n_max + 1];
    a[0] = Complex64::new(1.0, 0.0);
    for n in 1..=n_max {
        let top = n.min(r);
        let mut s = Complex64::new(0.0, 0.0);
        for k in 1..=top {
            s += weighted[k] * a[n - k];
        }
        a[n] = s / n as f64;
    }
    CoefficientSeries {
        coeffs: a,
        kind: kind_for(r, n_max),
    }
}

/// Real counterpart of [`exp_series_naive`] for non-negative exponents.
///
/// `c[k]` multiplies `z^k`; `c[0]` is ignored. Generating functions such as
/// `exp(Σ_{k<=y0} z^k / k)` have non-negative coefficients, which the
/// second-moment bounds rely on, so negative input is rejected.
pub fn exp_series_real(c: &[f64], n_max: usize) -> Result<Vec<f64>> {
    if let Some(k) = c.iter().skip(1).position(|&v| v < 0.0 || v.is_nan()) {
        return Err(Error::Domain(format!(
            "coefficient c[{}] = {} is negative",
            k + 1,
            c[k + 1]
        )));
    }
    let r = c.len().saturating_sub(1);
    let mut a = vec![0.0; n_max + 1];
    a[0] = 1.0;
    for n in 1..=n_max {
        let top = n.min(r);
        let s: f64 = (1..=top).map(|k| k as f64 * c[k] * a[n - k]).sum();
        a[n] = s / n as f64;
    }
    Ok(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::SeriesKind;

    fn cx(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn zero_exponent_gives_one() {
        let s = exp_series_naive(&[cx(0.0); 5], 8);
        assert_eq!(s.coeffs[0], cx(1.0));
        assert!(s.coeffs[1..].iter().all(|c| *c == cx(0.0)));
        assert_eq!(s.kind, SeriesKind::Truncated(4));
    }

    #[test]
    fn exp_z_gives_inverse_factorials() {
        let s = exp_series_naive(&[cx(0.0), cx(1.0)], 10);
        let mut f = 1.0;
        for n in 0..=10 {
            if n > 0 {
                f *= n as f64;
            }
            assert!((s.coeffs[n].re - 1.0 / f).abs() < 1e-15);
        }
        assert!((s.coeffs[3].re - 0.166_666_666_666_666_66).abs() < 1e-15);
    }

    #[test]
    fn real_exp_of_z() {
        let a = exp_series_real(&[0.0, 1.0], 6).unwrap();
        assert!((a[3] - 1.0 / 6.0).abs() < 1e-15);
        assert!((a[6] - 1.0 / 720.0).abs() < 1e-16);
    }

    #[test]
    fn real_harmonic_weights_sum_to_one() {
        // exp(Σ_{k<=n} z^k/k) has coefficient 1 at z^n: cycle-type
        // probabilities of a random permutation.
        let n = 30;
        let c: Vec<f64> = (0..=n).map(|k| if k == 0 { 0.0 } else { 1.0 / k as f64 }).collect();
        let a = exp_series_real(&c, n).unwrap();
        for (m, v) in a.iter().enumerate() {
            assert!((v - 1.0).abs() < 1e-12, "coefficient {m} = {v}");
        }
    }

    #[test]
    fn real_two_part_example() {
        // (1,1,1) contributes 1/6 and (2,1) contributes 1/2.
        let a = exp_series_real(&[0.0, 1.0, 0.5], 3).unwrap();
        assert!((a[3] - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn real_rejects_negative() {
        assert!(matches!(
            exp_series_real(&[0.0, 1.0, -0.5], 3),
            Err(Error::Domain(_))
        ));
    }
}
