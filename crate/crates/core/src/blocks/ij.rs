//! The normalized circle integrals
//! `I_j = (1/ỹ_j)(ỹ_j/ỹ_0)^{-1/ℓ^K} · (1/2π)∫|F_{y_j}(e^{iθ})|² dθ`.

use serde::{Deserialize, Serialize};

use super::schedule::BlockSchedule;
use crate::error::{Error, Result};
use crate::gaussian::{mean_square_adaptive, CircleEvaluator, GaussianSequence};

/// One `I_j` together with the quadrature that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IjValue {
    pub j: usize,
    pub value: f64,
    /// `(1/2π)∫|F_{y_j}|²` as estimated by the quadrature.
    pub mean_square: f64,
    pub points: usize,
}

fn check_j(sched: &BlockSchedule, j: usize) -> Result<usize> {
    if j > sched.j_max {
        return Err(Error::Domain(format!(
            "I_j needs 0 <= j <= J = {}, got {j}",
            sched.j_max
        )));
    }
    sched.y_usize(j)
}

/// Quadrature size doubles from `max(2 y_j, 1024)` until the relative change
/// drops below `quad_tol`.
pub fn compute_ij(x: &GaussianSequence, sched: &BlockSchedule, j: usize, quad_tol: f64) -> Result<IjValue> {
    let yj = check_j(sched, j)?;
    let ms = mean_square_adaptive(&x.exponent(yj)?, 1.0, (2 * yj).max(1024), quad_tol)?;
    Ok(IjValue {
        j,
        value: sched.ij_prefactor(j) * ms.value,
        mean_square: ms.value,
        points: ms.points,
    })
}

/// `I_j` at a fixed quadrature size.
///
/// With the same `M` on both sides, `E[I_j | X(1..=y_{j-1})] = b_j I_{j-1}`
/// holds exactly, because `E|exp(c_k e^{ikθ})|² = e^{1/k}` at every point.
pub fn compute_ij_fixed(
    x: &GaussianSequence,
    sched: &BlockSchedule,
    j: usize,
    eval: &CircleEvaluator,
) -> Result<IjValue> {
    let yj = check_j(sched, j)?;
    let ms = eval.mean_square(&x.exponent(yj)?, 1.0)?;
    Ok(IjValue {
        j,
        value: sched.ij_prefactor(j) * ms,
        mean_square: ms,
        points: eval.points(),
    })
}

/// `I_0, ..., I_J` by adaptive quadrature.
pub fn ij_sequence(x: &GaussianSequence, sched: &BlockSchedule, quad_tol: f64) -> Result<Vec<IjValue>> {
    (0..=sched.j_max).map(|j| compute_ij(x, sched, j, quad_tol)).collect()
}

/// `E[I_0] = e^{H_{y0}} / ỹ_0`, from the pointwise second moment `e^{1/k}`.
pub fn expected_i0(sched: &BlockSchedule) -> f64 {
    super::schedule::harmonic_range(0, sched.y0()).exp() / sched.y_tilde[0]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blocks::{b_factor, build_schedule, ScheduleParams};
    use crate::rng::SeedPath;

    #[test]
    fn zero_input_closed_form() {
        let s = build_schedule(ScheduleParams::desk()).unwrap();
        let z = GaussianSequence::zeros(20).unwrap();
        let i2 = compute_ij(&z, &s, 2, 1e-10).unwrap();
        assert!((i2.value - (-1.25f64).exp()).abs() < 1e-12);
        assert_eq!(i2.mean_square, 1.0);
    }

    #[test]
    fn ratio_of_equal_blocks() {
        // y0 = y1 = 1 on the desk schedule: the integrals coincide.
        let s = build_schedule(ScheduleParams::desk()).unwrap();
        let x = GaussianSequence::sample(20, SeedPath::new(11, 0)).unwrap();
        let i0 = compute_ij(&x, &s, 0, 1e-12).unwrap();
        let i1 = compute_ij(&x, &s, 1, 1e-12).unwrap();
        let want = (-0.5f64 - 0.125).exp();
        assert!((i1.value / i0.value - want).abs() < 1e-12);
        assert!((b_factor(&s, 1).unwrap().value - want).abs() < 1e-12);
    }

    #[test]
    fn fixed_and_adaptive_agree() {
        let s = build_schedule(ScheduleParams::desk()).unwrap();
        let x = GaussianSequence::sample(20, SeedPath::new(11, 1)).unwrap();
        let eval = CircleEvaluator::new(1 << 12).unwrap();
        for j in 0..=s.j_max {
            let a = compute_ij(&x, &s, j, 1e-12).unwrap().value;
            let b = compute_ij_fixed(&x, &s, j, &eval).unwrap().value;
            assert!((a - b).abs() < 1e-10 * a);
        }
        assert!(compute_ij(&x, &s, s.j_max + 1, 1e-8).is_err());
    }

    #[test]
    fn expected_i0_desk() {
        let s = build_schedule(ScheduleParams::desk()).unwrap();
        assert!((expected_i0(&s) - std::f64::consts::E).abs() < 1e-12);
    }
}
