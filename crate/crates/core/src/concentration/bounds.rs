use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partition::{restricted_second_moment, PartitionConstraint, TopMultiplicity};

/// An exact second moment next to the bound it must respect.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundPair {
    pub exact: f64,
    pub bound: f64,
    pub holds: bool,
}

impl BoundPair {
    fn new(exact: f64, bound: f64) -> Result<Self> {
        // Relative slack for the rounding in the exact series.
        let holds = exact <= bound * (1.0 + 1e-12) + 1e-300;
        if !holds {
            return Err(Error::Contract(format!("exact {exact} exceeds bound {bound}")));
        }
        Ok(BoundPair { exact, bound, holds })
    }
}

/// `E|A0(n)|²` over `λ₁ <= y0` against `r^{-n} exp(Σ_{k<=y0} r^k/k)`.
/// `r` defaults to `e^{1/y0}`.
pub fn a0_bound_evaluator(n: u32, y0: u32, r: Option<f64>) -> Result<BoundPair> {
    let r = match r {
        Some(r) => r,
        None if y0 == 0 => return Err(Error::Domain("default radius needs y0 >= 1".into())),
        None => (1.0 / y0 as f64).exp(),
    };
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::Domain(format!("radius must be positive, got {r}")));
    }
    let exact = restricted_second_moment(n, PartitionConstraint::max_part(y0))?;
    let log_bound = -(n as f64) * r.ln()
        + (1..=y0).map(|k| (k as f64 * r.ln()).exp() / k as f64).sum::<f64>();
    BoundPair::new(exact, log_bound.exp())
}

/// `E|A3(n)|²` over `λ₁ > y0` with `m_{λ₁} >= 3`, against `Σ_{y0<k<=n/3} k^{-3}`.
pub fn a3_bound_evaluator(n: u32, y0: u32) -> Result<BoundPair> {
    let exact = restricted_second_moment(n, PartitionConstraint::large_top(y0, TopMultiplicity::AtLeastThree))?;
    let bound = ((y0 + 1)..=(n / 3)).map(|k| (k as f64).powi(-3)).sum();
    BoundPair::new(exact, bound)
}
