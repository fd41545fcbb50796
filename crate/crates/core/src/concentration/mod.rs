//! Empirical checks of the probabilistic inequalities used on the martingale
//! pieces: a Hoeffding tail bound for predictable envelopes, the maximal
//! inequalities for non-negative supermartingales and L² submartingales, the
//! low moments of the truncated chaos on a circle, and the exact
//! second-moment bounds for the small-part and triple-top pieces.
//!
//! Empirical frequencies are compared one-sided: a violation means the lower
//! Wilson limit sits above the bound.

use serde::{Deserialize, Serialize};

use crate::stats::Proportion;

mod bounds;
mod chaos;
mod doob;
mod hoeffding;

pub use bounds::{a0_bound_evaluator, a3_bound_evaluator, BoundPair};
pub use chaos::{bound_shape, chaos_first_moment, chaos_moment_estimate, ChaosConfig, MomentFitReport};
pub use doob::{
    doob_l2_check, doob_max_check, ConstantSequence, DoobL2Config, DoobL2Report, IjSequence,
    SupermartingaleSequence,
};
pub use hoeffding::{
    hoeffding_bound, hoeffding_check, A1Increments, IncrementProcess, SymmetricSteps, ZeroIncrements,
};

/// Empirical tail frequencies next to theoretical bounds, aligned by index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailReport {
    pub epsilon_grid: Vec<f64>,
    pub empirical: Vec<Proportion>,
    pub bound_values: Vec<f64>,
    pub violations: usize,
    pub trials: u64,
}

impl TailReport {
    pub fn new(epsilon_grid: Vec<f64>, empirical: Vec<Proportion>, bound_values: Vec<f64>) -> Self {
        debug_assert_eq!(epsilon_grid.len(), empirical.len());
        debug_assert_eq!(epsilon_grid.len(), bound_values.len());
        let violations = empirical.iter().zip(&bound_values).filter(|(p, b)| p.lo > **b).count();
        let trials = empirical.first().map_or(0, |p| p.trials);
        TailReport {
            epsilon_grid,
            empirical,
            bound_values,
            violations,
            trials,
        }
    }
}
