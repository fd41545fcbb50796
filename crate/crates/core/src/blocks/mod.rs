//! The dyadic block schedule and the martingale diagnostics built on it.
//!
//! For a block `(X_{ℓ-1}, X_ℓ]` the large-part piece
//! `A_1(n) = Σ_{y0<k<=n} X(k)/√k · Σ_{|λ|=n-k, λ₁<k} a(λ)` is a sum of
//! martingale differences in `k`. Its conditional variance is controlled by
//! `V(n)`, split over the blocks `(y_{j-1}, y_j]`, and those block pieces are
//! in turn dominated by `U_j` and the circle integrals `I_j`.

mod diagnostics;
mod events;
mod ij;
mod nested;
mod schedule;

pub use diagnostics::{
    a1_inner_sums, block_sweep, compute_uj, compute_v, compute_v2, compute_v2_block, compute_v2_tilde,
    compute_v_block, compute_v_tilde, compute_w, diagnostics, u_domination_checks, u_tail_bound,
    v2_decomposition_check, v_decomposition_check, w_bound_check, BlockSweep, BoundCheck,
    DiagnosticsRecord, InnerRoute, UDomination, UTable, UjReport, WBoundReport, DIAGNOSTIC_N_MAX,
};
pub use events::{evaluate_events, EventRecord, Thresholds};
pub use ij::{compute_ij, compute_ij_fixed, expected_i0, ij_sequence, IjValue};
pub use nested::{
    a1_increment_check, martingale_checks, submartingale_check, supermartingale_check,
    IncrementCheck, MartingaleSummary, NestedConfig, SubmartingaleCheck, SupermartingaleBlock,
    SupermartingaleCheck,
};
pub use schedule::{
    b_factor, build_schedule, harmonic_range, BFactor, BlockSchedule, ScheduleParams,
    DEFAULT_SCALE_BUDGET_LOG2,
};
