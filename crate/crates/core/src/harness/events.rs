use serde::{Deserialize, Serialize};

use super::simulate::for_trials;
use super::CampaignConfig;
use crate::blocks::{build_schedule, evaluate_events, EventRecord};
use crate::error::Result;
use crate::rng::SeedPath;
use crate::stats::Proportion;

/// Relative tolerance for the circle integrals behind `I_j`.
pub const EVENT_QUAD_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventRow {
    pub event: String,
    pub frequency: Proportion,
}

/// Trials where a per-trial indicator inequality failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct UnionViolations {
    /// `1[B_ℓ] <= Σ_r 1[B_ℓ^(r)]`.
    pub b: usize,
    /// `1[not T] <= 1[P^(1)] + 1[P̃^(1)]`.
    pub t: usize,
    pub t2: usize,
}

impl UnionViolations {
    pub fn total(&self) -> usize {
        self.b + self.t + self.t2
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventTable {
    pub trials: usize,
    pub rows: Vec<EventRow>,
    pub union_violations: UnionViolations,
}

const NAMES: [&str; 14] = [
    "B", "B0", "B1", "B2", "B3", "P1", "P1_tilde", "not_T", "P2", "P2_tilde", "not_T2", "not_S",
    "I0_small", "any_T_n_fails",
];

fn indicators(r: &EventRecord) -> [bool; 14] {
    [
        r.b_ell,
        r.b_parts[0],
        r.b_parts[1],
        r.b_parts[2],
        r.b_parts[3],
        r.p1_event,
        r.p1_tilde_event,
        !r.t_event,
        r.p2_event,
        r.p2_tilde_event,
        !r.t2_event,
        !r.s_event,
        r.i0_small,
        r.t_n.iter().any(|&t| !t),
    ]
}

/// Per-trial event indicators on the configured block, tallied with Wilson intervals.
pub fn event_frequencies(cfg: &CampaignConfig) -> Result<EventTable> {
    cfg.validate()?;
    let sched = build_schedule(cfg.schedule)?;
    let (_, n_hi) = sched.n_range()?;
    let len = n_hi.max(sched.y_usize(sched.j_max)?);
    let mut hits = [0u64; 14];
    let mut unions = UnionViolations::default();
    cfg.install(|| {
        for_trials(
            0..cfg.trials as u64,
            |t| {
                let x = cfg.input.sample(len, SeedPath::new(cfg.master_seed, t))?;
                evaluate_events(&x, &sched, cfg.thresholds, EVENT_QUAD_TOL)
            },
            |_, rec| {
                for (h, b) in hits.iter_mut().zip(indicators(&rec)) {
                    *h += u64::from(b);
                }
                unions.b += usize::from(!rec.b_union_holds());
                unions.t += usize::from(!rec.t_union_holds());
                unions.t2 += usize::from(!rec.t2_union_holds());
                Ok(())
            },
        )
    })?;
    let rows = NAMES
        .iter()
        .zip(hits)
        .map(|(&event, h)| EventRow {
            event: event.to_string(),
            frequency: Proportion::new(h, cfg.trials as u64),
        })
        .collect();
    Ok(EventTable {
        trials: cfg.trials,
        rows,
        union_violations: unions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::InputModel;

    #[test]
    fn desk_table_has_no_union_failures() {
        let cfg = CampaignConfig {
            trials: 100,
            ..CampaignConfig::default()
        };
        let t = event_frequencies(&cfg).unwrap();
        assert_eq!(t.rows.len(), NAMES.len());
        assert_eq!(t.union_violations.total(), 0);
        assert!(t.rows.iter().all(|r| r.frequency.p >= 0.0 && r.frequency.p <= 1.0));
    }

    #[test]
    fn zero_input_has_no_large_values() {
        let cfg = CampaignConfig {
            trials: 3,
            input: InputModel::Zero,
            ..CampaignConfig::default()
        };
        let t = event_frequencies(&cfg).unwrap();
        assert_eq!(t.rows[0].frequency.hits, 0);
    }
}
