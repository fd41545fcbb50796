//! Reproducible Monte Carlo campaigns and their file formats.
//!
//! Trial `t` always draws its input from `SeedPath::new(master_seed, t)`, and
//! results are folded in trial order, so every output is a function of the
//! configuration alone and not of the thread count.
//!
//! Files written by the CLI:
//! - per-trial CSV: `trial,n,re_A,im_A,abs_A`
//! - aggregate CSV: `n,count,mean_abs,mean_sq,stderr` (`stderr` of `mean_sq`)
//! - JSON summary: `{version, config, result}`

mod checks;
mod config;
mod events;
mod output;
mod simulate;

pub use checks::{decompose_check, oracle_check, DecomposeReport, OracleReport, DEFAULT_ORACLE_N};
pub use config::{log_grid, CampaignConfig, DEFAULT_WORK_BUDGET, THREADS_ENV};
pub use events::{event_frequencies, EventRow, EventTable, UnionViolations, EVENT_QUAD_TOL};
pub use output::{create, to_json, write_csv, write_json, CsvSink, Format, Summary, VERSION_TAG};
pub use simulate::{
    aggregate_trials, growth_report, growth_statistic, moment_curve, run_simulation, trial_series,
    AggregateRow, Aggregator, GrowthReport, MomentCurve, MomentPoint, SimulationDataset, TrialRow,
    GROWTH_CAVEAT,
};
