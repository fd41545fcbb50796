//! `rmc`: command-line front end for the Monte Carlo campaigns and checks.
//!
//! Exit codes: 0 success, 1 invariant violation, 2 configuration error,
//! 3 budget exceeded.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use rmc_core::blocks::{
    b_factor, block_sweep, build_schedule, martingale_checks, u_domination_checks, v2_decomposition_check,
    v_decomposition_check, w_bound_check, BlockSchedule, MartingaleSummary, NestedConfig, ScheduleParams,
    Thresholds,
};
use rmc_core::concentration::{
    a0_bound_evaluator, a3_bound_evaluator, chaos_moment_estimate, doob_l2_check, doob_max_check,
    hoeffding_check, A1Increments, ChaosConfig, DoobL2Config, DoobL2Report, IjSequence, MomentFitReport,
    SupermartingaleSequence, SymmetricSteps, TailReport,
};
use rmc_core::gaussian::{InputModel, Method};
use rmc_core::harness::{
    decompose_check, event_frequencies, growth_report, moment_curve, oracle_check, run_simulation,
    to_json, write_csv, write_json, CampaignConfig, CsvSink, Format, Summary, DEFAULT_ORACLE_N,
};
use rmc_core::rng::SeedPath;
use rmc_core::{Error, Result};

#[derive(Parser)]
#[command(name = "rmc", version, about = "Coefficients of exp(Σ X(k) z^k/√k): simulation and checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long = "n-max", default_value_t = 8192)]
    n_max: usize,
    /// Worker threads; 0 picks RMC_THREADS or the number of cores.
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Output directory. Without it the main table goes to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "csv")]
    format: Format,
    #[arg(long, default_value = "fast")]
    method: Method,
    /// Replace the Gaussian input by X ≡ 0.
    #[arg(long)]
    zero_input: bool,
}

#[derive(Args, Clone)]
struct Sched {
    #[arg(long, default_value_t = 2)]
    ell: u32,
    #[arg(long = "K", default_value_t = 2.0)]
    k: f64,
    #[arg(long, default_value_t = 0.25)]
    epsilon: f64,
    /// Defaults to 1 + 100K.
    #[arg(long = "C0")]
    c0: Option<f64>,
    /// Level for |A(n)| / (log n)^{3/4+ε}.
    #[arg(long, default_value_t = 4.0)]
    threshold_total: f64,
    /// Level for each piece |A_r(n)| / (log n)^{3/4+ε}.
    #[arg(long, default_value_t = 1.0)]
    threshold_part: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Sample A(0..=N) and aggregate |A(n)| and |A(n)|² over a log grid.
    Simulate {
        #[command(flatten)]
        common: Common,
    },
    /// Compare the series paths with partition enumeration.
    OracleCheck {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = DEFAULT_ORACLE_N)]
        oracle_n: usize,
    },
    /// Estimate E|A(n)| against the (log n)^{-1/4} profile.
    Moments {
        #[command(flatten)]
        common: Common,
    },
    /// Check A0 + A1 + A2 + A3 = A(n) on the block (X_{ℓ-1}, X_ℓ].
    Decompose {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        sched: Sched,
    },
    /// Schedule, b_j factors, per-trial variance bounds and nested martingale checks.
    Blocks {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        sched: Sched,
        /// Also run the nested martingale checks.
        #[arg(long)]
        nested: bool,
        #[arg(long, default_value_t = 200)]
        outer: usize,
        #[arg(long, default_value_t = 2000)]
        inner: usize,
        #[arg(long, default_value_t = 1024)]
        points: usize,
    },
    /// Low moments of the truncated chaos on a circle.
    Chaos {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1.0)]
        q: f64,
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        /// Truncation lengths R, comma separated.
        #[arg(long = "R", value_delimiter = ',', default_values_t = vec![16usize, 64, 256])]
        r_grid: Vec<usize>,
        #[arg(long, default_value_t = 20)]
        blocks: usize,
    },
    /// Hoeffding, maximal-inequality and second-moment bound checks.
    Concentration {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        sched: Sched,
    },
    /// Frequencies of the large-value and variance events on one block.
    Events {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        sched: Sched,
    },
    /// Distribution of max |A(n)| / (log n)^{3/4+ε} over n0 <= n <= N.
    Growth {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        sched: Sched,
        #[arg(long, default_value_t = 3)]
        n0: usize,
    },
}

fn config(common: &Common, sched: Option<&Sched>) -> CampaignConfig {
    let mut cfg = CampaignConfig {
        trials: common.trials,
        master_seed: common.seed,
        method: common.method,
        input: if common.zero_input { InputModel::Zero } else { InputModel::Gaussian },
        threads: common.threads,
        ..CampaignConfig::with_n_max(common.n_max)
    };
    if let Some(s) = sched {
        cfg.schedule = ScheduleParams {
            epsilon: s.epsilon,
            c0: s.c0,
            ..ScheduleParams::new(s.ell, s.k)
        };
        cfg.thresholds = Thresholds {
            total: s.threshold_total,
            part: s.threshold_part,
        };
    }
    cfg
}

/// Writes `<name>.json` (and `<name>.csv` for csv format) under `--out`, or
/// prints the table or summary to stdout.
fn emit<T: Serialize, R: Serialize>(
    common: &Common,
    cfg: &CampaignConfig,
    name: &str,
    report: &T,
    table: &[R],
) -> Result<()> {
    let summary = Summary::new(cfg, report);
    match (&common.out, common.format) {
        (Some(dir), format) => {
            write_json(&dir.join(format!("{name}.json")), &summary)?;
            if format == Format::Csv {
                write_csv(&dir.join(format!("{name}.csv")), table)?;
            }
        }
        (None, Format::Json) => println!("{}", to_json(&summary)?),
        (None, Format::Csv) => {
            let mut w = csv::Writer::from_writer(std::io::stdout());
            for row in table {
                w.serialize(row).map_err(|e| Error::Serialize(e.to_string()))?;
            }
            w.flush().map_err(|e| Error::io("<stdout>", e))?;
        }
    }
    Ok(())
}

/// Outcome of a subcommand that ran to completion.
enum Outcome {
    Ok,
    Violation(String),
}

fn check(ok: bool, what: impl FnOnce() -> String) -> Outcome {
    if ok {
        Outcome::Ok
    } else {
        Outcome::Violation(what())
    }
}

fn simulate(common: &Common) -> Result<Outcome> {
    let cfg = config(common, None);
    let data = match (&common.out, common.format) {
        (Some(dir), Format::Csv) => {
            let mut sink = CsvSink::create(&dir.join("trials.csv"))?;
            let data = run_simulation(&cfg, |row| sink.write(row))?;
            sink.finish()?;
            data
        }
        _ => run_simulation(&cfg, |_| Ok(()))?,
    };
    emit(common, &cfg, "aggregates", &data, &data.aggregates)?;
    Ok(check(data.second_moment_flags.is_empty(), || {
        format!("mean |A(n)|² differs from 1 by more than 5 stderr at n = {:?}", data.second_moment_flags)
    }))
}

fn oracle(common: &Common, oracle_n: usize) -> Result<Outcome> {
    let cfg = config(common, None);
    let r = oracle_check(&cfg, oracle_n)?;
    emit(common, &cfg, "oracle_check", &r, &[r])?;
    Ok(check(r.passed, || {
        format!(
            "series mismatch: naive vs oracle {:.3e} (tol {:.0e}), fast vs naive {:.3e} (tol {:.0e})",
            r.naive_vs_oracle, r.oracle_tol, r.fast_vs_naive, r.fast_tol
        )
    }))
}

#[derive(Serialize)]
struct MomentRow {
    n: usize,
    count: u64,
    mean_abs: f64,
    stderr: f64,
    reference: f64,
    ratio: Option<f64>,
    reference_ratio: Option<f64>,
}

fn moments(common: &Common) -> Result<Outcome> {
    let cfg = config(common, None);
    let curve = moment_curve(&cfg)?;
    let rows: Vec<MomentRow> = curve
        .points
        .iter()
        .map(|p| MomentRow {
            n: p.n,
            count: p.mean_abs.count,
            mean_abs: p.mean_abs.mean,
            stderr: p.mean_abs.stderr,
            reference: p.reference,
            ratio: p.ratio,
            reference_ratio: p.reference_ratio,
        })
        .collect();
    emit(common, &cfg, "moments", &curve, &rows)?;
    if curve.degenerate {
        eprintln!("note: every estimate is zero; the curve is degenerate");
    }
    Ok(Outcome::Ok)
}

fn decompose(common: &Common, sched: &Sched) -> Result<Outcome> {
    let cfg = config(common, Some(sched));
    let r = decompose_check(&cfg)?;
    emit(common, &cfg, "decompose", &r, &[r])?;
    Ok(check(r.passed, || format!("decomposition identity off by more than {:.0e}: {r:?}", r.tol)))
}

#[derive(Serialize)]
struct BlockRow {
    j: usize,
    y: u128,
    y_tilde: f64,
    b_j: Option<f64>,
    prefactor: f64,
}

#[derive(Serialize, Default)]
struct BoundTally {
    trials: usize,
    records: usize,
    v_decomposition_failures: usize,
    v2_decomposition_failures: usize,
    w_proven_failures: usize,
    /// Informational: the halved form needs every contributing k >= 2y0.
    w_halved_failures: usize,
    u_checks: usize,
    u_failures: usize,
}

#[derive(Serialize)]
struct BlocksReport {
    schedule: BlockSchedule,
    bounds: BoundTally,
    martingale: Option<MartingaleSummary>,
}

fn blocks(common: &Common, sched_args: &Sched, nested: Option<NestedConfig>) -> Result<Outcome> {
    let cfg = config(common, Some(sched_args));
    let sched = build_schedule(cfg.schedule)?;
    let rows = (0..=sched.j_max)
        .map(|j| {
            Ok(BlockRow {
                j,
                y: sched.y[j],
                y_tilde: sched.y_tilde[j],
                b_j: if j == 0 { None } else { Some(b_factor(&sched, j)?.value) },
                prefactor: sched.ij_prefactor(j),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let (n_lo, n_hi) = sched.n_range()?;
    let len = n_hi.max(sched.y_usize(sched.j_max)?);
    let mut tally = BoundTally {
        trials: cfg.trials,
        ..BoundTally::default()
    };
    cfg.install(|| {
        for t in 0..cfg.trials as u64 {
            let x = cfg.input.sample(len, SeedPath::new(cfg.master_seed, t))?;
            let sweep = block_sweep(&x, &sched, n_lo, n_hi, Some(n_hi))?;
            for rec in &sweep.records {
                tally.records += 1;
                tally.v_decomposition_failures += usize::from(!v_decomposition_check(rec, &sched).holds);
                tally.v2_decomposition_failures += usize::from(!v2_decomposition_check(rec, &sched).holds);
                let w = w_bound_check(rec, &sched);
                tally.w_proven_failures += usize::from(!w.proven.holds);
                tally.w_halved_failures += usize::from(!w.halved.holds);
            }
            for u in u_domination_checks(&sweep)? {
                tally.u_checks += 1;
                tally.u_failures += usize::from(!(u.v.holds && u.v2.holds));
            }
        }
        Ok(())
    })?;
    let martingale = match nested {
        Some(n) => Some(cfg.install(|| martingale_checks(&sched, n))?),
        None => None,
    };
    let hard = tally.v_decomposition_failures + tally.v2_decomposition_failures + tally.w_proven_failures + tally.u_failures;
    let nested_ok = martingale.as_ref().is_none_or(|m| m.passes());
    let report = BlocksReport {
        schedule: sched,
        bounds: tally,
        martingale,
    };
    emit(common, &cfg, "blocks", &report, &rows)?;
    Ok(check(hard == 0 && nested_ok, || {
        format!("{hard} deterministic bound failures; nested martingale checks pass: {nested_ok}")
    }))
}

#[derive(Serialize)]
struct ChaosRow {
    r: usize,
    estimate: f64,
    stderr: f64,
    bound_shape: f64,
    fitted_constant: f64,
}

fn chaos(common: &Common, q: f64, radius: f64, r_grid: &[usize], blocks: usize) -> Result<Outcome> {
    let cfg = config(common, None);
    let chaos_cfg = ChaosConfig {
        q,
        radius,
        trials: cfg.trials,
        blocks,
        master_seed: cfg.master_seed,
        input: cfg.input,
        ..ChaosConfig::default()
    };
    let rep: MomentFitReport = cfg.install(|| chaos_moment_estimate(r_grid, chaos_cfg))?;
    let rows: Vec<ChaosRow> = (0..rep.r_grid.len())
        .map(|i| ChaosRow {
            r: rep.r_grid[i],
            estimate: rep.estimates[i].mean,
            stderr: rep.estimates[i].stderr,
            bound_shape: rep.bound_shape[i],
            fitted_constant: rep.fitted_constants[i],
        })
        .collect();
    emit(common, &cfg, "chaos", &rep, &rows)?;
    Ok(Outcome::Ok)
}

#[derive(Serialize)]
struct TailRow {
    check: &'static str,
    threshold: f64,
    hits: u64,
    trials: u64,
    frequency: f64,
    lo: f64,
    hi: f64,
    bound: f64,
}

#[derive(Serialize)]
struct BoundSweep {
    a0_cases: usize,
    a0_failures: usize,
    a3_cases: usize,
    a3_failures: usize,
}

#[derive(Serialize)]
struct ConcentrationReport {
    hoeffding_symmetric: TailReport,
    hoeffding_a1: TailReport,
    doob_max: TailReport,
    doob_l2: DoobL2Report,
    second_moment_bounds: BoundSweep,
}

fn tail_rows(check: &'static str, rep: &TailReport, out: &mut Vec<TailRow>) {
    for i in 0..rep.epsilon_grid.len() {
        let p = rep.empirical[i];
        out.push(TailRow {
            check,
            threshold: rep.epsilon_grid[i],
            hits: p.hits,
            trials: p.trials,
            frequency: p.p,
            lo: p.lo,
            hi: p.hi,
            bound: rep.bound_values[i],
        });
    }
}

/// Every bound pair with `n <= 40`, `y0 <= 8`; failures are contract errors.
fn bound_sweep() -> Result<BoundSweep> {
    let mut s = BoundSweep {
        a0_cases: 0,
        a0_failures: 0,
        a3_cases: 0,
        a3_failures: 0,
    };
    for n in 0..=40 {
        for y0 in 1..=8 {
            s.a0_cases += 1;
            s.a0_failures += usize::from(matches!(a0_bound_evaluator(n, y0, None), Err(Error::Contract(_))));
            s.a3_cases += 1;
            s.a3_failures += usize::from(matches!(a3_bound_evaluator(n, y0), Err(Error::Contract(_))));
        }
    }
    Ok(s)
}

fn concentration(common: &Common, sched_args: &Sched) -> Result<Outcome> {
    let cfg = config(common, Some(sched_args));
    let sched = build_schedule(cfg.schedule)?;
    let (_, n_hi) = sched.n_range()?;
    let y0 = sched.y_usize(0)?;
    let trials = cfg.trials;
    let seed = cfg.master_seed;
    let report = cfg.install(|| {
        let sym = hoeffding_check(&SymmetricSteps { steps: 100 }, 100.0, &[10.0, 20.0, 40.0, 60.0], trials, seed)?;
        let a1 = A1Increments {
            n: n_hi.min(8),
            y0,
            radius: 3.0,
        };
        let hoeffding_a1 = hoeffding_check(&a1, 4.0, &[0.5, 1.0, 2.0, 4.0, 6.0], trials, seed.wrapping_add(1))?;
        let seq = IjSequence::new(sched.clone(), cfg.input, 1024)?;
        let e0 = seq.expected_start();
        let lambdas: Vec<f64> = [1.0, 2.0, 4.0, 8.0, 16.0].iter().map(|m| m * e0).collect();
        let doob_max = doob_max_check(&seq, &lambdas, trials, seed.wrapping_add(2))?;
        let doob_l2 = doob_l2_check(DoobL2Config {
            lo: 2,
            hi: 4,
            r: 5,
            trials,
            master_seed: seed.wrapping_add(3),
            input: cfg.input,
        })?;
        Ok(ConcentrationReport {
            hoeffding_symmetric: sym,
            hoeffding_a1,
            doob_max,
            doob_l2,
            second_moment_bounds: bound_sweep()?,
        })
    })?;
    let mut rows = Vec::new();
    tail_rows("hoeffding_symmetric", &report.hoeffding_symmetric, &mut rows);
    tail_rows("hoeffding_a1", &report.hoeffding_a1, &mut rows);
    tail_rows("doob_max", &report.doob_max, &mut rows);
    emit(common, &cfg, "concentration", &report, &rows)?;
    let violations = report.hoeffding_symmetric.violations
        + report.hoeffding_a1.violations
        + report.doob_max.violations
        + usize::from(!report.doob_l2.holds)
        + report.second_moment_bounds.a0_failures
        + report.second_moment_bounds.a3_failures;
    Ok(check(violations == 0, || format!("{violations} bound violations")))
}

#[derive(Serialize)]
struct EventCsvRow<'a> {
    event: &'a str,
    hits: u64,
    trials: u64,
    frequency: f64,
    lo: f64,
    hi: f64,
}

fn events(common: &Common, sched: &Sched) -> Result<Outcome> {
    let cfg = config(common, Some(sched));
    let table = event_frequencies(&cfg)?;
    let rows: Vec<EventCsvRow> = table
        .rows
        .iter()
        .map(|r| EventCsvRow {
            event: &r.event,
            hits: r.frequency.hits,
            trials: r.frequency.trials,
            frequency: r.frequency.p,
            lo: r.frequency.lo,
            hi: r.frequency.hi,
        })
        .collect();
    emit(common, &cfg, "events", &table, &rows)?;
    let u = table.union_violations;
    Ok(check(u.total() == 0, || format!("per-trial inclusion failures: {u:?}")))
}

#[derive(Serialize)]
struct GrowthRow {
    trial: usize,
    g: f64,
}

fn growth(common: &Common, sched: &Sched, n0: usize) -> Result<Outcome> {
    let mut cfg = config(common, Some(sched));
    cfg.growth_n0 = n0;
    let rep = growth_report(&cfg)?;
    let rows: Vec<GrowthRow> = rep.values.iter().enumerate().map(|(trial, &g)| GrowthRow { trial, g }).collect();
    emit(common, &cfg, "growth", &rep, &rows)?;
    eprintln!("note: {}", rep.caveat);
    Ok(Outcome::Ok)
}

fn run(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Simulate { common } => simulate(&common),
        Command::OracleCheck { common, oracle_n } => oracle(&common, oracle_n),
        Command::Moments { common } => moments(&common),
        Command::Decompose { common, sched } => decompose(&common, &sched),
        Command::Blocks {
            common,
            sched,
            nested,
            outer,
            inner,
            points,
        } => {
            let n = nested.then_some(NestedConfig {
                master_seed: common.seed,
                outer,
                inner,
                points,
            });
            blocks(&common, &sched, n)
        }
        Command::Chaos {
            common,
            q,
            radius,
            r_grid,
            blocks,
        } => chaos(&common, q, radius, &r_grid, blocks),
        Command::Concentration { common, sched } => concentration(&common, &sched),
        Command::Events { common, sched } => events(&common, &sched),
        Command::Growth { common, sched, n0 } => growth(&common, &sched, n0),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Violation(msg)) => {
            eprintln!("invariant violation: {msg}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
