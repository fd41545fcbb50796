//! Acceptance suite: one PASS/FAIL line per criterion, then a non-zero exit
//! if any criterion failed. Every criterion runs even when an earlier one
//! fails.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rmc_core::blocks::{b_factor, build_schedule, martingale_checks, NestedConfig, ScheduleParams};
use rmc_core::concentration::{
    a3_bound_evaluator, chaos_first_moment, chaos_moment_estimate, doob_l2_check, doob_max_check,
    hoeffding_check, A1Increments, ChaosConfig, DoobL2Config, IjSequence, SupermartingaleSequence,
    SymmetricSteps,
};
use rmc_core::gaussian::{cauchy_coefficients_adaptive, exp_series_fast, exp_series_naive, GaussianSequence, InputModel};
use rmc_core::harness::{decompose_check, run_simulation, CampaignConfig};
use rmc_core::partition::{
    a_oracle, a_second_moment, enumerate_partitions, restricted_second_moment, PartitionConstraint,
};
use rmc_core::rng::SeedPath;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn run(name: &str, limit: Duration, f: impl FnOnce() -> Verdict) -> bool {
    let start = Instant::now();
    let v = f();
    let elapsed = start.elapsed();
    let in_time = elapsed <= limit;
    let pass = v.pass && in_time;
    println!(
        "{} {name}: {} [{:.1}s of {}s]",
        if pass { "PASS" } else { "FAIL" },
        v.detail,
        elapsed.as_secs_f64(),
        limit.as_secs()
    );
    pass
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

fn gaussian(len: usize, seed: u64, trial: u64) -> GaussianSequence {
    GaussianSequence::sample(len, SeedPath::new(seed, trial)).unwrap()
}

fn oracle_equivalence() -> Verdict {
    let mut worst = 0.0f64;
    for t in 0..100 {
        let x = gaussian(12, 11, t);
        let a = exp_series_naive(&x.exponent(12).unwrap(), 12);
        for n in 0..=12u32 {
            let want = a_oracle(n, &x).unwrap();
            worst = worst.max((a.coeffs[n as usize] - want).norm() / want.norm());
        }
    }
    verdict(worst <= 1e-9, format!("max relative error {worst:.2e} (tol 1e-9)"))
}

fn fast_path() -> Verdict {
    let mut worst = 0.0f64;
    for seed in 0..10 {
        let e = gaussian(4096, seed, 0).exponent(4096).unwrap();
        let naive = exp_series_naive(&e, 4096);
        let fast = exp_series_fast(&e, 4096);
        worst = worst.max(fast.max_abs_diff(&naive) / naive.max_abs());
    }
    let e = gaussian(65536, 99, 0).exponent(65536).unwrap();
    let t0 = Instant::now();
    let fast = exp_series_fast(&e, 65536);
    let t_fast = t0.elapsed().as_secs_f64();
    let t0 = Instant::now();
    let naive = exp_series_naive(&e, 65536);
    let t_naive = t0.elapsed().as_secs_f64();
    let big = fast.max_abs_diff(&naive) / naive.max_abs();
    let speedup = t_naive / t_fast;
    verdict(
        worst <= 1e-8 && speedup >= 5.0,
        format!("N=4096 normalized error {worst:.2e} (tol 1e-8); N=65536 speedup {speedup:.1}x (need 5x), error {big:.2e}"),
    )
}

fn cauchy_recovery() -> Verdict {
    let mut worst = 0.0f64;
    let mut points = 0;
    for t in 0..5 {
        let x = gaussian(1024, 21, t);
        let want = exp_series_naive(&x.exponent(1024).unwrap(), 512);
        let got = cauchy_coefficients_adaptive(&x, 1024, 1.0, 512, 1e-9).unwrap();
        points = points.max(got.points);
        for n in 0..=512 {
            worst = worst.max((got.coeffs[n] - want.coeffs[n]).norm());
        }
    }
    verdict(worst <= 1e-6, format!("R=1024, n<=512: max error {worst:.2e} (tol 1e-6), M up to {points}"))
}

fn second_moment_identity() -> Verdict {
    let mut worst = 0.0f64;
    for n in 0..=40 {
        // Σ_{|λ|=n} Π_k 1/(k^{m_k} m_k!) over the full enumeration.
        let s: f64 = enumerate_partitions(n, PartitionConstraint::none())
            .unwrap()
            .map(|p| a_second_moment(&p))
            .sum();
        worst = worst.max((s - 1.0).abs());
    }
    verdict(worst <= 1e-12, format!("max |Σ - 1| over n<=40: {worst:.2e} (tol 1e-12)"))
}

fn decomposition() -> Verdict {
    let cfg = CampaignConfig {
        trials: 100,
        master_seed: 31,
        ..CampaignConfig::default()
    };
    let r = decompose_check(&cfg).unwrap();
    verdict(
        r.passed && (r.n_lo, r.n_hi) == (3, 16),
        format!(
            "n in ({}, {}]: enumeration split {:.2e}, sweep split {:.2e} (tol 1e-12)",
            r.n_lo - 1,
            r.n_hi,
            r.enumeration_identity,
            r.sweep_identity
        ),
    )
}

fn mc_second_moment() -> Verdict {
    let cfg = CampaignConfig {
        n_max: 512,
        n_grid: vec![8, 64, 512],
        trials: 100_000,
        master_seed: 41,
        ..CampaignConfig::default()
    };
    let data = run_simulation(&cfg, |_| Ok(())).unwrap();
    let mut ok = true;
    let mut parts = Vec::new();
    for r in &data.aggregates {
        let z = (r.mean_sq - 1.0) / r.stderr;
        ok &= z.abs() <= 5.0 && r.mean_abs <= 1.0;
        parts.push(format!("n={} mean {:.4} (z {:+.2})", r.n, r.mean_sq, z));
    }
    verdict(ok, parts.join(", "))
}

fn second_moment_bounds() -> Verdict {
    let mut violations = 0;
    let mut cases = 0;
    for n in 0..=40u32 {
        for y0 in 1..=8u32 {
            let exact = restricted_second_moment(n, PartitionConstraint::max_part(y0)).unwrap();
            let r = (1.0 / y0 as f64).exp();
            let bound = r.powi(-(n as i32)) * (1..=y0).map(|k| r.powi(k as i32) / k as f64).sum::<f64>().exp();
            cases += 1;
            violations += usize::from(exact > bound);
        }
    }
    let a3 = a3_bound_evaluator(9, 2).unwrap();
    let a3_ok = (a3.exact - 1.0 / 162.0).abs() <= 1e-15 && a3.exact <= 1.0 / 27.0;
    verdict(
        violations == 0 && a3_ok,
        format!("{violations} violations in {cases} small-part cases; E|A3(9)|² = {:.6} (1/162 = {:.6})", a3.exact, 1.0 / 162.0),
    )
}

fn martingales() -> Verdict {
    let sched = build_schedule(ScheduleParams::desk()).unwrap();
    let m = martingale_checks(
        &sched,
        NestedConfig {
            master_seed: 51,
            outer: 200,
            inner: 2000,
            points: 1024,
        },
    )
    .unwrap();
    let worst_pooled = m.supermartingale.iter().map(|b| b.pooled_z.abs()).fold(0.0, f64::max);
    verdict(
        m.passes(),
        format!(
            "increments max |z| {:.2} over {} ({} beyond 5); supermartingale max pooled |z| {:.2} over {} blocks; submartingale min z {:.2} over {} ({} beyond -4)",
            m.increment_max_abs_z,
            m.increment_checks,
            m.increment_exceed,
            worst_pooled,
            m.supermartingale.len(),
            m.submartingale_min_z,
            m.submartingale_checks,
            m.submartingale_exceed
        ),
    )
}

fn b_factors() -> Verdict {
    let desk = build_schedule(ScheduleParams::desk()).unwrap();
    let b1 = b_factor(&desk, 1).unwrap().value;
    let closed = (-5.0f64 / 8.0).exp();
    let large = build_schedule(ScheduleParams::new(10, 2.0)).unwrap();
    let worst = (1..=large.j_max)
        .map(|j| b_factor(&large, j).unwrap().value)
        .fold(0.0, f64::max);
    verdict(
        (b1 - closed).abs() <= 1e-12 && worst <= 1.0,
        format!(
            "b_1 at (2,2) = {b1:.15} (e^(-5/8) = {closed:.15}); max b_j at (10,2) over {} blocks = {worst:.6}",
            large.j_max
        ),
    )
}

fn chaos() -> Verdict {
    let q1 = chaos_moment_estimate(
        &[16, 64, 256],
        ChaosConfig {
            trials: 100_000,
            master_seed: 61,
            ..ChaosConfig::default()
        },
    )
    .unwrap();
    let mut ok = true;
    let mut parts = Vec::new();
    for (i, &r) in q1.r_grid.iter().enumerate() {
        let rel = q1.estimates[i].mean / chaos_first_moment(r) - 1.0;
        ok &= rel.abs() <= 0.05;
        parts.push(format!("R={r} rel {rel:+.3}"));
    }
    let q34 = chaos_moment_estimate(
        &[64, 256, 1024, 4096],
        ChaosConfig {
            q: 0.75,
            trials: 20_000,
            master_seed: 62,
            ..ChaosConfig::default()
        },
    )
    .unwrap();
    let spread = q34.constant_spread();
    ok &= spread <= 2.0;
    let consts: Vec<String> = q34.fitted_constants.iter().map(|c| format!("{c:.3}")).collect();
    verdict(
        ok,
        format!("q=1: {}; q=3/4 constants [{}] spread {spread:.2} (max 2)", parts.join(", "), consts.join(", ")),
    )
}

fn concentration() -> Verdict {
    let trials = 10_000;
    let sym = hoeffding_check(&SymmetricSteps { steps: 100 }, 100.0, &[10.0, 20.0, 40.0, 60.0], trials, 71).unwrap();
    let a1 = hoeffding_check(
        &A1Increments {
            n: 8,
            y0: 1,
            radius: 3.0,
        },
        4.0,
        &[0.5, 1.0, 2.0, 4.0, 6.0],
        trials,
        72,
    )
    .unwrap();
    let sched = build_schedule(ScheduleParams::desk()).unwrap();
    let seq = IjSequence::new(sched, InputModel::Gaussian, 1024).unwrap();
    let e0 = seq.expected_start();
    let lambdas: Vec<f64> = [1.0, 2.0, 4.0, 8.0].iter().map(|m| m * e0).collect();
    let dmax = doob_max_check(&seq, &lambdas, trials, 73).unwrap();
    // The λ = 4 E[I_0] row must also sit below 1/4 within 3 stderr.
    let at4 = dmax.empirical[2];
    let at4_ok = at4.p <= 0.25 + 3.0 * at4.stderr();
    let l2 = doob_l2_check(DoobL2Config {
        lo: 2,
        hi: 4,
        r: 5,
        trials,
        master_seed: 74,
        input: InputModel::Gaussian,
    })
    .unwrap();
    let violations = sym.violations + a1.violations + dmax.violations;
    verdict(
        violations == 0 && at4_ok && l2.holds,
        format!(
            "tail violations: symmetric {}, A1 {}, maximal {}; P[max I > 4E I0] = {:.4}; L2 max {:.4} vs bound {:.4}",
            sym.violations, a1.violations, dmax.violations, at4.p, l2.max_sq.mean, l2.bound
        ),
    )
}

fn cli(args: &[&str], out: &Path, threads: &str) -> bool {
    Command::new(env!("CARGO_BIN_EXE_rmc"))
        .args(args)
        .args(["--threads", threads, "--out"])
        .arg(out)
        .stderr(std::process::Stdio::null())
        .status()
        .map(|s| s.success())
        .unwrap_or(false)
}

fn same_files(a: &Path, b: &Path) -> std::io::Result<bool> {
    let mut names: Vec<_> = std::fs::read_dir(a)?.map(|e| e.map(|e| e.file_name())).collect::<Result<_, _>>()?;
    names.sort();
    if names.is_empty() {
        return Ok(false);
    }
    for n in names {
        if std::fs::read(a.join(&n))? != std::fs::read(b.join(&n))? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn determinism() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let runs: [&[&str]; 3] = [
        &["simulate", "--trials", "2000", "--n-max", "512", "--seed", "7"],
        &["events", "--trials", "200", "--seed", "7", "--format", "json"],
        &["growth", "--trials", "200", "--n-max", "256", "--seed", "7"],
    ];
    let mut ok = true;
    for args in runs {
        ok &= cli(args, &a, "1") && cli(args, &b, "4");
    }
    let same = ok && same_files(&a, &b).unwrap_or(false);
    let files = std::fs::read_dir(&a).map(|d| d.count()).unwrap_or(0);
    verdict(same, format!("{files} output files compared across --threads 1 and 4: identical = {same}"))
}

fn main() {
    let results = [
        run("oracle equivalence", secs(10), oracle_equivalence),
        run("fast path", secs(60), fast_path),
        run("cauchy recovery", secs(30), cauchy_recovery),
        run("exact second-moment identity", secs(300), second_moment_identity),
        run("decomposition", secs(60), decomposition),
        run("monte carlo second moment", secs(600), mc_second_moment),
        run("second-moment bounds", secs(60), second_moment_bounds),
        run("martingale checks", secs(900), martingales),
        run("b factor", secs(5), b_factors),
        run("chaos moment", secs(1800), chaos),
        run("concentration", secs(600), concentration),
        run("determinism", secs(300), determinism),
    ];
    let failed = results.iter().filter(|&&p| !p).count();
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
