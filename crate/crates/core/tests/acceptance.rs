//! Acceptance criteria, one test each. Every test prints a single
//! `criterion N: PASS|FAIL ...` line to stdout (uncaptured) before asserting.

use std::io::Write;
use std::time::Instant;

use levy_invariance::cli::{run_experiment, ExperimentConfig, ExperimentKind};
use levy_invariance::conditions::{
    check_condition_a, check_condition_b, check_condition_c, log_spaced, Divergence, Function, ScheduleA, TimeChangeB,
    WeightC,
};
use levy_invariance::model::{JumpLaw, LevyModel};
use levy_invariance::theorems::{
    audit_moment_bound, run_asclt, run_cf_check, run_fclt_test, run_integral_asclt, run_wiener_oracle, AscltParams,
    CfParams, FcltParams, IntegralParams, MomentAuditParams, TheoremReport,
};

const SEED: u64 = 20_240_601;

fn verdict(criterion: u32, passed: bool, detail: &str) {
    let word = if passed { "PASS" } else { "FAIL" };
    let mut out = std::io::stdout().lock();
    writeln!(out, "criterion {criterion}: {word} - {detail}").unwrap();
    out.flush().unwrap();
}

fn stat(report: &TheoremReport, name: &str) -> f64 {
    report
        .check(name)
        .unwrap_or_else(|| panic!("missing check {name}"))
        .statistic
}

fn all_passed(report: &TheoremReport, prefix: &str) -> bool {
    let mut matching = report.checks.iter().filter(|c| c.name.starts_with(prefix)).peekable();
    matching.peek().is_some() && matching.all(|c| c.passed)
}

fn max_stat(report: &TheoremReport, prefix: &str) -> f64 {
    report
        .checks
        .iter()
        .filter(|c| c.name.starts_with(prefix))
        .map(|c| c.statistic)
        .fold(f64::NEG_INFINITY, f64::max)
}

#[test]
fn criterion_01_unit_jump_fclt() {
    let started = Instant::now();
    let report = run_fclt_test(&LevyModel::centered_poisson(), &FcltParams::default(), SEED).unwrap();
    let secs = started.elapsed().as_secs_f64();
    let endpoint = stat(&report, "ks_marginal[1]");
    let structure = ["ks_increment", "covariance", "second_moment"]
        .iter()
        .all(|p| all_passed(&report, p));
    let passed = endpoint < 0.05 && structure && secs < 60.0;
    verdict(
        1,
        passed,
        &format!(
            "endpoint KS {endpoint:.4} (< 0.05); max increment KS {:.4}; max covariance dev {:.2} SE, max second-moment dev {:.2} SE (<= 5); {secs:.1}s (< 60s)",
            max_stat(&report, "ks_increment"),
            max_stat(&report, "covariance"),
            max_stat(&report, "second_moment"),
        ),
    );
    assert!(passed, "{}", report.to_csv());
}

#[test]
fn criterion_02_gaussian_jump_fclt() {
    let model = LevyModel::random_sums(JumpLaw::Gaussian { mean: 1.0, sd: 1.0 }).unwrap();
    let report = run_fclt_test(&model, &FcltParams::default(), SEED).unwrap();
    let endpoint = stat(&report, "ks_marginal[1]");
    let sigma_ok = (model.sigma_v_squared() - 2.0).abs() < 1e-12;
    let passed = endpoint < 0.05 && sigma_ok;
    verdict(
        2,
        passed,
        &format!(
            "endpoint KS vs N(0, sqrt 2) {endpoint:.4} (< 0.05); target variance {}",
            model.sigma_v_squared()
        ),
    );
    assert!(passed);
}

#[test]
fn criterion_03_supremum_law() {
    let report = run_fclt_test(&LevyModel::centered_poisson(), &FcltParams::default(), SEED + 3).unwrap();
    let ks = stat(&report, "ks_supremum");
    let passed = ks < 0.06;
    verdict(
        3,
        passed,
        &format!("exact-sup KS vs 2Phi(a)-1 {ks:.4} (< 0.06), t = 1e4, N = 2000"),
    );
    assert!(passed);
}

#[test]
fn criterion_04_logarithmic_asclt() {
    let started = Instant::now();
    let params = AscltParams::default();
    let report = run_asclt(
        &LevyModel::centered_poisson(),
        &levy_invariance::conditions::ScheduleSpec::default(),
        &params,
        SEED,
    )
    .unwrap();
    let secs = started.elapsed().as_secs_f64();
    let trace = report.trace("log_average_ks").unwrap();
    assert_eq!(trace.checkpoints, vec![1e2, 1e3, 1e4]);
    let medians = &trace.median;
    let monotone = medians.windows(2).all(|w| w[1] < w[0]);
    let last = *medians.last().unwrap();
    let passed = last < 0.2 && monotone && secs < 300.0;
    verdict(
        4,
        passed,
        &format!(
            "panel-20 median KS at n = 1e2, 1e3, 1e4: {:.4}, {:.4}, {:.4}; final < 0.2: {}; decreasing: {monotone}; {secs:.1}s (< 300s)",
            medians[0],
            medians[1],
            medians[2],
            last < 0.2
        ),
    );
    assert!(passed);
}

#[test]
fn criterion_05_integral_asclt() {
    let params = IntegralParams::default();
    let report = run_integral_asclt(
        &LevyModel::centered_poisson(),
        &TimeChangeB::default(),
        &WeightC::InverseLinear { c: 2.0 },
        &params,
        SEED,
    )
    .unwrap();
    let trace = report.trace("integral_average_ks").unwrap();
    assert_eq!(trace.checkpoints, vec![1e2, 1e3, 1e4]);
    let (first, last) = (trace.median[0], *trace.median.last().unwrap());
    let passed = last < 0.25 && last < first;
    verdict(
        5,
        passed,
        &format!(
            "panel-20 median KS at S = 1e2: {first:.4}, S = 1e4: {last:.4}; final < 0.25: {}; decreased: {}",
            last < 0.25,
            last < first
        ),
    );
    assert!(passed);
}

#[test]
fn criterion_06_moment_bound() {
    let params = MomentAuditParams {
        records: 500,
        ..MomentAuditParams::default()
    };
    assert_eq!(params.pairs, vec![(1, 10), (2, 20), (5, 50)]);
    let report = audit_moment_bound(
        &LevyModel::centered_poisson(),
        &levy_invariance::conditions::ScheduleSpec::default(),
        &params,
        SEED,
    )
    .unwrap();
    let passed = all_passed(&report, "moment_bound") && report.passed;
    let detail: Vec<String> = report
        .checks
        .iter()
        .filter(|c| c.name.starts_with("moment_bound"))
        .map(|c| format!("{} {:.4} <= {:.4}", c.name, c.statistic, c.threshold))
        .collect();
    verdict(6, passed, &detail.join("; "));
    assert!(passed);
}

#[test]
fn criterion_07_characteristic_function() {
    let laws = [
        JumpLaw::Degenerate { value: 1.0 },
        JumpLaw::Gaussian { mean: 1.0, sd: 1.0 },
        JumpLaw::Exponential { rate: 1.0 },
        JumpLaw::Uniform { lo: -1.0, hi: 2.0 },
    ];
    let params = CfParams::default();
    assert_eq!(params.records, 10_000);
    assert_eq!(params.u_grid.len(), 13);
    let mut passed = true;
    let mut detail = Vec::new();
    for law in laws {
        let model = LevyModel::random_sums(law).unwrap();
        let report = run_cf_check(&model, &params, SEED).unwrap();
        passed &= report.passed;
        detail.push(format!("{law:?}: max dev {:.4}", max_stat(&report, "cf_deviation")));
    }
    let threshold = 3.0 / 100.0 + 0.01;
    verdict(7, passed, &format!("{} (<= {threshold})", detail.join("; ")));
    assert!(passed);
}

#[test]
fn criterion_08_condition_validators() {
    let half = check_condition_c(&WeightC::InverseLinear { c: 2.0 }, 10_000).unwrap();
    let half_ok =
        half.passed && half.margins.iter().all(|m| m.abs() <= 1e-9) && half.divergence == Some(Divergence::Diverges);
    let full = check_condition_c(&WeightC::InverseLinear { c: 1.0 }, 10_000).unwrap();
    let full_ok = !full.passed && full.first_violation == Some(1.0);
    let a = check_condition_a(&ScheduleA::canonical(10_000)).unwrap();
    let sqrt = TimeChangeB {
        f: Function::Power { c: 1.0, p: 0.5 },
        beta: 1.0,
    };
    let b = check_condition_b(&sqrt, &log_spaced(1.0, 1e4, 1001)).unwrap();
    let passed = half_ok && full_ok && a.passed && !b.passed;
    verdict(
        8,
        passed,
        &format!(
            "d = 1/(2s) passes (C) with max |margin| {:.2e}: {half_ok}; d = 1/s fails at k = {:?}: {full_ok}; s_k = k passes (A): {}; f = sqrt fails (B): {}",
            half.margins.iter().map(|m| m.abs()).fold(0.0, f64::max),
            full.first_violation,
            a.passed,
            !b.passed
        ),
    );
    assert!(passed);
}

#[test]
fn criterion_09_thread_independence() {
    let mut identical = Vec::new();
    for kind in [
        ExperimentKind::Fclt,
        ExperimentKind::Asclt,
        ExperimentKind::IntegralAsclt,
        ExperimentKind::MomentAudit,
        ExperimentKind::CfCheck,
    ] {
        let mut config = ExperimentConfig::with_defaults(kind);
        config.seeds.master = SEED;
        let run = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
            pool.install(|| run_experiment(&config))
                .unwrap()
                .without_timing()
                .to_json()
        };
        let reference = run(1);
        identical.push((kind, [2, 4, 7].iter().all(|&t| run(t) == reference)));
    }
    let passed = identical.iter().all(|(_, same)| *same);
    verdict(
        9,
        passed,
        &format!("reports identical on 1, 2, 4, 7 threads: {identical:?}"),
    );
    assert!(passed);
}

#[test]
fn criterion_10_wiener_oracle() {
    let params = FcltParams {
        records: 5000,
        ..FcltParams::default()
    };
    let report = run_wiener_oracle(1.0, &params, SEED).unwrap();
    let endpoint = report.check("ks_marginal[1]").unwrap();
    let passed = endpoint.passed && all_passed(&report, "covariance") && all_passed(&report, "ks_marginal");
    verdict(
        10,
        passed,
        &format!(
            "N = 5000 Wiener paths: endpoint KS {:.4} (< 0.05); max covariance dev {:.2} SE (<= 5); all checks pass: {}",
            endpoint.statistic,
            max_stat(&report, "covariance"),
            report.passed
        ),
    );
    assert!(passed);
}
