//! Acceptance suite: one test per release criterion, each printing a
//! `criterion N: PASS/FAIL` line (visible with `--nocapture`) and
//! enforcing its runtime budget.
//!
//! Run with:
//!
//! ```text
//! cargo test --test acceptance -- --nocapture
//! ```

use std::process::{Command, Output};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;

use evocost::cost_model::{
    blind_search_median_trials, evol_cost_closed_form, evol_cost_from_lcost, evol_cost_sum,
    kappa_estimate, lcost_linear, slowdown_ratio, CostParams, CostValue, ScenarioParams,
};
use evocost::efficient::{empirical_slowdown, run_efficient};
use evocost::evolution::{
    blind_search_run, median_of_sorted, run_single, run_trials, AccountingMode,
};
use evocost::landscape::{BlockStaircaseLandscape, NeedleLandscape};
use evocost::rational::parse_rational;
use evocost::seed::{landscape_seed, trial_seed};

fn rat(text: &str) -> BigRational {
    parse_rational(text).unwrap()
}

fn report(criterion: u32, ok: bool, detail: &str) {
    println!(
        "criterion {criterion}: {} - {detail}",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok, "criterion {criterion} failed: {detail}");
}

fn check_budget(criterion: u32, start: Instant, budget: Duration) {
    let elapsed = start.elapsed();
    assert!(
        elapsed <= budget,
        "criterion {criterion} exceeded its runtime budget: {elapsed:?} > {budget:?}"
    );
}

fn run_binary(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_evocost"))
        .args(args)
        .env_remove("EVOCOST_SEED")
        .output()
        .expect("binary runs")
}

/// Deterministic sampler for (C, R, kappa) with R | C and C <= 10^4.
fn sample_configurations(count: usize) -> Vec<(u64, u64, BigRational)> {
    use rand::Rng;
    let mut rng = evocost::seed::rng_from_seed(0xACCE_1234);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let c: u64 = rng.random_range(1..=10_000);
        let mut divisors = Vec::new();
        let mut d = 1;
        while d * d <= c {
            if c.is_multiple_of(d) {
                divisors.push(d);
                divisors.push(c / d);
            }
            d += 1;
        }
        let r = divisors[rng.random_range(0..divisors.len())];
        let kappa = BigRational::new(
            BigInt::from(rng.random_range(1..=1000u64)),
            BigInt::from(rng.random_range(1..=1000u64)),
        );
        out.push((c, r, kappa));
    }
    out
}

/// Criterion 1: the reference example reproduces the headline numbers
/// within 1.5%, in under a second.
#[test]
fn criterion_1_reference_example() {
    let start = Instant::now();
    let output = run_binary(&["--format", "json", "paper-example"]);
    let runtime = start.elapsed();
    assert!(output.status.success());

    let report_json: serde_json::Value = serde_json::from_slice(&output.stdout).unwrap();
    let rounded = &report_json["variants"][0];
    assert_eq!(rounded["label"], "rounded-kappa");
    let evol_cost = rat(rounded["evol_cost"]["magnitude"].as_str().unwrap());
    let elapsed = rat(rounded["elapsed"]["magnitude"].as_str().unwrap());

    // Exact values of 1/2 * 2^30 * 0.6e-7 * (4e8)^2 / 30 and its /1e9.
    assert_eq!(evol_cost, rat("171798691840000000"));
    assert_eq!(elapsed, rat("4294967296/25"));

    let evol_delta = (&evol_cost - rat("1.7e17")).abs() / rat("1.7e17");
    let elapsed_delta = (&elapsed - rat("1.7e8")).abs() / rat("1.7e8");
    let ok = evol_delta <= rat("0.015")
        && elapsed_delta <= rat("0.015")
        && runtime < Duration::from_secs(1);
    report(
        1,
        ok,
        &format!(
            "evol_cost 1.7180e17 within {:.4}% and elapsed within {:.4}% of the references, \
             runtime {runtime:?}",
            evocost::rational::to_f64(&evol_delta) * 100.0,
            evocost::rational::to_f64(&elapsed_delta) * 100.0
        ),
    );
}

/// Criterion 2: kappa calibration is exact.
#[test]
fn criterion_2_kappa_calibration() {
    let start = Instant::now();
    let lcost = CostValue::new(rat("25"), "year").unwrap();
    let params = kappa_estimate(&lcost, 400_000_000).unwrap();
    let ok = params.kappa() == &rat("6.25e-8") && params.kappa() == &rat("1/16000000");
    check_budget(2, start, Duration::from_secs(1));
    report(
        2,
        ok,
        &format!(
            "kappa_estimate(25 year, 4e8 bits) = {} year/bit exactly",
            params.kappa()
        ),
    );
}

/// Criterion 3: summation equals closed form exactly over 10^4 samples.
#[test]
fn criterion_3_summation_identity() {
    let start = Instant::now();
    let samples = sample_configurations(10_000);
    let mut failures = 0usize;
    for (c, r, kappa) in &samples {
        let scenario = ScenarioParams::new(*c, *r).unwrap();
        let params = CostParams::new(kappa.clone(), "year").unwrap();
        if evol_cost_sum(&scenario, &params).unwrap()
            != evol_cost_closed_form(&scenario, &params).unwrap()
        {
            failures += 1;
        }
    }
    check_budget(3, start, Duration::from_secs(10));
    report(
        3,
        failures == 0,
        &format!("{} samples, {failures} mismatches", samples.len()),
    );
}

/// Criterion 4: deriving the total from lcost matches the closed form
/// exactly over the same sample.
#[test]
fn criterion_4_lcost_consistency() {
    let start = Instant::now();
    let samples = sample_configurations(10_000);
    let mut failures = 0usize;
    for (c, r, kappa) in &samples {
        let scenario = ScenarioParams::new(*c, *r).unwrap();
        let params = CostParams::new(kappa.clone(), "year").unwrap();
        let lcost = lcost_linear(*c, &params).unwrap();
        if evol_cost_from_lcost(&scenario, &lcost).unwrap()
            != evol_cost_closed_form(&scenario, &params).unwrap()
        {
            failures += 1;
        }
    }
    check_budget(4, start, Duration::from_secs(10));
    report(
        4,
        failures == 0,
        &format!("{} samples, {failures} mismatches", samples.len()),
    );
}

/// Criterion 5: simulated medians converge to closed form + kappa*C/2.
#[test]
fn criterion_5_simulation_convergence() {
    let start = Instant::now();
    let params = CostParams::new(rat("1"), "year").unwrap();
    let master_seed = 7u64;

    let median_for = |c: u64, r: u64| -> BigRational {
        let landscape =
            BlockStaircaseLandscape::generate(c, r, landscape_seed(master_seed)).unwrap();
        run_trials(
            &landscape,
            &params,
            AccountingMode::Exhaustive,
            1001,
            master_seed,
        )
        .unwrap()
        .median
        .magnitude()
        .clone()
    };

    let m32 = median_for(32, 4);
    let ok32 = m32 >= rat("2032") && m32 <= rat("2096");

    let m4 = median_for(4, 2);
    let ok4 = m4 >= rat("16") && m4 <= rat("20");

    // Closed form for (24, 3) is 1/2 * 2^3 * 24^2 / 3 = 768; the target
    // median is 768 + kappa*C/2 = 780 within +/- kappa*C = 24.
    let m24 = median_for(24, 3);
    let predicted = rat("780");
    let ok24 = (&m24 - &predicted).abs() <= rat("24");

    check_budget(5, start, Duration::from_secs(10));
    report(
        5,
        ok32 && ok4 && ok24,
        &format!("medians: (32,4)={m32} in [2032,2096]; (4,2)={m4} in [16,20]; (24,3)={m24} within 780+/-24"),
    );
}

/// Criterion 6: measured slowdown tracks the analytic ratio and the
/// efficient learner is exact in every run.
#[test]
fn criterion_6_slowdown_ratio() {
    let start = Instant::now();
    let params = CostParams::new(rat("1"), "year").unwrap();
    let master_seed = 7u64;
    let landscape = BlockStaircaseLandscape::generate(32, 4, landscape_seed(master_seed)).unwrap();
    let summary = run_trials(
        &landscape,
        &params,
        AccountingMode::Exhaustive,
        1001,
        master_seed,
    )
    .unwrap();

    let efficient = run_efficient(&landscape, &params);
    let measured = empirical_slowdown(&summary, &efficient).unwrap();
    let analytic = slowdown_ratio(&ScenarioParams::new(32, 4).unwrap());
    assert_eq!(analytic, rat("64"));
    let relative = (&measured - &analytic).abs() / &analytic;
    let ratio_ok = relative <= rat("1/16");

    // The learner must land exactly on the target at cost 32, every run.
    let mut exact_runs = 0u32;
    for seed in 0..100u64 {
        let landscape = BlockStaircaseLandscape::generate(32, 4, seed).unwrap();
        let result = run_efficient(&landscape, &params);
        if &result.learned_code == landscape.target()
            && result.total_cost.magnitude() == &rat("32")
            && result.probes == 32
        {
            exact_runs += 1;
        }
    }

    check_budget(6, start, Duration::from_secs(10));
    report(
        6,
        ratio_ok && exact_runs == 100,
        &format!(
            "empirical slowdown {measured} vs analytic 64 (relative {relative}); \
             efficient learner exact in {exact_runs}/100 runs"
        ),
    );
}

/// Criterion 7: blind-search median matches the analytic value at C=3,
/// and C=20 with a 1000-guess cap exceeds it almost always.
#[test]
fn criterion_7_blind_search_baseline() {
    let start = Instant::now();
    let master_seed = 1u64;

    assert_eq!(blind_search_median_trials(3).unwrap(), rat("9/2"));
    let needle3 = NeedleLandscape::generate(3, landscape_seed(master_seed)).unwrap();
    let mut guesses: Vec<BigRational> = (0..10_000u64)
        .map(|run| {
            let outcome = blind_search_run(&needle3, trial_seed(master_seed, run), None).unwrap();
            BigRational::from_integer(BigInt::from(outcome.guesses().unwrap()))
        })
        .collect();
    guesses.sort();
    let median3 = median_of_sorted(&guesses);
    let median_ok = median3 >= rat("4") && median3 <= rat("5");

    let needle20 = NeedleLandscape::generate(20, landscape_seed(master_seed)).unwrap();
    let exceeded = (0..1000u64)
        .filter(|run| {
            blind_search_run(&needle20, trial_seed(master_seed, *run), Some(1000))
                .unwrap()
                .is_cap_exceeded()
        })
        .count();
    let cap_ok = exceeded >= 998;

    check_budget(7, start, Duration::from_secs(30));
    report(
        7,
        median_ok && cap_ok,
        &format!("C=3 median {median3} in [4,5] over 10^4 runs; C=20 cap-exceeded {exceeded}/1000"),
    );
}

/// Criterion 8: byte-identical output for every subcommand under a fixed
/// seed, and the pinned sweep matches its golden CSV exactly.
#[test]
fn criterion_8_determinism_and_golden_csv() {
    let commands: &[&[&str]] = &[
        &[
            "analytic",
            "--C",
            "32",
            "--R",
            "4",
            "--kappa",
            "1",
            "--population",
            "16",
        ],
        &["paper-example"],
        &[
            "simulate",
            "--C",
            "16",
            "--R",
            "4",
            "--trials",
            "101",
            "--seed",
            "11",
            "--efficient",
        ],
        &[
            "--format",
            "csv",
            "--no-banner",
            "sweep",
            "--C",
            "8,16,32",
            "--R",
            "2,4",
            "--kappa",
            "1",
            "--trials",
            "101",
            "--seed",
            "42",
        ],
        &[
            "compare", "--C", "8", "--R", "2", "--trials", "101", "--seed", "11",
        ],
        &[
            "blind-search",
            "--C",
            "10",
            "--runs",
            "100",
            "--seed",
            "11",
            "--cap",
            "100",
        ],
    ];

    let mut identical = 0usize;
    for args in commands {
        let first = run_binary(args);
        let second = run_binary(args);
        assert!(first.status.success(), "{args:?} failed");
        assert!(second.status.success());
        assert!(first.stderr.is_empty(), "{args:?} wrote to stderr");
        if first.stdout == second.stdout {
            identical += 1;
        }
    }

    let golden = include_str!("golden/sweep.csv");
    let sweep = run_binary(commands[3]);
    let golden_ok = sweep.stdout == golden.as_bytes();

    report(
        8,
        identical == commands.len() && golden_ok,
        &format!(
            "{identical}/{} subcommands byte-identical across two runs; golden sweep CSV {}",
            commands.len(),
            if golden_ok { "matches" } else { "differs" }
        ),
    );
}

/// Criterion 9: with shared evaluation order, first-improvement
/// accounting never costs more than exhaustive accounting.
#[test]
fn criterion_9_pathwise_dominance() {
    let start = Instant::now();
    let params = CostParams::new(rat("1"), "year").unwrap();
    let landscape = BlockStaircaseLandscape::generate(16, 4, landscape_seed(19)).unwrap();

    let mut dominated = 0usize;
    let pairs = 1000u64;
    for index in 0..pairs {
        let seed = trial_seed(19, index);
        let exhaustive = run_single(&landscape, &params, AccountingMode::Exhaustive, seed).unwrap();
        let first =
            run_single(&landscape, &params, AccountingMode::FirstImprovement, seed).unwrap();
        if first.total_cost.magnitude() <= exhaustive.total_cost.magnitude() {
            dominated += 1;
        }
    }

    check_budget(9, start, Duration::from_secs(10));
    report(
        9,
        dominated == pairs as usize,
        &format!("first-improvement <= exhaustive in {dominated}/{pairs} shared-order pairs"),
    );
}
