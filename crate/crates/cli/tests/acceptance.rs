//! Acceptance criteria, one pass/fail line each.
//!
//! Runs as a plain binary (no libtest harness) so the verdict lines always
//! reach the terminal. Exits nonzero if any criterion fails.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::Rng;

use epicongress::competence::{expected_uniform_profile, sample_profile};
use epicongress::empirics::{bundled_records, loglog_regression, LegislatureRecord};
use epicongress::gain::experiment::experiment_row;
use epicongress::gain::{
    dictatorship_condition, per_profile_gains, EpsRule, ExperimentConfig, FamilyRule,
    PredictedSign, SimulationMode,
};
use epicongress::optimal_size::{bounded_support_bounds, ratio_test, uniform_bounds, RatioVerdict};
use epicongress::poisson_binomial::{pmf, recursion_identity_check};
use epicongress::rng::{self, StreamRng};
use epicongress::{optimal_k, CompetenceDistribution, CompetenceProfile, DEFAULT_SEED};

const INPUT_DOMAIN: u64 = 0x00AC_CE97;

fn inputs(index: u64) -> StreamRng {
    rng::substream(DEFAULT_SEED, INPUT_DOMAIN, index)
}

struct Verdict {
    passed: bool,
    detail: String,
}

fn check(passed: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        passed,
        detail: detail.into(),
    }
}

/// All `2^k` outcomes, one product per subset.
fn enumerate_pmf(p: &[f64]) -> Vec<f64> {
    let k = p.len();
    let mut mass = vec![0.0; k + 1];
    let mut weight = vec![0.0; 1 << k];
    for mask in 0usize..(1 << k) {
        // Extend the product of the subset without its top bit.
        weight[mask] = if mask == 0 {
            p.iter().map(|x| 1.0 - x).product()
        } else {
            let top = usize::BITS as usize - 1 - mask.leading_zeros() as usize;
            let rest = mask ^ (1 << top);
            if p[top] < 1.0 {
                weight[rest] / (1.0 - p[top]) * p[top]
            } else {
                (0..k)
                    .map(|v| if mask >> v & 1 == 1 { p[v] } else { 1.0 - p[v] })
                    .product()
            }
        };
        mass[mask.count_ones() as usize] += weight[mask];
    }
    mass
}

/// Strict-majority accuracy by a fresh quadratic convolution.
fn majority(p: &[f64]) -> f64 {
    let mut dist = vec![1.0];
    for &x in p {
        let mut next = vec![0.0; dist.len() + 1];
        for (j, &m) in dist.iter().enumerate() {
            next[j] += m * (1.0 - x);
            next[j + 1] += m * x;
        }
        dist = next;
    }
    dist.iter()
        .enumerate()
        .filter(|(j, _)| 2 * j > p.len())
        .map(|(_, m)| m)
        .sum()
}

fn c1_oracle_equivalence() -> Verdict {
    let mut worst = 0.0f64;
    for i in 0..500 {
        let mut r = inputs(i);
        let k = r.random_range(1..=20);
        let p: Vec<f64> = (0..k).map(|_| r.random::<f64>()).collect();
        let dp = pmf(&p).expect("valid probabilities");
        for (a, b) in dp.mass().iter().zip(enumerate_pmf(&p)) {
            worst = worst.max((a - b).abs());
        }
    }
    check(
        worst <= 1e-12,
        format!("max entrywise error {worst:.2e} over 500 vectors"),
    )
}

fn c2_subset_identity() -> Verdict {
    let mut worst = 0.0f64;
    for i in 0..200 {
        let mut r = inputs(1000 + i);
        let k = r.random_range(1..=12);
        let p: Vec<f64> = (0..k).map(|_| r.random_range(0.01..1.0)).collect();
        let j = r.random_range(0..k);
        let (lhs, rhs) = recursion_identity_check(&p, j).expect("valid input");
        worst = worst.max((lhs - rhs).abs());
    }
    check(
        worst <= 1e-10,
        format!("max |lhs - rhs| {worst:.2e} over 200 draws"),
    )
}

fn c3_ratio_soundness() -> Verdict {
    let (mut tested, mut wrong) = (0, 0);
    for i in 0..200 {
        let mut r = inputs(2000 + i);
        let n = r.random_range(3..=25);
        let p = CompetenceProfile::from_unsorted((0..n).map(|_| r.random::<f64>()).collect())
            .expect("valid profile");
        for k in (1..n - 1).step_by(2) {
            let diff = majority(p.top(k + 2)) - majority(p.top(k));
            let ok = match ratio_test(&p, k).expect("k + 2 <= n").verdict {
                RatioVerdict::RulesOutK => diff >= -1e-12,
                RatioVerdict::RulesOutKPlus2 => diff <= 1e-12,
                RatioVerdict::Inconclusive => diff.abs() <= 1e-12,
            };
            tested += 1;
            wrong += usize::from(!ok);
        }
    }
    check(
        wrong == 0,
        format!("{wrong} wrong verdicts out of {tested} (profile, k) pairs"),
    )
}

fn c4_expected_uniform_band() -> Verdict {
    let mut ok = true;
    let mut parts = Vec::new();
    for n in [51, 101, 501, 1001, 2001] {
        let k = optimal_k(&expected_uniform_profile(n).expect("n > 0")).k_star;
        let (lo, hi) = uniform_bounds(n);
        let kf = k as f64;
        let ratio = kf / n as f64;
        ok &= k % 2 == 1 && lo - 3.0 <= kf && kf <= hi + 3.0;
        if n >= 501 {
            ok &= (0.18..=0.32).contains(&ratio);
        }
        parts.push(format!("n={n}: K*={k} ({ratio:.3}n)"));
    }
    check(ok, parts.join(", "))
}

fn c5_bounded_support() -> Verdict {
    let d = CompetenceDistribution::uniform(0.1, 0.9).expect("valid");
    let n = 2000;
    let eps = EpsRule::Dkw.value(n).expect("n > 0");
    let b = bounded_support_bounds(&d, n, eps).expect("support straddles 1/2");
    let inside = (0..50u64)
        .filter(|&seed| {
            let k = optimal_k(&sample_profile(&d, n, seed).expect("n > 0")).k_star as f64;
            b.lower - 3.0 <= k && k <= b.upper + 3.0
        })
        .count();
    check(
        inside * 100 >= 95 * 50,
        format!(
            "{inside}/50 seeds inside [{:.1}, {:.1}] (c_H = {:.4}, c_L = {:.4})",
            b.lower - 3.0,
            b.upper + 3.0,
            b.c_high,
            b.c_low
        ),
    )
}

fn c6_gain_sweep() -> Verdict {
    let base = ExperimentConfig {
        n_grid: vec![1_000, 3_000, 10_000, 30_000, 100_000],
        r: 0.36,
        family: FamilyRule::ShiftedUniform { margin: 0.4 },
        eps: EpsRule::SqrtLog(1.0),
        trials: 1000,
        seed: DEFAULT_SEED,
        mode: SimulationMode::ExactConditional,
    };
    let small_bias = ExperimentConfig {
        eps: EpsRule::SqrtLogLog(0.5),
        ..base.clone()
    };
    let top = experiment_row(&small_bias, 100_000).expect("valid config");
    let a_ok = top.gain > 2.0 * top.gain_ci;

    let mut b_ok = true;
    let mut gains = Vec::new();
    for &n in &base.n_grid {
        let row = experiment_row(&base, n).expect("valid config");
        b_ok &= row.gain < 0.0;
        gains.push(format!("{:+.4}", row.gain));
    }
    check(
        a_ok && b_ok,
        format!(
            "(a) sqrtloglog:0.5 at n=1e5: gain {:+.4} +/- {:.4}; (b) sqrtlog:1 gains [{}]",
            top.gain,
            top.gain_ci,
            gains.join(", ")
        ),
    )
}

fn c7_dictatorship_sign() -> Verdict {
    let n = 10_000;
    let family = FamilyRule::DictatorUniform;
    let mut ok = true;
    let mut parts = Vec::new();
    for (a, want) in [
        (0.3, PredictedSign::Positive),
        (1.0, PredictedSign::Negative),
    ] {
        let report = dictatorship_condition(&family, a, n).expect("supported family");
        let eps = EpsRule::SqrtLog(a).value(n).expect("n > 0");
        let dist = family.distribution(eps, 1).expect("valid family");
        let gains = per_profile_gains(&dist, n, 1, 200, DEFAULT_SEED).expect("valid input");
        let agree = gains
            .iter()
            .filter(|&&g| match want {
                PredictedSign::Positive => g > 0.0,
                _ => g < 0.0,
            })
            .count();
        ok &= report.predicted_sign == want && agree * 100 >= 80 * gains.len();
        parts.push(format!(
            "a={a}: predicted {}, {agree}/200 agree",
            report.predicted_sign
        ));
    }
    check(ok, parts.join("; "))
}

fn c8_regression() -> Verdict {
    let fit =
        loglog_regression(&bundled_records().expect("bundled data parses")).expect("enough points");
    let bundled_ok = (0.30..=0.42).contains(&fit.slope) && fit.r_squared >= 0.75;

    let synthetic =
        |base: u64, pop_exp: u32, seat_exp: u32, count: u32| -> Vec<LegislatureRecord> {
            (1..=count)
                .map(|i| LegislatureRecord {
                    country: format!("s{i}"),
                    population: base.pow(pop_exp * i),
                    seats: base.pow(seat_exp * i),
                })
                .collect()
        };
    let mut synth_ok = true;
    let mut worst = 0.0f64;
    for (records, slope) in [
        (synthetic(2, 3, 1, 12), 1.0 / 3.0),
        (synthetic(3, 5, 2, 8), 0.4),
    ] {
        let f = loglog_regression(&records).expect("enough points");
        worst = worst.max((f.slope - slope).abs());
        synth_ok &= (f.slope - slope).abs() <= 1e-10 && (f.r_squared - 1.0).abs() <= 1e-12;
    }
    check(
        bundled_ok && synth_ok,
        format!(
            "bundled slope {:.4}, R^2 {:.4} ({} records); synthetic slope error {worst:.1e}",
            fit.slope, fit.r_squared, fit.n_points
        ),
    )
}

fn c9_cli_determinism() -> Verdict {
    let commands: [&[&str]; 7] = [
        &["pmf", "--profile", "beta:2,3", "--n", "40"],
        &[
            "optimal-size",
            "--profile",
            "uniform:0.1,0.9",
            "--n-grid",
            "101,301",
        ],
        &["bounds", "--dist", "uniform:0.1,0.9", "--n", "2000"],
        &[
            "gain",
            "--profile",
            "uniform:0.4,0.6",
            "--n",
            "2001",
            "--r",
            "0.36",
            "--trials",
            "200",
        ],
        &[
            "experiment",
            "--n-grid",
            "1001,3001",
            "--trials",
            "100",
            "--mode",
            "votes",
        ],
        &["regress", "--predict", "1000000"],
        &[
            "conditions",
            "--theorem",
            "dictatorship",
            "--family",
            "beta-bias:2",
            "--a",
            "0.3",
            "--n",
            "10000",
        ],
    ];
    let run = |args: &[&str]| {
        Command::new(env!("CARGO_BIN_EXE_epicongress"))
            .args(args)
            .arg("-q")
            .output()
            .expect("binary runs")
    };
    let mut bad = Vec::new();
    for args in commands {
        let (a, b) = (run(args), run(args));
        if !(a.status.success()
            && b.status.success()
            && a.stdout == b.stdout
            && !a.stdout.is_empty())
        {
            bad.push(args[0]);
        }
    }
    check(
        bad.is_empty(),
        format!("7 subcommands rerun; differing or failing: {bad:?}"),
    )
}

fn main() -> ExitCode {
    type Criterion = (&'static str, Duration, fn() -> Verdict);
    let criteria: [Criterion; 9] = [
        (
            "1 pmf matches enumeration",
            Duration::from_secs(10),
            c1_oracle_equivalence,
        ),
        (
            "2 subset-counting identity",
            Duration::from_secs(30),
            c2_subset_identity,
        ),
        (
            "3 ratio test soundness",
            Duration::from_secs(60),
            c3_ratio_soundness,
        ),
        (
            "4 expected-uniform K* band",
            Duration::from_secs(120),
            c4_expected_uniform_band,
        ),
        (
            "5 bounded-support bracket",
            Duration::from_secs(900),
            c5_bounded_support,
        ),
        (
            "6 gain sign sweep",
            Duration::from_secs(1800),
            c6_gain_sweep,
        ),
        (
            "7 dictatorship sign check",
            Duration::from_secs(600),
            c7_dictatorship_sign,
        ),
        (
            "8 log-log regression",
            Duration::from_secs(1),
            c8_regression,
        ),
        (
            "9 cli determinism",
            Duration::from_secs(600),
            c9_cli_determinism,
        ),
    ];
    let mut failures = 0;
    for (name, limit, run) in criteria {
        let start = Instant::now();
        let v = run();
        let took = start.elapsed();
        let passed = v.passed && took < limit;
        failures += usize::from(!passed);
        println!(
            "{} criterion {name}: {} [{:.2}s, limit {}s]",
            if passed { "PASS" } else { "FAIL" },
            v.detail,
            took.as_secs_f64(),
            limit.as_secs()
        );
    }
    println!("acceptance: {} of 9 criteria passed", 9 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
