use epicongress::competence::sample_profile_with;
use epicongress::gain::{
    experiment::experiment_row, gain_exact, gain_monte_carlo, run_experiment, simulate, trial_rng,
    ExperimentConfig, GainMethod, SimulationMode,
};
use epicongress::{CompetenceDistribution, CompetenceProfile};
use proptest::prelude::*;

/// Expected top-5 gain for 15 i.i.d. U(0,1) voters, exact.
///
/// Direct democracy is exactly 1/2: the votes are i.i.d. fair coins. Given
/// that the fifth-best competence is t, the four above it are i.i.d.
/// U(t, 1), each right with probability (1 + t)/2, and t follows
/// Beta(11, 5). Integrating the majority probability against that density
/// gives 58397/62016.
const N15_K5_GAIN: f64 = 58397.0 / 62016.0 - 0.5;

fn unit_uniform() -> CompetenceDistribution {
    CompetenceDistribution::uniform(0.0, 1.0).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn full_congress_has_no_gain(p in prop::collection::vec(0.0..=1.0f64, 1..300)) {
        let p = CompetenceProfile::from_unsorted(p).unwrap();
        prop_assert_eq!(gain_exact(&p, p.n()).unwrap().value, 0.0);
    }
}

#[test]
fn monte_carlo_converges_to_oracle() {
    let s = simulate(
        &unit_uniform(),
        15,
        5,
        100_000,
        11,
        SimulationMode::ExactConditional,
    )
    .unwrap();
    let err = (s.gain.mean - N15_K5_GAIN).abs();
    assert!(
        err <= 3.0 * s.gain.std_error(),
        "{} vs {N15_K5_GAIN}",
        s.gain.mean
    );
    // Direct democracy is a fair coin in expectation.
    assert!((s.direct.mean - 0.5).abs() <= 3.0 * s.direct.std_error());
}

#[test]
fn modes_agree_within_standard_errors() {
    let d = CompetenceDistribution::uniform(0.3, 0.8).unwrap();
    let exact = simulate(&d, 41, 7, 50_000, 3, SimulationMode::ExactConditional).unwrap();
    let votes = simulate(&d, 41, 7, 50_000, 4, SimulationMode::VoteSampling).unwrap();
    let se = exact.gain.std_error().hypot(votes.gain.std_error());
    let diff = (exact.gain.mean - votes.gain.mean).abs();
    assert!(
        diff <= 3.0 * se,
        "{} vs {} (se {se})",
        exact.gain.mean,
        votes.gain.mean
    );
}

#[test]
fn confidence_intervals_are_calibrated() {
    let covered = (0..100u64)
        .filter(|&seed| {
            let g = gain_monte_carlo(
                &unit_uniform(),
                15,
                5,
                1000,
                1000 + seed,
                SimulationMode::ExactConditional,
            )
            .unwrap();
            (g.value - N15_K5_GAIN).abs() <= g.ci95_halfwidth
        })
        .count();
    assert!(
        covered >= 90,
        "{covered} of 100 intervals cover the true gain"
    );
}

#[test]
fn estimates_carry_their_method() {
    let d = unit_uniform();
    let g = gain_monte_carlo(&d, 15, 5, 10, 1, SimulationMode::VoteSampling).unwrap();
    assert_eq!((g.method, g.trials), (GainMethod::VoteSampling, 10));
    let g = gain_monte_carlo(&d, 15, 5, 10, 1, SimulationMode::ExactConditional).unwrap();
    assert_eq!((g.method, g.trials), (GainMethod::ExactConditional, 10));
    assert!(g.ci95_halfwidth > 0.0);
    let p = CompetenceProfile::from_sorted(vec![0.9, 0.6, 0.4]).unwrap();
    let g = gain_exact(&p, 1).unwrap();
    assert_eq!(
        (g.method, g.trials, g.ci95_halfwidth),
        (GainMethod::Exact, 0, 0.0)
    );
}

#[test]
fn simulation_is_seed_deterministic() {
    let d = CompetenceDistribution::beta(3.0, 2.0).unwrap();
    for mode in [
        SimulationMode::ExactConditional,
        SimulationMode::VoteSampling,
    ] {
        let a = simulate(&d, 201, 9, 300, 77, mode).unwrap();
        let b = simulate(&d, 201, 9, 300, 77, mode).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, simulate(&d, 201, 9, 300, 78, mode).unwrap());
    }
}

#[test]
fn single_trial_row_is_the_exact_gain_of_its_profile() {
    let config = ExperimentConfig {
        n_grid: vec![1001],
        trials: 1,
        ..ExperimentConfig::default()
    };
    let n = 1001;
    let row = experiment_row(&config, n).unwrap();
    let eps = config.eps.value(n).unwrap();
    let dist = config.family.distribution(eps, row.k).unwrap();
    let profile = sample_profile_with(&dist, n, &mut trial_rng(config.seed, 0)).unwrap();
    assert_eq!(row.gain, gain_exact(&profile, row.k).unwrap().value);
    assert_eq!(row.gain_ci, 0.0);
}

#[test]
fn experiment_tables_are_reproducible() {
    let config = ExperimentConfig {
        n_grid: vec![1001, 3001],
        trials: 40,
        ..ExperimentConfig::default()
    };
    let csv = |c: &ExperimentConfig| {
        let mut out = Vec::new();
        run_experiment(c).unwrap().write_csv(&mut out).unwrap();
        out
    };
    let first = csv(&config);
    assert_eq!(first, csv(&config));
    let text = String::from_utf8(first).unwrap();
    assert!(text.starts_with("n,eps_n,k,direct_acc,rep_acc,gain,direct_ci,rep_ci\n"));
    assert_eq!(text.lines().count(), 3);
}
