//! Trial mechanics, tally plumbing, and determinism of the simulation engine.

use std::collections::BTreeMap;

use photon_gauntlet::analytic::QVector;
use photon_gauntlet::montecarlo::{
    run_experiment, run_trial_bunched, run_trial_separate, EmpiricalDistribution, MonteCarloError,
    TrialRng,
};
use photon_gauntlet::scenario::{
    validate, DetectorMode, DetectorSpec, EmissionMode, EmissionPlan, Scenario, ShellSpec,
    SurfaceForm, ValidatedScenario,
};

fn worked_chain() -> QVector {
    QVector::new(vec![0.5, 0.25], 0.1).unwrap()
}

fn scenario(mode: EmissionMode, photons_k: u32, trials: u64, seed: u64) -> ValidatedScenario {
    let scenario = Scenario {
        shells: vec![
            ShellSpec { label: "inner".into(), form: SurfaceForm::Direct { q: 0.5 } },
            ShellSpec { label: "outer".into(), form: SurfaceForm::Direct { q: 0.25 } },
        ],
        detector: DetectorSpec {
            form: SurfaceForm::Direct { q: 0.1 },
            mode: DetectorMode::Multiphoton,
        },
        emission: EmissionPlan { mode, photons_k, interval_t_s: 1.0 },
        trials,
        seed,
    };
    validate(&scenario).unwrap()
}

#[test]
fn trial_stream_is_a_pure_function_of_seed_and_index() {
    let draw = |seed, trial| {
        let mut rng = TrialRng::for_trial(seed, trial);
        (0..64).map(|_| rng.interacts(0.5)).collect::<Vec<bool>>()
    };
    assert_eq!(draw(42, 7), draw(42, 7));
    assert_ne!(draw(42, 7), draw(42, 8), "trial index must move the stream");
    assert_ne!(draw(42, 7), draw(43, 7), "seed must move the stream");
}

#[test]
fn interaction_draws_respect_degenerate_probabilities() {
    let mut rng = TrialRng::for_trial(1, 0);
    assert!((0..1000).all(|_| !rng.interacts(0.0)));
    assert!((0..1000).all(|_| rng.interacts(1.0)));
}

#[test]
fn separate_trials_conserve_photons() {
    let qv = worked_chain();
    for trial in 0..1000 {
        let mut rng = TrialRng::for_trial(3, trial);
        let outcome = run_trial_separate(&qv, 5, &mut rng);
        let absorbed: u32 = outcome.absorbed_per_shell.iter().sum();
        assert_eq!(absorbed + outcome.survivors, 5);
        assert!(outcome.detected <= outcome.survivors);
    }
}

#[test]
fn bunched_trials_hold_the_survivor_floor() {
    let qv = QVector::new(vec![0.9, 0.9, 0.9], 0.5).unwrap();
    for trial in 0..1000 {
        let mut rng = TrialRng::for_trial(9, trial);
        let outcome = run_trial_bunched(&qv, 5, &mut rng);
        let absorbed: u32 = outcome.absorbed_per_shell.iter().sum();
        assert_eq!(absorbed + outcome.survivors, 5);
        assert!(outcome.survivors >= 2, "floor violated: {}", outcome.survivors);
        assert!(outcome.absorbed_per_shell.iter().all(|&n| n <= 1), "capacity violated");
        assert!(outcome.detected <= outcome.survivors);
    }
}

#[test]
fn vacuum_bunch_arrives_whole() {
    let qv = QVector::new(vec![], 0.3).unwrap();
    for trial in 0..100 {
        let mut rng = TrialRng::for_trial(5, trial);
        let outcome = run_trial_bunched(&qv, 3, &mut rng);
        assert_eq!(outcome.survivors, 3);
        assert!(outcome.absorbed_per_shell.is_empty());
    }
}

#[test]
fn perfect_absorbers_strip_one_photon_each() {
    let qv = QVector::new(vec![1.0, 1.0, 1.0], 0.5).unwrap();
    let mut rng = TrialRng::for_trial(11, 0);
    let outcome = run_trial_bunched(&qv, 5, &mut rng);
    assert_eq!(outcome.survivors, 2);
    assert_eq!(outcome.absorbed_per_shell, vec![1, 1, 1]);
}

#[test]
fn experiment_is_identical_across_worker_counts() {
    let validated = scenario(EmissionMode::Bunched, 3, 20_000, 42);
    let single = run_experiment(&validated, 1).unwrap();
    for workers in [2, 3, 8] {
        let parallel = run_experiment(&validated, workers).unwrap();
        assert_eq!(parallel, single, "workers = {workers} diverged");
    }
    // workers = 0 resolves to available parallelism; still the same result.
    assert_eq!(run_experiment(&validated, 0).unwrap(), single);
}

#[test]
fn experiment_is_reproducible_and_seed_sensitive() {
    let validated = scenario(EmissionMode::Separate, 2, 5_000, 7);
    let first = run_experiment(&validated, 4).unwrap();
    let second = run_experiment(&validated, 4).unwrap();
    assert_eq!(first, second);

    let reseeded = scenario(EmissionMode::Separate, 2, 5_000, 8);
    assert_ne!(run_experiment(&reseeded, 4).unwrap(), first);
}

#[test]
fn experiment_tallies_are_complete() {
    let validated = scenario(EmissionMode::Bunched, 3, 10_000, 1);
    let result = run_experiment(&validated, 0).unwrap();
    assert_eq!(result.trials, 10_000);
    assert_eq!(result.seed, 1);
    assert_eq!(result.detected.trials(), 10_000);
    assert_eq!(result.survivors.trials(), 10_000);
    assert_eq!(result.absorbed_per_shell.len(), 2);
    // Two absorbers, three photons: at least one always survives.
    assert!(result.min_survivors >= 1);
    assert_eq!(result.survivors.tally(0), 0);
    let detected_total: u64 = result.detected.counts().values().sum();
    assert_eq!(detected_total, 10_000);
}

#[test]
fn more_workers_than_trials_still_works() {
    let validated = scenario(EmissionMode::Separate, 1, 3, 2);
    let result = run_experiment(&validated, 64).unwrap();
    assert_eq!(result.trials, 3);
    assert_eq!(result, run_experiment(&validated, 1).unwrap());
}

#[test]
fn zero_trials_is_an_error() {
    let validated = scenario(EmissionMode::Separate, 1, 0, 2);
    assert!(matches!(
        run_experiment(&validated, 1),
        Err(MonteCarloError::EmptyExperiment)
    ));
}

#[test]
fn empirical_distribution_accessors_agree_with_raw_counts() {
    let counts = BTreeMap::from([(0u32, 700u64), (1, 250), (3, 50)]);
    let dist = EmpiricalDistribution::from_counts(counts).unwrap();
    assert_eq!(dist.trials(), 1000);
    assert_eq!(dist.tally(1), 250);
    assert_eq!(dist.tally(2), 0);
    assert_eq!(dist.max_count(), 3);
    assert_eq!(dist.fraction(0), 0.7);
    assert_eq!(dist.tail_fraction_at_least(1), 0.3);
    assert_eq!(dist.tail_fraction_at_least(4), 0.0);

    let pmf = dist.to_count_distribution(3).unwrap();
    assert_eq!(pmf.pmf(0), 0.7);
    assert_eq!(pmf.pmf(2), 0.0);
    // Support narrower than the observations cannot hold the mass.
    assert!(dist.to_count_distribution(2).is_none());
}

#[test]
fn empirical_distribution_rejects_empty_tallies() {
    assert!(matches!(
        EmpiricalDistribution::from_counts(BTreeMap::new()),
        Err(MonteCarloError::EmptyExperiment)
    ));
}

#[test]
fn empirical_fractions_track_analytic_probabilities() {
    // Not the acceptance gate, just a coarse sanity corridor: 10^5 trials
    // put each cell well within five standard errors.
    let validated = scenario(EmissionMode::Bunched, 3, 100_000, 42);
    let result = run_experiment(&validated, 0).unwrap();
    let analytic =
        photon_gauntlet::analytic::bunched_detected_distribution(&worked_chain(), 3);
    let n = result.trials as f64;
    for m in 0..=3u32 {
        let p = analytic.pmf(m);
        let se = (p * (1.0 - p) / n).sqrt();
        let dev = (result.detected.fraction(m) - p).abs();
        assert!(dev <= 5.0 * se + 1e-9, "cell {m}: dev {dev} vs se {se}");
    }
}
