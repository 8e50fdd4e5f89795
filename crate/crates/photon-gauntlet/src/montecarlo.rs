//! Trial-level simulation with counter-based seeding.
//!
//! Reproducibility contract: trial `i` of an experiment with seed `s` draws
//! from `ChaCha8` keyed by `s` on stream `i`, so its outcome is a pure
//! function of `(s, i)` no matter which thread runs it or in what order.
//! Workers take trials in stride (`worker w` runs trials `w, w + W, ...`)
//! and merge their tallies by integer addition, which commutes, so the
//! aggregate is byte-identical for every worker count.
//!
//! Trial mechanics mirror the model directly rather than sampling the
//! closed-form distributions; agreement between these tallies and
//! [`crate::analytic`] is therefore evidence for the closed forms, not a
//! tautology.

use std::collections::BTreeMap;
use std::thread;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::analytic::{CountDistribution, QVector};
use crate::scenario::{EmissionMode, ValidatedScenario};

/// Simulation preconditions that cannot be expressed in the types.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MonteCarloError {
    #[error("experiment has zero trials; nothing to estimate")]
    EmptyExperiment,
}

/// Per-trial random source: one independent ChaCha8 stream per trial index.
pub struct TrialRng {
    rng: ChaCha8Rng,
}

impl TrialRng {
    /// Deterministic source for trial `trial_index` of an experiment seeded
    /// with `seed`. Streams with distinct indices never overlap.
    pub fn for_trial(seed: u64, trial_index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(trial_index);
        TrialRng { rng }
    }

    /// One interaction draw: fires with probability `q`.
    ///
    /// The underlying uniform lies in `[0, 1)`, so `q = 0` never fires and
    /// `q = 1` always does.
    #[inline]
    pub fn interacts(&mut self, q: f64) -> bool {
        self.rng.gen::<f64>() < q
    }
}

/// What one trial produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialOutcome {
    /// Photons captured by each shell, inner to outer. In bunched mode each
    /// entry is 0 or 1; in separate mode a relaxed shell can capture again.
    pub absorbed_per_shell: Vec<u32>,
    /// Photons that arrived at the detector surface.
    pub survivors: u32,
    /// Detector clicks.
    pub detected: u32,
}

/// One trial of `k` photons emitted far apart: every photon faces the full
/// chain independently.
pub fn run_trial_separate(qv: &QVector, k: u32, rng: &mut TrialRng) -> TrialOutcome {
    let mut absorbed_per_shell = vec![0u32; qv.absorber_count()];
    let mut survivors = 0;
    let mut detected = 0;
    'photon: for _ in 0..k {
        for (shell, &q) in qv.absorber_qs().iter().enumerate() {
            if rng.interacts(q) {
                absorbed_per_shell[shell] += 1;
                continue 'photon;
            }
        }
        survivors += 1;
        if rng.interacts(qv.detector_q()) {
            detected += 1;
        }
    }
    debug_assert_eq!(absorbed_per_shell.iter().sum::<u32>() + survivors, k);
    debug_assert!(detected <= survivors);
    TrialOutcome { absorbed_per_shell, survivors, detected }
}

/// One trial of `k` photons crossing the chain together: each photon in the
/// bunch draws its own interaction, and a shell that sees any interaction
/// captures exactly one photon before saturating.
pub fn run_trial_bunched(qv: &QVector, k: u32, rng: &mut TrialRng) -> TrialOutcome {
    let mut absorbed_per_shell = vec![0u32; qv.absorber_count()];
    let mut bunch = k;
    for (shell, &q) in qv.absorber_qs().iter().enumerate() {
        let mut any_interaction = false;
        for _ in 0..bunch {
            any_interaction |= rng.interacts(q);
        }
        if any_interaction && bunch > 0 {
            absorbed_per_shell[shell] = 1;
            bunch -= 1;
        }
    }
    let mut detected = 0;
    for _ in 0..bunch {
        if rng.interacts(qv.detector_q()) {
            detected += 1;
        }
    }
    debug_assert!(bunch >= k.saturating_sub(qv.absorber_count() as u32));
    debug_assert!(detected <= bunch);
    TrialOutcome { absorbed_per_shell, survivors: bunch, detected }
}

/// Observed frequencies of a per-trial count.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalDistribution {
    counts: BTreeMap<u32, u64>,
    trials: u64,
}

impl EmpiricalDistribution {
    /// Wrap raw tallies; `trials` is their sum and must be positive.
    pub fn from_counts(counts: BTreeMap<u32, u64>) -> Result<Self, MonteCarloError> {
        let trials: u64 = counts.values().sum();
        if trials == 0 {
            return Err(MonteCarloError::EmptyExperiment);
        }
        Ok(EmpiricalDistribution { counts, trials })
    }

    pub fn counts(&self) -> &BTreeMap<u32, u64> {
        &self.counts
    }

    pub fn trials(&self) -> u64 {
        self.trials
    }

    /// Number of trials that produced exactly `m`.
    pub fn tally(&self, m: u32) -> u64 {
        self.counts.get(&m).copied().unwrap_or(0)
    }

    /// Largest observed count.
    pub fn max_count(&self) -> u32 {
        self.counts.keys().next_back().copied().unwrap_or(0)
    }

    pub fn fraction(&self, m: u32) -> f64 {
        self.tally(m) as f64 / self.trials as f64
    }

    /// Fraction of trials with count `>= m`.
    pub fn tail_fraction_at_least(&self, m: u32) -> f64 {
        let tail: u64 = self.counts.range(m..).map(|(_, &c)| c).sum();
        tail as f64 / self.trials as f64
    }

    /// Observed fractions as a pmf over `0..=support_max`; `None` when an
    /// observation lies beyond `support_max`.
    pub fn to_count_distribution(&self, support_max: u32) -> Option<CountDistribution> {
        if self.max_count() > support_max {
            return None;
        }
        let fractions: Vec<f64> = (0..=support_max).map(|m| self.fraction(m)).collect();
        CountDistribution::new(fractions).ok()
    }
}

/// Aggregate of every trial in an experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentResult {
    pub detected: EmpiricalDistribution,
    pub survivors: EmpiricalDistribution,
    /// Total captures per shell, inner to outer, across all trials.
    pub absorbed_per_shell: Vec<u64>,
    /// Smallest survivor count seen in any trial; never sinks below
    /// `max(0, K - A)`.
    pub min_survivors: u32,
    pub trials: u64,
    pub seed: u64,
}

struct Tally {
    detected: BTreeMap<u32, u64>,
    survivors: BTreeMap<u32, u64>,
    absorbed_per_shell: Vec<u64>,
    min_survivors: u32,
    trials: u64,
}

impl Tally {
    fn new(shells: usize) -> Self {
        Tally {
            detected: BTreeMap::new(),
            survivors: BTreeMap::new(),
            absorbed_per_shell: vec![0; shells],
            min_survivors: u32::MAX,
            trials: 0,
        }
    }

    fn record(&mut self, outcome: &TrialOutcome) {
        *self.detected.entry(outcome.detected).or_insert(0) += 1;
        *self.survivors.entry(outcome.survivors).or_insert(0) += 1;
        for (total, &n) in self.absorbed_per_shell.iter_mut().zip(&outcome.absorbed_per_shell) {
            *total += u64::from(n);
        }
        self.min_survivors = self.min_survivors.min(outcome.survivors);
        self.trials += 1;
    }

    // Integer merges commute, so the fold over workers is order-blind.
    fn merge(mut self, other: Tally) -> Tally {
        for (m, n) in other.detected {
            *self.detected.entry(m).or_insert(0) += n;
        }
        for (s, n) in other.survivors {
            *self.survivors.entry(s).or_insert(0) += n;
        }
        for (total, n) in self.absorbed_per_shell.iter_mut().zip(other.absorbed_per_shell) {
            *total += n;
        }
        self.min_survivors = self.min_survivors.min(other.min_survivors);
        self.trials += other.trials;
        self
    }
}

/// Run every trial of the scenario and merge the tallies.
///
/// `workers = 0` picks the machine's available parallelism. The result is
/// identical for every worker count, including 1.
pub fn run_experiment(
    scenario: &ValidatedScenario,
    workers: usize,
) -> Result<ExperimentResult, MonteCarloError> {
    let trials = scenario.trials();
    if trials == 0 {
        return Err(MonteCarloError::EmptyExperiment);
    }
    let qv = scenario.qv();
    let k = scenario.photons_k();
    let mode = scenario.emission_mode();
    let seed = scenario.seed();

    let requested = if workers == 0 {
        thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
    } else {
        workers
    };
    let worker_count = requested.max(1).min(usize::try_from(trials).unwrap_or(usize::MAX));

    let merged = thread::scope(|scope| {
        let handles: Vec<_> = (0..worker_count)
            .map(|w| {
                scope.spawn(move || {
                    let mut tally = Tally::new(qv.absorber_count());
                    let mut trial = w as u64;
                    while trial < trials {
                        let mut rng = TrialRng::for_trial(seed, trial);
                        let outcome = match mode {
                            EmissionMode::Separate => run_trial_separate(qv, k, &mut rng),
                            EmissionMode::Bunched => run_trial_bunched(qv, k, &mut rng),
                        };
                        tally.record(&outcome);
                        trial += worker_count as u64;
                    }
                    tally
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("simulation worker panicked"))
            .fold(Tally::new(qv.absorber_count()), Tally::merge)
    });

    Ok(ExperimentResult {
        detected: EmpiricalDistribution { counts: merged.detected, trials: merged.trials },
        survivors: EmpiricalDistribution { counts: merged.survivors, trials: merged.trials },
        absorbed_per_shell: merged.absorbed_per_shell,
        min_survivors: merged.min_survivors,
        trials: merged.trials,
        seed,
    })
}
