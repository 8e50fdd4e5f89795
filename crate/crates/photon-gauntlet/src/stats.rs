//! Moments, interval estimates, and agreement tests between empirical
//! tallies and closed-form distributions.

use serde::Serialize;

use crate::analytic::CountDistribution;
use crate::montecarlo::EmpiricalDistribution;

/// Two-sided 95% normal quantile, used for the Wilson intervals reported by
/// the command line.
pub const Z_95: f64 = 1.959963984540054;

/// Statistical preconditions that do not hold.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StatsError {
    #[error("distribution has no mass")]
    EmptyDistribution,
    #[error("observed counts reach {observed}, beyond the analytic support {support_max}")]
    ObservationOutsideSupport { observed: u32, support_max: u32 },
    #[error(
        "wilson interval needs successes <= trials, trials >= 1, and finite z > 0 \
         (successes = {successes}, trials = {trials}, z = {z})"
    )]
    WilsonPrecondition { successes: u64, trials: u64, z: f64 },
    #[error("distributions cover different photon counts ({left} vs {right})")]
    SupportMismatch { left: u32, right: u32 },
    #[error("event count m must be at least 1")]
    ZeroEventCount,
}

/// First two moments of a count variable, with the variance-to-mean ratios
/// used to classify spread relative to Poisson.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SummaryStats {
    pub mean: f64,
    /// Weight-averaged squared deviation (the plug-in variance; empirical
    /// input is treated as a full population of trials).
    pub variance: f64,
    /// `variance / mean`; `None` when the mean is zero.
    pub fano: Option<f64>,
    /// `fano - 1`: negative means narrower than Poisson (sub-Poissonian).
    pub mandel_q: Option<f64>,
}

/// Anything that assigns nonnegative weight to counts. Weights need not be
/// normalized: pmf cells and raw tallies both qualify.
pub trait CountMass {
    fn count_weights(&self) -> Vec<(u32, f64)>;
}

impl CountMass for CountDistribution {
    fn count_weights(&self) -> Vec<(u32, f64)> {
        self.probabilities()
            .iter()
            .enumerate()
            .map(|(m, &p)| (m as u32, p))
            .collect()
    }
}

impl CountMass for EmpiricalDistribution {
    fn count_weights(&self) -> Vec<(u32, f64)> {
        self.counts().iter().map(|(&m, &n)| (m, n as f64)).collect()
    }
}

/// Mean, variance, Fano factor, and Mandel Q of a count distribution.
pub fn summarize<D: CountMass + ?Sized>(dist: &D) -> Result<SummaryStats, StatsError> {
    let weights = dist.count_weights();
    let total: f64 = weights.iter().map(|&(_, w)| w).sum();
    if total <= 0.0 {
        return Err(StatsError::EmptyDistribution);
    }
    let mean = weights.iter().map(|&(m, w)| f64::from(m) * w).sum::<f64>() / total;
    let variance = weights
        .iter()
        .map(|&(m, w)| {
            let d = f64::from(m) - mean;
            w * d * d
        })
        .sum::<f64>()
        / total;
    let fano = (mean > 0.0).then(|| variance / mean);
    Ok(SummaryStats { mean, variance, fano, mandel_q: fano.map(|f| f - 1.0) })
}

/// Wilson score interval for a binomial proportion: the interval is the set
/// of `p` whose `z`-test accepts `successes / trials`, so it stays inside
/// `[0, 1]` and keeps coverage near nominal even for extreme proportions.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> Result<(f64, f64), StatsError> {
    if trials == 0 || successes > trials || !z.is_finite() || z <= 0.0 {
        return Err(StatsError::WilsonPrecondition { successes, trials, z });
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    // At the boundary proportions the touching endpoint is exactly 0 or 1;
    // evaluate it as such rather than through the drifting general form.
    let lo = if successes == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if successes == trials { 1.0 } else { (center + half).min(1.0) };
    Ok((lo, hi))
}

/// One detected-count cell of an agreement test.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountCell {
    pub count: u32,
    pub observed: u64,
    pub observed_fraction: f64,
    pub expected_probability: f64,
    /// `(observed_fraction - expected) / se(expected)`. Infinite when the
    /// model puts zero (or full) mass on a cell the data contradicts.
    pub z: f64,
}

/// Empirical tallies against an analytic pmf: per-cell z-scores plus one
/// pooled chi-square.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    /// Cells worth looking at: observed mass, or expected probability above
    /// `1e-12`. z-scores and the chi-square still cover the full support.
    pub cells: Vec<CountCell>,
    pub max_abs_z: f64,
    pub max_abs_deviation: f64,
    /// Pearson chi-square over cells merged (low counts pooled upward) so
    /// every group expects at least 5 trials.
    pub chi_square: f64,
    /// Merged groups minus one.
    pub chi_square_df: usize,
    pub trials: u64,
    pub tol_z: f64,
    /// True when every finite cell z lies within `tol_z` and no infinite z
    /// appeared.
    pub pass: bool,
}

/// Test observed tallies against an analytic count distribution.
///
/// Every cell of the analytic support gets a z-score for its observed
/// fraction; `pass` demands `|z| <= tol_z` everywhere. A Pearson chi-square
/// over expected-count groups of at least 5 summarizes overall shape.
pub fn compare_to_analytic(
    empirical: &EmpiricalDistribution,
    analytic: &CountDistribution,
    tol_z: f64,
) -> Result<ComparisonReport, StatsError> {
    let trials = empirical.trials();
    if trials == 0 {
        return Err(StatsError::EmptyDistribution);
    }
    let support_max = analytic.support_max();
    let observed_max = empirical.max_count();
    if observed_max > support_max {
        return Err(StatsError::ObservationOutsideSupport { observed: observed_max, support_max });
    }

    let n = trials as f64;
    let mut cells = Vec::new();
    let mut max_abs_z = 0.0_f64;
    let mut max_abs_deviation = 0.0_f64;

    // Chi-square groups: pool cells walking upward until a group expects at
    // least 5 trials; a trailing underweight remainder joins the last group.
    let mut groups: Vec<(f64, f64)> = Vec::new();
    let mut group_obs = 0.0_f64;
    let mut group_exp = 0.0_f64;

    for m in 0..=support_max {
        let expected = analytic.pmf(m);
        let observed = empirical.tally(m);
        let fraction = observed as f64 / n;
        let deviation = fraction - expected;
        let se = (expected * (1.0 - expected) / n).sqrt();
        let z = if se > 0.0 {
            deviation / se
        } else if deviation == 0.0 {
            0.0
        } else {
            f64::INFINITY.copysign(deviation)
        };
        max_abs_z = max_abs_z.max(z.abs());
        max_abs_deviation = max_abs_deviation.max(deviation.abs());
        if observed > 0 || expected > 1e-12 {
            cells.push(CountCell {
                count: m,
                observed,
                observed_fraction: fraction,
                expected_probability: expected,
                z,
            });
        }
        group_obs += observed as f64;
        group_exp += expected * n;
        if group_exp >= 5.0 {
            groups.push((group_obs, group_exp));
            group_obs = 0.0;
            group_exp = 0.0;
        }
    }
    if group_obs > 0.0 || group_exp > 0.0 {
        if let Some(last) = groups.last_mut() {
            last.0 += group_obs;
            last.1 += group_exp;
        } else {
            groups.push((group_obs, group_exp));
        }
    }

    let chi_square: f64 = groups
        .iter()
        .filter(|&&(_, e)| e > 0.0)
        .map(|&(o, e)| (o - e) * (o - e) / e)
        .sum();
    let chi_square_df = groups.len().saturating_sub(1);

    Ok(ComparisonReport {
        cells,
        max_abs_z,
        max_abs_deviation,
        chi_square,
        chi_square_df,
        trials,
        tol_z,
        pass: max_abs_z <= tol_z,
    })
}

/// How much more likely the bunched discipline makes the compared event.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Amplification {
    /// `P_bunched(>= m) / P_separate(>= m)`.
    Ratio { value: f64 },
    /// The separate-stream tail is exactly zero, so the ratio diverges;
    /// the bunched tail is kept for reporting.
    Undefined { numerator: f64 },
}

impl Amplification {
    pub fn value(&self) -> Option<f64> {
        match *self {
            Amplification::Ratio { value } => Some(value),
            Amplification::Undefined { .. } => None,
        }
    }
}

/// Ratio of tail probabilities from two raw tail values.
pub fn amplification_from_tails(separate_tail: f64, bunched_tail: f64) -> Amplification {
    if separate_tail == 0.0 {
        Amplification::Undefined { numerator: bunched_tail }
    } else {
        Amplification::Ratio { value: bunched_tail / separate_tail }
    }
}

/// `P_bunched(>= m) / P_separate(>= m)` over two detected-count
/// distributions for the same photon count.
pub fn bunching_amplification(
    separate: &CountDistribution,
    bunched: &CountDistribution,
    m: u32,
) -> Result<Amplification, StatsError> {
    if m == 0 {
        return Err(StatsError::ZeroEventCount);
    }
    if separate.support_max() != bunched.support_max() {
        return Err(StatsError::SupportMismatch {
            left: separate.support_max(),
            right: bunched.support_max(),
        });
    }
    Ok(amplification_from_tails(separate.tail_at_least(m), bunched.tail_at_least(m)))
}
