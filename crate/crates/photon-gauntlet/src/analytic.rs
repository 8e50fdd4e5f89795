//! Closed-form counting statistics in double precision.
//!
//! A scenario reduces to interaction probabilities `(q_1 .. q_A, q_D)`,
//! ordered inner to outer, detector last. Every quantity here follows from
//! three facts: a photon interacts with surface `n` only if it reached it,
//! an absorber holds at most one photon, and surfaces act independently.
//!
//! For a single photon:
//!
//! ```text
//! reach(n)  = prod_{j < n} (1 - q_j)          probability of arriving at surface n
//! absorb(n) = reach(n) * q_n                  probability shell n takes the photon
//! detect    = reach(A+1) * q_D                probability the detector fires
//! ```
//!
//! `detect` has an equivalent running-sum form, `[1 - sum_n absorb(n)] * q_D`,
//! because the capture events are mutually exclusive; both routes are exposed
//! (`detect_probability`, [`detect_probability_recurrent`]) and agree to
//! within [`COMPARISON_TOLERANCE`].
//!
//! For `K` photons emitted one at a time (separate stream) each photon sees
//! the same chain, so the detected count is `Binomial(K, detect)`
//! ([`m_of_k_distribution`]) and all-`K` detection has probability
//! `detect^K` ([`all_k_detect`]).
//!
//! For `K` photons traversing the chain together (a bunch), a shell captures
//! at most one photon out of the bunch: a bunch of `s` survivors keeps size
//! `s` with probability `(1 - q_j)^s` and shrinks to `s - 1` otherwise.
//! Chaining that step over the shells gives the survivor-count distribution
//! ([`bunched_survivor_distribution`]), supported on
//! `max(0, K - A) ..= K`: the chain can take at most one photon per shell,
//! so at least `K - A` photons always emerge. Detector clicks then follow by
//! thinning each survivor independently with probability `q_D`.
//!
//! [`inequality_report`] compares the two disciplines at the event
//! `M = max(1, K - A)`, "at least M photons detected". Bunching strictly
//! beats the separate stream there and is itself bounded by the no-absorber
//! chain, with `q_D^M` a strict lower bound on the bunched probability:
//!
//! ```text
//! p_separate < p_bunched <= p_vacuum,    p_bunched > q_D^M      (K > A)
//! ```
//!
//! Strictness collapses when every shell has `q_j = 0`; the verdict flags
//! that case as `degenerate_vacuum` instead of claiming an ordering.

use serde::Serialize;

/// Absolute slack for floating-point identity checks and strict-inequality
/// margins across the crate.
pub const COMPARISON_TOLERANCE: f64 = 1e-12;

/// Inputs that violate a documented precondition.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AnalyticError {
    #[error("absorber q_{index} = {value} is not a probability in [0, 1]")]
    AbsorberQOutOfRange { index: usize, value: f64 },
    #[error("detector q = {value} is not a probability in [0, 1]")]
    DetectorQOutOfRange { value: f64 },
    #[error("surface index {index} is outside 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },
    #[error("event count m = {m} exceeds photon count k = {k}")]
    EventExceedsPhotons { m: u32, k: u32 },
    #[error("probabilities sum to {sum}, not 1")]
    InvalidDistribution { sum: f64 },
    #[error("probability {value} at entry {index} is not in [0, 1]")]
    EntryOutOfRange { index: usize, value: f64 },
}

/// Interaction probabilities for one scenario: absorber shells inner to
/// outer, then the detector.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QVector {
    absorber_qs: Vec<f64>,
    detector_q: f64,
}

impl QVector {
    /// Build a probability vector, rejecting entries outside `[0, 1]`.
    pub fn new(absorber_qs: Vec<f64>, detector_q: f64) -> Result<Self, AnalyticError> {
        for (index, &value) in absorber_qs.iter().enumerate() {
            if !value.is_finite() || !(0.0..=1.0).contains(&value) {
                // 1-based, matching the chain notation q_1 .. q_A.
                return Err(AnalyticError::AbsorberQOutOfRange { index: index + 1, value });
            }
        }
        if !detector_q.is_finite() || !(0.0..=1.0).contains(&detector_q) {
            return Err(AnalyticError::DetectorQOutOfRange { value: detector_q });
        }
        Ok(QVector { absorber_qs, detector_q })
    }

    /// The same detector with every absorber removed.
    pub fn without_absorbers(&self) -> QVector {
        QVector { absorber_qs: Vec::new(), detector_q: self.detector_q }
    }

    pub fn absorber_qs(&self) -> &[f64] {
        &self.absorber_qs
    }

    pub fn detector_q(&self) -> f64 {
        self.detector_q
    }

    pub fn absorber_count(&self) -> usize {
        self.absorber_qs.len()
    }
}

/// `base^exp` for unsigned exponents of any magnitude.
fn pow_u32(base: f64, exp: u32) -> f64 {
    if exp <= i32::MAX as u32 {
        base.powi(exp as i32)
    } else {
        base.powf(f64::from(exp))
    }
}

/// Probability a single photon arrives at surface `n` (1-based; `n = A + 1`
/// addresses the detector): `prod_{j < n} (1 - q_j)`.
pub fn reach_probability(qv: &QVector, n: usize) -> Result<f64, AnalyticError> {
    let max = qv.absorber_count() + 1;
    if n == 0 || n > max {
        return Err(AnalyticError::IndexOutOfRange { index: n, max });
    }
    Ok(qv.absorber_qs[..n - 1].iter().map(|q| 1.0 - q).product())
}

/// Probability shell `n` (1-based) captures the photon: `reach(n) * q_n`.
pub fn absorb_probability(qv: &QVector, n: usize) -> Result<f64, AnalyticError> {
    let max = qv.absorber_count();
    if n == 0 || n > max {
        return Err(AnalyticError::IndexOutOfRange { index: n, max });
    }
    Ok(reach_probability(qv, n)? * qv.absorber_qs[n - 1])
}

/// Capture probability of every shell in one inner-to-outer pass; entry `i`
/// equals `absorb_probability(qv, i + 1)`.
pub fn absorb_probabilities(qv: &QVector) -> Vec<f64> {
    let mut reach = 1.0;
    qv.absorber_qs
        .iter()
        .map(|&q| {
            let absorbed = reach * q;
            reach *= 1.0 - q;
            absorbed
        })
        .collect()
}

/// Single-photon detection probability, product form:
/// `q_D * prod_j (1 - q_j)`.
pub fn detect_probability(qv: &QVector) -> f64 {
    qv.absorber_qs.iter().map(|q| 1.0 - q).product::<f64>() * qv.detector_q
}

/// Single-photon detection probability by the running-sum route: subtract
/// each shell's capture probability from the remaining mass, then apply
/// `q_D` to what is left. Algebraically identical to [`detect_probability`];
/// kept as an independently computed cross-check.
pub fn detect_probability_recurrent(qv: &QVector) -> f64 {
    let mut absorbed_total = 0.0;
    for &q in &qv.absorber_qs {
        absorbed_total += (1.0 - absorbed_total) * q;
    }
    (1.0 - absorbed_total) * qv.detector_q
}

/// Probability that all `k` photons of a separate stream are detected:
/// `detect^k`.
pub fn all_k_detect(qv: &QVector, k: u32) -> f64 {
    assert!(k >= 1, "photon count k must be at least 1");
    pow_u32(detect_probability(qv), k)
}

/// A probability mass function over detected-photon counts `0..=support_max`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountDistribution {
    probabilities: Vec<f64>,
}

impl CountDistribution {
    /// Wrap an explicit pmf; entries must lie in `[0, 1]` and sum to 1
    /// within `1e-9`.
    pub fn new(probabilities: Vec<f64>) -> Result<Self, AnalyticError> {
        if probabilities.is_empty() {
            return Err(AnalyticError::InvalidDistribution { sum: 0.0 });
        }
        for (index, &value) in probabilities.iter().enumerate() {
            if !value.is_finite() || !(0.0..=1.0).contains(&value) {
                return Err(AnalyticError::EntryOutOfRange { index, value });
            }
        }
        let sum: f64 = probabilities.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(AnalyticError::InvalidDistribution { sum });
        }
        Ok(CountDistribution { probabilities })
    }

    /// Largest count with an explicit cell (the photon count `K` for the
    /// distributions built here).
    pub fn support_max(&self) -> u32 {
        (self.probabilities.len() - 1) as u32
    }

    /// `P(count = m)`; zero beyond the support.
    pub fn pmf(&self, m: u32) -> f64 {
        self.probabilities.get(m as usize).copied().unwrap_or(0.0)
    }

    /// `P(count >= m)`, summed smallest cells first to limit rounding.
    pub fn tail_at_least(&self, m: u32) -> f64 {
        if m == 0 {
            return 1.0;
        }
        let start = m as usize;
        if start >= self.probabilities.len() {
            return 0.0;
        }
        self.probabilities[start..].iter().rev().sum()
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }
}

/// `Binomial(k, p)` pmf over `0..=k`.
///
/// The common path anchors a multiplicative recurrence at `m = 0`; when
/// `(1 - p)^k` would underflow the pmf is built cell by cell in log space,
/// so means and tails stay accurate for `k` up to millions.
fn binomial_pmf_vec(p: f64, k: u32) -> Vec<f64> {
    let cells = k as usize + 1;
    if p <= 0.0 {
        let mut pmf = vec![0.0; cells];
        pmf[0] = 1.0;
        return pmf;
    }
    if p >= 1.0 {
        let mut pmf = vec![0.0; cells];
        pmf[cells - 1] = 1.0;
        return pmf;
    }
    let q = 1.0 - p;
    let log_qk = f64::from(k) * q.ln();
    let mut pmf = vec![0.0; cells];
    if log_qk > -700.0 {
        pmf[0] = log_qk.exp();
        let ratio = p / q;
        for m in 1..cells {
            pmf[m] = pmf[m - 1] * ((cells - m) as f64 / m as f64) * ratio;
        }
    } else {
        // ln C(k, m) accumulated incrementally; cells below exp(-745) flush
        // to zero, which is already far under every tolerance in use.
        let lp = p.ln();
        let lq = q.ln();
        let mut ln_choose = 0.0;
        for (m, cell) in pmf.iter_mut().enumerate() {
            let ln_pmf = ln_choose + m as f64 * lp + (k as f64 - m as f64) * lq;
            *cell = ln_pmf.exp();
            ln_choose += ((k as f64 - m as f64) / (m as f64 + 1.0)).ln();
        }
    }
    pmf
}

/// `P(Binomial(k, p) >= m)`, summed from the top cell down.
pub fn binomial_tail_at_least(p: f64, k: u32, m: u32) -> f64 {
    if m == 0 {
        return 1.0;
    }
    if m > k {
        return 0.0;
    }
    binomial_pmf_vec(p, k)[m as usize..].iter().rev().sum()
}

/// Detected-count distribution for a separate stream of `k` photons, each
/// detected independently with probability `p_detect`: `Binomial(k, p_detect)`.
pub fn m_of_k_distribution(p_detect: f64, k: u32) -> CountDistribution {
    assert!(
        p_detect.is_finite() && (0.0..=1.0).contains(&p_detect),
        "detection probability must lie in [0, 1], got {p_detect}"
    );
    assert!(k >= 1, "photon count k must be at least 1");
    CountDistribution { probabilities: binomial_pmf_vec(p_detect, k) }
}

/// Bunch sizes that can arrive at the detector, with the hard floor
/// `max(0, K - A)` below which no probability mass can sit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurvivorDistribution {
    probabilities: Vec<f64>,
    floor: u32,
}

impl SurvivorDistribution {
    /// `P(survivors = s)`; zero beyond the support.
    pub fn probability(&self, s: u32) -> f64 {
        self.probabilities.get(s as usize).copied().unwrap_or(0.0)
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    /// `max(0, K - A)`: the minimum number of photons that always survive.
    pub fn floor(&self) -> u32 {
        self.floor
    }

    /// The emitted bunch size `K`.
    pub fn support_max(&self) -> u32 {
        (self.probabilities.len() - 1) as u32
    }
}

/// Distribution of the bunch size arriving at the detector when `k` photons
/// run the chain together.
///
/// Each shell captures at most one photon: a bunch of `s` passes untouched
/// with probability `(1 - q_j)^s` and loses exactly one photon otherwise.
/// One dynamic-programming pass per shell propagates the size distribution;
/// cost is `O(A * K)`.
pub fn bunched_survivor_distribution(qv: &QVector, k: u32) -> SurvivorDistribution {
    assert!(k >= 1, "photon count k must be at least 1");
    let cells = k as usize + 1;
    let mut probabilities = vec![0.0; cells];
    probabilities[cells - 1] = 1.0;
    for &q in &qv.absorber_qs {
        let pass = 1.0 - q;
        let mut next = vec![0.0; cells];
        for (s, &mass) in probabilities.iter().enumerate() {
            if mass == 0.0 {
                continue;
            }
            // powi keeps dyadic q (0.5, 0.25, ...) exact and loses less than
            // exp(s * ln pass) when the bunch is large.
            let stay = pow_u32(pass, s as u32);
            next[s] += mass * stay;
            if s > 0 {
                next[s - 1] += mass * (1.0 - stay);
            }
        }
        probabilities = next;
    }
    let floor = k.saturating_sub(qv.absorber_count().min(u32::MAX as usize) as u32);
    SurvivorDistribution { probabilities, floor }
}

/// `P(at least m detector clicks)` for a bunched emission of `k` photons:
/// survivors are thinned independently with probability `q_D`, so the tail
/// is a survivor-weighted mixture of binomial tails.
pub fn bunched_detect_at_least(qv: &QVector, k: u32, m: u32) -> Result<f64, AnalyticError> {
    if m > k {
        return Err(AnalyticError::EventExceedsPhotons { m, k });
    }
    if m == 0 {
        return Ok(1.0);
    }
    let survivors = bunched_survivor_distribution(qv, k);
    let q_d = qv.detector_q();
    let mut tail = 0.0;
    for (s, &mass) in survivors.probabilities().iter().enumerate() {
        if mass == 0.0 {
            continue;
        }
        tail += mass * binomial_tail_at_least(q_d, s as u32, m);
    }
    Ok(tail)
}

/// Full detected-count distribution for a bunched emission: the mixture
/// `P(count = m) = sum_s P(survivors = s) * Binomial(s, q_D)(m)`.
pub fn bunched_detected_distribution(qv: &QVector, k: u32) -> CountDistribution {
    let survivors = bunched_survivor_distribution(qv, k);
    let q_d = qv.detector_q();
    let mut probabilities = vec![0.0; k as usize + 1];
    for (s, &mass) in survivors.probabilities().iter().enumerate() {
        if mass == 0.0 {
            continue;
        }
        for (m, &cell) in binomial_pmf_vec(q_d, s as u32).iter().enumerate() {
            probabilities[m] += mass * cell;
        }
    }
    CountDistribution { probabilities }
}

/// Side-by-side tail probabilities for the event "at least `M` detected"
/// with `M = max(1, K - A)`, plus the ordering verdict.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityVerdict {
    pub photons_k: u32,
    /// The compared event count `M = max(1, K - A)`.
    pub event_m: u32,
    /// `P(>= M)` for a separate stream of `K` photons.
    pub p_separate: f64,
    /// `P(>= M)` for a bunch of `K` photons.
    pub p_bunched: f64,
    /// `P(>= M)` with every absorber removed.
    pub p_vacuum: f64,
    /// `q_D^M`, a strict lower bound on `p_bunched` when `K > A`.
    pub vacuum_power_bound: f64,
    /// Whether `p_separate < p_bunched <= p_vacuum` and
    /// `p_bunched > vacuum_power_bound` hold with strict margins beyond
    /// [`COMPARISON_TOLERANCE`].
    pub ordering_holds: bool,
    /// True when every shell has `q_j = 0`; the three probabilities then
    /// coincide and no strict ordering exists.
    pub degenerate_vacuum: bool,
}

/// Evaluate the bunching inequalities for `k` photons over `qv`.
pub fn inequality_report(qv: &QVector, k: u32) -> InequalityVerdict {
    assert!(k >= 1, "photon count k must be at least 1");
    let absorbers = qv.absorber_count().min(u32::MAX as usize) as u32;
    let event_m = k.saturating_sub(absorbers).max(1);
    let p_detect = detect_probability(qv);
    let p_separate = binomial_tail_at_least(p_detect, k, event_m);
    let p_bunched = bunched_detect_at_least(qv, k, event_m)
        .expect("event_m <= k by construction");
    let p_vacuum = binomial_tail_at_least(qv.detector_q(), k, event_m);
    let vacuum_power_bound = pow_u32(qv.detector_q(), event_m);
    let degenerate_vacuum = qv.absorber_qs().iter().all(|&q| q == 0.0);
    let ordering_holds = !degenerate_vacuum
        && p_bunched - p_separate > COMPARISON_TOLERANCE
        && p_bunched <= p_vacuum + COMPARISON_TOLERANCE
        && p_bunched - vacuum_power_bound > COMPARISON_TOLERANCE;
    InequalityVerdict {
        photons_k: k,
        event_m,
        p_separate,
        p_bunched,
        p_vacuum,
        vacuum_power_bound,
        ordering_holds,
        degenerate_vacuum,
    }
}
