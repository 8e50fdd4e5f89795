//! Exact reference results by exhaustive enumeration in rational arithmetic.
//!
//! Everything here recomputes what [`crate::analytic`] produces in `f64`,
//! but over `BigRational` and by a different route, so the two sides share
//! no arithmetic shortcuts:
//!
//! * single-photon fates come from a running subtraction of capture mass,
//!   not the product form;
//! * separate-stream counts come from repeated Bernoulli convolution, not
//!   the closed-form binomial pmf;
//! * bunched survivor counts come from walking all `2^A` capture/no-capture
//!   shell histories, not the size-indexed dynamic program.
//!
//! Inputs are doubles, converted exactly (every finite `f64` is a ratio of
//! integers), so a deviation between oracle and closed form measures pure
//! floating-point error in the closed form. Enumeration cost grows fast;
//! instances beyond the documented guards are rejected with
//! [`OracleError::InstanceTooLarge`] rather than attempted.

use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::analytic::{self, QVector};

/// Largest photon count accepted by the enumerations.
pub const MAX_ORACLE_PHOTONS: u32 = 12;
/// Largest shell count accepted by [`enumerate_separate`].
pub const MAX_SEPARATE_ABSORBERS: usize = 8;
/// Largest shell count accepted by [`enumerate_bunched`] (the walk visits
/// `2^A` histories).
pub const MAX_BUNCHED_ABSORBERS: usize = 16;

/// Instance rejected by the enumeration guards.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OracleError {
    #[error(
        "instance too large for exact enumeration: k = {k} (max {max_k}), \
         {absorbers} absorbers (max {max_absorbers})"
    )]
    InstanceTooLarge {
        k: u32,
        absorbers: usize,
        max_k: u32,
        max_absorbers: usize,
    },
}

/// The exact value of a finite double.
pub fn rational(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite value")
}

/// Round an exact rational to the nearest double without overflowing the
/// conversion: numerator and denominator are truncated to 63 bits and the
/// quotient rescaled, so values whose parts exceed `f64` range (common after
/// long exact products) still convert with sub-ulp error.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    let numer_bits = r.numer().magnitude().bits();
    let denom_bits = r.denom().magnitude().bits();
    let numer_shift = numer_bits.saturating_sub(63);
    let denom_shift = denom_bits.saturating_sub(63);
    let numer = (r.numer().magnitude() >> numer_shift)
        .to_f64()
        .expect("63-bit magnitude converts");
    let denom = (r.denom().magnitude() >> denom_shift)
        .to_f64()
        .expect("63-bit magnitude converts");
    let scale = 2.0_f64.powi((numer_shift as i64 - denom_shift as i64) as i32);
    let magnitude = numer / denom * scale;
    if r.is_negative() {
        -magnitude
    } else {
        magnitude
    }
}

fn rational_pow(base: &BigRational, exp: u32) -> BigRational {
    base.pow(exp as i32)
}

/// A pmf over counts `0..=support_max` in exact arithmetic.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactDistribution {
    probabilities: Vec<BigRational>,
}

impl ExactDistribution {
    pub fn support_max(&self) -> u32 {
        (self.probabilities.len() - 1) as u32
    }

    /// `P(count = m)`; zero beyond the support.
    pub fn probability(&self, m: u32) -> BigRational {
        self.probabilities
            .get(m as usize)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn probabilities(&self) -> &[BigRational] {
        &self.probabilities
    }

    /// `P(count >= m)`, exact.
    pub fn tail_at_least(&self, m: u32) -> BigRational {
        self.probabilities
            .iter()
            .skip(m as usize)
            .fold(BigRational::zero(), |acc, p| acc + p)
    }

    /// Exact total mass; `1` for every distribution built here.
    pub fn total(&self) -> BigRational {
        self.tail_at_least(0)
    }

    pub fn to_f64_vec(&self) -> Vec<f64> {
        self.probabilities.iter().map(rational_to_f64).collect()
    }
}

/// Exact single-photon outcome probabilities: capture per shell, detection,
/// and escape past the detector.
#[derive(Debug, Clone, PartialEq)]
pub struct PhotonFates {
    /// `absorb[j]` is the probability shell `j + 1` takes the photon.
    pub absorb: Vec<BigRational>,
    pub detect: BigRational,
    /// Photon crosses every surface uncaptured and undetected.
    pub escape: BigRational,
}

/// Walk the chain once, peeling capture mass off a running remainder.
pub fn photon_fates(qv: &QVector) -> PhotonFates {
    let mut remaining = BigRational::one();
    let mut absorb = Vec::with_capacity(qv.absorber_count());
    for &q in qv.absorber_qs() {
        let captured = &remaining * rational(q);
        remaining -= &captured;
        absorb.push(captured);
    }
    let detect = &remaining * rational(qv.detector_q());
    let escape = remaining - &detect;
    PhotonFates { absorb, detect, escape }
}

/// `n` independent Bernoulli(`p`) trials convolved into a count pmf.
fn bernoulli_convolution(p: &BigRational, n: u32) -> Vec<BigRational> {
    let pass = BigRational::one() - p;
    let mut pmf = vec![BigRational::one()];
    for _ in 0..n {
        let mut next = vec![BigRational::zero(); pmf.len() + 1];
        for (m, mass) in pmf.iter().enumerate() {
            next[m] += mass * &pass;
            next[m + 1] += mass * p;
        }
        pmf = next;
    }
    pmf
}

fn guard(k: u32, absorbers: usize, max_absorbers: usize) -> Result<(), OracleError> {
    if k == 0 || k > MAX_ORACLE_PHOTONS || absorbers > max_absorbers {
        return Err(OracleError::InstanceTooLarge {
            k,
            absorbers,
            max_k: MAX_ORACLE_PHOTONS,
            max_absorbers,
        });
    }
    Ok(())
}

/// Exact detected-count distribution for a separate stream of `k` photons:
/// each photon's detection probability comes from [`photon_fates`], and the
/// count pmf from convolving `k` Bernoulli trials.
pub fn enumerate_separate(qv: &QVector, k: u32) -> Result<ExactDistribution, OracleError> {
    guard(k, qv.absorber_count(), MAX_SEPARATE_ABSORBERS)?;
    let fates = photon_fates(qv);
    Ok(ExactDistribution { probabilities: bernoulli_convolution(&fates.detect, k) })
}

/// Exact survivor and detected-count distributions for one bunch.
#[derive(Debug, Clone, PartialEq)]
pub struct BunchedEnumeration {
    pub survivors: ExactDistribution,
    pub detected: ExactDistribution,
    /// `max(0, K - A)`; no survivor mass can sit below it.
    pub floor: u32,
}

fn walk_histories(
    shell_qs: &[BigRational],
    survivors: u32,
    weight: BigRational,
    marginal: &mut [BigRational],
) {
    let Some((q, rest)) = shell_qs.split_first() else {
        marginal[survivors as usize] += weight;
        return;
    };
    let stay_all = rational_pow(&(BigRational::one() - q), survivors);
    let captured = BigRational::one() - &stay_all;
    if !captured.is_zero() && survivors > 0 {
        walk_histories(rest, survivors - 1, &weight * captured, marginal);
    }
    if !stay_all.is_zero() {
        walk_histories(rest, survivors, weight * stay_all, marginal);
    }
}

/// Exact bunched statistics for `k` photons, by enumerating all `2^A`
/// capture/no-capture shell histories and convolving each terminal bunch
/// size with the detector's Bernoulli response.
pub fn enumerate_bunched(qv: &QVector, k: u32) -> Result<BunchedEnumeration, OracleError> {
    guard(k, qv.absorber_count(), MAX_BUNCHED_ABSORBERS)?;
    let shell_qs: Vec<BigRational> = qv.absorber_qs().iter().map(|&q| rational(q)).collect();
    let mut marginal = vec![BigRational::zero(); k as usize + 1];
    walk_histories(&shell_qs, k, BigRational::one(), &mut marginal);

    let detector_q = rational(qv.detector_q());
    let mut detected = vec![BigRational::zero(); k as usize + 1];
    for (s, mass) in marginal.iter().enumerate() {
        if mass.is_zero() {
            continue;
        }
        for (m, cell) in bernoulli_convolution(&detector_q, s as u32).iter().enumerate() {
            detected[m] += mass * cell;
        }
    }

    let floor = k.saturating_sub(qv.absorber_count().min(u32::MAX as usize) as u32);
    Ok(BunchedEnumeration {
        survivors: ExactDistribution { probabilities: marginal },
        detected: ExactDistribution { probabilities: detected },
        floor,
    })
}

fn max_abs_deviation(exact: &[BigRational], approx: &[f64]) -> f64 {
    debug_assert_eq!(exact.len(), approx.len());
    exact
        .iter()
        .zip(approx)
        .map(|(e, &a)| rational_to_f64(&(rational(a) - e).abs()))
        .fold(0.0, f64::max)
}

fn abs_deviation(exact: &BigRational, approx: f64) -> f64 {
    rational_to_f64(&(rational(approx) - exact).abs())
}

/// Worst absolute gaps between the closed forms and exact enumeration, one
/// per quantity family, plus the inequality verdict evaluated with exact
/// comparisons.
#[derive(Debug, Clone, Serialize)]
pub struct CrossCheck {
    pub photons_k: u32,
    pub event_m: u32,
    /// Deviation threshold the check was run with.
    pub tol: f64,
    /// Per-shell capture and detection probabilities, both closed-form routes.
    pub fate_deviation: f64,
    /// Separate-stream detected-count pmf cells.
    pub separate_deviation: f64,
    /// Bunched survivor pmf cells.
    pub survivor_deviation: f64,
    /// Bunched detected-count pmf cells.
    pub detected_deviation: f64,
    /// The four inequality-verdict probabilities.
    pub inequality_deviation: f64,
    pub max_abs_deviation: f64,
    /// True when `max_abs_deviation <= tol`.
    pub pass: bool,
    /// Ordering chain decided by exact rational comparison.
    pub ordering_holds_exact: bool,
    /// Ordering flag the `f64` verdict reported (margin-gated, so it may
    /// lag the exact flag when a gap is thinner than the margin).
    pub analytic_ordering_holds: bool,
    pub degenerate_vacuum: bool,
    pub p_separate: f64,
    pub p_bunched: f64,
    pub p_vacuum: f64,
    pub vacuum_power_bound: f64,
}

/// Recompute every closed-form quantity exactly and report the worst
/// absolute deviations, with `pass = (max deviation <= tol)`.
pub fn cross_check(qv: &QVector, k: u32, tol: f64) -> Result<CrossCheck, OracleError> {
    let fates = photon_fates(qv);
    let separate = enumerate_separate(qv, k)?;
    let bunched = enumerate_bunched(qv, k)?;

    let fate_deviation = max_abs_deviation(&fates.absorb, &analytic::absorb_probabilities(qv))
        .max(abs_deviation(&fates.detect, analytic::detect_probability(qv)))
        .max(abs_deviation(&fates.detect, analytic::detect_probability_recurrent(qv)));

    let p_detect = analytic::detect_probability(qv);
    let separate_deviation = max_abs_deviation(
        separate.probabilities(),
        analytic::m_of_k_distribution(p_detect, k).probabilities(),
    );
    let survivor_deviation = max_abs_deviation(
        bunched.survivors.probabilities(),
        analytic::bunched_survivor_distribution(qv, k).probabilities(),
    );
    let detected_deviation = max_abs_deviation(
        bunched.detected.probabilities(),
        analytic::bunched_detected_distribution(qv, k).probabilities(),
    );

    let verdict = analytic::inequality_report(qv, k);
    let event_m = verdict.event_m;
    let p_separate = separate.tail_at_least(event_m);
    let p_bunched = bunched.detected.tail_at_least(event_m);
    let p_vacuum = ExactDistribution {
        probabilities: bernoulli_convolution(&rational(qv.detector_q()), k),
    }
    .tail_at_least(event_m);
    let vacuum_power_bound = rational_pow(&rational(qv.detector_q()), event_m);

    let inequality_deviation = abs_deviation(&p_separate, verdict.p_separate)
        .max(abs_deviation(&p_bunched, verdict.p_bunched))
        .max(abs_deviation(&p_vacuum, verdict.p_vacuum))
        .max(abs_deviation(&vacuum_power_bound, verdict.vacuum_power_bound));

    let degenerate_vacuum = qv.absorber_qs().iter().all(|&q| q == 0.0);
    let ordering_holds_exact = !degenerate_vacuum
        && p_separate < p_bunched
        && p_bunched <= p_vacuum
        && p_bunched > vacuum_power_bound;

    let max_dev = fate_deviation
        .max(separate_deviation)
        .max(survivor_deviation)
        .max(detected_deviation)
        .max(inequality_deviation);

    Ok(CrossCheck {
        photons_k: k,
        event_m,
        tol,
        fate_deviation,
        separate_deviation,
        survivor_deviation,
        detected_deviation,
        inequality_deviation,
        max_abs_deviation: max_dev,
        pass: max_dev <= tol,
        ordering_holds_exact,
        analytic_ordering_holds: verdict.ordering_holds,
        degenerate_vacuum,
        p_separate: rational_to_f64(&p_separate),
        p_bunched: rational_to_f64(&p_bunched),
        p_vacuum: rational_to_f64(&p_vacuum),
        vacuum_power_bound: rational_to_f64(&vacuum_power_bound),
    })
}
