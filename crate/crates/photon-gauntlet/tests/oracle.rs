//! Exact-arithmetic enumeration against the closed forms.
//!
//! Chains over dyadic probabilities (0.5, 0.25, ...) stay exact through both
//! the rational arithmetic and the `f64` closed forms, so those tests assert
//! literal equality; chains involving 0.1 carry the binary value of the
//! double `0.1` through exactly and are compared at tolerance instead.

use num::{BigInt, BigRational, One, Zero};
use photon_gauntlet::analytic::QVector;
use photon_gauntlet::oracle::{
    cross_check, enumerate_bunched, enumerate_separate, photon_fates, rational, rational_to_f64,
    OracleError, MAX_BUNCHED_ABSORBERS, MAX_ORACLE_PHOTONS, MAX_SEPARATE_ABSORBERS,
};

const TOL: f64 = 1E-12;

fn ratio(numer: i64, denom: i64) -> BigRational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

fn worked_chain() -> QVector {
    QVector::new(vec![0.5, 0.25], 0.1).unwrap()
}

#[test]
fn fates_for_dyadic_chain_are_exact() {
    let qv = QVector::new(vec![0.5, 0.25], 0.5).unwrap();
    let fates = photon_fates(&qv);
    assert_eq!(fates.absorb, vec![ratio(1, 2), ratio(1, 8)]);
    assert_eq!(fates.detect, ratio(3, 16));
    assert_eq!(fates.escape, ratio(3, 16));
}

#[test]
fn fates_conserve_probability_exactly() {
    // 0.1 is not dyadic; the identity still holds in exact arithmetic on
    // the binary values actually stored.
    let qv = QVector::new(vec![0.1, 0.37, 0.925], 0.63).unwrap();
    let fates = photon_fates(&qv);
    let total: BigRational =
        fates.absorb.iter().fold(fates.detect + &fates.escape, |acc, a| acc + a);
    assert!(total.is_one());
    assert_eq!(fates.absorb[0], rational(0.1));
}

#[test]
fn separate_enumeration_is_exact_for_dyadic_chain() {
    // p_detect = 3/16 over k = 2 photons.
    let qv = QVector::new(vec![0.5, 0.25], 0.5).unwrap();
    let dist = enumerate_separate(&qv, 2).unwrap();
    assert_eq!(dist.probability(0), ratio(169, 256));
    assert_eq!(dist.probability(1), ratio(78, 256));
    assert_eq!(dist.probability(2), ratio(9, 256));
    assert!(dist.total().is_one());
    assert_eq!(dist.tail_at_least(1), ratio(87, 256));
}

#[test]
fn separate_enumeration_matches_worked_values() {
    let dist = enumerate_separate(&worked_chain(), 3).unwrap();
    let expected = [0.891666015625, 0.104220703125, 0.004060546875, 5.2734375E-5];
    for (m, want) in expected.iter().enumerate() {
        let got = rational_to_f64(&dist.probability(m as u32));
        assert!((got - want).abs() <= TOL, "pmf({m}) = {got} want {want}");
    }
    assert!(dist.total().is_one());
}

#[test]
fn bunched_enumeration_matches_hand_walk() {
    let bunched = enumerate_bunched(&worked_chain(), 3).unwrap();
    assert_eq!(bunched.floor, 1);
    assert_eq!(bunched.survivors.probability(0), BigRational::zero());
    assert_eq!(bunched.survivors.probability(1), ratio(49, 128));
    assert_eq!(bunched.survivors.probability(2), ratio(289, 512));
    assert_eq!(bunched.survivors.probability(3), ratio(27, 512));
    assert!(bunched.survivors.total().is_one());
    assert!(bunched.detected.total().is_one());
    assert_eq!(
        bunched.survivors.to_f64_vec(),
        vec![0.0, 0.3828125, 0.564453125, 0.052734375]
    );
    let p_bunched = rational_to_f64(&bunched.detected.tail_at_least(1));
    assert!((p_bunched - 0.159818359375).abs() <= TOL);
}

#[test]
fn detector_thinning_mixes_survivor_convolutions() {
    // One shell at q = 1/2, bunch of 2, detector q = 1/2: survivors are
    // {1: 3/4, 2: 1/4} and the detected counts follow exactly.
    let qv = QVector::new(vec![0.5], 0.5).unwrap();
    let bunched = enumerate_bunched(&qv, 2).unwrap();
    assert_eq!(bunched.survivors.probability(1), ratio(3, 4));
    assert_eq!(bunched.survivors.probability(2), ratio(1, 4));
    assert_eq!(bunched.detected.probability(0), ratio(7, 16));
    assert_eq!(bunched.detected.probability(1), ratio(8, 16));
    assert_eq!(bunched.detected.probability(2), ratio(1, 16));
}

#[test]
fn guards_reject_oversized_instances() {
    let qv = QVector::new(vec![0.5; 4], 0.5).unwrap();
    assert!(matches!(
        enumerate_separate(&qv, MAX_ORACLE_PHOTONS + 1),
        Err(OracleError::InstanceTooLarge { .. })
    ));
    assert!(matches!(
        enumerate_separate(&qv, 0),
        Err(OracleError::InstanceTooLarge { .. })
    ));

    let wide = QVector::new(vec![0.5; MAX_SEPARATE_ABSORBERS + 1], 0.5).unwrap();
    assert!(matches!(
        enumerate_separate(&wide, 2),
        Err(OracleError::InstanceTooLarge { .. })
    ));
    let at_limit = QVector::new(vec![0.5; MAX_SEPARATE_ABSORBERS], 0.5).unwrap();
    assert!(enumerate_separate(&at_limit, 2).is_ok());

    let wide = QVector::new(vec![0.5; MAX_BUNCHED_ABSORBERS + 1], 0.5).unwrap();
    assert!(matches!(
        enumerate_bunched(&wide, 2),
        Err(OracleError::InstanceTooLarge { .. })
    ));
    let at_limit = QVector::new(vec![0.5; MAX_BUNCHED_ABSORBERS], 0.5).unwrap();
    assert!(enumerate_bunched(&at_limit, 2).is_ok());
}

#[test]
fn rational_round_trips_doubles_exactly() {
    for x in [0.1, 5.2734375E-5, 1E-300, -2.5, 0.0, 1.0] {
        assert_eq!(rational_to_f64(&rational(x)), x, "round trip of {x}");
    }
}

#[test]
fn rational_to_f64_handles_extreme_ratios() {
    // Thirds are not representable; conversion lands within an ulp.
    assert!((rational_to_f64(&ratio(1, 3)) - 1.0 / 3.0).abs() <= 1E-15);
    assert!((rational_to_f64(&ratio(-1, 3)) + 1.0 / 3.0).abs() <= 1E-15);

    // Parts far beyond f64 range still divide out to a sane quotient.
    let huge = BigInt::from(10).pow(50);
    let near_one = BigRational::new(&huge + BigInt::from(1), huge.clone());
    assert!((rational_to_f64(&near_one) - 1.0).abs() <= TOL);

    // Underflow collapses to zero instead of panicking.
    let tiny = BigRational::new(BigInt::from(1), BigInt::from(10).pow(400));
    assert_eq!(rational_to_f64(&tiny), 0.0);

    assert_eq!(rational_to_f64(&BigRational::zero()), 0.0);
}

#[test]
fn cross_check_passes_on_worked_instance() {
    let check = cross_check(&worked_chain(), 3, TOL).unwrap();
    assert!(check.pass, "max deviation {}", check.max_abs_deviation);
    assert!(check.max_abs_deviation <= 1E-15);
    assert!(check.ordering_holds_exact);
    assert!(check.analytic_ordering_holds);
    assert!(!check.degenerate_vacuum);
    assert_eq!(check.event_m, 1);
    assert!((check.p_separate - 0.108333984375).abs() <= TOL);
    assert!((check.p_bunched - 0.159818359375).abs() <= TOL);
    assert!((check.p_vacuum - 0.271).abs() <= TOL);
    assert!((check.vacuum_power_bound - 0.1).abs() <= TOL);
}

#[test]
fn cross_check_sees_single_photon_identity() {
    // One photon: the disciplines coincide, so the strict ordering cannot
    // hold, yet every closed form still matches enumeration.
    let check = cross_check(&worked_chain(), 1, TOL).unwrap();
    assert!(check.pass);
    assert!(!check.ordering_holds_exact);
    assert!(!check.analytic_ordering_holds);
    assert_eq!(check.p_separate, check.p_bunched);
}

#[test]
fn cross_check_flags_degenerate_vacuum() {
    let qv = QVector::new(vec![0.0, 0.0], 0.3).unwrap();
    let check = cross_check(&qv, 2, TOL).unwrap();
    assert!(check.degenerate_vacuum);
    assert!(!check.ordering_holds_exact);
    assert!(check.pass);
    assert_eq!(check.p_bunched, check.p_vacuum);
}
