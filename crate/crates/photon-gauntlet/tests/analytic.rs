//! Closed-form chain probabilities against hand-computed references.
//!
//! The worked chain throughout is q = (0.5, 0.25) with q_D = 0.1: reach
//! probabilities 1, 1/2, 3/8; absorb probabilities 1/2, 1/8; single-photon
//! detect probability 3/80.

use photon_gauntlet::analytic::{
    absorb_probabilities, absorb_probability, all_k_detect, binomial_tail_at_least,
    bunched_detect_at_least, bunched_detected_distribution, bunched_survivor_distribution,
    detect_probability, detect_probability_recurrent, inequality_report, m_of_k_distribution,
    reach_probability, AnalyticError, CountDistribution, QVector,
};

const TOL: f64 = 1E-12;

fn worked_chain() -> QVector {
    QVector::new(vec![0.5, 0.25], 0.1).unwrap()
}

#[test]
fn reach_decays_by_survival_products() {
    let qv = worked_chain();
    assert_eq!(reach_probability(&qv, 1).unwrap(), 1.0);
    assert_eq!(reach_probability(&qv, 2).unwrap(), 0.5);
    // n = A + 1 addresses the detector surface.
    assert_eq!(reach_probability(&qv, 3).unwrap(), 0.375);
    assert!(matches!(
        reach_probability(&qv, 0),
        Err(AnalyticError::IndexOutOfRange { .. })
    ));
    assert!(matches!(
        reach_probability(&qv, 4),
        Err(AnalyticError::IndexOutOfRange { .. })
    ));
}

#[test]
fn absorb_splits_reach_by_local_q() {
    let qv = worked_chain();
    assert_eq!(absorb_probability(&qv, 1).unwrap(), 0.5);
    assert_eq!(absorb_probability(&qv, 2).unwrap(), 0.125);
    assert_eq!(absorb_probabilities(&qv), vec![0.5, 0.125]);
    assert!(matches!(
        absorb_probability(&qv, 3),
        Err(AnalyticError::IndexOutOfRange { .. })
    ));
}

#[test]
fn detect_probability_matches_hand_value() {
    let qv = worked_chain();
    assert!((detect_probability(&qv) - 0.0375).abs() <= TOL);
}

#[test]
fn recurrent_and_product_routes_agree() {
    let qv = worked_chain();
    assert!((detect_probability(&qv) - detect_probability_recurrent(&qv)).abs() <= TOL);

    // A longer, less tidy chain.
    let qv = QVector::new(vec![0.13, 0.91, 0.002, 0.5, 0.77, 0.31], 0.095).unwrap();
    assert!((detect_probability(&qv) - detect_probability_recurrent(&qv)).abs() <= TOL);
}

#[test]
fn conservation_absorb_plus_reach_is_unity() {
    let qv = worked_chain();
    let absorbed: f64 = absorb_probabilities(&qv).iter().sum();
    let escaped = reach_probability(&qv, 3).unwrap();
    assert!((absorbed + escaped - 1.0).abs() <= TOL);
}

#[test]
fn detect_is_invariant_under_shell_reordering() {
    let forward = QVector::new(vec![0.5, 0.25], 0.1).unwrap();
    let reversed = QVector::new(vec![0.25, 0.5], 0.1).unwrap();
    assert!((detect_probability(&forward) - detect_probability(&reversed)).abs() <= TOL);
}

#[test]
fn survivor_distribution_depends_on_shell_order() {
    // Detection commutes across shells but the survivor distribution does
    // not: with two photons, meeting the strong absorber first changes how
    // often both are captured.
    let forward = QVector::new(vec![0.5, 0.25], 0.1).unwrap();
    let reversed = QVector::new(vec![0.25, 0.5], 0.1).unwrap();
    let f = bunched_survivor_distribution(&forward, 2);
    let r = bunched_survivor_distribution(&reversed, 2);
    assert_eq!(f.probability(0), 0.1875);
    assert_eq!(r.probability(0), 0.21875);
    assert_eq!(f.probability(2), r.probability(2));
}

#[test]
fn all_k_detect_is_detect_to_the_k() {
    let qv = worked_chain();
    assert!((all_k_detect(&qv, 1) - 0.0375).abs() <= TOL);
    assert!((all_k_detect(&qv, 3) - 5.2734375E-5).abs() <= TOL);
}

#[test]
fn single_photon_detect_never_reaches_bare_detector_probability() {
    // Any absorber strictly dims the detector: detect < q_D.
    let qv = worked_chain();
    assert!(detect_probability(&qv) < qv.detector_q() - TOL);

    let nearly_transparent = QVector::new(vec![1e-6], 0.9).unwrap();
    assert!(detect_probability(&nearly_transparent) < 0.9 - TOL);
}

#[test]
fn qvector_rejects_non_probabilities() {
    assert!(matches!(
        QVector::new(vec![0.5, 1.5], 0.1),
        Err(AnalyticError::AbsorberQOutOfRange { index: 2, .. })
    ));
    assert!(matches!(
        QVector::new(vec![f64::NAN], 0.1),
        Err(AnalyticError::AbsorberQOutOfRange { index: 1, .. })
    ));
    assert!(matches!(
        QVector::new(vec![], -0.1),
        Err(AnalyticError::DetectorQOutOfRange { .. })
    ));
    let qv = QVector::new(vec![0.3], 0.2).unwrap();
    let bare = qv.without_absorbers();
    assert!(bare.absorber_qs().is_empty());
    assert_eq!(bare.detector_q(), 0.2);
}

#[test]
fn separate_stream_counts_are_binomial() {
    // k = 2 photons, each detected with p = 3/80.
    let dist = m_of_k_distribution(detect_probability(&worked_chain()), 2);
    let expected = [0.92640625, 0.0721875, 0.00140625];
    for (m, want) in expected.iter().enumerate() {
        assert!(
            (dist.pmf(m as u32) - want).abs() <= TOL,
            "pmf({m}) = {} want {want}",
            dist.pmf(m as u32)
        );
    }
    assert!((dist.tail_at_least(0) - 1.0).abs() <= TOL);
    assert!((dist.tail_at_least(1) - 0.07359375).abs() <= TOL);
    assert_eq!(dist.tail_at_least(3), 0.0);
}

#[test]
fn binomial_point_masses_at_degenerate_p() {
    let zero = m_of_k_distribution(0.0, 4);
    assert_eq!(zero.pmf(0), 1.0);
    assert_eq!(zero.tail_at_least(1), 0.0);

    let one = m_of_k_distribution(1.0, 4);
    assert_eq!(one.pmf(4), 1.0);
    assert_eq!(one.tail_at_least(4), 1.0);
}

#[test]
fn binomial_stays_normalized_across_branch_switch() {
    // k ln(1 - p) crosses the log-space threshold near -700; exercise both
    // sides and the moments on each.
    for (k, p) in [(300u32, 0.9), (310u32, 0.9), (100_000u32, 1e-4), (2_000u32, 0.5)] {
        let dist = m_of_k_distribution(p, k);
        let sum: f64 = dist.probabilities().iter().sum();
        assert!((sum - 1.0).abs() <= 1E-9, "k={k} p={p} sum={sum}");
        let mean: f64 = dist
            .probabilities()
            .iter()
            .enumerate()
            .map(|(m, pr)| m as f64 * pr)
            .sum();
        let want = p * k as f64;
        assert!(
            (mean - want).abs() <= 1E-9 * want.max(1.0),
            "k={k} p={p} mean={mean} want={want}"
        );
    }
}

#[test]
fn binomial_tail_sums_smallest_terms_first() {
    // A far tail whose terms span many magnitudes still comes out positive
    // and finite rather than flushing to zero.
    let tail = binomial_tail_at_least(1e-3, 10_000, 40);
    assert!(tail > 0.0 && tail < 1e-8, "tail = {tail}");
    assert!((binomial_tail_at_least(0.5, 10, 0) - 1.0).abs() <= TOL);
}

#[test]
fn survivor_distribution_matches_hand_dp() {
    // Dyadic qs keep every DP step exact, so equality is literal.
    let qv = worked_chain();
    let survivors = bunched_survivor_distribution(&qv, 3);
    assert_eq!(survivors.probabilities(), &[0.0, 0.3828125, 0.564453125, 0.052734375]);
    assert_eq!(survivors.floor(), 1);
    assert_eq!(survivors.support_max(), 3);
    assert_eq!(survivors.probability(4), 0.0);
}

#[test]
fn survivor_floor_empties_low_cells() {
    // Perfect absorbers capture exactly one photon each.
    let qv = QVector::new(vec![1.0, 1.0, 1.0], 0.5).unwrap();
    let survivors = bunched_survivor_distribution(&qv, 5);
    assert_eq!(survivors.floor(), 2);
    assert_eq!(survivors.probabilities(), &[0.0, 0.0, 1.0, 0.0, 0.0, 0.0]);

    // More absorbers than photons: the floor rests at zero.
    let survivors = bunched_survivor_distribution(&qv, 2);
    assert_eq!(survivors.floor(), 0);
    assert_eq!(survivors.probabilities(), &[1.0, 0.0, 0.0]);
}

#[test]
fn vacuum_bunch_survives_untouched() {
    let qv = QVector::new(vec![], 0.3).unwrap();
    let survivors = bunched_survivor_distribution(&qv, 3);
    assert_eq!(survivors.probabilities(), &[0.0, 0.0, 0.0, 1.0]);
}

#[test]
fn bunched_detect_tail_matches_hand_values() {
    let qv = worked_chain();
    let p = bunched_detect_at_least(&qv, 3, 1).unwrap();
    assert!((p - 0.159818359375).abs() <= TOL);
    assert_eq!(bunched_detect_at_least(&qv, 3, 0).unwrap(), 1.0);
    assert!(matches!(
        bunched_detect_at_least(&qv, 3, 4),
        Err(AnalyticError::EventExceedsPhotons { m: 4, k: 3 })
    ));
}

#[test]
fn bunched_detected_distribution_matches_hand_mixture() {
    let qv = worked_chain();
    let dist = bunched_detected_distribution(&qv, 3);
    let expected = [0.840181640625, 0.152697265625, 0.007068359375, 5.2734375E-5];
    for (m, want) in expected.iter().enumerate() {
        assert!(
            (dist.pmf(m as u32) - want).abs() <= TOL,
            "pmf({m}) = {} want {want}",
            dist.pmf(m as u32)
        );
    }
    // The mixture tail and the direct tail are the same quantity.
    for m in 0..=3 {
        assert!(
            (dist.tail_at_least(m) - bunched_detect_at_least(&qv, 3, m).unwrap()).abs() <= TOL
        );
    }
}

#[test]
fn count_distribution_rejects_bad_mass() {
    assert!(matches!(
        CountDistribution::new(vec![]),
        Err(AnalyticError::InvalidDistribution { .. })
    ));
    assert!(matches!(
        CountDistribution::new(vec![0.5, 0.4]),
        Err(AnalyticError::InvalidDistribution { .. })
    ));
    assert!(matches!(
        CountDistribution::new(vec![1.2, -0.2]),
        Err(AnalyticError::EntryOutOfRange { .. })
    ));
    let ok = CountDistribution::new(vec![0.25, 0.75]).unwrap();
    assert_eq!(ok.support_max(), 1);
}

#[test]
fn inequality_report_reproduces_worked_instance() {
    let verdict = inequality_report(&worked_chain(), 3);
    assert_eq!(verdict.photons_k, 3);
    assert_eq!(verdict.event_m, 1);
    assert!((verdict.p_separate - 0.108333984375).abs() <= TOL);
    assert!((verdict.p_bunched - 0.159818359375).abs() <= TOL);
    assert!((verdict.p_vacuum - 0.271).abs() <= TOL);
    assert!((verdict.vacuum_power_bound - 0.1).abs() <= TOL);
    assert!(verdict.ordering_holds);
    assert!(!verdict.degenerate_vacuum);
}

#[test]
fn inequality_event_is_guaranteed_delivery_count() {
    // K > A pins the event at K - A; K <= A falls back to one photon.
    let qv = worked_chain();
    assert_eq!(inequality_report(&qv, 5).event_m, 3);
    assert_eq!(inequality_report(&qv, 2).event_m, 1);
    assert_eq!(inequality_report(&qv, 1).event_m, 1);
}

#[test]
fn single_photon_bunch_is_a_separate_stream() {
    // With one photon the two disciplines are the same process, so the
    // strict part of the ordering cannot hold.
    let verdict = inequality_report(&worked_chain(), 1);
    assert!((verdict.p_separate - verdict.p_bunched).abs() <= TOL);
    assert!(!verdict.ordering_holds);
}

#[test]
fn empty_chain_flags_degenerate_vacuum() {
    let qv = QVector::new(vec![], 0.3).unwrap();
    let verdict = inequality_report(&qv, 2);
    assert!(verdict.degenerate_vacuum);
    assert!(!verdict.ordering_holds);
    assert!((verdict.p_bunched - verdict.p_vacuum).abs() <= TOL);

    // All-zero absorbers are the same degeneracy.
    let qv = QVector::new(vec![0.0, 0.0], 0.3).unwrap();
    assert!(inequality_report(&qv, 2).degenerate_vacuum);
}
