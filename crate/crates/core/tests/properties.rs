use corrdist::linalg::max_abs_diff;
use corrdist::prob::{classical_correlation_distance, classical_mutual_information};
use corrdist::qubit::{
    conjecture_shift, entanglement_report, quantum_correlation_distance, quantum_mutual_information, twirl,
    ShiftOutcome,
};
use corrdist::bounds::pinsker_bound;
use corrdist::verify::{draw_hs_state, draw_separable, draw_table, random_local_rotation, rng_for};
use corrdist::Unit;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn local_unitaries_preserve_information(seed in any::<u64>()) {
        let mut rng = rng_for(seed, 0);
        let rho = draw_hs_state(&mut rng);
        let rotated = random_local_rotation(&rho, &mut rng);
        let di = quantum_mutual_information(&rho, Unit::Bits) - quantum_mutual_information(&rotated, Unit::Bits);
        let dc = quantum_correlation_distance(&rho).unwrap() - quantum_correlation_distance(&rotated).unwrap();
        prop_assert!(di.abs() < 1e-9 && dc.abs() < 1e-9);
    }

    #[test]
    fn twirl_is_idempotent(seed in any::<u64>()) {
        let rho = draw_hs_state(&mut rng_for(seed, 1));
        let once = twirl(&rho).unwrap();
        let twice = twirl(&once).unwrap();
        prop_assert!(max_abs_diff(once.matrix(), twice.matrix()) < 1e-12);
    }

    #[test]
    fn pinsker_holds_for_tables(seed in any::<u64>(), n in 2usize..6, m in 2usize..6) {
        let t = draw_table(&mut rng_for(seed, 2), n, m);
        let c = classical_correlation_distance(&t);
        prop_assert!(classical_mutual_information(&t, Unit::Nats) >= pinsker_bound(c, Unit::Nats).unwrap() - 1e-12);
        prop_assert!(c <= 2.0 * (n.min(m) as f64 - 1.0) / n.min(m) as f64 + 1e-12);
    }

    #[test]
    fn separable_states_pass_every_criterion(seed in any::<u64>(), k in 1usize..12) {
        let r = entanglement_report(&draw_separable(&mut rng_for(seed, 3), k)).unwrap();
        prop_assert!(!r.ppt_entangled && !r.covariance_criterion && !r.purity_criterion && !r.cdist_gt_one);
    }

    #[test]
    fn shift_keeps_correlation_distance(seed in any::<u64>()) {
        let rho = draw_hs_state(&mut rng_for(seed, 4));
        if let ShiftOutcome::Physical(shifted) = conjecture_shift(&rho) {
            let dc = quantum_correlation_distance(&rho).unwrap() - quantum_correlation_distance(&shifted).unwrap();
            prop_assert!(dc.abs() < 1e-9);
        }
    }
}
