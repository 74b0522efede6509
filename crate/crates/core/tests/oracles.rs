use corrdist::bell::{model_analysis, relaxed_chsh_bound, simulation_resources};
use corrdist::bounds::{c0, classical_tight_bound, quantum_tight_bound};
use corrdist::verify::{brute_force_min_mi, run_sweep, search_saturating_model, OracleKind, SweepKind};
use corrdist::Unit;

#[test]
fn classical_oracle_converges() {
    for c in [0.25, 0.5, c0(), 1.0] {
        let found = brute_force_min_mi(OracleKind::Classical, c, 2000).unwrap();
        let bound = classical_tight_bound(c, Unit::Bits).unwrap();
        assert!(found >= bound - 1e-9, "C={c}");
        assert!(found - bound < 1e-5, "C={c}: {found} vs {bound}");
    }
}

#[test]
fn bell_diagonal_oracle_converges() {
    for c in [0.5, 1.0, 1.4] {
        let found = brute_force_min_mi(OracleKind::BellDiagonal, c, 2000).unwrap();
        let bound = quantum_tight_bound(c, Unit::Bits).unwrap();
        assert!(found >= bound - 1e-9, "C={c}");
        assert!(found - bound < 1e-5, "C={c}: {found} vs {bound}");
    }
}

#[test]
fn coarser_grids_never_beat_the_bound() {
    for res in [100, 250, 600] {
        for k in 0..=10 {
            let c = k as f64 / 10.0;
            let found = brute_force_min_mi(OracleKind::Classical, c, res).unwrap();
            assert!(found >= classical_tight_bound(c, Unit::Bits).unwrap() - 1e-9);
            let found = brute_force_min_mi(OracleKind::BellDiagonal, 1.5 * c, res).unwrap();
            assert!(found >= quantum_tight_bound(1.5 * c, Unit::Bits).unwrap() - 1e-9);
        }
    }
}

#[test]
fn saturating_model_reaches_tsirelson() {
    let v = 2.0 * 2f64.sqrt() - 2.0;
    let c_max = simulation_resources(v).unwrap().c_max_required;
    let found = search_saturating_model(c_max, 101, 16).unwrap();
    let analysis = model_analysis(&found.model);
    assert!((found.chsh - 2.0 * 2f64.sqrt()).abs() < 1e-6, "{}", found.chsh);
    assert!(analysis.c_max <= c_max + 1e-12);
    assert!(found.chsh <= relaxed_chsh_bound(c_max).unwrap() + 1e-9);
}

#[test]
fn sweeps_are_reproducible() {
    for kind in [SweepKind::PinskerClassical, SweepKind::SeparablePurity, SweepKind::TwirlMonotone] {
        let a = run_sweep(kind, 2000, 9).unwrap();
        let b = run_sweep(kind, 2000, 9).unwrap();
        assert_eq!(a, b);
        assert!(a.passed(), "{}", a.summary());
    }
}
