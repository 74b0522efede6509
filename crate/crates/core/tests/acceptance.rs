//! Acceptance checks. Runs as a plain binary so every criterion prints one
//! PASS/FAIL line under `cargo test`.

use std::time::{Duration, Instant};

use corrdist::bell::simulation_resources;
use corrdist::bounds::{c0, classical_tight_bound, compute_c0, pinsker_bound, quantum_tight_bound};
use corrdist::prob::{binary_joint_from_params, classical_mutual_information, BinaryParams};
use corrdist::qubit::{
    entanglement_report, make_state, quantum_correlation_distance, quantum_mutual_information, singlet,
    StateFamily,
};
use corrdist::verify::{brute_force_min_mi, run_sweep, OracleKind, SweepKind, SweepReport};
use corrdist::Unit;

const SEED: u64 = 42;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok { Ok(()) } else { Err(msg()) }
}

fn within(limit: Duration, start: Instant) -> Result<Duration, String> {
    let took = start.elapsed();
    ensure(took < limit, || format!("took {took:.2?}, limit {limit:?}"))?;
    Ok(took)
}

fn clean(r: &SweepReport) -> Result<(), String> {
    ensure(r.passed(), || format!("{}; worst case {}", r.summary(), r.worst_case))
}

fn grid(max: f64, step: f64) -> impl Iterator<Item = f64> {
    let n = (max / step).round() as usize;
    (0..=n).map(move |k| k as f64 * step)
}

fn c0_reproduction() -> Outcome {
    let start = Instant::now();
    let c = compute_c0(1e-9).map_err(|e| e.to_string())?;
    let took = within(Duration::from_secs(1), start)?;
    ensure((c - 0.72654).abs() <= 5e-5, || format!("C0 = {c}"))?;
    Ok(format!("C0 = {c:.9}, |C0 - 0.72654| = {:.1e}, {took:.2?}", (c - 0.72654).abs()))
}

fn werner_family() -> Outcome {
    let mut worst = 0.0f64;
    for p in grid(1.0, 0.01) {
        let rho = make_state(&StateFamily::Werner { p }).map_err(|e| e.to_string())?;
        let c = quantum_correlation_distance(&rho).map_err(|e| e.to_string())?;
        worst = worst.max((c - 1.5 * p).abs());
    }
    ensure(worst <= 1e-9, || format!("max |C - 3p/2| = {worst:e}"))?;
    let s = singlet();
    let c = quantum_correlation_distance(&s).map_err(|e| e.to_string())?;
    let i = quantum_mutual_information(&s, Unit::Bits);
    ensure((c - 1.5).abs() <= 1e-9 && (i - 2.0).abs() <= 1e-9, || format!("singlet C = {c}, I = {i}"))?;
    Ok(format!("max |C - 3p/2| = {worst:.1e} over 101 weights; singlet C = {c}, I = {i} bits"))
}

fn classical_bound_sweep() -> Outcome {
    let start = Instant::now();
    let r = run_sweep(SweepKind::ClassicalTight, 100_000, SEED).map_err(|e| e.to_string())?;
    clean(&r)?;
    let mut worst = 0.0f64;
    for c in grid(1.0, 0.01) {
        for r in [c, -c] {
            let t = binary_joint_from_params(&BinaryParams { x: 0.0, y: 0.0, r }).map_err(|e| e.to_string())?;
            let bound = classical_tight_bound(c, Unit::Bits).map_err(|e| e.to_string())?;
            worst = worst.max((classical_mutual_information(&t, Unit::Bits) - bound).abs());
        }
    }
    ensure(worst <= 1e-9, || format!("saturation error {worst:e}"))?;
    let took = within(Duration::from_secs(10), start)?;
    Ok(format!("{}; saturation error {worst:.1e}; {took:.2?}", r.summary()))
}

fn quantum_bound_sweep() -> Outcome {
    let start = Instant::now();
    let bd = run_sweep(SweepKind::QuantumTightBellDiagonal, 100_000, SEED).map_err(|e| e.to_string())?;
    clean(&bd)?;
    let mut worst = 0.0f64;
    for c in grid(1.5, 0.01).chain([c0()]) {
        let rho = make_state(&StateFamily::Saturating { c }).map_err(|e| e.to_string())?;
        let got_c = quantum_correlation_distance(&rho).map_err(|e| e.to_string())?;
        let bound = quantum_tight_bound(c, Unit::Bits).map_err(|e| e.to_string())?;
        worst = worst.max((quantum_mutual_information(&rho, Unit::Bits) - bound).abs()).max((got_c - c).abs());
    }
    ensure(worst <= 1e-9, || format!("saturation error {worst:e}"))?;
    let mm = run_sweep(SweepKind::MixedMarginalH3, 100_000, SEED).map_err(|e| e.to_string())?;
    clean(&mm)?;
    ensure(mm.evaluated > 0, || "no mixed-marginal sample reached C0".into())?;
    let took = within(Duration::from_secs(60), start)?;
    Ok(format!(
        "bell-diagonal violations={} worst={:.3e}; saturation error {worst:.1e}; mixed-marginal evaluated={} violations={} worst={:.3e}; {took:.2?}",
        bd.violations, bd.worst_margin, mm.evaluated, mm.violations, mm.worst_margin
    ))
}

fn oracle_agreement() -> Outcome {
    let mut notes = Vec::new();
    for c in [0.25, 0.5, 1.0] {
        let found = brute_force_min_mi(OracleKind::Classical, c, 2000).map_err(|e| e.to_string())?;
        let bound = classical_tight_bound(c, Unit::Bits).map_err(|e| e.to_string())?;
        ensure((found - bound).abs() <= 1e-5, || format!("classical C={c}: grid {found} vs bound {bound}"))?;
        notes.push(format!("C={c}: {:.1e}", (found - bound).abs()));
    }
    let found = brute_force_min_mi(OracleKind::BellDiagonal, 1.0, 2000).map_err(|e| e.to_string())?;
    ensure((found - 0.792481).abs() <= 1e-3, || format!("bell-diagonal C=1: {found}"))?;
    Ok(format!("classical |grid - bound| {}; bell-diagonal C=1 min {found:.6} bits", notes.join(", ")))
}

fn entanglement_chain() -> Outcome {
    let r = run_sweep(SweepKind::EntanglementChain, 100_000, SEED).map_err(|e| e.to_string())?;
    clean(&r)?;
    let (mut cov, mut ppt, mut big) = (None, None, None);
    for k in 0..=1000 {
        let p = k as f64 / 1000.0;
        let rep = entanglement_report(&make_state(&StateFamily::Werner { p }).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        ensure(rep.chain_holds(), || format!("chain fails for Werner p={p}"))?;
        if rep.covariance_criterion {
            cov.get_or_insert(p);
        }
        if rep.ppt_entangled {
            ppt.get_or_insert(p);
        }
        if rep.cdist_gt_one {
            big.get_or_insert(p);
        }
    }
    let (cov, ppt, big) = (cov.unwrap_or(f64::NAN), ppt.unwrap_or(f64::NAN), big.unwrap_or(f64::NAN));
    ensure((cov - 1.0 / 3.0).abs() <= 1e-3, || format!("covariance threshold {cov}"))?;
    ensure((ppt - 1.0 / 3.0).abs() <= 1e-3, || format!("PPT threshold {ppt}"))?;
    ensure((big - 2.0 / 3.0).abs() <= 1e-3, || format!("C > 1 threshold {big}"))?;
    Ok(format!("{}; Werner onsets: covariance p={cov}, PPT p={ppt}, C>1 p={big}", r.summary()))
}

fn bound_ordering() -> Outcome {
    let threshold = c0();
    let mut min_gap_above = f64::INFINITY;
    for k in 0..=1000 {
        let c = k as f64 / 1000.0;
        let p = pinsker_bound(c, Unit::Bits).map_err(|e| e.to_string())?;
        let q = quantum_tight_bound(c, Unit::Bits).map_err(|e| e.to_string())?;
        let k2 = classical_tight_bound(c, Unit::Bits).map_err(|e| e.to_string())?;
        ensure(p <= q + 1e-12 && q <= k2 + 1e-12, || format!("order fails at C={c}: {p} {q} {k2}"))?;
        if c <= threshold {
            ensure((k2 - q).abs() <= 1e-12, || format!("branches differ at C={c} <= C0: {}", k2 - q))?;
        } else {
            ensure(k2 - q > 1e-12, || format!("no strict gap at C={c}: {}", k2 - q))?;
            min_gap_above = min_gap_above.min(k2 - q);
        }
    }
    let gap = classical_tight_bound(0.9, Unit::Bits).unwrap() - quantum_tight_bound(0.9, Unit::Bits).unwrap();
    ensure(gap > 1e-6, || format!("gap at C=0.9 is {gap}"))?;
    Ok(format!("1001 points ordered; smallest gap above C0 {min_gap_above:.2e}; gap at 0.9 {gap:.6}"))
}

fn bell_resources() -> Outcome {
    let lo = simulation_resources(0.0).map_err(|e| e.to_string())?;
    let hi = simulation_resources(2.0).map_err(|e| e.to_string())?;
    ensure(lo.c_max_required.abs() <= 1e-12 && lo.i_min_bits.abs() <= 1e-12, || format!("V=0: {lo:?}"))?;
    ensure(
        (hi.c_max_required - 1.0).abs() <= 1e-12 && (hi.i_min_bits - 1.0).abs() <= 1e-12,
        || format!("V=2: {hi:?}"),
    )?;
    let relaxed = run_sweep(SweepKind::RelaxedChsh, 10_000, SEED).map_err(|e| e.to_string())?;
    clean(&relaxed)?;
    let local = run_sweep(SweepKind::LocalChsh, 10_000, SEED).map_err(|e| e.to_string())?;
    clean(&local)?;
    Ok(format!(
        "endpoints exact; relaxed CHSH worst={:.3e}, local CHSH worst={:.3e} over 10^4 models each",
        relaxed.worst_margin, local.worst_margin
    ))
}

fn data_processing() -> Outcome {
    let dp = run_sweep(SweepKind::DataProcessing, 10_000, SEED).map_err(|e| e.to_string())?;
    clean(&dp)?;
    let eq = run_sweep(SweepKind::ClassicalEigenbasis, 10_000, SEED).map_err(|e| e.to_string())?;
    clean(&eq)?;
    Ok(format!(
        "measured statistics worst margin {:.3e}; eigenbasis equality error {:.1e}",
        dp.worst_margin, -eq.worst_margin
    ))
}

fn conjecture_exploration() -> Outcome {
    let first = run_sweep(SweepKind::ConjectureShift, 100_000, SEED).map_err(|e| e.to_string())?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().map_err(|e| e.to_string())?;
    let second = pool.install(|| run_sweep(SweepKind::ConjectureShift, 100_000, SEED)).map_err(|e| e.to_string())?;
    ensure(first == second, || "reports differ between thread counts".into())?;
    let shift = run_sweep(SweepKind::ShiftCorrelationDistance, 100_000, SEED).map_err(|e| e.to_string())?;
    clean(&shift)?;
    let general = run_sweep(SweepKind::ConjectureGeneralStates, 100_000, SEED).map_err(|e| e.to_string())?;
    let verdict = if first.worst_margin >= -1e-6 {
        "min F >= -1e-6".to_string()
    } else {
        format!("counterexample {}", first.worst_case)
    };
    Ok(format!(
        "min F = {:.6e} over {} PSD shifts ({} skipped), {verdict}; deterministic across thread counts; bound on general states worst={:.3e}",
        first.worst_margin, first.evaluated, first.skipped, general.worst_margin
    ))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("C0 reproduction", c0_reproduction),
        ("Werner family", werner_family),
        ("classical bound sweep", classical_bound_sweep),
        ("quantum bound sweep", quantum_bound_sweep),
        ("oracle agreement", oracle_agreement),
        ("entanglement chain", entanglement_chain),
        ("bound ordering", bound_ordering),
        ("Bell resources", bell_resources),
        ("data processing", data_processing),
        ("conjecture exploration", conjecture_exploration),
    ];
    let mut failed = 0;
    for (n, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS criterion {:>2} {name}: {detail}", n + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {:>2} {name}: {detail}", n + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
