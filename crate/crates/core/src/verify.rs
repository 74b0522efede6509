//! Seeded samplers, brute-force oracles, inequality sweeps and figure data.
//!
//! Every random draw is a pure function of `(seed, index)`: a ChaCha8 stream
//! seeded by `seed` and positioned on stream `index`. Sweeps evaluate samples
//! in parallel and reduce with order-independent operations, so reports do not
//! depend on the number of worker threads.

use std::f64::consts::{LN_2, LOG2_E};
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::bell::{model_analysis, relaxed_chsh_bound, LhvModel};
use crate::bounds::{c0, classical_tight_bound, entropy_curves, pinsker_bound, quantum_tight_bound};
use crate::format::num;
use crate::linalg::{self, kron, Mat2, Mat4, C64};
use crate::prob::{
    binary_joint_from_params, classical_correlation_distance, classical_mutual_information,
    classical_witness_f, entropy_nats, BinaryParams, JointTable, ProbVector,
};
use crate::qubit::{
    bell_diagonal_correlations, bloch_to_density, conjecture_shift, density_to_bloch,
    entanglement_report, fano_decompose, make_state, measure_projective, partial_trace,
    quantum_correlation_distance, quantum_mutual_information, rotation_of, twirl, ProjectivePair,
    ShiftOutcome, Side, StateFamily, TwoQubitState,
};
use crate::{Error, Result, Unit};

/// Margins below `-VIOLATION_TOL` count as violations.
pub const VIOLATION_TOL: f64 = 1e-9;
/// Default number of product terms in the separable sampler.
pub const DEFAULT_SEPARABLE_TERMS: usize = 8;
pub const MIN_RESOLUTION: usize = 100;

/// Random stream for sample `index` of a run seeded with `seed`.
pub fn rng_for(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleFamily {
    BinaryParams,
    /// `None` draws each dimension uniformly from `2..=4`.
    JointTable(Option<(usize, usize)>),
    StateHs,
    StateBellDiagonal,
    StateSeparable(usize),
    StateMixedMarginal,
    LhvModel,
    ProjectivePair,
}

impl FromStr for SampleFamily {
    type Err = Error;

    /// Accepts the family names plus `joint_table:NxM` and `state_separable:K`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, arg) = s.split_once(':').map_or((s, None), |(a, b)| (a, Some(b)));
        let bad = || Error::domain(format!("unknown sample family {s:?}"));
        Ok(match (name, arg) {
            ("binary_params", None) => Self::BinaryParams,
            ("joint_table", None) => Self::JointTable(None),
            ("joint_table", Some(dims)) => {
                let (n, m) = dims.split_once('x').ok_or_else(bad)?;
                let n: usize = n.parse().map_err(|_| bad())?;
                let m: usize = m.parse().map_err(|_| bad())?;
                if n == 0 || m == 0 {
                    return Err(bad());
                }
                Self::JointTable(Some((n, m)))
            }
            ("state_hs", None) => Self::StateHs,
            ("state_bell_diagonal", None) => Self::StateBellDiagonal,
            ("state_separable", None) => Self::StateSeparable(DEFAULT_SEPARABLE_TERMS),
            ("state_separable", Some(k)) => match k.parse() {
                Ok(k) if k > 0 => Self::StateSeparable(k),
                _ => return Err(bad()),
            },
            ("state_mixed_marginal", None) => Self::StateMixedMarginal,
            ("lhv_model", None) => Self::LhvModel,
            ("projective_pair", None) => Self::ProjectivePair,
            _ => return Err(bad()),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Instance {
    Binary(BinaryParams),
    Table(JointTable),
    State(TwoQubitState),
    Model(LhvModel),
    Axes(ProjectivePair),
}

impl Instance {
    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Instance::Binary(b) => json!({ "x": b.x, "y": b.y, "r": b.r }),
            Instance::Table(t) => json!(t.to_rows()),
            Instance::State(s) => state_value(s),
            Instance::Model(m) => serde_json::from_str(&m.to_json()).expect("model json"),
            Instance::Axes(p) => json!({ "a_axis": p.a_axis, "b_axis": p.b_axis }),
        }
    }
}

fn state_value(s: &TwoQubitState) -> serde_json::Value {
    serde_json::from_str(&s.to_json()).expect("state json")
}

pub fn sample(family: SampleFamily, seed: u64, index: u64) -> Instance {
    draw(family, &mut rng_for(seed, index))
}

pub fn draw<R: Rng>(family: SampleFamily, rng: &mut R) -> Instance {
    match family {
        SampleFamily::BinaryParams => Instance::Binary(draw_binary(rng)),
        SampleFamily::JointTable(dims) => {
            let (n, m) = dims.unwrap_or_else(|| (rng.random_range(2..=4), rng.random_range(2..=4)));
            Instance::Table(draw_table(rng, n, m))
        }
        SampleFamily::StateHs => Instance::State(draw_hs_state(rng)),
        SampleFamily::StateBellDiagonal => Instance::State(draw_bell_diagonal(rng)),
        SampleFamily::StateSeparable(k) => Instance::State(draw_separable(rng, k)),
        SampleFamily::StateMixedMarginal => Instance::State(draw_mixed_marginal(rng)),
        SampleFamily::LhvModel => Instance::Model(draw_lhv_model(rng, false)),
        SampleFamily::ProjectivePair => Instance::Axes(draw_axes(rng)),
    }
}

fn uniform_pm1<R: Rng>(rng: &mut R) -> f64 {
    rng.random_range(-1.0..=1.0)
}

/// Uniform over the positivity polytope by rejection from `[-1, 1]³`.
pub fn draw_binary<R: Rng>(rng: &mut R) -> BinaryParams {
    loop {
        let b = BinaryParams { x: uniform_pm1(rng), y: uniform_pm1(rng), r: uniform_pm1(rng) };
        if b.is_positive() {
            return b;
        }
    }
}

/// Flat Dirichlet draw.
pub fn draw_simplex<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / total).collect()
}

pub fn draw_table<R: Rng>(rng: &mut R, n: usize, m: usize) -> JointTable {
    JointTable::from_flat(n, m, draw_simplex(rng, n * m)).expect("simplex draw is a distribution")
}

fn gaussian_c64<R: Rng>(rng: &mut R) -> C64 {
    C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
}

/// `G G† / tr(G G†)` with `G` a 4×4 complex Gaussian matrix.
pub fn draw_hs_state<R: Rng>(rng: &mut R) -> TwoQubitState {
    let g: Mat4 = std::array::from_fn(|_| std::array::from_fn(|_| gaussian_c64(rng)));
    let w = linalg::matmul(&g, &linalg::dagger(&g));
    let tr = linalg::trace(&w).re;
    TwoQubitState::new(linalg::scale(&w, 1.0 / tr)).expect("Wishart draw is a state")
}

pub fn draw_bell_diagonal<R: Rng>(rng: &mut R) -> TwoQubitState {
    let p = draw_simplex(rng, 4);
    let r = bell_diagonal_correlations([p[0], p[1], p[2], p[3]]);
    make_state(&StateFamily::BellDiagonal { r }).expect("simplex point is physical")
}

/// Haar-random SU(2) from a uniform unit quaternion.
pub fn draw_su2<R: Rng>(rng: &mut R) -> Mat2 {
    let q: [f64; 4] = std::array::from_fn(|_| StandardNormal.sample(rng));
    let n = q.iter().map(|x| x * x).sum::<f64>().sqrt();
    let [a, b, c, d] = q.map(|x| x / n);
    [[C64::new(a, b), C64::new(c, d)], [C64::new(-c, d), C64::new(a, -b)]]
}

pub fn draw_unit_vector<R: Rng>(rng: &mut R) -> [f64; 3] {
    loop {
        let v: [f64; 3] = std::array::from_fn(|_| StandardNormal.sample(rng));
        let n = linalg::norm3(&v);
        if n > 1e-6 {
            return v.map(|x| x / n);
        }
    }
}

/// Half the draws are pure; the rest are uniform in the Bloch ball.
fn draw_bloch<R: Rng>(rng: &mut R) -> [f64; 3] {
    let dir = draw_unit_vector(rng);
    let radius = if rng.random_bool(0.5) { 1.0 } else { rng.random::<f64>().cbrt() };
    dir.map(|x| x * radius)
}

/// Mixture of `k` random product states.
pub fn draw_separable<R: Rng>(rng: &mut R, k: usize) -> TwoQubitState {
    let weights = draw_simplex(rng, k.max(1));
    let mut acc = linalg::zeros::<4>();
    for w in weights {
        let term = kron(&bloch_to_density(&draw_bloch(rng)), &bloch_to_density(&draw_bloch(rng)));
        acc = linalg::add(&acc, &linalg::scale(&term, w));
    }
    TwoQubitState::new(acc).expect("mixture of product states")
}

/// Apply Kraus operators to qubit B.
fn channel_on_b(rho: &TwoQubitState, kraus: &[Mat2]) -> Result<TwoQubitState> {
    let id: Mat2 = linalg::identity();
    let mut acc = linalg::zeros::<4>();
    for k in kraus {
        acc = linalg::add(&acc, &linalg::conjugate(&kron(&id, k), rho.matrix()));
    }
    TwoQubitState::new(acc)
}

/// A Bell-diagonal state processed on side B only: amplitude damping with
/// `γ ∈ [0, 1/2)` followed by a Haar rotation. `ρ_A` stays maximally mixed
/// while `ρ_B` generally does not.
pub fn draw_mixed_marginal<R: Rng>(rng: &mut R) -> TwoQubitState {
    let rho = draw_bell_diagonal(rng);
    let gamma: f64 = rng.random_range(0.0..0.5);
    let k0: Mat2 = [[linalg::ONE, linalg::ZERO], [linalg::ZERO, C64::new((1.0 - gamma).sqrt(), 0.0)]];
    let k1: Mat2 = [[linalg::ZERO, C64::new(gamma.sqrt(), 0.0)], [linalg::ZERO, linalg::ZERO]];
    let damped = channel_on_b(&rho, &[k0, k1]).expect("channel output is a state");
    let u = draw_su2(rng);
    damped.apply_local(&linalg::identity(), &u).expect("rotation preserves validity")
}

/// Random finite model with 1 to 4 hidden values. Conditionals are built from
/// per-`λ` marginal biases, so no-signalling holds by construction; the
/// correlation `r` is uniform on its feasible interval or pinned to an end.
pub fn draw_lhv_model<R: Rng>(rng: &mut R, outcome_independent: bool) -> LhvModel {
    let n = rng.random_range(1..=4);
    let weights = ProbVector::new(draw_simplex(rng, n)).expect("simplex");
    let mut conditionals: [Vec<JointTable>; 4] = Default::default();
    for _ in 0..n {
        let (xa, xa2, yb, yb2) = (uniform_pm1(rng), uniform_pm1(rng), uniform_pm1(rng), uniform_pm1(rng));
        for (slot, (x, y)) in [(xa, yb), (xa, yb2), (xa2, yb), (xa2, yb2)].into_iter().enumerate() {
            let r = if outcome_independent {
                0.0
            } else {
                let lo = (x + y).abs() - 1.0 - x * y;
                let hi = 1.0 - (x - y).abs() - x * y;
                match rng.random_range(0..4) {
                    0 => lo,
                    1 => hi,
                    _ => rng.random_range(lo..=hi),
                }
            };
            let t = binary_joint_from_params(&BinaryParams { x, y, r }).expect("feasible r");
            conditionals[slot].push(t);
        }
    }
    LhvModel::new(weights, conditionals).expect("no-signalling by construction")
}

pub fn draw_axes<R: Rng>(rng: &mut R) -> ProjectivePair {
    ProjectivePair::new(draw_unit_vector(rng), draw_unit_vector(rng)).expect("unit axes")
}

/// Named inequality sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepKind {
    /// `I >= ½ C² log e` on random joint tables of size 2..4 × 2..4.
    PinskerClassical,
    /// `I >= ½ C² log e` on Hilbert–Schmidt states.
    PinskerQuantum,
    /// `I >= log 2 - H((1 ± C)/2)` on two-valued tables.
    ClassicalTight,
    /// Quantum bound on Bell-diagonal states.
    QuantumTightBellDiagonal,
    /// `I >= log 4 - H3(C)` for one-sided maximally mixed states with `C >= C0`.
    MixedMarginalH3,
    /// `I(twirl ρ) <= I(ρ)` when `ρ_A` is maximally mixed.
    TwirlMonotone,
    /// Trace-norm `C` equals the singular-value formula and stays below 3/2.
    TraceNormFormula,
    /// `C <= sqrt((1 - u·u)(1 - v·v))` for separable mixtures.
    SeparablePurity,
    /// Criterion implications on Hilbert–Schmidt, separable and Werner states.
    EntanglementChain,
    /// CHSH within `4 / (2 - C_max)` for random hidden-variable models.
    RelaxedChsh,
    /// CHSH within 2 for outcome-independent models.
    LocalChsh,
    /// Measured statistics carry no more information or correlation than the state.
    DataProcessing,
    /// Classically correlated states measured in their eigenbasis reproduce `I` and `C`.
    ClassicalEigenbasis,
    /// Marginal-shifted state keeps the correlation distance.
    ShiftCorrelationDistance,
    /// Quantum bound on Hilbert–Schmidt states (conjectured, reported only).
    ConjectureGeneralStates,
    /// `F = I(ρ) - I(ρ')` on Hilbert–Schmidt states (conjectured, reported only).
    ConjectureShift,
}

impl SweepKind {
    pub const ALL: [SweepKind; 16] = [
        SweepKind::PinskerClassical,
        SweepKind::PinskerQuantum,
        SweepKind::ClassicalTight,
        SweepKind::QuantumTightBellDiagonal,
        SweepKind::MixedMarginalH3,
        SweepKind::TwirlMonotone,
        SweepKind::TraceNormFormula,
        SweepKind::SeparablePurity,
        SweepKind::EntanglementChain,
        SweepKind::RelaxedChsh,
        SweepKind::LocalChsh,
        SweepKind::DataProcessing,
        SweepKind::ClassicalEigenbasis,
        SweepKind::ShiftCorrelationDistance,
        SweepKind::ConjectureGeneralStates,
        SweepKind::ConjectureShift,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepKind::PinskerClassical => "pinsker_classical",
            SweepKind::PinskerQuantum => "pinsker_quantum",
            SweepKind::ClassicalTight => "classical_tight",
            SweepKind::QuantumTightBellDiagonal => "quantum_tight_bell_diagonal",
            SweepKind::MixedMarginalH3 => "mixed_marginal_h3",
            SweepKind::TwirlMonotone => "twirl_monotone",
            SweepKind::TraceNormFormula => "trace_norm_formula",
            SweepKind::SeparablePurity => "separable_purity",
            SweepKind::EntanglementChain => "entanglement_chain",
            SweepKind::RelaxedChsh => "relaxed_chsh",
            SweepKind::LocalChsh => "local_chsh",
            SweepKind::DataProcessing => "data_processing",
            SweepKind::ClassicalEigenbasis => "classical_eigenbasis",
            SweepKind::ShiftCorrelationDistance => "shift_correlation_distance",
            SweepKind::ConjectureGeneralStates => "conjecture_general_states",
            SweepKind::ConjectureShift => "conjecture_shift",
        }
    }

    /// Conjecture sweeps report but never fail.
    pub fn asserted(self) -> bool {
        !matches!(self, SweepKind::ConjectureGeneralStates | SweepKind::ConjectureShift)
    }
}

impl FromStr for SweepKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::domain(format!("unknown sweep kind {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub kind: String,
    pub samples: usize,
    /// Samples the inequality applied to.
    pub evaluated: usize,
    /// Samples outside the inequality's hypotheses (e.g. `C < C0`, non-PSD shift).
    pub skipped: usize,
    pub violations: usize,
    /// Smallest margin seen; `+inf` when nothing was evaluated.
    pub worst_margin: f64,
    pub worst_index: Option<u64>,
    pub worst_case: serde_json::Value,
    pub seed: u64,
    pub asserted: bool,
}

impl SweepReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }

    pub fn summary(&self) -> String {
        format!(
            "kind={} samples={} evaluated={} skipped={} violations={} worst_margin={} seed={}{}",
            self.kind,
            self.samples,
            self.evaluated,
            self.skipped,
            self.violations,
            num(self.worst_margin),
            self.seed,
            if self.asserted { "" } else { " (reported only)" }
        )
    }
}

struct Case {
    /// `None` when the sample falls outside the inequality's hypotheses.
    margin: Option<f64>,
    input: serde_json::Value,
}

fn sanitize(m: f64) -> f64 {
    if m.is_nan() { f64::NEG_INFINITY } else { m }
}

fn bits(nats: f64) -> f64 {
    nats * LOG2_E
}

fn evaluate(kind: SweepKind, seed: u64, index: u64) -> Case {
    let rng = &mut rng_for(seed, index);
    match try_evaluate(kind, rng) {
        Ok(case) => case,
        Err((input, err)) => Case {
            margin: Some(f64::NEG_INFINITY),
            input: json!({ "input": input, "error": err.to_string() }),
        },
    }
}

type Failed = (serde_json::Value, Error);

fn try_evaluate(kind: SweepKind, rng: &mut ChaCha8Rng) -> std::result::Result<Case, Failed> {
    let with = |input: serde_json::Value| move |e: Error| (input.clone(), e);
    Ok(match kind {
        SweepKind::PinskerClassical => {
            let (n, m) = (rng.random_range(2..=4), rng.random_range(2..=4));
            let t = draw_table(rng, n, m);
            let input = json!(t.to_rows());
            let bound = pinsker_bound(classical_correlation_distance(&t), Unit::Nats).map_err(with(input.clone()))?;
            Case { margin: Some(classical_mutual_information(&t, Unit::Nats) - bound), input }
        }
        SweepKind::PinskerQuantum => {
            let s = draw_hs_state(rng);
            let input = state_value(&s);
            let c = quantum_correlation_distance(&s).map_err(with(input.clone()))?;
            let bound = pinsker_bound(c, Unit::Nats).map_err(with(input.clone()))?;
            Case { margin: Some(quantum_mutual_information(&s, Unit::Nats) - bound), input }
        }
        SweepKind::ClassicalTight => {
            let b = draw_binary(rng);
            let input = json!({ "x": b.x, "y": b.y, "r": b.r });
            let f = classical_witness_f(&b, Unit::Nats).map_err(with(input.clone()))?;
            Case { margin: Some(f), input }
        }
        SweepKind::QuantumTightBellDiagonal | SweepKind::ConjectureGeneralStates => {
            let s = if kind == SweepKind::QuantumTightBellDiagonal {
                draw_bell_diagonal(rng)
            } else {
                draw_hs_state(rng)
            };
            let input = state_value(&s);
            let c = quantum_correlation_distance(&s).map_err(with(input.clone()))?;
            let bound = quantum_tight_bound(c, Unit::Nats).map_err(with(input.clone()))?;
            Case { margin: Some(quantum_mutual_information(&s, Unit::Nats) - bound), input }
        }
        SweepKind::MixedMarginalH3 => {
            let s = draw_mixed_marginal(rng);
            let input = state_value(&s);
            let c = quantum_correlation_distance(&s).map_err(with(input.clone()))?;
            if c < c0() {
                return Ok(Case { margin: None, input });
            }
            let h3 = entropy_curves(c).h3.expect("C <= 3/2") * LN_2;
            Case { margin: Some(quantum_mutual_information(&s, Unit::Nats) - (2.0 * LN_2 - h3)), input }
        }
        SweepKind::TwirlMonotone => {
            let s = draw_mixed_marginal(rng);
            let input = state_value(&s);
            let t = twirl(&s).map_err(with(input.clone()))?;
            let margin = quantum_mutual_information(&s, Unit::Nats) - quantum_mutual_information(&t, Unit::Nats);
            Case { margin: Some(margin), input }
        }
        SweepKind::TraceNormFormula => {
            let s = draw_hs_state(rng);
            let input = state_value(&s);
            // quantum_correlation_distance performs the cross-check itself
            let c = quantum_correlation_distance(&s).map_err(with(input.clone()))?;
            Case { margin: Some(1.5 - c), input }
        }
        SweepKind::SeparablePurity => {
            let s = draw_separable(rng, DEFAULT_SEPARABLE_TERMS);
            let input = state_value(&s);
            let f = fano_decompose(&s);
            let rhs = ((1.0 - linalg::dot3(&f.u, &f.u)).max(0.0) * (1.0 - linalg::dot3(&f.v, &f.v)).max(0.0)).sqrt();
            let c = quantum_correlation_distance(&s).map_err(with(input.clone()))?;
            Case { margin: Some(rhs - c), input }
        }
        SweepKind::EntanglementChain => {
            let which = rng.random_range(0..3);
            let s = match which {
                0 => draw_hs_state(rng),
                1 => draw_separable(rng, DEFAULT_SEPARABLE_TERMS),
                _ => {
                    let p = rng.random_range(-1.0 / 3.0..=1.0);
                    let w = make_state(&StateFamily::Werner { p }).expect("p in range");
                    w.apply_local(&draw_su2(rng), &draw_su2(rng)).expect("local rotation")
                }
            };
            let input = state_value(&s);
            let r = entanglement_report(&s).map_err(with(input.clone()))?;
            let separable_ok = which != 1 || !(r.ppt_entangled || r.purity_criterion);
            Case { margin: Some(if r.chain_holds() && separable_ok { 0.0 } else { -1.0 }), input }
        }
        SweepKind::RelaxedChsh | SweepKind::LocalChsh => {
            let m = draw_lhv_model(rng, kind == SweepKind::LocalChsh);
            let input: serde_json::Value = serde_json::from_str(&m.to_json()).expect("model json");
            let a = model_analysis(&m);
            let bound = if a.outcome_independent {
                2.0
            } else {
                relaxed_chsh_bound(a.c_max.min(1.0)).map_err(with(input.clone()))?
            };
            Case { margin: Some(bound - a.chsh), input }
        }
        SweepKind::DataProcessing => {
            let s = draw_hs_state(rng);
            let axes = draw_axes(rng);
            let input = json!({ "state": state_value(&s), "a_axis": axes.a_axis, "b_axis": axes.b_axis });
            let t = measure_projective(&s, &axes).map_err(with(input.clone()))?;
            let c = quantum_correlation_distance(&s).map_err(with(input.clone()))?;
            let di = quantum_mutual_information(&s, Unit::Nats) - classical_mutual_information(&t, Unit::Nats);
            let dc = c - classical_correlation_distance(&t);
            Case { margin: Some(di.min(dc)), input }
        }
        SweepKind::ClassicalEigenbasis => {
            let table = draw_table(rng, 2, 2);
            let (ua, ub) = (draw_su2(rng), draw_su2(rng));
            let input = json!({ "table": table.to_rows() });
            let s = make_state(&StateFamily::ClassicallyCorrelated { table: table.clone(), bases: Some((ua, ub)) })
                .map_err(with(input.clone()))?;
            let z_axis = |u: &Mat2| {
                let r = rotation_of(u);
                [r[0][2], r[1][2], r[2][2]]
            };
            let axes = ProjectivePair::new(z_axis(&ua), z_axis(&ub)).map_err(with(input.clone()))?;
            let measured = measure_projective(&s, &axes).map_err(with(input.clone()))?;
            let c = quantum_correlation_distance(&s).map_err(with(input.clone()))?;
            let errs = [
                quantum_mutual_information(&s, Unit::Nats) - classical_mutual_information(&table, Unit::Nats),
                c - classical_correlation_distance(&table),
                classical_mutual_information(&measured, Unit::Nats) - classical_mutual_information(&table, Unit::Nats),
                classical_correlation_distance(&measured) - classical_correlation_distance(&table),
            ];
            Case { margin: Some(-errs.iter().fold(0.0f64, |a, e| a.max(e.abs()))), input }
        }
        SweepKind::ShiftCorrelationDistance | SweepKind::ConjectureShift => {
            let s = draw_hs_state(rng);
            let input = state_value(&s);
            let shifted = match conjecture_shift(&s) {
                ShiftOutcome::Physical(p) => p,
                ShiftOutcome::NotPsd { .. } => return Ok(Case { margin: None, input }),
            };
            let margin = if kind == SweepKind::ShiftCorrelationDistance {
                let c = quantum_correlation_distance(&s).map_err(with(input.clone()))?;
                let c2 = quantum_correlation_distance(&shifted).map_err(with(input.clone()))?;
                -(c - c2).abs()
            } else {
                quantum_mutual_information(&s, Unit::Nats) - quantum_mutual_information(&shifted, Unit::Nats)
            };
            Case { margin: Some(margin), input }
        }
    })
}

#[derive(Clone, Copy)]
struct Tally {
    evaluated: usize,
    skipped: usize,
    violations: usize,
    worst: Option<(f64, u64)>,
}

impl Tally {
    const EMPTY: Tally = Tally { evaluated: 0, skipped: 0, violations: 0, worst: None };

    fn merge(self, other: Tally) -> Tally {
        let worst = match (self.worst, other.worst) {
            (Some(a), Some(b)) => Some(pick(a, b)),
            (a, b) => a.or(b),
        };
        Tally {
            evaluated: self.evaluated + other.evaluated,
            skipped: self.skipped + other.skipped,
            violations: self.violations + other.violations,
            worst,
        }
    }
}

/// Smaller margin wins; ties go to the lower index.
fn pick(a: (f64, u64), b: (f64, u64)) -> (f64, u64) {
    match a.0.total_cmp(&b.0) {
        std::cmp::Ordering::Less => a,
        std::cmp::Ordering::Greater => b,
        std::cmp::Ordering::Equal => if a.1 <= b.1 { a } else { b },
    }
}

/// Evaluates `kind` on `n_samples` draws seeded by `seed`.
pub fn run_sweep(kind: SweepKind, n_samples: usize, seed: u64) -> Result<SweepReport> {
    if n_samples == 0 {
        return Err(Error::domain("a sweep needs at least one sample"));
    }
    let tally = (0..n_samples as u64)
        .into_par_iter()
        .map(|i| {
            let case = evaluate(kind, seed, i);
            match case.margin {
                None => Tally { skipped: 1, ..Tally::EMPTY },
                Some(m) => {
                    let m = sanitize(m);
                    Tally {
                        evaluated: 1,
                        skipped: 0,
                        violations: usize::from(m < -VIOLATION_TOL),
                        worst: Some((m, i)),
                    }
                }
            }
        })
        .reduce(|| Tally::EMPTY, Tally::merge);
    let (worst_margin, worst_index) = tally.worst.map_or((f64::INFINITY, None), |(m, i)| (m, Some(i)));
    let worst_case = worst_index.map_or(serde_json::Value::Null, |i| evaluate(kind, seed, i).input);
    Ok(SweepReport {
        kind: kind.name().to_string(),
        samples: n_samples,
        evaluated: tally.evaluated,
        skipped: tally.skipped,
        violations: tally.violations,
        worst_margin,
        worst_index,
        worst_case,
        seed,
        asserted: kind.asserted(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleKind {
    Classical,
    BellDiagonal,
}

fn grid(resolution: usize) -> impl IndexedParallelIterator<Item = f64> {
    (0..resolution + 1).into_par_iter().map(move |i| -1.0 + 2.0 * i as f64 / resolution as f64)
}

/// Feasible `y` interval of a two-valued table for fixed `x` and `r`, from
/// the four linear conditions `P(a, b) >= 0`.
fn feasible_y(x: f64, r: f64) -> Option<(f64, f64)> {
    let (mut lo, mut hi) = (-1.0f64, 1.0f64);
    for a in [1.0, -1.0] {
        for b in [1.0, -1.0] {
            // 4 P(a, b) = (1 + a x) + a b r + y b (1 + a x)
            let slope = b * (1.0 + a * x);
            let offset = (1.0 + a * x) + a * b * r;
            if slope > 0.0 {
                lo = lo.max(-offset / slope);
            } else if slope < 0.0 {
                hi = hi.min(-offset / slope);
            } else if offset < 0.0 {
                return None;
            }
        }
    }
    (lo <= hi).then_some((lo, hi))
}

/// Grid minimum of the mutual information (bits) over states with correlation
/// distance `c`, independent of the closed-form bounds.
///
/// `Classical` scans `(x, y)` for `r = ±c`, adding the exact ends of each
/// feasible `y` interval. `BellDiagonal` scans `(r1, r2)` and solves for every
/// `r3` with `¼ Σ|λ_i| = c`, where `λ_i` are the eigenvalues of `Σ r_j σj⊗σj`.
pub fn brute_force_min_mi(kind: OracleKind, c: f64, resolution: usize) -> Result<f64> {
    if resolution < MIN_RESOLUTION {
        return Err(Error::domain(format!("resolution {resolution} below {MIN_RESOLUTION}")));
    }
    let max_c = match kind {
        OracleKind::Classical => 1.0,
        OracleKind::BellDiagonal => 1.5,
    };
    if !(0.0..=max_c).contains(&c) {
        return Err(Error::domain(format!("correlation distance {c} outside [0, {max_c}]")));
    }
    let best = match kind {
        OracleKind::Classical => grid(resolution)
            .map(|x| {
                let mut best = f64::INFINITY;
                for r in [c, -c] {
                    let Some((lo, hi)) = feasible_y(x, r) else { continue };
                    let steps = (0..=resolution).map(|j| -1.0 + 2.0 * j as f64 / resolution as f64);
                    for y in steps.filter(|y| (lo..=hi).contains(y)).chain([lo, hi]) {
                        let b = BinaryParams { x, y, r };
                        if let Ok(t) = binary_joint_from_params(&b) {
                            best = best.min(classical_mutual_information(&t, Unit::Nats));
                        }
                    }
                }
                best
            })
            .reduce(|| f64::INFINITY, f64::min),
        OracleKind::BellDiagonal => grid(resolution)
            .map(|r1| {
                let mut best = f64::INFINITY;
                for j in 0..=resolution {
                    let r2 = -1.0 + 2.0 * j as f64 / resolution as f64;
                    for r3 in bell_diagonal_level_set(r1, r2, c) {
                        let p = bell_spectrum(r1, r2, r3).map(|l| (1.0 + l) / 4.0);
                        if p.iter().all(|&x| x >= -1e-12) {
                            best = best.min(2.0 * LN_2 - entropy_nats(&p.map(|x| x.max(0.0))));
                        }
                    }
                }
                best
            })
            .reduce(|| f64::INFINITY, f64::min),
    };
    if !best.is_finite() {
        return Err(Error::domain(format!("no feasible state with correlation distance {c} on the grid")));
    }
    Ok(bits(best.max(0.0)))
}

/// Eigenvalues of `Σ r_j σj⊗σj` on the Bell basis.
fn bell_spectrum(r1: f64, r2: f64, r3: f64) -> [f64; 4] {
    [-r1 - r2 - r3, -r1 + r2 + r3, r1 - r2 + r3, r1 + r2 - r3]
}

/// All `r3 ∈ [-1, 1]` with `¼ Σ|λ_i(r1, r2, r3)| = c`. The left side is convex
/// and piecewise linear in `r3`, so each linear piece is solved exactly.
fn bell_diagonal_level_set(r1: f64, r2: f64, c: f64) -> Vec<f64> {
    let g = |r3: f64| bell_spectrum(r1, r2, r3).iter().map(|l| l.abs()).sum::<f64>() / 4.0 - c;
    let mut knots: Vec<f64> = [-1.0, 1.0, -r1 - r2, r1 - r2, r2 - r1, r1 + r2]
        .into_iter()
        .filter(|k| (-1.0..=1.0).contains(k))
        .collect();
    knots.sort_by(f64::total_cmp);
    knots.dedup();
    let mut roots = Vec::new();
    for w in knots.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (ga, gb) = (g(a), g(b));
        if ga == 0.0 {
            roots.push(a);
        }
        if ga * gb < 0.0 {
            roots.push(a + (b - a) * ga / (ga - gb));
        }
    }
    if let Some(&last) = knots.last() {
        if g(last) == 0.0 {
            roots.push(last);
        }
    }
    roots
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    /// Classical bounds on `[0, 1]`.
    Fig1,
    /// Classical and quantum bounds on `[0, 3/2]`.
    Fig2,
}

impl FromStr for Figure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fig1" => Ok(Figure::Fig1),
            "fig2" => Ok(Figure::Fig2),
            _ => Err(Error::domain(format!("unknown figure {s:?}"))),
        }
    }
}

fn grid_points(max: f64, step: f64) -> Vec<f64> {
    let n = (max / step + 1e-9).floor() as usize;
    let mut pts: Vec<f64> = (0..=n).map(|k| (k as f64 * step).min(max)).collect();
    if max - pts[pts.len() - 1] > 1e-12 {
        pts.push(max);
    }
    pts
}

/// Bound curves in bits as CSV text.
pub fn figure_csv(which: Figure, grid_step: f64) -> Result<String> {
    if !(grid_step > 0.0) || !grid_step.is_finite() {
        return Err(Error::domain(format!("grid step must be positive, got {grid_step}")));
    }
    let mut out = String::new();
    match which {
        Figure::Fig1 => {
            out.push_str("C,pinsker,classical_tight\n");
            for c in grid_points(1.0, grid_step) {
                let p = pinsker_bound(c, Unit::Bits)?;
                let k = classical_tight_bound(c, Unit::Bits)?;
                let _ = writeln!(out, "{},{},{}", num(c), num(p), num(k));
            }
        }
        Figure::Fig2 => {
            let _ = writeln!(out, "# C0={}", num(c0()));
            out.push_str("C,pinsker,classical_tight,quantum_tight\n");
            for c in grid_points(1.5, grid_step) {
                let p = pinsker_bound(c, Unit::Bits)?;
                let k = if c <= 1.0 { num(classical_tight_bound(c, Unit::Bits)?) } else { String::new() };
                let q = quantum_tight_bound(c, Unit::Bits)?;
                let _ = writeln!(out, "{},{},{},{}", num(c), num(p), k, num(q));
            }
        }
    }
    Ok(out)
}

pub fn emit_figure(which: Figure, grid_step: f64, path: &Path) -> Result<()> {
    let text = figure_csv(which, grid_step)?;
    std::fs::write(path, text)?;
    Ok(())
}

/// Best single-`λ` model found for a given bound on the conditional
/// correlation distance.
#[derive(Debug, Clone)]
pub struct SaturatingModel {
    pub model: LhvModel,
    pub chsh: f64,
    /// Marginal biases `(x_A, x_A', y_B, y_B')`.
    pub biases: [f64; 4],
}

/// Largest `<XY>` (or smallest, for `sign < 0`) of a two-valued table with
/// biases `x`, `y` and correlation `|r| <= c_max`; returns `(correlator, r)`.
fn extreme_correlator(x: f64, y: f64, c_max: f64, sign: f64) -> (f64, f64) {
    let lo = ((x + y).abs() - 1.0 - x * y).max(-c_max);
    let hi = (1.0 - (x - y).abs() - x * y).min(c_max);
    let r = if sign > 0.0 { hi } else { lo };
    (x * y + r, r)
}

/// Candidate `y` values where some correlator in the CHSH sum changes slope.
fn kinks(x: f64, x2: f64, c_max: f64) -> Vec<f64> {
    let mut ys = vec![-1.0, 1.0, x, x2, -x, -x2];
    for z in [x, x2] {
        ys.extend([(1.0 - z - c_max) / (z - 1.0), (1.0 + z - c_max) / (1.0 + z)]);
        ys.extend([(z - 1.0 + c_max) / (z - 1.0), (c_max - z - 1.0) / (z + 1.0)]);
    }
    ys.retain(|y| y.is_finite());
    ys.iter_mut().for_each(|y| *y = y.clamp(-1.0, 1.0));
    ys
}

/// Best CHSH over `(y_B, y_B')` for fixed `(x_A, x_A')`. The sum splits into
/// a part in `y_B` and a part in `y_B'`, each piecewise linear, so checking
/// the kinks is exact.
fn best_for_alice(x: f64, x2: f64, c_max: f64) -> (f64, [f64; 4]) {
    let ys = kinks(x, x2, c_max);
    let best_by = |f: &dyn Fn(f64) -> f64| {
        ys.iter().map(|&y| (f(y), y)).fold((f64::NEG_INFINITY, 0.0), |a, b| if b.0 > a.0 { b } else { a })
    };
    let (g, y) = best_by(&|y| extreme_correlator(x, y, c_max, 1.0).0 + extreme_correlator(x2, y, c_max, 1.0).0);
    let (h, y2) = best_by(&|y| extreme_correlator(x, y, c_max, 1.0).0 - extreme_correlator(x2, y, c_max, -1.0).0);
    (g + h, [x, x2, y, y2])
}

/// Search over the marginal biases of a single-`λ` model whose conditionals
/// have correlation distance at most `c_max`. Mixing over `λ` cannot raise
/// CHSH above the best single component, so this explores the whole model
/// class. Bob's biases are optimised exactly; Alice's are scanned on a grid
/// and the best `seeds` points are polished by pattern search.
pub fn search_saturating_model(c_max: f64, points_per_axis: usize, seeds: usize) -> Result<SaturatingModel> {
    if !(0.0..=1.0).contains(&c_max) {
        return Err(Error::domain(format!("C_max = {c_max} outside [0, 1]")));
    }
    let n = points_per_axis.max(3);
    let coord = |k: usize| -1.0 + 2.0 * k as f64 / (n - 1) as f64;
    let mut coarse: Vec<(f64, [f64; 4])> = (0..n * n)
        .into_par_iter()
        .map(|idx| best_for_alice(coord(idx % n), coord(idx / n), c_max))
        .collect();
    coarse.sort_by(|a, b| b.0.total_cmp(&a.0));
    coarse.truncate(seeds.max(1));
    let directions: Vec<[f64; 2]> = (0..9)
        .filter(|&k| k != 4)
        .map(|k| [k % 3, k / 3].map(|d| d as f64 - 1.0))
        .collect();
    let polish = |(mut val, mut b): (f64, [f64; 4])| {
        let mut step = 2.0 / (n - 1) as f64;
        while step > 1e-13 {
            let improved = directions.iter().find_map(|d| {
                let x = (b[0] + step * d[0]).clamp(-1.0, 1.0);
                let x2 = (b[1] + step * d[1]).clamp(-1.0, 1.0);
                let cand = best_for_alice(x, x2, c_max);
                (cand.0 > val).then_some(cand)
            });
            match improved {
                Some(cand) => (val, b) = cand,
                None => step *= 0.5,
            }
        }
        (val, b)
    };
    let best = coarse
        .into_par_iter()
        .map(polish)
        .reduce(|| (f64::NEG_INFINITY, [0.0; 4]), |a, b| if b.0 > a.0 { b } else { a });
    let [xa, xa2, yb, yb2] = best.1;
    let table = |x: f64, y: f64, sign: f64| {
        let (_, r) = extreme_correlator(x, y, c_max, sign);
        binary_joint_from_params(&BinaryParams { x, y, r })
    };
    let conditionals = [
        vec![table(xa, yb, 1.0)?],
        vec![table(xa, yb2, 1.0)?],
        vec![table(xa2, yb, 1.0)?],
        vec![table(xa2, yb2, -1.0)?],
    ];
    let model = LhvModel::new(ProbVector::new(vec![1.0])?, conditionals)?;
    let chsh = model_analysis(&model).chsh;
    Ok(SaturatingModel { model, chsh, biases: best.1 })
}

/// Local-unitary images `(U⊗V) ρ (U⊗V)†` used by invariance checks.
pub fn random_local_rotation<R: Rng>(rho: &TwoQubitState, rng: &mut R) -> TwoQubitState {
    rho.apply_local(&draw_su2(rng), &draw_su2(rng)).expect("unitary conjugation preserves validity")
}

/// Bloch vector of the reduced state on `side`.
pub fn marginal_bloch(rho: &TwoQubitState, side: Side) -> [f64; 3] {
    density_to_bloch(&partial_trace(rho, side))
}
