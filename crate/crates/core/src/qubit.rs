//! Two-qubit states: Fano decomposition, spin covariance singular values,
//! trace-norm correlation distance, entropies, entanglement criteria, state
//! families, twirling and projective spin measurements.
//!
//! Basis order is `|00>, |01>, |10>, |11>` with qubit A the left tensor factor.

use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::linalg::{
    self, conjugate, dagger, det3, dot3, hermitian_deviation, hermitian_eigenvalues, kron, mat3_mul,
    mat3_transpose, norm3, symmetric_eigenvalues3, trace, trace_of_product, CMat, Mat2, Mat4, RMat3,
    C64, I, ONE, ZERO,
};
use crate::prob::{entropy_nats, JointTable};
use crate::{Error, Result, Unit};

pub const HERMITIAN_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-9;
/// Eigenvalues down to `-PSD_TOL` are accepted and clipped to zero.
pub const PSD_TOL: f64 = 1e-9;
/// Bloch vectors may exceed unit length by this much.
pub const BLOCH_TOL: f64 = 1e-9;
/// Agreement required between the trace-norm and singular-value routes to `C`.
pub const CROSS_CHECK_TOL: f64 = 1e-9;
/// A sufficient entanglement criterion only fires when its inequality holds by
/// more than this margin.
pub const CRITERION_MARGIN: f64 = 1e-8;
/// A partial-transpose eigenvalue below `-PPT_TOL` flags entanglement.
pub const PPT_TOL: f64 = 1e-9;
pub const AXIS_TOL: f64 = 1e-12;

/// `σ1, σ2, σ3`.
pub const PAULI: [Mat2; 3] = [
    [[ZERO, ONE], [ONE, ZERO]],
    [[ZERO, C64::new(0.0, -1.0)], [I, ZERO]],
    [[ONE, ZERO], [ZERO, C64::new(-1.0, 0.0)]],
];

fn id2() -> Mat2 {
    linalg::identity()
}

/// `(I + b·σ) / 2`.
pub fn bloch_to_density(b: &[f64; 3]) -> Mat2 {
    let mut m = linalg::scale(&id2(), 0.5);
    for (j, s) in PAULI.iter().enumerate() {
        m = linalg::add(&m, &linalg::scale(s, 0.5 * b[j]));
    }
    m
}

pub fn density_to_bloch(rho: &Mat2) -> [f64; 3] {
    std::array::from_fn(|j| trace_of_product(rho, &PAULI[j]).re)
}

/// Checks Hermiticity, unit trace and positivity; returns the ascending spectrum.
fn validate_density<const N: usize>(m: &CMat<N>) -> Result<[f64; N]> {
    if m.iter().flatten().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::InvalidState("non-finite entry".into()));
    }
    let dev = hermitian_deviation(m);
    if dev > HERMITIAN_TOL {
        return Err(Error::NotHermitian(dev));
    }
    let tr = trace(m).re;
    if (tr - 1.0).abs() > TRACE_TOL {
        return Err(Error::InvalidState(format!("trace is {tr}, not 1")));
    }
    let vals = hermitian_eigenvalues(m);
    if vals[0] < -PSD_TOL {
        return Err(Error::InvalidState(format!(
            "not positive semidefinite (min eigenvalue {:e})",
            vals[0]
        )));
    }
    Ok(vals)
}

/// A validated two-qubit density operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoQubitState {
    matrix: Mat4,
}

impl TwoQubitState {
    pub fn new(matrix: Mat4) -> Result<Self> {
        validate_density(&matrix)?;
        Ok(Self { matrix })
    }

    pub fn matrix(&self) -> &Mat4 {
        &self.matrix
    }

    pub fn maximally_mixed() -> Self {
        Self { matrix: linalg::scale(&linalg::identity(), 0.25) }
    }

    /// Ascending spectrum.
    pub fn eigenvalues(&self) -> [f64; 4] {
        hermitian_eigenvalues(&self.matrix)
    }

    /// `(U_A ⊗ U_B) ρ (U_A ⊗ U_B)†`.
    pub fn apply_local(&self, ua: &Mat2, ub: &Mat2) -> Result<Self> {
        Self::new(conjugate(&kron(ua, ub), &self.matrix))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: StateJson = serde_json::from_str(text)?;
        let mut m = linalg::zeros::<4>();
        for i in 0..4 {
            for j in 0..4 {
                m[i][j] = C64::new(raw.re[i][j], raw.im[i][j]);
            }
        }
        Self::new(m)
    }

    /// `{"re": [[..]], "im": [[..]]}` with every entry at 17 significant digits.
    pub fn to_json(&self) -> String {
        let grid = |part: fn(&C64) -> f64| {
            let rows: Vec<String> = self
                .matrix
                .iter()
                .map(|row| {
                    let cells: Vec<String> = row.iter().map(|z| format!("{:.16e}", part(z))).collect();
                    format!("[{}]", cells.join(", "))
                })
                .collect();
            format!("[\n    {}\n  ]", rows.join(",\n    "))
        };
        format!("{{\n  \"re\": {},\n  \"im\": {}\n}}\n", grid(|z| z.re), grid(|z| z.im))
    }
}

#[derive(Serialize, Deserialize)]
struct StateJson {
    re: [[f64; 4]; 4],
    im: [[f64; 4]; 4],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    A,
    B,
}

/// Reduced state of the subsystem on `side`.
pub fn partial_trace(rho: &TwoQubitState, side: Side) -> Mat2 {
    let m = &rho.matrix;
    let mut out = linalg::zeros::<2>();
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = match side {
                Side::A => m[2 * i][2 * j] + m[2 * i + 1][2 * j + 1],
                Side::B => m[i][j] + m[2 + i][2 + j],
            };
        }
    }
    out
}

/// Bloch vectors `u`, `v`, correlation matrix `M_jk = <σj⊗σk>` and spin
/// covariance `T = M - u vᵀ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FanoForm {
    pub u: [f64; 3],
    pub v: [f64; 3],
    pub m: RMat3,
    pub t: RMat3,
}

impl FanoForm {
    pub fn new(u: [f64; 3], v: [f64; 3], m: RMat3) -> Result<Self> {
        for (name, b) in [("u", &u), ("v", &v)] {
            if norm3(b) > 1.0 + BLOCH_TOL {
                return Err(Error::domain(format!("|{name}| = {} exceeds 1", norm3(b))));
            }
        }
        let t = std::array::from_fn(|j| std::array::from_fn(|k| m[j][k] - u[j] * v[k]));
        Ok(Self { u, v, m, t })
    }
}

pub fn fano_decompose(rho: &TwoQubitState) -> FanoForm {
    let m = &rho.matrix;
    let u = std::array::from_fn(|j| trace_of_product(m, &kron(&PAULI[j], &id2())).re);
    let v = std::array::from_fn(|k| trace_of_product(m, &kron(&id2(), &PAULI[k])).re);
    let corr = std::array::from_fn(|j| {
        std::array::from_fn(|k| trace_of_product(m, &kron(&PAULI[j], &PAULI[k])).re)
    });
    let t = std::array::from_fn(|j| std::array::from_fn(|k| corr[j][k] - u[j] * v[k]));
    FanoForm { u, v, m: corr, t }
}

/// `¼ [I⊗I + u·σ⊗I + I⊗v·σ + Σ M_jk σj⊗σk]`; Hermitian with unit trace but
/// not necessarily positive.
pub fn fano_matrix(u: &[f64; 3], v: &[f64; 3], m: &RMat3) -> Mat4 {
    let mut out = linalg::identity::<4>();
    for j in 0..3 {
        out = linalg::add(&out, &linalg::scale(&kron(&PAULI[j], &id2()), u[j]));
        out = linalg::add(&out, &linalg::scale(&kron(&id2(), &PAULI[j]), v[j]));
        for k in 0..3 {
            if m[j][k] != 0.0 {
                out = linalg::add(&out, &linalg::scale(&kron(&PAULI[j], &PAULI[k]), m[j][k]));
            }
        }
    }
    linalg::scale(&out, 0.25)
}

pub fn fano_compose(f: &FanoForm) -> Result<TwoQubitState> {
    let matrix = fano_matrix(&f.u, &f.v, &f.m);
    let min = hermitian_eigenvalues(&matrix)[0];
    if min < -PSD_TOL {
        return Err(Error::Unphysical { min_eigenvalue: min });
    }
    TwoQubitState::new(matrix)
}

/// Singular values `t1 >= t2 >= t3 >= 0` of the spin covariance matrix and the
/// sign `alpha` with `T = alpha K D Lᵀ` for rotations `K`, `L`.
///
/// `alpha = +1` iff `det T >= 0`. When `det T = 0` both signs describe locally
/// equivalent states and `+1` is used.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SingularTriple {
    pub t1: f64,
    pub t2: f64,
    pub t3: f64,
    pub alpha: i8,
}

impl SingularTriple {
    pub fn values(&self) -> [f64; 3] {
        [self.t1, self.t2, self.t3]
    }

    pub fn sum(&self) -> f64 {
        self.t1 + self.t2 + self.t3
    }

    /// `½ max(t1 + t2 + t3, 2 t1)`.
    pub fn correlation_distance(&self) -> f64 {
        0.5 * self.sum().max(2.0 * self.t1)
    }
}

pub fn singular_triple(t: &RMat3) -> SingularTriple {
    let gram = mat3_mul(t, &mat3_transpose(t));
    let eig = symmetric_eigenvalues3(&gram);
    let sv = |e: f64| if e > -1e-12 { e.max(0.0).sqrt() } else { f64::NAN };
    // ascending eigenvalues -> descending singular values
    SingularTriple {
        t1: sv(eig[2]),
        t2: sv(eig[1]),
        t3: sv(eig[0]),
        alpha: if det3(t) >= 0.0 { 1 } else { -1 },
    }
}

/// Sum of absolute eigenvalues of a Hermitian matrix.
pub fn trace_norm<const N: usize>(h: &CMat<N>) -> Result<f64> {
    let dev = hermitian_deviation(h);
    if dev > HERMITIAN_TOL {
        return Err(Error::NotHermitian(dev));
    }
    Ok(hermitian_eigenvalues(h).iter().map(|e| e.abs()).sum())
}

fn spectrum_entropy_nats<const N: usize>(vals: &[f64; N]) -> f64 {
    let clipped = vals.map(|e| e.max(0.0));
    entropy_nats(&clipped)
}

/// Von Neumann entropy of a single-qubit or two-qubit density matrix.
pub fn von_neumann_entropy<const N: usize>(rho: &CMat<N>, unit: Unit) -> Result<f64> {
    let vals = validate_density(rho)?;
    Ok(unit.from_nats(spectrum_entropy_nats(&vals)))
}

pub(crate) fn mutual_information_nats(rho: &TwoQubitState) -> f64 {
    let s = |m: &Mat2| spectrum_entropy_nats(&hermitian_eigenvalues(m));
    s(&partial_trace(rho, Side::A)) + s(&partial_trace(rho, Side::B))
        - spectrum_entropy_nats(&rho.eigenvalues())
}

/// `S(ρ_A) + S(ρ_B) - S(ρ_AB)`.
pub fn quantum_mutual_information(rho: &TwoQubitState, unit: Unit) -> f64 {
    unit.from_nats(mutual_information_nats(rho).clamp(0.0, 2.0 * LN_2))
}

pub fn product_of_marginals(rho: &TwoQubitState) -> Mat4 {
    kron(&partial_trace(rho, Side::A), &partial_trace(rho, Side::B))
}

/// `tr|ρ - ρ_A⊗ρ_B|`, cross-checked against the singular-value formula.
pub fn quantum_correlation_distance(rho: &TwoQubitState) -> Result<f64> {
    let direct = trace_norm(&linalg::sub(&rho.matrix, &product_of_marginals(rho)))?;
    let formula = singular_triple(&fano_decompose(rho).t).correlation_distance();
    if !((direct - formula).abs() <= CROSS_CHECK_TOL) {
        return Err(Error::Consistency(format!(
            "trace norm {direct} disagrees with singular-value formula {formula}"
        )));
    }
    Ok(direct)
}

/// Transpose on subsystem B.
pub fn partial_transpose(m: &Mat4) -> Mat4 {
    let mut out = linalg::zeros::<4>();
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    out[2 * i + k][2 * j + l] = m[2 * i + l][2 * j + k];
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntanglementReport {
    pub correlation_distance: f64,
    /// `2 sqrt((1 - tr ρ_A²)(1 - tr ρ_B²))`.
    pub purity_bound: f64,
    /// `t1 + t2 + t3`.
    pub covariance_sum: f64,
    pub min_partial_transpose_eigenvalue: f64,
    pub cdist_gt_one: bool,
    pub purity_criterion: bool,
    pub covariance_criterion: bool,
    pub ppt_entangled: bool,
}

impl EntanglementReport {
    /// `cdist_gt_one ⇒ purity_criterion ⇒ covariance_criterion ⇒ ppt_entangled`.
    pub fn chain_holds(&self) -> bool {
        (!self.cdist_gt_one || self.purity_criterion)
            && (!self.purity_criterion || self.covariance_criterion)
            && (!self.covariance_criterion || self.ppt_entangled)
    }
}

pub fn entanglement_report(rho: &TwoQubitState) -> Result<EntanglementReport> {
    let c = quantum_correlation_distance(rho)?;
    let purity = |m: &Mat2| trace_of_product(m, m).re;
    let pa = purity(&partial_trace(rho, Side::A));
    let pb = purity(&partial_trace(rho, Side::B));
    let purity_bound = 2.0 * ((1.0 - pa).max(0.0) * (1.0 - pb).max(0.0)).sqrt();
    let covariance_sum = singular_triple(&fano_decompose(rho).t).sum();
    let min_pt = hermitian_eigenvalues(&partial_transpose(&rho.matrix))[0];
    Ok(EntanglementReport {
        correlation_distance: c,
        purity_bound,
        covariance_sum,
        min_partial_transpose_eigenvalue: min_pt,
        cdist_gt_one: c > 1.0 + CRITERION_MARGIN,
        purity_criterion: c > purity_bound + CRITERION_MARGIN,
        covariance_criterion: covariance_sum > purity_bound + CRITERION_MARGIN,
        ppt_entangled: min_pt < -PPT_TOL,
    })
}

/// `exp(-i θ n·σ / 2)` for a (not necessarily normalised) axis `n`.
pub fn su2_from_axis_angle(axis: &[f64; 3], angle: f64) -> Mat2 {
    let n = norm3(axis);
    let mut u = linalg::scale(&id2(), (angle / 2.0).cos());
    if n > 0.0 {
        let s = (angle / 2.0).sin() / n;
        for j in 0..3 {
            let term = PAULI[j].map(|row| row.map(|z| z * C64::new(0.0, -s * axis[j])));
            u = linalg::add(&u, &term);
        }
    }
    u
}

/// Rotation `R` with `U σk U† = Σ_j R_jk σj`.
pub fn rotation_of(u: &Mat2) -> RMat3 {
    std::array::from_fn(|j| {
        std::array::from_fn(|k| 0.5 * trace_of_product(&PAULI[j], &conjugate(u, &PAULI[k])).re)
    })
}

/// The singlet `(|01> - |10>)/√2` as a projector.
pub fn singlet() -> TwoQubitState {
    let h = 0.5;
    let mut m = linalg::zeros::<4>();
    m[1][1] = C64::new(h, 0.0);
    m[2][2] = C64::new(h, 0.0);
    m[1][2] = C64::new(-h, 0.0);
    m[2][1] = C64::new(-h, 0.0);
    TwoQubitState { matrix: m }
}

/// Eigenvalues `(p0, p1, p2, p3)` of `¼[I⊗I + Σ r_j σj⊗σj]`, with `p0` the
/// singlet weight. Not checked for positivity.
pub fn bell_diagonal_eigenvalues(r: [f64; 3]) -> [f64; 4] {
    let [r1, r2, r3] = r;
    [
        0.25 * (1.0 - r1 - r2 - r3),
        0.25 * (1.0 - r1 + r2 + r3),
        0.25 * (1.0 + r1 - r2 + r3),
        0.25 * (1.0 + r1 + r2 - r3),
    ]
}

/// Inverse of [`bell_diagonal_eigenvalues`]: `r_j = 1 - 2(p0 + p_j)`.
pub fn bell_diagonal_correlations(p: [f64; 4]) -> [f64; 3] {
    [1.0 - 2.0 * (p[0] + p[1]), 1.0 - 2.0 * (p[0] + p[2]), 1.0 - 2.0 * (p[0] + p[3])]
}

#[derive(Debug, Clone, PartialEq)]
pub enum StateFamily {
    /// `p |ψ-><ψ-| + (1 - p) I/4`, `p ∈ [-1/3, 1]`.
    Werner { p: f64 },
    /// `¼[I⊗I + Σ r_j σj⊗σj]`.
    BellDiagonal { r: [f64; 3] },
    /// Minimum-information state at correlation distance `c ∈ [0, 3/2]`.
    Saturating { c: f64 },
    /// `Σ P(j,k) |j><j|⊗|k><k|` in the bases `U_A|j>`, `U_B|k>`
    /// (computational basis when `bases` is `None`).
    ClassicallyCorrelated { table: JointTable, bases: Option<(Mat2, Mat2)> },
    /// `ρ_A ⊗ ρ_B` from Bloch vectors.
    Product { u: [f64; 3], v: [f64; 3] },
}

pub fn make_state(family: &StateFamily) -> Result<TwoQubitState> {
    match family {
        StateFamily::Werner { p } => {
            let p = *p;
            if !(-1.0 / 3.0 - 1e-12..=1.0 + 1e-12).contains(&p) {
                return Err(Error::domain(format!("Werner weight p = {p} outside [-1/3, 1]")));
            }
            let mixed = linalg::scale(&linalg::identity::<4>(), (1.0 - p) / 4.0);
            TwoQubitState::new(linalg::add(&linalg::scale(singlet().matrix(), p), &mixed))
        }
        StateFamily::BellDiagonal { r } => {
            let spectrum = bell_diagonal_eigenvalues(*r);
            let min = spectrum.iter().cloned().fold(f64::INFINITY, f64::min);
            if min < -PSD_TOL || r.iter().any(|x| !x.is_finite()) {
                return Err(Error::Unphysical { min_eigenvalue: min });
            }
            let m = [[r[0], 0.0, 0.0], [0.0, r[1], 0.0], [0.0, 0.0, r[2]]];
            TwoQubitState::new(fano_matrix(&[0.0; 3], &[0.0; 3], &m))
        }
        StateFamily::Saturating { c } => {
            let c = *c;
            if !(0.0..=1.5).contains(&c) {
                return Err(Error::domain(format!("correlation distance {c} outside [0, 3/2]")));
            }
            if c <= crate::bounds::c0() {
                make_state(&StateFamily::BellDiagonal { r: [c, 0.0, 0.0] })
            } else {
                make_state(&StateFamily::Werner { p: 2.0 * c / 3.0 })
            }
        }
        StateFamily::ClassicallyCorrelated { table, bases } => {
            if table.shape() != (2, 2) {
                return Err(Error::domain("classically correlated qubits need a 2x2 table"));
            }
            let mut diag = linalg::zeros::<4>();
            for (i, p) in table.entries().iter().enumerate() {
                diag[i][i] = C64::new(*p, 0.0);
            }
            let state = TwoQubitState::new(diag)?;
            match bases {
                None => Ok(state),
                Some((ua, ub)) => {
                    for u in [ua, ub] {
                        let err = linalg::max_abs_diff(&linalg::matmul(u, &dagger(u)), &id2());
                        if err > 1e-10 {
                            return Err(Error::domain(format!("basis change is not unitary ({err:e})")));
                        }
                    }
                    state.apply_local(ua, ub)
                }
            }
        }
        StateFamily::Product { u, v } => {
            for (name, b) in [("u", u), ("v", v)] {
                if norm3(b) > 1.0 + BLOCH_TOL {
                    return Err(Error::domain(format!("|{name}| = {} exceeds 1", norm3(b))));
                }
            }
            TwoQubitState::new(kron(&bloch_to_density(u), &bloch_to_density(v)))
        }
    }
}

/// `U⊗U` twirl: `u, v -> 0` and `M -> (tr M / 3) I`.
pub fn twirl(rho: &TwoQubitState) -> Result<TwoQubitState> {
    let f = fano_decompose(rho);
    let w = (f.m[0][0] + f.m[1][1] + f.m[2][2]) / 3.0;
    let m = [[w, 0.0, 0.0], [0.0, w, 0.0], [0.0, 0.0, w]];
    fano_compose(&FanoForm::new([0.0; 3], [0.0; 3], m)?)
}

/// Result of replacing the marginals of `ρ` by maximally mixed ones.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ShiftOutcome {
    Physical(TwoQubitState),
    NotPsd { min_eigenvalue: f64, matrix: Mat4 },
}

/// `ρ' = ρ - ρ_A⊗ρ_B + ¼ I⊗I`.
pub fn conjecture_shift(rho: &TwoQubitState) -> ShiftOutcome {
    let shifted = linalg::add(
        &linalg::sub(&rho.matrix, &product_of_marginals(rho)),
        &linalg::scale(&linalg::identity::<4>(), 0.25),
    );
    let min = hermitian_eigenvalues(&shifted)[0];
    if min < -PSD_TOL {
        return ShiftOutcome::NotPsd { min_eigenvalue: min, matrix: shifted };
    }
    match TwoQubitState::new(shifted) {
        Ok(s) => ShiftOutcome::Physical(s),
        Err(_) => ShiftOutcome::NotPsd { min_eigenvalue: min, matrix: shifted },
    }
}

/// Spin measurement directions on A and B.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProjectivePair {
    pub a_axis: [f64; 3],
    pub b_axis: [f64; 3],
}

impl ProjectivePair {
    pub fn new(a_axis: [f64; 3], b_axis: [f64; 3]) -> Result<Self> {
        for (name, n) in [("a_axis", &a_axis), ("b_axis", &b_axis)] {
            if (norm3(n) - 1.0).abs() > AXIS_TOL {
                return Err(Error::domain(format!("{name} has norm {}, expected 1", norm3(n))));
            }
        }
        Ok(Self { a_axis, b_axis })
    }
}

/// Born-rule outcome table `P(m, n) = tr[ρ Π_m ⊗ Π_n]`, `Π_± = (I ± n·σ)/2`,
/// with outcome `+1` at index 0.
pub fn measure_projective(rho: &TwoQubitState, pair: &ProjectivePair) -> Result<JointTable> {
    let pair = ProjectivePair::new(pair.a_axis, pair.b_axis)?;
    let projectors = |axis: &[f64; 3]| {
        let minus = axis.map(|x| -x);
        [bloch_to_density(axis), bloch_to_density(&minus)]
    };
    let pa = projectors(&pair.a_axis);
    let pb = projectors(&pair.b_axis);
    let mut probs = Vec::with_capacity(4);
    for a in &pa {
        for b in &pb {
            probs.push(trace_of_product(&rho.matrix, &kron(a, b)).re);
        }
    }
    JointTable::from_flat(2, 2, probs)
}

/// `u·v` helper used by twirl checks.
pub fn bloch_overlap(f: &FanoForm) -> f64 {
    dot3(&f.u, &f.v)
}
