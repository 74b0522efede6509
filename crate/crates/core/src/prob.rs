//! Classical probability: distributions, entropies, distances, mutual
//! information and the `(x, y, r)` parameterisation of two-valued joint tables.
//!
//! Two-valued outcomes are labelled `+1` and `-1`, stored at table indices
//! `0` and `1` respectively.

use std::fmt::Write as _;

use crate::{Error, Result, Unit};

/// Allowed deviation of a distribution's total from one.
pub const NORMALIZATION_TOL: f64 = 1e-9;
/// Negative weights down to `-CLIP_TOL` are treated as float noise and set to zero.
pub const CLIP_TOL: f64 = 1e-12;
/// Slack on the two sides of the `(x, y, r)` positivity condition.
pub const POSITIVITY_TOL: f64 = 1e-12;

fn validate_weights(mut weights: Vec<f64>) -> Result<Vec<f64>> {
    if weights.is_empty() {
        return Err(Error::InvalidDistribution("empty distribution".into()));
    }
    for (i, w) in weights.iter_mut().enumerate() {
        if !w.is_finite() {
            return Err(Error::InvalidDistribution(format!("weight {i} is not finite")));
        }
        if *w < 0.0 {
            if *w < -CLIP_TOL {
                return Err(Error::InvalidDistribution(format!("weight {i} is negative ({w:e})")));
            }
            *w = 0.0;
        }
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::InvalidDistribution(format!("weights sum to {total}, not 1")));
    }
    Ok(weights)
}

/// A probability distribution over a finite alphabet.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbVector {
    weights: Vec<f64>,
}

impl ProbVector {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        Ok(Self { weights: validate_weights(weights)? })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        Self::new(vec![1.0 / n as f64; n])
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// `-Σ w ln w` with `0 ln 0 = 0`. Callers guarantee non-negative weights.
pub(crate) fn entropy_nats(weights: &[f64]) -> f64 {
    weights
        .iter()
        .filter(|&&w| w > 0.0)
        .map(|&w| -w * w.ln())
        .sum()
}

/// Shannon entropy of `p`.
pub fn shannon_entropy(p: &ProbVector, unit: Unit) -> f64 {
    unit.from_nats(entropy_nats(&p.weights))
}

fn check_lengths(p: &ProbVector, q: &ProbVector) -> Result<()> {
    if p.len() != q.len() {
        return Err(Error::LengthMismatch { left: p.len(), right: q.len() });
    }
    Ok(())
}

/// Relative entropy `H(p‖q)`; `+∞` when `p` puts weight where `q` does not.
pub fn relative_entropy(p: &ProbVector, q: &ProbVector, unit: Unit) -> Result<f64> {
    check_lengths(p, q)?;
    let mut acc = 0.0;
    for (&pj, &qj) in p.weights.iter().zip(&q.weights) {
        if pj == 0.0 {
            continue;
        }
        if qj == 0.0 {
            return Ok(f64::INFINITY);
        }
        acc += pj * (pj.ln() - qj.ln());
    }
    // Exact cancellation can leave a -1e-17 residue.
    Ok(unit.from_nats(acc.max(0.0)))
}

/// L1 distance `Σ |p_j - q_j|`.
pub fn variational_distance(p: &ProbVector, q: &ProbVector) -> Result<f64> {
    check_lengths(p, q)?;
    Ok(p.weights.iter().zip(&q.weights).map(|(a, b)| (a - b).abs()).sum())
}

/// Joint distribution of two finite variables, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct JointTable {
    rows: usize,
    cols: usize,
    probs: Vec<f64>,
}

impl JointTable {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        if n == 0 || m == 0 {
            return Err(Error::InvalidDistribution("empty table".into()));
        }
        if let Some(bad) = rows.iter().position(|r| r.len() != m) {
            return Err(Error::InvalidDistribution(format!(
                "row {bad} has {} entries, expected {m}",
                rows[bad].len()
            )));
        }
        Self::from_flat(n, m, rows.into_iter().flatten().collect())
    }

    pub fn from_flat(rows: usize, cols: usize, probs: Vec<f64>) -> Result<Self> {
        if rows * cols != probs.len() || probs.is_empty() {
            return Err(Error::InvalidDistribution(format!(
                "{} entries do not form a {rows}x{cols} table",
                probs.len()
            )));
        }
        Ok(Self { rows, cols, probs: validate_weights(probs)? })
    }

    /// Product table `P_A ⊗ P_B`.
    pub fn product(pa: &ProbVector, pb: &ProbVector) -> Self {
        let probs = pa
            .weights
            .iter()
            .flat_map(|&a| pb.weights.iter().map(move |&b| a * b))
            .collect();
        Self { rows: pa.len(), cols: pb.len(), probs }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.probs[i * self.cols + j]
    }

    pub fn entries(&self) -> &[f64] {
        &self.probs
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.probs.chunks(self.cols).map(<[f64]>::to_vec).collect()
    }

    fn row_sums(&self) -> Vec<f64> {
        self.probs.chunks(self.cols).map(|r| r.iter().sum()).collect()
    }

    fn col_sums(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.cols];
        for row in self.probs.chunks(self.cols) {
            for (o, p) in out.iter_mut().zip(row) {
                *o += p;
            }
        }
        out
    }

    /// Row marginal `P_A`.
    pub fn marginal_a(&self) -> ProbVector {
        ProbVector { weights: self.row_sums() }
    }

    /// Column marginal `P_B`.
    pub fn marginal_b(&self) -> ProbVector {
        ProbVector { weights: self.col_sums() }
    }

    pub fn product_of_marginals(&self) -> JointTable {
        Self::product(&self.marginal_a(), &self.marginal_b())
    }

    /// The table flattened into a distribution over `rows * cols` outcomes.
    pub fn as_prob_vector(&self) -> ProbVector {
        ProbVector { weights: self.probs.clone() }
    }

    /// Parses comma-separated rows. Blank lines and `#` comments are skipped.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let row = line
                .split(',')
                .map(|cell| {
                    cell.trim().parse::<f64>().map_err(|e| {
                        Error::Parse(format!("line {}: {:?}: {e}", lineno + 1, cell.trim()))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        Self::new(rows)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for row in self.probs.chunks(self.cols) {
            let cells: Vec<String> = row.iter().map(|&p| format!("{p:?}")).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }
}

/// Mutual information `H(P_A) + H(P_B) - H(P_AB)`.
pub fn classical_mutual_information(table: &JointTable, unit: Unit) -> f64 {
    let nats = entropy_nats(&table.row_sums()) + entropy_nats(&table.col_sums())
        - entropy_nats(&table.probs);
    unit.from_nats(nats.max(0.0))
}

/// Correlation distance `Σ |P_AB - P_A P_B|`.
pub fn classical_correlation_distance(table: &JointTable) -> f64 {
    let pa = table.row_sums();
    let pb = table.col_sums();
    let mut acc = 0.0;
    for (i, a) in pa.iter().enumerate() {
        for (j, b) in pb.iter().enumerate() {
            acc += (table.get(i, j) - a * b).abs();
        }
    }
    acc
}

/// Marginal biases `x`, `y` and correlation `r` of a two-valued joint table:
/// `P(a, b) = [(1 + a x)(1 + b y) + a b r] / 4`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct BinaryParams {
    pub x: f64,
    pub y: f64,
    pub r: f64,
}

impl BinaryParams {
    pub fn new(x: f64, y: f64, r: f64) -> Result<Self> {
        let b = Self { x, y, r };
        b.check_positivity()?;
        Ok(b)
    }

    /// `|x + y| - 1 <= r + x y <= 1 - |x - y|`, equivalent to all four table
    /// entries being non-negative.
    pub fn check_positivity(&self) -> Result<()> {
        let Self { x, y, r } = *self;
        if ![x, y, r].iter().all(|v| v.is_finite()) {
            return Err(Error::domain("binary parameters must be finite"));
        }
        let mid = r + x * y;
        let lower = (x + y).abs() - 1.0;
        let upper = 1.0 - (x - y).abs();
        if mid < lower - POSITIVITY_TOL {
            return Err(Error::domain(format!(
                "lower positivity bound violated: r + xy = {mid} < |x + y| - 1 = {lower}"
            )));
        }
        if mid > upper + POSITIVITY_TOL {
            return Err(Error::domain(format!(
                "upper positivity bound violated: r + xy = {mid} > 1 - |x - y| = {upper}"
            )));
        }
        Ok(())
    }

    pub fn is_positive(&self) -> bool {
        self.check_positivity().is_ok()
    }

    /// The four table entries, indexed `[a][b]` with `+1 -> 0`, `-1 -> 1`.
    pub(crate) fn raw_entries(&self) -> [[f64; 2]; 2] {
        let sign = [1.0, -1.0];
        let mut out = [[0.0; 2]; 2];
        for (i, a) in sign.iter().enumerate() {
            for (j, b) in sign.iter().enumerate() {
                out[i][j] = ((1.0 + a * self.x) * (1.0 + b * self.y) + a * b * self.r) / 4.0;
            }
        }
        out
    }
}

pub fn binary_joint_from_params(b: &BinaryParams) -> Result<JointTable> {
    b.check_positivity()?;
    let e = b.raw_entries();
    let probs = e.iter().flatten().map(|p| p.max(0.0)).collect();
    JointTable::from_flat(2, 2, probs)
}

pub fn params_from_binary(table: &JointTable) -> Result<BinaryParams> {
    if table.shape() != (2, 2) {
        let (n, m) = table.shape();
        return Err(Error::domain(format!("expected a 2x2 table, got {n}x{m}")));
    }
    let pa = table.get(0, 0) + table.get(0, 1);
    let pb = table.get(0, 0) + table.get(1, 0);
    Ok(BinaryParams {
        x: 2.0 * pa - 1.0,
        y: 2.0 * pb - 1.0,
        r: 4.0 * (table.get(0, 0) - pa * pb),
    })
}

/// Binary entropy of `((1 + r)/2, (1 - r)/2)` in nats.
pub(crate) fn binary_entropy_of_bias(r: f64) -> f64 {
    entropy_nats(&[(1.0 + r) / 2.0, (1.0 - r) / 2.0])
}

/// `f(r) = I(P_AB) - log 2 + H((1 + r)/2, (1 - r)/2)`; non-negative on every
/// valid table, zero for unbiased marginals.
pub fn classical_witness_f(b: &BinaryParams, unit: Unit) -> Result<f64> {
    let table = binary_joint_from_params(b)?;
    let mi = classical_mutual_information(&table, Unit::Nats);
    Ok(unit.from_nats(mi - std::f64::consts::LN_2 + binary_entropy_of_bias(b.r)))
}

/// Closed-form curvature of the witness at `r = 0`, in nats:
/// `1 / ((1 - x²)(1 - y²)) - 1`.
pub fn witness_second_derivative_check(x: f64, y: f64) -> Result<f64> {
    if !(x.abs() < 1.0 && y.abs() < 1.0) {
        return Err(Error::domain(format!(
            "curvature at r = 0 is singular unless |x|, |y| < 1 (got x = {x}, y = {y})"
        )));
    }
    Ok(1.0 / ((1.0 - x * x) * (1.0 - y * y)) - 1.0)
}
