//! CHSH values for hidden-variable models and the shared correlation needed
//! to simulate a Bell violation when outcome independence is relaxed.
//!
//! Outcomes `+1`/`-1` sit at table indices 0/1. The four setting pairs are
//! ordered `(A,B), (A,B'), (A',B), (A',B')`.

use std::collections::BTreeMap;
use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::prob::{classical_correlation_distance, entropy_nats, JointTable, ProbVector};
use crate::{Error, Result};

/// Marginals of a conditional table may differ across settings by this much.
pub const NO_SIGNALING_TOL: f64 = 1e-9;
/// Models whose largest conditional correlation distance stays below this are
/// treated as outcome independent.
pub const OUTCOME_INDEPENDENCE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Setting {
    AB,
    ABp,
    ApB,
    ApBp,
}

impl Setting {
    pub const ALL: [Setting; 4] = [Setting::AB, Setting::ABp, Setting::ApB, Setting::ApBp];

    pub fn key(self) -> &'static str {
        match self {
            Setting::AB => "AB",
            Setting::ABp => "ABp",
            Setting::ApB => "ApB",
            Setting::ApBp => "ApBp",
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

/// `<AB> + <AB'> + <A'B> - <A'B'>`.
pub fn chsh_value(correlators: [f64; 4]) -> Result<f64> {
    if let Some(bad) = correlators.iter().find(|c| !(c.abs() <= 1.0)) {
        return Err(Error::domain(format!("correlator {bad} outside [-1, 1]")));
    }
    let [ab, abp, apb, apbp] = correlators;
    Ok(ab + abp + apb - apbp)
}

/// `4 / (2 - C_max)`.
pub fn relaxed_chsh_bound(c_max: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&c_max) {
        return Err(Error::domain(format!("C_max = {c_max} outside [0, 1]")));
    }
    Ok(4.0 / (2.0 - c_max))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimulationResources {
    /// `2V / (2 + V)`.
    pub c_max_required: f64,
    /// `log 2 - H((2 + 3V)/(4 + 2V), (2 - V)/(4 + 2V))`, in bits.
    pub i_min_bits: f64,
}

/// Resources needed to reach a CHSH value of `2 + V`.
pub fn simulation_resources(v: f64) -> Result<SimulationResources> {
    if !(0.0..=2.0).contains(&v) {
        return Err(Error::domain(format!("violation V = {v} outside [0, 2]")));
    }
    let denom = 4.0 + 2.0 * v;
    let h = entropy_nats(&[(2.0 + 3.0 * v) / denom, (2.0 - v) / denom]);
    Ok(SimulationResources {
        c_max_required: 2.0 * v / (2.0 + v),
        i_min_bits: ((LN_2 - h) / LN_2).max(0.0),
    })
}

/// A finite hidden-variable model: one distribution over `λ`, shared by all
/// setting pairs, and a conditional outcome table per `(setting, λ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LhvModel {
    lambda_weights: ProbVector,
    conditionals: [Vec<JointTable>; 4],
}

#[derive(Serialize, Deserialize)]
struct ModelJson {
    lambda_weights: Vec<f64>,
    conditionals: BTreeMap<String, Vec<Vec<Vec<f64>>>>,
}

impl LhvModel {
    /// Validates shapes and no-signalling.
    pub fn new(lambda_weights: ProbVector, conditionals: [Vec<JointTable>; 4]) -> Result<Self> {
        let n = lambda_weights.len();
        for s in Setting::ALL {
            let tables = &conditionals[s.index()];
            if tables.len() != n {
                return Err(Error::InvalidModel(format!(
                    "{} has {} conditionals for {n} hidden values",
                    s.key(),
                    tables.len()
                )));
            }
            if let Some(t) = tables.iter().find(|t| t.shape() != (2, 2)) {
                let (r, c) = t.shape();
                return Err(Error::InvalidModel(format!("{} conditional is {r}x{c}, expected 2x2", s.key())));
            }
        }
        // (setting whose marginal is compared, side, other setting)
        let pairs = [
            (Setting::AB, Setting::ABp, true, "A"),
            (Setting::ApB, Setting::ApBp, true, "A'"),
            (Setting::AB, Setting::ApB, false, "B"),
            (Setting::ABp, Setting::ApBp, false, "B'"),
        ];
        for lam in 0..n {
            for (s1, s2, row_side, name) in pairs {
                let m = |s: Setting| {
                    let t = &conditionals[s.index()][lam];
                    if row_side { t.marginal_a() } else { t.marginal_b() }
                };
                let (m1, m2) = (m(s1), m(s2));
                let diff = (m1.weights()[0] - m2.weights()[0]).abs();
                if diff > NO_SIGNALING_TOL {
                    return Err(Error::InvalidModel(format!(
                        "signalling: marginal of {name} at lambda {lam} differs by {diff:e} between {} and {}",
                        s1.key(),
                        s2.key()
                    )));
                }
            }
        }
        Ok(Self { lambda_weights, conditionals })
    }

    pub fn lambda_weights(&self) -> &ProbVector {
        &self.lambda_weights
    }

    pub fn conditional(&self, setting: Setting, lambda: usize) -> &JointTable {
        &self.conditionals[setting.index()][lambda]
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: ModelJson = serde_json::from_str(text)?;
        let weights = ProbVector::new(raw.lambda_weights)?;
        let mut conditionals: [Vec<JointTable>; 4] = Default::default();
        for s in Setting::ALL {
            let tables = raw
                .conditionals
                .get(s.key())
                .ok_or_else(|| Error::InvalidModel(format!("missing conditionals for {}", s.key())))?;
            conditionals[s.index()] =
                tables.iter().map(|t| JointTable::new(t.clone())).collect::<Result<_>>()?;
        }
        if let Some(extra) = raw.conditionals.keys().find(|k| Setting::ALL.iter().all(|s| s.key() != k.as_str())) {
            return Err(Error::InvalidModel(format!("unknown setting key {extra:?}")));
        }
        Self::new(weights, conditionals)
    }

    pub fn to_json(&self) -> String {
        let conditionals = Setting::ALL
            .iter()
            .map(|s| (s.key().to_string(), self.conditionals[s.index()].iter().map(JointTable::to_rows).collect()))
            .collect();
        let raw = ModelJson { lambda_weights: self.lambda_weights.weights().to_vec(), conditionals };
        serde_json::to_string_pretty(&raw).expect("model serialises")
    }
}

/// `Σ a b P(a, b)` for a 2×2 table.
pub fn correlator(t: &JointTable) -> f64 {
    t.get(0, 0) - t.get(0, 1) - t.get(1, 0) + t.get(1, 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelAnalysis {
    /// Observed correlators, averaged over `λ`, in setting order.
    pub correlators: [f64; 4],
    pub chsh: f64,
    /// Largest correlation distance of any conditional table.
    pub c_max: f64,
    pub outcome_independent: bool,
}

pub fn model_analysis(m: &LhvModel) -> ModelAnalysis {
    let mut correlators = [0.0; 4];
    let mut c_max = 0.0f64;
    for (lam, &w) in m.lambda_weights.weights().iter().enumerate() {
        for s in Setting::ALL {
            let t = m.conditional(s, lam);
            correlators[s.index()] += w * correlator(t);
            c_max = c_max.max(classical_correlation_distance(t));
        }
    }
    let [ab, abp, apb, apbp] = correlators;
    ModelAnalysis {
        correlators,
        chsh: ab + abp + apb - apbp,
        c_max,
        outcome_independent: c_max < OUTCOME_INDEPENDENCE_TOL,
    }
}
