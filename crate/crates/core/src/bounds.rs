//! Lower bounds on mutual information as functions of the correlation
//! distance `C`, the entropy branches `H1`, `H2`, `H3` and the crossover `C0`.

use std::f64::consts::{LN_2, LOG2_E};
use std::sync::OnceLock;

use crate::prob::{binary_entropy_of_bias, entropy_nats};
use crate::{Error, Result, Unit};

/// Inputs this close outside a bound's domain are clamped rather than rejected.
const DOMAIN_SLACK: f64 = 1e-12;
/// Tolerance of the cached crossover.
pub const C0_TOLERANCE: f64 = 1e-12;

fn clamp_domain(c: f64, max: f64, what: &str) -> Result<f64> {
    if !c.is_finite() || c < -DOMAIN_SLACK || c > max + DOMAIN_SLACK {
        return Err(Error::domain(format!("{what}: correlation distance {c} outside [0, {max}]")));
    }
    Ok(c.clamp(0.0, max))
}

/// `½ C² log e`.
pub fn pinsker_bound(c: f64, unit: Unit) -> Result<f64> {
    if !c.is_finite() || c < 0.0 {
        return Err(Error::domain(format!("pinsker bound: correlation distance {c} is negative")));
    }
    Ok(unit.from_nats(0.5 * c * c))
}

/// `log 2 - H((1 + C)/2, (1 - C)/2)`, tight for two-valued variables.
pub fn classical_tight_bound(c: f64, unit: Unit) -> Result<f64> {
    let c = clamp_domain(c, 1.0, "classical bound")?;
    Ok(unit.from_nats((LN_2 - binary_entropy_of_bias(c)).max(0.0)))
}

fn h1_nats(c: f64) -> f64 {
    let (lo, hi) = ((1.0 - c) / 4.0, (1.0 + c) / 4.0);
    entropy_nats(&[lo, lo, hi, hi])
}

fn h2_nats(c: f64) -> f64 {
    entropy_nats(&[0.25 - c / 2.0, 0.25 + c / 6.0, 0.25 - c / 6.0, 0.25 - c / 6.0])
}

fn h3_nats(c: f64) -> f64 {
    let lo = 0.25 - c / 6.0;
    entropy_nats(&[0.25 + c / 2.0, lo, lo, lo])
}

/// Values of the three entropy branches in bits; `None` where a branch's
/// arguments would leave the probability simplex.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyCurves {
    pub h1: Option<f64>,
    pub h2: Option<f64>,
    pub h3: Option<f64>,
}

pub fn entropy_curves(c: f64) -> EntropyCurves {
    let within = |max: f64| c.is_finite() && (-DOMAIN_SLACK..=max + DOMAIN_SLACK).contains(&c);
    let at = |max: f64, f: fn(f64) -> f64| within(max).then(|| f(c.clamp(0.0, max)) * LOG2_E);
    EntropyCurves { h1: at(1.0, h1_nats), h2: at(0.5, h2_nats), h3: at(1.5, h3_nats) }
}

/// Root of `H1(C) - H3(C)` on `(1/2, 1)` by bisection.
pub fn compute_c0(tolerance: f64) -> Result<f64> {
    if !(tolerance > 0.0) {
        return Err(Error::domain(format!("tolerance must be positive, got {tolerance}")));
    }
    let gap = |c: f64| h1_nats(c) - h3_nats(c);
    let (mut lo, mut hi) = (0.5, 1.0);
    debug_assert!(gap(lo) > 0.0 && gap(hi) < 0.0);
    while hi - lo > tolerance {
        let mid = 0.5 * (lo + hi);
        if gap(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if mid == lo && mid == hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// The crossover `C0`, computed once on first use.
pub fn c0() -> f64 {
    static C0: OnceLock<f64> = OnceLock::new();
    *C0.get_or_init(|| compute_c0(C0_TOLERANCE).expect("positive tolerance"))
}

/// `log 4 - H1(C)` for `C <= C0`, `log 4 - H3(C)` above.
pub fn quantum_tight_bound(c: f64, unit: Unit) -> Result<f64> {
    let c = clamp_domain(c, 1.5, "quantum bound")?;
    let h = if c <= c0() { h1_nats(c) } else { h3_nats(c) };
    Ok(unit.from_nats((2.0 * LN_2 - h).max(0.0)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorrelationKind {
    Classical,
    Quantum,
}

/// `2(n-1)/n` for `n`-valued variables, `2(n²-1)/n²` for `n`-level systems.
pub fn max_correlation_distance(n: usize, kind: CorrelationKind) -> Result<f64> {
    if n < 2 {
        return Err(Error::domain(format!("alphabet size must be at least 2, got {n}")));
    }
    let d = match kind {
        CorrelationKind::Classical => n as f64,
        CorrelationKind::Quantum => (n * n) as f64,
    };
    Ok(2.0 * (d - 1.0) / d)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    Pinsker,
    ClassicalTight,
    QuantumTight,
}

/// A named bound curve in a fixed unit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundCurve {
    pub kind: BoundKind,
    pub unit: Unit,
}

impl BoundCurve {
    pub fn new(kind: BoundKind, unit: Unit) -> Self {
        Self { kind, unit }
    }

    /// Interval of correlation distances on which the curve is defined.
    pub fn domain(&self) -> (f64, f64) {
        match self.kind {
            BoundKind::Pinsker => (0.0, 2.0),
            BoundKind::ClassicalTight => (0.0, 1.0),
            BoundKind::QuantumTight => (0.0, 1.5),
        }
    }

    pub fn eval(&self, c: f64) -> Result<f64> {
        match self.kind {
            BoundKind::Pinsker => pinsker_bound(c, self.unit),
            BoundKind::ClassicalTight => classical_tight_bound(c, self.unit),
            BoundKind::QuantumTight => quantum_tight_bound(c, self.unit),
        }
    }
}
