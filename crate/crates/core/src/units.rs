use std::f64::consts::LN_2;
use std::fmt;

/// Unit of information. Everything is computed in nats and converted once on output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Unit {
    #[default]
    Bits,
    Nats,
}

impl Unit {
    /// Converts a value expressed in nats into this unit.
    #[inline]
    pub fn from_nats(self, nats: f64) -> f64 {
        match self {
            Unit::Bits => nats / LN_2,
            Unit::Nats => nats,
        }
    }

    #[inline]
    pub fn to_nats(self, value: f64) -> f64 {
        match self {
            Unit::Bits => value * LN_2,
            Unit::Nats => value,
        }
    }
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Unit::Bits => f.write_str("bits"),
            Unit::Nats => f.write_str("nats"),
        }
    }
}
