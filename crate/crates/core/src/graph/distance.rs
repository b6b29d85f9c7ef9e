use std::fmt;

use serde::{Deserialize, Serialize};

/// Raw sentinel used inside the hot loops for "no path".
pub const INF: u64 = u64::MAX;

/// An exact shortest-path length, or the absence of any path.
///
/// `Unreachable` orders after every finite value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum DistanceValue {
    Finite(u64),
    Unreachable,
}

impl DistanceValue {
    pub fn from_raw(raw: u64) -> Self {
        if raw == INF {
            DistanceValue::Unreachable
        } else {
            DistanceValue::Finite(raw)
        }
    }

    pub fn raw(self) -> u64 {
        match self {
            DistanceValue::Finite(d) => d,
            DistanceValue::Unreachable => INF,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, DistanceValue::Finite(_))
    }

    pub fn finite(self) -> Option<u64> {
        match self {
            DistanceValue::Finite(d) => Some(d),
            DistanceValue::Unreachable => None,
        }
    }

    /// Sum with `Unreachable` absorbing.
    pub fn plus(self, other: DistanceValue) -> DistanceValue {
        match (self, other) {
            (DistanceValue::Finite(a), DistanceValue::Finite(b)) => {
                DistanceValue::from_raw(a.saturating_add(b))
            }
            _ => DistanceValue::Unreachable,
        }
    }
}

impl fmt::Display for DistanceValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DistanceValue::Finite(d) => write!(f, "{d}"),
            DistanceValue::Unreachable => f.write_str("UNREACHABLE"),
        }
    }
}
