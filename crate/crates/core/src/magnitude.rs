use std::fmt;

use serde::{Serialize, Serializer};

/// A non-negative quantity that may be unbounded at a singularity.
///
/// Serializes as a JSON number when finite and as the string `"inf"` otherwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Magnitude {
    Finite(f64),
    Infinite,
}

impl Magnitude {
    /// Wraps `value`, mapping non-finite values to [`Magnitude::Infinite`].
    pub fn from_f64(value: f64) -> Self {
        if value.is_finite() {
            Magnitude::Finite(value)
        } else {
            Magnitude::Infinite
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Magnitude::Infinite)
    }

    pub fn finite(&self) -> Option<f64> {
        match *self {
            Magnitude::Finite(v) => Some(v),
            Magnitude::Infinite => None,
        }
    }

    pub fn as_f64(&self) -> f64 {
        match *self {
            Magnitude::Finite(v) => v,
            Magnitude::Infinite => f64::INFINITY,
        }
    }

    pub fn max(self, other: Magnitude) -> Magnitude {
        match (self, other) {
            (Magnitude::Finite(a), Magnitude::Finite(b)) => Magnitude::Finite(a.max(b)),
            _ => Magnitude::Infinite,
        }
    }

    pub fn min(self, other: Magnitude) -> Magnitude {
        match (self, other) {
            (Magnitude::Finite(a), Magnitude::Finite(b)) => Magnitude::Finite(a.min(b)),
            (Magnitude::Finite(a), Magnitude::Infinite)
            | (Magnitude::Infinite, Magnitude::Finite(a)) => Magnitude::Finite(a),
            (Magnitude::Infinite, Magnitude::Infinite) => Magnitude::Infinite,
        }
    }
}

impl fmt::Display for Magnitude {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Magnitude::Finite(v) => write!(f, "{v}"),
            Magnitude::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Magnitude {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Magnitude::Finite(v) => serializer.serialize_f64(*v),
            Magnitude::Infinite => serializer.serialize_str("inf"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn non_finite_maps_to_marker() {
        assert!(Magnitude::from_f64(f64::INFINITY).is_infinite());
        assert!(Magnitude::from_f64(f64::NAN).is_infinite());
        assert_eq!(Magnitude::from_f64(2.5), Magnitude::Finite(2.5));
    }

    #[test]
    fn json_uses_inf_literal() {
        let v = serde_json::to_string(&[Magnitude::Finite(1.5), Magnitude::Infinite]).unwrap();
        assert_eq!(v, r#"[1.5,"inf"]"#);
    }

    #[test]
    fn extremes() {
        let a = Magnitude::Finite(1.0);
        assert_eq!(a.max(Magnitude::Infinite), Magnitude::Infinite);
        assert_eq!(a.min(Magnitude::Infinite), a);
        assert_eq!(Magnitude::Finite(3.0).max(a), Magnitude::Finite(3.0));
    }
}
