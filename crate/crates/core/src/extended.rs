//! Extended real numbers for thresholds and drifts that may be infinite.

use std::cmp::Ordering;
use std::fmt;

use serde::de::{self, Deserializer, Visitor};
use serde::{Serialize, Serializer};

use crate::error::{GouError, Result};

/// A real number or one of `±∞`. NaN is unrepresentable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendedReal {
    NegInf,
    Finite(f64),
    PosInf,
}

pub use ExtendedReal::{NegInf, PosInf};

impl ExtendedReal {
    pub const ZERO: ExtendedReal = ExtendedReal::Finite(0.0);

    /// Converts an `f64`, mapping IEEE infinities to the matching variant.
    ///
    /// Panics on NaN; callers must never produce one.
    pub fn new(v: f64) -> Self {
        assert!(!v.is_nan(), "ExtendedReal cannot hold NaN");
        if v == f64::INFINITY {
            PosInf
        } else if v == f64::NEG_INFINITY {
            NegInf
        } else {
            ExtendedReal::Finite(v)
        }
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            ExtendedReal::Finite(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ExtendedReal::Finite(_))
    }

    /// The value as an `f64`, with infinities mapped to IEEE infinities.
    pub fn to_f64(self) -> f64 {
        match self {
            NegInf => f64::NEG_INFINITY,
            ExtendedReal::Finite(v) => v,
            PosInf => f64::INFINITY,
        }
    }

    pub fn checked_add(self, other: ExtendedReal) -> Result<ExtendedReal> {
        match (self, other) {
            (PosInf, NegInf) | (NegInf, PosInf) => {
                Err(GouError::Indeterminate("inf - inf in addition".into()))
            }
            (PosInf, _) | (_, PosInf) => Ok(PosInf),
            (NegInf, _) | (_, NegInf) => Ok(NegInf),
            (ExtendedReal::Finite(a), ExtendedReal::Finite(b)) => Ok(ExtendedReal::new(a + b)),
        }
    }

    pub fn checked_sub(self, other: ExtendedReal) -> Result<ExtendedReal> {
        self.checked_add(-other)
    }

    /// Multiplication by a finite scalar; `0 · ±∞` is an error.
    pub fn checked_scale(self, k: f64) -> Result<ExtendedReal> {
        match self {
            ExtendedReal::Finite(v) => Ok(ExtendedReal::new(v * k)),
            inf if k == 0.0 => Err(GouError::Indeterminate(format!("0 * {inf}"))),
            PosInf => Ok(if k > 0.0 { PosInf } else { NegInf }),
            NegInf => Ok(if k > 0.0 { NegInf } else { PosInf }),
        }
    }

    pub fn max(self, other: ExtendedReal) -> ExtendedReal {
        if self >= other {
            self
        } else {
            other
        }
    }

    pub fn min(self, other: ExtendedReal) -> ExtendedReal {
        if self <= other {
            self
        } else {
            other
        }
    }
}

impl From<f64> for ExtendedReal {
    fn from(v: f64) -> Self {
        ExtendedReal::new(v)
    }
}

impl std::ops::Neg for ExtendedReal {
    type Output = ExtendedReal;
    fn neg(self) -> ExtendedReal {
        match self {
            NegInf => PosInf,
            PosInf => NegInf,
            ExtendedReal::Finite(v) => ExtendedReal::Finite(-v),
        }
    }
}

impl PartialOrd for ExtendedReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.total_cmp(other))
    }
}

impl ExtendedReal {
    fn rank(&self) -> u8 {
        match self {
            NegInf => 0,
            ExtendedReal::Finite(_) => 1,
            PosInf => 2,
        }
    }

    pub fn total_cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExtendedReal::Finite(a), ExtendedReal::Finite(b)) => {
                a.partial_cmp(b).expect("no NaN in ExtendedReal")
            }
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl PartialEq<f64> for ExtendedReal {
    fn eq(&self, other: &f64) -> bool {
        *self == ExtendedReal::new(*other)
    }
}

impl PartialOrd<f64> for ExtendedReal {
    fn partial_cmp(&self, other: &f64) -> Option<Ordering> {
        if other.is_nan() {
            return None;
        }
        Some(self.total_cmp(&ExtendedReal::new(*other)))
    }
}

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NegInf => write!(f, "-inf"),
            PosInf => write!(f, "inf"),
            ExtendedReal::Finite(v) => write!(f, "{v}"),
        }
    }
}

// JSON has no infinities: finite values are numbers, infinities the strings "inf"/"-inf".
impl Serialize for ExtendedReal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExtendedReal::Finite(v) => s.serialize_f64(*v),
            PosInf => s.serialize_str("inf"),
            NegInf => s.serialize_str("-inf"),
        }
    }
}

impl<'de> serde::Deserialize<'de> for ExtendedReal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = ExtendedReal;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a number or one of \"inf\", \"-inf\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<ExtendedReal, E> {
                if v.is_nan() {
                    return Err(E::custom("NaN is not an extended real"));
                }
                Ok(ExtendedReal::new(v))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<ExtendedReal, E> {
                Ok(ExtendedReal::Finite(v as f64))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<ExtendedReal, E> {
                Ok(ExtendedReal::Finite(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<ExtendedReal, E> {
                match v {
                    "inf" | "+inf" => Ok(PosInf),
                    "-inf" => Ok(NegInf),
                    other => Err(E::custom(format!("unknown extended real {other:?}"))),
                }
            }
        }
        d.deserialize_any(V)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_places_infinities_at_the_ends() {
        let xs = [PosInf, ExtendedReal::Finite(3.0), NegInf, ExtendedReal::Finite(-1e300)];
        let mut sorted = xs;
        sorted.sort_by(|a, b| a.total_cmp(b));
        assert_eq!(
            sorted,
            [NegInf, ExtendedReal::Finite(-1e300), ExtendedReal::Finite(3.0), PosInf]
        );
        assert!(ExtendedReal::ZERO < PosInf);
        assert!(NegInf < -1e308);
    }

    #[test]
    fn inf_minus_inf_is_an_error() {
        assert!(PosInf.checked_sub(PosInf).is_err());
        assert!(NegInf.checked_add(PosInf).is_err());
        assert_eq!(PosInf.checked_add(ExtendedReal::Finite(-5.0)).unwrap(), PosInf);
        assert!(PosInf.checked_scale(0.0).is_err());
        assert_eq!(PosInf.checked_scale(-2.0).unwrap(), NegInf);
    }

    #[test]
    fn json_round_trip() {
        let xs = vec![NegInf, ExtendedReal::Finite(1.5), PosInf];
        let s = serde_json::to_string(&xs).unwrap();
        assert_eq!(s, r#"["-inf",1.5,"inf"]"#);
        let back: Vec<ExtendedReal> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, xs);
    }
}
