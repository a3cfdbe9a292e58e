use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A value in `Z ∪ {-inf, +inf}`.
///
/// `+inf` is the valuation of zero and the valuative distance from a point
/// to a set containing it. `-inf` is the distance to the empty set and the
/// slope valuation of a subspace that is not a graph over its first
/// coordinates.
///
/// The derived order puts `NegInf < Finite(_) < PosInf`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExtendedValuation {
    NegInf,
    Finite(i64),
    PosInf,
}

use ExtendedValuation::{Finite, NegInf, PosInf};

impl ExtendedValuation {
    pub fn is_finite(self) -> bool {
        matches!(self, Finite(_))
    }

    pub fn finite(self) -> Option<i64> {
        match self {
            Finite(v) => Some(v),
            _ => None,
        }
    }

    /// `self + other`, with `+inf` absorbing.
    ///
    /// `+inf` wins over `-inf`: the sum shows up as a lower bound for the
    /// valuation of a product, and a product with a zero factor is zero.
    pub fn add(self, other: Self) -> Self {
        match (self, other) {
            (PosInf, _) | (_, PosInf) => PosInf,
            (NegInf, _) | (_, NegInf) => NegInf,
            (Finite(a), Finite(b)) => Finite(a + b),
        }
    }

    /// `self - other`.
    ///
    /// Anything minus `-inf` is `+inf`. `+inf - +inf` is also `+inf`, so a
    /// degenerate requirement (e.g. two equal chain points) is vacuous
    /// rather than undefined.
    pub fn sub(self, other: Self) -> Self {
        match (self, other) {
            (_, NegInf) => PosInf,
            (PosInf, _) => PosInf,
            (NegInf, _) => NegInf,
            (Finite(_), PosInf) => NegInf,
            (Finite(a), Finite(b)) => Finite(a - b),
        }
    }

    pub fn neg(self) -> Self {
        match self {
            PosInf => NegInf,
            NegInf => PosInf,
            Finite(a) => Finite(-a),
        }
    }

    /// Halve an even finite value; infinities are unchanged.
    pub fn half(self) -> Option<Self> {
        match self {
            Finite(a) if a % 2 == 0 => Some(Finite(a / 2)),
            Finite(_) => None,
            inf => Some(inf),
        }
    }
}

impl fmt::Display for ExtendedValuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NegInf => f.write_str("-inf"),
            PosInf => f.write_str("+inf"),
            Finite(v) => write!(f, "{v}"),
        }
    }
}

impl FromStr for ExtendedValuation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "+inf" | "inf" => Ok(PosInf),
            "-inf" => Ok(NegInf),
            other => other
                .parse::<i64>()
                .map(Finite)
                .map_err(|_| format!("not a valuation: {other:?}")),
        }
    }
}

impl Serialize for ExtendedValuation {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Finite(v) => s.serialize_i64(*v),
            inf => s.serialize_str(&inf.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for ExtendedValuation {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(v) => Ok(Finite(v)),
            Raw::Str(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order() {
        assert!(NegInf < Finite(-1000));
        assert!(Finite(1000) < PosInf);
        assert!(PosInf >= PosInf);
    }

    #[test]
    fn subtraction_conventions() {
        assert_eq!(Finite(3).sub(NegInf), PosInf);
        assert_eq!(PosInf.sub(NegInf), PosInf);
        assert_eq!(NegInf.sub(Finite(2)), NegInf);
        assert_eq!(Finite(1).sub(Finite(3)), Finite(-2));
    }

    #[test]
    fn text_round_trip() {
        for v in [NegInf, Finite(-3), Finite(0), PosInf] {
            assert_eq!(v.to_string().parse::<ExtendedValuation>(), Ok(v));
        }
    }

    #[test]
    fn json_round_trip() {
        let vs = vec![Finite(2), NegInf, PosInf];
        let s = serde_json::to_string(&vs).unwrap();
        assert_eq!(s, r#"[2,"-inf","+inf"]"#);
        let back: Vec<ExtendedValuation> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, vs);
    }
}
