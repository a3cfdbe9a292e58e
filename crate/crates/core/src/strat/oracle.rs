//! Closed-form distance data per skeleton.

use crate::error::{Error, Result};
use crate::expr::RationalExpr;
use crate::field::{ExtendedValuation, FieldElement};
use crate::linalg::{norm_sq, valuation_of, vec_sub};

/// How the distance from a point to one skeleton `X^i` is known.
#[derive(Clone, Debug, PartialEq)]
pub enum SkeletonDistance {
    /// `X^i` is empty.
    Empty,
    /// Exact squared distance as a function of the point.
    Dist2(RationalExpr),
    /// The nearest point of `X^i` as a function of the point.
    Witness(Vec<RationalExpr>),
    /// Lower and upper bounds on the squared distance.
    Bounds { lo: RationalExpr, hi: RationalExpr },
    /// No closed form; only points on `X^i` itself can be answered.
    Unknown,
}

/// Squared distance from a point to a skeleton.
#[derive(Clone, Debug, PartialEq)]
pub enum DistSq {
    /// Distance to the empty set.
    Infinite,
    Exact(FieldElement),
    Bounds(FieldElement, FieldElement),
}

impl DistSq {
    pub fn bounds(&self) -> Option<(FieldElement, FieldElement)> {
        match self {
            DistSq::Infinite => None,
            DistSq::Exact(d) => Some((d.clone(), d.clone())),
            DistSq::Bounds(lo, hi) => Some((lo.clone(), hi.clone())),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DistanceOracle {
    /// Entry `i` describes `X^i`.
    pub skeletons: Vec<SkeletonDistance>,
}

fn half(v: ExtendedValuation, what: &str) -> Result<ExtendedValuation> {
    v.half()
        .ok_or_else(|| Error::OracleIndeterminate(format!("{what} has odd valuation {v}")))
}

impl DistanceOracle {
    fn entry(&self, i: usize) -> Result<&SkeletonDistance> {
        self.skeletons
            .get(i)
            .ok_or_else(|| Error::OracleIndeterminate(format!("no oracle entry for skeleton {i}")))
    }

    /// `valdist(a, X^i)` for a point known not to lie on `X^i`.
    pub fn valdist(&self, a: &[FieldElement], i: usize) -> Result<ExtendedValuation> {
        match self.entry(i)? {
            SkeletonDistance::Empty => Ok(ExtendedValuation::NegInf),
            SkeletonDistance::Dist2(e) => half(e.eval(a)?.valuation(), "squared distance"),
            SkeletonDistance::Witness(w) => {
                let x = w.iter().map(|c| c.eval(a)).collect::<Result<Vec<_>>>()?;
                Ok(valuation_of(&vec_sub(a, &x)))
            }
            SkeletonDistance::Bounds { lo, hi } => {
                let (vl, vh) = (lo.eval(a)?.valuation(), hi.eval(a)?.valuation());
                if vl != vh {
                    return Err(Error::OracleIndeterminate(format!(
                        "distance bounds to X^{i} have valuations {vl} and {vh}"
                    )));
                }
                half(vl, "squared distance bound")
            }
            SkeletonDistance::Unknown => Err(Error::OracleIndeterminate(format!(
                "no closed form for the distance to X^{i}"
            ))),
        }
    }

    pub fn dist_sq(&self, a: &[FieldElement], i: usize) -> Result<DistSq> {
        match self.entry(i)? {
            SkeletonDistance::Empty => Ok(DistSq::Infinite),
            SkeletonDistance::Dist2(e) => Ok(DistSq::Exact(e.eval(a)?)),
            SkeletonDistance::Witness(w) => {
                let x = w.iter().map(|c| c.eval(a)).collect::<Result<Vec<_>>>()?;
                Ok(DistSq::Exact(norm_sq(&vec_sub(a, &x))))
            }
            SkeletonDistance::Bounds { lo, hi } => Ok(DistSq::Bounds(lo.eval(a)?, hi.eval(a)?)),
            SkeletonDistance::Unknown => Err(Error::OracleIndeterminate(format!(
                "no squared distance available for X^{i}"
            ))),
        }
    }
}
