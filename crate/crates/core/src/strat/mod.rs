//! Stratified sets: strata in graph or implicit form, skeletons, tangent
//! spaces and valuative distances.

pub mod catalog;
mod json;
mod oracle;

pub use catalog::{load_catalog, CatalogEntry, NamedChain};
pub use json::{RawCondition, RawOracleEntry, RawRepr, RawStratification, RawStratum};
pub(crate) use json::{conditions, raw_conditions};
pub use oracle::{DistSq, DistanceOracle, SkeletonDistance};

use crate::error::{Error, Result};
use crate::expr::{jacobian, RationalExpr};
use crate::field::{ExtendedValuation, FieldElement};
use crate::grassmann::Subspace;
use crate::linalg::Matrix;

/// A strict condition on a point.
#[derive(Clone, Debug, PartialEq)]
pub enum Condition {
    Positive(RationalExpr),
    Nonzero(RationalExpr),
}

impl Condition {
    pub fn holds(&self, p: &[FieldElement]) -> Result<bool> {
        Ok(match self {
            Condition::Positive(e) => e.eval(p)?.is_positive(),
            Condition::Nonzero(e) => !e.eval(p)?.is_zero(),
        })
    }

    pub(crate) fn arity(&self) -> usize {
        match self {
            Condition::Positive(e) | Condition::Nonzero(e) => e.arity(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Representation {
    /// The graph of `rho` (arity d, n - d components) over an open base
    /// cut out by strict conditions on the first d coordinates.
    Graph { rho: Vec<RationalExpr>, base: Vec<Condition> },
    /// Zero set of n - d equations intersected with an open set.
    Implicit { equations: Vec<RationalExpr>, open: Vec<Condition> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Stratum {
    pub label: String,
    pub dim: usize,
    pub ambient: usize,
    pub repr: Representation,
}

fn all_hold(conds: &[Condition], p: &[FieldElement]) -> Result<bool> {
    for c in conds {
        if !c.holds(p)? {
            return Ok(false);
        }
    }
    Ok(true)
}

impl Stratum {
    pub fn graph(label: &str, ambient: usize, dim: usize, rho: Vec<RationalExpr>, base: Vec<Condition>) -> Result<Self> {
        let s = Stratum {
            label: label.to_string(),
            dim,
            ambient,
            repr: Representation::Graph { rho, base },
        };
        s.validate()?;
        Ok(s)
    }

    pub fn implicit(
        label: &str,
        ambient: usize,
        dim: usize,
        equations: Vec<RationalExpr>,
        open: Vec<Condition>,
    ) -> Result<Self> {
        let s = Stratum {
            label: label.to_string(),
            dim,
            ambient,
            repr: Representation::Implicit { equations, open },
        };
        s.validate()?;
        Ok(s)
    }

    fn validate(&self) -> Result<()> {
        let (n, d) = (self.ambient, self.dim);
        if d > n {
            return Err(Error::dims(format!("stratum {} has dim {d} > {n}", self.label)));
        }
        let bad = |what: &str| Err(Error::dims(format!("stratum {}: {what}", self.label)));
        match &self.repr {
            Representation::Graph { rho, base } => {
                if rho.len() != n - d {
                    return bad("graph map needs n - d components");
                }
                if rho.iter().any(|r| r.arity() != d) || base.iter().any(|c| c.arity() != d) {
                    return bad("graph map and base conditions need arity d");
                }
            }
            Representation::Implicit { equations, open } => {
                if equations.len() != n - d {
                    return bad("implicit form needs n - d equations");
                }
                if equations.iter().any(|e| e.arity() != n) || open.iter().any(|c| c.arity() != n) {
                    return bad("implicit equations and conditions need arity n");
                }
            }
        }
        Ok(())
    }

    /// For graph strata: whether `xbar` (length d) lies in the base.
    pub fn base_contains(&self, xbar: &[FieldElement]) -> Result<bool> {
        match &self.repr {
            Representation::Graph { base, .. } => all_hold(base, xbar),
            Representation::Implicit { .. } => Err(Error::invalid("implicit strata have no base")),
        }
    }

    pub fn contains(&self, p: &[FieldElement]) -> Result<bool> {
        if p.len() != self.ambient {
            return Err(Error::dims(format!(
                "point of length {} for stratum {} in {}-space",
                p.len(),
                self.label,
                self.ambient
            )));
        }
        match &self.repr {
            Representation::Graph { rho, base } => {
                let (xbar, rest) = p.split_at(self.dim);
                if !all_hold(base, xbar)? {
                    return Ok(false);
                }
                for (r, y) in rho.iter().zip(rest) {
                    if r.eval(xbar)? != *y {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            Representation::Implicit { equations, open } => {
                for e in equations {
                    if !e.eval(p)?.is_zero() {
                        return Ok(false);
                    }
                }
                all_hold(open, p)
            }
        }
    }

    pub fn tangent_space(&self, p: &[FieldElement]) -> Result<Subspace> {
        if !self.contains(p)? {
            return Err(Error::PointNotOnStratum {
                stratum: self.label.clone(),
            });
        }
        let (n, d) = (self.ambient, self.dim);
        match &self.repr {
            Representation::Graph { rho, .. } => {
                if d == 0 {
                    return Ok(Subspace::zero(n));
                }
                // columns of [I_d ; Jac rho]
                let j = jacobian(rho, &p[..d])?;
                let mut basis = Matrix::zeros(n, d);
                for i in 0..d {
                    basis.set(i, i, FieldElement::one());
                }
                for r in 0..n - d {
                    for c in 0..d {
                        basis.set(d + r, c, j.get(r, c).clone());
                    }
                }
                Ok(Subspace::column_span(&basis))
            }
            Representation::Implicit { equations, .. } => {
                if equations.is_empty() {
                    return Ok(Subspace::full(n));
                }
                let j = jacobian(equations, p)?;
                if j.rank() < n - d {
                    return Err(Error::SingularPoint {
                        stratum: self.label.clone(),
                    });
                }
                Subspace::span(n, &j.kernel())
            }
        }
    }

    /// The graph map of a graph stratum.
    pub fn rho(&self) -> Option<&[RationalExpr]> {
        match &self.repr {
            Representation::Graph { rho, .. } => Some(rho),
            Representation::Implicit { .. } => None,
        }
    }
}

/// Nested skeletons `X^0 ⊆ ... ⊆ X^d` described by their strata.
#[derive(Clone, Debug, PartialEq)]
pub struct Stratification {
    pub name: String,
    pub ambient: usize,
    pub strata: Vec<Stratum>,
    /// `layers[i]` lists the strata (by index) making up `X^i \ X^{i-1}`.
    pub layers: Vec<Vec<usize>>,
    pub oracle: DistanceOracle,
}

impl Stratification {
    pub fn new(
        name: &str,
        ambient: usize,
        strata: Vec<Stratum>,
        layers: Vec<Vec<usize>>,
        oracle: DistanceOracle,
    ) -> Result<Self> {
        for (i, layer) in layers.iter().enumerate() {
            for &s in layer {
                let st = strata
                    .get(s)
                    .ok_or_else(|| Error::invalid(format!("layer {i} names a missing stratum")))?;
                if st.dim != i {
                    return Err(Error::invalid(format!(
                        "stratum {} has dim {} but sits in layer {i}",
                        st.label, st.dim
                    )));
                }
                if st.ambient != ambient {
                    return Err(Error::dims(format!("stratum {} is not in {ambient}-space", st.label)));
                }
            }
        }
        if oracle.skeletons.len() != layers.len() {
            return Err(Error::invalid("oracle needs one entry per skeleton"));
        }
        Ok(Stratification {
            name: name.to_string(),
            ambient,
            strata,
            layers,
            oracle,
        })
    }

    pub fn top_dim(&self) -> usize {
        self.layers.len().saturating_sub(1)
    }

    pub fn stratum(&self, label: &str) -> Option<&Stratum> {
        self.strata.iter().find(|s| s.label == label)
    }

    /// The stratum of dimension `dim` containing `p`.
    pub fn stratum_at(&self, p: &[FieldElement], dim: usize) -> Result<&Stratum> {
        if let Some(layer) = self.layers.get(dim) {
            for &s in layer {
                if self.strata[s].contains(p)? {
                    return Ok(&self.strata[s]);
                }
            }
        }
        Err(Error::PointNotOnStratum {
            stratum: format!("{}: layer {dim}", self.name),
        })
    }

    pub fn in_skeleton(&self, p: &[FieldElement], i: usize) -> Result<bool> {
        for layer in self.layers.iter().take(i + 1) {
            for &s in layer {
                if self.strata[s].contains(p)? {
                    return Ok(true);
                }
            }
        }
        Ok(false)
    }

    /// `valdist(p, X^i)`; `i = -1` is the empty set.
    pub fn valdist(&self, p: &[FieldElement], i: isize) -> Result<ExtendedValuation> {
        if i < 0 {
            return Ok(ExtendedValuation::NegInf);
        }
        let i = (i as usize).min(self.top_dim());
        if self.in_skeleton(p, i)? {
            return Ok(ExtendedValuation::PosInf);
        }
        self.oracle.valdist(p, i)
    }

    /// Squared distance to `X^i`; zero on the skeleton.
    pub fn dist_sq(&self, p: &[FieldElement], i: isize) -> Result<DistSq> {
        if i < 0 {
            return Ok(DistSq::Infinite);
        }
        let i = (i as usize).min(self.top_dim());
        if self.in_skeleton(p, i)? {
            return Ok(DistSq::Exact(FieldElement::zero()));
        }
        self.oracle.dist_sq(p, i)
    }

    pub fn tangent_space(&self, p: &[FieldElement], dim: usize) -> Result<Subspace> {
        self.stratum_at(p, dim)?.tangent_space(p)
    }

    pub fn from_json(src: &str) -> Result<Self> {
        RawStratification::from_json(src)?.build()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(v: &[&str]) -> Vec<FieldElement> {
        v.iter().map(|s| s.parse().unwrap()).collect()
    }

    fn sp(s: &str) -> Subspace {
        s.parse().unwrap()
    }

    #[test]
    fn tangent_examples() {
        let parabola = Stratum::graph(
            "p",
            2,
            1,
            vec![RationalExpr::parse("x1^2", Some(1)).unwrap()],
            vec![],
        )
        .unwrap();
        assert_eq!(parabola.tangent_space(&pt(&["1", "1"])).unwrap(), sp("span[(1,2)]"));

        let cone = load_catalog("cone").unwrap().strat;
        let a = pt(&["1", "0", "t"]);
        assert_eq!(cone.tangent_space(&a, 2).unwrap(), sp("span[(1,0,t),(0,1,0)]"));

        let plane = Stratum::implicit("plane", 3, 2, vec![RationalExpr::parse("x3", Some(3)).unwrap()], vec![]).unwrap();
        assert_eq!(plane.tangent_space(&pt(&["5", "t", "0"])).unwrap(), sp("span[(1,0,0),(0,1,0)]"));

        assert!(matches!(
            parabola.tangent_space(&pt(&["1", "2"])),
            Err(Error::PointNotOnStratum { .. })
        ));
        let singular = Stratum::implicit("sq", 2, 1, vec![RationalExpr::parse("x2^2", Some(2)).unwrap()], vec![]).unwrap();
        assert!(matches!(
            singular.tangent_space(&pt(&["1", "0"])),
            Err(Error::SingularPoint { .. })
        ));
    }

    #[test]
    fn graph_and_implicit_tangents_agree() {
        let g = Stratum::graph("g", 2, 1, vec![RationalExpr::parse("x1^2", Some(1)).unwrap()], vec![]).unwrap();
        let i = Stratum::implicit("i", 2, 1, vec![RationalExpr::parse("x2 - x1^2", Some(2)).unwrap()], vec![]).unwrap();
        for x in ["t", "1/3", "2 - t", "t^2/(1+t)"] {
            let x: FieldElement = x.parse().unwrap();
            let p = vec![x.clone(), x.square()];
            assert_eq!(g.tangent_space(&p).unwrap(), i.tangent_space(&p).unwrap());
        }
    }

    #[test]
    fn valdist_examples() {
        let cone = load_catalog("cone").unwrap().strat;
        let a = pt(&["1", "0", "t"]);
        assert_eq!(cone.valdist(&a, 0).unwrap(), ExtendedValuation::Finite(0));
        assert_eq!(cone.valdist(&a, -1).unwrap(), ExtendedValuation::NegInf);
        assert_eq!(cone.valdist(&a, 2).unwrap(), ExtendedValuation::PosInf);
        let off = pt(&["1", "1", "1"]);
        assert!(matches!(cone.valdist(&off, 2), Err(Error::OracleIndeterminate(_))));
    }

    #[test]
    fn contains_examples() {
        let cone = load_catalog("cone").unwrap().strat;
        let nappe = cone.stratum("nappe+").unwrap();
        assert!(nappe.contains(&pt(&["1", "0", "t"])).unwrap());
        assert!(!nappe.contains(&pt(&["1", "1", "1"])).unwrap());
        assert!(cone.stratum("apex").unwrap().contains(&pt(&["0", "0", "0"])).unwrap());
    }
}
