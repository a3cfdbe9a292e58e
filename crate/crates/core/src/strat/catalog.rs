//! Bundled example stratifications with sample chains.

use super::json::{RawCondition, RawOracle, RawOracleEntry, RawRepr, RawStratification, RawStratum};
use super::Stratification;
use crate::error::{Error, Result};
use crate::expr::parse_element;
use crate::field::FieldElement;

/// A named chain `(points, dims)` shipped with a catalog entry.
#[derive(Clone, Debug, PartialEq)]
pub struct NamedChain {
    pub name: String,
    pub points: Vec<Vec<FieldElement>>,
    pub dims: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub strat: Stratification,
    pub chains: Vec<NamedChain>,
    /// Whether the entry is known to be a valuative Lipschitz stratification.
    pub valuative_lipschitz: bool,
}

impl CatalogEntry {
    pub fn chain(&self, name: &str) -> Option<&NamedChain> {
        self.chains.iter().find(|c| c.name == name)
    }
}

pub const CATALOG_NAMES: [&str; 3] = ["cone", "flat-line", "parabola"];

fn graph(label: &str, dim: usize, rho: &[&str], base: Vec<RawCondition>) -> RawStratum {
    RawStratum {
        label: label.into(),
        dim,
        repr: RawRepr::Graph {
            rho: rho.iter().map(|s| s.to_string()).collect(),
            base,
        },
    }
}

fn positive(s: &str) -> RawCondition {
    RawCondition::Positive(s.into())
}

fn chain(name: &str, points: &[&[&str]], dims: &[usize]) -> Result<NamedChain> {
    Ok(NamedChain {
        name: name.into(),
        points: points
            .iter()
            .map(|p| p.iter().map(|s| parse_element(s)).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?,
        dims: dims.to_vec(),
    })
}

fn labels(ls: &[&[&str]]) -> Vec<Vec<String>> {
    ls.iter().map(|l| l.iter().map(|s| s.to_string()).collect()).collect()
}

/// The cone `r²x1² = x2² + x3²` with apex as the only lower stratum.
fn cone(name: &str, r: &FieldElement) -> Result<CatalogEntry> {
    let eq = format!("({r})^2*x1^2 - x2^2 - x3^2");
    let nappe = |label: &str, side: &str| RawStratum {
        label: label.into(),
        dim: 2,
        repr: RawRepr::Implicit {
            equations: vec![eq.clone()],
            open: vec![positive(side)],
        },
    };
    let norm = RawOracleEntry::Dist2("x1^2 + x2^2 + x3^2".into());
    let raw = RawStratification {
        name: name.into(),
        ambient_dim: 3,
        strata: vec![graph("apex", 0, &["0", "0", "0"], vec![]), nappe("nappe+", "x1"), nappe("nappe-", "-x1")],
        skeletons: labels(&[&["apex"], &[], &["nappe+", "nappe-"]]),
        oracle: RawOracle::User {
            user: vec![norm.clone(), norm, RawOracleEntry::Unknown],
        },
    };
    let r = r.to_string();
    let two_r = format!("2*({r})");
    Ok(CatalogEntry {
        strat: raw.build()?,
        chains: vec![
            chain("augmented", &[&["1", "0", &r], &["1", &r, "0"]], &[2, 2])?,
            chain("weak", &[&["1", "0", &r], &["2", "0", &two_r]], &[2, 2])?,
            chain("single", &[&["1", "0", &r]], &[2])?,
        ],
        valuative_lipschitz: false,
    })
}

fn flat_line() -> Result<CatalogEntry> {
    let raw = RawStratification {
        name: "flat-line".into(),
        ambient_dim: 2,
        strata: vec![
            graph("origin", 0, &["0", "0"], vec![]),
            graph("ray+", 1, &["0"], vec![positive("x1")]),
            graph("ray-", 1, &["0"], vec![positive("-x1")]),
        ],
        skeletons: labels(&[&["origin"], &["ray+", "ray-"]]),
        oracle: RawOracle::User {
            user: vec![
                RawOracleEntry::Dist2("x1^2 + x2^2".into()),
                RawOracleEntry::Dist2("x2^2".into()),
            ],
        },
    };
    Ok(CatalogEntry {
        strat: raw.build()?,
        chains: vec![
            chain("plain", &[&["t", "0"], &["0", "0"]], &[1, 0])?,
            chain("augmented", &[&["1", "0"], &["1 + t", "0"]], &[1, 1])?,
            chain("single", &[&["1", "0"]], &[1])?,
        ],
        valuative_lipschitz: true,
    })
}

fn parabola() -> Result<CatalogEntry> {
    let raw = RawStratification {
        name: "parabola".into(),
        ambient_dim: 2,
        strata: vec![
            graph("origin", 0, &["0", "0"], vec![]),
            graph("branch+", 1, &["x1^2"], vec![positive("x1")]),
            graph("branch-", 1, &["x1^2"], vec![positive("-x1")]),
        ],
        skeletons: labels(&[&["origin"], &["branch+", "branch-"]]),
        oracle: RawOracle::User {
            user: vec![RawOracleEntry::Dist2("x1^2 + x2^2".into()), RawOracleEntry::Unknown],
        },
    };
    Ok(CatalogEntry {
        strat: raw.build()?,
        chains: vec![
            chain("plain", &[&["t", "t^2"], &["0", "0"]], &[1, 0])?,
            chain("augmented", &[&["t", "t^2"], &["t + t^2", "(t + t^2)^2"]], &[1, 1])?,
            chain("single", &[&["1", "1"]], &[1])?,
        ],
        valuative_lipschitz: true,
    })
}

/// `cone`, `cone:<r>` for an element `r`, `flat-line` or `parabola`.
pub fn load_catalog(name: &str) -> Result<CatalogEntry> {
    match name {
        "cone" => cone("cone", &FieldElement::eps()),
        "flat-line" => flat_line(),
        "parabola" => parabola(),
        _ => match name.strip_prefix("cone:") {
            Some(r) => {
                let r = parse_element(r).map_err(|_| Error::UnknownCatalogEntry(name.into()))?;
                if !r.is_positive() {
                    return Err(Error::UnknownCatalogEntry(name.into()));
                }
                cone(name, &r)
            }
            None => Err(Error::UnknownCatalogEntry(name.into())),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::ExtendedValuation;
    use crate::linalg::valuation_of;

    #[test]
    fn entries_load() {
        for name in CATALOG_NAMES {
            let e = load_catalog(name).unwrap();
            for c in &e.chains {
                for (p, &d) in c.points.iter().zip(&c.dims) {
                    e.strat.stratum_at(p, d).unwrap_or_else(|_| panic!("{name}/{}", c.name));
                }
            }
        }
        assert!(matches!(load_catalog("nosuch"), Err(Error::UnknownCatalogEntry(_))));
        assert!(matches!(load_catalog("cone:x1"), Err(Error::UnknownCatalogEntry(_))));
    }

    #[test]
    fn cone_skeletons() {
        let c = load_catalog("cone").unwrap().strat;
        let o = vec![FieldElement::zero(); 3];
        assert!(c.in_skeleton(&o, 0).unwrap());
        assert!(c.in_skeleton(&o, 1).unwrap());
        assert_eq!(c.valdist(&o, 1).unwrap(), ExtendedValuation::PosInf);
        let half = load_catalog("cone:1/2").unwrap();
        let a = &half.chain("augmented").unwrap().points[0];
        assert_eq!(half.strat.dist_sq(a, 0).unwrap(), super::super::DistSq::Exact(FieldElement::from_ratio(5, 4)));
    }

    #[test]
    fn parabola_distance_to_origin_is_norm_valuation() {
        let p = load_catalog("parabola").unwrap().strat;
        for x in ["t", "t^3", "2", "1/t"] {
            let x = parse_element(x).unwrap();
            let a = vec![x.clone(), x.square()];
            assert_eq!(p.valdist(&a, 0).unwrap(), valuation_of(&a));
        }
    }
}
