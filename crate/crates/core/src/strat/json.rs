//! JSON form of stratifications. Expressions are strings in the element
//! grammar with variables `x1..xk`.

use serde::{Deserialize, Serialize};

use super::{Condition, DistanceOracle, Representation, SkeletonDistance, Stratification, Stratum};
use crate::error::{Error, Result};
use crate::expr::RationalExpr;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RawStratification {
    pub name: String,
    pub ambient_dim: usize,
    pub strata: Vec<RawStratum>,
    /// Entry `i` lists the labels of the `i`-dimensional strata.
    pub skeletons: Vec<Vec<String>>,
    pub oracle: RawOracle,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RawStratum {
    pub label: String,
    pub dim: usize,
    #[serde(flatten)]
    pub repr: RawRepr,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RawRepr {
    Graph {
        rho: Vec<String>,
        #[serde(default)]
        base: Vec<RawCondition>,
    },
    Implicit {
        equations: Vec<String>,
        #[serde(default)]
        open: Vec<RawCondition>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RawCondition {
    Positive(String),
    Nonzero(String),
}

/// A catalog key reuses that entry's oracle; `{"user": [...]}` gives one
/// entry per skeleton.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RawOracle {
    Catalog(String),
    User { user: Vec<RawOracleEntry> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RawOracleEntry {
    Empty,
    Dist2(String),
    Witness(Vec<String>),
    Bounds { lo: String, hi: String },
    Unknown,
}

impl RawStratum {
    pub fn build(&self, n: usize) -> Result<Stratum> {
        match &self.repr {
            RawRepr::Graph { rho, base } => {
                Stratum::graph(&self.label, n, self.dim, exprs(rho, self.dim)?, conditions(base, self.dim)?)
            }
            RawRepr::Implicit { equations, open } => {
                Stratum::implicit(&self.label, n, self.dim, exprs(equations, n)?, conditions(open, n)?)
            }
        }
    }

    pub fn from_stratum(s: &Stratum) -> Self {
        RawStratum {
            label: s.label.clone(),
            dim: s.dim,
            repr: match &s.repr {
                Representation::Graph { rho, base } => RawRepr::Graph {
                    rho: strings(rho),
                    base: raw_conditions(base),
                },
                Representation::Implicit { equations, open } => RawRepr::Implicit {
                    equations: strings(equations),
                    open: raw_conditions(open),
                },
            },
        }
    }
}

fn expr(src: &str, arity: usize) -> Result<RationalExpr> {
    RationalExpr::parse(src, Some(arity))
}

fn exprs(srcs: &[String], arity: usize) -> Result<Vec<RationalExpr>> {
    srcs.iter().map(|s| expr(s, arity)).collect()
}

pub(crate) fn conditions(raw: &[RawCondition], arity: usize) -> Result<Vec<Condition>> {
    raw.iter()
        .map(|c| {
            Ok(match c {
                RawCondition::Positive(s) => Condition::Positive(expr(s, arity)?),
                RawCondition::Nonzero(s) => Condition::Nonzero(expr(s, arity)?),
            })
        })
        .collect()
}

pub(crate) fn raw_conditions(cs: &[Condition]) -> Vec<RawCondition> {
    cs.iter()
        .map(|c| match c {
            Condition::Positive(e) => RawCondition::Positive(e.to_string()),
            Condition::Nonzero(e) => RawCondition::Nonzero(e.to_string()),
        })
        .collect()
}

fn strings(es: &[RationalExpr]) -> Vec<String> {
    es.iter().map(ToString::to_string).collect()
}

impl RawOracleEntry {
    fn build(&self, n: usize) -> Result<SkeletonDistance> {
        Ok(match self {
            RawOracleEntry::Empty => SkeletonDistance::Empty,
            RawOracleEntry::Dist2(s) => SkeletonDistance::Dist2(expr(s, n)?),
            RawOracleEntry::Witness(w) => {
                if w.len() != n {
                    return Err(Error::dims(format!("witness has {} components in {n}-space", w.len())));
                }
                SkeletonDistance::Witness(exprs(w, n)?)
            }
            RawOracleEntry::Bounds { lo, hi } => SkeletonDistance::Bounds {
                lo: expr(lo, n)?,
                hi: expr(hi, n)?,
            },
            RawOracleEntry::Unknown => SkeletonDistance::Unknown,
        })
    }

    fn from_entry(e: &SkeletonDistance) -> Self {
        match e {
            SkeletonDistance::Empty => RawOracleEntry::Empty,
            SkeletonDistance::Dist2(d) => RawOracleEntry::Dist2(d.to_string()),
            SkeletonDistance::Witness(w) => RawOracleEntry::Witness(strings(w)),
            SkeletonDistance::Bounds { lo, hi } => RawOracleEntry::Bounds {
                lo: lo.to_string(),
                hi: hi.to_string(),
            },
            SkeletonDistance::Unknown => RawOracleEntry::Unknown,
        }
    }
}

impl RawStratification {
    pub fn from_json(src: &str) -> Result<Self> {
        Ok(serde_json::from_str(src)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    pub fn build(&self) -> Result<Stratification> {
        let n = self.ambient_dim;
        let strata = self.strata.iter().map(|s| s.build(n)).collect::<Result<Vec<_>>>()?;
        let layers = self
            .skeletons
            .iter()
            .map(|labels| {
                labels
                    .iter()
                    .map(|l| {
                        strata
                            .iter()
                            .position(|s| &s.label == l)
                            .ok_or_else(|| Error::invalid(format!("unknown stratum label {l:?}")))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let oracle = match &self.oracle {
            RawOracle::Catalog(key) => {
                let entry = super::load_catalog(key)?;
                if entry.strat.ambient != n {
                    return Err(Error::dims(format!("catalog oracle {key:?} lives in another space")));
                }
                entry.strat.oracle
            }
            RawOracle::User { user } => DistanceOracle {
                skeletons: user.iter().map(|e| e.build(n)).collect::<Result<_>>()?,
            },
        };
        Stratification::new(&self.name, n, strata, layers, oracle)
    }
}

impl Stratification {
    pub fn to_raw(&self) -> RawStratification {
        RawStratification {
            name: self.name.clone(),
            ambient_dim: self.ambient,
            strata: self
                .strata
                .iter()
                .map(RawStratum::from_stratum)
                .collect(),
            skeletons: self
                .layers
                .iter()
                .map(|l| l.iter().map(|&i| self.strata[i].label.clone()).collect())
                .collect(),
            oracle: RawOracle::User {
                user: self.oracle.skeletons.iter().map(RawOracleEntry::from_entry).collect(),
            },
        }
    }

    pub fn to_json(&self) -> String {
        self.to_raw().to_json()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strat::load_catalog;

    #[test]
    fn catalog_entries_round_trip() {
        for name in ["cone", "cone:1/2", "flat-line", "parabola"] {
            let s = load_catalog(name).unwrap().strat;
            let back = Stratification::from_json(&s.to_json()).unwrap();
            assert_eq!(back, s, "{name}");
        }
    }

    #[test]
    fn catalog_oracle_key() {
        let src = r#"{
            "name": "my-cone",
            "ambient_dim": 3,
            "strata": [
                {"label": "o", "dim": 0, "graph": {"rho": ["0", "0", "0"]}},
                {"label": "up", "dim": 2, "implicit": {"equations": ["t^2*x1^2 - x2^2 - x3^2"], "open": [{"positive": "x1"}]}},
                {"label": "down", "dim": 2, "implicit": {"equations": ["t^2*x1^2 - x2^2 - x3^2"], "open": [{"positive": "-x1"}]}}
            ],
            "skeletons": [["o"], [], ["up", "down"]],
            "oracle": "cone"
        }"#;
        let s = Stratification::from_json(src).unwrap();
        assert_eq!(s.oracle, load_catalog("cone").unwrap().strat.oracle);
    }

    #[test]
    fn rejects_bad_shapes() {
        let wrong_layer = r#"{"name": "x", "ambient_dim": 2,
            "strata": [{"label": "o", "dim": 0, "graph": {"rho": ["0", "0"]}}],
            "skeletons": [[], ["o"]], "oracle": {"user": ["empty", "unknown"]}}"#;
        assert!(Stratification::from_json(wrong_layer).is_err());
        let wrong_rho = r#"{"name": "x", "ambient_dim": 2,
            "strata": [{"label": "l", "dim": 1, "graph": {"rho": ["x1", "x1"]}}],
            "skeletons": [[], ["l"]], "oracle": {"user": ["empty", "unknown"]}}"#;
        assert!(Stratification::from_json(wrong_rho).is_err());
        let unknown_key = r#"{"name": "x", "ambient_dim": 2, "strata": [],
            "skeletons": [[]], "oracle": "nosuch"}"#;
        assert!(matches!(
            Stratification::from_json(unknown_key),
            Err(Error::UnknownCatalogEntry(_))
        ));
    }
}
