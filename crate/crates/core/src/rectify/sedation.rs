//! Distance-to-boundary data `ζ_l`, the correction factors `σ_l`, and the
//! valuative derivative bounds that use them.
//!
//! `ζ_l` comes from a closed form per domain: a list of expressions whose
//! absolute values have `ζ_l` as their minimum, so that
//! `v(ζ_l) = max_i v(c_i)`. `σ_l` follows from `ζ_{l-1}` and the point.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::RationalExpr;
use crate::field::{ExtendedValuation, FieldElement};
use crate::linalg::{valuation_of, vec_sub, Vector};
use crate::strat::{conditions, raw_conditions, Condition, RawCondition, Stratification};
use crate::verdict::{Status, Verdict};

use ExtendedValuation::{Finite, PosInf};

/// A domain `X ⊆ Q(ε)^{e_1}` with dimensions `e_1 > … > e_m` and closed
/// forms for `ζ_1, …, ζ_m`.
#[derive(Clone, Debug, PartialEq)]
pub struct SedationContext {
    dims: Vec<usize>,
    domain: Vec<Condition>,
    /// `zeta[l-1]` lists the candidates for `ζ_l`, of arity `e_l`.
    zeta: Vec<Vec<RationalExpr>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct RawContext {
    dims: Vec<usize>,
    #[serde(default)]
    domain: Vec<RawCondition>,
    zeta: Vec<Vec<String>>,
}

impl SedationContext {
    pub fn new(dims: Vec<usize>, domain: Vec<Condition>, zeta: Vec<Vec<RationalExpr>>) -> Result<Self> {
        if dims.is_empty() || dims.windows(2).any(|w| w[0] <= w[1]) {
            return Err(Error::dims(format!("dimensions {dims:?} must be strictly decreasing")));
        }
        if zeta.len() != dims.len() {
            return Err(Error::dims("one zeta closed form per dimension"));
        }
        for (l, cands) in zeta.iter().enumerate() {
            if cands.is_empty() {
                return Err(Error::invalid(format!("zeta_{} has no candidates", l + 1)));
            }
            if cands.iter().any(|c| c.arity() != dims[l]) {
                return Err(Error::dims(format!("zeta_{} must have arity {}", l + 1, dims[l])));
            }
        }
        if domain.iter().any(|c| c.arity() != dims[0]) {
            return Err(Error::dims(format!("domain conditions must have arity {}", dims[0])));
        }
        Ok(SedationContext { dims, domain, zeta })
    }

    pub fn m(&self) -> usize {
        self.dims.len()
    }

    /// `e_l`, 1-based.
    pub fn dim(&self, l: usize) -> usize {
        self.dims[l - 1]
    }

    pub fn contains(&self, x: &[FieldElement]) -> Result<bool> {
        if x.len() != self.dims[0] {
            return Err(Error::dims(format!("point of length {} in {}-space", x.len(), self.dims[0])));
        }
        for c in &self.domain {
            if !c.holds(x)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn from_raw(raw: &RawContext) -> Result<Self> {
        let e1 = *raw.dims.first().ok_or_else(|| Error::dims("empty dimension list"))?;
        let zeta = raw
            .zeta
            .iter()
            .zip(&raw.dims)
            .map(|(cs, &d)| cs.iter().map(|s| RationalExpr::parse(s, Some(d))).collect())
            .collect::<Result<Vec<_>>>()?;
        Self::new(raw.dims.clone(), conditions(&raw.domain, e1)?, zeta)
    }

    fn to_raw(&self) -> RawContext {
        RawContext {
            dims: self.dims.clone(),
            domain: raw_conditions(&self.domain),
            zeta: self
                .zeta
                .iter()
                .map(|cs| cs.iter().map(ToString::to_string).collect())
                .collect(),
        }
    }

    pub fn from_json(src: &str) -> Result<Self> {
        Self::from_raw(&serde_json::from_str(src)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_raw()).expect("serializable")
    }
}

/// `(v(ζ_1), …, v(ζ_m))` and `(v(σ_2), …, v(σ_m))` at `x ∈ X`.
pub fn zeta_sigma(ctx: &SedationContext, x: &[FieldElement]) -> Result<(Vec<ExtendedValuation>, Vec<ExtendedValuation>)> {
    if !ctx.contains(x)? {
        return Err(Error::invalid("sample lies outside the domain"));
    }
    let zetas = (1..=ctx.m())
        .map(|l| {
            let xl = &x[..ctx.dim(l)];
            let mut best = None;
            for c in &ctx.zeta[l - 1] {
                let v = c.eval(xl)?.valuation();
                best = Some(best.map_or(v, |b: ExtendedValuation| b.max(v)));
            }
            match best.expect("nonempty candidates") {
                PosInf => Err(Error::OracleIndeterminate(format!("zeta_{l} vanishes: the point is not interior"))),
                v => Ok(v),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    // v(σ_l) = min(0, v(pr_{>e_l}(x)) - v(ζ_{l-1})); an empty tail has
    // valuation +inf.
    let sigmas = (2..=ctx.m())
        .map(|l| {
            let tail = valuation_of(&x[ctx.dim(l)..]);
            tail.sub(zetas[l - 2]).min(Finite(0))
        })
        .collect();
    Ok((zetas, sigmas))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SedationVersion {
    A,
    B,
    C,
    C2,
}

impl FromStr for SedationVersion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "a" => Ok(SedationVersion::A),
            "b" => Ok(SedationVersion::B),
            "c" => Ok(SedationVersion::C),
            "c2" => Ok(SedationVersion::C2),
            _ => Err(Error::invalid(format!("unknown sedation version {s:?}"))),
        }
    }
}

impl fmt::Display for SedationVersion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SedationVersion::A => "a",
            SedationVersion::B => "b",
            SedationVersion::C => "c",
            SedationVersion::C2 => "c2",
        })
    }
}

/// The sedation inequality for each sample, function and index
/// `i ≤ e_m`; for version `c2`, the second derivatives `∂_{ij}` with
/// `j ≤ e_1` and the bound `v(Jac f) ≥ 0`.
pub fn check_sedated(
    fs: &[RationalExpr],
    version: SedationVersion,
    ctx: &SedationContext,
    samples: &[Vector],
) -> Result<Vec<Verdict>> {
    let m = ctx.m();
    let e1 = ctx.dim(1);
    let em = ctx.dim(m);
    if version == SedationVersion::B && m < 2 {
        return Err(Error::invalid("version b needs m >= 2"));
    }
    if fs.iter().any(|f| f.arity() != e1) {
        return Err(Error::dims(format!("functions must have arity {e1}")));
    }
    let mut out = Vec::new();
    for (s, x) in samples.iter().enumerate() {
        let (zetas, sigmas) = zeta_sigma(ctx, x)?;
        let slack = sigmas.iter().fold(zetas[m - 1].neg(), |acc, &v| acc.add(v));
        for (k, f) in fs.iter().enumerate() {
            let k = k + 1;
            if version == SedationVersion::C2 {
                let grad = (1..=e1).map(|j| f.partial(j).eval(x)).collect::<Result<Vec<_>>>()?;
                let v = valuation_of(&grad);
                out.push(Verdict::new(format!("jac({s},{k})"), Status::from_bool(v >= Finite(0))).with_sides(v, 0));
                for i in 1..=em {
                    let di = f.partial(i);
                    for j in 1..=e1 {
                        let lhs = di.partial(j).eval(x)?.valuation();
                        out.push(
                            Verdict::new(format!("second({s},{k},{i},{j})"), Status::from_bool(lhs >= slack))
                                .with_sides(lhs, slack),
                        );
                    }
                }
                continue;
            }
            let u = match version {
                SedationVersion::A => f.eval(x)?.valuation(),
                SedationVersion::B => f.eval(x)?.valuation().min(valuation_of(&x[ctx.dim(2)..])),
                _ => Finite(0),
            };
            let required = u.add(slack);
            for i in 1..=em {
                let lhs = f.partial(i).eval(x)?.valuation();
                out.push(
                    Verdict::new(format!("sedated-{version}({s},{k},{i})"), Status::from_bool(lhs >= required))
                        .with_sides(lhs, required),
                );
            }
        }
    }
    Ok(out)
}

/// The set `Z` whose valuative distance enters the gradient bound.
#[derive(Clone, Copy, Debug)]
pub enum ExceptionalSet<'a> {
    Empty,
    Points(&'a [Vector]),
    /// The skeleton of that dimension.
    Skeleton(&'a Stratification, isize),
}

impl ExceptionalSet<'_> {
    pub fn valdist(&self, y: &[FieldElement]) -> Result<ExtendedValuation> {
        match self {
            ExceptionalSet::Empty => Ok(ExtendedValuation::NegInf),
            ExceptionalSet::Points(ps) => Ok(ps
                .iter()
                .map(|p| valuation_of(&vec_sub(y, p)))
                .max()
                .unwrap_or(ExtendedValuation::NegInf)),
            ExceptionalSet::Skeleton(s, i) => s.valdist(y, *i),
        }
    }
}

/// `v(∂_i f(y)) ≥ v(f(y)) - valdist(y, Z)` for every sample and `i`.
pub fn check_gradient_bound(f: &RationalExpr, z: ExceptionalSet<'_>, samples: &[Vector]) -> Result<Vec<Verdict>> {
    let mut out = Vec::new();
    for (s, y) in samples.iter().enumerate() {
        let d = z.valdist(y)?;
        if d == PosInf {
            return Err(Error::invalid(format!("sample {s} lies in the exceptional set")));
        }
        let required = f.eval(y)?.valuation().sub(d);
        for i in 1..=f.arity() {
            let lhs = f.partial(i).eval(y)?.valuation();
            out.push(
                Verdict::new(format!("grad({s},{i})"), Status::from_bool(lhs >= required)).with_sides(lhs, required),
            );
        }
    }
    Ok(out)
}

/// A sedation check as read from JSON.
#[derive(Clone, Debug)]
pub struct SedationInput {
    pub context: SedationContext,
    pub functions: Vec<RationalExpr>,
    pub version: SedationVersion,
    pub samples: Vec<Vector>,
}

#[derive(Serialize, Deserialize)]
struct RawInput {
    context: RawContext,
    functions: Vec<String>,
    version: SedationVersion,
    samples: Vec<Vec<String>>,
}

impl SedationInput {
    pub fn from_json(src: &str) -> Result<Self> {
        let raw: RawInput = serde_json::from_str(src)?;
        let context = SedationContext::from_raw(&raw.context)?;
        let e1 = context.dim(1);
        let functions = raw
            .functions
            .iter()
            .map(|s| RationalExpr::parse(s, Some(e1)))
            .collect::<Result<_>>()?;
        let samples = raw
            .samples
            .iter()
            .map(|p| p.iter().map(|s| s.parse()).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?;
        Ok(SedationInput {
            context,
            functions,
            version: raw.version,
            samples,
        })
    }

    pub fn to_json(&self) -> String {
        let raw = RawInput {
            context: self.context.to_raw(),
            functions: self.functions.iter().map(ToString::to_string).collect(),
            version: self.version,
            samples: self
                .samples
                .iter()
                .map(|p| p.iter().map(ToString::to_string).collect())
                .collect(),
        };
        serde_json::to_string_pretty(&raw).expect("serializable")
    }

    pub fn run(&self) -> Result<Vec<Verdict>> {
        check_sedated(&self.functions, self.version, &self.context, &self.samples)
    }
}
