//! Val-chains, their classification, and the valuative and classical
//! Mostowski checks.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::parse_vector;
use crate::field::{ExtendedValuation, FieldElement};
use crate::grassmann::Subspace;
use crate::linalg::{norm_sq, valuation_of, vec_sub, FracMatrix, Vector};
use crate::strat::{load_catalog, DistSq, RawStratification, Stratification};
use crate::verdict::{Status, Verdict};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChainKind {
    Plain,
    Augmented,
    WeakPlain,
    WeakAugmented,
}

impl ChainKind {
    pub fn is_augmented(self) -> bool {
        matches!(self, ChainKind::Augmented | ChainKind::WeakAugmented)
    }

    pub fn is_weak(self) -> bool {
        matches!(self, ChainKind::WeakPlain | ChainKind::WeakAugmented)
    }
}

impl fmt::Display for ChainKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ChainKind::Plain => "plain",
            ChainKind::Augmented => "augmented",
            ChainKind::WeakPlain => "weak-plain",
            ChainKind::WeakAugmented => "weak-augmented",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ValChain {
    pub points: Vec<Vector>,
    pub dims: Vec<usize>,
    pub kind: ChainKind,
    /// `λ_1, ..., λ_{m+1}`.
    pub lambdas: Vec<ExtendedValuation>,
}

impl ValChain {
    pub fn m(&self) -> usize {
        self.points.len() - 1
    }

    /// `λ_l` with the 1-based indexing of the definition.
    pub fn lambda(&self, l: usize) -> ExtendedValuation {
        self.lambdas[l - 1]
    }

    pub fn tangent_spaces(&self, strat: &Stratification) -> Result<Vec<Subspace>> {
        self.points
            .iter()
            .zip(&self.dims)
            .map(|(p, &d)| strat.tangent_space(p, d))
            .collect()
    }

    pub fn projections(&self, strat: &Stratification) -> Result<Vec<FracMatrix>> {
        Ok(self.tangent_spaces(strat)?.iter().map(Subspace::projection_frac).collect())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Classification {
    Chain(ValChain),
    /// Names the first violated condition.
    Invalid(String),
}

impl Classification {
    pub fn chain(self) -> Option<ValChain> {
        match self {
            Classification::Chain(c) => Some(c),
            Classification::Invalid(_) => None,
        }
    }
}

fn check_shape(points: &[Vector], dims: &[usize], strat: &Stratification) -> Result<()> {
    if points.is_empty() || points.len() != dims.len() {
        return Err(Error::invalid("a chain needs one dimension per point and at least one point"));
    }
    if let Some(p) = points.iter().find(|p| p.len() != strat.ambient) {
        return Err(Error::dims(format!("point of length {} in {}-space", p.len(), strat.ambient)));
    }
    for (p, &d) in points.iter().zip(dims) {
        strat.stratum_at(p, d)?;
    }
    Ok(())
}

/// Dimensions must satisfy `e_0 ≥ e_1 > e_2 > ... > e_m`.
fn dims_reason(dims: &[usize]) -> Option<String> {
    for l in 2..dims.len() {
        if dims[l] >= dims[l - 1] {
            return Some(format!("dims must decrease strictly after e_1, got e_{} = {} and e_{l} = {}", l - 1, dims[l - 1], dims[l]));
        }
    }
    if dims.len() >= 2 && dims[1] > dims[0] {
        return Some(format!("e_1 = {} exceeds e_0 = {}", dims[1], dims[0]));
    }
    None
}

/// Decide whether the points form a strict or weak, plain or augmented
/// val-chain, and compute its distances.
pub fn classify_valchain(points: &[Vector], dims: &[usize], strat: &Stratification) -> Result<Classification> {
    check_shape(points, dims, strat)?;
    if let Some(r) = dims_reason(dims) {
        return Ok(Classification::Invalid(r));
    }
    let m = points.len() - 1;
    let augmented = m >= 1 && dims[0] == dims[1];
    let a0 = &points[0];
    let vd = |j: isize| strat.valdist(a0, j);
    let mut lambdas = Vec::with_capacity(m + 1);
    let mut weak = false;
    for l in 1..=m {
        let lam = valuation_of(&vec_sub(a0, &points[l]));
        lambdas.push(lam);
        if !(augmented && l == 1) {
            let target = vd(dims[l - 1] as isize - 1)?;
            if lam != target {
                return Ok(Classification::Invalid(format!(
                    "nae fails at l = {l}: v(a0 - a{l}) = {lam} but valdist(a0, X^{}) = {target}",
                    dims[l - 1] as isize - 1
                )));
            }
        }
        let below = vd(dims[l] as isize - 1)?;
        if lam <= below {
            if lam == below {
                weak = true;
            } else {
                return Ok(Classification::Invalid(format!(
                    "nawi fails at l = {l}: v(a0 - a{l}) = {lam} < valdist(a0, X^{}) = {below}",
                    dims[l] as isize - 1
                )));
            }
        }
    }
    lambdas.push(vd(dims[m] as isize - 1)?);
    let kind = match (augmented, weak) {
        (false, false) => ChainKind::Plain,
        (true, false) => ChainKind::Augmented,
        (false, true) => ChainKind::WeakPlain,
        (true, true) => ChainKind::WeakAugmented,
    };
    Ok(Classification::Chain(ValChain {
        points: points.to_vec(),
        dims: dims.to_vec(),
        kind,
        lambdas,
    }))
}

/// `(1 - P_0) P_1 ⋯ P_m` for plain kinds, `(P_0 - P_1) P_2 ⋯ P_m` for
/// augmented ones.
pub fn mostowski_product(projections: &[FracMatrix], augmented: bool) -> FracMatrix {
    let head = if augmented {
        projections[0].try_sub(&projections[1]).expect("same shape")
    } else {
        projections[0].complement()
    };
    let skip = if augmented { 2 } else { 1 };
    match FracMatrix::product(&projections[skip..]) {
        Some(r) => head.try_mul(&r).expect("conformable"),
        None => head,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VmOutcome {
    /// `vm1` or `vm2`.
    pub condition: &'static str,
    pub lhs: ExtendedValuation,
    pub required: ExtendedValuation,
}

impl VmOutcome {
    pub fn holds(&self) -> bool {
        self.lhs >= self.required
    }

    pub fn margin(&self) -> ExtendedValuation {
        self.lhs.sub(self.required)
    }

    pub fn verdict(&self) -> Verdict {
        Verdict::new(self.condition, Status::from_bool(self.holds())).with_sides(self.lhs, self.required)
    }
}

/// Evaluate vm1 or vm2 at a chain. For `m = 0` the right side is `0`.
pub fn check_valuative_mostowski(chain: &ValChain, strat: &Stratification) -> Result<VmOutcome> {
    let ps = chain.projections(strat)?;
    let augmented = chain.kind.is_augmented();
    let lhs = mostowski_product(&ps, augmented).valuation();
    let required = if chain.m() == 0 {
        ExtendedValuation::Finite(0)
    } else {
        chain.lambda(1).sub(chain.lambda(chain.m() + 1))
    };
    Ok(VmOutcome {
        condition: if augmented { "vm2" } else { "vm1" },
        lhs,
        required,
    })
}

/// Constants `(c, c', C', C'', C''')` of the classical conditions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainConstants {
    pub c: FieldElement,
    pub c1: FieldElement,
    pub big_c1: FieldElement,
    pub big_c2: FieldElement,
    pub big_c3: FieldElement,
}

impl ChainConstants {
    pub fn new(values: [FieldElement; 5]) -> Result<Self> {
        if let Some(x) = values.iter().find(|x| !x.is_positive()) {
            return Err(Error::invalid(format!("chain constants must be positive, got {x}")));
        }
        let [c, c1, big_c1, big_c2, big_c3] = values;
        Ok(ChainConstants {
            c,
            c1,
            big_c1,
            big_c2,
            big_c3,
        })
    }

    /// `(c, 2c², 2c², 2c, C)`.
    pub fn lipschitz(c: FieldElement, big_c: FieldElement) -> Result<Self> {
        let two = FieldElement::from_int(2);
        let sq = &two * &c.square();
        Self::new([c.clone(), sq.clone(), sq, &two * &c, big_c])
    }

    /// `(c, c, C, C, C)`.
    pub fn uniform(c: FieldElement, big_c: FieldElement) -> Result<Self> {
        Self::new([c.clone(), c, big_c.clone(), big_c.clone(), big_c])
    }

    /// `(c, c, 1, 1/c, C)`.
    pub fn reciprocal(c: FieldElement, big_c: FieldElement) -> Result<Self> {
        let inv = c.recip()?;
        Self::new([c.clone(), c, FieldElement::one(), inv, big_c])
    }

    pub fn values(&self) -> [&FieldElement; 5] {
        [&self.c, &self.c1, &self.big_c1, &self.big_c2, &self.big_c3]
    }
}

impl std::str::FromStr for ChainConstants {
    type Err = Error;

    /// Five comma-separated elements.
    fn from_str(s: &str) -> Result<Self> {
        let v = parse_vector(&format!("({s})"))?;
        let arr: [FieldElement; 5] = v
            .try_into()
            .map_err(|v: Vec<FieldElement>| Error::invalid(format!("expected 5 constants, got {}", v.len())))?;
        Self::new(arr)
    }
}

impl fmt::Display for ChainConstants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = self.values();
        write!(f, "({}, {}, {}, {}, {})", v[0], v[1], v[2], v[3], v[4])
    }
}

/// Three-valued result of comparing quantities known up to bounds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tri {
    True,
    False,
    Unknown,
}

/// Closed interval of squared distances; `None` is `+∞`.
#[derive(Clone, Debug)]
struct Interval {
    lo: Option<FieldElement>,
    hi: Option<FieldElement>,
}

impl Interval {
    fn exact(x: FieldElement) -> Self {
        Interval {
            lo: Some(x.clone()),
            hi: Some(x),
        }
    }

    fn from_dist(d: DistSq) -> Self {
        match d {
            DistSq::Infinite => Interval { lo: None, hi: None },
            DistSq::Exact(x) => Self::exact(x),
            DistSq::Bounds(lo, hi) => Interval { lo: Some(lo), hi: Some(hi) },
        }
    }

    fn scale(&self, k: &FieldElement) -> Self {
        Interval {
            lo: self.lo.as_ref().map(|x| x * k),
            hi: self.hi.as_ref().map(|x| x * k),
        }
    }
}

fn ge(a: &Option<FieldElement>, b: &Option<FieldElement>) -> bool {
    match (a, b) {
        (None, _) => true,
        (Some(_), None) => false,
        (Some(a), Some(b)) => a >= b,
    }
}

/// `x ≥ y` for every choice within the intervals, for none, or unknown.
fn ge_tri(x: &Interval, y: &Interval) -> Tri {
    if ge(&x.lo, &y.hi) {
        Tri::True
    } else if !ge(&x.hi, &y.lo) {
        Tri::False
    } else {
        Tri::Unknown
    }
}

fn not(t: Tri) -> Tri {
    match t {
        Tri::True => Tri::False,
        Tri::False => Tri::True,
        Tri::Unknown => Tri::Unknown,
    }
}

/// Classical chain membership, compared on squares. Returns the first
/// condition that fails or cannot be decided.
fn classical_membership(
    points: &[Vector],
    dims: &[usize],
    k: &ChainConstants,
    strat: &Stratification,
) -> Result<(Tri, String)> {
    let a0 = &points[0];
    let dist = |i: isize| -> Result<Interval> { Ok(Interval::from_dist(strat.dist_sq(a0, i)?)) };
    let augmented = points.len() >= 2 && dims[0] == dims[1];
    let plain: Vec<usize> = if augmented {
        std::iter::once(0).chain(2..points.len()).collect()
    } else {
        (0..points.len()).collect()
    };
    let check = |t: Tri, what: String| -> Option<(Tri, String)> { (t != Tri::True).then_some((t, what)) };
    // closeness: |a0 - al|² < c² dist²(a0, X^{el})
    for &l in &plain[1..] {
        let d = Interval::exact(norm_sq(&vec_sub(a0, &points[l])));
        let t = not(ge_tri(&d, &dist(dims[l] as isize)?.scale(&k.c.square())));
        if let Some(r) = check(t, format!("closeness condition at l = {l}")) {
            return Ok(r);
        }
    }
    // skeleton gaps: for e_m ≤ i < e_0, compare dist(a0, X^{i-1}) with dist(a0, X^i).
    let e_last = dims[*plain.last().expect("nonempty")];
    let chosen: Vec<usize> = plain[1..].iter().map(|&l| dims[l]).collect();
    for i in e_last..dims[0] {
        let below = dist(i as isize - 1)?;
        let at = dist(i as isize)?;
        let t = if chosen.contains(&i) {
            ge_tri(&below, &at.scale(&k.big_c1.square()))
        } else {
            not(ge_tri(&below, &at.scale(&k.c1.square())))
        };
        if let Some(r) = check(t, format!("skeleton gap condition at i = {i}")) {
            return Ok(r);
        }
    }
    if augmented {
        // |a0 - a1|² C''² ≤ dist²(a0, X^{e1-1})
        let lhs = Interval::exact(&norm_sq(&vec_sub(a0, &points[1])) * &k.big_c2.square());
        let t = ge_tri(&dist(dims[1] as isize - 1)?, &lhs);
        if let Some(r) = check(t, "augmented condition".into()) {
            return Ok(r);
        }
    }
    Ok((Tri::True, String::new()))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassicalOutcome {
    pub is_chain: Tri,
    pub verdict: Verdict,
}

/// Classical Mostowski condition at one candidate chain, with the
/// Frobenius norm. Points failing chain membership give a vacuous verdict.
pub fn check_classical_mostowski(
    points: &[Vector],
    dims: &[usize],
    k: &ChainConstants,
    strat: &Stratification,
) -> Result<ClassicalOutcome> {
    check_shape(points, dims, strat)?;
    let augmented = points.len() >= 2 && dims[0] == dims[1];
    let label = if augmented { "m2" } else { "m1" };
    if let Some(r) = dims_reason(dims) {
        return Ok(ClassicalOutcome {
            is_chain: Tri::False,
            verdict: Verdict::new(label, Status::Vacuous).with_note(r),
        });
    }
    if points.len() == 1 {
        return Ok(ClassicalOutcome {
            is_chain: Tri::True,
            verdict: Verdict::new(label, Status::Vacuous).with_note("m = 0"),
        });
    }
    let (is_chain, why) = classical_membership(points, dims, k, strat)?;
    match is_chain {
        Tri::False => {
            return Ok(ClassicalOutcome {
                is_chain,
                verdict: Verdict::new(label, Status::Vacuous).with_note(format!("not a chain: {why} fails")),
            })
        }
        Tri::Unknown => {
            return Ok(ClassicalOutcome {
                is_chain,
                verdict: Verdict::new(label, Status::Indeterminate).with_note(format!("{why} undecided")),
            })
        }
        Tri::True => {}
    }
    let ps = points
        .iter()
        .zip(dims)
        .map(|(p, &d)| Ok(strat.tangent_space(p, d)?.projection_frac()))
        .collect::<Result<Vec<_>>>()?;
    let q_sq = mostowski_product(&ps, augmented).frobenius_sq();
    let n_sq = norm_sq(&vec_sub(&points[0], &points[1]));
    let rhs = &k.big_c3.square() * &n_sq;
    let d = Interval::from_dist(strat.dist_sq(&points[0], dims[dims.len() - 1] as isize - 1)?);
    // |Q|² dist² < C'''² |a0 - a1|²; an empty skeleton demands Q = 0.
    let (status, lhs) = if d.hi.is_none() && d.lo.is_none() {
        (Status::from_bool(q_sq.is_zero()), q_sq.to_string())
    } else {
        let lhs = Interval {
            lo: d.lo.as_ref().map(|x| x * &q_sq),
            hi: d.hi.as_ref().map(|x| x * &q_sq),
        };
        let t = not(ge_tri(&lhs, &Interval::exact(rhs.clone())));
        let shown = match (&lhs.lo, &lhs.hi) {
            (Some(lo), Some(hi)) if lo == hi => lo.to_string(),
            (lo, hi) => format!("[{},{}]", fmt_opt(lo), fmt_opt(hi)),
        };
        let status = match t {
            Tri::True => Status::Holds,
            Tri::False => Status::Fails,
            Tri::Unknown => Status::Indeterminate,
        };
        (status, shown)
    };
    Ok(ClassicalOutcome {
        is_chain,
        verdict: Verdict::new(label, status)
            .with_sides(lhs, format!("<{rhs}"))
            .with_note("squares, Frobenius norm"),
    })
}

fn fmt_opt(x: &Option<FieldElement>) -> String {
    x.as_ref().map_or("+inf".into(), ToString::to_string)
}

/// The square of the least `C'''` for which the classical condition holds
/// (non-strictly) at this chain, with its valuation.
pub fn minimal_third_constant(
    points: &[Vector],
    dims: &[usize],
    strat: &Stratification,
) -> Result<(FieldElement, ExtendedValuation)> {
    check_shape(points, dims, strat)?;
    if points.len() == 1 {
        return Ok((FieldElement::zero(), ExtendedValuation::PosInf));
    }
    let augmented = dims[0] == dims[1];
    let ps = points
        .iter()
        .zip(dims)
        .map(|(p, &d)| Ok(strat.tangent_space(p, d)?.projection_frac()))
        .collect::<Result<Vec<_>>>()?;
    let q_sq = mostowski_product(&ps, augmented).frobenius_sq();
    if q_sq.is_zero() {
        return Ok((FieldElement::zero(), ExtendedValuation::PosInf));
    }
    let d = match strat.dist_sq(&points[0], dims[dims.len() - 1] as isize - 1)? {
        DistSq::Exact(d) => d,
        DistSq::Infinite => return Err(Error::invalid("no finite constant: the skeleton is empty but the product is not zero")),
        DistSq::Bounds(..) => return Err(Error::OracleIndeterminate("minimal constant needs an exact distance".into())),
    };
    let n_sq = norm_sq(&vec_sub(&points[0], &points[1]));
    let k = (&q_sq * &d).checked_div(&n_sq)?;
    let v = k.valuation();
    Ok((k, v))
}

/// A chain file: a catalog entry or inline stratification, and either a
/// named catalog chain or explicit points.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct ChainFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub catalog: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stratification: Option<RawStratification>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chain: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<Vec<FieldElement>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dims: Option<Vec<usize>>,
    #[serde(default = "auto")]
    pub kind_hint: String,
}

fn auto() -> String {
    "auto".into()
}

/// A chain file with its stratification built.
pub struct ResolvedChain {
    pub strat: Stratification,
    pub points: Vec<Vector>,
    pub dims: Vec<usize>,
    pub kind_hint: String,
}

impl ChainFile {
    pub fn from_json(src: &str) -> Result<Self> {
        Ok(serde_json::from_str(src)?)
    }

    pub fn resolve(&self) -> Result<ResolvedChain> {
        let (strat, named) = match (&self.catalog, &self.stratification) {
            (Some(name), None) => {
                let e = load_catalog(name)?;
                let named = match &self.chain {
                    Some(c) => Some(
                        e.chain(c)
                            .cloned()
                            .ok_or_else(|| Error::invalid(format!("catalog entry {name} has no chain {c:?}")))?,
                    ),
                    None => None,
                };
                (e.strat, named)
            }
            (None, Some(raw)) => (raw.build()?, None),
            _ => return Err(Error::invalid("give exactly one of \"catalog\" and \"stratification\"")),
        };
        let (points, dims) = match (named, &self.points, &self.dims) {
            (Some(c), None, None) => (c.points, c.dims),
            (None, Some(p), Some(d)) => (p.clone(), d.clone()),
            _ => return Err(Error::invalid("give either \"chain\" or both \"points\" and \"dims\"")),
        };
        if !matches!(self.kind_hint.as_str(), "auto" | "plain" | "augmented") {
            return Err(Error::invalid(format!("unknown kind_hint {:?}", self.kind_hint)));
        }
        Ok(ResolvedChain {
            strat,
            points,
            dims,
            kind_hint: self.kind_hint.clone(),
        })
    }
}

impl ResolvedChain {
    /// Classification, with a kind hint that disagrees reported as invalid.
    pub fn classify(&self) -> Result<Classification> {
        let c = classify_valchain(&self.points, &self.dims, &self.strat)?;
        if let Classification::Chain(ch) = &c {
            let want_aug = match self.kind_hint.as_str() {
                "plain" => Some(false),
                "augmented" => Some(true),
                _ => None,
            };
            if want_aug.is_some_and(|a| a != ch.kind.is_augmented()) {
                return Ok(Classification::Invalid(format!(
                    "kind_hint {} but the dimensions make it {}",
                    self.kind_hint, ch.kind
                )));
            }
        }
        Ok(c)
    }
}
