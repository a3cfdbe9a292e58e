//! Rectilinearization along a sequence of aligned graph strata, the chain
//! balls around it, and the checkers built on top: candidate subspaces,
//! isometry on balls, and the derivative gap between two levels.
//!
//! Coordinates of `x ∈ Q(ε)^n` split into groups
//! `x = (x⁽ᵐ⁾, x⁽ᵐ⁻¹⁾, …, x⁽⁰⁾, x^⋆)`: `x⁽ᵐ⁾` is the first `e_m`
//! coordinates, `x⁽ˡ⁾` runs over `e_{l+1}+1..=e_l`, and `x^⋆` over the
//! coordinates past `e_0`.

mod fixtures;
mod sedation;

use std::ops::Range;

use serde::{Deserialize, Serialize};

pub use fixtures::{catalog_sequences, cone_chart, parabola_plane, sample_base_points, sample_ball};
pub use sedation::{
    check_gradient_bound, check_sedated, zeta_sigma, ExceptionalSet, SedationContext, SedationInput, SedationVersion,
};

use crate::chains::ValChain;
use crate::error::{Error, Result};
use crate::expr::{jacobian, RationalExpr};
use crate::field::{ExtendedValuation, FieldElement};
use crate::grassmann::Subspace;
use crate::linalg::{is_gl_o, valuation_of, vec_sub, Matrix, Vector};
use crate::strat::{RawStratum, Stratification, Stratum};
use crate::verdict::{Status, Verdict};

/// Graph strata `S⁰, …, S^m` with `e_0 ≥ e_1 > … > e_m`, each the graph
/// of `ρ^l` over its first `e_l` coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct StrataSeq {
    ambient: usize,
    strata: Vec<Stratum>,
}

/// Which map to apply: `φ_l` on `Q(ε)^{e_l}`, or `φ̃_l` on `Q(ε)^n`,
/// which also straightens the coordinates past `e_l` along `S^l`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rectification {
    Partial(usize),
    Full(usize),
}

#[derive(Serialize, Deserialize)]
struct RawSeq {
    ambient_dim: usize,
    strata: Vec<RawStratum>,
}

impl StrataSeq {
    pub fn new(ambient: usize, strata: Vec<Stratum>) -> Result<Self> {
        if strata.is_empty() {
            return Err(Error::invalid("a sequence needs at least one stratum"));
        }
        for s in &strata {
            if s.ambient != ambient {
                return Err(Error::dims(format!("stratum {} lives in {}-space", s.label, s.ambient)));
            }
            if s.rho().is_none() {
                return Err(Error::invalid(format!("stratum {} is not a graph", s.label)));
            }
        }
        let dims: Vec<usize> = strata.iter().map(|s| s.dim).collect();
        if dims.len() > 1 && dims[0] < dims[1] || dims.windows(2).skip(1).any(|w| w[0] <= w[1]) {
            return Err(Error::dims(format!("dimensions {dims:?} must satisfy e0 >= e1 > e2 > ...")));
        }
        Ok(StrataSeq { ambient, strata })
    }

    /// The strata through the points of a chain.
    pub fn from_chain(strat: &Stratification, points: &[Vector], dims: &[usize]) -> Result<Self> {
        let strata = points
            .iter()
            .zip(dims)
            .map(|(p, &d)| strat.stratum_at(p, d).cloned())
            .collect::<Result<Vec<_>>>()?;
        Self::new(strat.ambient, strata)
    }

    pub fn from_json(src: &str) -> Result<Self> {
        let raw: RawSeq = serde_json::from_str(src)?;
        let strata = raw.strata.iter().map(|s| s.build(raw.ambient_dim)).collect::<Result<Vec<_>>>()?;
        Self::new(raw.ambient_dim, strata)
    }

    pub fn to_json(&self) -> String {
        let raw = RawSeq {
            ambient_dim: self.ambient,
            strata: self.strata.iter().map(RawStratum::from_stratum).collect(),
        };
        serde_json::to_string_pretty(&raw).expect("serializable")
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn m(&self) -> usize {
        self.strata.len() - 1
    }

    /// `e_l`.
    pub fn dim(&self, l: usize) -> usize {
        self.strata[l].dim
    }

    pub fn stratum(&self, l: usize) -> &Stratum {
        &self.strata[l]
    }

    pub fn rho(&self, l: usize) -> &[RationalExpr] {
        self.strata[l].rho().expect("checked on construction")
    }

    /// Coordinate range of the group `x⁽ˡ⁾`.
    pub fn group(&self, l: usize) -> Range<usize> {
        if l == self.m() {
            0..self.dim(l)
        } else {
            self.dim(l + 1)..self.dim(l)
        }
    }

    /// Coordinate range of `x^⋆`.
    pub fn star(&self) -> Range<usize> {
        self.dim(0)..self.ambient
    }

    /// Whether `pr_{≤e_l}(x)` lies in the base of `S^l`.
    pub fn in_base(&self, l: usize, x: &[FieldElement]) -> Result<bool> {
        let e = self.dim(l);
        if x.len() < e {
            return Err(Error::dims(format!("point of length {} projected to {e} coordinates", x.len())));
        }
        self.strata[l].base_contains(&x[..e])
    }

    fn require_base(&self, l: usize, x: &[FieldElement]) -> Result<()> {
        if self.in_base(l, x)? {
            Ok(())
        } else {
            Err(Error::OutsideBase { level: l })
        }
    }

    fn check_level(&self, l: usize) -> Result<()> {
        if l > self.m() {
            return Err(Error::invalid(format!("level {l} beyond m = {}", self.m())));
        }
        Ok(())
    }

    /// The translation `ρ^{j+1}_{(j)}` applied to `pr_{≤e_{j+1}}(x)`.
    fn shift(&self, j: usize, x: &[FieldElement]) -> Result<Vector> {
        self.require_base(j + 1, x)?;
        let e = self.dim(j + 1);
        let width = self.dim(j) - e;
        self.rho(j + 1)[..width].iter().map(|r| r.eval(&x[..e])).collect()
    }

    fn partial(&self, l: usize, x: &[FieldElement], inverse: bool) -> Result<Vector> {
        if x.len() != self.dim(l) {
            return Err(Error::dims(format!("phi_{l} acts on {} coordinates", self.dim(l))));
        }
        let mut out = x.to_vec();
        // Going up from the smallest group keeps the arguments of each
        // translation already in original coordinates.
        for j in (l..self.m()).rev() {
            let s = self.shift(j, if inverse { &out } else { x })?;
            for (k, v) in self.group(j).zip(s) {
                out[k] = if inverse { &out[k] + &v } else { &out[k] - &v };
            }
        }
        Ok(out)
    }

    /// `φ_l(x)` or `φ̃_l(x)`.
    pub fn rectilinearize(&self, mode: Rectification, x: &[FieldElement]) -> Result<Vector> {
        self.apply(mode, x, false)
    }

    pub fn rectilinearize_inverse(&self, mode: Rectification, y: &[FieldElement]) -> Result<Vector> {
        self.apply(mode, y, true)
    }

    fn apply(&self, mode: Rectification, x: &[FieldElement], inverse: bool) -> Result<Vector> {
        match mode {
            Rectification::Partial(l) => {
                self.check_level(l)?;
                self.partial(l, x, inverse)
            }
            Rectification::Full(l) => {
                self.check_level(l)?;
                if x.len() != self.ambient {
                    return Err(Error::dims(format!("full rectilinearization acts on {} coordinates", self.ambient)));
                }
                let e = self.dim(l);
                let head = self.partial(l, &x[..e], inverse)?;
                let xbar = if inverse { &head[..] } else { &x[..e] };
                self.require_base(l, xbar)?;
                let mut out = head.clone();
                for (r, y) in self.rho(l).iter().zip(&x[e..]) {
                    let v = r.eval(xbar)?;
                    out.push(if inverse { y + &v } else { y - &v });
                }
                Ok(out)
            }
        }
    }

    /// Components of the map as expressions.
    pub fn map_exprs(&self, mode: Rectification) -> Result<Vec<RationalExpr>> {
        let (Rectification::Partial(l) | Rectification::Full(l)) = mode;
        self.check_level(l)?;
        let arity = match mode {
            Rectification::Partial(_) => self.dim(l),
            Rectification::Full(_) => self.ambient,
        };
        let e = self.dim(l);
        let mut out: Vec<RationalExpr> = (1..=arity).map(|i| RationalExpr::var(arity, i)).collect();
        for j in l..self.m() {
            for (k, r) in self.group(j).zip(self.rho(j + 1)) {
                out[k] = out[k].sub(&r.with_arity(arity));
            }
        }
        if matches!(mode, Rectification::Full(_)) {
            for (k, r) in (e..arity).zip(self.rho(l)) {
                out[k] = out[k].sub(&r.with_arity(arity));
            }
        }
        Ok(out)
    }

    /// Jacobian of the map at `x`, after checking that the map is defined
    /// there.
    pub fn jacobian(&self, mode: Rectification, x: &[FieldElement]) -> Result<Matrix> {
        self.rectilinearize(mode, x)?;
        jacobian(&self.map_exprs(mode)?, x)
    }

    /// `v(Jac ρ^l) ≥ 0` at `pr_{≤e_l}(x)`.
    pub fn aligned_at(&self, l: usize, x: &[FieldElement]) -> Result<bool> {
        self.require_base(l, x)?;
        let e = self.dim(l);
        if e == 0 || self.rho(l).is_empty() {
            return Ok(true);
        }
        Ok(jacobian(self.rho(l), &x[..e])?.valuation() >= ExtendedValuation::Finite(0))
    }

    /// Whether `Jac φ_l ∈ GL(O)` at `pr_{≤e_l}(x)`.
    pub fn jacobian_in_gl_o(&self, l: usize, x: &[FieldElement]) -> Result<bool> {
        let j = self.jacobian(Rectification::Partial(l), &x[..self.dim(l)])?;
        if j.rows() == 0 {
            return Ok(true);
        }
        is_gl_o(&j)
    }

    /// The graph point `(pr_{≤e_l}(p), ρ^l(pr_{≤e_l}(p)))`.
    pub fn lift(&self, l: usize, p: &[FieldElement]) -> Result<Vector> {
        self.require_base(l, p)?;
        let e = self.dim(l);
        let mut out = p[..e].to_vec();
        for r in self.rho(l) {
            out.push(r.eval(&p[..e])?);
        }
        Ok(out)
    }
}

/// `V_{0,m} = (Jac_a φ̃_0)⁻¹(Q(ε)^{e_m} × 0)`.
pub fn candidate_subspace(seq: &StrataSeq, a: &[FieldElement]) -> Result<Subspace> {
    if !seq.stratum(0).contains(a)? {
        return Err(Error::PointNotOnStratum {
            stratum: seq.stratum(0).label.clone(),
        });
    }
    let inv = seq.jacobian(Rectification::Full(0), a)?.inverse()?;
    let em = seq.dim(seq.m());
    let cols: Vec<Vector> = (0..em).map(|j| inv.column(j)).collect();
    Subspace::span(seq.ambient_dim(), &cols)
}

/// `v(φ_l(x¹) - φ_l(x²)) = v(x¹ - x²)` for pairs in `B_{>radius}(center)`.
pub fn check_isometry(
    seq: &StrataSeq,
    l: usize,
    center: &[FieldElement],
    radius: ExtendedValuation,
    pairs: &[(Vector, Vector)],
) -> Result<Vec<Verdict>> {
    seq.check_level(l)?;
    if center.len() != seq.dim(l) {
        return Err(Error::dims("ball center must lie in the base space"));
    }
    let inside = |x: &[FieldElement]| valuation_of(&vec_sub(x, center)) > radius;
    let mut out = Vec::with_capacity(pairs.len());
    for (index, (x1, x2)) in pairs.iter().enumerate() {
        if x1.len() != center.len() || x2.len() != center.len() || !inside(x1) || !inside(x2) {
            return Err(Error::OutsideBall { index });
        }
        let mode = Rectification::Partial(l);
        let lhs = valuation_of(&vec_sub(&seq.rectilinearize(mode, x1)?, &seq.rectilinearize(mode, x2)?));
        let rhs = valuation_of(&vec_sub(x1, x2));
        out.push(Verdict::new(format!("iso({index})"), Status::from_bool(lhs == rhs)).with_sides(lhs, rhs));
    }
    Ok(out)
}

fn require_chain_on(seq: &StrataSeq, chain: &ValChain) -> Result<()> {
    if chain.points.len() != seq.m() + 1 {
        return Err(Error::dims("chain and sequence have different lengths"));
    }
    for (l, p) in chain.points.iter().enumerate() {
        if !seq.stratum(l).contains(p)? {
            return Err(Error::PointNotOnStratum {
                stratum: seq.stratum(l).label.clone(),
            });
        }
    }
    Ok(())
}

/// Derivatives of the straightened map `ρ^{l♭} = ρ^l ∘ φ_l⁻¹` at
/// `φ_l(pr_{≤e_l}(p))`, restricted to the given components.
fn flat_jacobian(seq: &StrataSeq, l: usize, p: &[FieldElement], components: Range<usize>) -> Result<Matrix> {
    let e = seq.dim(l);
    let xbar = &p[..e];
    let jrho = jacobian(&seq.rho(l)[components], xbar)?;
    let jphi = seq.jacobian(Rectification::Partial(l), xbar)?;
    jrho.try_mul(&jphi.inverse()?)
}

/// `v(∂_i ρ^{0♭}(ā♭) - ∂_i ρ^{1♭}_⋆(b̄♭)) ≥ λ_1 - λ_{m+1}` for
/// `1 ≤ i ≤ e_m`, with `ā = pr_{≤e_0}(a⁰)` and `b̄ = pr_{≤e_1}(a¹)`.
pub fn check_derivative_gap(seq: &StrataSeq, chain: &ValChain) -> Result<Vec<Verdict>> {
    let m = seq.m();
    if m == 0 {
        return Err(Error::invalid("the derivative gap needs m >= 1"));
    }
    require_chain_on(seq, chain)?;
    let (e0, e1) = (seq.dim(0), seq.dim(1));
    let n = seq.ambient_dim();
    let d0 = flat_jacobian(seq, 0, &chain.points[0], 0..n - e0)?;
    let d1 = flat_jacobian(seq, 1, &chain.points[1], e0 - e1..n - e1)?;
    let required = chain.lambda(1).sub(chain.lambda(m + 1));
    Ok((0..seq.dim(m))
        .map(|i| {
            let gap = valuation_of(&vec_sub(&d0.column(i), &d1.column(i)));
            Verdict::new(format!("gap({})", i + 1), Status::from_bool(gap >= required)).with_sides(gap, required)
        })
        .collect())
}

/// `v(a⁰ - a^{[l]}) = λ_l` for `1 ≤ l ≤ m` with `e_l < e_0`, where
/// `a^{[l]}` lifts `pr_{≤e_l}(a⁰)` to `S^l`. When `e_l = e_0` the lift is
/// `a⁰` itself and there is nothing to compare.
pub fn check_chain_lifts(seq: &StrataSeq, chain: &ValChain) -> Result<Vec<Verdict>> {
    require_chain_on(seq, chain)?;
    let a = &chain.points[0];
    (1..=seq.m())
        .filter(|&l| seq.dim(l) < seq.dim(0))
        .map(|l| {
            let lhs = valuation_of(&vec_sub(a, &seq.lift(l, a)?));
            let want = chain.lambda(l);
            Ok(Verdict::new(format!("lift({l})"), Status::from_bool(lhs == want)).with_sides(lhs, want))
        })
        .collect()
}

/// `v(ρ^l(x¹) - ρ^l(x²)) ≥ v(x¹ - x²)` on sample pairs of the base.
pub fn check_rho_contraction(seq: &StrataSeq, l: usize, pairs: &[(Vector, Vector)]) -> Result<Vec<Verdict>> {
    seq.check_level(l)?;
    pairs
        .iter()
        .enumerate()
        .map(|(k, (x1, x2))| {
            let e = seq.dim(l);
            let r1 = &seq.lift(l, x1)?[e..];
            let r2 = &seq.lift(l, x2)?[e..];
            let lhs = valuation_of(&vec_sub(r1, r2));
            let rhs = valuation_of(&vec_sub(x1, x2));
            Ok(Verdict::new(format!("contract({k})"), Status::from_bool(lhs >= rhs)).with_sides(lhs, rhs))
        })
        .collect()
}

/// `v(pr_{>e_{l+1}}(ā♭)) ≥ λ_{l+1}` for `0 ≤ l < m`, where
/// `ā♭ = φ_0(pr_{≤e_0}(a⁰))`.
pub fn check_flat_offsets(seq: &StrataSeq, chain: &ValChain) -> Result<Vec<Verdict>> {
    require_chain_on(seq, chain)?;
    let e0 = seq.dim(0);
    let flat = seq.rectilinearize(Rectification::Partial(0), &chain.points[0][..e0])?;
    Ok((0..seq.m())
        .map(|l| {
            let lhs = valuation_of(&flat[seq.dim(l + 1)..]);
            let want = chain.lambda(l + 1);
            Verdict::new(format!("offset({l})"), Status::from_bool(lhs >= want)).with_sides(lhs, want)
        })
        .collect())
}

#[cfg(test)]
mod tests;
