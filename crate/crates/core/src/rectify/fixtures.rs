//! Ready-made strata sequences and samplers for them.

use rand::Rng;

use crate::error::{Error, Result};
use crate::expr::RationalExpr;
use crate::field::FieldElement;
use crate::linalg::Vector;
use crate::strat::{load_catalog, Condition, Stratum};

use super::StrataSeq;

fn expr(src: &str, arity: usize) -> Result<RationalExpr> {
    RationalExpr::parse(src, Some(arity))
}

fn graph(label: &str, ambient: usize, dim: usize, rho: &[&str], base: &[&str]) -> Result<Stratum> {
    let rho = rho.iter().map(|s| expr(s, dim)).collect::<Result<_>>()?;
    let base = base
        .iter()
        .map(|s| match s.strip_prefix("!=") {
            Some(s) => Ok(Condition::Nonzero(expr(s, dim)?)),
            None => Ok(Condition::Positive(expr(s, dim)?)),
        })
        .collect::<Result<_>>()?;
    Stratum::graph(label, ambient, dim, rho, base)
}

/// The sequences through the named chains of a catalog entry that has
/// graph strata, keyed by chain name. `cone` is served by [`cone_chart`].
pub fn catalog_sequences(name: &str) -> Result<Vec<(String, StrataSeq)>> {
    if name == "cone" {
        return Ok(vec![("chart".into(), cone_chart()?)]);
    }
    let entry = load_catalog(name)?;
    entry
        .chains
        .iter()
        .map(|c| Ok((c.name.clone(), StrataSeq::from_chain(&entry.strat, &c.points, &c.dims)?)))
        .collect()
}

/// A graph chart of the cone `x1·z = x2²` near the ruling
/// `x2 = x1/4`: the sheet over `{x1 > 0, |x2| < x1/2}` minus the ruling,
/// the ruling itself, and the apex.
pub fn cone_chart() -> Result<StrataSeq> {
    StrataSeq::new(
        3,
        vec![
            graph("sheet", 3, 2, &["x2^2/x1"], &["x1", "x1^2 - 4*x2^2", "!=x2 - x1/4"])?,
            graph("ruling", 3, 1, &["x1/4", "x1/16"], &["x1"])?,
            graph("apex", 3, 0, &["0", "0", "0"], &[])?,
        ],
    )
}

/// The open half plane `x1 > 0`, the parabola branch `x2 = x1²` over it,
/// and the origin; here `φ_0(x) = (x1, x2 - x1²)`.
pub fn parabola_plane() -> Result<StrataSeq> {
    StrataSeq::new(
        2,
        vec![
            graph("half-plane", 2, 2, &[], &["x1"])?,
            graph("branch+", 2, 1, &["x1^2"], &["x1"])?,
            graph("origin", 2, 0, &["0", "0"], &[])?,
        ],
    )
}

/// `c·ε^k + d·ε^(k+1)` with `c ≠ 0` and `k ≥ min_ord`.
fn random_element<R: Rng>(rng: &mut R, min_ord: i64) -> FieldElement {
    let mut c = 0;
    while c == 0 {
        c = rng.gen_range(-3..=3);
    }
    let k = rng.gen_range(min_ord..=min_ord + 2);
    let lead = &FieldElement::from_int(c) * &FieldElement::eps_pow(k);
    let next = &FieldElement::from_int(rng.gen_range(-2..=2)) * &FieldElement::eps_pow(k + 1);
    &lead + &next
}

const MAX_TRIES: usize = 10_000;

/// Points of `Q(ε)^{e_0}` in O whose projections lie in every base of
/// the sequence.
pub fn sample_base_points<R: Rng>(seq: &StrataSeq, rng: &mut R, count: usize) -> Result<Vec<Vector>> {
    let e0 = seq.dim(0);
    let mut out = Vec::with_capacity(count);
    for _ in 0..MAX_TRIES {
        if out.len() == count {
            break;
        }
        let x: Vector = (0..e0).map(|_| random_element(rng, 0)).collect();
        let mut ok = true;
        for l in 0..=seq.m() {
            if !seq.in_base(l, &x)? {
                ok = false;
                break;
            }
        }
        if ok {
            out.push(x);
        }
    }
    if out.len() < count {
        return Err(Error::invalid("could not sample enough base points"));
    }
    Ok(out)
}

/// Pairs of points in `B_{>radius}(center)`.
pub fn sample_ball<R: Rng>(rng: &mut R, center: &[FieldElement], radius: i64, count: usize) -> Vec<(Vector, Vector)> {
    let point = |rng: &mut R| -> Vector { center.iter().map(|c| c + &random_element(rng, radius + 1)).collect() };
    (0..count).map(|_| (point(rng), point(rng))).collect()
}
