//! Linear subspaces of Q(ε)^n, the valuative distance `Δ`, graph-slope
//! valuations and aligner search.

mod aligner;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub use aligner::{find_aligner, AlignerSet};

use crate::error::{Error, Result};
use crate::expr::{parse_element_from, Parser};
use crate::field::{ExtendedValuation, FieldElement, Poly};
use crate::linalg::{
    clear_denominators, is_zero_vec, projection_from_polys, valuation_of, vec_sub, FracMatrix, Matrix, Vector,
};

/// A subspace stored by its reduced column-echelon basis.
///
/// The basis columns are the nonzero rows of the reduced row echelon form
/// of any spanning set, so equal subspaces have identical bases and
/// `Eq`/`Hash` are structural.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    ambient: usize,
    /// Columns of the canonical basis, as rows (d × n).
    rows: Matrix,
    pivots: Vec<usize>,
}

impl Subspace {
    /// Span of arbitrary vectors of length `n`; dependent ones are fine.
    pub fn span(n: usize, vectors: &[Vector]) -> Result<Self> {
        if let Some(v) = vectors.iter().find(|v| v.len() != n) {
            return Err(Error::dims(format!("vector of length {} in {n}-space", v.len())));
        }
        let m = Matrix::from_rows(vectors.len(), n, vectors.to_vec())?;
        Ok(Self::from_row_matrix(n, &m))
    }

    /// Column span of a matrix.
    pub fn column_span(m: &Matrix) -> Self {
        Self::from_row_matrix(m.rows(), &m.transpose())
    }

    fn from_row_matrix(n: usize, m: &Matrix) -> Self {
        let (r, pivots) = m.rref();
        let rows = Matrix::from_rows(pivots.len(), n, (0..pivots.len()).map(|i| r.row(i).to_vec()).collect())
            .expect("shape");
        Subspace {
            ambient: n,
            rows,
            pivots,
        }
    }

    pub fn zero(n: usize) -> Self {
        Subspace {
            ambient: n,
            rows: Matrix::zeros(0, n),
            pivots: Vec::new(),
        }
    }

    pub fn full(n: usize) -> Self {
        Self::column_span(&Matrix::identity(n))
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.pivots.len()
    }

    /// The canonical basis as an `n × d` matrix.
    pub fn basis(&self) -> Matrix {
        self.rows.transpose()
    }

    pub fn basis_vectors(&self) -> Vec<Vector> {
        self.rows.to_rows()
    }

    pub fn projection(&self) -> Matrix {
        self.projection_frac().to_matrix()
    }

    /// The orthogonal projection with a shared denominator. Large
    /// subspaces go through the orthogonal complement, whose basis is read
    /// off the echelon form directly.
    pub fn projection_frac(&self) -> FracMatrix {
        let (n, d) = (self.ambient, self.dim());
        if 2 * d <= n {
            let basis: Vec<Vec<Poly>> = self.rows.to_rows().iter().map(|r| clear_denominators(r)).collect();
            return projection_from_polys(n, &basis).expect("canonical basis has full rank");
        }
        // w_j = e_j - sum_i R[i][j] e_{p_i} for each non-pivot j.
        let free: Vec<usize> = (0..n).filter(|j| !self.pivots.contains(j)).collect();
        let basis: Vec<Vec<Poly>> = free
            .iter()
            .map(|&j| {
                let mut w = vec![FieldElement::zero(); n];
                w[j] = FieldElement::one();
                for (i, &p) in self.pivots.iter().enumerate() {
                    w[p] = -self.rows.get(i, j);
                }
                clear_denominators(&w)
            })
            .collect();
        projection_from_polys(n, &basis)
            .expect("complement basis has full rank")
            .complement()
    }

    pub fn contains(&self, v: &[FieldElement]) -> bool {
        if v.len() != self.ambient {
            return false;
        }
        // Reduce against the echelon rows: each pivot coordinate fixes the
        // coefficient of its row.
        let mut r = v.to_vec();
        for (i, &p) in self.pivots.iter().enumerate() {
            let c = r[p].clone();
            if c.is_zero() {
                continue;
            }
            for (j, x) in self.rows.row(i).iter().enumerate() {
                if !x.is_zero() {
                    r[j] = &r[j] - &(&c * x);
                }
            }
        }
        is_zero_vec(&r)
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.ambient == other.ambient && self.basis_vectors().iter().all(|b| other.contains(b))
    }

    /// Image under a linear map `m` (n × n).
    pub fn apply(&self, m: &Matrix) -> Result<Subspace> {
        if m.cols() != self.ambient {
            return Err(Error::dims("map does not act on this ambient space"));
        }
        Ok(Self::column_span(&m.try_mul(&self.basis())?))
    }
}

/// `Δ(W1, W2) = v(P1 - P2)`; defined for equal dimensions only.
pub fn delta(w1: &Subspace, w2: &Subspace) -> Result<ExtendedValuation> {
    if w1.ambient != w2.ambient || w1.dim() != w2.dim() {
        return Err(Error::dims(format!(
            "delta needs equal dimensions, got {} and {} in {}- and {}-space",
            w1.dim(),
            w2.dim(),
            w1.ambient,
            w2.ambient
        )));
    }
    if w1 == w2 {
        return Ok(ExtendedValuation::PosInf);
    }
    w1.projection_frac().valuation_of_difference(&w2.projection_frac())
}

/// `v(J(V))`: if V is the graph of a linear map over its first `d`
/// coordinates, the valuation of that map's matrix, otherwise `-inf`.
pub fn graph_slope_valuation(v: &Subspace) -> ExtendedValuation {
    let d = v.dim();
    if v.pivots.iter().enumerate().any(|(i, &p)| i != p) {
        return ExtendedValuation::NegInf;
    }
    // Row i of the canonical basis is (e_i, M_V column i).
    (0..d)
        .map(|i| valuation_of(&v.rows.row(i)[d..]))
        .min()
        .unwrap_or(ExtendedValuation::PosInf)
}

/// The orthogonal projection `w2` of `w` onto `W`, and the gain
/// `v(w2 - w) - v(w)`.
pub fn nearest_in_subspace(w: &[FieldElement], space: &Subspace) -> Result<(Vector, ExtendedValuation)> {
    if w.len() != space.ambient {
        return Err(Error::dims("vector and subspace live in different spaces"));
    }
    if is_zero_vec(w) {
        return Err(Error::ZeroVector);
    }
    let w2 = space.projection().mul_vec(w)?;
    let gain = valuation_of(&vec_sub(&w2, w)).sub(valuation_of(w));
    Ok((w2, gain))
}

impl fmt::Display for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.dim() == 0 {
            return write!(f, "zero({})", self.ambient);
        }
        f.write_str("span[")?;
        for i in 0..self.dim() {
            if i > 0 {
                f.write_str(",")?;
            }
            f.write_str("(")?;
            for (j, x) in self.rows.row(i).iter().enumerate() {
                if j > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{x}")?;
            }
            f.write_str(")")?;
        }
        f.write_str("]")
    }
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Subspace {
    type Err = Error;

    /// `span[(a,b),(c,d)]` or `zero(n)`.
    fn from_str(s: &str) -> Result<Self> {
        let mut p = Parser::new(s)?;
        let out = if p.eat_ident("zero") {
            p.expect_sym('(')?;
            let n = p.expect_int()?;
            p.expect_sym(')')?;
            let n = usize::try_from(n).map_err(|_| p.error("bad dimension"))?;
            Subspace::zero(n)
        } else if p.eat_ident("span") {
            p.expect_sym('[')?;
            let mut vs: Vec<Vector> = Vec::new();
            loop {
                p.expect_sym('(')?;
                let mut v = Vec::new();
                loop {
                    v.push(parse_element_from(&mut p)?);
                    if p.eat_sym(')') {
                        break;
                    }
                    p.expect_sym(',')?;
                }
                if vs.first().is_some_and(|f| f.len() != v.len()) {
                    return Err(p.error("vectors of different lengths"));
                }
                vs.push(v);
                if p.eat_sym(']') {
                    break;
                }
                p.expect_sym(',')?;
            }
            let n = vs[0].len();
            Subspace::span(n, &vs)?
        } else {
            return Err(p.error("expected 'span[' or 'zero('"));
        };
        p.expect_end()?;
        Ok(out)
    }
}

impl Serialize for Subspace {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Subspace {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ExtendedValuation::{Finite, NegInf, PosInf};

    fn sp(s: &str) -> Subspace {
        s.parse().unwrap()
    }

    fn v(xs: &[&str]) -> Vector {
        xs.iter().map(|s| s.parse().unwrap()).collect()
    }

    #[test]
    fn canonical_form_is_structural() {
        assert_eq!(sp("span[(2,2*t)]"), sp("span[(1,t)]"));
        assert_eq!(sp("span[(1,1,0),(1,-1,0)]"), sp("span[(1,0,0),(0,1,0)]"));
        assert_eq!(sp("span[(1,0),(2,0)]").dim(), 1);
        assert_eq!(sp("span[(0,0)]"), Subspace::zero(2));
    }

    #[test]
    fn delta_examples() {
        assert_eq!(delta(&sp("span[(1,0)]"), &sp("span[(1,0)]")), Ok(PosInf));
        assert_eq!(delta(&sp("span[(1,0)]"), &sp("span[(0,1)]")), Ok(Finite(0)));
        assert_eq!(delta(&sp("span[(1,0)]"), &sp("span[(1,t)]")), Ok(Finite(1)));
        assert!(matches!(
            delta(&sp("span[(1,0)]"), &Subspace::full(2)),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn slope_examples() {
        assert_eq!(graph_slope_valuation(&sp("span[(1,t)]")), Finite(1));
        assert_eq!(graph_slope_valuation(&sp("span[(0,1)]")), NegInf);
        assert_eq!(graph_slope_valuation(&sp("span[(t,1)]")), Finite(-1));
        assert_eq!(graph_slope_valuation(&Subspace::full(3)), PosInf);
        assert_eq!(graph_slope_valuation(&Subspace::zero(3)), PosInf);
    }

    #[test]
    fn nearest_examples() {
        let w = sp("span[(1,0)]");
        let (w2, gain) = nearest_in_subspace(&v(&["1", "t"]), &w).unwrap();
        assert_eq!((w2, gain), (v(&["1", "0"]), Finite(1)));
        assert_eq!(nearest_in_subspace(&v(&["3", "0"]), &w).unwrap().1, PosInf);
        let (w2, gain) = nearest_in_subspace(&v(&["0", "1"]), &w).unwrap();
        assert_eq!((w2, gain), (v(&["0", "0"]), Finite(0)));
        assert_eq!(nearest_in_subspace(&v(&["0", "0"]), &w), Err(Error::ZeroVector));
    }

    #[test]
    fn text_round_trip() {
        for s in ["span[(1,0,t),(0,1,0)]", "zero(3)", "span[(1,(1)/(1 + t))]"] {
            let w = sp(s);
            assert_eq!(sp(&w.to_string()), w);
        }
        assert_eq!(sp("span[(1,0,t),(0,1,0)]").to_string(), "span[(1,0,t),(0,1,0)]");
    }

    #[test]
    fn containment() {
        let plane = sp("span[(1,0,t),(0,1,0)]");
        assert!(plane.contains(&v(&["2", "5", "2*t"])));
        assert!(!plane.contains(&v(&["0", "0", "1"])));
        assert!(sp("span[(1,0,t)]").is_subspace_of(&plane));
    }
}
