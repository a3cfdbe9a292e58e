//! Fraction-free elimination over Q[ε].
//!
//! Rows are first cleared of denominators, so every intermediate entry is
//! a polynomial and each elimination step divides exactly by the previous
//! pivot. Pivots are chosen over the whole remaining block, preferring
//! low degree; over Q(ε) only zero versus nonzero matters for correctness,
//! the degree preference just limits growth.

use crate::error::{Error, Result};
use crate::field::{FieldElement, Poly};

use super::Matrix;

struct Elim {
    n: usize,
    width: usize,
    m: Vec<Vec<Poly>>,
    /// `perm[k]` is the original column now at position `k`.
    perm: Vec<usize>,
    swaps: usize,
    /// Product of the row scalings applied when clearing denominators.
    scale: Poly,
}

use super::frac::poly_lcm as lcm;

impl Elim {
    /// Left block from `a`; optionally a right block holding the row
    /// scalings as a diagonal (for inversion).
    fn new(a: &Matrix, with_rhs: bool) -> Self {
        let n = a.rows();
        let width = if with_rhs { 2 * n } else { n };
        let mut m = Vec::with_capacity(n);
        let mut scale = Poly::one();
        for i in 0..n {
            let l = (0..n).fold(Poly::one(), |acc, j| lcm(&acc, a.get(i, j).denominator()));
            let mut row = Vec::with_capacity(width);
            for j in 0..n {
                let e = a.get(i, j);
                row.push(e.numerator().mul(&l.div_exact(e.denominator())));
            }
            if with_rhs {
                for j in 0..n {
                    row.push(if i == j { l.clone() } else { Poly::zero() });
                }
            }
            scale = scale.mul(&l);
            m.push(row);
        }
        Elim {
            n,
            width,
            m,
            perm: (0..n).collect(),
            swaps: 0,
            scale,
        }
    }

    /// Run to completion. Returns the final pivot (the common diagonal
    /// value of the left block), or `None` if the matrix is singular.
    fn run(&mut self) -> Option<Poly> {
        let n = self.n;
        let mut prev = Poly::one();
        for k in 0..n {
            let (pi, pj) = (k..n)
                .flat_map(|i| (k..n).map(move |j| (i, j)))
                .filter(|&(i, j)| !self.m[i][j].is_zero())
                .min_by_key(|&(i, j)| (self.m[i][j].degree(), i, j))?;
            if pi != k {
                self.m.swap(pi, k);
                self.swaps += 1;
            }
            if pj != k {
                for row in &mut self.m {
                    row.swap(pj, k);
                }
                self.perm.swap(pj, k);
                self.swaps += 1;
            }
            let p = self.m[k][k].clone();
            let pivot_row = self.m[k].clone();
            for i in 0..n {
                if i == k {
                    continue;
                }
                let f = self.m[i][k].clone();
                for j in 0..self.width {
                    if j == k {
                        continue;
                    }
                    let v = p.mul(&self.m[i][j]).sub(&f.mul(&pivot_row[j]));
                    self.m[i][j] = v.div_exact(&prev);
                }
                self.m[i][k] = Poly::zero();
            }
            prev = p;
        }
        Some(prev)
    }
}

/// Solve `G X = R` for square polynomial `G`: returns `(d, Y)` with
/// `X = Y / d`.
pub(super) fn solve_poly(g: Vec<Vec<Poly>>, r: Vec<Vec<Poly>>) -> Result<(Poly, Vec<Vec<Poly>>)> {
    let n = g.len();
    let extra = r.first().map_or(0, Vec::len);
    let m = g
        .into_iter()
        .zip(r)
        .map(|(mut row, rhs)| {
            row.extend(rhs);
            row
        })
        .collect();
    let mut e = Elim {
        n,
        width: n + extra,
        m,
        perm: (0..n).collect(),
        swaps: 0,
        scale: Poly::one(),
    };
    let d = e.run().ok_or(Error::RankDeficient)?;
    let mut y = vec![Vec::new(); n];
    for k in 0..n {
        y[e.perm[k]] = e.m[k][n..].to_vec();
    }
    Ok((d, y))
}

pub fn determinant(a: &Matrix) -> Result<FieldElement> {
    if a.rows() != a.cols() {
        return Err(Error::dims("determinant of a non-square matrix"));
    }
    if a.rows() == 0 {
        return Ok(FieldElement::one());
    }
    let mut e = Elim::new(a, false);
    let Some(d) = e.run() else {
        return Ok(FieldElement::zero());
    };
    let signed = if e.swaps % 2 == 1 { d.neg() } else { d };
    FieldElement::from_polys(signed, e.scale)
}

pub fn inverse(a: &Matrix) -> Result<Matrix> {
    let n = a.rows();
    if n != a.cols() {
        return Err(Error::dims("inverse of a non-square matrix"));
    }
    let mut e = Elim::new(a, true);
    let d = e.run().ok_or(Error::RankDeficient)?;
    let mut out = Matrix::zeros(n, n);
    for k in 0..n {
        for j in 0..n {
            let r = &e.m[k][n + j];
            if !r.is_zero() {
                out.set(e.perm[k], j, FieldElement::from_polys(r.clone(), d.clone())?);
            }
        }
    }
    Ok(out)
}
