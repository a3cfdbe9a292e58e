//! Matrices over Q[ε] with one shared denominator.
//!
//! Products and differences of projections only need valuations, which
//! can be read off without reducing entries, so this form skips the
//! per-entry gcds that dominate [`Matrix`] arithmetic.

use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::field::{ExtendedValuation, FieldElement, Poly};

use super::bareiss::solve_poly;
use super::Matrix;

#[derive(Clone, Debug)]
pub struct FracMatrix {
    rows: usize,
    cols: usize,
    /// Row-major numerators.
    num: Vec<Poly>,
    den: Poly,
}

pub(crate) fn poly_lcm(a: &Poly, b: &Poly) -> Poly {
    if a.is_one() {
        return b.clone();
    }
    if b.is_one() {
        return a.clone();
    }
    a.mul(b).div_exact(&a.gcd(b))
}

/// Scale a vector by the lcm of its denominators, giving polynomials.
pub(crate) fn clear_denominators(v: &[FieldElement]) -> Vec<Poly> {
    let l = v.iter().fold(Poly::one(), |acc, x| poly_lcm(&acc, x.denominator()));
    v.iter()
        .map(|x| x.numerator().mul(&l.div_exact(x.denominator())))
        .collect()
}

impl FracMatrix {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    /// Row-major numerators and the shared denominator.
    pub fn parts(&self) -> (&[Poly], &Poly) {
        (&self.num, &self.den)
    }

    pub fn identity(n: usize) -> Self {
        let mut num = vec![Poly::zero(); n * n];
        for i in 0..n {
            num[i * n + i] = Poly::one();
        }
        FracMatrix {
            rows: n,
            cols: n,
            num,
            den: Poly::one(),
        }
    }

    pub fn from_matrix(m: &Matrix) -> Self {
        let den = m.entries().fold(Poly::one(), |acc, x| poly_lcm(&acc, x.denominator()));
        let num = m
            .entries()
            .map(|x| x.numerator().mul(&den.div_exact(x.denominator())))
            .collect();
        FracMatrix {
            rows: m.rows(),
            cols: m.cols(),
            num,
            den,
        }
    }

    pub fn to_matrix(&self) -> Matrix {
        let data = (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| FieldElement::from_polys(self.num[i * self.cols + j].clone(), self.den.clone()).expect("nonzero denominator"))
                    .collect()
            })
            .collect();
        Matrix::from_rows(self.rows, self.cols, data).expect("shape")
    }

    /// The numerators alone; same column span and kernel.
    pub fn numerator_matrix(&self) -> Matrix {
        let data = (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| FieldElement::from_poly(self.num[i * self.cols + j].clone()))
                    .collect()
            })
            .collect();
        Matrix::from_rows(self.rows, self.cols, data).expect("shape")
    }

    /// Left-to-right product, `None` when empty.
    pub fn product<'a>(ms: impl IntoIterator<Item = &'a FracMatrix>) -> Option<FracMatrix> {
        let mut it = ms.into_iter();
        let first = it.next()?.clone();
        Some(it.fold(first, |acc, m| acc.try_mul(m).expect("conformable")))
    }

    /// Divide out the common power of ε.
    fn normalized(mut self) -> Self {
        let k = self
            .num
            .iter()
            .filter_map(Poly::ord)
            .min()
            .map_or(0, |k| k.min(self.den.ord().unwrap_or(0)));
        if k > 0 {
            self.num = self.num.iter().map(|p| p.unshift(k)).collect();
            self.den = self.den.unshift(k);
        }
        self
    }

    pub fn try_mul(&self, o: &FracMatrix) -> Result<FracMatrix> {
        if self.cols != o.rows {
            return Err(Error::dims(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, o.rows, o.cols
            )));
        }
        let mut num = vec![Poly::zero(); self.rows * o.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self.num[i * self.cols + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = &o.num[k * o.cols + j];
                    if !b.is_zero() {
                        let cell = &mut num[i * o.cols + j];
                        *cell = cell.add(&a.mul(b));
                    }
                }
            }
        }
        Ok(FracMatrix {
            rows: self.rows,
            cols: o.cols,
            num,
            den: self.den.mul(&o.den),
        }
        .normalized())
    }

    fn combine(&self, o: &FracMatrix, sign: bool) -> Result<FracMatrix> {
        if (self.rows, self.cols) != (o.rows, o.cols) {
            return Err(Error::dims("matrix shapes differ"));
        }
        let op = |a: &Poly, b: &Poly| if sign { a.add(b) } else { a.sub(b) };
        if self.den == o.den {
            return Ok(FracMatrix {
                rows: self.rows,
                cols: self.cols,
                num: self.num.iter().zip(&o.num).map(|(a, b)| op(a, b)).collect(),
                den: self.den.clone(),
            }
            .normalized());
        }
        let g = self.den.gcd(&o.den);
        let (f1, f2) = (o.den.div_exact(&g), self.den.div_exact(&g));
        Ok(FracMatrix {
            rows: self.rows,
            cols: self.cols,
            num: self
                .num
                .iter()
                .zip(&o.num)
                .map(|(a, b)| op(&a.mul(&f1), &b.mul(&f2)))
                .collect(),
            den: self.den.mul(&f1),
        }
        .normalized())
    }

    pub fn try_sub(&self, o: &FracMatrix) -> Result<FracMatrix> {
        self.combine(o, false)
    }

    pub fn try_add(&self, o: &FracMatrix) -> Result<FracMatrix> {
        self.combine(o, true)
    }

    /// `I - self` for a square matrix.
    pub fn complement(&self) -> FracMatrix {
        let n = self.rows;
        let mut num: Vec<Poly> = self.num.iter().map(Poly::neg).collect();
        for i in 0..n {
            num[i * n + i] = num[i * n + i].add(&self.den);
        }
        FracMatrix {
            rows: n,
            cols: self.cols,
            num,
            den: self.den.clone(),
        }
        .normalized()
    }

    pub fn transpose(&self) -> FracMatrix {
        let num = (0..self.cols)
            .flat_map(|j| (0..self.rows).map(move |i| (i, j)))
            .map(|(i, j)| self.num[i * self.cols + j].clone())
            .collect();
        FracMatrix {
            rows: self.cols,
            cols: self.rows,
            num,
            den: self.den.clone(),
        }
    }

    /// Equality of the represented matrices, by cross-multiplication.
    pub fn same_as(&self, o: &FracMatrix) -> bool {
        (self.rows, self.cols) == (o.rows, o.cols)
            && self
                .num
                .iter()
                .zip(&o.num)
                .all(|(a, b)| a.mul(&o.den) == b.mul(&self.den))
    }

    /// `v(self - o)` without forming the difference: the cross products
    /// `num·den' - num'·den` are expanded only up to a precision that
    /// doubles until a nonzero coefficient shows up.
    pub fn valuation_of_difference(&self, o: &FracMatrix) -> Result<ExtendedValuation> {
        if (self.rows, self.cols) != (o.rows, o.cols) {
            return Err(Error::dims("matrix shapes differ"));
        }
        let full = self
            .num
            .iter()
            .chain(&o.num)
            .filter_map(Poly::degree)
            .max()
            .map_or(0, |d| d + 1)
            + self.den.degree().max(o.den.degree()).unwrap_or(0);
        let shift = (self.den.ord().expect("nonzero") + o.den.ord().expect("nonzero")) as i64;
        let mut prec = 8;
        loop {
            let prec_now = prec.min(full);
            let lowest = self
                .num
                .iter()
                .zip(&o.num)
                .filter_map(|(a, b)| {
                    let x = mul_trunc(a, &o.den, prec_now);
                    let y = mul_trunc(b, &self.den, prec_now);
                    x.iter().zip(&y).position(|(p, q)| p != q)
                })
                .min();
            if let Some(k) = lowest {
                return Ok(ExtendedValuation::Finite(k as i64 - shift));
            }
            if prec_now == full {
                return Ok(ExtendedValuation::PosInf);
            }
            prec *= 2;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(Poly::is_zero)
    }

    pub fn valuation(&self) -> ExtendedValuation {
        match self.num.iter().filter_map(Poly::ord).min() {
            None => ExtendedValuation::PosInf,
            Some(k) => ExtendedValuation::Finite(k as i64 - self.den.ord().expect("nonzero") as i64),
        }
    }

    /// Sum of squared entries.
    pub fn frobenius_sq(&self) -> FieldElement {
        let s = self.num.iter().fold(Poly::zero(), |acc, p| acc.add(&p.mul(p)));
        FieldElement::from_polys(s, self.den.mul(&self.den)).expect("nonzero denominator")
    }
}

/// Coefficients of `a·b` below `ε^prec`, padded with zeros.
fn mul_trunc(a: &Poly, b: &Poly, prec: usize) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); prec];
    for (i, x) in a.coeffs().iter().enumerate().take(prec) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.coeffs().iter().enumerate().take(prec - i) {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    out
}

/// Orthogonal projection onto the span of independent polynomial vectors:
/// `B (BᵀB)⁻¹ Bᵀ`, solved fraction-free with one shared denominator.
pub fn projection_from_polys(n: usize, basis: &[Vec<Poly>]) -> Result<FracMatrix> {
    let d = basis.len();
    if d == 0 {
        return Ok(FracMatrix {
            rows: n,
            cols: n,
            num: vec![Poly::zero(); n * n],
            den: Poly::one(),
        });
    }
    let dot = |a: &[Poly], b: &[Poly]| a.iter().zip(b).fold(Poly::zero(), |acc, (x, y)| acc.add(&x.mul(y)));
    let gram: Vec<Vec<Poly>> = (0..d).map(|i| (0..d).map(|j| dot(&basis[i], &basis[j])).collect()).collect();
    let rhs: Vec<Vec<Poly>> = basis.to_vec();
    let (delta, y) = solve_poly(gram, rhs)?;
    // P = B Y / delta with B the n×d matrix of columns basis[j].
    let mut num = vec![Poly::zero(); n * n];
    for i in 0..n {
        for j in 0..n {
            let mut acc = Poly::zero();
            for k in 0..d {
                let (a, b) = (&basis[k][i], &y[k][j]);
                if !a.is_zero() && !b.is_zero() {
                    acc = acc.add(&a.mul(b));
                }
            }
            num[i * n + j] = acc;
        }
    }
    Ok(FracMatrix {
        rows: n,
        cols: n,
        num,
        den: delta,
    }
    .normalized())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_field_arithmetic() {
        let a = Matrix::from_strs(&[&["1", "t/(1+t)"], &["1/t", "2"]]).unwrap();
        let b = Matrix::from_strs(&[&["t^2", "0"], &["1 - t", "1/(1-t)"]]).unwrap();
        let (fa, fb) = (FracMatrix::from_matrix(&a), FracMatrix::from_matrix(&b));
        assert_eq!(fa.try_mul(&fb).unwrap().to_matrix(), &a * &b);
        assert_eq!(fa.try_sub(&fb).unwrap().to_matrix(), &a - &b);
        assert_eq!(fa.try_add(&fb).unwrap().to_matrix(), &a + &b);
        assert_eq!(fa.valuation(), a.valuation());
        assert_eq!(fa.frobenius_sq(), a.frobenius_sq());
        assert_eq!(fa.complement().to_matrix(), super::super::complement(&a));
        assert_eq!(fa.transpose().to_matrix(), a.transpose());
        assert!(fa.same_as(&FracMatrix::from_matrix(&a)) && !fa.same_as(&fb));
        assert_eq!(fa.valuation_of_difference(&fb).unwrap(), (&a - &b).valuation());
        assert_eq!(fa.valuation_of_difference(&fa).unwrap(), ExtendedValuation::PosInf);
    }

    #[test]
    fn projection_onto_line() {
        let b = vec![vec![Poly::one(), Poly::monomial(BigRational::from_integer(1.into()), 1)]];
        let p = projection_from_polys(2, &b).unwrap().to_matrix();
        let want = Matrix::from_strs(&[&["1/(1+t^2)", "t/(1+t^2)"], &["t/(1+t^2)", "t^2/(1+t^2)"]]).unwrap();
        assert_eq!(p, want);
    }
}
