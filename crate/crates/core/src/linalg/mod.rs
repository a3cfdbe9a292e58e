//! Vectors and matrices over Q(ε).
//!
//! Norms are never square-rooted: everything downstream compares squared
//! norms, and `v(‖a‖²) = 2·v(a)` links them to entry valuations.

mod bareiss;
mod frac;
mod series;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::field::{ExtendedValuation, FieldElement, Poly};

pub use frac::{projection_from_polys, FracMatrix};
pub use series::SeriesMatrix;
pub(crate) use frac::clear_denominators;

pub type Vector = Vec<FieldElement>;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<FieldElement>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![FieldElement::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, FieldElement::one());
        }
        m
    }

    pub fn from_rows(rows: usize, cols: usize, data: Vec<Vec<FieldElement>>) -> Result<Self> {
        if data.len() != rows || data.iter().any(|r| r.len() != cols) {
            return Err(Error::dims(format!("expected a {rows}x{cols} grid")));
        }
        Ok(Matrix {
            rows,
            cols,
            data: data.into_iter().flatten().collect(),
        })
    }

    /// Rows given as element-grammar strings.
    pub fn from_strs(rows: &[&[&str]]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        let data = rows
            .iter()
            .map(|r| r.iter().map(|s| s.parse()).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(rows.len(), cols, data)
    }

    /// Columns given as vectors of length `n`.
    pub fn from_columns(n: usize, columns: &[Vector]) -> Result<Self> {
        let mut m = Self::zeros(n, columns.len());
        for (j, c) in columns.iter().enumerate() {
            if c.len() != n {
                return Err(Error::dims(format!("column {j} has length {}, expected {n}", c.len())));
            }
            for (i, x) in c.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        Ok(m)
    }

    pub fn diagonal(entries: &[FieldElement]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, x) in entries.iter().enumerate() {
            m.set(i, i, x.clone());
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &FieldElement {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: FieldElement) {
        self.data[i * self.cols + j] = x;
    }

    pub fn row(&self, i: usize) -> &[FieldElement] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vector {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vector> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn entries(&self) -> impl Iterator<Item = &FieldElement> {
        self.data.iter()
    }

    pub fn to_rows(&self) -> Vec<Vector> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(FieldElement::is_zero)
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn try_mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::dims(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let v = out.get(i, j) + &(a * b);
                        out.set(i, j, v);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[FieldElement]) -> Result<Vector> {
        if v.len() != self.cols {
            return Err(Error::dims("matrix-vector length mismatch"));
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    fn zip_with(&self, other: &Matrix, f: impl Fn(&FieldElement, &FieldElement) -> FieldElement) -> Result<Matrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::dims("matrix shapes differ"));
        }
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| f(a, b)).collect(),
        })
    }

    pub fn try_add(&self, other: &Matrix) -> Result<Matrix> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn try_sub(&self, other: &Matrix) -> Result<Matrix> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, s: &FieldElement) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    /// `v(M) = min_ij v(m_ij)`; `+inf` for the zero (or empty) matrix.
    pub fn valuation(&self) -> ExtendedValuation {
        valuation_of(&self.data)
    }

    /// Squared Frobenius norm.
    pub fn frobenius_sq(&self) -> FieldElement {
        norm_sq(&self.data)
    }

    pub fn determinant(&self) -> Result<FieldElement> {
        bareiss::determinant(self)
    }

    /// Exact inverse; `RankDeficient` if singular.
    pub fn inverse(&self) -> Result<Matrix> {
        bareiss::inverse(self)
    }

    /// Reduced row echelon form and the pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            m.swap_rows(p, r);
            let inv = m.get(r, c).recip().expect("nonzero pivot");
            for j in 0..m.cols {
                let v = m.get(r, j) * &inv;
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r || m.get(i, c).is_zero() {
                    continue;
                }
                let f = m.get(i, c).clone();
                for j in 0..m.cols {
                    let v = m.get(i, j) - &(&f * m.get(r, j));
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// A basis of the kernel, one vector per free column.
    pub fn kernel(&self) -> Vec<Vector> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![FieldElement::zero(); self.cols];
                v[f] = FieldElement::one();
                for (row, &pc) in pivots.iter().enumerate() {
                    v[pc] = -r.get(row, f);
                }
                v
            })
            .collect()
    }

    pub fn is_symmetric(&self) -> bool {
        *self == self.transpose()
    }
}

/// `min_i v(a_i)`, which equals `v(‖a‖)`.
pub fn valuation_of(v: &[FieldElement]) -> ExtendedValuation {
    v.iter()
        .map(FieldElement::valuation)
        .min()
        .unwrap_or(ExtendedValuation::PosInf)
}

pub fn norm_sq(v: &[FieldElement]) -> FieldElement {
    v.iter().map(FieldElement::square).sum()
}

pub fn vec_sub(a: &[FieldElement], b: &[FieldElement]) -> Vector {
    assert_eq!(a.len(), b.len(), "vector lengths differ");
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn vec_add(a: &[FieldElement], b: &[FieldElement]) -> Vector {
    assert_eq!(a.len(), b.len(), "vector lengths differ");
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn is_zero_vec(v: &[FieldElement]) -> bool {
    v.iter().all(FieldElement::is_zero)
}

/// `A (AᵀA)⁻¹ Aᵀ` for a basis `A` with independent columns.
///
/// A basis with no columns projects onto the zero subspace.
pub fn orth_projection(basis: &Matrix) -> Result<Matrix> {
    let cols: Vec<Vec<Poly>> = basis.columns().iter().map(|c| clear_denominators(c)).collect();
    Ok(projection_from_polys(basis.rows(), &cols)?.to_matrix())
}

/// Whether `m` lies in GL_n(O): invertible with `v(M) ≥ 0` and `v(M⁻¹) ≥ 0`.
pub fn is_gl_o(m: &Matrix) -> Result<bool> {
    if !m.is_square() {
        return Err(Error::dims(format!("is_gl_O needs a square matrix, got {}x{}", m.rows, m.cols)));
    }
    let zero = ExtendedValuation::Finite(0);
    if m.valuation() < zero {
        return Ok(false);
    }
    match m.inverse() {
        Ok(inv) => Ok(inv.valuation() >= zero),
        Err(Error::RankDeficient) => Ok(false),
        Err(e) => Err(e),
    }
}

/// `(1 - P)` for a square `P`.
pub fn complement(p: &Matrix) -> Matrix {
    &Matrix::identity(p.rows()) - p
}

/// Ordered product of square matrices; the empty product is `None`.
pub fn product<'a>(ms: impl IntoIterator<Item = &'a Matrix>) -> Option<Matrix> {
    ms.into_iter().fold(None, |acc, m| {
        Some(match acc {
            None => m.clone(),
            Some(a) => &a * m,
        })
    })
}

impl Mul for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        self.try_mul(rhs).expect("matrix shape mismatch")
    }
}

impl Add for &Matrix {
    type Output = Matrix;
    fn add(self, rhs: &Matrix) -> Matrix {
        self.try_add(rhs).expect("matrix shape mismatch")
    }
}

impl Sub for &Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &Matrix) -> Matrix {
        self.try_sub(rhs).expect("matrix shape mismatch")
    }
}

impl Neg for &Matrix {
    type Output = Matrix;
    fn neg(self) -> Matrix {
        self.scale(&FieldElement::from_int(-1))
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for i in 0..self.rows {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str("[")?;
            for j in 0..self.cols {
                if j > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            f.write_str("]")?;
        }
        f.write_str("]")
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for Matrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Matrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows: Vec<Vec<FieldElement>> = Vec::deserialize(d)?;
        let cols = rows.first().map_or(0, Vec::len);
        Matrix::from_rows(rows.len(), cols, rows).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ExtendedValuation::{Finite, PosInf};

    fn m(rows: &[&[&str]]) -> Matrix {
        Matrix::from_strs(rows).unwrap()
    }

    fn el(s: &str) -> FieldElement {
        s.parse().unwrap()
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(valuation_of(&[el("t"), el("1"), el("0")]), Finite(0));
        assert_eq!(Matrix::zeros(3, 3).valuation(), PosInf);
        assert_eq!(m(&[&["t", "t^2"], &["t^3", "t"]]).valuation(), Finite(1));
    }

    #[test]
    fn projection_examples() {
        let p = orth_projection(&m(&[&["1"], &["0"]])).unwrap();
        assert_eq!(p, m(&[&["1", "0"], &["0", "0"]]));
        let p = orth_projection(&m(&[&["1"], &["1"]])).unwrap();
        assert_eq!(p, m(&[&["1/2", "1/2"], &["1/2", "1/2"]]));
        let p = orth_projection(&m(&[&["1"], &["t"]])).unwrap();
        let s = el("1/(1+t^2)");
        assert_eq!(p, m(&[&["1", "t"], &["t", "t^2"]]).scale(&s));
        assert_eq!(
            orth_projection(&m(&[&["1", "2"], &["t", "2*t"]])),
            Err(Error::RankDeficient)
        );
    }

    #[test]
    fn gl_o_examples() {
        assert!(is_gl_o(&Matrix::identity(3)).unwrap());
        assert!(!is_gl_o(&m(&[&["t", "0"], &["0", "1"]])).unwrap());
        assert!(is_gl_o(&m(&[&["1", "t"], &["0", "1"]])).unwrap());
        assert!(matches!(is_gl_o(&Matrix::zeros(2, 3)), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn inverse_and_determinant() {
        let a = m(&[&["t", "1", "0"], &["1/t", "2", "1+t"], &["0", "3", "t^2"]]);
        let inv = a.inverse().unwrap();
        assert_eq!(&a * &inv, Matrix::identity(3));
        assert_eq!(&inv * &a, Matrix::identity(3));
        // cofactor expansion along the first row
        let det = el("t") * (el("2*t^2") - el("3+3*t")) - (el("t")) ;
        assert_eq!(a.determinant().unwrap(), det);
        assert_eq!(m(&[&["0", "1"], &["1", "0"]]).determinant().unwrap(), el("-1"));
        assert_eq!(m(&[&["1", "t"], &["1", "t"]]).inverse(), Err(Error::RankDeficient));
    }

    #[test]
    fn kernel_spans_nullspace() {
        let a = m(&[&["2*t^2", "0", "-2*t"]]);
        let k = a.kernel();
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(is_zero_vec(&a.mul_vec(v).unwrap()));
        }
    }

    #[test]
    fn json_form() {
        let a = m(&[&["t", "1/2"]]);
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(s, r#"[["t","1/2"]]"#);
        assert_eq!(serde_json::from_str::<Matrix>(&s).unwrap(), a);
    }
}
