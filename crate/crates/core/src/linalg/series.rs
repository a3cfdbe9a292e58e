//! Matrices over O truncated mod ε^N.
//!
//! Products and differences of orthogonal projections stay in O, and
//! their valuations below `N` are read off the truncation exactly. Callers
//! fall back to [`FracMatrix`] when the truncation vanishes.

use num_rational::BigRational;
use num_traits::Zero;

use crate::field::Poly;

use super::FracMatrix;

#[derive(Clone, Debug)]
pub struct SeriesMatrix {
    rows: usize,
    cols: usize,
    prec: usize,
    /// Row-major; each entry holds the coefficients of ε^0..ε^(prec-1).
    entries: Vec<Vec<BigRational>>,
}

fn truncate(p: &Poly, prec: usize) -> Vec<BigRational> {
    let mut v: Vec<BigRational> = p.coeffs().iter().take(prec).cloned().collect();
    v.resize(prec, BigRational::zero());
    v
}

fn series_mul(a: &[BigRational], b: &[BigRational], out: &mut [BigRational]) {
    let prec = out.len();
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().take(prec - i).enumerate() {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
}

/// `1/u mod ε^prec` for `u(0) ≠ 0`.
fn series_inverse(u: &[BigRational]) -> Vec<BigRational> {
    let prec = u.len();
    let mut inv = vec![BigRational::zero(); prec];
    inv[0] = u[0].recip();
    for k in 1..prec {
        let mut s = BigRational::zero();
        for i in 1..=k {
            if !u[i].is_zero() {
                s += &u[i] * &inv[k - i];
            }
        }
        inv[k] = -s * &inv[0];
    }
    inv
}

impl SeriesMatrix {
    /// `None` when some entry has negative valuation.
    pub fn from_frac(m: &FracMatrix, prec: usize) -> Option<Self> {
        let k = m.den().ord().expect("nonzero denominator");
        let (num, den) = m.parts();
        if num.iter().any(|p| p.ord().is_some_and(|o| o < k)) {
            return None;
        }
        let inv = series_inverse(&truncate(&den.unshift(k), prec));
        let entries = num
            .iter()
            .map(|p| {
                let mut out = vec![BigRational::zero(); prec];
                if !p.is_zero() {
                    series_mul(&truncate(&p.unshift(k), prec), &inv, &mut out);
                }
                out
            })
            .collect();
        Some(SeriesMatrix {
            rows: m.rows(),
            cols: m.cols(),
            prec,
            entries,
        })
    }

    pub fn try_mul(&self, o: &SeriesMatrix) -> SeriesMatrix {
        assert_eq!(self.cols, o.rows, "conformable");
        let prec = self.prec.min(o.prec);
        let mut entries = vec![vec![BigRational::zero(); prec]; self.rows * o.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self.entries[i * self.cols + k];
                for j in 0..o.cols {
                    series_mul(a, &o.entries[k * o.cols + j], &mut entries[i * o.cols + j]);
                }
            }
        }
        SeriesMatrix {
            rows: self.rows,
            cols: o.cols,
            prec,
            entries,
        }
    }

    pub fn sub(&self, o: &SeriesMatrix) -> SeriesMatrix {
        let prec = self.prec.min(o.prec);
        SeriesMatrix {
            rows: self.rows,
            cols: self.cols,
            prec,
            entries: self
                .entries
                .iter()
                .zip(&o.entries)
                .map(|(a, b)| (0..prec).map(|i| &a[i] - &b[i]).collect())
                .collect(),
        }
    }

    /// `I - self`.
    pub fn complement(&self) -> SeriesMatrix {
        let mut out = self.clone();
        for e in &mut out.entries {
            for c in e.iter_mut() {
                *c = -&*c;
            }
        }
        for i in 0..self.rows {
            out.entries[i * self.cols + i][0] += BigRational::from_integer(1.into());
        }
        out
    }

    /// The valuation, or `None` when the truncation is zero.
    pub fn valuation(&self) -> Option<i64> {
        self.entries
            .iter()
            .filter_map(|e| e.iter().position(|c| !c.is_zero()))
            .min()
            .map(|k| k as i64)
    }

    pub fn product<'a>(ms: impl IntoIterator<Item = &'a SeriesMatrix>) -> Option<SeriesMatrix> {
        let mut it = ms.into_iter();
        let first = it.next()?.clone();
        Some(it.fold(first, |acc, m| acc.try_mul(m)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::ExtendedValuation;
    use crate::linalg::Matrix;

    #[test]
    fn agrees_with_exact_valuations() {
        let a = Matrix::from_strs(&[&["1/(1+t)", "t"], &["t^2/(1-t)", "1"]]).unwrap();
        let b = Matrix::from_strs(&[&["t^3", "0"], &["1 + t", "t/(1+t^2)"]]).unwrap();
        let (fa, fb) = (FracMatrix::from_matrix(&a), FracMatrix::from_matrix(&b));
        let (sa, sb) = (SeriesMatrix::from_frac(&fa, 8).unwrap(), SeriesMatrix::from_frac(&fb, 8).unwrap());
        let want = |m: &Matrix| match m.valuation() {
            ExtendedValuation::Finite(k) => Some(k),
            _ => None,
        };
        assert_eq!(sa.try_mul(&sb).valuation(), want(&(&a * &b)));
        assert_eq!(sa.sub(&sb).valuation(), want(&(&a - &b)));
        assert_eq!(sb.complement().valuation(), want(&crate::linalg::complement(&b)));
    }

    #[test]
    fn rejects_poles_and_truncates() {
        let m = Matrix::from_strs(&[&["1/t"]]).unwrap();
        assert!(SeriesMatrix::from_frac(&FracMatrix::from_matrix(&m), 4).is_none());
        let m = Matrix::from_strs(&[&["t^5"]]).unwrap();
        let s = SeriesMatrix::from_frac(&FracMatrix::from_matrix(&m), 4).unwrap();
        assert_eq!(s.valuation(), None);
    }
}
