//! Sparse polynomials in `(ε, x1, ..., xn)` over the rationals.
//!
//! A monomial is an exponent vector of length `n + 1`; slot 0 is `ε`. The
//! map is ordered lexicographically on exponent vectors, which is a
//! monomial order, so the last entry is the leading term for division.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::Scalar;
use crate::field::Poly;

pub type Exponents = Vec<u32>;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MPoly {
    nvars: usize,
    terms: BTreeMap<Exponents, BigRational>,
}

impl MPoly {
    pub fn zero(nvars: usize) -> Self {
        MPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: BigRational) -> Self {
        Self::term(nvars, vec![0; nvars + 1], c)
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, BigRational::one())
    }

    pub fn term(nvars: usize, exps: Exponents, c: BigRational) -> Self {
        debug_assert_eq!(exps.len(), nvars + 1);
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exps, c);
        }
        MPoly { nvars, terms }
    }

    /// Slot 0 is `ε`, slot `i` is `x_i`.
    pub fn var(nvars: usize, slot: usize) -> Self {
        let mut e = vec![0; nvars + 1];
        e[slot] = 1;
        Self::term(nvars, e, BigRational::one())
    }

    pub fn from_univariate(nvars: usize, p: &Poly) -> Self {
        let mut terms = BTreeMap::new();
        for (k, c) in p.coeffs().iter().enumerate() {
            if !c.is_zero() {
                let mut e = vec![0; nvars + 1];
                e[0] = k as u32;
                terms.insert(e, c.clone());
            }
        }
        MPoly { nvars, terms }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &BigRational)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// The value if the polynomial is a constant.
    pub fn as_constant(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => {
                let (e, c) = self.terms.iter().next().unwrap();
                e.iter().all(|&k| k == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    /// True if no `x` variable appears.
    pub fn is_univariate(&self) -> bool {
        self.terms.keys().all(|e| e[1..].iter().all(|&k| k == 0))
    }

    pub fn to_univariate(&self) -> Option<Poly> {
        if !self.is_univariate() {
            return None;
        }
        let deg = self.terms.keys().map(|e| e[0] as usize).max().unwrap_or(0);
        let mut cs = vec![BigRational::zero(); deg + 1];
        for (e, c) in &self.terms {
            cs[e[0] as usize] = c.clone();
        }
        Some(Poly::from_coeffs(cs))
    }

    pub fn leading(&self) -> Option<(&Exponents, &BigRational)> {
        self.terms.iter().next_back()
    }

    /// Pad to a larger variable count; new variables do not occur.
    pub fn with_nvars(&self, nvars: usize) -> Self {
        assert!(nvars >= self.nvars);
        MPoly {
            nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let mut e = e.clone();
                    e.resize(nvars + 1, 0);
                    (e, c.clone())
                })
                .collect(),
        }
    }

    fn insert_add(terms: &mut BTreeMap<Exponents, BigRational>, e: Exponents, c: BigRational) {
        use std::collections::btree_map::Entry;
        match terms.entry(e) {
            Entry::Vacant(v) => {
                if !c.is_zero() {
                    v.insert(c);
                }
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &MPoly) -> MPoly {
        assert_eq!(self.nvars, other.nvars, "arity mismatch");
        let mut terms = self.terms.clone();
        for (e, c) in &other.terms {
            Self::insert_add(&mut terms, e.clone(), c.clone());
        }
        MPoly {
            nvars: self.nvars,
            terms,
        }
    }

    pub fn neg(&self) -> MPoly {
        MPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &MPoly) -> MPoly {
        self.add(&other.neg())
    }

    pub fn scale(&self, s: &BigRational) -> MPoly {
        if s.is_zero() {
            return MPoly::zero(self.nvars);
        }
        MPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c * s)).collect(),
        }
    }

    pub fn mul(&self, other: &MPoly) -> MPoly {
        assert_eq!(self.nvars, other.nvars, "arity mismatch");
        let mut terms = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Exponents = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                Self::insert_add(&mut terms, e, ca * cb);
            }
        }
        MPoly {
            nvars: self.nvars,
            terms,
        }
    }

    pub fn pow(&self, k: u32) -> MPoly {
        let mut acc = MPoly::one(self.nvars);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn derivative(&self, slot: usize) -> MPoly {
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            let k = e[slot];
            if k == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[slot] -= 1;
            terms.insert(e2, c * BigRational::from_integer(BigInt::from(k)));
        }
        MPoly {
            nvars: self.nvars,
            terms,
        }
    }

    /// Componentwise minimum exponent over all terms.
    pub fn monomial_content(&self) -> Option<Exponents> {
        let mut it = self.terms.keys();
        let first = it.next()?.clone();
        Some(it.fold(first, |acc, e| {
            acc.iter().zip(e).map(|(a, b)| *a.min(b)).collect()
        }))
    }

    /// Divide every term by the monomial `m` (which must divide them all).
    pub fn div_monomial(&self, m: &[u32]) -> MPoly {
        MPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.iter().zip(m).map(|(a, b)| a - b).collect(), c.clone()))
                .collect(),
        }
    }

    /// Exact quotient by `d` if `d` divides `self`, via leading-term
    /// reduction.
    pub fn div_exact(&self, d: &MPoly) -> Option<MPoly> {
        let (ld, cd) = d.leading()?;
        let (ld, cd) = (ld.clone(), cd.clone());
        let mut r = self.clone();
        let mut q = MPoly::zero(self.nvars);
        while let Some((lr, cr)) = r.leading() {
            if lr.iter().zip(&ld).any(|(a, b)| a < b) {
                return None;
            }
            let e: Exponents = lr.iter().zip(&ld).map(|(a, b)| a - b).collect();
            let t = MPoly::term(self.nvars, e, cr / &cd);
            r = r.sub(&t.mul(d));
            q = q.add(&t);
        }
        Some(q)
    }

    /// Evaluate with `ε -> eps` and `x_i -> vars[i-1]`.
    pub fn eval<T: Scalar>(&self, eps: &T, vars: &[T]) -> T {
        assert_eq!(vars.len(), self.nvars, "arity mismatch");
        // Cache powers per slot; exponents are small in practice.
        let mut powers: Vec<Vec<T>> = vec![vec![T::one()]; self.nvars + 1];
        let base = |slot: usize| if slot == 0 { eps } else { &vars[slot - 1] };
        let mut acc = T::zero();
        for (e, c) in &self.terms {
            let mut m = T::from_rational(c.clone());
            for (slot, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                while powers[slot].len() <= k as usize {
                    let next = powers[slot].last().unwrap().mul(base(slot));
                    powers[slot].push(next);
                }
                m = m.mul(&powers[slot][k as usize]);
            }
            acc = acc.add(&m);
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldElement;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn derivative_of_monomial() {
        // 3 x1^2 x2 -> d/dx1 = 6 x1 x2
        let p = MPoly::term(2, vec![0, 2, 1], q(3));
        assert_eq!(p.derivative(1), MPoly::term(2, vec![0, 1, 1], q(6)));
        assert!(p.derivative(0).is_zero());
    }

    #[test]
    fn exact_division() {
        let x = MPoly::var(2, 1);
        let y = MPoly::var(2, 2);
        let a = x.add(&y);
        let b = x.sub(&y);
        let prod = a.mul(&b);
        assert_eq!(prod.div_exact(&a), Some(b.clone()));
        assert_eq!(x.add(&MPoly::one(2)).div_exact(&y), None);
    }

    #[test]
    fn eval_matches_hand_computation() {
        // ε x1^2 - x2 at (2, 3)  ->  4ε - 3
        let p = MPoly::term(2, vec![1, 2, 0], q(1)).sub(&MPoly::var(2, 2));
        let v = p.eval(&FieldElement::eps(), &[FieldElement::from_int(2), FieldElement::from_int(3)]);
        assert_eq!(v, "4*t - 3".parse().unwrap());
    }
}
