//! The ordered valued field Q(ε).
//!
//! Elements are reduced fractions of polynomials in an infinitesimal `ε`
//! with rational coefficients. The valuation is the `ε`-order and the order
//! is the sign of the germ as `ε -> 0+`, so every positive rational is
//! larger than every positive multiple of `ε`.
//!
//! Canonical form: numerator and denominator coprime, denominator's
//! lowest-order coefficient equal to 1. Two equal values are therefore
//! structurally equal, and `Eq`/`Hash` are derived.

mod gcd;
mod poly;
mod valuation;

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub use poly::Poly;
pub use valuation::ExtendedValuation;

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FieldElement {
    num: Poly,
    den: Poly,
}

impl FieldElement {
    pub fn zero() -> Self {
        FieldElement {
            num: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn one() -> Self {
        Self::from_poly(Poly::one())
    }

    /// The infinitesimal `ε`.
    pub fn eps() -> Self {
        Self::from_poly(Poly::monomial(BigRational::one(), 1))
    }

    /// `ε^k` for any integer `k`.
    pub fn eps_pow(k: i64) -> Self {
        let m = Poly::monomial(BigRational::one(), k.unsigned_abs() as usize);
        if k >= 0 {
            Self::from_poly(m)
        } else {
            FieldElement {
                num: Poly::one(),
                den: m,
            }
        }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_ratio(n: i64, d: i64) -> Self {
        assert!(d != 0, "zero denominator");
        Self::from_rational(BigRational::new(n.into(), d.into()))
    }

    pub fn from_rational(q: BigRational) -> Self {
        Self::from_poly(Poly::constant(q))
    }

    pub fn from_poly(p: Poly) -> Self {
        FieldElement {
            num: p,
            den: Poly::one(),
        }
    }

    /// Reduce `num/den` to canonical form.
    pub fn from_polys(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::reduce(num, den))
    }

    /// Normalize an already coprime pair so the denominator's lowest
    /// coefficient is 1.
    fn lowest_one(num: Poly, den: Poly) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        let low = den.lowest_coeff().expect("nonzero denominator");
        if low.is_one() {
            return FieldElement { num, den };
        }
        let s = low.recip();
        FieldElement {
            num: num.scale(&s),
            den: den.scale(&s),
        }
    }

    fn reduce(num: Poly, den: Poly) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        let (num, den) = if den.is_constant() {
            (num, den)
        } else {
            let g = num.gcd(&den);
            if g.is_one() {
                (num, den)
            } else {
                (num.div_exact(&g), den.div_exact(&g))
            }
        };
        Self::lowest_one(num, den)
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    /// The value as a rational, if it does not involve `ε`.
    pub fn to_rational(&self) -> Option<BigRational> {
        if self.den.is_one() && self.num.is_constant() {
            Some(self.num.coeffs().first().cloned().unwrap_or_else(BigRational::zero))
        } else {
            None
        }
    }

    pub fn is_rational(&self) -> bool {
        self.to_rational().is_some()
    }

    pub fn valuation(&self) -> ExtendedValuation {
        match (self.num.ord(), self.den.ord()) {
            (None, _) => ExtendedValuation::PosInf,
            (Some(a), Some(b)) => ExtendedValuation::Finite(a as i64 - b as i64),
            (Some(_), None) => unreachable!("zero denominator"),
        }
    }

    /// Finite valuation of a nonzero element.
    pub fn ord(&self) -> Option<i64> {
        self.valuation().finite()
    }

    pub fn in_valuation_ring(&self) -> bool {
        self.valuation() >= ExtendedValuation::Finite(0)
    }

    /// -1, 0 or 1. The denominator's lowest coefficient is 1, so the sign
    /// is that of the numerator's lowest coefficient.
    pub fn signum(&self) -> i8 {
        self.num.germ_sign()
    }

    pub fn is_positive(&self) -> bool {
        self.signum() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.signum() < 0
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    /// The leading coefficient of the `ε`-expansion: `self = c·ε^v + ...`.
    pub fn leading_coeff(&self) -> Option<BigRational> {
        Some(self.num.lowest_coeff()?.clone())
    }

    pub fn sign_compare(&self, other: &Self) -> Ordering {
        (self - other).signum().cmp(&0)
    }

    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::reduce(self.den.clone(), self.num.clone()))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        if other.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if other.is_one() {
            return Ok(self.clone());
        }
        Ok(Self::reduce(
            self.num.mul(&other.den),
            self.den.mul(&other.num),
        ))
    }

    /// Integer power; negative exponents need a nonzero base.
    pub fn pow(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.recip()? } else { self.clone() };
        let k = u32::try_from(e.unsigned_abs()).map_err(|_| Error::invalid("exponent too large"))?;
        Ok(FieldElement {
            num: base.num.pow(k),
            den: base.den.pow(k),
        })
    }

    pub fn square(&self) -> Self {
        self * self
    }

    /// Evaluate at a rational value of `ε` (used for specializing
    /// parameters). Fails if the denominator vanishes there.
    pub fn specialize(&self, at: &BigRational) -> Result<BigRational> {
        let d = self.den.eval(at);
        if d.is_zero() {
            return Err(Error::PoleAtPoint);
        }
        Ok(self.num.eval(at) / d)
    }
}

impl Default for FieldElement {
    fn default() -> Self {
        Self::zero()
    }
}

impl PartialOrd for FieldElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for FieldElement {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sign_compare(other)
    }
}

impl Add for &FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: &FieldElement) -> FieldElement {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            return FieldElement::reduce(self.num.add(&rhs.num), self.den.clone());
        }
        // Henrici: only the sum can share factors with gcd(d1, d2).
        let g = self.den.gcd(&rhs.den);
        if g.is_one() {
            return FieldElement::lowest_one(
                self.num.mul(&rhs.den).add(&rhs.num.mul(&self.den)),
                self.den.mul(&rhs.den),
            );
        }
        let (d1, d2) = (self.den.div_exact(&g), rhs.den.div_exact(&g));
        let num = self.num.mul(&d2).add(&rhs.num.mul(&d1));
        if num.is_zero() {
            return FieldElement::zero();
        }
        let g2 = num.gcd(&g);
        FieldElement::lowest_one(num.div_exact(&g2), d1.mul(&rhs.den.div_exact(&g2)))
    }
}

impl Sub for &FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: &FieldElement) -> FieldElement {
        self + &(-rhs)
    }
}

impl Mul for &FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: &FieldElement) -> FieldElement {
        if self.is_zero() || rhs.is_zero() {
            return FieldElement::zero();
        }
        if self.den.is_one() && rhs.den.is_one() {
            return FieldElement::from_poly(self.num.mul(&rhs.num));
        }
        // Inputs are reduced, so cross-cancelling leaves a reduced product.
        let g1 = self.num.gcd(&rhs.den);
        let g2 = rhs.num.gcd(&self.den);
        let (n1, d2) = if g1.is_one() { (self.num.clone(), rhs.den.clone()) } else { (self.num.div_exact(&g1), rhs.den.div_exact(&g1)) };
        let (n2, d1) = if g2.is_one() { (rhs.num.clone(), self.den.clone()) } else { (rhs.num.div_exact(&g2), self.den.div_exact(&g2)) };
        FieldElement::lowest_one(n1.mul(&n2), d1.mul(&d2))
    }
}

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for FieldElement {
            type Output = FieldElement;
            fn $m(self, rhs: FieldElement) -> FieldElement {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $m(self, rhs: &FieldElement) -> FieldElement {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        -&self
    }
}

impl std::iter::Sum for FieldElement {
    fn sum<I: Iterator<Item = FieldElement>>(iter: I) -> Self {
        iter.fold(FieldElement::zero(), |a, b| a + b)
    }
}

impl From<i64> for FieldElement {
    fn from(n: i64) -> Self {
        Self::from_int(n)
    }
}

impl From<BigRational> for FieldElement {
    fn from(q: BigRational) -> Self {
        Self::from_rational(q)
    }
}

fn write_rational(f: &mut fmt::Formatter<'_>, q: &BigRational) -> fmt::Result {
    if q.is_integer() {
        write!(f, "{}", q.numer())
    } else {
        write!(f, "{}/{}", q.numer(), q.denom())
    }
}

/// Ascending-degree polynomial in `t`, e.g. `1 - 3/2*t + t^2`.
pub(crate) fn write_poly(f: &mut fmt::Formatter<'_>, p: &Poly, var: &str) -> fmt::Result {
    if p.is_zero() {
        return f.write_str("0");
    }
    let mut first = true;
    for (k, c) in p.coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        if first {
            if c.is_negative() {
                f.write_str("-")?;
            }
        } else {
            f.write_str(if c.is_negative() { " - " } else { " + " })?;
        }
        first = false;
        let a = c.abs();
        match k {
            0 => write_rational(f, &a)?,
            _ => {
                if !a.is_one() {
                    write_rational(f, &a)?;
                    f.write_str("*")?;
                }
                f.write_str(var)?;
                if k > 1 {
                    write!(f, "^{k}")?;
                }
            }
        }
    }
    Ok(())
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write_poly(f, &self.num, "t")
        } else {
            f.write_str("(")?;
            write_poly(f, &self.num, "t")?;
            f.write_str(")/(")?;
            write_poly(f, &self.den, "t")?;
            f.write_str(")")
        }
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for FieldElement {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        crate::expr::parse_element(s)
    }
}

impl Serialize for FieldElement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for FieldElement {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(n) => Ok(FieldElement::from_int(n)),
            Raw::Str(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}
