//! Multivariate rational expressions over Q(ε) and the text grammar.

mod mpoly;
mod parse;

use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::{One, Signed};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub use mpoly::MPoly;
pub use parse::{parse_ast, Ast};
pub(crate) use parse::Parser;

use crate::error::{Error, Result};
use crate::field::FieldElement;
use crate::linalg::Matrix;

/// Minimal arithmetic needed to evaluate polynomials and syntax trees.
pub trait Scalar: Clone {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_rational(q: BigRational) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn div(&self, other: &Self) -> Result<Self>;
}

impl Scalar for FieldElement {
    fn zero() -> Self {
        FieldElement::zero()
    }
    fn one() -> Self {
        FieldElement::one()
    }
    fn from_rational(q: BigRational) -> Self {
        FieldElement::from_rational(q)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn div(&self, other: &Self) -> Result<Self> {
        self.checked_div(other)
    }
}

fn eval_ast<T: Scalar>(ast: &Ast, eps: &T, vars: &[T]) -> Result<T> {
    Ok(match ast {
        Ast::Int(n) => T::from_rational(BigRational::from_integer(n.clone())),
        Ast::Eps => eps.clone(),
        Ast::Var(i) => vars
            .get(i - 1)
            .cloned()
            .ok_or_else(|| Error::invalid(format!("variable x{i} exceeds arity {}", vars.len())))?,
        Ast::Neg(a) => eval_ast(a, eps, vars)?.neg(),
        Ast::Add(a, b) => eval_ast(a, eps, vars)?.add(&eval_ast(b, eps, vars)?),
        Ast::Sub(a, b) => eval_ast(a, eps, vars)?.add(&eval_ast(b, eps, vars)?.neg()),
        Ast::Mul(a, b) => eval_ast(a, eps, vars)?.mul(&eval_ast(b, eps, vars)?),
        Ast::Div(a, b) => eval_ast(a, eps, vars)?.div(&eval_ast(b, eps, vars)?)?,
        Ast::Pow(a, k) => {
            let base = eval_ast(a, eps, vars)?;
            let mut acc = T::one();
            for _ in 0..k.unsigned_abs() {
                acc = acc.mul(&base);
            }
            if *k < 0 {
                T::one().div(&acc)?
            } else {
                acc
            }
        }
    })
}

/// Parse an element of Q(ε); variables are rejected.
pub fn parse_element(src: &str) -> Result<FieldElement> {
    let mut p = Parser::new(src)?;
    let e = parse_element_from(&mut p)?;
    p.expect_end()?;
    Ok(e)
}

pub(crate) fn parse_element_from(p: &mut Parser) -> Result<FieldElement> {
    let ast = p.expr()?;
    if ast.max_var() > 0 {
        return Err(p.error("field elements cannot contain variables"));
    }
    eval_ast(&ast, &FieldElement::eps(), &[])
}

/// Parse `(a, b, ...)` as a vector of field elements.
pub fn parse_vector(src: &str) -> Result<Vec<FieldElement>> {
    let mut p = Parser::new(src)?;
    let v = parse_vector_from(&mut p)?;
    p.expect_end()?;
    Ok(v)
}

pub(crate) fn parse_vector_from(p: &mut Parser) -> Result<Vec<FieldElement>> {
    p.expect_sym('(')?;
    let mut out = Vec::new();
    if p.eat_sym(')') {
        return Ok(out);
    }
    loop {
        out.push(parse_element_from(p)?);
        if p.eat_sym(')') {
            return Ok(out);
        }
        p.expect_sym(',')?;
    }
}

/// `num/den` with both sides polynomials in `(ε, x1..xn)`.
///
/// Construction cancels the common monomial factor and rational content,
/// and cancels the whole denominator (or numerator) when one divides the
/// other exactly. Full multivariate gcds are not computed, so equality is
/// decided by cross-multiplication rather than structurally.
#[derive(Clone)]
pub struct RationalExpr {
    num: MPoly,
    den: MPoly,
}

impl RationalExpr {
    pub fn new(num: MPoly, den: MPoly) -> Result<Self> {
        assert_eq!(num.nvars(), den.nvars(), "arity mismatch");
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::normalize(num, den))
    }

    fn normalize(num: MPoly, den: MPoly) -> Self {
        let n = num.nvars();
        if num.is_zero() {
            return Self::from_poly(MPoly::zero(n));
        }
        let (mut num, mut den) = (num, den);
        if let (Some(a), Some(b)) = (num.monomial_content(), den.monomial_content()) {
            let m: Vec<u32> = a.iter().zip(&b).map(|(x, y)| *x.min(y)).collect();
            if m.iter().any(|&k| k > 0) {
                num = num.div_monomial(&m);
                den = den.div_monomial(&m);
            }
        }
        if den.as_constant().is_none() {
            if let (Some(pn), Some(pd)) = (num.to_univariate(), den.to_univariate()) {
                let g = pn.gcd(&pd);
                if !g.is_one() {
                    num = MPoly::from_univariate(n, &pn.div_exact(&g));
                    den = MPoly::from_univariate(n, &pd.div_exact(&g));
                }
            } else if let Some(q) = num.div_exact(&den) {
                num = q;
                den = MPoly::one(n);
            } else if let Some(q) = den.div_exact(&num) {
                num = MPoly::one(n);
                den = q;
            }
        }
        let lead = den.leading().expect("nonzero denominator").1.clone();
        if !lead.is_one() {
            let s = lead.recip();
            num = num.scale(&s);
            den = den.scale(&s);
        }
        RationalExpr { num, den }
    }

    pub fn from_poly(p: MPoly) -> Self {
        let n = p.nvars();
        RationalExpr {
            num: p,
            den: MPoly::one(n),
        }
    }

    pub fn constant(arity: usize, c: &FieldElement) -> Self {
        Self::normalize(
            MPoly::from_univariate(arity, c.numerator()),
            MPoly::from_univariate(arity, c.denominator()),
        )
    }

    pub fn zero(arity: usize) -> Self {
        Self::from_poly(MPoly::zero(arity))
    }

    pub fn eps(arity: usize) -> Self {
        Self::from_poly(MPoly::var(arity, 0))
    }

    /// The coordinate `x_i`, 1-based.
    pub fn var(arity: usize, i: usize) -> Self {
        assert!((1..=arity).contains(&i), "variable index out of range");
        Self::from_poly(MPoly::var(arity, i))
    }

    /// Parse with a fixed arity, or the largest variable index if `None`.
    pub fn parse(src: &str, arity: Option<usize>) -> Result<Self> {
        let ast = parse_ast(src)?;
        let used = ast.max_var();
        let n = match arity {
            Some(n) if used > n => {
                return Err(Error::invalid(format!(
                    "expression {src:?} uses x{used} but arity is {n}"
                )))
            }
            Some(n) => n,
            None => used,
        };
        let vars: Vec<_> = (1..=n).map(|i| Self::var(n, i)).collect();
        Ok(eval_ast(&ast, &Self::eps(n), &vars)?.with_arity(n))
    }

    pub fn arity(&self) -> usize {
        self.num.nvars()
    }

    pub fn numerator(&self) -> &MPoly {
        &self.num
    }

    pub fn denominator(&self) -> &MPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Same expression viewed with more variables (the new ones unused).
    pub fn with_arity(&self, arity: usize) -> Self {
        RationalExpr {
            num: self.num.with_nvars(arity),
            den: self.den.with_nvars(arity),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Scalar::add(self, &Scalar::neg(other))
    }

    /// `∂/∂x_i` by the quotient rule; `i` is 1-based.
    pub fn partial(&self, i: usize) -> Self {
        assert!((1..=self.arity()).contains(&i), "variable index out of range");
        let dn = self.num.derivative(i);
        if self.den.as_constant().is_some() {
            return Self::normalize(dn, self.den.clone());
        }
        let dd = self.den.derivative(i);
        Self::normalize(
            dn.mul(&self.den).sub(&self.num.mul(&dd)),
            self.den.mul(&self.den),
        )
    }

    /// Value at a point of Q(ε)^n.
    pub fn eval(&self, point: &[FieldElement]) -> Result<FieldElement> {
        if point.len() != self.arity() {
            return Err(Error::dims(format!(
                "point has {} coordinates, expression arity is {}",
                point.len(),
                self.arity()
            )));
        }
        let eps = FieldElement::eps();
        let d = self.den.eval(&eps, point);
        if d.is_zero() {
            return Err(Error::PoleAtPoint);
        }
        self.num.eval(&eps, point).checked_div(&d)
    }

    /// Substitute expressions (all of one arity) for the variables.
    pub fn compose(&self, subs: &[RationalExpr]) -> Result<RationalExpr> {
        if subs.len() != self.arity() {
            return Err(Error::dims("composition needs one expression per variable"));
        }
        let m = subs.first().map_or(0, RationalExpr::arity);
        if subs.iter().any(|s| s.arity() != m) {
            return Err(Error::dims("substituted expressions differ in arity"));
        }
        let eps = Self::eps(m);
        let n = self.num.eval(&eps, subs);
        let d = self.den.eval(&eps, subs);
        Ok(n.div(&d)?.with_arity(m))
    }

    /// The value as a field element if no variable occurs.
    pub fn as_element(&self) -> Option<FieldElement> {
        let n = self.num.to_univariate()?;
        let d = self.den.to_univariate()?;
        FieldElement::from_polys(n, d).ok()
    }
}

impl Scalar for RationalExpr {
    fn zero() -> Self {
        RationalExpr::zero(0)
    }
    fn one() -> Self {
        RationalExpr::from_poly(MPoly::one(0))
    }
    fn from_rational(q: BigRational) -> Self {
        RationalExpr::from_poly(MPoly::constant(0, q))
    }
    fn add(&self, other: &Self) -> Self {
        let (a, b) = unify(self, other);
        if a.den == b.den {
            return Self::normalize(a.num.add(&b.num), a.den.clone());
        }
        Self::normalize(
            a.num.mul(&b.den).add(&b.num.mul(&a.den)),
            a.den.mul(&b.den),
        )
    }
    fn mul(&self, other: &Self) -> Self {
        let (a, b) = unify(self, other);
        Self::normalize(a.num.mul(&b.num), a.den.mul(&b.den))
    }
    fn neg(&self) -> Self {
        RationalExpr {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }
    fn div(&self, other: &Self) -> Result<Self> {
        let (a, b) = unify(self, other);
        if b.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::normalize(a.num.mul(&b.den), a.den.mul(&b.num)))
    }
}

/// The `Scalar` constants have arity 0; widen them to match the other
/// operand so generic evaluation works at any arity.
fn unify<'a>(
    a: &'a RationalExpr,
    b: &'a RationalExpr,
) -> (std::borrow::Cow<'a, RationalExpr>, std::borrow::Cow<'a, RationalExpr>) {
    use std::borrow::Cow;
    match a.arity().cmp(&b.arity()) {
        std::cmp::Ordering::Equal => (Cow::Borrowed(a), Cow::Borrowed(b)),
        std::cmp::Ordering::Less => (Cow::Owned(a.with_arity(b.arity())), Cow::Borrowed(b)),
        std::cmp::Ordering::Greater => (Cow::Borrowed(a), Cow::Owned(b.with_arity(a.arity()))),
    }
}

impl PartialEq for RationalExpr {
    fn eq(&self, other: &Self) -> bool {
        self.arity() == other.arity()
            && self.num.mul(&other.den) == other.num.mul(&self.den)
    }
}

fn write_mpoly(f: &mut fmt::Formatter<'_>, p: &MPoly) -> fmt::Result {
    if p.is_zero() {
        return f.write_str("0");
    }
    for (idx, (e, c)) in p.terms().enumerate() {
        if idx == 0 {
            if c.is_negative() {
                f.write_str("-")?;
            }
        } else {
            f.write_str(if c.is_negative() { " - " } else { " + " })?;
        }
        let a = c.abs();
        let factors: Vec<String> = e
            .iter()
            .enumerate()
            .filter(|(_, &k)| k > 0)
            .map(|(slot, &k)| {
                let name = if slot == 0 { "t".to_string() } else { format!("x{slot}") };
                if k == 1 {
                    name
                } else {
                    format!("{name}^{k}")
                }
            })
            .collect();
        let coeff = if a.is_integer() {
            a.numer().to_string()
        } else {
            format!("{}/{}", a.numer(), a.denom())
        };
        match (factors.is_empty(), a.is_one()) {
            (true, _) => f.write_str(&coeff)?,
            (false, true) => f.write_str(&factors.join("*"))?,
            (false, false) => write!(f, "{coeff}*{}", factors.join("*"))?,
        }
    }
    Ok(())
}

impl fmt::Display for RationalExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.as_constant().is_some_and(|c| c.is_one()) {
            write_mpoly(f, &self.num)
        } else {
            f.write_str("(")?;
            write_mpoly(f, &self.num)?;
            f.write_str(")/(")?;
            write_mpoly(f, &self.den)?;
            f.write_str(")")
        }
    }
}

impl fmt::Debug for RationalExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}", self.arity(), self)
    }
}

impl FromStr for RationalExpr {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        RationalExpr::parse(s, None)
    }
}

impl Serialize for RationalExpr {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for RationalExpr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Jacobian of a map at a point: row = component, column = variable.
pub fn jacobian(map: &[RationalExpr], point: &[FieldElement]) -> Result<Matrix> {
    let n = point.len();
    let mut rows = Vec::with_capacity(map.len());
    for f in map {
        if f.arity() != n {
            return Err(Error::dims("map component arity differs from point length"));
        }
        let row = (1..=n)
            .map(|i| f.partial(i).eval(point))
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    Matrix::from_rows(map.len(), n, rows)
}
