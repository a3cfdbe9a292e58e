//! Polynomial gcd without coefficient blow-up: a modular coprimality test
//! settles the common case, and a primitive remainder sequence over Z
//! handles the rest.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::poly::Poly;

/// Large primes below 2^62; products fit in u128.
const PRIMES: [u64; 3] = [4_611_686_018_427_387_847, 4_611_686_018_427_387_817, 2_305_843_009_213_693_951];

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    r
}

fn int_mod(x: &BigInt, p: u64) -> u64 {
    let r = x.mod_floor(&BigInt::from(p));
    r.to_u64().expect("reduced below p")
}

/// Image mod `p`, or `None` if a denominator or the leading coefficient
/// vanishes there (the degree bound would then be unsound).
fn image(f: &Poly, p: u64) -> Option<Vec<u64>> {
    let mut out = Vec::with_capacity(f.coeffs().len());
    for c in f.coeffs() {
        let d = int_mod(c.denom(), p);
        if d == 0 {
            return None;
        }
        out.push(mul_mod(int_mod(c.numer(), p), pow_mod(d, p - 2, p), p));
    }
    (out.last().is_some_and(|&l| l != 0)).then_some(out)
}

fn trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

/// Degree of `gcd(a, b)` over `F_p`.
fn gcd_degree_mod(mut a: Vec<u64>, mut b: Vec<u64>, p: u64) -> usize {
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let inv = pow_mod(*b.last().expect("nonempty"), p - 2, p);
        while a.len() >= b.len() {
            let q = mul_mod(*a.last().expect("nonempty"), inv, p);
            let shift = a.len() - b.len();
            for (i, &bi) in b.iter().enumerate() {
                let s = mul_mod(q, bi, p);
                a[shift + i] = (a[shift + i] + p - s) % p;
            }
            trim(&mut a);
            if a.is_empty() {
                break;
            }
        }
        std::mem::swap(&mut a, &mut b);
    }
    a.len().saturating_sub(1)
}

/// True when `a` and `b` are certainly coprime over Q.
fn coprime_by_reduction(a: &Poly, b: &Poly) -> bool {
    for &p in &PRIMES {
        if let (Some(ia), Some(ib)) = (image(a, p), image(b, p)) {
            return gcd_degree_mod(ia, ib, p) == 0;
        }
    }
    false
}

/// Integer coefficients with content 1 and positive leading coefficient.
fn primitive(f: &Poly) -> Vec<BigInt> {
    let lcm = f.coeffs().iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = f.coeffs().iter().map(|c| (c * BigRational::from_integer(lcm.clone())).to_integer()).collect();
    primitive_part(ints)
}

fn primitive_part(mut v: Vec<BigInt>) -> Vec<BigInt> {
    while v.last().is_some_and(Zero::is_zero) {
        v.pop();
    }
    let g = v.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    if g.is_zero() {
        return v;
    }
    let neg = v.last().is_some_and(|l| l.sign() == Sign::Minus);
    for c in &mut v {
        *c = &*c / &g;
        if neg {
            *c = -&*c;
        }
    }
    v
}

/// Pseudo-remainder of `a` by `b` (both nonzero).
fn prem(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut r = a.to_vec();
    let lb = b.last().expect("nonzero divisor").clone();
    while r.len() >= b.len() && !r.is_empty() {
        let lr = r.last().expect("nonempty").clone();
        let shift = r.len() - b.len();
        for c in r.iter_mut() {
            *c *= &lb;
        }
        for (i, bi) in b.iter().enumerate() {
            r[shift + i] -= &lr * bi;
        }
        while r.last().is_some_and(Zero::is_zero) {
            r.pop();
        }
    }
    r
}

/// Monic gcd of two nonzero polynomials with nonzero constant terms.
pub(super) fn gcd_nonzero(a: &Poly, b: &Poly) -> Poly {
    if a.is_constant() || b.is_constant() || coprime_by_reduction(a, b) {
        return Poly::one();
    }
    let (mut x, mut y) = (primitive(a), primitive(b));
    if x.len() < y.len() {
        std::mem::swap(&mut x, &mut y);
    }
    while !y.is_empty() {
        let r = primitive_part(prem(&x, &y));
        x = y;
        y = r;
    }
    let lead = BigRational::from_integer(x.last().expect("nonzero gcd").abs());
    Poly::from_coeffs(x.into_iter().map(|c| BigRational::from_integer(c) / &lead).collect())
}
