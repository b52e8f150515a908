//! Dense univariate polynomials over any [`Field`], stored as coefficient
//! vectors from the constant term upwards. The zero polynomial is the empty
//! vector; every function returns trimmed polynomials.

use num_bigint::BigUint;

use super::Field;
use crate::error::{Error, Result};
use crate::numth::primes::sieve_primes;

pub type Poly<E> = Vec<E>;

/// Drops leading zero coefficients.
pub fn trim<F: Field>(f: &F, mut a: Poly<F::Elem>) -> Poly<F::Elem> {
    while a.last().is_some_and(|c| f.is_zero(c)) {
        a.pop();
    }
    a
}

/// Degree, `None` for the zero polynomial. Assumes a trimmed input.
pub fn degree<E>(a: &[E]) -> Option<usize> {
    a.len().checked_sub(1)
}

pub fn is_monic<F: Field>(f: &F, a: &[F::Elem]) -> bool {
    a.last().is_some_and(|c| f.is_one(c))
}

pub fn one<F: Field>(f: &F) -> Poly<F::Elem> {
    vec![f.one()]
}

/// The monomial `x^k`.
pub fn monomial<F: Field>(f: &F, k: usize) -> Poly<F::Elem> {
    let mut v = vec![f.zero(); k + 1];
    v[k] = f.one();
    v
}

/// `x^n - 1`.
pub fn x_n_minus_1<F: Field>(f: &F, n: usize) -> Poly<F::Elem> {
    let mut v = monomial(f, n);
    v[0] = f.sub(&v[0], &f.one());
    trim(f, v)
}

pub fn add<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Poly<F::Elem> {
    let (long, short) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    let mut out = long.to_vec();
    for (o, s) in out.iter_mut().zip(short) {
        *o = f.add(o, s);
    }
    trim(f, out)
}

pub fn neg<F: Field>(f: &F, a: &[F::Elem]) -> Poly<F::Elem> {
    a.iter().map(|c| f.neg(c)).collect()
}

pub fn sub<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Poly<F::Elem> {
    add(f, a, &neg(f, b))
}

pub fn scale<F: Field>(f: &F, a: &[F::Elem], c: &F::Elem) -> Poly<F::Elem> {
    trim(f, a.iter().map(|x| f.mul(x, c)).collect())
}

pub fn mul<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Poly<F::Elem> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![f.zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if f.is_zero(x) {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] = f.add(&out[i + j], &f.mul(x, y));
        }
    }
    trim(f, out)
}

/// Quotient and remainder.
pub type DivRem<E> = (Poly<E>, Poly<E>);

/// Euclidean division `a = q b + r` with `deg r < deg b`.
pub fn divrem<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Result<DivRem<F::Elem>> {
    let db = degree(b).ok_or(Error::DivisionByZero)?;
    let lead_inv = f.inv(&b[db])?;
    let mut r = a.to_vec();
    if r.len() <= db {
        return Ok((Vec::new(), r));
    }
    let mut q = vec![f.zero(); r.len() - db];
    for i in (db..r.len()).rev() {
        if f.is_zero(&r[i]) {
            continue;
        }
        let c = f.mul(&r[i], &lead_inv);
        for (j, bj) in b.iter().enumerate() {
            let idx = i - db + j;
            r[idx] = f.sub(&r[idx], &f.mul(&c, bj));
        }
        q[i - db] = c;
    }
    r.truncate(db);
    Ok((trim(f, q), trim(f, r)))
}

pub fn rem<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Result<Poly<F::Elem>> {
    Ok(divrem(f, a, b)?.1)
}

/// True when `b` divides `a` (`b` nonzero).
pub fn divides<F: Field>(f: &F, b: &[F::Elem], a: &[F::Elem]) -> Result<bool> {
    Ok(rem(f, a, b)?.is_empty())
}

/// Scales to leading coefficient one; the zero polynomial stays zero.
pub fn monic<F: Field>(f: &F, a: &[F::Elem]) -> Poly<F::Elem> {
    match a.last() {
        None => Vec::new(),
        Some(lead) => scale(f, a, &f.inv(lead).expect("nonzero leading coefficient")),
    }
}

/// Monic greatest common divisor.
pub fn gcd<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Result<Poly<F::Elem>> {
    let mut x = trim(f, a.to_vec());
    let mut y = trim(f, b.to_vec());
    if x.is_empty() && y.is_empty() {
        return Err(Error::UndefinedGcd);
    }
    while !y.is_empty() {
        let r = rem(f, &x, &y)?;
        x = y;
        y = r;
    }
    Ok(monic(f, &x))
}

/// Inverse of `a` modulo `m`, or `DivisionByZero` when they share a factor.
pub fn inv_mod<F: Field>(f: &F, a: &[F::Elem], m: &[F::Elem]) -> Result<Poly<F::Elem>> {
    // invariant: r_i = s_i * a (mod m)
    let (mut r0, mut r1) = (m.to_vec(), rem(f, a, m)?);
    let (mut s0, mut s1): (Poly<F::Elem>, Poly<F::Elem>) = (Vec::new(), one(f));
    while !r1.is_empty() {
        let (q, r) = divrem(f, &r0, &r1)?;
        let s = sub(f, &s0, &mul(f, &q, &s1));
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s);
    }
    if degree(&r0) != Some(0) {
        return Err(Error::DivisionByZero);
    }
    let c = f.inv(&r0[0])?;
    rem(f, &scale(f, &s0, &c), m)
}

pub fn mulmod<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem], m: &[F::Elem]) -> Result<Poly<F::Elem>> {
    rem(f, &mul(f, a, b), m)
}

pub fn powmod<F: Field>(f: &F, a: &[F::Elem], e: &BigUint, m: &[F::Elem]) -> Result<Poly<F::Elem>> {
    let base = rem(f, a, m)?;
    let mut acc = rem(f, &one(f), m)?;
    for i in (0..e.bits()).rev() {
        acc = mulmod(f, &acc, &acc, m)?;
        if e.bit(i) {
            acc = mulmod(f, &acc, &base, m)?;
        }
    }
    Ok(acc)
}

/// Rabin's test: a polynomial of degree `d >= 1` over a field with `K`
/// elements is irreducible iff `x^{K^d} = x (mod f)` and
/// `gcd(x^{K^{d/l}} - x, f) = 1` for every prime `l | d`.
pub fn is_irreducible<F: Field>(f: &F, poly: &[F::Elem]) -> Result<bool> {
    let d = match degree(poly) {
        None | Some(0) => return Ok(false),
        Some(1) => return Ok(true),
        Some(d) => d,
    };
    let k = f.order();
    let x = monomial(f, 1);
    // x^{K^i} mod poly for i = 0..=d
    let mut powers = vec![rem(f, &x, poly)?];
    for _ in 0..d {
        let last = powers.last().unwrap();
        powers.push(powmod(f, last, &k, poly)?);
    }
    if !sub(f, &powers[d], &powers[0]).is_empty() {
        return Ok(false);
    }
    for l in sieve_primes(d as u64).into_iter().filter(|l| d as u64 % l == 0) {
        let h = sub(f, &powers[d / l as usize], &x);
        if degree(&gcd(f, &h, poly)?) != Some(0) {
            return Ok(false);
        }
    }
    Ok(true)
}
