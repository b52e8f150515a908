//! The base field `F_q = F_p[y]/(u)`. Elements are packed as integers in
//! `0..q` whose base-p digits are the coefficients of `1, y, ..., y^{s-1}`.

use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rand::Rng;

use super::{poly, Field};
use crate::error::{Error, Result};
use crate::numth::primes::is_prime_u64;

/// Largest q for which log/antilog tables are built when s > 1.
const TABLE_LIMIT: u64 = 1 << 20;
/// Packed elements must stay well inside u64.
const MAX_Q: u64 = 1 << 62;

#[derive(Debug)]
struct LogTables {
    exp: Vec<u32>,
    log: Vec<u32>,
}

#[derive(Debug, Clone)]
pub struct BaseField {
    p: u64,
    s: usize,
    q: u64,
    /// Monic modulus over F_p, constant term first, length s + 1.
    modulus: Vec<u64>,
    tables: Option<Arc<LogTables>>,
}

impl BaseField {
    /// The prime field F_p (modulus `y`).
    pub fn prime(p: u64) -> Result<Self> {
        if !is_prime_u64(p) {
            return Err(Error::NotPrime(p.to_string()));
        }
        if p >= MAX_Q {
            return Err(Error::FieldTooLarge { size: p.to_string(), bound: MAX_Q.to_string() });
        }
        Ok(BaseField { p, s: 1, q: p, modulus: vec![0, 1], tables: None })
    }

    /// `F_p[y]/(u)` for a monic irreducible `u` of degree `s >= 1`, given as
    /// base-p digits from the constant term upwards.
    pub fn new(p: u64, modulus: Vec<u64>) -> Result<Self> {
        let fp = Self::prime(p)?;
        let s = modulus.len().checked_sub(1).filter(|&s| s >= 1).ok_or(Error::NotMonic)?;
        if modulus.iter().any(|&c| c >= p) || modulus[s] != 1 {
            return Err(Error::NotMonic);
        }
        if s == 1 {
            // any monic linear modulus gives F_p; keep the canonical one
            return Ok(fp);
        }
        if !poly::is_irreducible(&fp, &modulus)? {
            return Err(Error::PreconditionFailed("base modulus is reducible".into()));
        }
        let q = (p as u128).checked_pow(s as u32).filter(|&q| q < MAX_Q as u128).ok_or_else(|| {
            Error::FieldTooLarge { size: format!("{p}^{s}"), bound: MAX_Q.to_string() }
        })? as u64;
        let mut field = BaseField { p, s, q, modulus, tables: None };
        if q <= TABLE_LIMIT {
            field.tables = Some(Arc::new(field.build_tables()));
        }
        Ok(field)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    /// Base-p digits of a packed element (length s).
    pub fn digits(&self, mut a: u64) -> Vec<u64> {
        let mut d = Vec::with_capacity(self.s);
        for _ in 0..self.s {
            d.push(a % self.p);
            a /= self.p;
        }
        d
    }

    /// Packs base-p digits; `None` if any digit is out of range or too many are given.
    pub fn from_digits(&self, digits: &[u64]) -> Option<u64> {
        if digits.len() > self.s || digits.iter().any(|&d| d >= self.p) {
            return None;
        }
        Some(digits.iter().rev().fold(0u64, |acc, &d| acc * self.p + d))
    }

    /// Field element for an integer, reduced mod p.
    pub fn from_int(&self, v: u64) -> u64 {
        v % self.p
    }

    fn mul_generic(&self, a: u64, b: u64) -> u64 {
        let (p, s) = (self.p as u128, self.s);
        let da = self.digits(a);
        let db = self.digits(b);
        let mut prod = vec![0u128; 2 * s - 1];
        for (i, &x) in da.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u128 * y as u128) % p;
            }
        }
        for i in (s..2 * s - 1).rev() {
            let c = prod[i];
            if c == 0 {
                continue;
            }
            for j in 0..s {
                let sub = c * self.modulus[j] as u128 % p;
                prod[i - s + j] = (prod[i - s + j] + p - sub) % p;
            }
        }
        prod[..s].iter().rev().fold(0u64, |acc, &d| acc * self.p + d as u64)
    }

    fn build_tables(&self) -> LogTables {
        let order = self.q - 1;
        let factors: Vec<u64> = crate::numth::factorize(&BigUint::from(order), Default::default())
            .factors
            .iter()
            .map(|f| f.prime.to_u64().unwrap())
            .collect();
        let generator = (2..self.q)
            .find(|&g| factors.iter().all(|&l| self.pow_generic(g, order / l) != 1))
            .expect("multiplicative group is cyclic");
        let mut exp = vec![0u32; order as usize];
        let mut log = vec![0u32; self.q as usize];
        let mut x = 1u64;
        for (i, slot) in exp.iter_mut().enumerate() {
            *slot = x as u32;
            log[x as usize] = i as u32;
            x = self.mul_generic(x, generator);
        }
        LogTables { exp, log }
    }

    fn pow_generic(&self, a: u64, mut e: u64) -> u64 {
        let (mut base, mut acc) = (a, 1u64);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_generic(acc, base);
            }
            base = self.mul_generic(base, base);
            e >>= 1;
        }
        acc
    }
}

impl Field for BaseField {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }

    fn one(&self) -> u64 {
        1
    }

    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }

    fn add(&self, a: &u64, b: &u64) -> u64 {
        if self.s == 1 {
            let r = a + b;
            return if r >= self.p { r - self.p } else { r };
        }
        let (mut x, mut y, mut out, mut place) = (*a, *b, 0u64, 1u64);
        for _ in 0..self.s {
            let d = (x % self.p + y % self.p) % self.p;
            out += d * place;
            place = place.wrapping_mul(self.p);
            x /= self.p;
            y /= self.p;
        }
        out
    }

    fn neg(&self, a: &u64) -> u64 {
        if self.s == 1 {
            return if *a == 0 { 0 } else { self.p - a };
        }
        let (mut x, mut out, mut place) = (*a, 0u64, 1u64);
        for _ in 0..self.s {
            let d = x % self.p;
            out += ((self.p - d) % self.p) * place;
            place = place.wrapping_mul(self.p);
            x /= self.p;
        }
        out
    }

    fn sub(&self, a: &u64, b: &u64) -> u64 {
        self.add(a, &self.neg(b))
    }

    fn mul(&self, a: &u64, b: &u64) -> u64 {
        if self.s == 1 {
            return (*a as u128 * *b as u128 % self.p as u128) as u64;
        }
        if *a == 0 || *b == 0 {
            return 0;
        }
        match &self.tables {
            Some(t) => {
                let l = t.log[*a as usize] as u64 + t.log[*b as usize] as u64;
                t.exp[(l % (self.q - 1)) as usize] as u64
            }
            None => self.mul_generic(*a, *b),
        }
    }

    fn inv(&self, a: &u64) -> Result<u64> {
        if *a == 0 {
            return Err(Error::DivisionByZero);
        }
        if let Some(t) = &self.tables {
            let l = t.log[*a as usize] as u64;
            return Ok(t.exp[((self.q - 1 - l) % (self.q - 1)) as usize] as u64);
        }
        if self.s == 1 {
            return Ok(crate::numth::primes::pow_mod_u64(*a, self.p - 2, self.p));
        }
        Ok(self.pow_generic(*a, self.q - 2))
    }

    fn order(&self) -> BigUint {
        BigUint::from(self.q)
    }

    fn characteristic(&self) -> u64 {
        self.p
    }

    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        rng.gen_range(0..self.q)
    }

    fn element(&self, index: &BigUint) -> u64 {
        index.to_u64().filter(|&i| i < self.q).expect("index below q")
    }
}
