//! Structure of `x^n - 1` over `F_q`: factorization via cyclotomic cosets,
//! the polynomial arithmetic functions Φ_q, μ_q and W, and enumeration of
//! degree-k divisors.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gfield::poly::{self, Poly};
use crate::gfield::{BaseField, Field};

/// Divisor enumeration stops with an error beyond this many divisors.
pub const DIVISOR_LIMIT: usize = 1 << 20;
const SPLIT_SEED: u64 = 0x5eed;

/// One irreducible factor of `x^n - 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct XnFactor {
    pub degree: usize,
    pub multiplicity: u32,
    /// Coefficients over F_q (packed), constant term first; absent when the
    /// factorization was derived from coset data alone.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub poly: Option<Poly<u64>>,
}

/// `x^n - 1 = prod factor^multiplicity` over F_q.
#[derive(Debug, Clone, Serialize)]
pub struct PolyFactorization {
    #[serde(with = "crate::serde_big::decimal")]
    pub q: BigUint,
    pub p: u64,
    pub n: usize,
    pub factors: Vec<XnFactor>,
    #[serde(skip)]
    field: Option<BaseField>,
}

/// q-cyclotomic cosets modulo `m`, each sorted, ordered by smallest element.
pub fn cyclotomic_cosets(q: &BigUint, m: u64) -> Vec<Vec<u64>> {
    let qm = (q % m).to_u64().unwrap();
    let mut seen = vec![false; m as usize];
    let mut out = Vec::new();
    for start in 0..m {
        if seen[start as usize] {
            continue;
        }
        let mut coset = Vec::new();
        let mut x = start;
        while !seen[x as usize] {
            seen[x as usize] = true;
            coset.push(x);
            x = ((x as u128 * qm as u128) % m as u128) as u64;
        }
        coset.sort_unstable();
        out.push(coset);
    }
    out
}

/// Splits `n = n' p^e` with `p ∤ n'`.
fn split_char(n: usize, p: u64) -> (usize, u32) {
    let (mut m, mut e) = (n, 0);
    while m as u64 % p == 0 {
        m /= p as usize;
        e += 1;
    }
    (m, e)
}

impl PolyFactorization {
    /// Degrees and multiplicities of the factors of `x^n - 1` over F_q from the
    /// q-cyclotomic cosets modulo `n'`; no polynomials are produced.
    pub fn from_cosets(q: &BigUint, p: u64, n: usize) -> Self {
        assert!(n >= 1);
        let (np, e) = split_char(n, p);
        let mult = p.pow(e) as u32;
        let mut factors: Vec<XnFactor> = cyclotomic_cosets(q, np as u64)
            .into_iter()
            .map(|c| XnFactor { degree: c.len(), multiplicity: mult, poly: None })
            .collect();
        factors.sort_by_key(|f| f.degree);
        PolyFactorization { q: q.clone(), p, n, factors, field: None }
    }

    pub fn field(&self) -> Option<&BaseField> {
        self.field.as_ref()
    }

    pub fn has_polys(&self) -> bool {
        self.field.is_some()
    }

    /// Number of distinct irreducible factors.
    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// `q^d` for each factor degree `d`.
    pub fn norms(&self) -> Vec<BigUint> {
        self.factors.iter().map(|f| self.q.pow(f.degree as u32)).collect()
    }

    /// Multiplicities, in factor order.
    pub fn multiplicities(&self) -> Vec<u32> {
        self.factors.iter().map(|f| f.multiplicity).collect()
    }

    fn require_field(&self) -> Result<&BaseField> {
        self.field
            .as_ref()
            .ok_or_else(|| Error::PreconditionFailed("factorization has no explicit polynomials".into()))
    }

    /// `x^n - 1` as a polynomial over the base field.
    pub fn xn1(&self) -> Result<Poly<u64>> {
        Ok(poly::x_n_minus_1(self.require_field()?, self.n))
    }

    /// Exponent of each irreducible factor in a monic divisor `h` of `x^n - 1`.
    pub fn exponents_of(&self, h: &[u64]) -> Result<Vec<u32>> {
        let f = self.require_field()?;
        if !poly::is_monic(f, h) {
            return Err(Error::NotMonic);
        }
        let mut rest = h.to_vec();
        let mut exps = Vec::with_capacity(self.factors.len());
        for fac in &self.factors {
            let pi = fac.poly.as_ref().unwrap();
            let mut e = 0;
            while e < fac.multiplicity {
                let (quo, r) = poly::divrem(f, &rest, pi)?;
                if !r.is_empty() {
                    break;
                }
                rest = quo;
                e += 1;
            }
            exps.push(e);
        }
        if rest.len() != 1 {
            return Err(Error::NotADivisor { n: self.n });
        }
        Ok(exps)
    }

    /// The divisor with the given exponent vector.
    pub fn product(&self, exps: &[u32]) -> Result<Poly<u64>> {
        let f = self.require_field()?;
        let mut acc = poly::one(f);
        for (fac, &e) in self.factors.iter().zip(exps) {
            for _ in 0..e {
                acc = poly::mul(f, &acc, fac.poly.as_ref().unwrap());
            }
        }
        Ok(acc)
    }

    /// Exponents of `(x^n - 1)/h` given those of `h`.
    pub fn complement_exponents(&self, exps: &[u32]) -> Vec<u32> {
        self.factors.iter().zip(exps).map(|(f, &e)| f.multiplicity - e).collect()
    }

    /// Φ_q from an exponent vector: `prod (q^d - 1) q^{d(e-1)}` over `e > 0`.
    pub fn phi_of_exponents(&self, exps: &[u32]) -> BigUint {
        self.factors
            .iter()
            .zip(exps)
            .filter(|(_, &e)| e > 0)
            .map(|(f, &e)| {
                let qd = self.q.pow(f.degree as u32);
                (&qd - 1u32) * qd.pow(e - 1)
            })
            .product()
    }

    /// W from an exponent vector: `2^{#{e > 0}}`.
    pub fn w_of_exponents(&self, exps: &[u32]) -> BigUint {
        BigUint::one() << exps.iter().filter(|&&e| e > 0).count()
    }

    pub fn mobius_of_exponents(&self, exps: &[u32]) -> i32 {
        if exps.iter().any(|&e| e > 1) {
            0
        } else if exps.iter().filter(|&&e| e == 1).count() % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// Polynomial Euler function of a monic divisor `h`.
    pub fn phi_q(&self, h: &[u64]) -> Result<BigUint> {
        Ok(self.phi_of_exponents(&self.exponents_of(h)?))
    }

    /// Number of monic squarefree divisors of a monic divisor `h`.
    pub fn w_poly(&self, h: &[u64]) -> Result<BigUint> {
        Ok(self.w_of_exponents(&self.exponents_of(h)?))
    }

    /// Polynomial Möbius function of a monic divisor `h`.
    pub fn mobius_q(&self, h: &[u64]) -> Result<i32> {
        Ok(self.mobius_of_exponents(&self.exponents_of(h)?))
    }

    /// Every exponent vector `0 <= e_i <= m_i` with `sum e_i deg_i = k`.
    pub fn exponent_vectors_of_degree(&self, k: usize) -> Result<Vec<Vec<u32>>> {
        let mut out = Vec::new();
        let mut cur = vec![0u32; self.factors.len()];
        self.enumerate(0, k, &mut cur, &mut out)?;
        Ok(out)
    }

    fn enumerate(&self, i: usize, left: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) -> Result<()> {
        if i == self.factors.len() {
            if left == 0 {
                if out.len() >= DIVISOR_LIMIT {
                    return Err(Error::TooManyDivisors { limit: DIVISOR_LIMIT });
                }
                out.push(cur.clone());
            }
            return Ok(());
        }
        let f = &self.factors[i];
        let max = (left / f.degree).min(f.multiplicity as usize);
        for e in 0..=max {
            cur[i] = e as u32;
            self.enumerate(i + 1, left - e * f.degree, cur, out)?;
        }
        cur[i] = 0;
        Ok(())
    }

    /// Every monic divisor of `x^n - 1` as an exponent vector.
    pub fn all_divisor_exponents(&self) -> Result<Vec<Vec<u32>>> {
        let mut out: Vec<Vec<u32>> = vec![Vec::new()];
        for f in &self.factors {
            let mut next = Vec::with_capacity(out.len() * (f.multiplicity as usize + 1));
            for v in &out {
                for e in 0..=f.multiplicity {
                    let mut w = v.clone();
                    w.push(e);
                    next.push(w);
                }
            }
            if next.len() > DIVISOR_LIMIT {
                return Err(Error::TooManyDivisors { limit: DIVISOR_LIMIT });
            }
            out = next;
        }
        Ok(out)
    }
}

/// Splits a squarefree product of irreducibles of degree `d` (Cantor-Zassenhaus).
fn equal_degree_split(f: &BaseField, g: Poly<u64>, d: usize, rng: &mut ChaCha8Rng, out: &mut Vec<Poly<u64>>) -> Result<()> {
    let deg = poly::degree(&g).unwrap();
    if deg == d {
        out.push(g);
        return Ok(());
    }
    let q = f.order();
    loop {
        let a = poly::trim(f, (0..deg).map(|_| f.random(rng)).collect());
        if a.is_empty() {
            continue;
        }
        let b = if f.p() == 2 {
            // trace from F_{q^d} down to F_2: sum of a^{2^i}, i < s d
            let mut t = a.clone();
            let mut acc = a.clone();
            for _ in 1..f.s() * d {
                t = poly::mulmod(f, &t, &t, &g)?;
                acc = poly::add(f, &acc, &t);
            }
            acc
        } else {
            let e = (q.pow(d as u32) - 1u32) >> 1;
            poly::sub(f, &poly::powmod(f, &a, &e, &g)?, &poly::one(f))
        };
        if b.is_empty() {
            continue;
        }
        let h = poly::gcd(f, &b, &g)?;
        let dh = poly::degree(&h).unwrap();
        if dh > 0 && dh < deg {
            let other = poly::divrem(f, &g, &h)?.0;
            equal_degree_split(f, h, d, rng, out)?;
            return equal_degree_split(f, poly::monic(f, &other), d, rng, out);
        }
    }
}

/// Factors `x^n - 1` over `F_q` into monic irreducibles. Factors are sorted by
/// degree, then by coefficient sequence.
pub fn factor_xn1(f: &BaseField, n: usize) -> Result<PolyFactorization> {
    if n == 0 {
        return Err(Error::PreconditionFailed("n >= 1".into()));
    }
    let q = f.order();
    let (np, e) = split_char(n, f.p());
    let mut rest = poly::x_n_minus_1(f, np);
    let x = poly::monomial(f, 1);
    let mut h = x.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(SPLIT_SEED);
    let mut found: Vec<Poly<u64>> = Vec::new();
    let mut d = 0;
    while poly::degree(&rest).unwrap() > 0 {
        d += 1;
        h = poly::powmod(f, &h, &q, &rest)?;
        let g = poly::gcd(f, &poly::sub(f, &h, &x), &rest)?;
        if poly::degree(&g).unwrap() > 0 {
            rest = poly::divrem(f, &rest, &g)?.0;
            rest = poly::monic(f, &rest);
            h = poly::rem(f, &h, &rest)?;
            equal_degree_split(f, g, d, &mut rng, &mut found)?;
        }
    }
    found.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    let expected = cyclotomic_cosets(&q, np as u64).len();
    assert_eq!(found.len(), expected, "factor count must match the coset count");
    let mult = f.p().pow(e) as u32;
    let factors = found
        .into_iter()
        .map(|pl| XnFactor { degree: pl.len() - 1, multiplicity: mult, poly: Some(pl) })
        .collect();
    Ok(PolyFactorization { q, p: f.p(), n, factors, field: Some(f.clone()) })
}

/// A monic degree-k divisor `f` of `x^n - 1` with data about its complement.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DegreeKChoice {
    pub k: usize,
    pub exponents: Vec<u32>,
    pub complement_exponents: Vec<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f: Option<Poly<u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub complement: Option<Poly<u64>>,
    #[serde(with = "crate::serde_big::decimal")]
    pub w_complement: BigUint,
}

/// All monic degree-k divisors, ordered by `W((x^n-1)/f)` and then by the
/// coefficient sequence of `f` (exponent vector without explicit polynomials).
pub fn degree_k_divisors(fact: &PolyFactorization, k: usize) -> Result<Vec<DegreeKChoice>> {
    let mut out = Vec::new();
    for exps in fact.exponent_vectors_of_degree(k)? {
        let comp = fact.complement_exponents(&exps);
        let (f, complement) = if fact.has_polys() {
            (Some(fact.product(&exps)?), Some(fact.product(&comp)?))
        } else {
            (None, None)
        };
        out.push(DegreeKChoice {
            k,
            w_complement: fact.w_of_exponents(&comp),
            exponents: exps,
            complement_exponents: comp,
            f,
            complement,
        });
    }
    out.sort_by(|a, b| {
        a.w_complement.cmp(&b.w_complement).then_with(|| match (&a.f, &b.f) {
            (Some(x), Some(y)) => x.cmp(y),
            _ => a.exponents.cmp(&b.exponents),
        })
    });
    Ok(out)
}

/// The degree-k divisor with the fewest squarefree divisors in its complement.
pub fn best_f(fact: &PolyFactorization, k: usize) -> Result<DegreeKChoice> {
    degree_k_divisors(fact, k)?
        .into_iter()
        .next()
        .ok_or(Error::NoDegreeKDivisor { n: fact.n, k })
}

/// Distinct values of `W((x^n-1)/f)` over all degree-k divisors, ascending.
pub fn complement_w_values(fact: &PolyFactorization, k: usize) -> Result<Vec<BigUint>> {
    let mut ws: Vec<BigUint> = degree_k_divisors(fact, k)?.into_iter().map(|c| c.w_complement).collect();
    ws.dedup();
    Ok(ws)
}

/// Multiplicative order of `q` modulo `m`; requires `gcd(q, m) = 1`.
pub fn mult_order_mod(q: &BigUint, m: u64) -> u64 {
    let qm = (q % m).to_u64().unwrap();
    assert_eq!(qm.gcd(&m), 1, "q must be a unit modulo m");
    let mut x = qm % m;
    let mut k = 1;
    while x != 1 % m {
        x = ((x as u128 * qm as u128) % m as u128) as u64;
        k += 1;
    }
    k
}
