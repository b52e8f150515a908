//! Element-level predicates and constructions: multiplicative order,
//! r-primitivity, k-normality, F_q-order, the module action `f∘α`, freeness
//! tests, and brute-force pair counting.

use std::collections::{HashMap, HashSet};

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cyclopoly::{factor_xn1, PolyFactorization};
use crate::error::{Error, Result};
use crate::gfield::poly::{self, Poly};
use crate::gfield::{Field, FieldTower, GFElement};
use crate::numth::{factorizer, IntFactorization};

/// Default bound on `q^n` for exhaustive enumeration.
pub const EXHAUSTIVE_BOUND: u64 = 100_000;

/// A tower together with the factorizations of `q^n - 1` and `x^n - 1`.
#[derive(Debug, Clone)]
pub struct FieldContext {
    pub tower: FieldTower,
    pub fact_q: IntFactorization,
    pub fact_x: PolyFactorization,
}

/// Order data of a nonzero element.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrderProfile {
    #[serde(with = "crate::serde_big::decimal")]
    pub mult_order: BigUint,
    #[serde(with = "crate::serde_big::decimal")]
    pub r: BigUint,
    pub fq_order: Poly<u64>,
    pub k: usize,
}

impl FieldContext {
    /// Factors `q^n - 1` with the shared factorizer and `x^n - 1` over F_q.
    pub fn new(tower: FieldTower) -> Result<Self> {
        let fact_q = factorizer::global().factorize_qn_minus_1(tower.q(), tower.n() as u64);
        Self::with_factorization(tower, fact_q)
    }

    pub fn with_factorization(tower: FieldTower, fact_q: IntFactorization) -> Result<Self> {
        if fact_q.value != tower.big_q() - 1u32 {
            return Err(Error::PreconditionFailed("factorization is not of q^n - 1".into()));
        }
        let fact_x = factor_xn1(tower.base(), tower.n())?;
        Ok(FieldContext { tower, fact_q, fact_x })
    }

    /// `q^n - 1`.
    pub fn group_order(&self) -> BigUint {
        self.tower.big_q() - 1u32
    }

    fn require_complete(&self) -> Result<()> {
        if self.fact_q.is_complete() {
            Ok(())
        } else {
            Err(Error::IncompleteFactorization(self.fact_q.value.to_string()))
        }
    }

    /// Multiplicative order, by stripping prime factors from `q^n - 1`.
    pub fn mult_order(&self, a: &GFElement) -> Result<BigUint> {
        let t = &self.tower;
        if t.is_zero(a) {
            return Err(Error::ZeroElement);
        }
        self.require_complete()?;
        let mut ord = self.group_order();
        for pp in &self.fact_q.factors {
            for _ in 0..pp.exponent {
                let cand = &ord / &pp.prime;
                if t.is_one(&t.pow(a, &cand)) {
                    ord = cand;
                } else {
                    break;
                }
            }
        }
        Ok(ord)
    }

    /// The `r` for which `a` is r-primitive: `(q^n - 1) / ord(a)`.
    pub fn r_index(&self, a: &GFElement) -> Result<BigUint> {
        Ok(self.group_order() / self.mult_order(a)?)
    }

    /// `g_a(x) = sum_i a^{q^i} x^{n-1-i}`, a polynomial over F_{q^n}.
    pub fn g_alpha(&self, a: &GFElement) -> Poly<GFElement> {
        let mut coeffs = self.tower.frobenius_orbit(a);
        coeffs.reverse();
        poly::trim(&self.tower, coeffs)
    }

    /// `x^n - 1` with coefficients in F_{q^n}.
    fn xn1_ext(&self) -> Poly<GFElement> {
        poly::x_n_minus_1(&self.tower, self.tower.n())
    }

    /// `deg gcd(x^n - 1, g_a)`; `n` for `a = 0`.
    pub fn normality_k(&self, a: &GFElement) -> usize {
        let g = self.g_alpha(a);
        if g.is_empty() {
            return self.tower.n();
        }
        let d = poly::gcd(&self.tower, &self.xn1_ext(), &g).expect("x^n - 1 is nonzero");
        poly::degree(&d).unwrap()
    }

    /// `f∘a = sum_i f_i a^{q^i}`.
    pub fn apply_poly(&self, f: &[u64], a: &GFElement) -> GFElement {
        let orbit = self.tower.frobenius_orbit(a);
        self.apply_with_orbit(f, &orbit)
    }

    fn apply_with_orbit(&self, f: &[u64], orbit: &[GFElement]) -> GFElement {
        let t = &self.tower;
        let n = t.n();
        let mut acc = t.zero();
        for (i, c) in f.iter().enumerate() {
            if *c != 0 {
                let term = t.mul(&t.embed(*c), &orbit[i % n]);
                acc = t.add(&acc, &term);
            }
        }
        acc
    }

    /// Exponent vector of the F_q-order over the irreducible factors of `x^n - 1`.
    pub fn fq_order_exponents(&self, a: &GFElement) -> Vec<u32> {
        let orbit = self.tower.frobenius_orbit(a);
        let fx = &self.fact_x;
        let mut exps = fx.multiplicities();
        for i in 0..exps.len() {
            while exps[i] > 0 {
                exps[i] -= 1;
                let h = fx.product(&exps).expect("explicit factorization");
                if !self.tower.is_zero(&self.apply_with_orbit(&h, &orbit)) {
                    exps[i] += 1;
                    break;
                }
            }
        }
        exps
    }

    /// Minimal monic `h | x^n - 1` with `h∘a = 0`.
    pub fn fq_order(&self, a: &GFElement) -> Poly<u64> {
        self.fact_x.product(&self.fq_order_exponents(a)).expect("explicit factorization")
    }

    /// `gcd(m, (q^n-1)/ord(a)) = 1`.
    pub fn is_m_free(&self, a: &GFElement, m: &BigUint) -> Result<bool> {
        let order = self.group_order();
        if m.is_zero() || !(&order % m).is_zero() {
            return Err(Error::InvalidM(m.to_string()));
        }
        let cof = &order / self.mult_order(a)?;
        Ok(m.gcd(&cof).is_one())
    }

    fn divisor_exponents(&self, g: &[u64]) -> Result<Vec<u32>> {
        match self.fact_x.exponents_of(g) {
            Ok(e) => Ok(e),
            Err(Error::NotMonic | Error::NotADivisor { .. }) => Err(Error::InvalidG),
            Err(e) => Err(e),
        }
    }

    /// `gcd(g, (x^n-1)/Ord(a)) = 1`.
    pub fn is_g_free(&self, a: &GFElement, g: &[u64]) -> Result<bool> {
        let ge = self.divisor_exponents(g)?;
        let oe = self.fq_order_exponents(a);
        let mult = self.fact_x.multiplicities();
        Ok(ge.iter().zip(oe.iter().zip(&mult)).all(|(&g, (&o, &m))| g == 0 || m == o))
    }

    fn check_exhaustive(&self, bound: u64) -> Result<u64> {
        let size = self.tower.big_q();
        match u64::try_from(size) {
            Ok(s) if s <= bound => Ok(s),
            _ => Err(Error::FieldTooLarge { size: size.to_string(), bound: bound.to_string() }),
        }
    }

    /// m-free elements by definition: nonzero `a` that is not `b^d` for any
    /// `1 != d | m`. Enumerates the whole field.
    pub fn m_free_set_definitional(&self, m: &BigUint) -> Result<HashSet<GFElement>> {
        let order = self.group_order();
        if m.is_zero() || !(&order % m).is_zero() {
            return Err(Error::InvalidM(m.to_string()));
        }
        self.check_exhaustive(EXHAUSTIVE_BOUND)?;
        let t = &self.tower;
        let nonzero: Vec<GFElement> = t.elements().into_iter().filter(|e| !t.is_zero(e)).collect();
        let mut powers = HashSet::new();
        let mut d = BigUint::from(2u32);
        while &d <= m {
            if (m % &d).is_zero() {
                powers.extend(nonzero.iter().map(|b| t.pow(b, &d)));
            }
            d += 1u32;
        }
        Ok(nonzero.into_iter().filter(|a| !powers.contains(a)).collect())
    }

    /// g-free elements by definition: `a` that is not `h∘b` for any monic
    /// `1 != h | g`. Enumerates the whole field.
    pub fn g_free_set_definitional(&self, g: &[u64]) -> Result<HashSet<GFElement>> {
        let ge = self.divisor_exponents(g)?;
        self.check_exhaustive(EXHAUSTIVE_BOUND)?;
        let t = &self.tower;
        let all = t.elements();
        let orbits: Vec<Vec<GFElement>> = all.iter().map(|b| t.frobenius_orbit(b)).collect();
        let mut images = HashSet::new();
        for exps in divisor_exponent_vectors(&ge) {
            if exps.iter().all(|&e| e == 0) {
                continue;
            }
            let h = self.fact_x.product(&exps)?;
            images.extend(orbits.iter().map(|o| self.apply_with_orbit(&h, o)));
        }
        Ok(all.into_iter().filter(|a| !images.contains(a)).collect())
    }

    /// Random search for a primitive element, certified by per-prime tests.
    pub fn find_primitive(&self, seed: u64) -> Result<GFElement> {
        self.require_complete()?;
        let t = &self.tower;
        let order = self.group_order();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        loop {
            let a = t.random(&mut rng);
            if t.is_zero(&a) {
                continue;
            }
            if self.fact_q.primes().all(|p| !t.is_one(&t.pow(&a, &(&order / p)))) {
                return Ok(a);
            }
        }
    }

    /// Random search for a normal element.
    pub fn find_normal(&self, seed: u64) -> GFElement {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        loop {
            let a = self.tower.random(&mut rng);
            if self.normality_k(&a) == 0 {
                return a;
            }
        }
    }

    /// `f∘b` for normal `b` and a monic divisor `f` of degree `k <= n - 1`;
    /// the result is k-normal.
    pub fn construct_k_normal(&self, b: &GFElement, f: &[u64]) -> Result<GFElement> {
        self.fact_x.exponents_of(f)?;
        let k = poly::degree(f).unwrap();
        if k >= self.tower.n() {
            return Err(Error::InvalidK { n: self.tower.n(), k });
        }
        if self.normality_k(b) != 0 {
            return Err(Error::NotNormal);
        }
        Ok(self.apply_poly(f, b))
    }

    /// `b^r` for primitive `b` and `r | q^n - 1`; the result is r-primitive.
    pub fn construct_r_primitive(&self, b: &GFElement, r: &BigUint) -> Result<GFElement> {
        let order = self.group_order();
        if r.is_zero() || !(&order % r).is_zero() {
            return Err(Error::InvalidR(r.to_string()));
        }
        if self.tower.is_zero(b) || self.mult_order(b)? != order {
            return Err(Error::NotPrimitive);
        }
        Ok(self.tower.pow(b, r))
    }

    pub fn order_profile(&self, a: &GFElement) -> Result<OrderProfile> {
        let mult_order = self.mult_order(a)?;
        let fq_order = self.fq_order(a);
        Ok(OrderProfile {
            r: self.group_order() / &mult_order,
            k: self.tower.n() - poly::degree(&fq_order).unwrap(),
            mult_order,
            fq_order,
        })
    }

    /// `N_{r,f}(m, g)`: pairs `(a, b)` with `a` m-free (nonzero), `b` g-free and
    /// `a^r = f∘b`, counted by full enumeration (joined on the common value).
    pub fn count_pairs(&self, r: &BigUint, f: &[u64], m: &BigUint, g: &[u64], bound: u64) -> Result<BigUint> {
        self.check_exhaustive(bound)?;
        let ge = self.divisor_exponents(g)?;
        let mult = self.fact_x.multiplicities();
        let t = &self.tower;
        let all = t.elements();
        let mut by_value: HashMap<GFElement, u64> = HashMap::new();
        for b in &all {
            let oe = self.fq_order_exponents(b);
            let free = ge.iter().zip(oe.iter().zip(&mult)).all(|(&g, (&o, &m))| g == 0 || m == o);
            if free {
                *by_value.entry(self.apply_poly(f, b)).or_default() += 1;
            }
        }
        let mut total = 0u64;
        for a in all.iter().filter(|a| !t.is_zero(a)) {
            if self.is_m_free(a, m)? {
                total += by_value.get(&t.pow(a, r)).copied().unwrap_or(0);
            }
        }
        Ok(BigUint::from(total))
    }
}

/// Every exponent vector bounded componentwise by `bound`.
pub fn divisor_exponent_vectors(bound: &[u32]) -> Vec<Vec<u32>> {
    let mut out: Vec<Vec<u32>> = vec![Vec::new()];
    for &b in bound {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..=b).map(move |e| {
                    let mut w = v.clone();
                    w.push(e);
                    w
                })
            })
            .collect();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gfield::make_tower;

    fn f9() -> FieldContext {
        FieldContext::new(make_tower(3, 1, 2, 0).unwrap()).unwrap()
    }

    #[test]
    fn orders_in_f9() {
        let c = f9();
        let t = &c.tower;
        let two = t.embed(2);
        assert_eq!(c.mult_order(&t.one()).unwrap(), BigUint::from(1u32));
        assert_eq!(c.mult_order(&two).unwrap(), BigUint::from(2u32));
        assert_eq!(c.r_index(&two).unwrap(), BigUint::from(4u32));
        assert_eq!(c.mult_order(&t.zero()), Err(Error::ZeroElement));
        let g = c.find_primitive(1).unwrap();
        assert_eq!(c.mult_order(&g).unwrap(), BigUint::from(8u32));
        let g2 = t.mul(&g, &g);
        assert_eq!(c.mult_order(&g2).unwrap(), BigUint::from(4u32));
        assert_eq!(c.r_index(&g2).unwrap(), BigUint::from(2u32));
        assert_eq!(t.pow_u64(&g, 4), t.embed(2));
    }

    #[test]
    fn g_alpha_and_normality() {
        let c = f9();
        let t = &c.tower;
        for a in 1..3 {
            let e = t.embed(a);
            assert_eq!(c.g_alpha(&e), vec![e.clone(), e.clone()]);
            assert_eq!(c.normality_k(&e), 1);
            assert_eq!(c.fq_order(&e), vec![2, 1]);
        }
        assert!(c.g_alpha(&t.zero()).is_empty());
        assert_eq!(c.normality_k(&t.zero()), 2);
        assert_eq!(c.fq_order(&t.zero()), vec![1]);
        // a^2 = -1: a^3 = -a so g_a = a(x - 1)
        let i = t.elements().into_iter().find(|a| t.mul(a, a) == t.embed(2)).unwrap();
        assert_eq!(c.g_alpha(&i), vec![t.neg(&i), i.clone()]);
        assert_eq!(c.normality_k(&i), 1);
        let nb = c.find_normal(3);
        assert_eq!(c.fq_order(&nb), poly::x_n_minus_1(t.base(), 2));
    }

    #[test]
    fn constructions() {
        let c = f9();
        let b = c.find_normal(0);
        assert_eq!(c.construct_k_normal(&b, &[1]).unwrap(), b);
        let a = c.construct_k_normal(&b, &[1, 1]).unwrap();
        assert_eq!(c.normality_k(&a), 1);
        assert_eq!(c.construct_k_normal(&c.tower.embed(1), &[1, 1]), Err(Error::NotNormal));
        assert_eq!(c.construct_k_normal(&b, &[2, 0, 1]), Err(Error::InvalidK { n: 2, k: 2 }));
        let g = c.find_primitive(0).unwrap();
        let r2 = c.construct_r_primitive(&g, &BigUint::from(2u32)).unwrap();
        assert_eq!(c.mult_order(&r2).unwrap(), BigUint::from(4u32));
        assert_eq!(c.construct_r_primitive(&g, &BigUint::from(8u32)).unwrap(), c.tower.one());
        assert_eq!(c.construct_r_primitive(&g, &BigUint::from(3u32)), Err(Error::InvalidR("3".into())));
        assert_eq!(c.construct_r_primitive(&r2, &BigUint::from(2u32)), Err(Error::NotPrimitive));
    }

    #[test]
    fn pair_counts_f9() {
        let c = f9();
        let one = BigUint::one();
        let eight = BigUint::from(8u32);
        let xn1 = [2, 0, 1];
        assert_eq!(c.count_pairs(&one, &[1], &one, &[1], EXHAUSTIVE_BOUND).unwrap(), BigUint::from(8u32));
        assert_eq!(c.count_pairs(&one, &[1], &eight, &xn1, EXHAUSTIVE_BOUND).unwrap(), BigUint::from(4u32));
        let two = BigUint::from(2u32);
        assert_eq!(c.count_pairs(&two, &[1, 1], &eight, &xn1, EXHAUSTIVE_BOUND).unwrap(), BigUint::zero());
        assert!(matches!(c.count_pairs(&one, &[1], &one, &[1], 5), Err(Error::FieldTooLarge { .. })));
    }

    #[test]
    fn freeness_edge_cases() {
        let c = f9();
        let t = &c.tower;
        let g = c.find_primitive(2).unwrap();
        let g2 = t.mul(&g, &g);
        assert!(c.is_m_free(&g2, &BigUint::one()).unwrap());
        assert!(!c.is_m_free(&g2, &BigUint::from(2u32)).unwrap());
        assert_eq!(c.is_m_free(&g, &BigUint::from(3u32)), Err(Error::InvalidM("3".into())));
        assert!(c.is_g_free(&t.zero(), &[1]).unwrap());
        assert!(!c.is_g_free(&t.zero(), &[1, 1]).unwrap());
        assert_eq!(c.is_g_free(&g, &[1, 0, 1]), Err(Error::InvalidG));
        let nb = c.find_normal(1);
        assert!(c.is_g_free(&nb, &[2, 0, 1]).unwrap());
    }
}
