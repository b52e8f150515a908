//! Integer factorization: trial division, Brent's variant of Pollard rho, and
//! the [`IntFactorization`] type that records partial results.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::primes::{primality, small_primes, Primality, TRIAL_BOUND};
use crate::error::{Error, Result};

/// A prime factor and its multiplicity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimePower {
    #[serde(with = "crate::serde_big::decimal")]
    pub prime: BigUint,
    pub exponent: u32,
    /// `Prime` when proven, `ProbablePrime` above the deterministic range.
    pub primality: Primality,
}

/// Complete or partial factorization `value = cofactor * prod(prime^exponent)`.
///
/// A cofactor of 1 means the factorization is complete. Otherwise the cofactor
/// is composite (or at least unproven) and has no prime factor below `bound`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntFactorization {
    #[serde(with = "crate::serde_big::decimal")]
    pub value: BigUint,
    pub factors: Vec<PrimePower>,
    #[serde(with = "crate::serde_big::decimal")]
    pub cofactor: BigUint,
    pub bound: u64,
}

/// Effort limits for [`factorize`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FactorBudget {
    pub trial_bound: u64,
    /// Pollard-rho iterations spent on each composite before giving up.
    pub rho_iterations: u64,
}

impl Default for FactorBudget {
    fn default() -> Self {
        FactorBudget { trial_bound: TRIAL_BOUND, rho_iterations: 1 << 22 }
    }
}

impl IntFactorization {
    /// Builds a factorization from loose parts, merging repeated primes and
    /// sorting them. Primality of each prime is tested here.
    pub fn from_parts<I>(value: BigUint, primes: I, cofactor: BigUint, bound: u64) -> Self
    where
        I: IntoIterator<Item = (BigUint, u32)>,
    {
        let mut map: BTreeMap<BigUint, u32> = BTreeMap::new();
        for (p, e) in primes {
            if e > 0 {
                *map.entry(p).or_default() += e;
            }
        }
        let factors = map
            .into_iter()
            .map(|(prime, exponent)| {
                let primality = primality(&prime);
                PrimePower { prime, exponent, primality }
            })
            .collect();
        IntFactorization { value, factors, cofactor, bound }
    }

    pub fn one() -> Self {
        IntFactorization { value: BigUint::one(), factors: Vec::new(), cofactor: BigUint::one(), bound: TRIAL_BOUND }
    }

    pub fn is_complete(&self) -> bool {
        self.cofactor.is_one()
    }

    /// True when some listed prime is only a probable prime.
    pub fn has_probable_primes(&self) -> bool {
        self.factors.iter().any(|f| f.primality == Primality::ProbablePrime)
    }

    pub fn primes(&self) -> impl Iterator<Item = &BigUint> {
        self.factors.iter().map(|f| &f.prime)
    }

    pub fn exponent_of(&self, p: &BigUint) -> u32 {
        self.factors.iter().find(|f| &f.prime == p).map_or(0, |f| f.exponent)
    }

    /// Bounds on the number of distinct prime divisors of `value`.
    ///
    /// An unfactored cofactor `C > 1` with no prime factor below `B` contributes
    /// at least one and at most `floor(log C / log B)` distinct primes.
    pub fn omega_bounds(&self) -> (u64, u64) {
        let known = self.factors.len() as u64;
        if self.cofactor.is_one() {
            return (known, known);
        }
        let extra = (ln_big(&self.cofactor) / (self.bound.max(2) as f64).ln()).floor().max(1.0) as u64;
        (known + 1, known + extra)
    }

    /// Checks the structural invariants: the product matches and primes are
    /// strictly increasing and pass a primality test.
    pub fn validate(&self) -> Result<()> {
        let mut product = self.cofactor.clone();
        let mut last: Option<&BigUint> = None;
        for f in &self.factors {
            if let Some(prev) = last {
                if prev >= &f.prime {
                    return Err(Error::Parse(format!("primes not increasing at {}", f.prime)));
                }
            }
            if f.exponent == 0 || !primality(&f.prime).is_prime() {
                return Err(Error::Parse(format!("{} is not a prime factor", f.prime)));
            }
            product *= f.prime.pow(f.exponent);
            last = Some(&f.prime);
        }
        if product != self.value {
            return Err(Error::Parse(format!("factors do not multiply to {}", self.value)));
        }
        Ok(())
    }

    /// Factorization of the product `self.value * other.value`.
    pub fn merge(&self, other: &IntFactorization) -> IntFactorization {
        let primes = self
            .factors
            .iter()
            .chain(other.factors.iter())
            .map(|f| (f.prime.clone(), f.exponent));
        let mut merged = IntFactorization::from_parts(
            &self.value * &other.value,
            primes,
            &self.cofactor * &other.cofactor,
            self.bound.min(other.bound),
        );
        merged.absorb_cofactor_primes();
        merged
    }

    /// Divides known primes out of the cofactor (merging can leave a known
    /// prime hidden inside another piece's cofactor).
    fn absorb_cofactor_primes(&mut self) {
        if self.cofactor.is_one() {
            return;
        }
        for f in &mut self.factors {
            while (&self.cofactor % &f.prime).is_zero() {
                self.cofactor /= &f.prime;
                f.exponent += 1;
            }
        }
    }

    /// Factorization of `value / d`, where every prime of `d` is listed here
    /// with at least the same multiplicity.
    pub fn divide(&self, d: &BigUint) -> Result<IntFactorization> {
        if d.is_zero() || !(&self.value % d).is_zero() {
            return Err(Error::InvalidR(d.to_string()));
        }
        let mut rest = d.clone();
        let mut factors = Vec::new();
        for f in &self.factors {
            let mut e = f.exponent;
            while e > 0 && (&rest % &f.prime).is_zero() {
                rest /= &f.prime;
                e -= 1;
            }
            if e > 0 {
                factors.push(PrimePower { prime: f.prime.clone(), exponent: e, primality: f.primality });
            }
        }
        if !rest.is_one() {
            if self.cofactor.is_one() {
                return Err(Error::InvalidR(d.to_string()));
            }
            return Err(Error::IncompleteFactorization(self.value.to_string()));
        }
        Ok(IntFactorization { value: &self.value / d, factors, cofactor: self.cofactor.clone(), bound: self.bound })
    }

    /// All positive divisors, for complete factorizations with few divisors.
    pub fn divisors(&self) -> Result<Vec<BigUint>> {
        if !self.is_complete() {
            return Err(Error::IncompleteFactorization(self.value.to_string()));
        }
        let mut out = vec![BigUint::one()];
        for f in &self.factors {
            let mut next = Vec::with_capacity(out.len() * (f.exponent as usize + 1));
            for d in &out {
                let mut pk = d.clone();
                next.push(pk.clone());
                for _ in 0..f.exponent {
                    pk *= &f.prime;
                    next.push(pk.clone());
                }
            }
            out = next;
        }
        out.sort();
        Ok(out)
    }
}

impl fmt::Display for IntFactorization {
    /// Factor-table line format: `N = p1^e1 * p2 * ... * C?`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} =", self.value)?;
        let mut first = true;
        let mut sep = |f: &mut fmt::Formatter<'_>| -> fmt::Result {
            let s = if first { " " } else { " * " };
            first = false;
            f.write_str(s)
        };
        if self.value.is_one() {
            return write!(f, " 1");
        }
        for pp in &self.factors {
            sep(f)?;
            if pp.exponent == 1 {
                write!(f, "{}", pp.prime)?;
            } else {
                write!(f, "{}^{}", pp.prime, pp.exponent)?;
            }
        }
        if !self.cofactor.is_one() {
            sep(f)?;
            write!(f, "{}?", self.cofactor)?;
        }
        Ok(())
    }
}

/// Natural log of a big integer as f64 (used only for coarse bounds).
pub(crate) fn ln_big(n: &BigUint) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        return n.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    (n >> shift).to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
}

/// Divides out all primes below `bound`; returns found prime powers and the rest.
pub(crate) fn trial_divide(n: &BigUint, bound: u64) -> (Vec<(BigUint, u32)>, BigUint) {
    let mut rest = n.clone();
    let mut found = Vec::new();
    for &p in small_primes().iter().take_while(|&&p| p < bound) {
        if rest.is_one() {
            break;
        }
        if let Some(r) = rest.to_u64() {
            if p * p > r {
                if r > 1 {
                    found.push((BigUint::from(r), 1));
                    rest = BigUint::one();
                }
                break;
            }
        }
        if (&rest % p).is_zero() {
            let mut e = 0;
            while (&rest % p).is_zero() {
                rest /= p;
                e += 1;
            }
            found.push((BigUint::from(p), e));
        }
    }
    (found, rest)
}

fn rho_u64(n: u64, c: u64, budget: u64) -> Option<u64> {
    let f = |x: u64| ((x as u128 * x as u128 + c as u128) % n as u128) as u64;
    let (mut y, mut r, mut q, mut g) = (2u64, 1u64, 1u64, 1u64);
    let mut x = y;
    let mut ys = y;
    let m = 128u64;
    let mut spent = 0u64;
    while g == 1 {
        x = y;
        for _ in 0..r {
            y = f(y);
        }
        let mut k = 0;
        while k < r && g == 1 {
            ys = y;
            for _ in 0..m.min(r - k) {
                y = f(y);
                q = ((q as u128 * x.abs_diff(y) as u128) % n as u128) as u64;
            }
            g = q.gcd(&n);
            k += m;
            spent += m;
        }
        r *= 2;
        if spent > budget {
            return None;
        }
    }
    if g == n {
        loop {
            ys = f(ys);
            g = x.abs_diff(ys).gcd(&n);
            if g > 1 {
                break;
            }
        }
    }
    (g != n).then_some(g)
}

fn rho_big(n: &BigUint, c: u64, budget: u64) -> Option<BigUint> {
    let c = BigUint::from(c);
    let f = |x: &BigUint| (x * x + &c) % n;
    let diff = |a: &BigUint, b: &BigUint| if a > b { a - b } else { b - a };
    let mut y = BigUint::from(2u32);
    let mut x = y.clone();
    let mut ys = y.clone();
    let mut q = BigUint::one();
    let mut g = BigUint::one();
    let mut r = 1u64;
    let m = 128u64;
    let mut spent = 0u64;
    while g.is_one() {
        x = y.clone();
        for _ in 0..r {
            y = f(&y);
        }
        let mut k = 0;
        while k < r && g.is_one() {
            ys = y.clone();
            for _ in 0..m.min(r - k) {
                y = f(&y);
                q = (&q * diff(&x, &y)) % n;
            }
            g = q.gcd(n);
            k += m;
            spent += m;
        }
        r *= 2;
        if spent > budget {
            return None;
        }
    }
    if &g == n {
        loop {
            ys = f(&ys);
            g = diff(&x, &ys).gcd(n);
            if !g.is_one() {
                break;
            }
        }
    }
    (&g != n).then_some(g)
}

/// Finds a nontrivial divisor of composite `n` with Brent's rho, trying
/// several polynomial constants within the iteration budget.
pub fn brent_rho(n: &BigUint, budget: u64) -> Option<BigUint> {
    if n.is_even() {
        return Some(BigUint::from(2u32));
    }
    let per_try = (budget / 4).max(1 << 10);
    let mut spent = 0;
    for c in 1u64.. {
        if spent >= budget {
            return None;
        }
        let found = match n.to_u64() {
            Some(small) => rho_u64(small, c, per_try).map(BigUint::from),
            None => rho_big(n, c, per_try),
        };
        if found.is_some() {
            return found;
        }
        spent += per_try;
    }
    None
}

/// Splits `rest` (no prime factor below `bound`) into primes with rho; whatever
/// resists within the budget goes into the returned cofactor.
pub(crate) fn split_with_rho(rest: BigUint, bound: u64, budget: u64) -> (Vec<(BigUint, u32)>, BigUint) {
    let mut primes = Vec::new();
    let mut cofactor = BigUint::one();
    let b2 = BigUint::from(bound) * bound;
    let mut stack = vec![rest];
    while let Some(m) = stack.pop() {
        if m.is_one() {
            continue;
        }
        if m < b2 || primality(&m).is_prime() {
            primes.push((m, 1));
            continue;
        }
        match brent_rho(&m, budget) {
            Some(d) => {
                let other = &m / &d;
                stack.push(d);
                stack.push(other);
            }
            None => cofactor *= m,
        }
    }
    (primes, cofactor)
}

/// Factors `n >= 1` by trial division and Brent-rho within `budget`.
/// Incompleteness is recorded in the cofactor rather than reported as an error.
pub fn factorize(n: &BigUint, budget: FactorBudget) -> IntFactorization {
    assert!(!n.is_zero(), "factorize requires n >= 1");
    let (mut primes, rest) = trial_divide(n, budget.trial_bound);
    let (more, cofactor) = split_with_rho(rest, budget.trial_bound, budget.rho_iterations);
    primes.extend(more);
    IntFactorization::from_parts(n.clone(), primes, cofactor, budget.trial_bound)
}
