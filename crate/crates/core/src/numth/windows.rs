//! Prime windows `(2^t, 2^{t+u})`, the product constants `A_{t,u}`, and
//! primes in a residue class with running sums and products.

use num_bigint::BigUint;
use num_rational::Ratio;
use num_traits::{One, ToPrimitive, Zero};

use super::bigreal::BigReal;
use super::primes::{is_prime_u64, sieve_primes, SIEVE_CAPACITY};
use crate::error::{Error, Result};

/// Primes strictly inside `(2^t, 2^{t+u})`.
#[derive(Debug, Clone)]
pub struct PrimeWindow {
    pub primes: Vec<u64>,
    /// Sum of reciprocals of the window primes.
    pub inverse_sum: BigReal,
}

impl PrimeWindow {
    pub fn count(&self) -> usize {
        self.primes.len()
    }
}

fn check_tu(t: &BigReal, u: &BigReal) -> Result<()> {
    if !t.is_positive() {
        return Err(Error::PreconditionFailed(format!("t > 0 (t = {t})")));
    }
    if u.partial_cmp(&BigReal::zero(u.precision())) == Some(std::cmp::Ordering::Less) {
        return Err(Error::PreconditionFailed(format!("u >= 0 (u = {u})")));
    }
    Ok(())
}

/// Integer sieve limit covering `x`, or an error when it exceeds `capacity`.
fn sieve_limit(x: &BigReal, capacity: u64) -> Result<u64> {
    let limit = x.ceil_biguint();
    match limit.to_u64() {
        Some(l) if l <= capacity => Ok(l),
        _ => Err(Error::WindowTooLarge { upper: x.to_sci(6), capacity }),
    }
}

pub fn primes_in_window(t: &BigReal, u: &BigReal) -> Result<PrimeWindow> {
    primes_in_window_with_capacity(t, u, SIEVE_CAPACITY)
}

pub fn primes_in_window_with_capacity(t: &BigReal, u: &BigReal, capacity: u64) -> Result<PrimeWindow> {
    check_tu(t, u)?;
    let p = t.precision().max(u.precision());
    let lo = BigReal::pow2(t);
    let hi = BigReal::pow2(&(t + u));
    let limit = sieve_limit(&hi, capacity)?;
    // p > lo  <=>  p > floor(lo);   p < hi  <=>  p < ceil(hi)
    let lo_floor = lo.floor_biguint().to_u64().unwrap();
    let primes: Vec<u64> = sieve_primes(limit).into_iter().filter(|&q| q > lo_floor && q < limit).collect();
    let mut inverse_sum = BigReal::zero(p);
    for &q in &primes {
        inverse_sum = &inverse_sum + &BigReal::from_u64(q, p).recip();
    }
    Ok(PrimeWindow { primes, inverse_sum })
}

/// `A_{t,u} = prod_{primes w < 2^t} 2 / w^{1/(t+u)}`; with `u = 0` this is `A_t`.
pub fn a_constant(t: &BigReal, u: &BigReal) -> Result<BigReal> {
    check_tu(t, u)?;
    let p = t.precision().max(u.precision());
    let bound = BigReal::pow2(t);
    let limit = sieve_limit(&bound, SIEVE_CAPACITY)?;
    let below: Vec<u64> = sieve_primes(limit).into_iter().filter(|&q| BigReal::from_u64(q, p) < bound).collect();
    if below.is_empty() {
        return Ok(BigReal::one(p));
    }
    let primorial: BigUint = below.iter().map(|&q| BigUint::from(q)).product();
    // exp(count * ln 2 - ln(primorial) / (t + u))
    let count = BigReal::from_u64(below.len() as u64, p);
    let exponent = &(&count * &BigReal::ln2(p)) - &(&BigReal::from_biguint(&primorial, p).ln() / &(t + u));
    Ok(exponent.exp())
}

/// Ascending primes `≡ 1 (mod modulus)` with exact running inverse sums and
/// running products: `partial_sums[k]` and `partial_products[k]` cover the
/// first `k + 1` primes.
#[derive(Debug, Clone)]
pub struct CongruentPrimes {
    pub modulus: u64,
    pub primes: Vec<u64>,
    pub partial_sums: Vec<Ratio<BigUint>>,
    pub partial_products: Vec<BigUint>,
}

/// How far to enumerate in [`primes_one_mod`].
#[derive(Debug, Clone)]
pub enum CongruentLimit {
    /// The first `n` primes.
    Count(usize),
    /// Every prefix whose product is at most the bound.
    ProductAtMost(BigUint),
}

impl CongruentPrimes {
    /// Number of primes listed.
    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    /// Inverse sum of the first `k` primes (0 for `k = 0`).
    pub fn sum_of_first(&self, k: usize) -> Ratio<BigUint> {
        if k == 0 {
            Ratio::zero()
        } else {
            self.partial_sums[k - 1].clone()
        }
    }

    /// Product of the first `k` primes (1 for `k = 0`).
    pub fn product_of_first(&self, k: usize) -> BigUint {
        if k == 0 {
            BigUint::one()
        } else {
            self.partial_products[k - 1].clone()
        }
    }
}

pub fn primes_one_mod(modulus: u64, limit: CongruentLimit) -> CongruentPrimes {
    assert!(modulus >= 1);
    let mut out = CongruentPrimes { modulus, primes: Vec::new(), partial_sums: Vec::new(), partial_products: Vec::new() };
    let mut sum = Ratio::<BigUint>::zero();
    let mut product = BigUint::one();
    let mut candidate = 1u64;
    loop {
        match &limit {
            CongruentLimit::Count(n) if out.primes.len() >= *n => break,
            _ => {}
        }
        candidate += modulus;
        if !is_prime_u64(candidate) {
            continue;
        }
        let next_product = &product * candidate;
        if let CongruentLimit::ProductAtMost(bound) = &limit {
            if &next_product > bound {
                break;
            }
        }
        product = next_product;
        sum += Ratio::new(BigUint::one(), BigUint::from(candidate));
        out.primes.push(candidate);
        out.partial_sums.push(sum.clone());
        out.partial_products.push(product.clone());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: usize = 256;

    fn r(s: &str) -> BigReal {
        BigReal::parse(s, P).unwrap()
    }

    #[test]
    fn empty_window() {
        let w = primes_in_window(&r("1"), &r("0.58")).unwrap();
        assert_eq!(w.count(), 0);
        assert!(w.inverse_sum.is_zero());
        // 2^1.585 is just above 3, so 3 lies inside this window
        assert_eq!(primes_in_window(&r("1"), &r("0.585")).unwrap().primes, vec![3]);
        assert_eq!(primes_in_window(&r("5"), &r("0")).unwrap().count(), 0);
    }

    #[test]
    fn window_matches_direct_count() {
        let w = primes_in_window(&r("6"), &r("7")).unwrap();
        let direct: Vec<u64> = (65u64..8192).filter(|&n| (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0)).collect();
        assert_eq!(w.primes, direct);
        let s: f64 = direct.iter().map(|&p| 1.0 / p as f64).sum();
        assert!((w.inverse_sum.to_f64() - s).abs() < 1e-12);
    }

    #[test]
    fn window_capacity() {
        let e = primes_in_window_with_capacity(&r("10"), &r("11"), 1 << 20).unwrap_err();
        assert!(matches!(e, Error::WindowTooLarge { capacity, .. } if capacity == 1 << 20));
        assert!(primes_in_window(&r("8.5"), &r("9.5")).is_ok());
        assert!(primes_in_window(&r("0"), &r("1")).is_err());
    }

    #[test]
    fn a_constant_small_t() {
        assert_eq!(a_constant(&r("0.5"), &r("0")).unwrap(), BigReal::one(P));
        // 2^1 = 2 is not below 2^1
        assert_eq!(a_constant(&r("1"), &r("0")).unwrap(), BigReal::one(P));
        // t = 2: primes 2, 3 -> 4 / 6^{1/2}
        let a = a_constant(&r("2"), &r("0")).unwrap();
        assert!((a.to_f64() - 4.0 / 6f64.sqrt()).abs() < 1e-12);
        let b = a_constant(&r("2"), &r("1")).unwrap();
        assert!((b.to_f64() - 4.0 / 6f64.cbrt()).abs() < 1e-12);
    }

    #[test]
    fn a_constant_increasing_beyond_two() {
        let mut last = a_constant(&r("2"), &r("0")).unwrap();
        for k in 1..=50 {
            let t = r(&format!("{}", 2.0 + 0.3 * k as f64));
            let a = a_constant(&t, &r("0")).unwrap();
            assert!(a > last, "t = {t}");
            last = a;
        }
    }

    #[test]
    fn congruent_primes() {
        let c = primes_one_mod(7, CongruentLimit::Count(5));
        assert_eq!(c.primes, vec![29, 43, 71, 113, 127]);
        assert_eq!(c.product_of_first(2), BigUint::from(29u32 * 43));
        assert_eq!(c.sum_of_first(1), Ratio::new(BigUint::one(), BigUint::from(29u32)));
        let bounded = primes_one_mod(7, CongruentLimit::ProductAtMost(BigUint::from(29u32 * 43 * 71)));
        assert_eq!(bounded.len(), 3);
        let bounded = primes_one_mod(7, CongruentLimit::ProductAtMost(BigUint::from(29u32 * 43 * 71 - 1)));
        assert_eq!(bounded.len(), 2);
    }
}
