//! Multiplicative arithmetic functions on factorizations.

use num_bigint::BigUint;
use num_rational::Ratio;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::factor::IntFactorization;
use crate::error::{Error, Result};

/// Euler's totient from a complete factorization.
pub fn euler_phi(f: &IntFactorization) -> Result<BigUint> {
    if !f.is_complete() {
        return Err(Error::IncompleteFactorization(f.value.to_string()));
    }
    Ok(f.factors
        .iter()
        .map(|pp| (&pp.prime - 1u32) * pp.prime.pow(pp.exponent - 1))
        .product())
}

/// Number of squarefree divisors, `2^omega`, for a complete factorization.
pub fn w_int(f: &IntFactorization) -> Result<BigUint> {
    if !f.is_complete() {
        return Err(Error::IncompleteFactorization(f.value.to_string()));
    }
    Ok(BigUint::one() << f.factors.len())
}

/// `W` of a possibly incomplete factorization as an interval `[lower, upper]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WBound {
    #[serde(with = "crate::serde_big::decimal")]
    pub lower: BigUint,
    #[serde(with = "crate::serde_big::decimal")]
    pub upper: BigUint,
}

impl WBound {
    pub fn exact(w: BigUint) -> Self {
        WBound { lower: w.clone(), upper: w }
    }

    pub fn is_exact(&self) -> bool {
        self.lower == self.upper
    }
}

pub fn w_int_bounds(f: &IntFactorization) -> WBound {
    let (lo, hi) = f.omega_bounds();
    WBound { lower: BigUint::one() << lo, upper: BigUint::one() << hi }
}

/// Sorted divisors of a machine integer.
pub fn divisors_u64(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// Moebius function of a machine integer.
pub fn mobius_u64(mut n: u64) -> i32 {
    let mut sign = 1;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            sign = -sign;
        }
        p += 1;
    }
    if n > 1 {
        sign = -sign;
    }
    sign
}

/// Integer value of the d-th cyclotomic polynomial at `q`, via
/// `Phi_d(q) = prod_{e | d} (q^e - 1)^{mu(d/e)}`.
pub fn cyclotomic_value(d: u64, q: &BigUint) -> BigUint {
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for e in divisors_u64(d) {
        let term = q.pow(e as u32) - 1u32;
        match mobius_u64(d / e) {
            1 => num *= term,
            -1 => den *= term,
            _ => {}
        }
    }
    num / den
}

/// Splits a prime power `q = p^s` with `p` a machine-size prime.
pub fn prime_power(q: &BigUint) -> Result<(u64, u32)> {
    let bad = || Error::NotPrimePower(q.to_string());
    if *q < BigUint::from(2u32) {
        return Err(bad());
    }
    let max_s = q.bits() as u32;
    for s in (1..=max_s).rev() {
        let root = q.nth_root(s);
        if root < BigUint::from(2u32) || &root.pow(s) != q {
            continue;
        }
        return match root.to_u64() {
            Some(p) if super::primes::is_prime_u64(p) => Ok((p, s)),
            _ => Err(bad()),
        };
    }
    Err(bad())
}

/// Parses a non-negative decimal such as `1310.0623`, `4.22e1109` or `1e5`
/// into an exact rational.
pub fn parse_decimal(text: &str) -> Result<Ratio<BigUint>> {
    let bad = || Error::Parse(format!("not a decimal: {text:?}"));
    let s = text.trim();
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i64>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    let digits = format!("{int_part}{frac_part}");
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let num: BigUint = digits.parse().map_err(|_| bad())?;
    let shift = exp - frac_part.len() as i64;
    let ten = BigUint::from(10u32);
    Ok(if shift >= 0 {
        Ratio::from_integer(num * ten.pow(shift as u32))
    } else {
        Ratio::new(num, ten.pow((-shift) as u32))
    })
}

/// Ratio as a decimal string with `sig` significant figures (truncated).
pub fn ratio_to_sci(x: &Ratio<BigUint>, sig: u32) -> String {
    if x.is_zero() {
        return "0".into();
    }
    let p = 64 + 4 * sig as usize;
    super::bigreal::BigReal::from_ratio(x.numer(), x.denom(), p).to_sci(sig)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numth::factor::{factorize, FactorBudget};
    use num_integer::Integer;
    use proptest::prelude::*;

    fn fac(n: u64) -> IntFactorization {
        factorize(&BigUint::from(n), FactorBudget::default())
    }

    #[test]
    fn phi_values() {
        assert_eq!(euler_phi(&fac(1)).unwrap(), BigUint::from(1u32));
        assert_eq!(euler_phi(&fac(8)).unwrap(), BigUint::from(4u32));
        let units = (1u64..80).filter(|a| a.gcd(&80) == 1).count();
        assert_eq!(euler_phi(&fac(80)).unwrap(), BigUint::from(units));
        let big = fac(11u64.pow(8) - 1);
        assert!(euler_phi(&big).unwrap() < big.value);
    }

    #[test]
    fn w_values() {
        assert_eq!(w_int(&fac(1)).unwrap(), BigUint::from(1u32));
        assert_eq!(w_int(&fac(12)).unwrap(), BigUint::from(4u32));
        let squarefree = (1u64..=1023).filter(|d| 1023 % d == 0 && (2..=*d).all(|p| d % (p * p) != 0)).count();
        assert_eq!(w_int(&fac(1023)).unwrap(), BigUint::from(squarefree));
        assert_eq!(squarefree, 8);
    }

    #[test]
    fn incomplete_w_is_an_interval() {
        let n = BigUint::from(6u32) * 1_000_003u64 * 1_000_033u64;
        let f = factorize(&n, FactorBudget { trial_bound: 1000, rho_iterations: 0 });
        assert!(!f.is_complete());
        assert!(matches!(w_int(&f), Err(Error::IncompleteFactorization(_))));
        let b = w_int_bounds(&f);
        assert_eq!(b.lower, BigUint::from(8u32));
        assert!(b.upper >= BigUint::from(16u32));
    }

    #[test]
    fn cyclotomic_small() {
        let q = BigUint::from(11u32);
        assert_eq!(cyclotomic_value(1, &q), BigUint::from(10u32));
        assert_eq!(cyclotomic_value(2, &q), BigUint::from(12u32));
        assert_eq!(cyclotomic_value(4, &q), BigUint::from(122u32));
        assert_eq!(cyclotomic_value(6, &q), BigUint::from(111u32));
        assert_eq!(mobius_u64(1), 1);
        assert_eq!(mobius_u64(30), -1);
        assert_eq!(mobius_u64(12), 0);
        assert_eq!(divisors_u64(12), vec![1, 2, 3, 4, 6, 12]);
    }

    proptest! {
        #[test]
        fn phi_bounded_by_value(n in 1u64..10_000_000) {
            let f = fac(n);
            let phi = euler_phi(&f).unwrap();
            prop_assert!(phi <= f.value);
            prop_assert_eq!(phi == f.value, n == 1);
        }

        #[test]
        fn w_multiplicative(a in 1u64..100_000, b in 1u64..100_000) {
            prop_assume!(a.gcd(&b) == 1);
            let lhs = w_int(&fac(a * b)).unwrap();
            prop_assert_eq!(lhs, w_int(&fac(a)).unwrap() * w_int(&fac(b)).unwrap());
        }
    }

    #[test]
    fn prime_powers() {
        assert_eq!(prime_power(&BigUint::from(32u32)).unwrap(), (2, 5));
        assert_eq!(prime_power(&BigUint::from(11u32).pow(20)).unwrap(), (11, 20));
        assert_eq!(prime_power(&BigUint::from(7u32)).unwrap(), (7, 1));
        for bad in [0u32, 1, 6, 12, 36, 100] {
            assert!(matches!(prime_power(&BigUint::from(bad)), Err(Error::NotPrimePower(_))));
        }
    }

    #[test]
    fn decimals() {
        let r = |n: u64, d: u64| Ratio::new(BigUint::from(n), BigUint::from(d));
        assert_eq!(parse_decimal("1310.0623").unwrap(), r(13100623, 10000));
        assert_eq!(parse_decimal("1e5").unwrap(), r(100000, 1));
        assert_eq!(parse_decimal("2.132e15").unwrap(), r(2132000000000000, 1));
        assert_eq!(parse_decimal("0.19113").unwrap(), r(19113, 100000));
        assert_eq!(parse_decimal("5e-2").unwrap(), r(1, 20));
        assert!(parse_decimal("x1").is_err());
        assert!(parse_decimal("").is_err());
        assert_eq!(ratio_to_sci(&r(1, 3), 4), "3.333e-1");
    }
}
