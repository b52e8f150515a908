//! Prime sieving and primality testing.

use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Default trial-division bound used by the factoring pipeline.
pub const TRIAL_BOUND: u64 = 1_000_000;

/// Default sieve capacity for prime windows (2^26).
pub const SIEVE_CAPACITY: u64 = 1 << 26;

/// Below this value 13 fixed strong-pseudoprime bases plus a strong Lucas test
/// give a proof of primality (no strong pseudoprime to the first 13 prime bases
/// lies below it).
pub const DETERMINISTIC_LIMIT: &str = "3317044064679887385961981";

const FIXED_BASES: [u64; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];
const RANDOM_ROUNDS: usize = 64;

/// Outcome of a primality test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Primality {
    Composite,
    /// Proven prime (deterministic test range).
    Prime,
    /// Passed 64 random Miller-Rabin rounds plus a strong Lucas test.
    ProbablePrime,
}

impl Primality {
    pub fn is_prime(self) -> bool {
        !matches!(self, Primality::Composite)
    }
}

/// All primes `<= limit`, by an odd-only sieve of Eratosthenes.
pub fn sieve_primes(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    // bit i represents 2i+1
    let half = (limit as usize - 1) / 2 + 1;
    let mut composite = vec![0u64; half.div_ceil(64)];
    let mut i = 1usize;
    while (2 * i + 1) * (2 * i + 1) <= limit as usize {
        if composite[i / 64] >> (i % 64) & 1 == 0 {
            let p = 2 * i + 1;
            let mut j = (p * p - 1) / 2;
            while j < half {
                composite[j / 64] |= 1 << (j % 64);
                j += p;
            }
        }
        i += 1;
    }
    let mut primes = Vec::with_capacity(if limit > 10 { (limit as f64 / (limit as f64).ln() * 1.2) as usize } else { 4 });
    primes.push(2);
    for i in 1..half {
        if composite[i / 64] >> (i % 64) & 1 == 0 {
            primes.push(2 * i as u64 + 1);
        }
    }
    primes
}

/// Primes below [`TRIAL_BOUND`], computed once.
pub fn small_primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| sieve_primes(TRIAL_BOUND - 1))
}

fn deterministic_limit() -> &'static BigUint {
    static LIMIT: OnceLock<BigUint> = OnceLock::new();
    LIMIT.get_or_init(|| DETERMINISTIC_LIMIT.parse().unwrap())
}

fn mul_mod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn pow_mod_u64(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod_u64(r, b, m);
        }
        b = mul_mod_u64(b, b, m);
        e >>= 1;
    }
    r
}

fn strong_probable_prime_u64(n: u64, a: u64) -> bool {
    let a = a % n;
    if a == 0 {
        return true;
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    let mut x = pow_mod_u64(a, d, n);
    if x == 1 || x == n - 1 {
        return true;
    }
    for _ in 1..s {
        x = mul_mod_u64(x, x, n);
        if x == n - 1 {
            return true;
        }
    }
    false
}

/// Deterministic primality for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &FIXED_BASES {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    FIXED_BASES[..12].iter().all(|&a| strong_probable_prime_u64(n, a))
}

fn strong_probable_prime(n: &BigUint, a: &BigUint) -> bool {
    let one = BigUint::one();
    let n1 = n - &one;
    let s = n1.trailing_zeros().unwrap_or(0);
    let d = &n1 >> s;
    let mut x = a.modpow(&d, n);
    if x.is_one() || x == n1 {
        return true;
    }
    for _ in 1..s {
        x = (&x * &x) % n;
        if x == n1 {
            return true;
        }
    }
    false
}

/// Jacobi symbol (a/n) for odd positive n.
pub fn jacobi(a: &BigInt, n: &BigUint) -> i32 {
    let n_int = BigInt::from(n.clone());
    let mut a = a.mod_floor(&n_int).to_biguint().unwrap();
    let mut n = n.clone();
    let mut result = 1;
    while !a.is_zero() {
        let tz = a.trailing_zeros().unwrap_or(0);
        a >>= tz;
        let n_mod_8 = (&n % 8u32).to_u32().unwrap();
        if tz % 2 == 1 && (n_mod_8 == 3 || n_mod_8 == 5) {
            result = -result;
        }
        std::mem::swap(&mut a, &mut n);
        if (&a % 4u32).to_u32() == Some(3) && (&n % 4u32).to_u32() == Some(3) {
            result = -result;
        }
        a %= &n;
    }
    if n.is_one() {
        result
    } else {
        0
    }
}

fn half_mod(x: BigUint, n: &BigUint) -> BigUint {
    if x.is_odd() {
        (x + n) >> 1
    } else {
        x >> 1
    }
}

/// Strong Lucas probable-prime test with Selfridge parameters.
fn strong_lucas_probable_prime(n: &BigUint) -> bool {
    let root = n.sqrt();
    if &root * &root == *n {
        return false;
    }
    let mut d = BigInt::from(5u32);
    loop {
        match jacobi(&d, n) {
            -1 => break,
            0 => {
                // shares a factor with n unless |d| == n
                return d.abs().to_biguint().as_ref() == Some(n);
            }
            _ => {
                d = if d.is_positive() { -(d + 2u32) } else { -d + 2u32 };
            }
        }
    }
    let n_int = BigInt::from(n.clone());
    let q_int: BigInt = (BigInt::one() - &d) / 4u32;
    let q = q_int.mod_floor(&n_int).to_biguint().unwrap();
    let dm = d.mod_floor(&n_int).to_biguint().unwrap();

    let np1 = n + 1u32;
    let s = np1.trailing_zeros().unwrap_or(0);
    let k = &np1 >> s;

    // U_k, V_k, Q^k by left-to-right binary ladder, P = 1
    let mut u = BigUint::zero();
    let mut v = BigUint::from(2u32);
    let mut qk = BigUint::one();
    let bits = k.bits();
    for i in (0..bits).rev() {
        // double
        u = (&u * &v) % n;
        v = (&v * &v + n + n - ((&qk << 1) % n)) % n;
        qk = (&qk * &qk) % n;
        if k.bit(i) {
            let nu = half_mod((&u + &v) % n, n);
            let nv = half_mod((&dm * &u + &v) % n, n);
            u = nu;
            v = nv;
            qk = (&qk * &q) % n;
        }
    }
    if u.is_zero() || v.is_zero() {
        return true;
    }
    for _ in 1..s {
        v = (&v * &v + n + n - ((&qk << 1) % n)) % n;
        qk = (&qk * &qk) % n;
        if v.is_zero() {
            return true;
        }
    }
    false
}

/// Primality test: deterministic below [`DETERMINISTIC_LIMIT`], probabilistic
/// (and flagged as such) above it.
pub fn primality(n: &BigUint) -> Primality {
    if let Some(small) = n.to_u64() {
        return if is_prime_u64(small) { Primality::Prime } else { Primality::Composite };
    }
    for &p in small_primes().iter().take(200) {
        if (n % p).is_zero() {
            return Primality::Composite;
        }
    }
    for &a in &FIXED_BASES {
        if !strong_probable_prime(n, &BigUint::from(a)) {
            return Primality::Composite;
        }
    }
    if !strong_lucas_probable_prime(n) {
        return Primality::Composite;
    }
    if n < deterministic_limit() {
        return Primality::Prime;
    }
    // bases drawn from a generator seeded by n itself keep the answer reproducible
    let seed = n.to_u64_digits().iter().fold(0u64, |h, w| h.rotate_left(13) ^ w);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n3 = n - 3u32;
    for _ in 0..RANDOM_ROUNDS {
        let a = BigUint::from(rng.gen::<u64>()) % &n3 + 2u32;
        if !strong_probable_prime(n, &a) {
            return Primality::Composite;
        }
    }
    Primality::ProbablePrime
}

pub fn is_prime(n: &BigUint) -> bool {
    primality(n).is_prime()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_is_prime(n: u64) -> bool {
        n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
    }

    #[test]
    fn sieve_matches_naive() {
        let primes = sieve_primes(10_000);
        let naive: Vec<u64> = (0..=10_000).filter(|&n| naive_is_prime(n)).collect();
        assert_eq!(primes, naive);
        assert_eq!(sieve_primes(1), Vec::<u64>::new());
        assert_eq!(sieve_primes(2), vec![2]);
        assert_eq!(sieve_primes(3), vec![2, 3]);
    }

    #[test]
    fn u64_primality_matches_naive() {
        for n in 0..20_000u64 {
            assert_eq!(is_prime_u64(n), naive_is_prime(n), "{n}");
        }
        // strong pseudoprimes to several bases
        for n in [3_215_031_751u64, 2_152_302_898_747, 3_474_749_660_383, 341_550_071_728_321] {
            assert!(!is_prime_u64(n));
        }
        assert!(is_prime_u64(18_446_744_073_709_551_557));
    }

    #[test]
    fn big_primality() {
        let m127 = (BigUint::one() << 127) - 1u32;
        assert_eq!(primality(&m127), Primality::ProbablePrime);
        let m61 = (BigUint::one() << 61) - 1u32;
        assert_eq!(primality(&(&m61 * &m61)), Primality::Composite);
        // largest prime below 2^81, inside the deterministic range
        let p81: BigUint = "2417851639229258349412301".parse().unwrap();
        assert!(p81 < *deterministic_limit());
        assert_eq!(primality(&p81), Primality::Prime);
        assert_eq!(primality(&(p81 + 2u32)), Primality::Composite);
        // product of two primes just above 2^40
        let p = BigUint::from(1_099_511_627_791u64);
        let q = BigUint::from(1_099_511_628_211u64);
        assert!(is_prime(&p) && is_prime(&q));
        assert_eq!(primality(&(&p * &q)), Primality::Composite);
        // strong pseudoprime to the first 12 prime bases (but not 41)
        let spsp: BigUint = "318665857834031151167461".parse().unwrap();
        assert_eq!(primality(&spsp), Primality::Composite);
    }

    #[test]
    fn lucas_agrees_on_small_odd_numbers() {
        for n in (5..5000u64).step_by(2) {
            let b = BigUint::from(n);
            assert_eq!(strong_lucas_probable_prime(&b), naive_is_prime(n), "{n}");
        }
        // the two smallest strong Lucas pseudoprimes (Selfridge parameters)
        assert!(strong_lucas_probable_prime(&BigUint::from(5459u32)));
        assert!(strong_lucas_probable_prime(&BigUint::from(5777u32)));
    }

    #[test]
    fn jacobi_small() {
        // (2/7) = 1, (3/7) = -1, (5/21) = 1, (0/3) = 0
        let n7 = BigUint::from(7u32);
        assert_eq!(jacobi(&BigInt::from(2), &n7), 1);
        assert_eq!(jacobi(&BigInt::from(3), &n7), -1);
        assert_eq!(jacobi(&BigInt::from(-1), &n7), -1);
        assert_eq!(jacobi(&BigInt::from(5), &BigUint::from(21u32)), 1);
        assert_eq!(jacobi(&BigInt::from(0), &BigUint::from(3u32)), 0);
    }
}
