//! Integer number theory: primality, factorization, arithmetic functions,
//! arbitrary-precision reals, and prime windows.

pub mod arith;
pub mod bigreal;
pub mod factor;
pub mod factorizer;
pub mod primes;
pub mod table;
pub mod windows;

pub use arith::{
    cyclotomic_value, divisors_u64, euler_phi, mobius_u64, parse_decimal, prime_power, ratio_to_sci, w_int, w_int_bounds,
    WBound,
};
pub use bigreal::BigReal;
pub use factor::{factorize, FactorBudget, IntFactorization, PrimePower};
pub use factorizer::Factorizer;
pub use primes::{is_prime, primality, Primality};
pub use table::FactorTable;
