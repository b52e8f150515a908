//! Text factor tables: parsing, load-time verification, and lookup.
//!
//! Format: one entry per line, `N = p1^e1 * p2^e2 * ...` in decimal. A factor
//! written with a trailing `?` is an unfactored residual. Blank lines and lines
//! starting with `#` are ignored.

use std::collections::{BTreeSet, HashMap};
use std::path::Path;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use super::factor::IntFactorization;
use super::primes::primality;
use crate::error::{Error, Result};

/// The table shipped with the library.
pub const BUNDLED_TABLE: &str = include_str!("../../data/factor_table.txt");

/// A set of verified factorizations plus the pool of all primes they contain.
#[derive(Debug, Clone, Default)]
pub struct FactorTable {
    entries: HashMap<BigUint, IntFactorization>,
    primes: BTreeSet<BigUint>,
    residuals: BTreeSet<BigUint>,
}

fn parse_factor(token: &str, line: usize) -> Result<(BigUint, u32, bool)> {
    let bad = |reason: &str| Error::FactorTable { line, reason: format!("{reason}: `{token}`") };
    let (body, residual) = match token.strip_suffix('?') {
        Some(b) => (b, true),
        None => (token, false),
    };
    let (base, exp) = match body.split_once('^') {
        Some((b, e)) => (b, e.parse::<u32>().map_err(|_| bad("bad exponent"))?),
        None => (body, 1),
    };
    if residual && exp != 1 {
        return Err(bad("residual cannot carry an exponent"));
    }
    let base: BigUint = base.trim().parse().map_err(|_| bad("bad integer"))?;
    Ok((base, exp, residual))
}

/// Parses and verifies one table line (product and primality checks).
pub fn parse_line(text: &str, line: usize) -> Result<IntFactorization> {
    let fail = |reason: String| Error::FactorTable { line, reason };
    let (lhs, rhs) = text.split_once('=').ok_or_else(|| fail("missing `=`".into()))?;
    let value: BigUint = lhs.trim().parse().map_err(|_| fail(format!("bad value `{}`", lhs.trim())))?;
    if value.is_zero() {
        return Err(fail("value must be positive".into()));
    }
    let mut primes = Vec::new();
    let mut cofactor = BigUint::one();
    let mut product = BigUint::one();
    for token in rhs.split('*').map(str::trim) {
        let (base, exp, residual) = parse_factor(token, line)?;
        product *= base.pow(exp);
        if residual {
            cofactor *= base;
        } else if base.is_one() && exp == 1 {
            // `1 = 1`
        } else if primality(&base).is_prime() {
            primes.push((base, exp));
        } else {
            return Err(fail(format!("{base} is not prime")));
        }
    }
    if product != value {
        return Err(fail(format!("factors do not multiply to {value}")));
    }
    Ok(IntFactorization::from_parts(value, primes, cofactor, 2))
}

impl FactorTable {
    pub fn parse(text: &str) -> Result<Self> {
        let mut table = FactorTable::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            table.insert(parse_line(line, i + 1)?);
        }
        Ok(table)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn bundled() -> Self {
        Self::parse(BUNDLED_TABLE).expect("bundled factor table is valid")
    }

    pub fn insert(&mut self, f: IntFactorization) {
        self.primes.extend(f.primes().cloned());
        if !f.cofactor.is_one() {
            self.residuals.insert(f.cofactor.clone());
        }
        self.entries.insert(f.value.clone(), f);
    }

    pub fn extend(&mut self, other: FactorTable) {
        for f in other.entries.into_values() {
            self.insert(f);
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, n: &BigUint) -> Option<&IntFactorization> {
        self.entries.get(n)
    }

    /// True when `n` is recorded as a residual nobody has split.
    pub fn is_known_residual(&self, n: &BigUint) -> bool {
        self.residuals.contains(n)
    }

    /// Divides every table prime out of `n`; returns the primes found and the rest.
    pub fn divide_known(&self, n: &BigUint) -> (Vec<(BigUint, u32)>, BigUint) {
        let mut rest = n.clone();
        let mut found = Vec::new();
        for p in &self.primes {
            if rest.is_one() {
                break;
            }
            let mut e = 0;
            while (&rest % p).is_zero() {
                rest /= p;
                e += 1;
            }
            if e > 0 {
                found.push((p.clone(), e));
            }
        }
        (found, rest)
    }

    /// Serializes the table, sorted by value.
    pub fn to_text(&self) -> String {
        let mut values: Vec<&BigUint> = self.entries.keys().collect();
        values.sort();
        values.into_iter().map(|v| format!("{}\n", self.entries[v])).collect()
    }
}
