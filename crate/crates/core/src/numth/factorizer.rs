//! Process-wide factorization service: bundled table, optional user table,
//! an in-memory cache, and an optional on-disk cache directory.

use std::collections::HashMap;
use std::fs::OpenOptions;
use std::io::Write;
use std::path::PathBuf;
use std::sync::{Mutex, OnceLock, RwLock};

use num_bigint::BigUint;
use num_traits::One;

use super::arith::cyclotomic_value;
use super::factor::{split_with_rho, trial_divide, FactorBudget, IntFactorization};
use super::primes::primality;
use super::table::FactorTable;
use crate::error::Result;

/// Environment variable naming an extra factor-table file.
pub const TABLE_ENV: &str = "RFKN_FACTOR_TABLE";
/// Environment variable naming the cache directory.
pub const CACHE_ENV: &str = "RFKN_CACHE";
const CACHE_FILE: &str = "factor_cache.txt";
/// Only factorizations above this size are written to the disk cache.
const PERSIST_MIN_BITS: u64 = 64;

pub struct Factorizer {
    budget: FactorBudget,
    table: FactorTable,
    cache: RwLock<HashMap<BigUint, IntFactorization>>,
    cache_file: Option<PathBuf>,
    write_lock: Mutex<()>,
}

impl Factorizer {
    /// A factorizer backed by the bundled table only.
    pub fn new(budget: FactorBudget) -> Self {
        Self::with_table(budget, FactorTable::bundled())
    }

    pub fn with_table(budget: FactorBudget, table: FactorTable) -> Self {
        Factorizer { budget, table, cache: RwLock::new(HashMap::new()), cache_file: None, write_lock: Mutex::new(()) }
    }

    /// Bundled table, plus `RFKN_FACTOR_TABLE` and the cache in `RFKN_CACHE`
    /// when set. Entries from both files are verified as they load.
    pub fn from_env() -> Result<Self> {
        let mut table = FactorTable::bundled();
        if let Some(path) = std::env::var_os(TABLE_ENV) {
            table.extend(FactorTable::load(&PathBuf::from(path))?);
        }
        let mut cache_file = None;
        if let Some(dir) = std::env::var_os(CACHE_ENV) {
            let dir = PathBuf::from(dir);
            std::fs::create_dir_all(&dir)?;
            let file = dir.join(CACHE_FILE);
            if file.exists() {
                table.extend(FactorTable::load(&file)?);
            }
            cache_file = Some(file);
        }
        let mut f = Self::with_table(FactorBudget::default(), table);
        f.cache_file = cache_file;
        Ok(f)
    }

    pub fn budget(&self) -> FactorBudget {
        self.budget
    }

    pub fn table(&self) -> &FactorTable {
        &self.table
    }

    /// Factors `n >= 1`: trial division, then table primes, then Brent-rho.
    /// Residuals recorded in a table as unfactored are not retried.
    pub fn factorize(&self, n: &BigUint) -> IntFactorization {
        if let Some(f) = self.table.get(n) {
            return f.clone();
        }
        if let Some(f) = self.cache.read().unwrap().get(n) {
            return f.clone();
        }
        let bound = self.budget.trial_bound;
        let (mut primes, rest) = trial_divide(n, bound);
        let (known, rest) = self.table.divide_known(&rest);
        primes.extend(known);
        let settled = rest.is_one() || (self.table.is_known_residual(&rest) && !primality(&rest).is_prime());
        let (more, cofactor) = if settled {
            (Vec::new(), rest)
        } else {
            split_with_rho(rest, bound, self.budget.rho_iterations)
        };
        primes.extend(more);
        let f = IntFactorization::from_parts(n.clone(), primes, cofactor, bound);
        self.remember(&f);
        f
    }

    fn remember(&self, f: &IntFactorization) {
        self.cache.write().unwrap().insert(f.value.clone(), f.clone());
        let Some(path) = &self.cache_file else { return };
        if f.value.bits() < PERSIST_MIN_BITS {
            return;
        }
        let _guard = self.write_lock.lock().unwrap();
        let written = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .and_then(|mut file| writeln!(file, "{f}"));
        if let Err(e) = written {
            eprintln!("warning: cannot write factor cache {}: {e}", path.display());
        }
    }

    /// Factors `q^n - 1` through its cyclotomic pieces `Phi_d(q)`, `d | n`.
    pub fn factorize_qn_minus_1(&self, q: &BigUint, n: u64) -> IntFactorization {
        assert!(n >= 1, "n must be positive");
        let mut acc = IntFactorization::one();
        for d in super::arith::divisors_u64(n) {
            acc = acc.merge(&self.factorize(&cyclotomic_value(d, q)));
        }
        debug_assert_eq!(acc.value, q.pow(n as u32) - 1u32);
        acc
    }
}

/// The shared factorizer built from the environment on first use. An invalid
/// table or cache file is reported once and the bundled table is used instead.
pub fn global() -> &'static Factorizer {
    static GLOBAL: OnceLock<Factorizer> = OnceLock::new();
    GLOBAL.get_or_init(|| {
        Factorizer::from_env().unwrap_or_else(|e| {
            eprintln!("warning: {e}; using the bundled factor table only");
            Factorizer::new(FactorBudget::default())
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numth::factor::factorize;

    #[test]
    fn small_prime_power_cases() {
        let f = Factorizer::new(FactorBudget::default());
        let g = f.factorize_qn_minus_1(&BigUint::from(3u32), 2);
        assert_eq!(g.to_string(), "8 = 2^3");
        let h = f.factorize_qn_minus_1(&BigUint::from(11u32), 8);
        assert!(h.is_complete());
        h.validate().unwrap();
    }

    #[test]
    fn eleven_to_the_48_is_complete() {
        let f = Factorizer::new(FactorBudget::default());
        let g = f.factorize_qn_minus_1(&BigUint::from(11u32), 48);
        assert!(g.is_complete());
        g.validate().unwrap();
    }

    #[test]
    fn agrees_with_plain_factorize_on_grid() {
        let f = Factorizer::with_table(FactorBudget::default(), FactorTable::default());
        for q in 2u64..=40 {
            let mut n = 1;
            while (q as f64).powi(n as i32) <= 1e12 {
                let qn = f.factorize_qn_minus_1(&BigUint::from(q), n);
                let direct = factorize(&(BigUint::from(q).pow(n as u32) - 1u32), FactorBudget::default());
                assert_eq!(qn.factors, direct.factors, "q={q} n={n}");
                n += 1;
            }
        }
    }

    #[test]
    fn disk_cache_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let mut f = Factorizer::new(FactorBudget::default());
        f.cache_file = Some(dir.path().join(CACHE_FILE));
        let n = BigUint::from(10u32).pow(20) + 39u32;
        let first = f.factorize(&n);
        let text = std::fs::read_to_string(dir.path().join(CACHE_FILE)).unwrap();
        let table = FactorTable::parse(&text).unwrap();
        assert_eq!(table.get(&n).unwrap().factors, first.factors);
    }
}
