//! Sufficient conditions for the existence of an r-primitive, k-normal element
//! of `F_{q^n}`, each producing a [`CriterionReport`].
//!
//! The integer-valued conditions (direct, sieve, all-divisors) are decided
//! exactly in rational arithmetic. The window-based thresholds are real
//! numbers and are compared with [`compare_stable`](crate::numth::bigreal::compare_stable).

mod auto;
mod bounds;
mod direct;

use std::cmp::Ordering;

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::cyclopoly::{best_f, DegreeKChoice, PolyFactorization};
use crate::error::{Error, Result};
use crate::numth::{factorizer, prime_power, BigReal, Factorizer, IntFactorization};

pub use auto::{check_auto, T_GRID, U_GRID};
pub use bounds::{
    check_cota, check_n7, check_n7_instance, check_tu, cota_params, n7_constants, tu_params, CotaParams, N7Constants,
    TuParams,
};
pub use direct::{check_caseall, check_direct, check_sieve, SieveChoice, SieveParams, SieveSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Criterion {
    Direct,
    Sieve,
    Caseall,
    Tu,
    Cota,
    N7,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Exists,
    Inconclusive,
    NotApplicable,
    IndeterminateFactorization,
    Boundary,
}

/// Outcome of one criterion on one instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub criterion: Criterion,
    pub verdict: Verdict,
    pub lhs: String,
    pub rhs: String,
    /// Working precision of the deciding comparison; `None` when it was exact.
    pub precision_bits: Option<usize>,
    pub details: serde_json::Value,
    pub factorization_refs: Vec<String>,
}

impl CriterionReport {
    pub(crate) fn not_applicable(criterion: Criterion, reason: impl Into<String>, refs: Vec<String>) -> Self {
        CriterionReport {
            criterion,
            verdict: Verdict::NotApplicable,
            lhs: "-".into(),
            rhs: "-".into(),
            precision_bits: None,
            details: serde_json::json!({ "reason": reason.into() }),
            factorization_refs: refs,
        }
    }
}

/// A validated `(q, n, r, k)` together with the chosen degree-k divisor `f`
/// and the factorizations every criterion reads.
#[derive(Debug, Clone)]
pub struct ProblemInstance {
    pub q: BigUint,
    pub p: u64,
    pub s: u32,
    pub n: usize,
    pub r: BigUint,
    pub k: usize,
    pub f: DegreeKChoice,
    pub fact_q: IntFactorization,
    pub fact_x: PolyFactorization,
}

impl ProblemInstance {
    /// Validates the instance, factors `q^n - 1` with the shared factorizer and
    /// picks `f` by [`best_f`].
    pub fn new(q: &BigUint, n: usize, r: &BigUint, k: usize) -> Result<Self> {
        Self::with_factorizer(q, n, r, k, factorizer::global())
    }

    pub fn with_factorizer(q: &BigUint, n: usize, r: &BigUint, k: usize, fz: &Factorizer) -> Result<Self> {
        let (p, s) = Self::validate(q, n, r, k)?;
        let fact_q = fz.factorize_qn_minus_1(q, n as u64);
        Self::assemble(q, p, s, n, r, k, fact_q)
    }

    /// As [`new`](Self::new) with a caller-supplied factorization of `q^n - 1`.
    pub fn with_factorization(q: &BigUint, n: usize, r: &BigUint, k: usize, fact_q: IntFactorization) -> Result<Self> {
        let (p, s) = Self::validate(q, n, r, k)?;
        if fact_q.value != q.pow(n as u32) - 1u32 {
            return Err(Error::PreconditionFailed("factorization is not of q^n - 1".into()));
        }
        Self::assemble(q, p, s, n, r, k, fact_q)
    }

    fn validate(q: &BigUint, n: usize, r: &BigUint, k: usize) -> Result<(u64, u32)> {
        if n == 0 {
            return Err(Error::PreconditionFailed("n >= 1".into()));
        }
        let (p, s) = prime_power(q)?;
        if k >= n {
            return Err(Error::InvalidK { n, k });
        }
        let order = q.pow(n as u32) - 1u32;
        if r.is_zero() || !order.is_multiple_of(r) {
            return Err(Error::InvalidR(r.to_string()));
        }
        Ok((p, s))
    }

    fn assemble(q: &BigUint, p: u64, s: u32, n: usize, r: &BigUint, k: usize, fact_q: IntFactorization) -> Result<Self> {
        let fact_x = PolyFactorization::from_cosets(q, p, n);
        let f = best_f(&fact_x, k)?;
        Ok(ProblemInstance { q: q.clone(), p, s, n, r: r.clone(), k, f, fact_q, fact_x })
    }

    /// The same instance with another degree-k divisor.
    pub fn with_choice(&self, f: DegreeKChoice) -> Result<Self> {
        if f.k != self.k || f.exponents.len() != self.fact_x.len() {
            return Err(Error::ShapeMismatch);
        }
        Ok(ProblemInstance { f, ..self.clone() })
    }

    pub fn group_order(&self) -> BigUint {
        self.q.pow(self.n as u32) - 1u32
    }

    /// `n - 2k`, twice the exponent of `q` on the left of the inequalities.
    pub fn twice_exponent(&self) -> i64 {
        self.n as i64 - 2 * self.k as i64
    }

    /// `q^{n/2 - k}` for display.
    pub fn lhs_string(&self) -> String {
        let e = self.twice_exponent();
        if e >= 0 && e % 2 == 0 {
            return int_string(&self.q.pow((e / 2) as u32));
        }
        let p = 128;
        let half = &BigReal::from_u64(e.unsigned_abs(), p) / &BigReal::from_u64(2, p);
        let mut v = (&BigReal::from_biguint(&self.q, p).ln() * &half).exp();
        if e < 0 {
            v = v.recip();
        }
        v.to_sci(10)
    }

    pub fn factorization_refs(&self) -> Vec<String> {
        let status = if self.fact_q.is_complete() {
            if self.fact_q.has_probable_primes() {
                "complete, probable primes"
            } else {
                "complete"
            }
        } else {
            "incomplete"
        };
        let degrees: Vec<String> = self
            .fact_x
            .factors
            .iter()
            .map(|f| if f.multiplicity > 1 { format!("{}^{}", f.degree, f.multiplicity) } else { f.degree.to_string() })
            .collect();
        vec![
            format!("q^n-1: {} ({status})", self.fact_q),
            format!("x^n-1: irreducible degrees [{}]", degrees.join(", ")),
        ]
    }
}

/// Decimal for integers up to 40 digits, scientific beyond.
pub(crate) fn int_string(n: &BigUint) -> String {
    let s = n.to_string();
    if s.len() <= 40 {
        s
    } else {
        BigReal::from_biguint(n, 192).to_sci(10)
    }
}

/// Orders `q^{e/2}` against the positive rational `x`, exactly.
pub(crate) fn cmp_half_power(q: &BigUint, e: i64, x: &Ratio<BigUint>) -> Ordering {
    let (num, den) = (x.numer(), x.denom());
    let qe = q.pow(e.unsigned_abs() as u32);
    if e >= 0 {
        (qe * den * den).cmp(&(num * num))
    } else {
        (den * den).cmp(&(num * num * qe))
    }
}

/// `(q^{e/2} / x)^2`, the squared margin of an inequality `q^{e/2} >= x`.
pub(crate) fn squared_margin(q: &BigUint, e: i64, x: &Ratio<BigUint>) -> Ratio<BigUint> {
    let qe = Ratio::from_integer(q.pow(e.unsigned_abs() as u32));
    let qe = if e >= 0 { qe } else { qe.recip() };
    qe / (x * x)
}

/// Verdict of `q^{e/2} >= rhs` when `rhs` is only known to lie in `[lo, hi]`.
pub(crate) fn interval_verdict(q: &BigUint, e: i64, lo: &Ratio<BigUint>, hi: &Ratio<BigUint>) -> Verdict {
    if cmp_half_power(q, e, hi) != Ordering::Less {
        Verdict::Exists
    } else if cmp_half_power(q, e, lo) == Ordering::Less {
        Verdict::Inconclusive
    } else {
        Verdict::IndeterminateFactorization
    }
}

pub(crate) fn ratio_int(n: &BigUint) -> Ratio<BigUint> {
    Ratio::from_integer(n.clone())
}

pub(crate) fn ratio_string(x: &Ratio<BigUint>) -> String {
    if x.denom().is_one() {
        int_string(x.numer())
    } else {
        crate::numth::ratio_to_sci(x, 10)
    }
}

/// `rhs` as a single value or the interval `[lo, hi]`.
pub(crate) fn interval_string(lo: &Ratio<BigUint>, hi: &Ratio<BigUint>) -> String {
    if lo == hi {
        ratio_string(lo)
    } else {
        format!("[{}, {}]", ratio_string(lo), ratio_string(hi))
    }
}
