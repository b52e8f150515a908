//! Threshold criteria: q-independent lower bounds on `q` built from prime
//! windows (two-window and single-window forms) and the n = 7 special case.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigUint;
use num_rational::Ratio;
use num_traits::One;
use serde_json::json;

use super::{Criterion, CriterionReport, ProblemInstance, Verdict};
use crate::error::{Error, Result};
use crate::numth::bigreal::compare_stable;
use crate::numth::windows::{a_constant, primes_in_window, primes_one_mod, CongruentLimit, PrimeWindow};
use crate::numth::{parse_decimal, ratio_to_sci, BigReal, IntFactorization};
use crate::published;

type Key = (String, String, usize);

fn cached<T: Clone + Send + 'static>(
    cache: &'static OnceLock<Mutex<HashMap<Key, T>>>,
    key: Key,
    make: impl FnOnce() -> Result<T>,
) -> Result<T> {
    let map = cache.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = map.lock().unwrap().get(&key) {
        return Ok(v.clone());
    }
    let v = make()?;
    map.lock().unwrap().insert(key, v.clone());
    Ok(v)
}

fn window(t: &str, u: &str, p: usize) -> Result<Arc<PrimeWindow>> {
    static CACHE: OnceLock<Mutex<HashMap<Key, Arc<PrimeWindow>>>> = OnceLock::new();
    cached(&CACHE, (t.into(), u.into(), p), || {
        Ok(Arc::new(primes_in_window(&BigReal::parse(t, p)?, &BigReal::parse(u, p)?)?))
    })
}

fn a_value(t: &str, u: &str, p: usize) -> Result<BigReal> {
    static CACHE: OnceLock<Mutex<HashMap<Key, BigReal>>> = OnceLock::new();
    cached(&CACHE, (t.into(), u.into(), p), || a_constant(&BigReal::parse(t, p)?, &BigReal::parse(u, p)?))
}

fn real(n: u64, p: usize) -> BigReal {
    BigReal::from_u64(n, p)
}

/// Two-window threshold data for `(n, k, r, t, u)`.
#[derive(Debug, Clone)]
pub struct TuParams {
    pub n: usize,
    pub k: usize,
    pub r: BigUint,
    pub t: String,
    pub u: String,
    pub precision_bits: usize,
    /// `v(t,u)`, the number of primes in `(2^t, 2^{t+u})`.
    pub window_count: usize,
    pub s_tu: BigReal,
    pub a_tu: BigReal,
    pub delta: BigReal,
    pub big_delta: BigReal,
    pub exponent: BigReal,
    pub threshold: BigReal,
}

/// Computes the two-window threshold. Fails with `PreconditionFailed` when
/// `k < n/2`, `t + u > 2n/(n-2k)` or `δ_{t,u} > 0` does not hold.
pub fn tu_params(n: usize, k: usize, r: &BigUint, t: &str, u: &str, p: usize) -> Result<TuParams> {
    if 2 * k >= n {
        return Err(Error::PreconditionFailed(format!("k < n/2 (n = {n}, k = {k})")));
    }
    let (tr, ur) = (BigReal::parse(t, p)?, BigReal::parse(u, p)?);
    let tu = &tr + &ur;
    let gap = &(&tu * &real((n - 2 * k) as u64, p)) - &real(2 * n as u64, p);
    if !gap.is_positive() {
        return Err(Error::PreconditionFailed(format!("t + u > 2n/(n-2k) (t + u = {}, n = {n}, k = {k})", tu.to_sci(6))));
    }
    let w = window(t, u, p)?;
    let a = a_value(t, u, p)?;
    let nk = (n - k) as u64;
    let delta = &(&BigReal::one(p) - &w.inverse_sum) - &real(nk, p).recip();
    if !delta.is_positive() {
        return Err(Error::PreconditionFailed(format!("delta_(t,u) > 0 (delta = {})", delta.to_sci(6))));
    }
    let big_delta = &real(2, p) + &(&real(w.count() as u64 + nk - 1, p) / &delta);
    let exponent = &(&real(2, p) * &tu) / &gap;
    let base = &(&BigReal::from_biguint(r, p) * &big_delta) * &a;
    let threshold = base.pow(&exponent);
    Ok(TuParams {
        n,
        k,
        r: r.clone(),
        t: t.into(),
        u: u.into(),
        precision_bits: p,
        window_count: w.count(),
        s_tu: w.inverse_sum.clone(),
        a_tu: a,
        delta,
        big_delta,
        exponent,
        threshold,
    })
}

impl TuParams {
    /// Whether `q` meets the threshold at this precision.
    pub fn admits(&self, q: &BigUint) -> bool {
        BigReal::from_biguint(q, self.precision_bits) >= self.threshold
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "t": self.t, "u": self.u, "n": self.n, "k": self.k, "r": self.r.to_string(),
            "window_count": self.window_count,
            "s_tu": self.s_tu.to_sci(12),
            "a_tu": self.a_tu.to_sci(12),
            "delta_tu": self.delta.to_sci(12),
            "big_delta_tu": self.big_delta.to_sci(12),
            "exponent": self.exponent.to_sci(12),
            "threshold": self.threshold.to_sci(12),
        })
    }
}

/// Single-window thresholds `U_t`, `V_t` and the combined bound
/// `min{U_t, max{(n-k)^2, V_t}}`.
#[derive(Debug, Clone)]
pub struct CotaParams {
    pub n: usize,
    pub k: usize,
    pub r: BigUint,
    pub t: String,
    pub precision_bits: usize,
    pub a_t: BigReal,
    pub exponent: BigReal,
    pub u_t: BigReal,
    pub v_t: BigReal,
    pub threshold: BigReal,
}

pub fn cota_params(n: usize, k: usize, r: &BigUint, t: &str, p: usize) -> Result<CotaParams> {
    if 2 * k >= n {
        return Err(Error::PreconditionFailed(format!("k < n/2 (n = {n}, k = {k})")));
    }
    let tr = BigReal::parse(t, p)?;
    let gap = &(&tr * &real((n - 2 * k) as u64, p)) - &real(2 * n as u64, p);
    if !gap.is_positive() {
        return Err(Error::PreconditionFailed(format!("t > 2n/(n-2k) (t = {t}, n = {n}, k = {k})")));
    }
    let a = a_value(t, "0", p)?;
    let exponent = &(&real(2, p) * &tr) / &gap;
    let nk = (n - k) as u64;
    let ra = &BigReal::from_biguint(r, p) * &a;
    let u_t = (&ra * &BigReal::from_biguint(&(BigUint::one() << (n - k)), p)).pow(&exponent);
    let v_t = (&ra * &real(nk + 2, p)).pow(&exponent);
    let floor = real(nk * nk, p);
    let upper = if v_t > floor { v_t.clone() } else { floor };
    let threshold = if u_t < upper { u_t.clone() } else { upper };
    Ok(CotaParams { n, k, r: r.clone(), t: t.into(), precision_bits: p, a_t: a, exponent, u_t, v_t, threshold })
}

impl CotaParams {
    pub fn admits(&self, q: &BigUint) -> bool {
        BigReal::from_biguint(q, self.precision_bits) >= self.threshold
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "t": self.t, "n": self.n, "k": self.k, "r": self.r.to_string(),
            "a_t": self.a_t.to_sci(12),
            "exponent": self.exponent.to_sci(12),
            "u_t": self.u_t.to_sci(12),
            "v_t": self.v_t.to_sci(12),
            "threshold": self.threshold.to_sci(12),
        })
    }
}

fn verdict_of(ordering: Option<std::cmp::Ordering>) -> Verdict {
    match ordering {
        Some(std::cmp::Ordering::Less) => Verdict::Inconclusive,
        Some(_) => Verdict::Exists,
        None => Verdict::Boundary,
    }
}

fn require_square_bound(inst: &ProblemInstance) -> Result<()> {
    let nk = (inst.n - inst.k) as u64;
    if BigUint::from(nk * nk) > inst.q {
        return Err(Error::PreconditionFailed(format!("(n-k)^2 <= q ((n-k)^2 = {})", nk * nk)));
    }
    Ok(())
}

/// Two-window criterion; the verdict is EXISTS iff `q` reaches the threshold.
pub fn check_tu(inst: &ProblemInstance, t: &str, u: &str) -> Result<CriterionReport> {
    let first = tu_params(inst.n, inst.k, &inst.r, t, u, crate::numth::bigreal::start_precision())?;
    require_square_bound(inst)?;
    let cmp = compare_stable(|p| {
        let params = if p == first.precision_bits { first.clone() } else { tu_params(inst.n, inst.k, &inst.r, t, u, p)? };
        Ok((BigReal::from_biguint(&inst.q, p), params.threshold))
    })?;
    let params = tu_params(inst.n, inst.k, &inst.r, t, u, cmp.precision_bits)?;
    Ok(CriterionReport {
        criterion: Criterion::Tu,
        verdict: verdict_of(cmp.ordering),
        lhs: super::int_string(&inst.q),
        rhs: params.threshold.to_sci(10),
        precision_bits: Some(cmp.precision_bits),
        details: params.to_json(),
        factorization_refs: inst.factorization_refs(),
    })
}

/// Single-window criterion.
pub fn check_cota(inst: &ProblemInstance, t: &str) -> Result<CriterionReport> {
    cota_params(inst.n, inst.k, &inst.r, t, crate::numth::bigreal::start_precision())?;
    let cmp = compare_stable(|p| Ok((BigReal::from_biguint(&inst.q, p), cota_params(inst.n, inst.k, &inst.r, t, p)?.threshold)))?;
    let params = cota_params(inst.n, inst.k, &inst.r, t, cmp.precision_bits)?;
    Ok(CriterionReport {
        criterion: Criterion::Cota,
        verdict: verdict_of(cmp.ordering),
        lhs: super::int_string(&inst.q),
        rhs: params.threshold.to_sci(10),
        precision_bits: Some(cmp.precision_bits),
        details: params.to_json(),
        factorization_refs: inst.factorization_refs(),
    })
}

/// Constants of the n = 7, r = k = 3 lemma, recomputed.
///
/// The lemma sieves with `ℓ = q - 1` and `g = f` (or `g = 1` when `7 | q`):
/// the sieved primes divide `q^6 + ... + 1` and are `≡ 1 (mod 7)`, and at most
/// `n - k = 4` irreducibles are sieved, so `δ >= 1 - S_v - 4/q` and
/// `Δ <= 2 + (v + 3)/δ`. Then `W(q - 1) <= A_t q^{1/t}` turns
/// `q^{1/2} >= 3 W(q-1) Δ` into `q >= (3 Δ A_t)^{2t/(t-2)}`.
#[derive(Debug, Clone)]
pub struct N7Constants {
    pub precision_bits: usize,
    /// End of the lemma's range: the two-window threshold for n = 7.
    pub q_max: BigReal,
    /// `q_max^6 + ... + 1`.
    pub product_bound: BigReal,
    /// Largest `v` with the product of the first `v` primes `≡ 1 (mod 7)` within the bound.
    pub v: usize,
    pub largest_prime: u64,
    pub next_prime: u64,
    pub inverse_sum: Ratio<BigUint>,
    pub sieved_irreducibles: usize,
    pub q_floor: Ratio<BigUint>,
    /// Lower bound `1 - S_v - s/q_floor` on δ.
    pub delta_lower: Ratio<BigUint>,
    /// `2 + (v + s - 1)/δ_lower`.
    pub big_delta: Ratio<BigUint>,
    /// The published cap on Δ used in the threshold.
    pub delta_cap: Ratio<BigUint>,
    pub t: String,
    pub a_t: BigReal,
    pub exponent: BigReal,
    /// `(3 · cap · A_t)^{2t/(t-2)}`.
    pub threshold: BigReal,
    /// The same with the recomputed Δ.
    pub threshold_derived: BigReal,
}

const N7_R: u64 = 3;
const N7_N: usize = 7;
const N7_K: usize = 3;

/// Recomputes the n = 7 constants at precision `p`. Fails if the recomputed Δ
/// exceeds the published cap or the threshold does not exceed `q_floor`.
pub fn n7_constants(p: usize) -> Result<N7Constants> {
    static CACHE: OnceLock<Mutex<HashMap<Key, N7Constants>>> = OnceLock::new();
    cached(&CACHE, (String::new(), String::new(), p), || n7_compute(p))
}

fn n7_compute(p: usize) -> Result<N7Constants> {
    let publ = &published::bundled().n7_lemma;
    let r = BigUint::from(N7_R);
    let q_max = tu_params(N7_N, N7_K, &r, "8.5", "9.5", p)?.threshold;
    // evaluate the bound with enough bits to pin its integer part
    let wide = p.max(q_max.log2_estimate() as usize * 6 + 128);
    let qw = q_max.with_precision(wide);
    let mut product_bound = BigReal::one(wide);
    let mut power = BigReal::one(wide);
    for _ in 0..6 {
        power = &power * &qw;
        product_bound = &product_bound + &power;
    }
    let primes = primes_one_mod(7, CongruentLimit::ProductAtMost(product_bound.floor_biguint()));
    let v = primes.len();
    let next_prime = primes_one_mod(7, CongruentLimit::Count(v + 1)).primes[v];
    let inverse_sum = primes.sum_of_first(v);
    let s = N7_N - N7_K;
    let q_floor = parse_decimal(&publ.q_floor)?;
    let taken = &inverse_sum + Ratio::from_integer(BigUint::from(s)) / &q_floor;
    if taken >= Ratio::one() {
        return Err(Error::PreconditionFailed("n = 7 lemma: delta lower bound is not positive".into()));
    }
    let delta_lower = Ratio::one() - taken;
    let big_delta = Ratio::from_integer(BigUint::from(2u32)) + Ratio::from_integer(BigUint::from(v + s - 1)) / &delta_lower;
    let delta_cap = parse_decimal(&publ.delta_cap)?;
    if big_delta > delta_cap {
        return Err(Error::PreconditionFailed(format!(
            "n = 7 lemma: recomputed Delta {} exceeds the cap {}",
            ratio_to_sci(&big_delta, 10),
            publ.delta_cap
        )));
    }
    let t = publ.t.clone();
    let tr = BigReal::parse(&t, p)?;
    let a_t = a_value(&t, "0", p)?;
    let exponent = &(&real(2, p) * &tr) / &(&tr - &real(2, p));
    let scaled = |d: &Ratio<BigUint>| {
        let d = BigReal::from_ratio(d.numer(), d.denom(), p);
        (&(&real(N7_R, p) * &d) * &a_t).pow(&exponent)
    };
    let threshold = scaled(&delta_cap);
    let threshold_derived = scaled(&big_delta);
    let floor_real = BigReal::from_ratio(q_floor.numer(), q_floor.denom(), p);
    if threshold_derived <= floor_real {
        return Err(Error::PreconditionFailed("n = 7 lemma: threshold does not exceed the assumed floor on q".into()));
    }
    Ok(N7Constants {
        precision_bits: p,
        q_max,
        product_bound: product_bound.with_precision(p),
        v,
        largest_prime: primes.primes.last().copied().unwrap_or(0),
        next_prime,
        inverse_sum,
        sieved_irreducibles: s,
        q_floor,
        delta_lower,
        big_delta,
        delta_cap,
        t,
        a_t,
        exponent,
        threshold,
        threshold_derived,
    })
}

impl N7Constants {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "q_max": self.q_max.to_sci(12),
            "product_bound": self.product_bound.to_sci(12),
            "v": self.v,
            "largest_prime": self.largest_prime,
            "next_prime": self.next_prime,
            "inverse_sum": ratio_to_sci(&self.inverse_sum, 12),
            "sieved_irreducibles": self.sieved_irreducibles,
            "delta_lower": ratio_to_sci(&self.delta_lower, 12),
            "big_delta": ratio_to_sci(&self.big_delta, 12),
            "delta_cap": ratio_to_sci(&self.delta_cap, 12),
            "t": self.t,
            "a_t": self.a_t.to_sci(12),
            "threshold": self.threshold.to_sci(12),
            "threshold_derived": self.threshold_derived.to_sci(12),
        })
    }
}

/// The n = 7 lemma for `q`: EXISTS iff `threshold <= q < q_max`.
pub fn check_n7(q: &BigUint) -> Result<CriterionReport> {
    // the lemma reads no factorization of q^7 - 1, so none is computed
    let value = q.pow(N7_N as u32) - 1u32;
    let opaque = IntFactorization::from_parts(value.clone(), [], value, 1);
    let inst = ProblemInstance::with_factorization(q, N7_N, &BigUint::from(N7_R), N7_K, opaque).map_err(|e| match e {
        Error::InvalidR(_) => Error::PreconditionFailed("3 | q^7 - 1".into()),
        Error::NoDegreeKDivisor { .. } => Error::PreconditionFailed("x^7 - 1 has a degree 3 factor over F_q".into()),
        other => other,
    })?;
    check_n7_instance(&inst)
}

pub fn check_n7_instance(inst: &ProblemInstance) -> Result<CriterionReport> {
    if inst.n != N7_N || inst.k != N7_K || inst.r != BigUint::from(N7_R) {
        return Err(Error::PreconditionFailed("n = 7, r = 3, k = 3".into()));
    }
    let q = &inst.q;
    let cmp = compare_stable(|p| Ok((BigReal::from_biguint(q, p), n7_constants(p)?.threshold)))?;
    let c = n7_constants(cmp.precision_bits)?;
    let in_range = BigReal::from_biguint(q, c.precision_bits) < c.q_max;
    let verdict = match verdict_of(cmp.ordering) {
        Verdict::Exists if !in_range => Verdict::Inconclusive,
        v => v,
    };
    let mut details = c.to_json();
    details["in_range"] = json!(in_range);
    Ok(CriterionReport {
        criterion: Criterion::N7,
        verdict,
        lhs: super::int_string(q),
        rhs: c.threshold.to_sci(10),
        precision_bits: Some(cmp.precision_bits),
        details,
        factorization_refs: inst.factorization_refs(),
    })
}
