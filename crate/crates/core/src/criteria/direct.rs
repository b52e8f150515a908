//! The exact criteria: the direct character-sum bound, the sieve, and the
//! all-divisors corollary of the sieve.

use num_bigint::BigUint;
use num_rational::Ratio;
use num_traits::{One, Zero};
use serde_json::json;

use super::{
    cmp_half_power, interval_string, interval_verdict, ratio_int, ratio_string, squared_margin, Criterion,
    CriterionReport, ProblemInstance,
};
use crate::error::{Error, Result};
use crate::numth::{w_int_bounds, WBound};

type Q = Ratio<BigUint>;

pub fn check_direct(inst: &ProblemInstance) -> Result<CriterionReport> {
    let w = w_int_bounds(&inst.fact_q);
    let scale = &inst.r * &inst.f.w_complement;
    let lo = ratio_int(&(&scale * &w.lower));
    let hi = ratio_int(&(&scale * &w.upper));
    let verdict = interval_verdict(&inst.q, inst.twice_exponent(), &lo, &hi);
    Ok(CriterionReport {
        criterion: Criterion::Direct,
        verdict,
        lhs: inst.lhs_string(),
        rhs: interval_string(&lo, &hi),
        precision_bits: None,
        details: json!({
            "r": inst.r.to_string(),
            "w_qn_minus_1": w_json(&w),
            "w_complement": inst.f.w_complement.to_string(),
            "f_exponents": inst.f.exponents,
            "equality": cmp_half_power(&inst.q, inst.twice_exponent(), &hi).is_eq(),
        }),
        factorization_refs: inst.factorization_refs(),
    })
}

fn w_json(w: &WBound) -> serde_json::Value {
    if w.is_exact() {
        json!(w.lower.to_string())
    } else {
        json!({ "lower": w.lower.to_string(), "upper": w.upper.to_string() })
    }
}

pub fn check_caseall(inst: &ProblemInstance) -> Result<CriterionReport> {
    let (n, k) = (inst.n, inst.k);
    if 2 * k >= n {
        return Ok(CriterionReport::not_applicable(Criterion::Caseall, "k < n/2 fails", inst.factorization_refs()));
    }
    let nk = (n - k) as u64;
    if BigUint::from(nk * nk) > inst.q {
        return Ok(CriterionReport::not_applicable(
            Criterion::Caseall,
            format!("(n-k)^2 = {} > q", nk * nk),
            inst.factorization_refs(),
        ));
    }
    let w = w_int_bounds(&inst.fact_q);
    let scale = &inst.r * BigUint::from(nk + 2);
    let lo = ratio_int(&(&scale * &w.lower));
    let hi = ratio_int(&(&scale * &w.upper));
    Ok(CriterionReport {
        criterion: Criterion::Caseall,
        verdict: interval_verdict(&inst.q, inst.twice_exponent(), &lo, &hi),
        lhs: inst.lhs_string(),
        rhs: interval_string(&lo, &hi),
        precision_bits: None,
        details: json!({ "r": inst.r.to_string(), "n_minus_k_plus_2": nk + 2, "w_qn_minus_1": w_json(&w) }),
        factorization_refs: inst.factorization_refs(),
    })
}

/// A sieve configuration: the primes removed from `ℓ = q^n - 1` and the
/// irreducible factors of `x^n - 1` kept in `g` (by slot of the instance's
/// factorization). Only the radicals of `ℓ` and `g` matter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SieveSpec {
    pub sieved_primes: Vec<BigUint>,
    pub g_slots: Vec<bool>,
}

impl SieveSpec {
    /// Nothing sieved and `g = x^n - 1`, so that `g̃ = (x^n-1)/f` and Δ = 1.
    pub fn degenerate(inst: &ProblemInstance) -> Self {
        SieveSpec { sieved_primes: Vec::new(), g_slots: vec![true; inst.fact_x.len()] }
    }

    /// Nothing sieved; `g` is the product of the irreducibles coprime to
    /// `(x^n-1)/f`, so every factor of the complement is sieved and `g̃ = 1`.
    pub fn coprime_g(inst: &ProblemInstance) -> Self {
        let g_slots = inst.f.complement_exponents.iter().map(|&e| e == 0).collect();
        SieveSpec { sieved_primes: Vec::new(), g_slots }
    }
}

#[derive(Debug, Clone)]
pub enum SieveChoice {
    Auto,
    Params(SieveSpec),
}

/// Derived sieve quantities for one [`SieveSpec`].
#[derive(Debug, Clone)]
pub struct SieveParams {
    pub spec: SieveSpec,
    pub ell: BigUint,
    pub w_ell: WBound,
    /// Slots of the sieved irreducibles `P_1..P_s`.
    pub sieved_slots: Vec<usize>,
    pub v: usize,
    pub s: usize,
    pub s_prime: usize,
    pub delta: Q,
    pub delta_prime: Q,
    /// Δ, meaningful only when δ > 0.
    pub big_delta: Q,
    pub w_g_tilde: BigUint,
}

impl SieveParams {
    pub fn derive(inst: &ProblemInstance, spec: &SieveSpec) -> Result<Self> {
        if spec.g_slots.len() != inst.fact_x.len() {
            return Err(Error::ShapeMismatch);
        }
        let mut removed = BigUint::one();
        let mut prime_sum = Q::zero();
        for (i, p) in spec.sieved_primes.iter().enumerate() {
            let e = inst.fact_q.exponent_of(p);
            if e == 0 || spec.sieved_primes[..i].contains(p) {
                return Err(Error::PreconditionFailed(format!("sieved prime {p} is not a distinct known prime of q^n-1")));
            }
            removed *= p.pow(e);
            prime_sum += Q::new(BigUint::one(), p.clone());
        }
        let ell_fact = inst.fact_q.divide(&removed)?;
        let comp = &inst.f.complement_exponents;
        let mut sieved_slots = Vec::new();
        let (mut poly_sum, mut outside_sum) = (Q::zero(), Q::zero());
        let mut s_prime = 0;
        let mut g_tilde = 0u32;
        for (i, xf) in inst.fact_x.factors.iter().enumerate() {
            if spec.g_slots[i] {
                if comp[i] > 0 {
                    g_tilde += 1;
                }
                continue;
            }
            sieved_slots.push(i);
            let term = Q::new(BigUint::one(), inst.q.pow(xf.degree as u32));
            poly_sum += &term;
            if comp[i] > 0 {
                s_prime += 1;
            } else {
                outside_sum += term;
            }
        }
        let one = Q::one();
        let taken = &prime_sum + &poly_sum;
        let delta = if taken < one { &one - &taken } else { Q::zero() };
        let delta_prime = &one - &outside_sum;
        let v = spec.sieved_primes.len();
        let big_delta = if delta.is_zero() {
            Q::zero()
        } else {
            // 2 + (v + s' - δ')/δ, with the numerator non-negative (δ' = δ when v = s' = 0)
            let top = Q::from_integer(BigUint::from((v + s_prime) as u64)) + &delta * BigUint::from(2u32);
            debug_assert!(top >= delta_prime);
            (top - &delta_prime) / &delta
        };
        Ok(SieveParams {
            spec: spec.clone(),
            ell: ell_fact.value.clone(),
            w_ell: w_int_bounds(&ell_fact),
            s: sieved_slots.len(),
            sieved_slots,
            v,
            s_prime,
            delta,
            delta_prime,
            big_delta,
            w_g_tilde: BigUint::one() << g_tilde,
        })
    }

    pub fn delta_positive(&self) -> bool {
        !self.delta.is_zero()
    }

    /// Bounds on `r W(ℓ) W(g̃) Δ`.
    pub fn rhs_bounds(&self, r: &BigUint) -> (Q, Q) {
        let scale = r * &self.w_g_tilde;
        let lo = &self.big_delta * (&scale * &self.w_ell.lower);
        let hi = &self.big_delta * (&scale * &self.w_ell.upper);
        (lo, hi)
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "ell": super::int_string(&self.ell),
            "w_ell": w_json(&self.w_ell),
            "sieved_primes": self.spec.sieved_primes.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
            "g_slots": self.spec.g_slots,
            "sieved_slots": self.sieved_slots,
            "v": self.v,
            "s": self.s,
            "s_prime": self.s_prime,
            "delta": ratio_string(&self.delta),
            "delta_prime": ratio_string(&self.delta_prime),
            "big_delta": ratio_string(&self.big_delta),
            "w_g_tilde": self.w_g_tilde.to_string(),
        })
    }
}

fn sieve_report(inst: &ProblemInstance, params: &SieveParams, extra: serde_json::Value) -> CriterionReport {
    if !params.delta_positive() {
        let mut r = CriterionReport::not_applicable(Criterion::Sieve, "delta <= 0", inst.factorization_refs());
        r.details["params"] = params.to_json();
        return r;
    }
    let (lo, hi) = params.rhs_bounds(&inst.r);
    let mut details = json!({ "params": params.to_json() });
    if !extra.is_null() {
        details["search"] = extra;
    }
    CriterionReport {
        criterion: Criterion::Sieve,
        verdict: interval_verdict(&inst.q, inst.twice_exponent(), &lo, &hi),
        lhs: inst.lhs_string(),
        rhs: interval_string(&lo, &hi),
        precision_bits: None,
        details,
        factorization_refs: inst.factorization_refs(),
    }
}

pub fn check_sieve(inst: &ProblemInstance, choice: &SieveChoice) -> Result<CriterionReport> {
    match choice {
        SieveChoice::Params(spec) => {
            let params = SieveParams::derive(inst, spec)?;
            Ok(sieve_report(inst, &params, serde_json::Value::Null))
        }
        SieveChoice::Auto => auto_sieve(inst),
    }
}

/// Greedy parameter search: start from [`SieveSpec::coprime_g`] and move the
/// largest known primes of `q^n - 1` into the sieved set one at a time while
/// δ stays positive, keeping the configuration with the best margin.
fn auto_sieve(inst: &ProblemInstance) -> Result<CriterionReport> {
    let mut primes: Vec<BigUint> = inst.fact_q.primes().cloned().collect();
    primes.sort_unstable_by(|a, b| b.cmp(a));
    let e = inst.twice_exponent();
    let mut spec = SieveSpec::coprime_g(inst);
    let mut best: Option<(Q, SieveParams)> = None;
    let mut tried = 0usize;
    for i in 0..=primes.len() {
        if i > 0 {
            spec.sieved_primes.push(primes[i - 1].clone());
        }
        let params = SieveParams::derive(inst, &spec)?;
        if !params.delta_positive() {
            break;
        }
        tried += 1;
        let (_, hi) = params.rhs_bounds(&inst.r);
        let margin = squared_margin(&inst.q, e, &hi);
        if best.as_ref().map_or(true, |(m, _)| margin > *m) {
            best = Some((margin, params));
        }
    }
    match best {
        Some((_, params)) => Ok(sieve_report(inst, &params, json!({ "strategy": "greedy", "configurations_tried": tried }))),
        None => {
            let params = SieveParams::derive(inst, &SieveSpec::coprime_g(inst))?;
            Ok(sieve_report(inst, &params, json!({ "strategy": "greedy", "configurations_tried": 0 })))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criteria::Verdict;

    fn inst(q: u64, n: usize, r: u64, k: usize) -> ProblemInstance {
        ProblemInstance::new(&BigUint::from(q), n, &BigUint::from(r), k).unwrap()
    }

    #[test]
    fn direct_examples() {
        let rep = check_direct(&inst(32, 2, 1, 0)).unwrap();
        assert_eq!(rep.verdict, Verdict::Exists);
        assert_eq!(rep.lhs, "32");
        // x^2 - 1 = (x + 1)^2 in characteristic 2, so W(x^2 - 1) = 2
        assert_eq!(rep.rhs, "16");
        assert_eq!(rep.details["equality"], false);
        let rep = check_direct(&inst(3, 2, 1, 1)).unwrap();
        assert_eq!(rep.verdict, Verdict::Inconclusive);
        assert_eq!(rep.lhs, "1");
        assert_eq!(check_direct(&inst(11, 8, 3, 3)).unwrap().verdict, Verdict::Inconclusive);
    }

    #[test]
    fn caseall_examples() {
        assert_eq!(check_caseall(&inst(3, 8, 1, 3)).unwrap().verdict, Verdict::NotApplicable);
        let rep = check_caseall(&inst(32, 2, 1, 0)).unwrap();
        assert_eq!(rep.verdict, Verdict::Exists);
        assert_eq!(rep.rhs, "32");
        let rep = check_caseall(&inst(121, 7, 3, 3)).unwrap();
        assert_eq!(rep.verdict, Verdict::Inconclusive);
        assert_eq!(rep.lhs, "1.100000000e1");
    }

    #[test]
    fn degenerate_sieve_is_trivial() {
        let i = inst(11, 8, 3, 3);
        let p = SieveParams::derive(&i, &SieveSpec::degenerate(&i)).unwrap();
        assert_eq!((p.v, p.s, p.s_prime), (0, 0, 0));
        assert_eq!(p.delta, Q::one());
        assert_eq!(p.delta_prime, Q::one());
        assert_eq!(p.big_delta, Q::one());
        assert_eq!(p.w_g_tilde, i.f.w_complement);
        assert_eq!(p.ell, i.group_order());
    }

    #[test]
    fn sieve_examples() {
        let rep = check_sieve(&inst(1331, 8, 3, 3), &SieveChoice::Auto).unwrap();
        assert_eq!(rep.verdict, Verdict::Exists, "{rep:?}");
        let i = inst(3, 2, 2, 1);
        for choice in [SieveChoice::Auto, SieveChoice::Params(SieveSpec::degenerate(&i))] {
            let rep = check_sieve(&i, &choice).unwrap();
            assert!(matches!(rep.verdict, Verdict::Inconclusive | Verdict::NotApplicable), "{rep:?}");
        }
    }

    #[test]
    fn sieve_rejects_unknown_prime() {
        let i = inst(11, 8, 3, 3);
        let mut spec = SieveSpec::degenerate(&i);
        spec.sieved_primes.push(BigUint::from(7u32));
        assert!(SieveParams::derive(&i, &spec).is_err());
    }
}
