//! Witness search for r-primitive, k-normal elements and self-contained
//! certificates that can be re-checked from the JSON record alone.

use num_bigint::{BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::criteria::ProblemInstance;
use crate::cyclopoly::degree_k_divisors;
use crate::elemprops::FieldContext;
use crate::error::{Error, Result};
use crate::gfield::{make_tower, Field, FieldModel, FieldTower, GFElement};
use crate::numth::{is_prime, IntFactorization};

/// Default number of candidates (random strategies) or elements (exhaustive).
pub const DEFAULT_BUDGET: u64 = 10_000_000;
/// Candidates generated sequentially and tested in parallel per round.
const BATCH: u64 = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Strategy {
    /// Every element in index order.
    Exhaustive,
    /// `γ^{r j}` for a primitive `γ` and `gcd(j, (q^n-1)/r) = 1`, tested for k-normality.
    RandomDirect,
    /// `f∘β` for a normal `β`, tested for r-primitivity.
    RandomPair,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceRecord {
    #[serde(with = "crate::serde_big::decimal")]
    pub q: BigUint,
    pub n: usize,
    #[serde(with = "crate::serde_big::decimal")]
    pub r: BigUint,
    pub k: usize,
}

/// `a^{ord/p} != 1` for one prime `p | ord`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeCheck {
    #[serde(with = "crate::serde_big::decimal")]
    pub prime: BigUint,
    /// Exponent of `prime` in `q^n - 1`.
    pub exponent: u32,
    /// Whether `prime` divides the claimed order (only those are checked).
    pub divides_order: bool,
    pub power_is_one: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    /// Multiplicative order, `(q^n - 1)/r`.
    #[serde(with = "crate::serde_big::decimal")]
    pub order: BigUint,
    pub per_prime_checks: Vec<PrimeCheck>,
    /// `deg gcd(x^n - 1, g_α)`.
    pub gcd_degree: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessRecord {
    pub instance: InstanceRecord,
    pub field: FieldModel,
    /// `n` rows of `s` base-p digits: the coordinates over `1, z, ..., z^{n-1}`.
    pub element: Vec<Vec<u64>>,
    pub certificate: Certificate,
    pub strategy: Strategy,
    pub seed: u64,
    pub candidates_tested: u64,
}

/// Builds the field of the instance (tower chosen by `seed`) with the
/// instance's factorization of `q^n - 1`.
pub fn field_context(inst: &ProblemInstance, seed: u64) -> Result<FieldContext> {
    if !inst.fact_q.is_complete() {
        return Err(Error::IncompleteFactorization(inst.fact_q.value.to_string()));
    }
    let tower = make_tower(inst.p, inst.s as usize, inst.n, seed)?;
    FieldContext::with_factorization(tower, inst.fact_q.clone())
}

fn is_witness(ctx: &FieldContext, a: &GFElement, r: &BigUint, k: usize) -> bool {
    !ctx.tower.is_zero(a) && ctx.r_index(a).map(|x| &x == r).unwrap_or(false) && ctx.normality_k(a) == k
}

/// Runs rounds of [`BATCH`] candidates: `make` draws candidates sequentially,
/// `test` runs in parallel, and the first success in draw order wins, so the
/// result does not depend on the thread count.
fn batched<C, M, T>(budget: u64, mut make: M, test: T) -> Option<(u64, C)>
where
    C: Send + Sync,
    M: FnMut(u64) -> Option<C>,
    T: Fn(&C) -> bool + Sync,
{
    let mut drawn = 0u64;
    while drawn < budget {
        let take = BATCH.min(budget - drawn);
        let batch: Vec<(u64, C)> = (0..take).map_while(|i| make(drawn + i).map(|c| (drawn + i, c))).collect();
        if batch.is_empty() {
            return None;
        }
        let len = batch.len() as u64;
        if let Some(pos) = batch.par_iter().position_first(|(_, c)| test(c)) {
            return batch.into_iter().nth(pos);
        }
        drawn += len;
        if len < take {
            return None;
        }
    }
    None
}

/// Searches for an element of `F_{q^n}` that is r-primitive and k-normal.
/// `seed` fixes both the field model and the candidate stream.
pub fn search_witness(inst: &ProblemInstance, strategy: Strategy, seed: u64, budget: u64) -> Result<WitnessRecord> {
    let ctx = field_context(inst, seed)?;
    search_in(&ctx, inst, strategy, seed, budget)
}

pub fn search_in(ctx: &FieldContext, inst: &ProblemInstance, strategy: Strategy, seed: u64, budget: u64) -> Result<WitnessRecord> {
    let t = &ctx.tower;
    let (r, k) = (&inst.r, inst.k);
    let found = match strategy {
        Strategy::Exhaustive => {
            let size = t.big_q();
            if size > &BigUint::from(budget) {
                return Err(Error::FieldTooLarge { size: size.to_string(), bound: budget.to_string() });
            }
            let size = u64::try_from(size).unwrap();
            batched(size, |i| Some(t.element(&BigUint::from(i))), |a| is_witness(ctx, a, r, k))
        }
        Strategy::RandomDirect => {
            let gamma = ctx.find_primitive(seed)?;
            let m = ctx.group_order() / r;
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xd1ec7);
            let upper = &m + 1u32;
            let sample = |_| loop {
                let j = rng.gen_biguint_range(&BigUint::one(), &upper);
                if j.gcd(&m).is_one() {
                    break Some(r * j);
                }
            };
            batched(budget, sample, |e| ctx.normality_k(&t.pow(&gamma, e)) == k).map(|(i, e)| (i, t.pow(&gamma, &e)))
        }
        Strategy::RandomPair => {
            // Every k-normal element is h∘β for a normal β and some degree-k
            // divisor h, so draws cycle through all of them (best first).
            let fs: Vec<Vec<u64>> = degree_k_divisors(&ctx.fact_x, k)?
                .into_iter()
                .map(|c| c.f.expect("explicit factorization"))
                .collect();
            if fs.is_empty() {
                return Err(Error::NoDegreeKDivisor { n: inst.n, k });
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9a1e);
            let sample = |i: u64| Some((t.random(&mut rng), &fs[(i % fs.len() as u64) as usize]));
            batched(budget, sample, |(b, f)| {
                ctx.normality_k(b) == 0 && {
                    let a = ctx.apply_poly(f, b);
                    !t.is_zero(&a) && ctx.r_index(&a).map(|x| &x == r).unwrap_or(false)
                }
            })
            .map(|(i, (b, f))| (i, ctx.apply_poly(f, &b)))
        }
    };
    let (index, element) = found.ok_or(Error::NotFound { budget })?;
    let certificate = certify(ctx, &element, r)?;
    if certificate.gcd_degree != k {
        return Err(Error::InvalidWitness("search produced an element of the wrong normality".into()));
    }
    Ok(WitnessRecord {
        instance: InstanceRecord { q: inst.q.clone(), n: inst.n, r: r.clone(), k },
        field: t.model(),
        element: t.to_matrix(&element),
        certificate,
        strategy,
        seed,
        candidates_tested: index + 1,
    })
}

fn certify(ctx: &FieldContext, a: &GFElement, r: &BigUint) -> Result<Certificate> {
    let t = &ctx.tower;
    let order = ctx.group_order() / r;
    let per_prime_checks = ctx
        .fact_q
        .factors
        .iter()
        .map(|pp| {
            let divides_order = (&order % &pp.prime).is_zero();
            let power_is_one = divides_order && t.is_one(&t.pow(a, &(&order / &pp.prime)));
            PrimeCheck { prime: pp.prime.clone(), exponent: pp.exponent, divides_order, power_is_one }
        })
        .collect();
    Ok(Certificate { order, per_prime_checks, gcd_degree: ctx.normality_k(a) })
}

/// Re-checks a record from scratch: rebuilds the tower (verifying both
/// moduli), re-proves the factorization of `q^n - 1` from the listed primes,
/// recomputes every per-prime check, and recomputes the gcd degree.
pub fn verify_witness(rec: &WitnessRecord) -> Result<()> {
    let bad = |m: &str| Err(Error::InvalidWitness(m.into()));
    let tower = FieldTower::from_model(&rec.field).map_err(|e| Error::InvalidWitness(format!("field model: {e}")))?;
    let inst = &rec.instance;
    if tower.q() != &inst.q || tower.n() != inst.n {
        return bad("field model does not match the instance");
    }
    let a = tower.from_matrix(&rec.element).map_err(|_| Error::InvalidWitness("element shape".into()))?;
    if tower.is_zero(&a) {
        return bad("element is zero");
    }
    let group = tower.big_q() - 1u32;
    if inst.r.is_zero() || !(&group % &inst.r).is_zero() {
        return bad("r does not divide q^n - 1");
    }
    let cert = &rec.certificate;
    if cert.order != &group / &inst.r {
        return bad("order is not (q^n - 1)/r");
    }
    let mut product = BigUint::one();
    for c in &cert.per_prime_checks {
        if !is_prime(&c.prime) {
            return bad("listed factor is not prime");
        }
        product *= c.prime.pow(c.exponent);
    }
    if product != group {
        return bad("listed prime powers do not multiply to q^n - 1");
    }
    if !tower.is_one(&tower.pow(&a, &cert.order)) {
        return bad("a^order != 1");
    }
    for c in &cert.per_prime_checks {
        let divides = (&cert.order % &c.prime).is_zero();
        if divides != c.divides_order {
            return bad("divisibility flag is wrong");
        }
        let is_one = divides && tower.is_one(&tower.pow(&a, &(&cert.order / &c.prime)));
        if is_one != c.power_is_one || is_one {
            return bad("per-prime order check fails");
        }
    }
    let fact = IntFactorization::from_parts(
        group.clone(),
        cert.per_prime_checks.iter().map(|c| (c.prime.clone(), c.exponent)),
        BigUint::one(),
        0,
    );
    let ctx = FieldContext::with_factorization(tower, fact)?;
    let k = ctx.normality_k(&a);
    if k != cert.gcd_degree || k != inst.k {
        return bad("gcd degree differs from the claimed k");
    }
    Ok(())
}
