//! Exhaustive checks shared by the integration tests and the acceptance run.
//! Each returns `Err` with a description of the first disagreement.
#![allow(dead_code)]

use std::collections::{HashMap, HashSet};

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use rfkn_core::criteria::{check_auto, check_sieve, SieveChoice, SieveSpec};
use rfkn_core::elemprops::FieldContext;
use rfkn_core::gfield::{make_tower, poly, BaseField, Field, GFElement};
use rfkn_core::witness::{search_witness, verify_witness, Strategy};
use rfkn_core::{Error, ProblemInstance, Verdict};

/// `(p, s, n)` with `q = p^s`: the fields enumerated element by element.
pub const EXHAUSTIVE_FIELDS: [(u64, u32, usize); 6] = [(2, 1, 2), (2, 1, 4), (3, 1, 2), (3, 1, 4), (2, 2, 3), (5, 1, 3)];

pub fn context(p: u64, s: u32, n: usize, seed: u64) -> FieldContext {
    FieldContext::new(make_tower(p, s as usize, n, seed).unwrap()).unwrap()
}

fn big(n: u64) -> BigUint {
    BigUint::from(n)
}

/// Euler's phi by counting.
pub fn phi_brute(m: u64) -> u64 {
    (1..=m).filter(|i| i.gcd(&m) == 1).count() as u64
}

/// Units of `F_q[x]/(h)` by counting residues coprime to `h`.
pub fn poly_phi_brute(base: &BaseField, h: &[u64]) -> u64 {
    let d = h.len() - 1;
    let q = base.q();
    let mut count = 0;
    for idx in 0..q.pow(d as u32) {
        let mut a = Vec::with_capacity(d.max(1));
        let mut x = idx;
        for _ in 0..d.max(1) {
            a.push(x % q);
            x /= q;
        }
        let a = poly::trim(base, a);
        if poly::gcd(base, &a, h).unwrap() == poly::one(base) {
            count += 1;
        }
    }
    count
}

/// `n - rank` of the Frobenius orbit of `a`, by elimination over F_q.
pub fn normality_by_rank(ctx: &FieldContext, a: &GFElement) -> usize {
    let base = ctx.tower.base();
    let n = ctx.tower.n();
    let mut rows: Vec<Vec<u64>> = ctx.tower.frobenius_orbit(a).into_iter().map(|e| e.0).collect();
    let mut rank = 0;
    for col in 0..n {
        let Some(piv) = (rank..rows.len()).find(|&i| !base.is_zero(&rows[i][col])) else { continue };
        rows.swap(rank, piv);
        let inv = base.inv(&rows[rank][col]).unwrap();
        let pivot: Vec<u64> = rows[rank].iter().map(|c| base.mul(c, &inv)).collect();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != rank && !base.is_zero(&row[col]) {
                let c = row[col];
                for (x, y) in row.iter_mut().zip(&pivot) {
                    *x = base.sub(x, &base.mul(&c, y));
                }
            }
        }
        rows[rank] = pivot;
        rank += 1;
    }
    n - rank
}

/// `h∘b = Σ h_i b^{q^i}` from powers alone.
pub fn apply_by_powers(ctx: &FieldContext, h: &[u64], b: &GFElement) -> GFElement {
    let t = &ctx.tower;
    let q = t.q().clone();
    let mut acc = t.zero();
    let mut frob = b.clone();
    for &c in h {
        acc = t.add(&acc, &t.mul(&t.embed(c), &frob));
        frob = t.pow(&frob, &q);
    }
    acc
}

fn divisor_polys(ctx: &FieldContext) -> Vec<Vec<u64>> {
    ctx.fact_x.all_divisor_exponents().unwrap().iter().map(|e| ctx.fact_x.product(e).unwrap()).collect()
}

/// `#normal = Φ_q(x^n-1)`, `#(order (q^n-1)/r) = φ((q^n-1)/r)` for every
/// `r | q^n-1`, `#{Ord = h} = Φ_q(h)` and `Σ_h Φ_q(h) = q^n`.
pub fn counting_identities(p: u64, s: u32, n: usize) -> Result<(), String> {
    let ctx = context(p, s, n, 1);
    let t = &ctx.tower;
    let base = t.base();
    let all = t.elements();
    let size = t.big_q().to_u64().unwrap();
    let m = size - 1;
    let label = format!("q = {}, n = {n}", t.q());

    let xn1 = ctx.fact_x.xn1().unwrap();
    let normal = all.iter().filter(|a| normality_by_rank(&ctx, a) == 0).count() as u64;
    let phi_x = ctx.fact_x.phi_q(&xn1).unwrap();
    if big(normal) != phi_x || normal != poly_phi_brute(base, &xn1) {
        return Err(format!("{label}: {normal} normal elements, Phi_q(x^n-1) = {phi_x}"));
    }
    for a in &all {
        if ctx.normality_k(a) != normality_by_rank(&ctx, a) {
            return Err(format!("{label}: normality of {a:?} disagrees with the orbit rank"));
        }
    }

    let mut by_order: HashMap<u64, u64> = HashMap::new();
    for a in all.iter().filter(|a| !t.is_zero(a)) {
        *by_order.entry(ctx.mult_order(a).unwrap().to_u64().unwrap()).or_default() += 1;
    }
    for r in (1..=m).filter(|r| m % r == 0) {
        let got = by_order.get(&(m / r)).copied().unwrap_or(0);
        if got != phi_brute(m / r) {
            return Err(format!("{label}: {got} elements of order {}, expected {}", m / r, phi_brute(m / r)));
        }
    }

    let mut by_ord: HashMap<Vec<u64>, u64> = HashMap::new();
    for a in &all {
        *by_ord.entry(ctx.fq_order(a)).or_default() += 1;
    }
    let mut total = BigUint::zero();
    for h in divisor_polys(&ctx) {
        let phi = ctx.fact_x.phi_q(&h).unwrap();
        let brute = poly_phi_brute(base, &h);
        let got = by_ord.get(&h).copied().unwrap_or(0);
        if phi != big(brute) || got != brute {
            return Err(format!("{label}: h = {h:?}: Phi_q = {phi}, residues {brute}, elements {got}"));
        }
        total += phi;
    }
    if total != big(size) {
        return Err(format!("{label}: sum of Phi_q(h) = {total}, expected {size}"));
    }
    Ok(())
}

/// Fast m-free and g-free tests against their definitions, for every element
/// and every divisor.
pub fn freeness_oracles(p: u64, s: u32, n: usize) -> Result<(), String> {
    let ctx = context(p, s, n, 2);
    let t = &ctx.tower;
    let all = t.elements();
    let nonzero: Vec<GFElement> = all.iter().filter(|a| !t.is_zero(a)).cloned().collect();
    let m = t.big_q().to_u64().unwrap() - 1;
    let label = format!("q = {}, n = {n}", t.q());

    for mdiv in (1..=m).filter(|d| m % d == 0) {
        let mut powers = HashSet::new();
        for d in (2..=mdiv).filter(|d| mdiv % d == 0) {
            powers.extend(nonzero.iter().map(|b| t.pow_u64(b, d)));
        }
        let lib = ctx.m_free_set_definitional(&big(mdiv)).unwrap();
        for a in &nonzero {
            let fast = ctx.is_m_free(a, &big(mdiv)).unwrap();
            if fast == powers.contains(a) || fast != lib.contains(a) {
                return Err(format!("{label}: m = {mdiv}, element {a:?}: fast test says {fast}"));
            }
        }
    }

    let divisors = divisor_polys(&ctx);
    for g in &divisors {
        let mut images = HashSet::new();
        for h in divisors.iter().filter(|h| h.len() > 1 && poly::divides(t.base(), h, g).unwrap()) {
            images.extend(all.iter().map(|b| apply_by_powers(&ctx, h, b)));
        }
        let lib = ctx.g_free_set_definitional(g).unwrap();
        for a in &all {
            let fast = ctx.is_g_free(a, g).unwrap();
            if fast == images.contains(a) || fast != lib.contains(a) {
                return Err(format!("{label}: g = {g:?}, element {a:?}: fast test says {fast}"));
            }
        }
    }
    Ok(())
}

/// `N_{1,1}(8, x^2-1) = 4` and `N_{2,x+1}(8, x^2-1) = 0` over `F_9/F_3`,
/// counted by the library and by a direct double loop.
pub fn pair_count_spot_values() -> Result<(), String> {
    let ctx = context(3, 1, 2, 0);
    let t = &ctx.tower;
    let g = vec![2, 0, 1];
    let all = t.elements();
    for (r, f, expected) in [(1u64, vec![1u64], 4u64), (2, vec![1, 1], 0)] {
        let lib = ctx.count_pairs(&big(r), &f, &big(8), &g, 1000).map_err(|e| e.to_string())?;
        let mut brute = 0;
        for a in all.iter().filter(|a| !t.is_zero(a) && ctx.is_m_free(a, &big(8)).unwrap()) {
            let ar = t.pow_u64(a, r);
            brute += all.iter().filter(|b| ctx.is_g_free(b, &g).unwrap() && apply_by_powers(&ctx, &f, b) == ar).count();
        }
        if lib != big(expected) || brute as u64 != expected {
            return Err(format!("N_{{{r},{f:?}}}(8, x^2-1): library {lib}, enumeration {brute}, expected {expected}"));
        }
    }
    Ok(())
}

#[derive(Debug, Default)]
pub struct SweepStats {
    pub instances: usize,
    pub criterion_exists: usize,
    pub witnesses: usize,
    /// Instances where a witness exists but no criterion reports EXISTS.
    pub silent: usize,
    pub no_witness: usize,
}

fn prime_powers(limit: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    for p in (2..=limit).filter(|&p| (2..p).take_while(|d| d * d <= p).all(|d| p % d != 0)) {
        let mut q = p;
        let mut s = 1;
        while q <= limit {
            out.push((p, s));
            q *= p;
            s += 1;
        }
    }
    out
}

/// Every `(q, n, r, k)` with `q^n <= limit`, `r | q^n - 1` and a degree-k
/// divisor: whenever a criterion reports EXISTS, exhaustive search must find
/// a witness that verifies.
pub fn soundness_sweep(limit: u64) -> Result<SweepStats, String> {
    let mut stats = SweepStats::default();
    for (p, s) in prime_powers(limit) {
        let q = p.pow(s);
        let mut n = 1;
        while q.pow(n as u32) <= limit {
            let m = q.pow(n as u32) - 1;
            for k in 0..n {
                for r in (1..=m).filter(|r| m % r == 0) {
                    let inst = match ProblemInstance::new(&big(q), n, &big(r), k) {
                        Ok(i) => i,
                        Err(Error::NoDegreeKDivisor { .. }) => break,
                        Err(e) => return Err(format!("({q},{n},{r},{k}): {e}")),
                    };
                    stats.instances += 1;
                    let mut reports = check_auto(&inst).map_err(|e| e.to_string())?;
                    for spec in [SieveSpec::degenerate(&inst), SieveSpec::coprime_g(&inst)] {
                        reports.push(check_sieve(&inst, &SieveChoice::Params(spec)).map_err(|e| e.to_string())?);
                    }
                    let claimed = reports.iter().find(|r| r.verdict == Verdict::Exists);
                    let found = match search_witness(&inst, Strategy::Exhaustive, 0, limit) {
                        Ok(rec) => {
                            verify_witness(&rec).map_err(|e| format!("({q},{n},{r},{k}): {e}"))?;
                            true
                        }
                        Err(Error::NotFound { .. }) => false,
                        Err(e) => return Err(format!("({q},{n},{r},{k}): {e}")),
                    };
                    stats.witnesses += found as usize;
                    stats.no_witness += !found as usize;
                    if let Some(rep) = claimed {
                        stats.criterion_exists += 1;
                        if !found {
                            return Err(format!("({q},{n},{r},{k}): {:?} reports EXISTS but no witness exists", rep.criterion));
                        }
                    } else if found {
                        stats.silent += 1;
                    }
                }
            }
            n += 1;
        }
    }
    Ok(stats)
}
