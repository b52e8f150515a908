//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on failure.
//! Set `RFKN_STRETCH=1` to also search for witnesses in F_{11^10} and F_{121^7}.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_rational::Ratio;
use num_traits::{One, Zero};

use rfkn_core::criteria::n7_constants;
use rfkn_core::numth::{bigreal::start_precision, parse_decimal, BigReal};
use rfkn_core::published;
use rfkn_core::repro::{self, ReproResult};
use rfkn_core::witness::{search_witness, verify_witness, Strategy, DEFAULT_BUDGET};
use rfkn_core::ProblemInstance;

type Outcome = Result<String, String>;

fn suite(res: rfkn_core::Result<ReproResult>) -> Outcome {
    let res = res.map_err(|e| e.to_string())?;
    let bad: Vec<String> =
        res.rows.iter().filter(|r| !r.matches).map(|r| format!("{}: {} vs {}", r.id, r.computed, r.published)).collect();
    if bad.is_empty() {
        Ok(format!("{} rows match", res.rows.len()))
    } else {
        Err(bad.join("; "))
    }
}

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

/// The n = 7 constants, plus a second count of the primes `7j + 1` by trial
/// division: `v`, the product bound and the inverse sum.
fn n7_lemma() -> Outcome {
    let summary = suite(repro::reproduce_n7_constants())?;
    let c = n7_constants(start_precision()).map_err(|e| e.to_string())?;
    let publ = &published::bundled().n7_lemma;
    let bound = parse_decimal(&publ.product_bound).map_err(|e| e.to_string())?.to_integer();

    let mut product = BigUint::one();
    let mut sum = Ratio::<BigUint>::zero();
    let mut primes = (1u64..).map(|j| 7 * j + 1).filter(|&p| is_prime(p));
    let mut v = 0;
    let next = loop {
        let p = primes.next().unwrap();
        if &product * p > bound {
            break p;
        }
        product *= p;
        sum += Ratio::new(BigUint::one(), BigUint::from(p));
        v += 1;
    };
    if v != c.v || v > publ.v_max {
        return Err(format!("v = {} by trial division, {} in the library", v, c.v));
    }
    if next != c.next_prime {
        return Err(format!("first excluded prime {next}, library {}", c.next_prime));
    }
    if sum != c.inverse_sum {
        return Err("inverse sums differ".into());
    }
    if BigReal::from_biguint(&product, c.precision_bits) > c.product_bound {
        return Err("product of the first v primes exceeds the recomputed bound".into());
    }
    Ok(format!("{summary}; v = {v}, S_v = {}, threshold {}", rfkn_core::numth::ratio_to_sci(&sum, 8), c.threshold.to_sci(6)))
}

fn exhaustive<F: Fn(u64, u32, usize) -> Result<(), String>>(check: F) -> Outcome {
    for (p, s, n) in common::EXHAUSTIVE_FIELDS {
        check(p, s, n)?;
    }
    Ok(format!("{} fields", common::EXHAUSTIVE_FIELDS.len()))
}

fn sweep() -> Outcome {
    let s = common::soundness_sweep(625)?;
    Ok(format!(
        "{} instances, {} with EXISTS (all certified), {} with a witness, {} without",
        s.instances, s.criterion_exists, s.witnesses, s.no_witness
    ))
}

fn witness(q: u64, n: usize) -> Outcome {
    let inst = ProblemInstance::new(&BigUint::from(q), n, &BigUint::from(3u32), 3).map_err(|e| e.to_string())?;
    let rec = search_witness(&inst, Strategy::RandomDirect, 0, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
    verify_witness(&rec).map_err(|e| format!("certificate rejected: {e}"))?;
    Ok(format!(
        "(q, n) = ({q}, {n}): order {}, gcd degree {}, {} candidates",
        rec.certificate.order, rec.certificate.gcd_degree, rec.candidates_tested
    ))
}

struct Criterion {
    id: &'static str,
    name: &'static str,
    limit: Option<Duration>,
    run: fn() -> Outcome,
}

fn main() -> ExitCode {
    let secs = |s| Some(Duration::from_secs(s));
    let mut criteria = vec![
        Criterion { id: "1", name: "threshold table", limit: secs(60), run: || suite(repro::reproduce_table1()) },
        Criterion { id: "2", name: "n = 7 constants", limit: secs(10), run: n7_lemma },
        Criterion {
            id: "3",
            name: "single-window proof constants",
            limit: None,
            run: || suite(repro::reproduce_window_constants()),
        },
        Criterion {
            id: "4",
            name: "characteristic-11 replay",
            limit: secs(600),
            run: || suite(repro::reproduce_corollary11()),
        },
        Criterion { id: "5", name: "counting identities", limit: None, run: || exhaustive(common::counting_identities) },
        Criterion { id: "6", name: "freeness oracles", limit: None, run: || exhaustive(common::freeness_oracles) },
        Criterion { id: "7", name: "soundness sweep q^n <= 625", limit: secs(300), run: sweep },
        Criterion {
            id: "8",
            name: "pair counts over F_9",
            limit: None,
            run: || common::pair_count_spot_values().map(|_| "N = 4 and N = 0".into()),
        },
        Criterion { id: "9", name: "witness in F_{11^8}", limit: secs(900), run: || witness(11, 8) },
    ];
    if std::env::var_os("RFKN_STRETCH").is_some() {
        criteria.push(Criterion { id: "9a", name: "witness in F_{11^10}", limit: secs(900), run: || witness(11, 10) });
        criteria.push(Criterion { id: "9b", name: "witness in F_{121^7}", limit: secs(900), run: || witness(121, 7) });
    }

    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = (c.run)();
        let took = start.elapsed();
        let outcome = match (outcome, c.limit) {
            (Ok(msg), Some(limit)) if took > limit => Err(format!("{msg}; took {took:.1?}, limit {limit:?}")),
            (o, _) => o,
        };
        match outcome {
            Ok(msg) => println!("PASS {:>2} {} ({took:.1?}): {msg}", c.id, c.name),
            Err(msg) => {
                failed += 1;
                println!("FAIL {:>2} {} ({took:.1?}): {msg}", c.id, c.name);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
