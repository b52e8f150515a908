use num_bigint::BigUint;
use num_traits::{One, Zero};
use proptest::prelude::*;

use rfkn_core::criteria::{check_direct, check_sieve, cota_params, n7_constants, tu_params, SieveChoice, SieveSpec};
use rfkn_core::gfield::{make_tower, Field, FieldTower};
use rfkn_core::numth::BigReal;
use rfkn_core::published;
use rfkn_core::repro::row_threshold;
use rfkn_core::{ProblemInstance, Verdict};

const TOWERS: [(u64, usize, usize); 6] = [(2, 1, 8), (3, 2, 3), (5, 1, 4), (11, 1, 8), (2, 4, 5), (7, 2, 2)];

fn tower(i: usize) -> FieldTower {
    let (p, s, n) = TOWERS[i];
    make_tower(p, s, n, i as u64).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn field_axioms(i in 0..TOWERS.len(), x in any::<u64>(), y in any::<u64>(), z in any::<u64>()) {
        let t = tower(i);
        let size = t.big_q().clone();
        let [a, b, c] = [x, y, z].map(|v| t.element(&(BigUint::from(v) % &size)));
        prop_assert_eq!(t.add(&a, &b), t.add(&b, &a));
        prop_assert_eq!(t.mul(&a, &b), t.mul(&b, &a));
        prop_assert_eq!(t.mul(&t.mul(&a, &b), &c), t.mul(&a, &t.mul(&b, &c)));
        prop_assert_eq!(t.add(&t.add(&a, &b), &c), t.add(&a, &t.add(&b, &c)));
        prop_assert_eq!(t.mul(&a, &t.add(&b, &c)), t.add(&t.mul(&a, &b), &t.mul(&a, &c)));
        prop_assert_eq!(t.add(&a, &t.neg(&a)), t.zero());
        if !t.is_zero(&a) {
            prop_assert!(t.is_one(&t.mul(&a, &t.inv(&a).unwrap())));
            prop_assert!(t.is_one(&t.pow(&a, &(&size - 1u32))));
        }
        let q = t.q().clone();
        prop_assert_eq!(t.pow(&t.add(&a, &b), &q), t.add(&t.pow(&a, &q), &t.pow(&b, &q)));
        prop_assert_eq!(t.frobenius(&a, t.n() as i64), a.clone());
        prop_assert_eq!(t.frobenius_once(&a), t.pow(&a, &q));
    }

    #[test]
    fn admits_is_monotone(row in 0..10usize, a in 0u32..4000, b in 0u32..4000) {
        let rows = &published::bundled().threshold_table.rows;
        let r = &rows[row];
        let three = BigUint::from(3u32);
        let (lo, hi) = (a.min(b), a.max(b));
        // Probe around the threshold on a log scale.
        let th = row_threshold(r, 3, 3, 256).unwrap().ceil_biguint();
        let scale = |e: u32| (&th * BigUint::from(e + 1)) / 2000u32;
        let admits = |q: &BigUint| match &r.u {
            Some(u) => tu_params(r.n, 3, &three, &r.t, u, 256).unwrap().admits(q),
            None => cota_params(r.n, 3, &three, &r.t, 256).unwrap().admits(q),
        };
        if admits(&scale(lo)) {
            prop_assert!(admits(&scale(hi)));
        }
    }
}

/// Smallest integer accepted by `admits`, by bisection.
fn bisect(admits: impl Fn(&BigUint) -> bool, mut hi: BigUint) -> BigUint {
    let mut lo = BigUint::one();
    assert!(admits(&hi));
    while lo < hi {
        let mid = (&lo + &hi) / 2u32;
        if admits(&mid) {
            hi = mid;
        } else {
            lo = mid + 1u32;
        }
    }
    lo
}

#[test]
fn bisection_boundary_is_the_rounded_up_threshold() {
    let three = BigUint::from(3u32);
    for r in &published::bundled().threshold_table.rows {
        let th = row_threshold(r, 3, 3, 256).unwrap();
        let admits = |q: &BigUint| match &r.u {
            Some(u) => tu_params(r.n, 3, &three, &r.t, u, 256).unwrap().admits(q),
            None => cota_params(r.n, 3, &three, &r.t, 256).unwrap().admits(q),
        };
        let hi = th.ceil_biguint() * 2u32 + 1u32;
        let boundary = bisect(admits, hi);
        // Integers this large are not resolved exactly at 256 bits.
        if th.ceil_biguint().bits() < 200 {
            assert_eq!(boundary, th.ceil_biguint(), "row {}", r.id);
        } else {
            assert!(close(&BigReal::from_biguint(&boundary, 256), &th, 200), "row {}", r.id);
        }
    }
}

fn close(a: &BigReal, b: &BigReal, bits: u64) -> bool {
    let p = a.precision();
    a.rel_gap(b) < BigReal::pow2(&BigReal::from_u64(bits, p)).recip()
}

#[test]
fn thresholds_agree_across_precisions() {
    for r in &published::bundled().threshold_table.rows {
        let lo = row_threshold(r, 3, 3, 256).unwrap();
        let hi = row_threshold(r, 3, 3, 512).unwrap();
        assert!(close(&lo, &hi.with_precision(256), 200), "row {}: {} vs {}", r.id, lo.to_sci(20), hi.to_sci(20));
        if lo.ceil_biguint().bits() < 200 {
            assert_eq!(lo.ceil_biguint(), hi.ceil_biguint(), "row {}", r.id);
        }
    }
    for r in &published::bundled().single_window_constants {
        let lo = row_threshold(r, 3, 3, 256).unwrap();
        let hi = row_threshold(r, 3, 3, 512).unwrap();
        assert!(close(&lo, &hi.with_precision(256), 200), "{}", r.id);
    }
    let a = n7_constants(256).unwrap();
    let b = n7_constants(512).unwrap();
    assert_eq!(a.v, b.v);
    assert!(close(&a.threshold, &b.threshold.with_precision(256), 200));
    assert_eq!(a.big_delta, b.big_delta);
    assert!(close(&a.q_max, &b.q_max.with_precision(256), 200));
}

const GRID_Q: [u64; 16] = [2, 3, 4, 5, 7, 8, 9, 11, 13, 16, 25, 27, 32, 49, 64, 121];

#[test]
fn sieve_dominates_direct() {
    let mut checked = 0;
    for q in GRID_Q {
        for n in 2..=8usize {
            let m = BigUint::from(q).pow(n as u32) - 1u32;
            for r in (1..=60u64).filter(|&r| (&m % r).is_zero()) {
                for k in 0..n {
                    let Ok(inst) = ProblemInstance::new(&BigUint::from(q), n, &BigUint::from(r), k) else { continue };
                    if check_direct(&inst).unwrap().verdict != Verdict::Exists {
                        continue;
                    }
                    checked += 1;
                    let degenerate = check_sieve(&inst, &SieveChoice::Params(SieveSpec::degenerate(&inst))).unwrap();
                    assert_eq!(degenerate.verdict, Verdict::Exists, "({q},{n},{r},{k}) degenerate sieve");
                    let auto = check_sieve(&inst, &SieveChoice::Auto).unwrap();
                    assert_eq!(auto.verdict, Verdict::Exists, "({q},{n},{r},{k}) greedy sieve");
                }
            }
        }
    }
    assert!(checked > 50, "only {checked} instances passed the direct test");
}
