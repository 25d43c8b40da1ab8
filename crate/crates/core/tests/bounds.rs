mod common;

use proptest::prelude::*;
use rbl_core::bounds::*;
use rbl_core::constructions::star_upper_refined;

#[test]
fn gen_corradi_reduces_at_r2() {
    for a in 1..=30u64 {
        for m in 2..=30u64 {
            for ell in 0..=30u64 {
                assert_eq!(gen_corradi_ratio(a, m, ell, 2).unwrap(), corradi_bound(a, m, ell));
            }
        }
    }
}

#[test]
fn gen_corradi_below_measured_union() {
    // a = 3, m = 4, l = 1, r = 3: random families meeting the hypotheses.
    let bound = gen_corradi_bound(3, 4, 1, 3).unwrap();
    let mut found = 0;
    let mut seed = 0u64;
    while found < 200 {
        seed += 1;
        let inst = random_instance(seed, 3).unwrap();
        if inst.sets.len() != 4 || inst.a < 3 || inst.ell > 1 {
            continue;
        }
        let inst = SetFamilyInstance { a: 3, ell: 1, ..inst };
        let c = check_corradi_instance(&inst);
        assert!(c.hypotheses_ok);
        assert!(c.union_size as f64 >= bound);
        found += 1;
    }
}

#[test]
fn random_families_satisfied() {
    for r in [2, 3] {
        for seed in 0..10_000 {
            let c = check_corradi_instance(&random_instance(seed, r).unwrap());
            assert!(c.hypotheses_ok && c.satisfied, "seed {seed} r {r}");
        }
    }
}

#[test]
fn zarankiewicz_dominates_search() {
    assert_eq!(common::max_c4_free_edges(3), 6);
    assert!(zarankiewicz_upper(3, 3, 2, 2) >= 6.0);
}

#[test]
fn a1_clean_in_default_range() {
    assert!(lemma_a1_check(200, 600).unwrap().is_empty());
}

#[test]
fn refined_examples() {
    assert_eq!(refined_r(7, 4, 3).unwrap(), 6);
    assert_eq!(star_upper_refined(7, 4, 3).unwrap().claim.palette, 6);
}

proptest! {
    #[test]
    fn refined_sandwich(n in 1usize..=40, t in 3usize..=10, q in 2usize..=9) {
        prop_assume!(q <= t && (t - 1) % (q - 1) != 0 && n >= t);
        let lo = refined_r(n as u64, t as u64, q as u64).unwrap();
        let hi = star_upper_refined(n, t, q).unwrap().claim.palette;
        prop_assert!(lo as usize <= hi, "lo {} hi {}", lo, hi);
    }

    #[test]
    fn refined_at_least_simple_bound(n in 1u64..=60, t in 3u64..=12, q in 2u64..=6) {
        prop_assume!(2 * q <= t + 1);
        prop_assert!(refined_r(n, t, q).unwrap() >= star_lower_bound(n, t, q).unwrap());
    }

    #[test]
    fn classify_is_sane(s in 1usize..=7, dt in 0usize..=5, q in 2usize..=60) {
        let t = s + dt;
        prop_assume!(q <= s * t);
        let r = threshold_classify(s, t, q).unwrap();
        prop_assert!(r.best_lower_exponent() <= r.best_upper_exponent() + 1e-12);
        for b in &r.bounds {
            if let Some(e) = b.exponent {
                prop_assert!(e.is_finite() && (0.0..=2.0).contains(&e));
            }
        }
    }
}
