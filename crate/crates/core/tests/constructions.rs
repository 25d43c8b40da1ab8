mod common;

use proptest::prelude::*;
use rbl_core::constructions::*;
use rbl_core::hypergraph::pipeline;
use rbl_core::verifier::verify;

proptest! {
    #[test]
    fn block_cyclic_shift_invariant(sizes in prop::collection::vec(1usize..=3, 1..=5), shift in 0usize..5) {
        let n: usize = sizes.iter().sum();
        let k = sizes.len();
        let shift = shift % k;
        let mut rotated = sizes.clone();
        rotated.rotate_left(shift);
        let a = block_cyclic(n, &sizes, &sizes).unwrap();
        let b = block_cyclic(n, &rotated, &rotated).unwrap();
        // Rotating both part lists moves every vertex by the same offset.
        let off: usize = sizes[..shift].iter().sum();
        let perm = |i: usize| (i + n - off) % n;
        let raw: Vec<u64> = (0..n * n).map(|e| b.color(perm(e / n), perm(e % n)) as u64).collect();
        let b_back = rbl_core::Coloring::compacted(n, raw).unwrap();
        prop_assert_eq!(a.canonical(), b_back.canonical());
    }

    #[test]
    fn star_lower_below_upper(n in 2usize..=20, t in 3usize..=9, q in 2usize..=5) {
        prop_assume!(2 * q <= t + 1 && n >= 1);
        let up = star_upper_i(n, t, q).unwrap();
        let lo = rbl_core::bounds::star_lower_bound(n as u64, t as u64, q as u64).unwrap();
        prop_assert!(lo as usize <= up.claim.palette);
    }
}

#[test]
fn constructions_match_brute_force() {
    let mut cases: Vec<ConstructionResult> = Vec::new();
    for n in 2..=6 {
        for t in 2..=5usize {
            for q in 2..=t {
                if 2 * q <= t + 1 {
                    cases.push(star_upper_i(n, t, q).unwrap());
                }
                if 2 * q >= t + 2 && n >= 2 * (t - q) {
                    cases.push(star_upper_ii(n, t, q).unwrap());
                }
                if n >= t && (t - 1) % (q - 1) != 0 {
                    cases.push(star_upper_refined(n, t, q).unwrap());
                }
            }
        }
        for s in 2..=3 {
            cases.push(near_rainbow_pairs(n, s, 3).unwrap());
            if n % 2 == 1 && n >= 3 {
                cases.push(near_rainbow_pairs_odd(n, s, 3).unwrap());
            }
        }
    }
    for c in &cases {
        let cl = c.claim;
        assert_eq!(cl.palette, c.coloring.palette_size());
        assert!(
            common::naive_valid(&c.coloring, cl.s, cl.t, cl.q),
            "{:?} {:?}",
            c.provenance,
            cl
        );
    }
}

#[test]
fn star_examples() {
    let c = star_upper_i(9, 5, 2).unwrap();
    assert_eq!(c.claim.palette, 3);
    let c = star_upper_ii(5, 4, 3).unwrap();
    assert_eq!(c.claim.palette, 4);
    assert!(verify(&c.coloring, c.claim.spec()).is_valid());
    let c = star_upper_refined(6, 6, 4).unwrap();
    assert_eq!(c.coloring.rows()[0], vec![1, 1, 2, 2, 3, 0]);
}

#[test]
fn pairing_palettes() {
    assert_eq!(near_rainbow_pairs(8, 3, 3).unwrap().claim.palette, 60);
    assert_eq!(k89_block(14).unwrap().claim.palette, 188);
    assert_eq!(k89_block(7).unwrap().claim.palette, 45);
}

#[test]
fn hypergraph_pipeline_properties() {
    for seed in 0..6 {
        let out = pipeline(7, 8, 2, 0.05, seed).unwrap();
        assert_eq!(out.sparse.verify_sparsity(8, 2).unwrap(), None);
        assert!(out.linear.is_linear());
        assert!(out.split.iter().all(|e| (e & out.part_a).count_ones() == 2));
        let res = hypergraph_coloring(7, 3, 5, None, 0.05, seed).unwrap();
        assert_eq!(res.claim.q, 13);
        assert_eq!(res.coloring.palette_size(), 49 - out.split.len());
        assert!(verify(&res.coloring, res.claim.spec()).is_valid());
    }
}

#[test]
fn invalid_parameters_rejected() {
    assert!(star_upper_i(5, 4, 3).is_err());
    assert!(star_upper_ii(5, 4, 2).is_err());
    assert!(star_upper_refined(6, 5, 3).is_err());
    assert!(near_rainbow_pairs_odd(6, 3, 3).is_err());
    assert!(hypergraph_coloring(6, 2, 3, None, 0.05, 0).is_err());
}
