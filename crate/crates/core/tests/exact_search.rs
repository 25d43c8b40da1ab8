mod common;

use rbl_core::exact::{exact_r, feasible, ExactStatus, Feasibility, SearchBudget, SearchStats};
use rbl_core::verifier::verify;
use rbl_core::PatternSpec;

fn decide(n: usize, sp: PatternSpec, c: usize) -> Feasibility {
    feasible(n, sp, c, &SearchBudget::default(), &mut SearchStats::default()).unwrap()
}

fn small_specs() -> Vec<PatternSpec> {
    let mut out = Vec::new();
    for s in 1..=2 {
        for t in s..=3 {
            for q in 2..=s * t {
                out.push(PatternSpec::new(s, t, q).unwrap());
            }
        }
    }
    out
}

#[test]
fn decisions_match_reference_enumeration() {
    for n in 2..=3 {
        for sp in small_specs() {
            for c in 1..=3 {
                let got = decide(n, sp, c);
                let reference = common::brute_feasible(n, sp.s, sp.t, sp.q, c);
                match got {
                    Feasibility::Yes(w) => {
                        assert!(reference, "n={n} {sp:?} c={c}");
                        assert!(w.palette_size() <= c);
                        assert!(common::naive_valid(&w, sp.s, sp.t, sp.q));
                    }
                    Feasibility::No => assert!(!reference, "n={n} {sp:?} c={c}"),
                    Feasibility::Unknown => panic!("budget ran out"),
                }
            }
        }
    }
}

#[test]
fn decision_is_monotone_in_palette() {
    for n in 2..=3 {
        for sp in small_specs() {
            let mut yes_seen = false;
            for c in 1..=n * n {
                let yes = matches!(decide(n, sp, c), Feasibility::Yes(_));
                assert!(!(yes_seen && !yes), "n={n} {sp:?} c={c}");
                yes_seen |= yes;
            }
            assert!(yes_seen);
        }
    }
}

#[test]
fn proper_edge_coloring_needs_n_colors() {
    for n in 1..=4 {
        let r = exact_r(n, PatternSpec::new(1, 2, 2).unwrap(), &SearchBudget::default()).unwrap();
        assert_eq!(r.status, ExactStatus::Exact);
        assert_eq!(r.value, Some(if n < 2 { 1 } else { n }));
    }
}

#[test]
fn exact_monotone_in_q_and_witness_valid() {
    for n in 2..=3 {
        for (s, t) in [(1, 2), (1, 3), (2, 2), (2, 3)] {
            let mut prev = 0;
            for q in 2..=s * t {
                let sp = PatternSpec::new(s, t, q).unwrap();
                let r = exact_r(n, sp, &SearchBudget::default()).unwrap();
                assert_eq!(r.status, ExactStatus::Exact);
                let v = r.value.unwrap();
                assert!(v >= prev, "n={n} ({s},{t},{q})");
                prev = v;
                let w = r.witness.unwrap();
                assert_eq!(w.palette_size(), v);
                assert!(verify(&w, sp).is_valid() || r.vacuous);
            }
        }
    }
}

#[test]
fn worked_examples() {
    let sp = PatternSpec::new(2, 2, 4).unwrap();
    assert_eq!(decide(2, sp, 3), Feasibility::No);
    assert!(matches!(decide(2, sp, 4), Feasibility::Yes(_)));
    let sp = PatternSpec::new(1, 3, 2).unwrap();
    assert_eq!(decide(3, sp, 1), Feasibility::No);
    assert!(matches!(decide(3, sp, 2), Feasibility::Yes(_)));
    let r = exact_r(4, PatternSpec::new(1, 4, 3).unwrap(), &SearchBudget::default()).unwrap();
    assert_eq!(r.value, Some(3));
    assert!(feasible(2, sp, 5, &SearchBudget::default(), &mut SearchStats::default()).is_err());
}

#[test]
fn tiny_budget_gives_bracket() {
    let budget = SearchBudget {
        node_limit: 3,
        ..SearchBudget::default()
    };
    let r = exact_r(3, PatternSpec::new(2, 2, 3).unwrap(), &budget).unwrap();
    assert_ne!(r.status, ExactStatus::Exact);
    assert!(r.lo <= r.hi);
    assert!(r.value.is_none());
}
