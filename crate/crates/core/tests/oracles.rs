//! The optimized library against brute-force references.

mod common;

use common::*;
use f2sumset::group;
use f2sumset::search::{self, Mode};
use f2sumset::structure;
use f2sumset::theorems::{self, Outcome};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn all_sets(n: u32) -> impl Iterator<Item = (u64, Vec<u32>)> {
    (0..1u64 << (1u32 << n)).map(move |m| (m, elems(&from_mask(n, m))))
}

#[test]
fn group_operations_match_on_small_ranks() {
    for n in 0..=3 {
        let sets: Vec<_> = all_sets(n).collect();
        for (ma, a) in &sets {
            let sa = from_mask(n, *ma);
            if !a.is_empty() {
                let span = group::affine_span(&sa).unwrap();
                let (rep, sub) = affine_span(n, a);
                assert_eq!(span.rep().bits(), rep);
                assert_eq!(elems(span.subgroup().members()), sub);
            }
            assert_eq!(elems(group::period(&sa).subgroup.members()), period(n, a));
            for (mb, b) in &sets {
                let sb = from_mask(n, *mb);
                let s = group::sumset(&sa, &sb).unwrap();
                assert_eq!(elems(&s), sumset(n, a, b));
                if !a.is_empty() && !b.is_empty() {
                    assert_eq!(group::mu(&sa, &sb).unwrap(), mu(n, a, b));
                }
            }
        }
    }
}

#[test]
fn main_theorem_verdicts_match_brute_force_at_rank_three() {
    let sets: Vec<_> = all_sets(3).filter(|(_, s)| !s.is_empty()).collect();
    let mut hypotheses = 0u64;
    for (ma, a) in &sets {
        for (mb, b) in &sets {
            let v = theorems::check_main(&from_mask(3, *ma), &from_mask(3, *mb)).unwrap();
            let hyp = main_hypotheses(3, a, b);
            assert_eq!(v.hypotheses_hold, hyp);
            if hyp {
                hypotheses += 1;
                assert_eq!(v.conclusion_holds, containment_conclusion(3, a, b, 3));
            }
        }
    }
    // brute-force count, frozen as a regression value
    assert_eq!(hypotheses, 448);
    let report = search::sweep_main(3, Mode::Exhaustive, 0, 0).unwrap();
    assert_eq!(report.tally.hypotheses_hold, hypotheses);
}

#[test]
fn main_and_asymmetric_verdicts_match_on_random_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut agreeing_hypotheses = 0;
    for n in [4u32, 5] {
        for _ in 0..3000 {
            let a = random_spanning(&mut rng, n);
            // a planted missing element makes the hypotheses likely
            let m = rng.gen_range(0..1u32 << n);
            let sa = sumset(n, &a, &[m]);
            let forbidden = indicator(n, &sa);
            let b: Vec<u32> = (0..1u32 << n)
                .filter(|&x| !forbidden[x as usize] && rng.gen_bool(0.9))
                .collect();
            if b.is_empty() {
                continue;
            }
            let (la, lb) = (set(n, &a), set(n, &b));
            let v = theorems::check_main(&la, &lb).unwrap();
            assert_eq!(v.hypotheses_hold, main_hypotheses(n, &a, &b));
            if v.hypotheses_hold {
                agreeing_hypotheses += 1;
                assert_eq!(v.conclusion_holds, containment_conclusion(n, &a, &b, 3));
                let v4 = theorems::check_asymmetric(&la, &lb, 4).unwrap();
                assert_eq!(v4.conclusion_holds, containment_conclusion(n, &a, &b, 4));
            }
        }
    }
    assert!(
        agreeing_hypotheses > 500,
        "only {agreeing_hypotheses} informative pairs"
    );
}

fn random_spanning(rng: &mut ChaCha8Rng, n: u32) -> Vec<u32> {
    loop {
        let a: Vec<u32> = (0..1u32 << n).filter(|_| rng.gen_bool(0.35)).collect();
        if spans(n, &a) {
            return a;
        }
    }
}

#[test]
fn hp_verdicts_match_brute_force_up_to_rank_four() {
    for n in 0..=4 {
        let mut hypotheses = 0u64;
        for (m, a) in all_sets(n).filter(|(_, s)| !s.is_empty()) {
            let v = theorems::check_hp(&from_mask(n, m)).unwrap();
            let hyp = spans(n, &a) && sumset(n, &a, &a).len() < 2 * a.len();
            assert_eq!(v.hypotheses_hold, hyp, "n={n} A={a:?}");
            if hyp {
                hypotheses += 1;
                assert_eq!(v.conclusion_holds, hp_conclusion(n, &a));
            }
        }
        let report = search::sweep_hp(n, Mode::Exhaustive, 0, 0).unwrap();
        assert_eq!(report.tally.hypotheses_hold, hypotheses, "n={n}");
        if n == 4 {
            assert_eq!(hypotheses, 29_093);
        }
    }
}

#[test]
fn kneser_and_small_sumset_counts_at_rank_three() {
    let sets: Vec<_> = all_sets(3).filter(|(_, s)| !s.is_empty()).collect();
    let (mut kneser, mut small) = (0u64, 0u64);
    for (_, a) in &sets {
        for (_, b) in &sets {
            let s = sumset(3, a, b).len();
            if s < a.len() + b.len() {
                small += 1;
            }
            if spans(3, a) && spans(3, b) && 4 * s < 4 * a.len() + 3 * b.len() {
                kneser += 1;
                assert_eq!(s, 8);
            }
        }
    }
    let report = search::sweep_kneser(3, Mode::Exhaustive, 0, 0).unwrap();
    assert_eq!(report.tally.hypotheses_hold, kneser);
    let census = search::census_certificates(3, Mode::Exhaustive).unwrap();
    assert_eq!(census.tally.hypotheses_hold, small);
    assert_eq!(census.tally.certified, small);
    assert_eq!(small, 35_737);
}

#[test]
fn kemperman_condition_matches_definition() {
    for (ma, a) in all_sets(3).filter(|(_, s)| !s.is_empty()) {
        for (mb, b) in all_sets(3).filter(|(_, s)| !s.is_empty()).step_by(3) {
            let expected = period(3, &sumset(3, &a, &b)).len() == 1 || mu(3, &a, &b) == 1;
            let got = structure::kemperman_condition(&from_mask(3, ma), &from_mask(3, mb)).unwrap();
            assert_eq!(got, expected);
        }
    }
}

#[test]
fn main_strictness_oracle_on_the_noncoset_family() {
    // one-point complement with mu = 1 lies strictly inside an index-8 coset
    let a = [0u32, 1, 2, 4, 9, 10, 12];
    let b = [0u32, 3, 5, 6, 7, 11, 13, 14, 15];
    assert_eq!(mu(4, &a, &b), 1);
    assert!(containment_conclusion(4, &a, &b, 3));
    let v = theorems::check_main(&set(4, &a), &set(4, &b)).unwrap();
    assert_eq!(v.outcome, Outcome::Confirmed);
}
