use std::f64::consts::TAU;
use std::sync::OnceLock;

use proptest::prelude::*;
use ulam_core::cache;
use ulam_core::gaps::{blocking_pairs_with, min_gap_ratio, running_min_gap, tail_count_check, GapRatio};
use ulam_core::growth::norm::operator_norm;
use ulam_core::growth::spectral::spectral_radius;
use ulam_core::signal::statistic_of;
use ulam_core::steps::classify_steps;
use ulam_core::{
    generate_fast, generate_oracle, majorant, residue_histogram, signal_statistic, GenerationConfig, Letter, NormKind,
    UlamSequence, Word,
};

fn ulam() -> &'static UlamSequence {
    static SEQ: OnceLock<UlamSequence> = OnceLock::new();
    SEQ.get_or_init(|| generate_fast(GenerationConfig::count(5000)).unwrap())
}

fn letter() -> impl Strategy<Value = Letter> {
    prop_oneof![Just(Letter::TypeI), Just(Letter::TypeII), Just(Letter::Eggleton)]
}

fn admissible_word(max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec(letter(), 1..=max_len).prop_map(|mut letters| {
        for i in 1..letters.len() {
            if letters[i] == Letter::Eggleton && letters[i - 1] == Letter::Eggleton {
                letters[i] = Letter::TypeI;
            }
        }
        Word::new(letters)
    })
}

fn increasing(max_len: usize) -> impl Strategy<Value = Vec<u64>> {
    (1u64..50, prop::collection::vec(1u64..1000, 1..max_len)).prop_map(|(start, gaps)| {
        let mut t = vec![start];
        for g in gaps {
            t.push(t.last().unwrap() + g);
        }
        t
    })
}

#[test]
fn oracle_agrees_for_all_small_seeds() {
    for second in 2..=10u64 {
        for first in 1..second {
            let config = GenerationConfig::count(1000).with_seeds(first, second);
            let fast = generate_fast(config).unwrap();
            let slow = generate_oracle(config).unwrap();
            assert_eq!(fast.terms(), slow.terms(), "seeds ({first}, {second})");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn limit_and_count_agree(first in 1u64..8, extra in 1u64..8, limit in 20u64..3000) {
        let second = first + extra;
        let by_limit = generate_fast(GenerationConfig::limit(limit).with_seeds(first, second)).unwrap();
        let by_count = generate_fast(GenerationConfig::count(by_limit.len()).with_seeds(first, second)).unwrap();
        prop_assert_eq!(by_limit.terms(), by_count.terms());
        prop_assert!(by_limit.last() <= limit);
    }

    #[test]
    fn sieve_property_for_random_seeds(first in 1u64..20, extra in 1u64..20, n in 5usize..200) {
        let seq = generate_fast(GenerationConfig::count(n).with_seeds(first, first + extra)).unwrap();
        prop_assert_eq!(seq.first_sieve_violation(), None);
    }

    #[test]
    fn norms_are_submultiplicative(u in admissible_word(6), v in admissible_word(6)) {
        let (mu, mv) = (u.product().unwrap(), v.product().unwrap());
        let muv = mu.checked_mul(&mv).unwrap();
        for kind in NormKind::ALL {
            let lhs = operator_norm(&muv, kind).unwrap();
            let rhs = operator_norm(&mu, kind).unwrap() * operator_norm(&mv, kind).unwrap();
            prop_assert!(lhs <= rhs * (1.0 + 1e-12), "{kind}: {lhs} > {rhs}");
        }
    }

    #[test]
    fn radius_is_below_every_norm(w in admissible_word(10)) {
        let m = w.product().unwrap();
        let rho = spectral_radius(&m);
        for kind in NormKind::ALL {
            prop_assert!(rho <= operator_norm(&m, kind).unwrap() * (1.0 + 1e-9));
        }
    }

    #[test]
    fn words_round_trip_through_text(w in admissible_word(20)) {
        prop_assert!(w.is_admissible());
        let parsed: Word = w.to_string().parse().unwrap();
        prop_assert_eq!(parsed, w);
    }

    #[test]
    fn statistic_is_bounded_and_symmetric(alpha in 0.0f64..TAU, n in 2usize..5000) {
        let terms = &ulam().terms()[..n];
        let s = statistic_of(terms, alpha);
        prop_assert!((0.0..=1.0).contains(&s));
        prop_assert!((s - statistic_of(terms, TAU - alpha)).abs() < 1e-9);
    }

    #[test]
    fn statistic_ignores_summation_order(alpha in 0.0f64..std::f64::consts::PI, seed in any::<u64>()) {
        let mut terms = ulam().terms()[..2000].to_vec();
        let forward = statistic_of(&terms, alpha);
        // deterministic shuffle
        let mut state = seed | 1;
        for i in (1..terms.len()).rev() {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            terms.swap(i, (state % (i as u64 + 1)) as usize);
        }
        prop_assert!((forward - statistic_of(&terms, alpha)).abs() < 1e-12);
    }

    #[test]
    fn histogram_counts_every_term(alpha in -10.0f64..10.0, bins in 1usize..100) {
        let h = residue_histogram(ulam(), alpha.abs(), bins).unwrap();
        prop_assert_eq!(h.counts.iter().sum::<u64>(), ulam().len() as u64);
        prop_assert_eq!(h.total, ulam().len() as u64);
    }

    #[test]
    fn gap_ratio_is_monotone_and_small(n in 3usize..4999) {
        let r = min_gap_ratio(ulam(), n).unwrap();
        let prev = min_gap_ratio(ulam(), n - 1).unwrap();
        prop_assert!(r.ratio() <= prev.ratio());
        prop_assert!(r.delta() > 0.0 && r.delta() <= 0.5);
    }

    #[test]
    fn tail_counts_never_exceed_bound(n in 3usize..4999) {
        let tails = tail_count_check(ulam(), n).unwrap();
        prop_assert!(tails.iter().all(|t| t.count as u64 <= t.bound));
        prop_assert_eq!(tails.last().unwrap().count, n);
    }

    #[test]
    fn blocking_pairs_match_brute_force(terms in increasing(120), p_extra in 1u64..50, q in 1u64..50) {
        let seq = UlamSequence::from_terms(terms).unwrap();
        let n = seq.len();
        let r = GapRatio::new(q + p_extra, q).unwrap();
        let t = seq.terms();
        let an = t[n - 1] as u128;
        let mut brute = 0;
        for k in 0..n {
            for j in 0..k {
                let s = (t[j] + t[k]) as u128;
                if s >= an && 2 * r.q as u128 * s <= (r.p + r.q) as u128 * an {
                    brute += 1;
                }
            }
        }
        prop_assert_eq!(blocking_pairs_with(&seq, n, &r).count, brute);
    }

    #[test]
    fn running_minimum_on_synthetic_lists(terms in increasing(300)) {
        prop_assume!(terms.len() >= 3);
        let seq = UlamSequence::from_terms(terms).unwrap();
        let mins = running_min_gap(&seq);
        for n in 1..seq.len() {
            let direct = (1..=n)
                .map(|k| seq.term(k + 1) as f64 / seq.term(k) as f64)
                .fold(f64::INFINITY, f64::min);
            prop_assert!((mins[n - 1].ratio() - direct).abs() <= 1e-12 * direct);
        }
    }

    #[test]
    fn cache_round_trips(terms in increasing(500)) {
        let seq = UlamSequence::from_terms(terms).unwrap();
        prop_assert_eq!(&cache::from_bytes(&cache::to_bytes(&seq)).unwrap(), &seq);
        let mut text = Vec::new();
        cache::write_text(&seq, &mut text).unwrap();
        let back = cache::read_text(text.as_slice()).unwrap();
        prop_assert_eq!(back.terms(), seq.terms());
    }

    #[test]
    fn majorant_dominates_prefixes(n in 6usize..5000) {
        let seq = ulam().prefix(n).unwrap();
        let trace = classify_steps(&seq).unwrap();
        let b = majorant(&trace, &seq).unwrap();
        prop_assert_eq!(b.first_undominated(&seq), None);
        prop_assert!(b.growth_violations(1.466, 1).is_empty());
    }
}

#[test]
fn statistic_at_zero_is_one() {
    assert_eq!(signal_statistic(ulam(), 0.0), 1.0);
}
