use std::collections::HashMap;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tracelab::channel::{padded_subseq_count, padded_subseq_count_with, AvoidTerm};
use tracelab::combinatorics::{fc_class_count, segment_count, vandermonde_check, zigzag_subseq_count, LastBit};
use tracelab::{contiguous_01_count, make_padded_pair, subsequence_count_oracle, BitString, Variant};

fn words(len: usize) -> impl Iterator<Item = BitString> {
    (0..1u64 << len).map(move |w| BitString::from_word(w, len))
}

#[test]
fn padded_counts_exhaustive_short_words() {
    for k in 1..=4 {
        let pair = make_padded_pair(k).unwrap();
        for len in 0..=9 {
            for w in words(len) {
                for (variant, z) in [(Variant::X, &pair.x), (Variant::Y, &pair.y)] {
                    assert_eq!(
                        padded_subseq_count(&pair, &w, variant),
                        subsequence_count_oracle(&w, z),
                        "k={k} w={w} {variant:?}"
                    );
                }
            }
        }
    }
}

#[test]
fn padded_counts_random_long_words() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for i in 0..10_000 {
        let k = 1 + i % 4;
        let pair = make_padded_pair(k).unwrap();
        let len = rng.random_range(0..=pair.n);
        let w = BitString::from_bits((0..len).map(|_| rng.random::<bool>()));
        assert_eq!(padded_subseq_count(&pair, &w, Variant::X), subsequence_count_oracle(&w, &pair.x));
        assert_eq!(padded_subseq_count(&pair, &w, Variant::Y), subsequence_count_oracle(&w, &pair.y));
    }
}

#[test]
fn printed_avoid_term_fails_on_single_one() {
    let pair = make_padded_pair(1).unwrap();
    let w: BitString = "1".parse().unwrap();
    let truth = subsequence_count_oracle(&w, &pair.x);
    assert_eq!(truth, BigUint::from(4u32));
    assert_eq!(padded_subseq_count_with(&pair, &w, Variant::X, AvoidTerm::Corrected), truth);
    assert_eq!(padded_subseq_count_with(&pair, &w, Variant::X, AvoidTerm::AsPrinted), BigUint::from(3u32));
}

#[test]
fn zigzag_counts_match_oracle() {
    for k in 0..=12 {
        let z = BitString::zigzag(k);
        for len in 0..=8 {
            for w in words(len) {
                assert_eq!(zigzag_subseq_count(k, &w), subsequence_count_oracle(&w, &z), "k={k} w={w}");
            }
        }
    }
}

#[test]
fn class_and_segment_counts_match_enumeration() {
    for l in 0..=16usize {
        let mut by_class: HashMap<usize, u64> = HashMap::new();
        let mut by_segment: HashMap<(usize, bool), u64> = HashMap::new();
        for w in words(l) {
            let a = contiguous_01_count(&w);
            *by_class.entry(a).or_default() += 1;
            // the empty string counts as ending in a virtual 1
            let last = if l == 0 { true } else { w.bit(l) };
            *by_segment.entry((a, last)).or_default() += 1;
        }
        for a in 0..=l {
            let want = by_class.get(&a).copied().unwrap_or(0);
            assert_eq!(fc_class_count(l as i64, a as i64), BigUint::from(want), "l={l} a={a}");
            for last in [false, true] {
                let want = by_segment.get(&(a, last)).copied().unwrap_or(0);
                let got = segment_count(l as i64, a as i64, LastBit::of(last));
                assert_eq!(got, BigUint::from(want), "l={l} a={a} last={last}");
            }
        }
    }
}

#[test]
fn vandermonde_small_range() {
    for d in 0..=20 {
        for e in 0..=20 {
            for f in 0..=(d + e) {
                let (lhs, rhs) = vandermonde_check(d, e, f);
                assert_eq!(lhs, rhs);
            }
        }
    }
}
