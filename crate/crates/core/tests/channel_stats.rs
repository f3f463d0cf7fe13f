use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tracelab::channel::{expected_subseq_count, sample_trace_at, trace_pmf};
use tracelab::numeric::{big_to_f64, CompensatedSum};
use tracelab::stats::{chi_square_upper_quantile, RunningMoments, Z_999};
use tracelab::{make_padded_pair, subsequence_count_oracle, BitString, ChannelSpec};

fn total_mass(x: &BitString, q: f64) -> f64 {
    let mut sum = CompensatedSum::new();
    for len in 0..=x.len() {
        for word in 0..1u64 << len {
            let w = BitString::from_word(word, len);
            sum.add(trace_pmf(x, &w, q).unwrap().value());
        }
    }
    sum.value()
}

#[test]
fn pmf_normalizes() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut sources: Vec<BitString> = (1..=15)
        .map(|n| BitString::from_bits((0..n).map(|_| rng.random::<bool>())))
        .collect();
    for k in 1..=3 {
        let p = make_padded_pair(k).unwrap();
        sources.push(p.x);
        sources.push(p.y);
    }
    for x in &sources {
        for q in [0.2, 0.5, 0.8] {
            let mass = total_mass(x, q);
            assert!((mass - 1.0).abs() <= 1e-12, "x={x} q={q} mass={mass}");
        }
    }
}

#[test]
fn sampled_traces_fit_the_pmf() {
    let x = make_padded_pair(1).unwrap().x;
    let spec = ChannelSpec::new(0.5, 2024).unwrap();
    let samples = 1_000_000u64;
    let mut seen: HashMap<BitString, u64> = HashMap::new();
    for t in 0..samples {
        *seen.entry(sample_trace_at(&x, &spec, 9, t)).or_default() += 1;
    }
    let mut stat = 0.0;
    let mut bins = 0;
    for len in 0..=x.len() {
        for word in 0..1u64 << len {
            let w = BitString::from_word(word, len);
            let p = trace_pmf(&x, &w, 0.5).unwrap();
            let observed = seen.remove(&w).unwrap_or(0) as f64;
            if p.is_zero() {
                assert_eq!(observed, 0.0, "impossible trace {w} observed");
                continue;
            }
            let expected = p.value() * samples as f64;
            stat += (observed - expected).powi(2) / expected;
            bins += 1;
        }
    }
    assert!(seen.is_empty());
    let limit = chi_square_upper_quantile(bins - 1, Z_999);
    assert!(stat < limit, "chi-square {stat} over {bins} bins exceeds {limit}");
}

#[test]
fn mean_subsequence_count_matches_expectation() {
    let x = make_padded_pair(2).unwrap().x;
    let w: BitString = "011".parse().unwrap();
    let q = 0.3;
    let spec = ChannelSpec::new(q, 77).unwrap();
    let mut moments = RunningMoments::new();
    for t in 0..100_000 {
        let trace = sample_trace_at(&x, &spec, 4, t);
        moments.push(big_to_f64(&subsequence_count_oracle(&w, &trace)));
    }
    let expected = expected_subseq_count(&x, &w, q);
    let se = moments.std_error();
    assert!((moments.mean() - expected).abs() <= 3.0 * se, "{} vs {expected}", moments.mean());
    // the inverse survival factor is far outside the sampling error
    let inverse = big_to_f64(&subsequence_count_oracle(&w, &x)) * (1.0 - q).powi(-(w.len() as i32));
    assert!((moments.mean() - inverse).abs() > 3.0 * se);
}
