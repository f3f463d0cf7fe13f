//! The deletion channel: reproducible trace sampling, exact trace probabilities
//! and the closed-form subsequence counts for the padded pair.

use std::io::{BufRead, Write};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{binomial_exact, BinomialTable};
use crate::error::{invalid, Error, Result};
use crate::numeric::{big_ln, big_to_f64};
use crate::strings::{subsequence_count_oracle, BitString, PaddedPair, Variant};

/// Deletion probability and the root seed of all randomness derived from it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelSpec {
    pub q: f64,
    pub seed: u64,
}

impl ChannelSpec {
    pub fn new(q: f64, seed: u64) -> Result<Self> {
        check_probability(q)?;
        Ok(Self { q, seed })
    }
}

pub(crate) fn check_probability(q: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&q) {
        return invalid(format!("deletion probability {q} outside [0, 1]"));
    }
    Ok(())
}

/// Generator for trial `trial` of stream `stream`.
///
/// Each `(seed, stream)` selects an independent ChaCha stream and each trial
/// starts at its own block offset, so any sample is a pure function of
/// `(seed, stream, trial)` regardless of how work is scheduled.
pub fn trial_rng(seed: u64, stream: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng.set_word_pos((trial as u128) << 36);
    rng
}

/// Passes `x` through the channel using `rng`.
pub fn transmit<R: Rng + ?Sized>(x: &BitString, q: f64, rng: &mut R) -> BitString {
    let bits: Vec<bool> = x.iter().collect();
    let mut out = Vec::with_capacity(bits.len());
    transmit_into(&bits, q, rng, &mut out);
    BitString::from_bits(out)
}

/// Slice form of [`transmit`]: clears `out` and fills it with the trace.
///
/// At `q = 1/2` each random word decides 64 deletions; otherwise one uniform
/// draw is spent per bit.
pub fn transmit_into<R: Rng + ?Sized>(x: &[bool], q: f64, rng: &mut R, out: &mut Vec<bool>) {
    out.clear();
    if q <= 0.0 {
        out.extend_from_slice(x);
    } else if q == 0.5 {
        for chunk in x.chunks(64) {
            let mut r: u64 = rng.random();
            for &b in chunk {
                if r & 1 == 1 {
                    out.push(b);
                }
                r >>= 1;
            }
        }
    } else {
        let keep = 1.0 - q;
        out.extend(x.iter().copied().filter(|_| rng.random::<f64>() < keep));
    }
}

/// One trace of `x`, the first trial of `stream_id`.
pub fn sample_trace(x: &BitString, spec: &ChannelSpec, stream_id: u64) -> BitString {
    sample_trace_at(x, spec, stream_id, 0)
}

/// Trace for trial `trial` of `stream_id`.
pub fn sample_trace_at(x: &BitString, spec: &ChannelSpec, stream_id: u64, trial: u64) -> BitString {
    transmit(x, spec.q, &mut trial_rng(spec.seed, stream_id, trial))
}

/// `count` consecutive trials of one stream.
pub fn sample_traces(x: &BitString, spec: &ChannelSpec, stream_id: u64, count: usize) -> Vec<BitString> {
    (0..count as u64)
        .map(|t| sample_trace_at(x, spec, stream_id, t))
        .collect()
}

/// A probability held in log space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Probability {
    ln: f64,
}

impl Probability {
    pub fn from_ln(ln: f64) -> Self {
        Self { ln }
    }

    pub fn zero() -> Self {
        Self {
            ln: f64::NEG_INFINITY,
        }
    }

    pub fn ln(&self) -> f64 {
        self.ln
    }

    pub fn value(&self) -> f64 {
        self.ln.exp()
    }

    pub fn is_zero(&self) -> bool {
        self.ln == f64::NEG_INFINITY
    }
}

/// `ln[(1-q)^m q^(n-m)]`, with `0 ln 0 = 0` at the degenerate endpoints.
pub fn ln_channel_weight(n: usize, m: usize, q: f64) -> f64 {
    let kept = if m == 0 { 0.0 } else { m as f64 * (-q).ln_1p() };
    let lost = if n == m { 0.0 } else { (n - m) as f64 * q.ln() };
    kept + lost
}

/// Probability that the channel outputs `w` from `x`:
/// `(1-q)^{|w|} q^{|x|-|w|} f(w; x)`.
///
/// Counts come from the closed form when `x` is a member of a padded pair and
/// from the DP oracle otherwise. Traces longer than `x` have probability zero.
pub fn trace_pmf(x: &BitString, w: &BitString, q: f64) -> Result<Probability> {
    check_probability(q)?;
    if w.len() > x.len() {
        return Ok(Probability::zero());
    }
    let count = match PaddedPair::recognize(x) {
        Some((pair, variant)) => padded_subseq_count(&pair, w, variant),
        None => subsequence_count_oracle(w, x),
    };
    if count.is_zero() {
        return Ok(Probability::zero());
    }
    Ok(Probability::from_ln(
        ln_channel_weight(x.len(), w.len(), q) + big_ln(&count),
    ))
}

/// Exact rational trace probability for rational `q`.
pub fn trace_pmf_exact(x: &BitString, w: &BitString, q: &BigRational) -> BigRational {
    if w.len() > x.len() {
        return BigRational::zero();
    }
    let keep = BigRational::one() - q;
    let count = BigRational::from_integer(BigInt::from(subsequence_count_oracle(w, x)));
    num_traits::pow(keep, w.len()) * num_traits::pow(q.clone(), x.len() - w.len()) * count
}

/// Which constant to use for the term that avoids the lone `1`.
///
/// Deleting the defect from either string leaves `(01)^{2k+1}`, so the correct
/// avoid-term is `C(2k+1+f_c(w), |w|)`. `AsPrinted` reproduces the variant with
/// `2k` for comparison only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AvoidTerm {
    #[default]
    Corrected,
    AsPrinted,
}

/// Prefix and suffix contiguous-`01` counts of a word: `prefix[j] = f_c(w_{1,j})`,
/// `suffix[j] = f_c(w_{j,m})` (1-based, with `suffix[m+1] = 0`).
pub(crate) struct FcScan {
    pub bits: Vec<bool>,
    pub prefix: Vec<usize>,
    pub suffix: Vec<usize>,
    pub total: usize,
}

impl FcScan {
    pub fn new(w: &BitString) -> Self {
        Self::from_bits(w.iter().collect())
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        let m = bits.len();
        let mut prefix = vec![0; m + 1];
        for j in 1..=m {
            prefix[j] = prefix[j - 1] + (j >= 2 && !bits[j - 2] && bits[j - 1]) as usize;
        }
        let mut suffix = vec![0; m + 2];
        for j in (1..=m).rev() {
            suffix[j] = suffix[j + 1] + (j < m && !bits[j - 1] && bits[j]) as usize;
        }
        let total = prefix[m];
        Self {
            bits,
            prefix,
            suffix,
            total,
        }
    }

    /// `(f_c(w_{1,j-1}), f_c(w_{j+1,m}))` for each `j` with `w_j = 1`.
    pub fn lone_one_splits(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        (1..=self.bits.len())
            .filter(|&j| self.bits[j - 1])
            .map(|j| (j, self.prefix[j - 1], self.suffix[j + 1]))
    }
}

/// `f(w; x_n)` or `f(w; y_n)` from the lone-`1` casework in `O(|w|)` binomials.
pub fn padded_subseq_count(pair: &PaddedPair, w: &BitString, variant: Variant) -> BigUint {
    padded_subseq_count_with(pair, w, variant, AvoidTerm::Corrected)
}

pub fn padded_subseq_count_with(
    pair: &PaddedPair,
    w: &BitString,
    variant: Variant,
    avoid: AvoidTerm,
) -> BigUint {
    let binom = |n: usize, r: usize| binomial_exact(n as i64, r as i64);
    padded_count_impl(pair.k, w, variant, avoid, binom)
}

fn padded_count_impl<F>(k: usize, w: &BitString, variant: Variant, avoid: AvoidTerm, binom: F) -> BigUint
where
    F: Fn(usize, usize) -> BigUint,
{
    let scan = FcScan::new(w);
    let m = scan.bits.len();
    let base = match avoid {
        AvoidTerm::Corrected => 2 * k + 1,
        AvoidTerm::AsPrinted => 2 * k,
    };
    let mut total = binom(base + scan.total, m);
    // prefix and suffix paddings on either side of the defect
    let (before, after) = match variant {
        Variant::X => (k, k + 1),
        Variant::Y => (k + 1, k),
    };
    for (j, a, c) in scan.lone_one_splits() {
        total += binom(before + a, j - 1) * binom(after + c, m - j);
    }
    total
}

/// Closed-form counter for one padded pair, backed by a binomial table.
///
/// Exact counts use the Pascal triangle; [`PaddedCounter::ln_counts`] works in
/// floating point from log-factorials and is the path used for long traces.
#[derive(Debug, Clone)]
pub struct PaddedCounter {
    pair: PaddedPair,
    table: BinomialTable,
}

/// Subsequence counts of one trace in both strings, as floats sharing a common
/// log-scale: the true values are `exp(ln_scale) * scaled`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledCounts {
    pub ln_scale: f64,
    pub x: f64,
    pub y: f64,
    /// `f(w;x) - f(w;y)` summed term by term (the avoid-terms cancel exactly).
    pub diff: f64,
}

impl ScaledCounts {
    pub fn ln_x(&self) -> f64 {
        self.ln_scale + self.x.ln()
    }

    pub fn ln_y(&self) -> f64 {
        self.ln_scale + self.y.ln()
    }
}

impl PaddedCounter {
    /// Counter with an exact table; use [`PaddedCounter::float_only`] for long strings.
    pub fn new(pair: PaddedPair) -> Self {
        let table = BinomialTable::new(pair.n + 2);
        Self { pair, table }
    }

    pub fn float_only(pair: PaddedPair) -> Self {
        let table = BinomialTable::logs_only(pair.n + 2);
        Self { pair, table }
    }

    pub fn pair(&self) -> &PaddedPair {
        &self.pair
    }

    pub fn count(&self, w: &BitString, variant: Variant) -> BigUint {
        let t = &self.table;
        padded_count_impl(self.pair.k, w, variant, AvoidTerm::Corrected, |n, r| {
            t.binomial(n as i64, r as i64)
        })
    }

    pub fn ln_counts(&self, w: &BitString) -> ScaledCounts {
        self.ln_counts_scan(&FcScan::new(w))
    }

    pub fn ln_counts_bits(&self, w: &[bool]) -> ScaledCounts {
        self.ln_counts_scan(&FcScan::from_bits(w.to_vec()))
    }

    fn ln_counts_scan(&self, scan: &FcScan) -> ScaledCounts {
        let k = self.pair.k as i64;
        let m = scan.bits.len() as i64;
        let lb = |n: i64, r: i64| self.table.ln_binomial(n, r);
        let ln_avoid = lb(2 * k + 1 + scan.total as i64, m);
        // (ln x-term, ln y-term, x-term - y-term relative to exp(ln x-term))
        let mut terms = Vec::with_capacity(scan.bits.len());
        for (j, a, c) in scan.lone_one_splits() {
            let (j, a, c) = (j as i64, a as i64, c as i64);
            let ln_x = lb(k + a, j - 1) + lb(k + 1 + c, m - j);
            if ln_x == f64::NEG_INFINITY {
                let ln_y = lb(k + 1 + a, j - 1) + lb(k + c, m - j);
                terms.push((ln_x, ln_y, f64::NAN));
                continue;
            }
            // y-term / x-term = (k+1+a)/(k+2+a-j) * (k+1+c-(m-j))/(k+1+c)
            let num = (k + 1 + a) as i128 * (k + 1 + c - m + j) as i128;
            let den = (k + 2 + a - j) as i128 * (k + 1 + c) as i128;
            let ln_y = if num == 0 {
                f64::NEG_INFINITY
            } else {
                ln_x + (num as f64 / den as f64).ln()
            };
            terms.push((ln_x, ln_y, (den - num) as f64 / den as f64));
        }
        let ln_scale = terms
            .iter()
            .flat_map(|&(a, b, _)| [a, b])
            .chain([ln_avoid])
            .fold(f64::NEG_INFINITY, f64::max);
        if ln_scale == f64::NEG_INFINITY {
            return ScaledCounts {
                ln_scale: 0.0,
                x: 0.0,
                y: 0.0,
                diff: 0.0,
            };
        }
        let avoid = (ln_avoid - ln_scale).exp();
        let (mut x, mut y, mut diff) = (avoid, avoid, 0.0);
        for (ln_x, ln_y, rel) in terms {
            let ex = (ln_x - ln_scale).exp();
            let ey = (ln_y - ln_scale).exp();
            x += ex;
            y += ey;
            diff += if rel.is_nan() { -ey } else { ex * rel };
        }
        ScaledCounts { ln_scale, x, y, diff }
    }
}

/// `E[f(w; trace of x)] = f(w; x) (1-q)^{|w|}`: each occurrence survives
/// independently with probability `(1-q)^{|w|}`.
pub fn expected_subseq_count(x: &BitString, w: &BitString, q: f64) -> f64 {
    let f = big_to_f64(&subsequence_count_oracle(w, x));
    f * (1.0 - q).powi(w.len() as i32)
}

/// Header of a trace dump file.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceDumpHeader {
    pub x: BitString,
    pub q: f64,
    pub seed: u64,
}

/// Writes `# x=<x> q=<q> seed=<seed>` followed by one trace per line. Readers
/// skip any further `#` lines.
pub fn write_trace_dump<W: Write>(
    mut out: W,
    header: &TraceDumpHeader,
    traces: &[BitString],
) -> std::io::Result<()> {
    writeln!(out, "# x={} q={} seed={}", header.x, header.q, header.seed)?;
    for t in traces {
        writeln!(out, "{t}")?;
    }
    Ok(())
}

pub fn read_trace_dump<R: BufRead>(input: R) -> Result<(TraceDumpHeader, Vec<BitString>)> {
    let mut lines = input.lines();
    let bad = |msg: &str| Error::InvalidParameter(format!("trace dump: {msg}"));
    let first = lines
        .next()
        .ok_or_else(|| bad("missing header"))?
        .map_err(|e| bad(&e.to_string()))?;
    let rest = first.strip_prefix("# ").ok_or_else(|| bad("header must start with '# '"))?;
    let (mut x, mut q, mut seed) = (None, None, None);
    for field in rest.split_whitespace() {
        match field.split_once('=') {
            Some(("x", v)) => x = Some(v.parse::<BitString>()?),
            Some(("q", v)) => q = Some(v.parse::<f64>().map_err(|_| bad("bad q"))?),
            Some(("seed", v)) => seed = Some(v.parse::<u64>().map_err(|_| bad("bad seed"))?),
            _ => return Err(bad(&format!("unknown header field {field:?}"))),
        }
    }
    let header = TraceDumpHeader {
        x: x.ok_or_else(|| bad("missing x"))?,
        q: q.ok_or_else(|| bad("missing q"))?,
        seed: seed.ok_or_else(|| bad("missing seed"))?,
    };
    let traces = lines
        .filter(|l| !l.as_ref().is_ok_and(|s| s.starts_with('#')))
        .map(|l| {
            l.map_err(|e| bad(&e.to_string()))
                .and_then(|s| s.trim_end().parse::<BitString>())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((header, traces))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::fold_traces;
    use crate::numeric::CompensatedSum;
    use crate::stats::RunningMoments;
    use crate::strings::make_padded_pair;
    use num_bigint::BigInt;

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn padded_count_examples() {
        let p = make_padded_pair(1).unwrap();
        let c = |w: &str, v| padded_subseq_count(&p, &bs(w), v);
        assert_eq!(c("1", Variant::X), BigUint::from(4u32));
        assert_eq!(c("01", Variant::X), BigUint::from(7u32));
        assert_eq!(c("01", Variant::Y), BigUint::from(8u32));
        assert_eq!(c("11", Variant::X), BigUint::from(6u32));
        // avoid 3 + lone-1 term 1 for w = "1"
        assert_eq!(binomial_exact(3, 1), BigUint::from(3u32));
    }

    #[test]
    fn printed_avoid_term_is_wrong() {
        let p = make_padded_pair(1).unwrap();
        let w = bs("1");
        let printed = padded_subseq_count_with(&p, &w, Variant::X, AvoidTerm::AsPrinted);
        assert_eq!(printed, BigUint::from(3u32));
        assert_ne!(printed, subsequence_count_oracle(&w, &p.x));
    }

    #[test]
    fn closed_form_matches_oracle_exhaustively() {
        for k in 1..=3 {
            let p = make_padded_pair(k).unwrap();
            let counter = PaddedCounter::new(p.clone());
            for len in 0..=8 {
                for word in 0..1u64 << len {
                    let w = BitString::from_word(word, len);
                    for v in [Variant::X, Variant::Y] {
                        let want = subsequence_count_oracle(&w, p.get(v));
                        assert_eq!(padded_subseq_count(&p, &w, v), want, "k={k} w={w} {v:?}");
                        assert_eq!(counter.count(&w, v), want);
                    }
                }
            }
        }
    }

    #[test]
    fn float_counts_track_exact_counts() {
        let p = make_padded_pair(40).unwrap();
        let exact = PaddedCounter::new(p.clone());
        let float = PaddedCounter::float_only(p.clone());
        let spec = ChannelSpec::new(0.5, 3).unwrap();
        for t in 0..50 {
            let w = sample_trace_at(&p.y, &spec, 0, t);
            let s = float.ln_counts(&w);
            let fx = exact.count(&w, Variant::X);
            let fy = exact.count(&w, Variant::Y);
            assert!((s.ln_x() - big_ln(&fx)).abs() < 1e-10);
            assert!((s.ln_y() - big_ln(&fy)).abs() < 1e-10);
            let d = BigInt::from(fx) - BigInt::from(fy.clone());
            let rel = crate::numeric::bigint_ratio_f64(&d, &BigInt::from(fy));
            assert!((s.diff / s.y - rel).abs() < 1e-9 * rel.abs().max(1e-6));
        }
    }

    #[test]
    fn float_counts_cover_every_word_at_k2() {
        let p = make_padded_pair(2).unwrap();
        let float = PaddedCounter::float_only(p.clone());
        for len in 0..=p.n {
            for word in 0..1u64 << len {
                let w = BitString::from_word(word, len);
                let fx = subsequence_count_oracle(&w, &p.x);
                let fy = subsequence_count_oracle(&w, &p.y);
                let s = float.ln_counts(&w);
                let scale = s.ln_scale.exp();
                let (fx, fy) = (big_to_f64(&fx), big_to_f64(&fy));
                assert!((s.x * scale - fx).abs() <= 1e-9 * fx.max(1.0), "{w}");
                assert!((s.y * scale - fy).abs() <= 1e-9 * fy.max(1.0), "{w}");
                assert!((s.diff * scale - (fx - fy)).abs() <= 1e-9 * fx.max(fy).max(1.0), "{w}");
            }
        }
    }

    #[test]
    fn pmf_examples() {
        let x = make_padded_pair(1).unwrap().x;
        let p = |w: &str| trace_pmf(&x, &bs(w), 0.5).unwrap().value();
        assert!((p("") / 2f64.powi(-7) - 1.0).abs() < 1e-14);
        assert!((p("11") / (6.0 * 2f64.powi(-7)) - 1.0).abs() < 1e-14);
        assert_eq!(p("1111111"), 0.0);
        assert_eq!(p("01101011"), 0.0);
        let generic = bs("0011");
        let v = trace_pmf(&generic, &bs("01"), 0.5).unwrap().value();
        assert!((v - 4.0 / 16.0).abs() < 1e-14);
        // degenerate channels
        assert_eq!(trace_pmf(&generic, &generic, 0.0).unwrap().value(), 1.0);
        assert_eq!(trace_pmf(&generic, &bs(""), 1.0).unwrap().value(), 1.0);
        assert_eq!(trace_pmf(&generic, &bs("0"), 1.0).unwrap().value(), 0.0);
        assert!(trace_pmf(&generic, &bs(""), 1.5).is_err());
    }

    #[test]
    fn pmf_sums_to_one() {
        let strings = ["0110101", "010110101011101", "1", "000111000", "0101101"];
        for s in strings {
            let x = bs(s);
            for q in [0.2, 0.5, 0.8] {
                let total = fold_traces(
                    &x,
                    &x,
                    CompensatedSum::new,
                    |acc, v| {
                        acc.add(v.count_x as f64 * ln_channel_weight(x.len(), v.len, q).exp())
                    },
                    |mut a, b| {
                        a.merge(&b);
                        a
                    },
                )
                .unwrap()
                .value();
                assert!((total - 1.0).abs() < 1e-12, "{s} q={q}: {total}");
            }
        }
    }

    #[test]
    fn exact_rational_pmf_sums_to_exactly_one() {
        let x = bs("01101");
        let q = BigRational::new(BigInt::from(1), BigInt::from(3));
        let mut total = BigRational::zero();
        for len in 0..=5 {
            for word in 0..1u64 << len {
                total += trace_pmf_exact(&x, &BitString::from_word(word, len), &q);
            }
        }
        assert_eq!(total, BigRational::one());
    }

    #[test]
    fn sampling_is_reproducible_and_stream_dependent() {
        let x = bs("0110101011010010110");
        let spec = ChannelSpec::new(0.5, 42).unwrap();
        let a = sample_traces(&x, &spec, 7, 20);
        let b = sample_traces(&x, &spec, 7, 20);
        let c = sample_traces(&x, &spec, 8, 20);
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(sample_trace(&x, &spec, 7), a[0]);
        let identity = ChannelSpec::new(0.0, 1).unwrap();
        assert_eq!(sample_trace(&x, &identity, 0), x);
    }

    #[test]
    fn heavy_deletion_empties_traces() {
        let x = make_padded_pair(1).unwrap().x;
        let spec = ChannelSpec::new(0.999, 5).unwrap();
        let n = 100_000;
        let empty = (0..n)
            .filter(|&t| sample_trace_at(&x, &spec, 0, t).is_empty())
            .count();
        let p = 0.999f64.powi(7);
        let sd = (p * (1.0 - p) / n as f64).sqrt();
        assert!(((empty as f64 / n as f64) - p).abs() < 4.0 * sd);
    }

    #[test]
    fn mean_trace_length() {
        let x = bs("0110101");
        let spec = ChannelSpec::new(0.5, 9).unwrap();
        let mut m = RunningMoments::new();
        for t in 0..100_000 {
            m.push(sample_trace_at(&x, &spec, 1, t).len() as f64);
        }
        assert!((m.mean() - 3.5).abs() < 3.0 * m.std_error());
    }

    #[test]
    fn expected_count_examples() {
        assert_eq!(expected_subseq_count(&bs("0110"), &bs(""), 0.3), 1.0);
        assert_eq!(expected_subseq_count(&bs("0011"), &bs("01"), 0.5), 1.0);
        assert_eq!(expected_subseq_count(&bs("0011"), &bs("01"), 0.0), 4.0);
    }

    #[test]
    fn trace_dump_round_trip() {
        let header = TraceDumpHeader {
            x: bs("0110101"),
            q: 0.5,
            seed: 17,
        };
        let traces = vec![bs("011"), bs(""), bs("0101")];
        let mut buf = Vec::new();
        write_trace_dump(&mut buf, &header, &traces).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# x=0110101 q=0.5 seed=17\n"));
        let (h, t) = read_trace_dump(&buf[..]).unwrap();
        assert_eq!(h, header);
        assert_eq!(t, traces);
        assert!(read_trace_dump(&b"x=1\n"[..]).is_err());
    }
}
