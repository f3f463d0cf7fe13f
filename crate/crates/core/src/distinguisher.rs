//! Hypothesis tests over traces.
//!
//! Likelihood-ratio classification with empirical error rates and a doubling
//! search for the sample complexity, plus the power-sum route for pairs that
//! differ on a whole block: deck signatures, minimal distinguishing words, the
//! mean-count test, and root multiplicities of `+-1` polynomials at `z = 1`.

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{check_probability, trace_pmf, transmit_into, trial_rng, ChannelSpec};
use crate::error::{invalid, Error, Result};
use crate::numeric::big_to_f64;
use crate::stats::{wilson_interval, Z_95};
use crate::strings::{subsequence_count_oracle, subsequence_count_u128, BitString};

/// Largest `T` the sample-complexity search tries.
pub const MAX_SAMPLE_COMPLEXITY: u64 = 1 << 24;
/// Degree limit of [`max_multiplicity_exhaustive`].
pub const MAX_EXHAUSTIVE_DEGREE: usize = 22;
/// Longest word [`find_min_distinguishing_word`] will enumerate.
pub const MAX_WORD_LEN: usize = 40;

const LRT_STREAM: u64 = 0x4c52_5400;
const MEAN_STREAM: u64 = 0x4d45_4e00;
const TRIAL_CHUNK: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Hypothesis {
    X,
    Y,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LrtResult {
    pub decision: Hypothesis,
    /// `sum ln(mu_x(w) / mu_y(w))`; infinite when some trace is impossible
    /// under one source.
    pub log_likelihood_ratio: f64,
    pub traces_used: usize,
}

/// Per-trace log-likelihood ratios with memoization.
#[derive(Debug, Clone)]
pub struct LrtModel {
    x: BitString,
    y: BitString,
    q: f64,
    cache: HashMap<BitString, f64>,
}

impl LrtModel {
    pub fn new(x: &BitString, y: &BitString, q: f64) -> Result<Self> {
        check_probability(q)?;
        Ok(Self {
            x: x.clone(),
            y: y.clone(),
            q,
            cache: HashMap::new(),
        })
    }

    pub fn log_ratio(&mut self, w: &BitString) -> Result<f64> {
        if let Some(&v) = self.cache.get(w) {
            return Ok(v);
        }
        if w.len() > self.x.len().max(self.y.len()) {
            return invalid(format!("trace of length {} is longer than the sources", w.len()));
        }
        let v = if self.x == self.y {
            0.0
        } else {
            let px = trace_pmf(&self.x, w, self.q)?;
            let py = trace_pmf(&self.y, w, self.q)?;
            match (px.is_zero(), py.is_zero()) {
                (true, true) => {
                    return Err(Error::Inconsistent(format!("trace {w} is impossible under both sources")))
                }
                (false, true) => f64::INFINITY,
                (true, false) => f64::NEG_INFINITY,
                (false, false) => px.ln() - py.ln(),
            }
        };
        self.cache.insert(w.clone(), v);
        Ok(v)
    }

    /// Classifies by the sign of the summed log ratio; a tie decides `x`.
    pub fn classify<'a, I: IntoIterator<Item = &'a BitString>>(&mut self, traces: I) -> Result<LrtResult> {
        let mut total = 0.0;
        let mut used = 0;
        for w in traces {
            total += self.log_ratio(w)?;
            used += 1;
        }
        if total.is_nan() {
            return Err(Error::Inconsistent("traces are impossible under each source in turn".into()));
        }
        Ok(LrtResult {
            decision: if total >= 0.0 { Hypothesis::X } else { Hypothesis::Y },
            log_likelihood_ratio: total,
            traces_used: used,
        })
    }
}

/// Likelihood-ratio test between sources `x` and `y`.
pub fn lrt_classify(traces: &[BitString], x: &BitString, y: &BitString, q: f64) -> Result<LrtResult> {
    LrtModel::new(x, y, q)?.classify(traces)
}

/// One error-rate measurement; serialized as a JSON line.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorRecord {
    pub pair: String,
    pub q: f64,
    #[serde(rename = "T")]
    pub t: u64,
    pub trials: u64,
    pub errors: u64,
    pub rate: f64,
    pub wilson_upper: f64,
}

impl ErrorRecord {
    pub fn std_error(&self) -> f64 {
        (self.rate * (1.0 - self.rate) / self.trials as f64).sqrt()
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("record serializes")
    }
}

/// Runs `trials` experiments, even-numbered ones drawing `t` traces from `x` and
/// odd-numbered ones from `y`, and counts misclassifications. With `t = 0`
/// every experiment decides `x`, so the rate is `floor(trials/2)/trials`.
pub fn empirical_error_rate(
    x: &BitString,
    y: &BitString,
    q: f64,
    t: u64,
    trials: u64,
    spec: &ChannelSpec,
) -> Result<ErrorRecord> {
    check_probability(q)?;
    if trials < 100 {
        return invalid("at least 100 trials are required");
    }
    let xs: Vec<bool> = x.iter().collect();
    let ys: Vec<bool> = y.iter().collect();
    let model = LrtModel::new(x, y, q)?;
    let chunks: Vec<u64> = (0..trials).step_by(TRIAL_CHUNK).collect();
    let counts: Vec<u64> = chunks
        .par_iter()
        .map(|&start| -> Result<u64> {
            let mut model = model.clone();
            let mut buf = Vec::new();
            let mut errors = 0;
            for trial in start..(start + TRIAL_CHUNK as u64).min(trials) {
                let (source, truth) = if trial % 2 == 0 { (&xs, Hypothesis::X) } else { (&ys, Hypothesis::Y) };
                let mut rng = trial_rng(spec.seed, LRT_STREAM | (trial % 2), trial / 2);
                let mut total = 0.0;
                for _ in 0..t {
                    transmit_into(source, q, &mut rng, &mut buf);
                    total += model.log_ratio(&BitString::from_bits(buf.iter().copied()))?;
                }
                let decision = if total >= 0.0 { Hypothesis::X } else { Hypothesis::Y };
                errors += (decision != truth) as u64;
            }
            Ok(errors)
        })
        .collect::<Result<_>>()?;
    let errors: u64 = counts.iter().sum();
    Ok(ErrorRecord {
        pair: format!("{x}/{y}"),
        q,
        t,
        trials,
        errors,
        rate: errors as f64 / trials as f64,
        wilson_upper: wilson_interval(errors, trials, Z_95).1,
    })
}

/// Error rate of [`mean_based_distinguish`] with word `w`, laid out like
/// [`empirical_error_rate`].
pub fn mean_based_error_rate(
    x: &BitString,
    y: &BitString,
    word: &DistinguishingWord,
    q: f64,
    t: u64,
    trials: u64,
    spec: &ChannelSpec,
) -> Result<ErrorRecord> {
    check_probability(q)?;
    if trials < 100 || t == 0 {
        return invalid("at least 100 trials and one trace per trial are required");
    }
    let xs: Vec<bool> = x.iter().collect();
    let ys: Vec<bool> = y.iter().collect();
    let decisions: Vec<bool> = (0..trials)
        .into_par_iter()
        .map(|trial| -> Result<bool> {
            let (source, truth) = if trial % 2 == 0 { (&xs, Hypothesis::X) } else { (&ys, Hypothesis::Y) };
            let mut rng = trial_rng(spec.seed, MEAN_STREAM | (trial % 2), trial / 2);
            let mut buf = Vec::new();
            let traces: Vec<BitString> = (0..t)
                .map(|_| {
                    transmit_into(source, q, &mut rng, &mut buf);
                    BitString::from_bits(buf.iter().copied())
                })
                .collect();
            Ok(mean_based_distinguish(&traces, &word.w, &word.fx, &word.fy, q)? != truth)
        })
        .collect::<Result<_>>()?;
    let errors = decisions.iter().filter(|&&e| e).count() as u64;
    Ok(ErrorRecord {
        pair: format!("{x}/{y}"),
        q,
        t,
        trials,
        errors,
        rate: errors as f64 / trials as f64,
        wilson_upper: wilson_interval(errors, trials, Z_95).1,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleComplexity {
    pub t_star: u64,
    pub target_delta: f64,
    /// Every measurement of the doubling search, in order.
    pub steps: Vec<ErrorRecord>,
}

/// Smallest power of two `T` whose 95% Wilson upper bound on the error rate is
/// at most `target_delta`. Identical sources are reported infeasible at once.
pub fn estimate_sample_complexity(
    x: &BitString,
    y: &BitString,
    q: f64,
    target_delta: f64,
    trials: u64,
    spec: &ChannelSpec,
) -> Result<SampleComplexity> {
    if !(target_delta > 0.0 && target_delta < 0.5) {
        return invalid("target error must lie in (0, 1/2)");
    }
    let infeasible = || Error::Infeasible {
        what: "sample complexity",
        limit: MAX_SAMPLE_COMPLEXITY,
        requested: MAX_SAMPLE_COMPLEXITY * 2,
    };
    if x == y {
        return Err(infeasible());
    }
    let mut steps = Vec::new();
    let mut t = 1;
    while t <= MAX_SAMPLE_COMPLEXITY {
        let record = empirical_error_rate(x, y, q, t, trials, spec)?;
        let done = record.wilson_upper <= target_delta;
        steps.push(record);
        if done {
            return Ok(SampleComplexity {
                t_star: t,
                target_delta,
                steps,
            });
        }
        t *= 2;
    }
    Err(infeasible())
}

/// Power sums `sum_i x_i i^m` over 1-based positions, `m = 0..=max_order`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DeckSignature {
    pub n: usize,
    #[serde(serialize_with = "crate::numeric::decimal::serialize_vec")]
    pub power_sums: Vec<BigUint>,
}

pub fn deck_signature(x: &BitString, max_order: usize) -> DeckSignature {
    let mut sums = vec![BigUint::zero(); max_order + 1];
    for i in (1..=x.len()).filter(|&i| x.bit(i)) {
        let mut p = BigUint::one();
        for s in sums.iter_mut() {
            *s += &p;
            p *= i as u64;
        }
    }
    DeckSignature {
        n: x.len(),
        power_sums: sums,
    }
}

/// Lowest order at which the power sums of `x` and `y` differ.
pub fn first_differing_power_sum(x: &BitString, y: &BitString, max_order: usize) -> Option<usize> {
    let (a, b) = (deck_signature(x, max_order), deck_signature(y, max_order));
    a.power_sums.iter().zip(&b.power_sums).position(|(p, q)| p != q)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DistinguishingWord {
    pub w: BitString,
    #[serde(serialize_with = "crate::numeric::decimal::serialize")]
    pub fx: BigUint,
    #[serde(serialize_with = "crate::numeric::decimal::serialize")]
    pub fy: BigUint,
}

fn count(w: &BitString, z: &BitString) -> BigUint {
    match subsequence_count_u128(w, z) {
        Some(c) => BigUint::from(c),
        None => subsequence_count_oracle(w, z),
    }
}

/// First word, by length and then lexicographically, whose subsequence counts in
/// `x` and `y` differ. Lengths above [`MAX_WORD_LEN`] are not searched.
pub fn find_min_distinguishing_word(x: &BitString, y: &BitString, max_len: usize) -> Option<DistinguishingWord> {
    if x == y {
        return None;
    }
    for len in 1..=max_len.min(MAX_WORD_LEN) {
        let found = (0..1u64 << len).into_par_iter().find_first(|&word| {
            let w = BitString::from_word(word, len);
            subsequence_count_u128(&w, x) != subsequence_count_u128(&w, y) || count(&w, x) != count(&w, y)
        });
        if let Some(word) = found {
            let w = BitString::from_word(word, len);
            let (fx, fy) = (count(&w, x), count(&w, y));
            return Some(DistinguishingWord { w, fx, fy });
        }
    }
    None
}

/// Decides `x` when the mean of `f(w; trace)` is at least as close to
/// `fx (1-q)^|w|` as to `fy (1-q)^|w|`.
pub fn mean_based_distinguish(
    traces: &[BitString],
    w: &BitString,
    fx: &BigUint,
    fy: &BigUint,
    q: f64,
) -> Result<Hypothesis> {
    check_probability(q)?;
    if fx == fy {
        return invalid("the two expected counts must differ");
    }
    if traces.is_empty() {
        return invalid("at least one trace is required");
    }
    let total: f64 = traces.iter().map(|z| big_to_f64(&count(w, z))).sum();
    let mean = total / traces.len() as f64;
    let keep = (1.0 - q).powi(w.len() as i32);
    let (ex, ey) = (big_to_f64(fx) * keep, big_to_f64(fy) * keep);
    Ok(if (mean - ex).abs() <= (mean - ey).abs() { Hypothesis::X } else { Hypothesis::Y })
}

/// A polynomial with every coefficient `+1` or `-1`, indexed by degree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolySpec {
    pub coefficients: Vec<i8>,
}

impl PolySpec {
    pub fn new(coefficients: Vec<i8>) -> Result<Self> {
        if coefficients.is_empty() || coefficients.iter().any(|&c| c != 1 && c != -1) {
            return invalid("coefficients must all be +1 or -1");
        }
        Ok(Self { coefficients })
    }

    /// Degree `n` with `a_n = +1` and `a_i = -1` exactly where bit `i` of
    /// `mask` is set, `i < n`.
    pub fn from_mask(n: usize, mask: u64) -> Self {
        let coefficients = (0..=n)
            .map(|i| if i < n && (mask >> i) & 1 == 1 { -1 } else { 1 })
            .collect();
        Self { coefficients }
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    /// Signs from degree 0 upward, e.g. `+--+`.
    pub fn sign_string(&self) -> String {
        self.coefficients.iter().map(|&c| if c > 0 { '+' } else { '-' }).collect()
    }

    pub fn parse_signs(s: &str) -> Result<Self> {
        let coefficients = s
            .chars()
            .map(|c| match c {
                '+' => Ok(1),
                '-' => Ok(-1),
                other => Err(Error::Parse(other)),
            })
            .collect::<Result<Vec<i8>>>()?;
        Self::new(coefficients)
    }
}

/// Largest `m` with `(z-1)^m` dividing the polynomial whose coefficients are
/// given by degree, found by repeated synthetic division.
pub fn root_multiplicity_at_one(coefficients: &[BigInt]) -> Result<usize> {
    let mut p: Vec<BigInt> = coefficients.to_vec();
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    if p.is_empty() {
        return invalid("the zero polynomial has infinite multiplicity");
    }
    let mut m = 0;
    loop {
        // quotient coefficients are suffix sums; the remainder is p(1)
        let mut acc = BigInt::zero();
        let mut q = vec![BigInt::zero(); p.len() - 1];
        for i in (1..p.len()).rev() {
            acc += &p[i];
            q[i - 1] = acc.clone();
        }
        acc += &p[0];
        if !acc.is_zero() || q.is_empty() {
            return Ok(m);
        }
        m += 1;
        p = q;
    }
}

fn multiplicity_small(coefficients: &[i8], scratch: &mut Vec<i64>) -> usize {
    scratch.clear();
    scratch.extend(coefficients.iter().map(|&c| c as i64));
    let mut m = 0;
    while scratch.len() > 1 {
        let mut acc = 0i64;
        for i in (1..scratch.len()).rev() {
            acc += scratch[i];
            scratch[i] = acc;
        }
        if acc + scratch[0] != 0 {
            break;
        }
        scratch.remove(0);
        m += 1;
    }
    m
}

pub fn poly_multiplicity(p: &PolySpec) -> usize {
    multiplicity_small(&p.coefficients, &mut Vec::new())
}

/// Maximum root multiplicity at 1 over all `+-1` polynomials of degree `n`.
/// Only `a_n = +1` is searched since `p` and `-p` agree; the witness is the
/// smallest mask attaining the maximum.
pub fn max_multiplicity_exhaustive(n: usize) -> Result<(usize, PolySpec)> {
    if n > MAX_EXHAUSTIVE_DEGREE {
        return Err(Error::Infeasible {
            what: "exhaustive multiplicity degree",
            limit: MAX_EXHAUSTIVE_DEGREE as u64,
            requested: n as u64,
        });
    }
    if n == 0 {
        return Ok((0, PolySpec::from_mask(0, 0)));
    }
    let total = 1u64 << n;
    let block = 1u64 << n.min(12);
    let blocks: Vec<u64> = (0..total).step_by(block as usize).collect();
    let best: Vec<(usize, u64)> = blocks
        .par_iter()
        .map(|&start| {
            let mut scratch = Vec::with_capacity(n + 1);
            let mut coeffs = vec![1i8; n + 1];
            let mut best = (0usize, start);
            for mask in start..start + block {
                for (i, c) in coeffs.iter_mut().take(n).enumerate() {
                    *c = if (mask >> i) & 1 == 1 { -1 } else { 1 };
                }
                let m = multiplicity_small(&coeffs, &mut scratch);
                if m > best.0 {
                    best = (m, mask);
                }
            }
            best
        })
        .collect();
    let (m, mask) = best
        .into_iter()
        .fold((0, 0), |acc, b| if b.0 > acc.0 { b } else { acc });
    Ok((m, PolySpec::from_mask(n, mask)))
}

/// One row of the multiplicity table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiplicityRow {
    pub n: usize,
    pub max_multiplicity: usize,
    /// Coefficient signs from degree 0 upward.
    pub witness: String,
}

/// Exhaustive rows for degrees `1..=max_n`.
pub fn multiplicity_table(max_n: usize) -> Result<Vec<MultiplicityRow>> {
    (1..=max_n)
        .map(|n| {
            let (m, w) = max_multiplicity_exhaustive(n)?;
            Ok(MultiplicityRow {
                n,
                max_multiplicity: m,
                witness: w.sign_string(),
            })
        })
        .collect()
}

pub fn write_multiplicity_table<W: std::io::Write>(rows: &[MultiplicityRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    }
    w.flush().map_err(|e| Error::InvalidParameter(e.to_string()))?;
    Ok(())
}

pub fn read_multiplicity_table<R: std::io::Read>(input: R) -> Result<Vec<MultiplicityRow>> {
    csv::Reader::from_reader(input)
        .deserialize()
        .map(|r| r.map_err(|e| Error::InvalidParameter(format!("multiplicity table: {e}"))))
        .collect()
}

/// The committed table for degrees up to 17.
pub fn golden_multiplicity_table() -> Vec<MultiplicityRow> {
    read_multiplicity_table(include_str!("../data/multiplicity_golden.csv").as_bytes())
        .expect("committed table parses")
}

/// Multiplies a polynomial by `(z - 1)`.
pub fn times_z_minus_one(p: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); p.len() + 1];
    for (i, c) in p.iter().enumerate() {
        out[i + 1] += c;
        out[i] -= c;
    }
    out
}

/// `true` when the polynomial's coefficient sum vanishes.
pub fn vanishes_at_one(p: &[BigInt]) -> bool {
    p.iter().fold(BigInt::zero(), |acc, c| acc + c).is_zero()
}

/// Absolute value helper for signed big integers in reports.
pub fn abs_big(x: &BigInt) -> BigUint {
    x.abs().to_biguint().expect("absolute value is non-negative")
}
