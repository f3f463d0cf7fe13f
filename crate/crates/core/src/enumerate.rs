//! Exhaustive enumeration of the trace space `{0,1}^{<=n}` of two equal-length
//! sources.
//!
//! Words are visited depth-first; each extension updates the prefix-embedding
//! vectors of both sources in `O(n)`, so a full sweep costs `O(n 2^n)` word
//! operations instead of one subsequence DP per word. Words with zero count in
//! both sources (and therefore all their extensions) are skipped: they carry no
//! probability under either trace distribution.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::strings::BitString;

/// Largest source length the enumerator accepts (counts must fit in `u64`).
pub const MAX_ENUMERATION_LEN: usize = 60;

/// One visited trace word with its subsequence counts in both sources.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TraceView {
    pub len: usize,
    /// Bits of the word, most significant first (see [`BitString::from_word`]).
    pub word: u64,
    /// Number of contiguous `01`s in the word.
    pub fc: usize,
    pub count_x: u64,
    pub count_y: u64,
}

impl TraceView {
    pub fn to_bitstring(&self) -> BitString {
        BitString::from_word(self.word, self.len)
    }
}

struct Walker<'a, A, V> {
    x: &'a [bool],
    y: &'a [bool],
    visit: &'a V,
    acc: A,
    // per-depth scratch vectors for the two sources
    vx: Vec<Vec<u64>>,
    vy: Vec<Vec<u64>>,
}

impl<'a, A, V: Fn(&mut A, &TraceView)> Walker<'a, A, V> {
    fn new(x: &'a [bool], y: &'a [bool], visit: &'a V, acc: A) -> Self {
        let n = x.len();
        let mut vx = vec![vec![0u64; n + 1]; n + 2];
        let mut vy = vec![vec![0u64; n + 1]; n + 2];
        vx[0].iter_mut().for_each(|v| *v = 1);
        vy[0].iter_mut().for_each(|v| *v = 1);
        Self {
            x,
            y,
            visit,
            acc,
            vx,
            vy,
        }
    }

    /// Builds level `depth + 1` from level `depth` by appending `bit`; returns
    /// the two full-source counts.
    fn extend(&mut self, depth: usize, bit: bool) -> (u64, u64) {
        let n = self.x.len();
        let (lo, hi) = self.vx.split_at_mut(depth + 1);
        let (src, dst) = (&lo[depth], &mut hi[0]);
        dst[0] = 0;
        for i in 1..=n {
            dst[i] = dst[i - 1] + if self.x[i - 1] == bit { src[i - 1] } else { 0 };
        }
        let (lo, hi) = self.vy.split_at_mut(depth + 1);
        let (src, dst) = (&lo[depth], &mut hi[0]);
        dst[0] = 0;
        for i in 1..=n {
            dst[i] = dst[i - 1] + if self.y[i - 1] == bit { src[i - 1] } else { 0 };
        }
        (self.vx[depth + 1][n], self.vy[depth + 1][n])
    }

    /// Visits the word at `depth` (already built) and, while `depth < stop`,
    /// recurses into its extensions.
    fn walk(&mut self, depth: usize, word: u64, fc: usize, last_zero: bool, stop: usize) {
        let n = self.x.len();
        let view = TraceView {
            len: depth,
            word,
            fc,
            count_x: self.vx[depth][n],
            count_y: self.vy[depth][n],
        };
        (self.visit)(&mut self.acc, &view);
        if depth >= stop {
            return;
        }
        for bit in [false, true] {
            let (cx, cy) = self.extend(depth, bit);
            if cx == 0 && cy == 0 {
                continue;
            }
            let fc_next = fc + (bit && last_zero && depth > 0) as usize;
            self.walk(depth + 1, (word << 1) | bit as u64, fc_next, !bit, stop);
        }
    }

    /// Rebuilds the scratch levels along the path of `prefix` (length `depth`);
    /// returns `false` when the prefix is outside both supports.
    fn descend_to(&mut self, prefix: u64, depth: usize) -> Option<(usize, bool)> {
        let mut fc = 0;
        let mut last_zero = false;
        for d in 0..depth {
            let bit = (prefix >> (depth - 1 - d)) & 1 == 1;
            let (cx, cy) = self.extend(d, bit);
            if cx == 0 && cy == 0 {
                return None;
            }
            if bit && last_zero {
                fc += 1;
            }
            last_zero = !bit;
        }
        Some((fc, last_zero))
    }
}

/// Folds `visit` over every trace word with non-zero count in `x` or `y`.
///
/// The space is split by fixed-length prefixes and processed in parallel; the
/// partial accumulators are merged with `merge` in prefix order, so the result
/// is independent of the thread count.
pub fn fold_traces<A, I, V, M>(
    x: &BitString,
    y: &BitString,
    init: I,
    visit: V,
    merge: M,
) -> Result<A>
where
    A: Send,
    I: Fn() -> A + Sync,
    V: Fn(&mut A, &TraceView) + Sync,
    M: Fn(A, A) -> A,
{
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    let n = x.len();
    if n > MAX_ENUMERATION_LEN {
        return Err(Error::Infeasible {
            what: "trace enumeration length",
            limit: MAX_ENUMERATION_LEN as u64,
            requested: n as u64,
        });
    }
    let xb: Vec<bool> = x.iter().collect();
    let yb: Vec<bool> = y.iter().collect();
    let split = n.min(8);

    // words shorter than the split depth
    let mut head = Walker::new(&xb, &yb, &visit, init());
    head.walk(0, 0, 0, false, split.saturating_sub(1));
    let head_acc = head.acc;
    if split == 0 {
        return Ok(head_acc);
    }

    let parts: Vec<A> = (0..1u64 << split)
        .into_par_iter()
        .map(|prefix| {
            let mut w = Walker::new(&xb, &yb, &visit, init());
            if let Some((fc, last_zero)) = w.descend_to(prefix, split) {
                w.walk(split, prefix, fc, last_zero, n);
            }
            w.acc
        })
        .collect();
    Ok(parts.into_iter().fold(head_acc, merge))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strings::{contiguous_01_count, subsequence_count_oracle};
    use num_bigint::BigUint;

    #[test]
    fn counts_match_oracle_for_every_word() {
        let x: BitString = "0110101".parse().unwrap();
        let y: BitString = "0101101".parse().unwrap();
        let seen = fold_traces(
            &x,
            &y,
            Vec::new,
            |acc: &mut Vec<TraceView>, v| acc.push(*v),
            |mut a, b| {
                a.extend(b);
                a
            },
        )
        .unwrap();
        for v in &seen {
            let w = v.to_bitstring();
            assert_eq!(BigUint::from(v.count_x), subsequence_count_oracle(&w, &x));
            assert_eq!(BigUint::from(v.count_y), subsequence_count_oracle(&w, &y));
            assert_eq!(v.fc, contiguous_01_count(&w));
        }
        // every word with a non-zero count shows up exactly once
        let mut expected = 0;
        for len in 0..=7 {
            for word in 0..1u64 << len {
                let w = BitString::from_word(word, len);
                let nonzero = subsequence_count_oracle(&w, &x) > BigUint::from(0u32)
                    || subsequence_count_oracle(&w, &y) > BigUint::from(0u32);
                expected += nonzero as usize;
            }
        }
        assert_eq!(seen.len(), expected);
    }

    #[test]
    fn total_count_per_length_is_binomial() {
        let x: BitString = "0011010110".parse().unwrap();
        let sums = fold_traces(
            &x,
            &x,
            || vec![0u64; 11],
            |acc, v| acc[v.len] += v.count_x,
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(s, t)| *s += t);
                a
            },
        )
        .unwrap();
        let binom = [1u64, 10, 45, 120, 210, 252, 210, 120, 45, 10, 1];
        assert_eq!(sums, binom.to_vec());
    }

    #[test]
    fn short_and_empty_sources() {
        let e = BitString::new();
        let n = fold_traces(&e, &e, || 0usize, |a, _| *a += 1, |a, b| a + b).unwrap();
        assert_eq!(n, 1);
        let x: BitString = "10".parse().unwrap();
        let n = fold_traces(&x, &x, || 0usize, |a, _| *a += 1, |a, b| a + b).unwrap();
        assert_eq!(n, 4); // "", "1", "0", "10"
    }
}
