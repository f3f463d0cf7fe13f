//! Binary strings, the brute-force subsequence counter and the string families
//! studied by the rest of the crate.
//!
//! Positions are 1-based throughout so that formulas such as `w_{a,b}` and
//! "the lone 1 at index `2k+1`" read the same in code as in the math.

use std::fmt;
use std::str::FromStr;

use bitvec::prelude::*;
use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A packed binary string. The empty string is a valid value.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString {
    bits: BitVec<u64, Lsb0>,
}

impl BitString {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        Self {
            bits: bits.into_iter().collect(),
        }
    }

    /// Builds a string of length `len` from the low `len` bits of `word`, most
    /// significant bit first. For a fixed length the numeric order of `word`
    /// coincides with the lexicographic order of the strings.
    pub fn from_word(word: u64, len: usize) -> Self {
        assert!(len <= 64, "word encoding holds at most 64 bits");
        Self::from_bits((0..len).rev().map(|i| (word >> i) & 1 == 1))
    }

    /// Inverse of [`BitString::from_word`]; `None` when longer than 64 bits.
    pub fn to_word(&self) -> Option<u64> {
        if self.len() > 64 {
            return None;
        }
        Some(self.iter().fold(0u64, |acc, b| (acc << 1) | b as u64))
    }

    /// `(01)^k`.
    pub fn zigzag(k: usize) -> Self {
        Self::from_bits((0..2 * k).map(|i| i % 2 == 1))
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Bit at 1-based position `i`.
    pub fn get(&self, i: usize) -> Option<bool> {
        if i == 0 {
            return None;
        }
        self.bits.get(i - 1).map(|b| *b)
    }

    /// Bit at 1-based position `i`; panics when out of range.
    pub fn bit(&self, i: usize) -> bool {
        self.get(i)
            .unwrap_or_else(|| panic!("index {i} out of range for length {}", self.len()))
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = bool> + ExactSizeIterator + '_ {
        self.bits.iter().by_vals()
    }

    pub fn push(&mut self, bit: bool) {
        self.bits.push(bit);
    }

    /// The contiguous substring `w_{a,b}` (1-based, inclusive). Out-of-range
    /// bounds are clamped and `a > b` yields the empty string.
    pub fn slice(&self, a: usize, b: usize) -> Self {
        let a = a.max(1);
        let b = b.min(self.len());
        if a > b {
            return Self::new();
        }
        Self {
            bits: self.bits[a - 1..b].to_bitvec(),
        }
    }

    pub fn concat(&self, other: &Self) -> Self {
        let mut bits = self.bits.clone();
        bits.extend_from_bitslice(&other.bits);
        Self { bits }
    }

    pub fn reversed(&self) -> Self {
        Self::from_bits(self.iter().rev())
    }

    pub fn count_ones(&self) -> usize {
        self.bits.count_ones()
    }

    pub fn hamming_distance(&self, other: &Self) -> Result<usize> {
        check_same_len(self, other)?;
        Ok(self.iter().zip(other.iter()).filter(|(a, b)| a != b).count())
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString(\"{self}\")")
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Parse(other)),
            })
            .collect::<Result<Vec<_>>>()
            .map(Self::from_bits)
    }
}

impl Serialize for BitString {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

fn check_same_len(x: &BitString, y: &BitString) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    Ok(())
}

/// Number of positions `i` with `w_i = 0` and `w_{i+1} = 1`.
pub fn contiguous_01_count(w: &BitString) -> usize {
    let mut count = 0;
    let mut prev_zero = false;
    for b in w.iter() {
        if b && prev_zero {
            count += 1;
        }
        prev_zero = !b;
    }
    count
}

/// Number of strictly increasing index tuples embedding `w` into `z`.
///
/// Plain dynamic programming over `z`; this is the reference every closed form
/// in the crate is checked against.
pub fn subsequence_count_oracle(w: &BitString, z: &BitString) -> BigUint {
    let pattern: Vec<bool> = w.iter().collect();
    if pattern.len() > z.len() {
        return BigUint::zero();
    }
    // ways[i] = embeddings of w_{1,i} into the prefix of z read so far
    let mut ways = vec![BigUint::zero(); pattern.len() + 1];
    ways[0] = BigUint::one();
    for c in z.iter() {
        for i in (1..=pattern.len()).rev() {
            if pattern[i - 1] == c {
                let (lo, hi) = ways.split_at_mut(i);
                hi[0] += &lo[i - 1];
            }
        }
    }
    ways.pop().unwrap()
}

/// Machine-word version of [`subsequence_count_oracle`]; `None` on overflow.
pub fn subsequence_count_u128(w: &BitString, z: &BitString) -> Option<u128> {
    let pattern: Vec<bool> = w.iter().collect();
    if pattern.len() > z.len() {
        return Some(0);
    }
    let mut ways = vec![0u128; pattern.len() + 1];
    ways[0] = 1;
    for c in z.iter() {
        for i in (1..=pattern.len()).rev() {
            if pattern[i - 1] == c {
                ways[i] = ways[i].checked_add(ways[i - 1])?;
            }
        }
    }
    ways.pop()
}

/// Which member of a [`PaddedPair`] is meant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    X,
    Y,
}

/// `x = (01)^k 1 (01)^{k+1}` and `y = (01)^{k+1} 1 (01)^k`, both of length `4k+3`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PaddedPair {
    pub k: usize,
    pub n: usize,
    pub x: BitString,
    pub y: BitString,
}

pub fn make_padded_pair(k: usize) -> Result<PaddedPair> {
    if k == 0 {
        return Err(Error::InvalidParameter("padded pair needs k >= 1".into()));
    }
    let one = BitString::from_bits([true]);
    let x = BitString::zigzag(k).concat(&one).concat(&BitString::zigzag(k + 1));
    let y = BitString::zigzag(k + 1).concat(&one).concat(&BitString::zigzag(k));
    Ok(PaddedPair { k, n: 4 * k + 3, x, y })
}

impl PaddedPair {
    pub fn new(k: usize) -> Result<Self> {
        make_padded_pair(k)
    }

    pub fn get(&self, variant: Variant) -> &BitString {
        match variant {
            Variant::X => &self.x,
            Variant::Y => &self.y,
        }
    }

    /// 1-based index of the defect: `2k+1` in `x`, `2k+3` in `y`.
    pub fn lone_one_index(&self, variant: Variant) -> usize {
        match variant {
            Variant::X => 2 * self.k + 1,
            Variant::Y => 2 * self.k + 3,
        }
    }

    /// Recognizes a member of some padded pair.
    pub fn recognize(s: &BitString) -> Option<(PaddedPair, Variant)> {
        let n = s.len();
        if n < 7 || n % 4 != 3 {
            return None;
        }
        let pair = make_padded_pair((n - 3) / 4).ok()?;
        if &pair.x == s {
            Some((pair, Variant::X))
        } else if &pair.y == s {
            Some((pair, Variant::Y))
        } else {
            None
        }
    }
}

/// A pair agreeing on positions `<= k1` and `>= k2` and differing strictly between.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EadPair {
    pub x: BitString,
    pub y: BitString,
    pub k1: usize,
    pub k2: usize,
}

/// Returns `(k1, k2)` with `k1` the longest agreeing prefix and `k2` the start of
/// the longest agreeing suffix, provided every position strictly between them
/// differs. `None` when `x == y` or the disagreement block has a gap.
pub fn is_ead_pair(x: &BitString, y: &BitString) -> Result<Option<(usize, usize)>> {
    check_same_len(x, y)?;
    let n = x.len();
    let agree = |i: usize| x.bit(i) == y.bit(i);
    let k1 = (1..=n).take_while(|&i| agree(i)).count();
    if k1 == n {
        return Ok(None);
    }
    let suffix = (1..=n).rev().take_while(|&i| agree(i)).count();
    let k2 = n + 1 - suffix;
    if ((k1 + 1)..k2).all(|i| !agree(i)) {
        Ok(Some((k1, k2)))
    } else {
        Ok(None)
    }
}

impl EadPair {
    pub fn new(x: BitString, y: BitString) -> Result<Option<Self>> {
        Ok(is_ead_pair(&x, &y)?.map(|(k1, k2)| Self { x, y, k1, k2 }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn padded_pair_strings() {
        let p = make_padded_pair(1).unwrap();
        assert_eq!(p.x.to_string(), "0110101");
        assert_eq!(p.y.to_string(), "0101101");
        assert_eq!(p.n, 7);
        assert_eq!(p.x.hamming_distance(&p.y).unwrap(), 2);
        let diff: Vec<usize> = (1..=7).filter(|&i| p.x.bit(i) != p.y.bit(i)).collect();
        assert_eq!(diff, vec![3, 4]);

        let p2 = make_padded_pair(2).unwrap();
        assert_eq!(p2.n, 11);
        assert_eq!(p2.x.len(), 11);
        assert!(p2.x.to_string().starts_with("0101"));
        assert!(make_padded_pair(0).is_err());
    }

    #[test]
    fn padded_pairs_differ_in_two_places() {
        for k in 1..20 {
            let p = make_padded_pair(k).unwrap();
            assert_ne!(p.x, p.y);
            assert_eq!(p.x.hamming_distance(&p.y).unwrap(), 2);
            assert!(p.x.bit(p.lone_one_index(Variant::X)));
            assert!(p.y.bit(p.lone_one_index(Variant::Y)));
            assert_eq!(PaddedPair::recognize(&p.y), Some((p.clone(), Variant::Y)));
        }
        assert_eq!(PaddedPair::recognize(&bs("0101010")), None);
    }

    #[test]
    fn contiguous_counts() {
        assert_eq!(contiguous_01_count(&bs("0101")), 2);
        assert_eq!(contiguous_01_count(&bs("")), 0);
        assert_eq!(contiguous_01_count(&bs("0")), 0);
        assert_eq!(contiguous_01_count(&bs("0110101")), 3);
        assert_eq!(contiguous_01_count(&bs("1100")), 0);
    }

    #[test]
    fn oracle_examples() {
        let count = |w: &str, z: &str| subsequence_count_oracle(&bs(w), &bs(z));
        assert_eq!(count("01", "0101"), BigUint::from(3u32));
        assert_eq!(count("11", "0110101"), BigUint::from(6u32));
        assert_eq!(count("", "0110"), BigUint::one());
        assert_eq!(count("", ""), BigUint::one());
        assert_eq!(count("0", ""), BigUint::zero());
        assert_eq!(count("111", "11"), BigUint::zero());
        assert_eq!(subsequence_count_u128(&bs("01"), &bs("0101")), Some(3));
    }

    #[test]
    fn slicing_is_total() {
        let w = bs("011010");
        assert_eq!(w.slice(2, 4), bs("110"));
        assert_eq!(w.slice(4, 2), bs(""));
        assert_eq!(w.slice(5, 100), bs("10"));
        assert_eq!(w.slice(0, 1), bs("0"));
    }

    #[test]
    fn word_encoding_round_trip() {
        let w = bs("1011");
        assert_eq!(w.to_word(), Some(0b1011));
        assert_eq!(BitString::from_word(0b1011, 4), w);
        assert_eq!(BitString::from_word(1, 3), bs("001"));
    }

    #[test]
    fn parse_and_print() {
        assert_eq!(bs("").to_string(), "");
        assert!("012".parse::<BitString>().is_err());
        let json = serde_json::to_string(&bs("0110")).unwrap();
        assert_eq!(json, "\"0110\"");
        let back: BitString = serde_json::from_str(&json).unwrap();
        assert_eq!(back, bs("0110"));
    }

    #[test]
    fn ead_detection() {
        assert_eq!(is_ead_pair(&bs("0011"), &bs("0101")).unwrap(), Some((1, 4)));
        assert_eq!(is_ead_pair(&bs("0011"), &bs("0011")).unwrap(), None);
        assert_eq!(is_ead_pair(&bs("00"), &bs("11")).unwrap(), Some((0, 3)));
        // gap inside the disagreement block
        assert_eq!(is_ead_pair(&bs("0000"), &bs("1010")).unwrap(), None);
        assert!(is_ead_pair(&bs("0"), &bs("01")).is_err());
        let pair = EadPair::new(bs("0011"), bs("0101")).unwrap().unwrap();
        assert_eq!((pair.k1, pair.k2), (1, 4));
    }
}
