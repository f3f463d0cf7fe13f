//! Exact and log-space binomial machinery, the closed-form subsequence and
//! contiguous-`01` counts, and the segment tables used by the pair-sum evaluators.
//!
//! Binomial coefficients are total: `C(n, r) = 0` whenever `r < 0`, `r > n` or
//! `n < 0`. Sums throughout the crate rely on this to range freely over indices.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::numeric::big_ln;
use crate::strings::{contiguous_01_count, BitString};

/// Above this `min(r, n - r)` the prime-factorization route is used.
const MULTIPLICATIVE_LIMIT: u64 = 2_000;

/// `C(n, r)` as an exact big integer, zero outside `0 <= r <= n`.
pub fn binomial_exact(n: i64, r: i64) -> BigUint {
    if n < 0 || r < 0 || r > n {
        return BigUint::zero();
    }
    let (n, r) = (n as u64, r as u64);
    let r = r.min(n - r);
    if r <= MULTIPLICATIVE_LIMIT {
        let mut acc = BigUint::one();
        for i in 1..=r {
            acc *= n - r + i;
            acc /= i;
        }
        acc
    } else {
        binomial_by_primes(n, r)
    }
}

/// Legendre's formula for the prime exponents of `C(n, r)`, then a balanced
/// product tree.
fn binomial_by_primes(n: u64, r: u64) -> BigUint {
    let primes = primes_up_to(n as usize);
    let mut factors: Vec<BigUint> = Vec::new();
    for p in primes {
        let p = p as u64;
        let mut exp = 0u32;
        let mut pk = p;
        loop {
            exp += (n / pk - r / pk - (n - r) / pk) as u32;
            match pk.checked_mul(p) {
                Some(next) if next <= n => pk = next,
                _ => break,
            }
        }
        if exp > 0 {
            factors.push(BigUint::from(p).pow(exp));
        }
    }
    product_tree(factors)
}

fn product_tree(mut items: Vec<BigUint>) -> BigUint {
    if items.is_empty() {
        return BigUint::one();
    }
    while items.len() > 1 {
        let mut next = Vec::with_capacity(items.len().div_ceil(2));
        let mut it = items.into_iter();
        while let Some(a) = it.next() {
            match it.next() {
                Some(b) => next.push(a * b),
                None => next.push(a),
            }
        }
        items = next;
    }
    items.pop().unwrap()
}

fn primes_up_to(n: usize) -> Vec<usize> {
    if n < 2 {
        return Vec::new();
    }
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    sieve
        .iter()
        .enumerate()
        .filter_map(|(i, &p)| p.then_some(i))
        .collect()
}

/// `hi! / lo!` split into an exact numerator and denominator (one of them is 1).
pub fn factorial_ratio(hi: u64, lo: u64) -> (BigUint, BigUint) {
    let range_product = |a: u64, b: u64| product_tree((a + 1..=b).map(BigUint::from).collect());
    if hi >= lo {
        (range_product(lo, hi), BigUint::one())
    } else {
        (BigUint::one(), range_product(hi, lo))
    }
}

/// `C(n1, r1) / C(n0, r0)` as an exact fraction `(num, den)`, computed from
/// factorial ratios so the cost depends only on the parameter offsets. Returns
/// `None` when the denominator coefficient vanishes.
pub fn binomial_ratio(n1: i64, r1: i64, n0: i64, r0: i64) -> Option<(BigUint, BigUint)> {
    let in_range = |n: i64, r: i64| n >= 0 && r >= 0 && r <= n;
    if !in_range(n0, r0) {
        return None;
    }
    if !in_range(n1, r1) {
        return Some((BigUint::zero(), BigUint::one()));
    }
    let parts = [
        factorial_ratio(n1 as u64, n0 as u64),
        factorial_ratio(r0 as u64, r1 as u64),
        factorial_ratio((n0 - r0) as u64, (n1 - r1) as u64),
    ];
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for (a, b) in parts {
        num *= a;
        den *= b;
    }
    Some((num, den))
}

fn ln_factorial_small(n: u64) -> f64 {
    (2..=n).map(|i| (i as f64).ln()).sum()
}

/// `ln(n!) - [n ln n - n + ln(2 pi n)/2]`, the Stirling remainder.
fn stirling_remainder(n: u64) -> f64 {
    if n <= 15 {
        let nf = n as f64;
        return ln_factorial_small(n)
            - (nf * nf.ln() - nf + 0.5 * (2.0 * std::f64::consts::PI * nf).ln());
    }
    let x = n as f64;
    let x2 = x * x;
    (1.0 / 12.0 - (1.0 / 360.0 - (1.0 / 1260.0 - (1.0 / 1680.0 - 1.0 / (1188.0 * x2)) / x2) / x2) / x2)
        / x
}

/// `ln(n!)`.
pub fn ln_factorial(n: u64) -> f64 {
    if n <= 15 {
        return ln_factorial_small(n);
    }
    let x = n as f64;
    x * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI * x).ln() + stirling_remainder(n)
}

/// `ln C(n, r)` to near double precision for `n` up to well beyond `10^6`.
///
/// Uses the saddle-point split (Stirling remainders plus an entropy term) so
/// that no two large logarithms are subtracted. Returns `-inf` out of range.
pub fn ln_binomial(n: i64, r: i64) -> f64 {
    if n < 0 || r < 0 || r > n {
        return f64::NEG_INFINITY;
    }
    let (n, r) = (n as u64, r as u64);
    let s = n - r;
    if r == 0 || s == 0 {
        return 0.0;
    }
    if n <= 60 {
        return big_ln(&binomial_exact(n as i64, r as i64));
    }
    let (nf, rf, sf) = (n as f64, r as f64, s as f64);
    let entropy = -rf * (rf / nf).ln() - sf * (-(rf / nf)).ln_1p();
    entropy + 0.5 * (nf / (2.0 * std::f64::consts::PI * rf * sf)).ln() + stirling_remainder(n)
        - stirling_remainder(r)
        - stirling_remainder(s)
}

/// Precomputed binomials: an exact Pascal triangle and factorials up to `max_n`,
/// plus log-factorials.
#[derive(Debug, Clone)]
pub struct BinomialTable {
    max_n: usize,
    rows: Vec<Vec<BigUint>>,
    factorials: Vec<BigUint>,
    ln_factorials: Vec<f64>,
}

impl BinomialTable {
    pub fn new(max_n: usize) -> Self {
        Self::build(max_n, max_n)
    }

    /// Log-factorials up to `max_n` without the exact triangle; exact lookups
    /// fall back to [`binomial_exact`].
    pub fn logs_only(max_n: usize) -> Self {
        Self::build(max_n, 0)
    }

    fn build(max_n: usize, exact_max: usize) -> Self {
        let mut rows: Vec<Vec<BigUint>> = Vec::with_capacity(exact_max + 1);
        rows.push(vec![BigUint::one()]);
        for n in 1..=exact_max {
            let prev = &rows[n - 1];
            let mut row = Vec::with_capacity(n + 1);
            row.push(BigUint::one());
            for r in 1..n {
                row.push(&prev[r - 1] + &prev[r]);
            }
            row.push(BigUint::one());
            rows.push(row);
        }
        let mut factorials = vec![BigUint::one()];
        for i in 1..=exact_max {
            let next = &factorials[i - 1] * BigUint::from(i);
            factorials.push(next);
        }
        let ln_factorials = (0..=max_n as u64).map(ln_factorial).collect();
        Self {
            max_n,
            rows,
            factorials,
            ln_factorials,
        }
    }

    pub fn max_n(&self) -> usize {
        self.max_n
    }

    /// Borrowed `C(n, r)`; `None` when `n` exceeds the exact table.
    pub fn get(&self, n: i64, r: i64) -> Option<&BigUint> {
        static ZERO: std::sync::OnceLock<BigUint> = std::sync::OnceLock::new();
        if n < 0 || r < 0 || r > n {
            return Some(ZERO.get_or_init(BigUint::zero));
        }
        self.rows.get(n as usize).map(|row| &row[r as usize])
    }

    /// `C(n, r)`, falling back to [`binomial_exact`] beyond the table.
    pub fn binomial(&self, n: i64, r: i64) -> BigUint {
        match self.get(n, r) {
            Some(v) => v.clone(),
            None => binomial_exact(n, r),
        }
    }

    pub fn factorial(&self, n: usize) -> Option<&BigUint> {
        self.factorials.get(n)
    }

    /// `ln C(n, r)` from the log-factorial table (`-inf` out of range).
    pub fn ln_binomial(&self, n: i64, r: i64) -> f64 {
        if n < 0 || r < 0 || r > n {
            return f64::NEG_INFINITY;
        }
        match self.ln_factorials.get(n as usize) {
            Some(lf) => lf - self.ln_factorials[r as usize] - self.ln_factorials[(n - r) as usize],
            None => ln_binomial(n, r),
        }
    }
}

/// `f(w; (01)^k) = C(k + f_c(w), |w|)`.
pub fn zigzag_subseq_count(k: usize, w: &BitString) -> BigUint {
    binomial_exact((k + contiguous_01_count(w)) as i64, w.len() as i64)
}

/// Number of length-`l` strings with exactly `a` contiguous `01`s: `C(l+1, 2a+1)`.
pub fn fc_class_count(l: i64, a: i64) -> BigUint {
    if a < 0 || l < 0 {
        return BigUint::zero();
    }
    binomial_exact(l + 1, 2 * a + 1)
}

/// Constraint on the final bit of a segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LastBit {
    Zero,
    One,
    Any,
}

impl LastBit {
    pub fn of(bit: bool) -> Self {
        if bit {
            LastBit::One
        } else {
            LastBit::Zero
        }
    }
}

/// `T(l, a, last)`: length-`l` strings with `a` contiguous `01`s ending in `last`.
///
/// Closed forms `T(l,a,0) = C(l, 2a+1)` and `T(l,a,1) = C(l, 2a)`. The empty
/// segment is treated as ending in a virtual `1` (so `T(0,0,1) = 1`,
/// `T(0,0,0) = 0`), which is exactly the junction convention the pair-sum
/// evaluator needs at `j = 1` and `t = j + 1`. Both closed forms are checked
/// against [`FcClassTable`] in the tests.
pub fn segment_count(l: i64, a: i64, last: LastBit) -> BigUint {
    if l < 0 || a < 0 {
        return BigUint::zero();
    }
    match last {
        LastBit::Zero => binomial_exact(l, 2 * a + 1),
        LastBit::One => binomial_exact(l, 2 * a),
        LastBit::Any => binomial_exact(l + 1, 2 * a + 1),
    }
}

/// [`segment_count`] served from a binomial table.
pub fn segment_count_in(table: &BinomialTable, l: i64, a: i64, last: LastBit) -> BigUint {
    if l < 0 || a < 0 {
        return BigUint::zero();
    }
    match last {
        LastBit::Zero => table.binomial(l, 2 * a + 1),
        LastBit::One => table.binomial(l, 2 * a),
        LastBit::Any => table.binomial(l + 1, 2 * a + 1),
    }
}

/// Dynamic-programming table of `T(l, a, last)` built from the recurrence
/// `T(l,a,0) = T(l-1,a,0) + T(l-1,a,1)`, `T(l,a,1) = T(l-1,a-1,0) + T(l-1,a,1)`,
/// seeded with the virtual trailing `1` of the empty string.
#[derive(Debug, Clone)]
pub struct FcClassTable {
    max_l: usize,
    // counts[l][a] = [ending in 0, ending in 1]
    counts: Vec<Vec<[BigUint; 2]>>,
}

impl FcClassTable {
    pub fn new(max_l: usize) -> Self {
        let width = max_l / 2 + 2;
        let zero = || [BigUint::zero(), BigUint::zero()];
        let mut counts = vec![vec![zero(); width]; max_l + 1];
        counts[0][0][1] = BigUint::one();
        for l in 1..=max_l {
            for a in 0..width {
                let end0 = &counts[l - 1][a][0] + &counts[l - 1][a][1];
                let mut end1 = counts[l - 1][a][1].clone();
                if a > 0 {
                    end1 += &counts[l - 1][a - 1][0];
                }
                counts[l][a] = [end0, end1];
            }
        }
        Self { max_l, counts }
    }

    pub fn max_l(&self) -> usize {
        self.max_l
    }

    pub fn get(&self, l: usize, a: usize, last: LastBit) -> BigUint {
        let Some(row) = self.counts.get(l) else {
            panic!("length {l} beyond table size {}", self.max_l);
        };
        let Some(cell) = row.get(a) else {
            return BigUint::zero();
        };
        match last {
            LastBit::Zero => cell[0].clone(),
            LastBit::One => cell[1].clone(),
            LastBit::Any if l == 0 => cell[1].clone(),
            LastBit::Any => &cell[0] + &cell[1],
        }
    }
}

/// Both sides of `sum_c C(D, c) C(E, F - c) = C(D + E, F)`.
pub fn vandermonde_check(d: i64, e: i64, f: i64) -> (BigUint, BigUint) {
    let lhs = (0..=d.max(0))
        .map(|c| binomial_exact(d, c) * binomial_exact(e, f - c))
        .sum();
    (lhs, binomial_exact(d + e, f))
}
