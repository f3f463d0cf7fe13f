//! Exact squared-difference sums of the padded pair, grouped by count profile.
//!
//! For a trace `w` with `|w| = m` and `f_c(w) = f` the avoid-terms of
//! `f(w; x)` and `f(w; y)` cancel, leaving
//! `f(w;x) - f(w;y) = sum_{j : w_j = 1} d_j(a_j, c_j)` where `a_j` and `c_j` are
//! the contiguous-`01` counts left and right of position `j`. Summing the
//! square over every `w` with profile `(m, f)` is done two ways:
//!
//! * [`inner_diff_sq_sum`] expands the square into pairs `j <= t` and counts the
//!   words with given junction data `(j, t, a, b, w_{j-1}, w_{t-1})` through the
//!   segment closed forms. `O(m^2 f^2)` big-integer operations.
//! * [`inner_diff_sq_sum_scan`] runs a left-to-right transfer over states
//!   `(a, last bit)` carrying the count and the first two moments of the partial
//!   difference. `O(m f)` operations; used by [`surrogate_distance`].

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{AvoidTerm, ChannelSpec};
use crate::combinatorics::BinomialTable;
use crate::distance::{chi_sq_monte_carlo, ESetSpec};
use crate::error::{invalid, Result};
use crate::numeric::{big_ratio_f64, CompensatedSum};
use crate::stats::{least_squares, LineFit};
use crate::strings::PaddedPair;

/// Trace length and contiguous-`01` count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CountProfile {
    pub m: usize,
    pub f: usize,
}

impl CountProfile {
    pub fn new(m: usize, f: usize) -> Self {
        Self { m, f }
    }

    /// Whether some word has this profile.
    pub fn is_realizable(&self) -> bool {
        2 * self.f <= self.m
    }

    /// Every realizable profile with `m <= n`, ordered by `(m, f)`.
    pub fn all_up_to(n: usize) -> Vec<CountProfile> {
        (0..=n)
            .flat_map(|m| (0..=m / 2).map(move |f| CountProfile { m, f }))
            .collect()
    }
}

/// Index windows for the junction evaluator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum JunctionMode {
    /// Every index and count.
    #[default]
    Exact,
    /// Only `|2j - m| <= 2r` and `|2a - f| <= 2r` (same for `t`, `b`); an
    /// approximation that drops the improbable corners.
    Windowed { radius: usize },
}

/// Binomial lookups and the per-index difference for one `(k, m, f)`.
struct Terms<'a> {
    table: &'a BinomialTable,
    k: i64,
    m: i64,
    f: i64,
}

impl<'a> Terms<'a> {
    fn new(table: &'a BinomialTable, k: usize, p: CountProfile) -> Self {
        Self {
            table,
            k: k as i64,
            m: p.m as i64,
            f: p.f as i64,
        }
    }

    fn c(&self, n: i64, r: i64) -> &BigUint {
        self.table.get(n, r).expect("binomial table covers the pair")
    }

    /// `d_j(a, c) = C(k+a, j-1) C(k+1+c, m-j) - C(k+1+a, j-1) C(k+c, m-j)`.
    fn d(&self, j: i64, a: i64, c: i64) -> BigInt {
        if a < 0 || c < 0 {
            return BigInt::zero();
        }
        let (k, m) = (self.k, self.m);
        let x = self.c(k + a, j - 1) * self.c(k + 1 + c, m - j);
        let y = self.c(k + 1 + a, j - 1) * self.c(k + c, m - j);
        BigInt::from(x) - BigInt::from(y)
    }

    /// Words of length `l` with `f_c = a` ending in `last` (an empty word ends
    /// in a virtual `1`).
    fn segment(&self, l: i64, a: i64, last_one: bool) -> &BigUint {
        if a < 0 {
            return self.c(-1, 0);
        }
        if last_one {
            self.c(l, 2 * a)
        } else {
            self.c(l, 2 * a + 1)
        }
    }

    /// Words of length `l` with `f_c = a`, any last bit.
    fn class(&self, l: i64, a: i64) -> &BigUint {
        if a < 0 {
            return self.c(-1, 0);
        }
        self.c(l + 1, 2 * a + 1)
    }
}

fn to_biguint(v: BigInt) -> BigUint {
    debug_assert!(v.sign() != Sign::Minus);
    v.into_parts().1
}

/// Exact `sum_{|w| = m, f_c(w) = f} (f(w;x) - f(w;y))^2` by junction casework.
pub fn inner_diff_sq_sum(pair: &PaddedPair, profile: CountProfile) -> BigUint {
    let table = BinomialTable::new(pair.n + 2);
    inner_diff_sq_sum_with(&table, pair.k, profile, JunctionMode::Exact)
}

/// Junction casework with a caller-provided table (covering `n + 2`).
pub fn inner_diff_sq_sum_with(
    table: &BinomialTable,
    k: usize,
    profile: CountProfile,
    mode: JunctionMode,
) -> BigUint {
    if !profile.is_realizable() || profile.m == 0 {
        return BigUint::zero();
    }
    let t = Terms::new(table, k, profile);
    let (m, f) = (t.m, t.f);
    let (index_ok, count_ok): (Box<dyn Fn(i64) -> bool>, Box<dyn Fn(i64) -> bool>) = match mode {
        JunctionMode::Exact => (Box::new(|_| true), Box::new(|_| true)),
        JunctionMode::Windowed { radius } => {
            let r = radius as i64;
            (
                Box::new(move |j| (2 * j - m).abs() <= 2 * r),
                Box::new(move |a| (2 * a - f).abs() <= 2 * r),
            )
        }
    };
    let bit = |one: bool| !one as i64; // [c = 0]

    // prefix weights P_j(a, c1) = T(j-1, a, c1) d_j(a, f - a - [c1=0])
    let mut prefix: Vec<Vec<[BigInt; 2]>> = Vec::with_capacity(m as usize + 1);
    prefix.push(Vec::new());
    let mut diagonal = BigInt::zero();
    for j in 1..=m {
        let mut row = Vec::with_capacity(f as usize + 1);
        for a in 0..=f {
            let mut cell = [BigInt::zero(), BigInt::zero()];
            if index_ok(j) && count_ok(a) {
                for (slot, one) in [(0, false), (1, true)] {
                    let seg = t.segment(j - 1, a, one);
                    if seg.is_zero() {
                        continue;
                    }
                    let c = f - a - bit(one);
                    let d = t.d(j, a, c);
                    if d.is_zero() {
                        continue;
                    }
                    let w = BigInt::from(seg.clone()) * &d;
                    diagonal += &w * &d * BigInt::from(t.class(m - j, c).clone());
                    cell[slot] = w;
                }
            }
            row.push(cell);
        }
        prefix.push(row);
    }

    let mut off = BigInt::zero();
    for tt in 2..=m {
        if !index_ok(tt) {
            continue;
        }
        for b in 0..=f {
            if !count_ok(b) {
                continue;
            }
            for c2_one in [false, true] {
                let cb = f - b - bit(c2_one);
                let tail = t.class(m - tt, cb);
                if tail.is_zero() {
                    continue;
                }
                let dt = t.d(tt, b, cb);
                if dt.is_zero() {
                    continue;
                }
                let mut inner = BigInt::zero();
                for j in 1..tt {
                    for a in 0..=b {
                        for (slot, c1_one) in [(0usize, false), (1, true)] {
                            let p = &prefix[j as usize][a as usize][slot];
                            if p.is_zero() {
                                continue;
                            }
                            let mid = t.segment(tt - 1 - j, b - a - bit(c1_one), c2_one);
                            if !mid.is_zero() {
                                inner += p * BigInt::from(mid.clone());
                            }
                        }
                    }
                }
                off += inner * dt * BigInt::from(tail.clone());
            }
        }
    }
    to_biguint(diagonal + off * 2)
}

#[derive(Clone, Default)]
struct Moments {
    count: BigInt,
    s1: BigInt,
    s2: BigInt,
}

/// Same sum as [`inner_diff_sq_sum`] by a transfer scan over `(a, last bit)`.
pub fn inner_diff_sq_sum_scan(table: &BinomialTable, k: usize, profile: CountProfile) -> BigUint {
    if !profile.is_realizable() || profile.m == 0 {
        return BigUint::zero();
    }
    let t = Terms::new(table, k, profile);
    let (m, f) = (profile.m, profile.f);
    // most contiguous 01s that `r` more bits can add after `last`
    let reach = |last_one: bool, r: usize| if last_one { r / 2 } else { r.div_ceil(2) };

    let mut cur: Vec<[Option<Moments>; 2]> = vec![[None, None]; f + 1];
    cur[0][1] = Some(Moments {
        count: BigInt::from(1),
        ..Moments::default()
    });
    for j in 1..=m {
        let rest = m - j;
        let mut next: Vec<[Option<Moments>; 2]> = vec![[None, None]; f + 1];
        for a in 0..=f {
            for last_one in [false, true] {
                let Some(st) = &cur[a][last_one as usize] else {
                    continue;
                };
                if f - a <= reach(false, rest) {
                    let slot = next[a][0].get_or_insert_with(Moments::default);
                    slot.count += &st.count;
                    slot.s1 += &st.s1;
                    slot.s2 += &st.s2;
                }
                let inc = !last_one as usize;
                let a1 = a + inc;
                if a1 <= f && f - a1 <= reach(true, rest) {
                    let e = t.d(j as i64, a as i64, (f - a1) as i64);
                    let slot = next[a1][1].get_or_insert_with(Moments::default);
                    if e.is_zero() {
                        slot.count += &st.count;
                        slot.s1 += &st.s1;
                        slot.s2 += &st.s2;
                    } else {
                        let en = &e * &st.count;
                        slot.s2 += &st.s2 + (&e * &st.s1) * 2 + &e * &en;
                        slot.s1 += &st.s1 + &en;
                        slot.count += &st.count;
                    }
                }
            }
        }
        cur = next;
    }
    let total: BigInt = cur[f].iter().flatten().map(|s| s.s2.clone()).sum();
    to_biguint(total)
}

/// One profile's share of the surrogate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileContribution {
    pub m: usize,
    pub f: usize,
    pub value: f64,
}

/// Weighted surrogate `sum_{(m,f)} S(m,f) / (2^n C(2k+1+f, m))` at `q = 1/2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurrogateReport {
    pub k: usize,
    pub n: usize,
    pub restricted: bool,
    /// E-set radius when restricted.
    pub radius: Option<usize>,
    pub weight_convention: AvoidTerm,
    pub per_profile: Vec<ProfileContribution>,
    pub total: f64,
    /// Profiles with a non-zero squared difference but a vanishing lower bound
    /// (`m > 2k+1+f`); they are left out of `total`.
    pub unbounded_profiles: Vec<CountProfile>,
}

impl SurrogateReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }
}

/// The surrogate over all profiles, or only the E-set profiles when `windowed`.
///
/// Each term divides by the avoid-term lower bound on `nu`, so the windowed
/// value bounds the E-restricted chi-square from above.
pub fn surrogate_distance(pair: &PaddedPair, windowed: bool) -> SurrogateReport {
    surrogate_distance_with(pair, windowed, AvoidTerm::Corrected)
}

pub fn surrogate_distance_with(pair: &PaddedPair, windowed: bool, convention: AvoidTerm) -> SurrogateReport {
    let (k, n) = (pair.k, pair.n);
    let eset = ESetSpec::new(k);
    let profiles: Vec<CountProfile> = CountProfile::all_up_to(n)
        .into_iter()
        .filter(|p| !windowed || eset.contains_profile(p.m, p.f))
        .collect();
    let table = BinomialTable::new(n + 2);
    let base = match convention {
        AvoidTerm::Corrected => 2 * k + 1,
        AvoidTerm::AsPrinted => 2 * k,
    };
    let terms: Vec<(CountProfile, Option<f64>)> = profiles
        .par_iter()
        .map(|&p| {
            let inner = inner_diff_sq_sum_scan(&table, k, p);
            if inner.is_zero() {
                return (p, Some(0.0));
            }
            let bound = table.binomial((base + p.f) as i64, p.m as i64);
            if bound.is_zero() {
                return (p, None);
            }
            (p, Some(big_ratio_f64(&inner, &(bound << n))))
        })
        .collect();
    let mut total = CompensatedSum::new();
    let mut per_profile = Vec::new();
    let mut unbounded_profiles = Vec::new();
    for (p, v) in terms {
        match v {
            Some(value) => {
                total.add(value);
                per_profile.push(ProfileContribution { m: p.m, f: p.f, value });
            }
            None => unbounded_profiles.push(p),
        }
    }
    SurrogateReport {
        k,
        n,
        restricted: windowed,
        radius: windowed.then_some(ESetSpec::default_radius(k)),
        weight_convention: convention,
        per_profile,
        total: total.value(),
        unbounded_profiles,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalingMethod {
    /// Windowed surrogate at `q = 1/2`.
    ExactSurrogate,
    /// Monte Carlo unrestricted chi-square.
    McChiSq,
}

impl ScalingMethod {
    pub fn name(&self) -> &'static str {
        match self {
            ScalingMethod::ExactSurrogate => "exact_surrogate",
            ScalingMethod::McChiSq => "mc_chi_sq",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalingPoint {
    pub k: usize,
    pub n: usize,
    pub value: f64,
    pub std_error: Option<f64>,
    /// Fitted slope over this and all previous points (`None` for the first).
    pub slope_so_far: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingFit {
    pub method: ScalingMethod,
    pub points: Vec<ScalingPoint>,
    pub slope: f64,
    pub intercept: f64,
    pub stderr: f64,
    /// Smallest and largest `n` in the fit.
    pub fit_range: (usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingOptions {
    /// Monte Carlo traces per point.
    pub samples: u64,
    pub seed: u64,
}

impl Default for ScalingOptions {
    fn default() -> Self {
        Self {
            samples: 1_000_000,
            seed: 0,
        }
    }
}

/// Least-squares fit of `ln value` against `ln n`.
pub fn fit_power_law(points: &[(usize, f64)]) -> Result<LineFit> {
    if points.iter().any(|&(_, v)| !(v > 0.0 && v.is_finite())) {
        return invalid("power-law fit needs finite positive values");
    }
    let xs: Vec<f64> = points.iter().map(|&(n, _)| (n as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|&(_, v)| v.ln()).collect();
    least_squares(&xs, &ys)
}

/// Assembles a [`ScalingFit`] from already computed points.
pub fn scaling_fit_from_points(method: ScalingMethod, raw: Vec<(usize, f64, Option<f64>)>) -> Result<ScalingFit> {
    if raw.len() < 3 {
        return invalid("scaling fit needs at least three points");
    }
    let mut points = Vec::with_capacity(raw.len());
    let mut seen = Vec::new();
    for (k, value, std_error) in raw {
        let n = 4 * k + 3;
        seen.push((n, value));
        let slope_so_far = if seen.len() >= 2 {
            fit_power_law(&seen).ok().map(|f| f.slope)
        } else {
            None
        };
        points.push(ScalingPoint {
            k,
            n,
            value,
            std_error,
            slope_so_far,
        });
    }
    let fit = fit_power_law(&seen)?;
    let fit_range = (
        seen.iter().map(|p| p.0).min().unwrap_or(0),
        seen.iter().map(|p| p.0).max().unwrap_or(0),
    );
    Ok(ScalingFit {
        method,
        points,
        slope: fit.slope,
        intercept: fit.intercept,
        stderr: fit.slope_stderr,
        fit_range,
    })
}

/// Computes the distance at each `k` and fits the power law in `n = 4k+3`.
pub fn scaling_fit(k_list: &[usize], method: ScalingMethod, opts: &ScalingOptions) -> Result<ScalingFit> {
    if k_list.len() < 3 {
        return invalid("scaling fit needs at least three points");
    }
    let mut raw = Vec::with_capacity(k_list.len());
    for &k in k_list {
        let pair = PaddedPair::new(k)?;
        let point = match method {
            ScalingMethod::ExactSurrogate => (k, surrogate_distance(&pair, true).total, None),
            ScalingMethod::McChiSq => {
                let spec = ChannelSpec::new(0.5, opts.seed)?;
                let e = chi_sq_monte_carlo(&pair, opts.samples, &spec)?;
                (k, e.estimate, Some(e.std_error))
            }
        };
        raw.push(point);
    }
    scaling_fit_from_points(method, raw)
}
