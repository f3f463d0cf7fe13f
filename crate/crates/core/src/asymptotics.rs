//! Numerical audits of the binomial approximation lemmas.
//!
//! Exact sides are ratios of big-integer binomials rounded once to `f64`.
//! Big-O constants are unknown, so each audit reports the largest normalized
//! deviation over its sweep; [`Baselines`] pins those values for regression.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use num_bigint::BigUint;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{binomial_exact, binomial_ratio};
use crate::error::{invalid, Error, Result};
use crate::numeric::{big_ln, big_ratio_f64};

/// Parameters of the two-binomial ratio: `A`, `B`, `eta = eta_num/eta_den`,
/// offsets `delta` and `sigma`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApproxParams {
    pub a: u64,
    pub b: u64,
    pub eta_num: u64,
    pub eta_den: u64,
    pub delta: i64,
    pub sigma: i64,
}

impl ApproxParams {
    pub fn eta(&self) -> f64 {
        self.eta_num as f64 / self.eta_den as f64
    }

    pub fn eta_a(&self) -> i64 {
        (self.a * self.eta_num / self.eta_den) as i64
    }

    pub fn eta_b(&self) -> i64 {
        (self.b * self.eta_num / self.eta_den) as i64
    }

    /// `eta` must lie in `(0.05, 0.95)` and `eta A`, `eta B` must be integers,
    /// with every binomial argument non-negative.
    pub fn validate(&self) -> Result<()> {
        if self.eta_den == 0 || self.a == 0 || self.b == 0 {
            return invalid("A, B and the eta denominator must be positive");
        }
        let eta = self.eta();
        if !(eta > 0.05 && eta < 0.95) {
            return invalid(format!("eta = {eta} is not bounded away from 0 and 1"));
        }
        if (self.a * self.eta_num) % self.eta_den != 0 || (self.b * self.eta_num) % self.eta_den != 0 {
            return invalid("eta A and eta B must be integers");
        }
        let (a, b) = (self.a as i64, self.b as i64);
        if a + self.delta < 0
            || self.eta_a() + self.sigma < 0
            || b - self.delta < 0
            || self.eta_b() - self.sigma < 0
        {
            return invalid("binomial arguments must be non-negative");
        }
        Ok(())
    }
}

/// The quadratic exponent of one side, divided by that side's size.
fn side_exponent(eta: f64, delta: f64, sigma: f64) -> f64 {
    0.5 * (delta - sigma).powi(2) / (1.0 - eta) + 0.5 * sigma * sigma / eta - 0.5 * delta * delta
}

/// Approximation of
/// `[C(A+D, eta A+s) C(B-D, eta B-s) / (C(A, eta A) C(B, eta B))]^{-1}` by
/// `exp(S/A + S/B)`, `S = (D-s)^2/(2(1-eta)) + s^2/(2 eta) - D^2/2`.
pub fn lemma2_approx(p: &ApproxParams) -> Result<f64> {
    p.validate()?;
    let s = side_exponent(p.eta(), p.delta as f64, p.sigma as f64);
    Ok((s / p.a as f64 + s / p.b as f64).exp())
}

/// The exact reciprocal ratio approximated by [`lemma2_approx`].
pub fn lemma2_exact(p: &ApproxParams) -> Result<f64> {
    p.validate()?;
    let (num, den) = lemma2_exact_fraction(p);
    Ok(big_ratio_f64(&num, &den))
}

fn lemma2_exact_fraction(p: &ApproxParams) -> (BigUint, BigUint) {
    let (a, b) = (p.a as i64, p.b as i64);
    let (ea, eb) = (p.eta_a(), p.eta_b());
    let left = binomial_ratio(a, ea, a + p.delta, ea + p.sigma).expect("validated arguments");
    let right = binomial_ratio(b, eb, b - p.delta, eb - p.sigma).expect("validated arguments");
    (left.0 * right.0, left.1 * right.1)
}

/// Result of one sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditReport {
    pub audit: String,
    pub sweep: serde_json::Value,
    pub points: usize,
    /// Largest normalized deviation; the fitted constant of the audit.
    pub max_normalized_deviation: f64,
    /// Parameters at the maximum.
    pub argmax: BTreeMap<String, f64>,
    /// Audit-specific extra statistics.
    pub extra: BTreeMap<String, f64>,
}

impl AuditReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }
}

/// Grid for [`lemma2_audit`]; `A = B` for every entry of `a_list`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lemma2Grid {
    #[serde(rename = "A_list", alias = "a_list")]
    pub a_list: Vec<u64>,
    /// `eta` as `[numerator, denominator]`.
    pub eta: (u64, u64),
    /// Inclusive `delta` range; defaults to `|delta| <= A^{1/3}` per `A`.
    #[serde(default)]
    pub delta_range: Option<(i64, i64)>,
    #[serde(default)]
    pub sigma_range: Option<(i64, i64)>,
}

impl Lemma2Grid {
    pub fn standard() -> Self {
        Self {
            a_list: vec![1_000, 10_000, 100_000],
            eta: (1, 2),
            delta_range: None,
            sigma_range: None,
        }
    }

    pub fn points(&self) -> Vec<ApproxParams> {
        let mut out = Vec::new();
        for &a in &self.a_list {
            let cube = (a as f64).cbrt().floor() as i64;
            let (d_lo, d_hi) = self.delta_range.unwrap_or((-cube, cube));
            let (s_lo, s_hi) = self.sigma_range.unwrap_or((-cube, cube));
            for delta in d_lo..=d_hi {
                for sigma in s_lo..=s_hi {
                    out.push(ApproxParams {
                        a,
                        b: a,
                        eta_num: self.eta.0,
                        eta_den: self.eta.1,
                        delta,
                        sigma,
                    });
                }
            }
        }
        out
    }
}

/// Error scale the approximation is measured against:
/// `(|D|^3 + |s|^3 + |D-s|^3)/min(A,B)^2 + 4/min(A,B)`.
pub fn lemma2_error_scale(p: &ApproxParams) -> f64 {
    let lo = p.a.min(p.b) as f64;
    let (d, s) = (p.delta.abs() as f64, p.sigma.abs() as f64);
    let ds = (p.delta - p.sigma).abs() as f64;
    (d.powi(3) + s.powi(3) + ds.powi(3)) / (lo * lo) + 4.0 / lo
}

/// Sweeps the grid, reporting the largest `|approx/exact - 1| / scale`, the
/// largest product ratio `K` for the corollary
/// `C(A+D, eta A+s) C(B-D, eta B-s) <= K C(A, eta A) C(B, eta B)`, and the
/// largest deviation on the `D = s = 0` rows.
pub fn lemma2_audit(grid: &Lemma2Grid) -> Result<AuditReport> {
    let points = grid.points();
    for p in &points {
        p.validate()?;
    }
    let rows: Vec<(f64, f64, f64)> = points
        .par_iter()
        .map(|p| {
            let exact = lemma2_exact(p).expect("validated");
            let approx = lemma2_approx(p).expect("validated");
            let dev = (approx / exact - 1.0).abs();
            (dev / lemma2_error_scale(p), 1.0 / exact, dev)
        })
        .collect();
    let mut best = (f64::NEG_INFINITY, 0usize);
    let mut k_max = f64::NEG_INFINITY;
    let mut zero_row_dev: f64 = 0.0;
    for (i, &(norm, ratio, dev)) in rows.iter().enumerate() {
        if norm > best.0 {
            best = (norm, i);
        }
        k_max = k_max.max(ratio);
        if points[i].delta == 0 && points[i].sigma == 0 {
            zero_row_dev = zero_row_dev.max(dev);
        }
    }
    let p = points.get(best.1).ok_or_else(|| Error::InvalidParameter("empty grid".into()))?;
    let argmax = BTreeMap::from([
        ("A".to_string(), p.a as f64),
        ("B".to_string(), p.b as f64),
        ("eta".to_string(), p.eta()),
        ("delta".to_string(), p.delta as f64),
        ("sigma".to_string(), p.sigma as f64),
    ]);
    let extra = BTreeMap::from([
        ("corollary_K".to_string(), k_max),
        ("zero_offset_max_deviation".to_string(), zero_row_dev),
    ]);
    Ok(AuditReport {
        audit: "lemma2".into(),
        sweep: serde_json::to_value(grid).expect("grid serializes"),
        points: points.len(),
        max_normalized_deviation: best.0,
        argmax,
        extra,
    })
}

/// `floor(sqrt(k) ln k)`, the window radius used throughout.
pub fn window_radius(k: u64) -> i64 {
    let kf = k as f64;
    (kf.sqrt() * kf.ln()).max(0.0).floor() as i64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Lemma4Check {
    /// `ln[C(k+a, j-1) C(k+1+f-a, m-j)]`.
    pub ln_lhs: f64,
    /// `ln[e^{-ln^2 k} C(floor(4k/3), floor(m/2))^2]`.
    pub ln_threshold: f64,
    pub flagged: bool,
    /// Whether `|a - f/2|` and `|j - m/2|` are both within the window radius.
    pub in_rectangle: bool,
}

/// Compares one product against the Lemma 4 threshold.
pub fn lemma4_range_check(k: u64, m: u64, f: u64, a: u64, j: u64) -> Lemma4Check {
    let (ki, mi, fi, ai, ji) = (k as i64, m as i64, f as i64, a as i64, j as i64);
    let lhs = binomial_exact(ki + ai, ji - 1) * binomial_exact(ki + 1 + fi - ai, mi - ji);
    let center = binomial_exact(4 * ki / 3, mi / 2);
    let lnk = (k as f64).ln();
    let ln_lhs = big_ln(&lhs);
    let ln_threshold = -lnk * lnk + 2.0 * big_ln(&center);
    let r = (k as f64).sqrt() * lnk;
    Lemma4Check {
        ln_lhs,
        ln_threshold,
        flagged: ln_lhs > ln_threshold,
        in_rectangle: (a as f64 - f as f64 / 2.0).abs() <= r && (j as f64 - m as f64 / 2.0).abs() <= r,
    }
}

/// Flags over the whole `(a, j)` grid at `m = 2k`, `f = floor(2k/3)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Lemma4Sweep {
    pub k: u64,
    pub m: u64,
    pub f: u64,
    pub radius: f64,
    pub points: usize,
    pub flagged: usize,
    pub flagged_outside_rectangle: usize,
    /// Bounding box of flagged points: `[a_min, a_max, j_min, j_max]`.
    pub flagged_box: Option<[u64; 4]>,
}

pub fn lemma4_sweep(k: u64) -> Lemma4Sweep {
    let (m, f) = (2 * k, 2 * k / 3);
    let cells: Vec<(u64, u64)> = (0..=f).flat_map(|a| (1..=m).map(move |j| (a, j))).collect();
    let checks: Vec<(u64, u64, Lemma4Check)> = cells
        .par_iter()
        .map(|&(a, j)| (a, j, lemma4_range_check(k, m, f, a, j)))
        .collect();
    let mut flagged = 0;
    let mut outside = 0;
    let mut bbox: Option<[u64; 4]> = None;
    for (a, j, c) in &checks {
        if !c.flagged {
            continue;
        }
        flagged += 1;
        outside += !c.in_rectangle as usize;
        bbox = Some(match bbox {
            None => [*a, *a, *j, *j],
            Some([a0, a1, j0, j1]) => [a0.min(*a), a1.max(*a), j0.min(*j), j1.max(*j)],
        });
    }
    Lemma4Sweep {
        k,
        m,
        f,
        radius: (k as f64).sqrt() * (k as f64).ln(),
        points: checks.len(),
        flagged,
        flagged_outside_rectangle: outside,
        flagged_box: bbox,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Lemma5Check {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    /// `|lhs/rhs - 1/2| (t-j) / ln^2 k`.
    pub deviation: f64,
}

/// The restricted even-index and full sums of Lemma 5 at `(a, j, t)`.
pub fn lemma5_check(k: u64, m: u64, f: u64, a: u64, j: u64, t: u64) -> Result<Lemma5Check> {
    if t <= j + 5 {
        return invalid("lemma 5 needs t > j + 5");
    }
    if t > m {
        return invalid("t must not exceed m");
    }
    let (mi, fi, ai) = (m as i64, f as i64, a as i64);
    let gap = (t - j) as i64;
    let lnk = (k as f64).ln();
    let width = (gap as f64).sqrt() * lnk;
    let mut lhs = BigUint::zero();
    let center = ai as f64 + gap as f64 / 3.0;
    let lo = (center - width).ceil() as i64;
    let hi = (center + width).floor() as i64;
    let tail = mi - t as i64 + 1;
    for b in lo..=hi {
        lhs += binomial_exact(gap - 1, 2 * b - 2 * ai - 1) * binomial_exact(tail, 2 * fi - 2 * b - 1);
    }
    let mut rhs = BigUint::zero();
    let center = 2.0 * ai as f64 + 2.0 * gap as f64 / 3.0;
    let lo = (center - 2.0 * width).ceil() as i64;
    let hi = (center + 2.0 * width).floor() as i64;
    for b in lo..=hi {
        rhs += binomial_exact(gap - 1, b - 2 * ai - 1) * binomial_exact(tail, 2 * fi - b - 1);
    }
    if rhs.is_zero() {
        return invalid("lemma 5 reference sum vanishes");
    }
    let ratio = big_ratio_f64(&lhs, &rhs);
    Ok(Lemma5Check {
        lhs: crate::numeric::big_to_f64(&lhs),
        rhs: crate::numeric::big_to_f64(&rhs),
        ratio,
        deviation: (ratio - 0.5).abs() * gap as f64 / (lnk * lnk),
    })
}

/// Standard Lemma 5 sweep: `m = 2k`, `f = floor(2k/3)`, `a = floor(f/2)`, three
/// starting points `j` and every `t > j + 5` inside the window.
pub fn lemma5_audit(k_list: &[u64]) -> Result<AuditReport> {
    let mut cases = Vec::new();
    for &k in k_list {
        let (m, f) = (2 * k, 2 * k / 3);
        let a = f / 2;
        let r = window_radius(k) as u64;
        let mid = m / 2;
        for j in [mid - r / 2, mid - r / 4, mid] {
            for t in j + 6..=mid + r {
                cases.push((k, m, f, a, j, t));
            }
        }
    }
    let results: Vec<Lemma5Check> = cases
        .par_iter()
        .map(|&(k, m, f, a, j, t)| lemma5_check(k, m, f, a, j, t))
        .collect::<Result<_>>()?;
    let (i, best) = results
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, r)| if r.deviation > acc.1 { (i, r.deviation) } else { acc });
    let (k, m, f, a, j, t) = cases[i];
    let argmax = BTreeMap::from([
        ("k".to_string(), k as f64),
        ("m".to_string(), m as f64),
        ("f".to_string(), f as f64),
        ("a".to_string(), a as f64),
        ("j".to_string(), j as f64),
        ("t".to_string(), t as f64),
    ]);
    let worst_far = results
        .iter()
        .zip(&cases)
        .filter(|(_, c)| (c.5 - c.4) as f64 >= 2.0 * (c.0 as f64).sqrt())
        .map(|(r, _)| (r.ratio - 0.5).abs())
        .fold(0.0, f64::max);
    Ok(AuditReport {
        audit: "lemma5".into(),
        sweep: serde_json::json!({ "k_list": k_list }),
        points: results.len(),
        max_normalized_deviation: best,
        argmax,
        extra: BTreeMap::from([("max_abs_ratio_gap_far".to_string(), worst_far)]),
    })
}

/// Relative gap of the 2/3-1/3 odd-neighbour combination against the even term,
/// with `D = t-j`, `E = m-t+1`, `x = 2b-2a`, `y = 2f-2b`:
/// `|[(2/3) C(D-1,x-1) C(E,y+1) + (1/3) C(D-1,x+1) C(E,y-1)] / [C(D-1,x) C(E,y)] - 1|`.
pub fn oddcombo_gap(d: i64, e: i64, x: i64, y: i64) -> Result<f64> {
    let even = binomial_exact(d - 1, x) * binomial_exact(e, y);
    if even.is_zero() {
        return invalid("even term vanishes");
    }
    let left = binomial_exact(d - 1, x - 1) * binomial_exact(e, y + 1) * 2u32;
    let right = binomial_exact(d - 1, x + 1) * binomial_exact(e, y - 1);
    let den = even * 3u32;
    let num = left + right;
    let (hi, lo) = if num >= den { (&num - &den, den) } else { (&den - &num, den) };
    Ok(big_ratio_f64(&hi, &lo))
}

/// [`oddcombo_gap`] at `b = a + floor((t-j)/3)`.
pub fn oddcombo_gap_at(m: i64, f: i64, a: i64, j: i64, t: i64) -> Result<f64> {
    let b = a + (t - j) / 3;
    oddcombo_gap(t - j, m - t + 1, 2 * b - 2 * a, 2 * f - 2 * b)
}

/// Gaps at centred configurations `x = 2D/3`, `y = 2E/3` for each `D` (a
/// multiple of 3) with a fixed large tail `E`.
pub fn oddcombo_gap_series(d_list: &[i64], e: i64) -> Result<Vec<(i64, f64)>> {
    d_list
        .iter()
        .map(|&d| {
            if d % 3 != 0 || e % 3 != 0 {
                return invalid("centred configurations need D and E divisible by 3");
            }
            Ok((d, oddcombo_gap(d, e, 2 * d / 3, 2 * e / 3)?))
        })
        .collect()
}

/// Which symmetry display to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SymmetryDisplay {
    /// `C(K + d/3 + e, M + d) C(K - d/3 - e, M - d)` against the
    /// `e -> -5e/3`, `d -> d - 2e` reflection (`K = k + f/2`, `M = m/2`).
    Lemma6,
    /// The same display with `delta` read as `delta_j`.
    Lemma7a,
    /// `C(M + d, f + 2d/3 + 2e) C(M - d, f - 2d/3 - 2e)` against
    /// `C(M + 2e - d, f + 10e/3 - 2d/3) C(M - 2e + d, f - 10e/3 + 2d/3)`.
    Lemma7b,
}

/// `delta` and `eps = eps3/3` around the centre `(k, m, f)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaSymmetryParams {
    pub k: u64,
    pub m: u64,
    pub f: u64,
    pub delta: i64,
    /// Three times `eps`.
    pub eps3: i64,
}

fn floor_div(a: i64, b: i64) -> i64 {
    a.div_euclid(b)
}

/// Both products of the display, with every non-integral argument floored.
pub fn symmetry_products(p: &LemmaSymmetryParams, which: SymmetryDisplay) -> (BigUint, BigUint) {
    let (k, m, f) = (p.k as i64, p.m as i64, p.f as i64);
    let (d, e3) = (p.delta, p.eps3);
    let big_k = k + f / 2;
    let half_m = m / 2;
    let c = binomial_exact;
    match which {
        SymmetryDisplay::Lemma6 | SymmetryDisplay::Lemma7a => {
            let lhs = c(big_k + floor_div(d + e3, 3), half_m + d) * c(big_k + floor_div(-d - e3, 3), half_m - d);
            let rhs = c(big_k + floor_div(3 * d - 5 * e3, 9), half_m + d + floor_div(-2 * e3, 3))
                * c(big_k + floor_div(-3 * d + 5 * e3, 9), half_m - d + floor_div(2 * e3, 3));
            (lhs, rhs)
        }
        SymmetryDisplay::Lemma7b => {
            let lhs = c(half_m + d, f + floor_div(2 * d + 2 * e3, 3)) * c(half_m - d, f + floor_div(-2 * d - 2 * e3, 3));
            let rhs = c(half_m + floor_div(2 * e3, 3) - d, f + floor_div(10 * e3 - 6 * d, 9))
                * c(half_m + floor_div(-2 * e3, 3) + d, f + floor_div(-10 * e3 + 6 * d, 9));
            (lhs, rhs)
        }
    }
}

/// `|lhs/rhs - 1| sqrt(k) / ln^3 k` for the chosen display.
pub fn lemma6_7_check(p: &LemmaSymmetryParams, which: SymmetryDisplay) -> Result<f64> {
    let (lhs, rhs) = symmetry_products(p, which);
    if rhs.is_zero() {
        return invalid("reference product vanishes");
    }
    if lhs == rhs {
        return Ok(0.0);
    }
    let ratio = big_ratio_f64(&lhs, &rhs);
    let lnk = (p.k as f64).ln();
    Ok((ratio - 1.0).abs() * (p.k as f64).sqrt() / lnk.powi(3))
}

/// Grid over `|delta|, |eps| <= sqrt(k) ln k` with `delta/3 + eps` integral,
/// at `m = 2k`, `f = floor(2k/3)`, using about `steps` values per axis.
/// Points where either product vanishes are skipped and counted.
pub fn lemma6_7_audit(k_list: &[u64], which: SymmetryDisplay, steps: i64) -> Result<AuditReport> {
    let mut cases = Vec::new();
    for &k in k_list {
        let r = window_radius(k);
        let stride = (2 * r / steps.max(1)).max(1);
        let (m, f) = (2 * k, 2 * k / 3);
        let mut delta = -r;
        while delta <= r {
            let mut e = -r;
            while e <= r {
                let eps3 = 3 * e - delta.rem_euclid(3);
                cases.push(LemmaSymmetryParams { k, m, f, delta, eps3 });
                e += stride;
            }
            delta += stride;
        }
    }
    let devs: Vec<Option<f64>> = cases
        .par_iter()
        .map(|p| {
            let (lhs, rhs) = symmetry_products(p, which);
            if lhs.is_zero() || rhs.is_zero() {
                None
            } else {
                lemma6_7_check(p, which).ok()
            }
        })
        .collect();
    let skipped = devs.iter().filter(|d| d.is_none()).count();
    let (i, best) = devs
        .iter()
        .enumerate()
        .filter_map(|(i, d)| d.map(|d| (i, d)))
        .fold((0, f64::NEG_INFINITY), |acc, (i, d)| if d > acc.1 { (i, d) } else { acc });
    let p = cases[i];
    let name = match which {
        SymmetryDisplay::Lemma6 => "lemma6",
        SymmetryDisplay::Lemma7a => "lemma7a",
        SymmetryDisplay::Lemma7b => "lemma7b",
    };
    Ok(AuditReport {
        audit: name.into(),
        sweep: serde_json::json!({ "k_list": k_list, "steps": steps }),
        points: devs.len() - skipped,
        max_normalized_deviation: best,
        argmax: BTreeMap::from([
            ("k".to_string(), p.k as f64),
            ("delta".to_string(), p.delta as f64),
            ("eps".to_string(), p.eps3 as f64 / 3.0),
        ]),
        extra: BTreeMap::from([("skipped_degenerate".to_string(), skipped as f64)]),
    })
}

/// Outcome of comparing an audit value with its stored baseline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum BaselineOutcome {
    /// No baseline existed; the value was stored.
    Recorded { value: f64 },
    Pass { value: f64, baseline: f64 },
    Fail { value: f64, baseline: f64 },
}

impl BaselineOutcome {
    pub fn passed(&self) -> bool {
        !matches!(self, BaselineOutcome::Fail { .. })
    }
}

/// Stored first-run maxima; later runs must stay within `baseline * 1.01`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Baselines {
    path: PathBuf,
    values: BTreeMap<String, f64>,
}

pub const BASELINE_SLACK: f64 = 1.01;

impl Baselines {
    /// Loads `path`, or starts empty if the file does not exist yet.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let values = match std::fs::read_to_string(&path) {
            Ok(text) => serde_json::from_str(&text)
                .map_err(|e| Error::InvalidParameter(format!("baseline file: {e}")))?,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => BTreeMap::new(),
            Err(e) => return Err(Error::InvalidParameter(format!("baseline file: {e}"))),
        };
        Ok(Self { path, values })
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.values.get(name).copied()
    }

    /// Checks `value` against the stored baseline, recording it on first use.
    pub fn check(&mut self, name: &str, value: f64) -> Result<BaselineOutcome> {
        match self.values.get(name) {
            Some(&baseline) if value <= baseline * BASELINE_SLACK => Ok(BaselineOutcome::Pass { value, baseline }),
            Some(&baseline) => Ok(BaselineOutcome::Fail { value, baseline }),
            None => {
                self.values.insert(name.to_string(), value);
                self.save()?;
                Ok(BaselineOutcome::Recorded { value })
            }
        }
    }

    fn save(&self) -> Result<()> {
        let text = serde_json::to_string_pretty(&self.values).expect("baselines serialize");
        std::fs::write(&self.path, text + "\n")
            .map_err(|e| Error::InvalidParameter(format!("baseline file: {e}")))
    }
}

/// Default location of the committed baselines.
pub fn default_baseline_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join("baselines.json")
}
