//! Statistical distances between the trace distributions of two strings.
//!
//! Brute-force routines enumerate every trace (see [`crate::enumerate`]) and
//! are capped at [`BRUTE_FORCE_MAX_LEN`]. For the padded pair a Monte Carlo
//! chi-square estimator samples traces of `y` and scores them with the
//! closed-form counts.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{
    check_probability, ln_channel_weight, transmit_into, trial_rng, ChannelSpec, PaddedCounter,
};
use crate::enumerate::{fold_traces, TraceView};
use crate::error::{invalid, Error, Result};
use crate::numeric::CompensatedSum;
use crate::stats::RunningMoments;
use crate::strings::{BitString, PaddedPair, Variant};

/// Largest source length accepted by the brute-force distances.
pub const BRUTE_FORCE_MAX_LEN: usize = 24;

/// Traces per parallel work item in the Monte Carlo estimators.
const MC_BLOCK: u64 = 4096;

/// The high-probability window of traces: length within `radius` of `2k`
/// and contiguous-`01` count within `radius` of `2k/3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ESetSpec {
    pub k: usize,
    /// Inclusive radius; `+inf` admits everything and a negative radius nothing.
    pub radius: f64,
}

impl ESetSpec {
    /// The standard window with radius `floor(sqrt(k) ln k)`.
    pub fn new(k: usize) -> Self {
        Self {
            k,
            radius: Self::default_radius(k) as f64,
        }
    }

    pub fn with_radius(k: usize, radius: f64) -> Self {
        Self { k, radius }
    }

    pub fn everything(k: usize) -> Self {
        Self::with_radius(k, f64::INFINITY)
    }

    pub fn empty(k: usize) -> Self {
        Self::with_radius(k, -1.0)
    }

    pub fn default_radius(k: usize) -> usize {
        let k = k as f64;
        (k.sqrt() * k.ln()).max(0.0).floor() as usize
    }

    pub fn contains_profile(&self, m: usize, f: usize) -> bool {
        let k = self.k as f64;
        (m as f64 - 2.0 * k).abs() <= self.radius
            && (3.0 * f as f64 - 2.0 * k).abs() <= 3.0 * self.radius
    }

    pub fn contains(&self, w: &BitString) -> bool {
        self.contains_profile(w.len(), crate::strings::contiguous_01_count(w))
    }
}

/// Which trace distribution a mass refers to: `mu` for `x`, `nu` for `y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Measure {
    Mu,
    Nu,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Masses {
    pub mu_inside_e: f64,
    pub nu_inside_e: f64,
    pub mu_outside_e: f64,
    pub nu_outside_e: f64,
}

/// Exact (brute-force) distances between the trace distributions of `x` and `y`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistanceReport {
    pub n: usize,
    pub q: f64,
    pub hellinger_sq: f64,
    pub tv: f64,
    /// `sum (mu - nu)^2 / nu` over the support of `nu`.
    pub chi_sq: f64,
    /// The same sum restricted to traces in the E-set.
    pub chi_sq_restricted: f64,
    /// Hellinger sum restricted to the E-set.
    pub hellinger_sq_restricted: f64,
    /// Mass of `mu` on traces outside the support of `nu`.
    pub mu_mass_off_nu_support: f64,
    pub masses: Masses,
    /// Chi-square contribution of each `(m, f_c)` profile, as `[m, f, value]`.
    pub per_profile: Vec<(usize, usize, f64)>,
    pub eset: ESetSpec,
}

impl DistanceReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }
}

#[derive(Clone)]
struct Acc {
    hellinger: CompensatedSum,
    tv: CompensatedSum,
    chi: CompensatedSum,
    chi_e: CompensatedSum,
    hellinger_e: CompensatedSum,
    mu_off: CompensatedSum,
    mu_in: CompensatedSum,
    nu_in: CompensatedSum,
    mu_out: CompensatedSum,
    nu_out: CompensatedSum,
    profile: Vec<Vec<CompensatedSum>>,
    violation: Option<u64>,
}

impl Acc {
    fn new(n: usize) -> Self {
        Self {
            hellinger: CompensatedSum::new(),
            tv: CompensatedSum::new(),
            chi: CompensatedSum::new(),
            chi_e: CompensatedSum::new(),
            hellinger_e: CompensatedSum::new(),
            mu_off: CompensatedSum::new(),
            mu_in: CompensatedSum::new(),
            nu_in: CompensatedSum::new(),
            mu_out: CompensatedSum::new(),
            nu_out: CompensatedSum::new(),
            profile: vec![vec![CompensatedSum::new(); n / 2 + 1]; n + 1],
            violation: None,
        }
    }

    fn merge(mut self, other: Acc) -> Acc {
        for (a, b) in [
            (&mut self.hellinger, &other.hellinger),
            (&mut self.tv, &other.tv),
            (&mut self.chi, &other.chi),
            (&mut self.chi_e, &other.chi_e),
            (&mut self.hellinger_e, &other.hellinger_e),
            (&mut self.mu_off, &other.mu_off),
            (&mut self.mu_in, &other.mu_in),
            (&mut self.nu_in, &other.nu_in),
            (&mut self.mu_out, &other.mu_out),
            (&mut self.nu_out, &other.nu_out),
        ] {
            a.merge(b);
        }
        for (row, orow) in self.profile.iter_mut().zip(&other.profile) {
            for (c, oc) in row.iter_mut().zip(orow) {
                c.merge(oc);
            }
        }
        self.violation = self.violation.or(other.violation);
        self
    }
}

fn check_brute_force(x: &BitString, y: &BitString, q: f64) -> Result<()> {
    check_probability(q)?;
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if x.len() > BRUTE_FORCE_MAX_LEN {
        return Err(Error::Infeasible {
            what: "brute-force distance length",
            limit: BRUTE_FORCE_MAX_LEN as u64,
            requested: x.len() as u64,
        });
    }
    Ok(())
}

/// All brute-force distances in a single sweep of the trace space.
///
/// `chi_sq_restricted` is infinite when some trace inside the E-set has positive
/// `mu` but zero `nu`.
pub fn distance_report(x: &BitString, y: &BitString, q: f64, eset: &ESetSpec) -> Result<DistanceReport> {
    check_brute_force(x, y, q)?;
    let n = x.len();
    let weight: Vec<f64> = (0..=n).map(|m| ln_channel_weight(n, m, q).exp()).collect();
    let visit = |acc: &mut Acc, v: &TraceView| {
        let mu = v.count_x as f64 * weight[v.len];
        let nu = v.count_y as f64 * weight[v.len];
        let h = (mu.sqrt() - nu.sqrt()).powi(2);
        acc.hellinger.add(h);
        acc.tv.add((mu - nu).abs());
        let inside = eset.contains_profile(v.len, v.fc);
        if inside {
            acc.mu_in.add(mu);
            acc.nu_in.add(nu);
            acc.hellinger_e.add(h);
        } else {
            acc.mu_out.add(mu);
            acc.nu_out.add(nu);
        }
        if v.count_y > 0 {
            let c = (mu - nu).powi(2) / nu;
            acc.chi.add(c);
            acc.profile[v.len][v.fc].add(c);
            if inside {
                acc.chi_e.add(c);
            }
        } else if v.count_x > 0 {
            acc.mu_off.add(mu);
            if inside && acc.violation.is_none() {
                acc.violation = Some(v.word);
            }
        }
    };
    let acc = fold_traces(x, y, || Acc::new(n), visit, Acc::merge)?;
    let per_profile = acc
        .profile
        .iter()
        .enumerate()
        .flat_map(|(m, row)| {
            row.iter()
                .enumerate()
                .filter(move |&(f, _)| f <= m / 2)
                .map(move |(f, c)| (m, f, c.value()))
        })
        .collect();
    Ok(DistanceReport {
        n,
        q,
        hellinger_sq: acc.hellinger.value(),
        tv: acc.tv.value() / 2.0,
        chi_sq: acc.chi.value(),
        chi_sq_restricted: if acc.violation.is_some() {
            f64::INFINITY
        } else {
            acc.chi_e.value()
        },
        hellinger_sq_restricted: acc.hellinger_e.value(),
        mu_mass_off_nu_support: acc.mu_off.value(),
        masses: Masses {
            mu_inside_e: acc.mu_in.value(),
            nu_inside_e: acc.nu_in.value(),
            mu_outside_e: acc.mu_out.value(),
            nu_outside_e: acc.nu_out.value(),
        },
        per_profile,
        eset: *eset,
    })
}

fn unrestricted(x: &BitString, y: &BitString, q: f64) -> Result<DistanceReport> {
    let k = x.len().saturating_sub(3) / 4;
    distance_report(x, y, q, &ESetSpec::everything(k))
}

/// `sum_w (sqrt(mu_x(w)) - sqrt(mu_y(w)))^2` over every trace.
pub fn hellinger_sq_bruteforce(x: &BitString, y: &BitString, q: f64) -> Result<f64> {
    check_brute_force(x, y, q)?;
    let n = x.len();
    let weight: Vec<f64> = (0..=n).map(|m| ln_channel_weight(n, m, q).exp()).collect();
    fold_traces(
        x,
        y,
        CompensatedSum::new,
        |acc, v| {
            let mu = v.count_x as f64 * weight[v.len];
            let nu = v.count_y as f64 * weight[v.len];
            acc.add((mu.sqrt() - nu.sqrt()).powi(2));
        },
        |mut a, b| {
            a.merge(&b);
            a
        },
    )
    .map(|s| s.value())
}

/// Total variation distance `sum |mu - nu| / 2`.
pub fn tv_bruteforce(x: &BitString, y: &BitString, q: f64) -> Result<f64> {
    Ok(unrestricted(x, y, q)?.tv)
}

/// Chi-square divergence `sum (mu - nu)^2 / nu` over the support of `nu`.
pub fn chi_sq_bruteforce(x: &BitString, y: &BitString, q: f64) -> Result<f64> {
    Ok(unrestricted(x, y, q)?.chi_sq)
}

/// Chi-square sum of the padded pair restricted to the E-set.
///
/// Fails with [`Error::Inconsistent`] if the E-set contains a trace of `x`
/// that is not a trace of `y`.
pub fn chi_sq_restricted(pair: &PaddedPair, q: f64, eset: &ESetSpec) -> Result<f64> {
    let value = distance_report(&pair.x, &pair.y, q, eset)?.chi_sq_restricted;
    if value.is_infinite() {
        return Err(Error::Inconsistent(
            "E-set contains a trace with zero probability under y".into(),
        ));
    }
    Ok(value)
}

/// Mass of the E-set under `mu` or `nu`; brute force up to
/// [`BRUTE_FORCE_MAX_LEN`], Monte Carlo with `samples` traces beyond.
pub fn eset_mass(
    pair: &PaddedPair,
    q: f64,
    eset: &ESetSpec,
    measure: Measure,
    samples: u64,
    spec: &ChannelSpec,
) -> Result<f64> {
    if pair.n <= BRUTE_FORCE_MAX_LEN {
        let r = distance_report(&pair.x, &pair.y, q, eset)?;
        return Ok(match measure {
            Measure::Mu => r.masses.mu_inside_e,
            Measure::Nu => r.masses.nu_inside_e,
        });
    }
    let spec = ChannelSpec { q, seed: spec.seed };
    Ok(eset_mass_monte_carlo(pair, eset, measure, samples, &spec)?.estimate)
}

/// A Monte Carlo mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub samples: u64,
}

impl McEstimate {
    fn from_moments(m: &RunningMoments) -> Self {
        Self {
            estimate: m.mean(),
            std_error: m.std_error(),
            samples: m.count(),
        }
    }
}

/// Runs `score` on `samples` traces of `source`, in fixed-size blocks merged in
/// block order so the result does not depend on the thread count.
fn mc_moments<F>(source: &BitString, spec: &ChannelSpec, stream: u64, samples: u64, score: F) -> RunningMoments
where
    F: Fn(&[bool]) -> f64 + Sync,
{
    let bits: Vec<bool> = source.iter().collect();
    let blocks = samples.div_ceil(MC_BLOCK);
    let parts: Vec<RunningMoments> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut moments = RunningMoments::new();
            let mut trace = Vec::with_capacity(bits.len());
            let end = ((b + 1) * MC_BLOCK).min(samples);
            for t in b * MC_BLOCK..end {
                let mut rng = trial_rng(spec.seed, stream, t);
                transmit_into(&bits, spec.q, &mut rng, &mut trace);
                moments.push(score(&trace));
            }
            moments
        })
        .collect();
    parts.iter().fold(RunningMoments::new(), |mut acc, p| {
        acc.merge(p);
        acc
    })
}

/// Estimates `chi^2(mu_num || mu_den) = E_den[(mu_num/mu_den - 1)^2]` by
/// sampling traces of the `den` string. Both likelihoods share the channel
/// factor, so the ratio is the ratio of subsequence counts.
pub fn chi_sq_monte_carlo_between(
    pair: &PaddedPair,
    num: Variant,
    den: Variant,
    samples: u64,
    spec: &ChannelSpec,
) -> Result<McEstimate> {
    check_probability(spec.q)?;
    if samples < 2 {
        return invalid("Monte Carlo needs at least two samples");
    }
    let counter = PaddedCounter::float_only(pair.clone());
    let stream = match den {
        Variant::X => 0,
        Variant::Y => 1,
    };
    let moments = mc_moments(pair.get(den), spec, stream, samples, |w| {
        let s = counter.ln_counts_bits(w);
        let r = match (num, den) {
            (Variant::X, Variant::Y) => s.diff / s.y,
            (Variant::Y, Variant::X) => -s.diff / s.x,
            _ => 0.0,
        };
        r * r
    });
    Ok(McEstimate::from_moments(&moments))
}

/// Unrestricted chi-square `sum (mu - nu)^2 / nu` for the padded pair, sampled
/// from `nu`.
pub fn chi_sq_monte_carlo(pair: &PaddedPair, samples: u64, spec: &ChannelSpec) -> Result<McEstimate> {
    chi_sq_monte_carlo_between(pair, Variant::X, Variant::Y, samples, spec)
}

/// Monte Carlo mass of the E-set.
pub fn eset_mass_monte_carlo(
    pair: &PaddedPair,
    eset: &ESetSpec,
    measure: Measure,
    samples: u64,
    spec: &ChannelSpec,
) -> Result<McEstimate> {
    check_probability(spec.q)?;
    if samples < 2 {
        return invalid("Monte Carlo needs at least two samples");
    }
    let (source, stream) = match measure {
        Measure::Mu => (&pair.x, 2),
        Measure::Nu => (&pair.y, 3),
    };
    let moments = mc_moments(source, spec, stream, samples, |w| {
        let fc = w.windows(2).filter(|p| !p[0] && p[1]).count();
        eset.contains_profile(w.len(), fc) as u8 as f64
    });
    Ok(McEstimate::from_moments(&moments))
}
