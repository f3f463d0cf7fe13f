use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use tracelab::asymptotics::{
    default_baseline_path, lemma2_audit, lemma5_audit, lemma6_7_audit, AuditReport, BaselineOutcome, Baselines,
    Lemma2Grid, SymmetryDisplay,
};
use tracelab::channel::padded_subseq_count;
use tracelab::combinatorics::{fc_class_count, segment_count, vandermonde_check, zigzag_subseq_count, LastBit};
use tracelab::enumerate::fold_traces;
use tracelab::pairsum::{inner_diff_sq_sum, inner_diff_sq_sum_scan};
use tracelab::{
    contiguous_01_count, make_padded_pair, subsequence_count_oracle, BitString, CountProfile, Error, Result, Variant,
};

use crate::args::{VerifyArgs, VerifyTarget};

#[derive(Debug, Serialize)]
pub struct VerifyReport {
    pub target: VerifyTarget,
    pub checks: u64,
    pub failures: u64,
    /// First few failing cases.
    pub failing_cases: Vec<String>,
    pub audits: Vec<AuditOutcome>,
}

#[derive(Debug, Serialize)]
pub struct AuditOutcome {
    pub report: AuditReport,
    pub baseline: BaselineOutcome,
}

const MAX_LISTED: usize = 10;

struct Tally {
    checks: u64,
    failing: Vec<String>,
    failures: u64,
}

impl Tally {
    fn new() -> Self {
        Self {
            checks: 0,
            failing: Vec::new(),
            failures: 0,
        }
    }

    fn check(&mut self, ok: bool, case: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures += 1;
            if self.failing.len() < MAX_LISTED {
                self.failing.push(case());
            }
        }
    }

    fn report(self, target: VerifyTarget, audits: Vec<AuditOutcome>) -> VerifyReport {
        let audit_failures = audits.iter().filter(|a| !a.baseline.passed()).count() as u64;
        VerifyReport {
            target,
            checks: self.checks + audits.len() as u64,
            failures: self.failures + audit_failures,
            failing_cases: self.failing,
            audits,
        }
    }
}

fn words(len: usize) -> impl Iterator<Item = BitString> {
    (0..1u64 << len).map(move |w| BitString::from_word(w, len))
}

fn load_grid(path: &Path) -> Result<Lemma2Grid> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::InvalidParameter(format!("{}: {e}", path.display())))?;
    let parsed = if path.extension().is_some_and(|e| e == "json") {
        serde_json::from_str(&text).map_err(|e| e.to_string())
    } else {
        toml::from_str(&text).map_err(|e| e.to_string())
    };
    parsed.map_err(|e| Error::InvalidParameter(format!("sweep config: {e}")))
}

pub fn verify(args: &VerifyArgs, seed: u64) -> Result<VerifyReport> {
    let mut t = Tally::new();
    let mut audits = Vec::new();
    let baseline_path = args.baseline.clone().unwrap_or_else(default_baseline_path);
    let custom = args.k_list.is_some() || args.config.is_some();
    // non-standard sweeps get their own baseline entry keyed by the sweep
    let mut record = |report: AuditReport| -> Result<()> {
        let mut b = Baselines::load(&baseline_path)?;
        let key = if custom {
            format!("{}:{}", report.audit, report.sweep)
        } else {
            report.audit.clone()
        };
        let baseline = b.check(&key, report.max_normalized_deviation)?;
        audits.push(AuditOutcome { report, baseline });
        Ok(())
    };
    let k_list = |default: &[u64]| args.k_list.clone().unwrap_or_else(|| default.to_vec());
    match args.target {
        VerifyTarget::Lemma1 => {
            for k in 0..=args.max.unwrap_or(12) {
                let z = BitString::zigzag(k);
                for len in 0..=8 {
                    for w in words(len) {
                        let ok = zigzag_subseq_count(k, &w) == subsequence_count_oracle(&w, &z);
                        t.check(ok, || format!("k={k} w={w}"));
                    }
                }
            }
        }
        VerifyTarget::Lemma3 => {
            for l in 0..=args.max.unwrap_or(16).min(24) {
                let mut class = vec![0u64; l + 1];
                let mut seg = vec![[0u64; 2]; l + 1];
                for w in words(l) {
                    let a = contiguous_01_count(&w);
                    class[a] += 1;
                    let last = l == 0 || w.bit(l);
                    seg[a][last as usize] += 1;
                }
                for a in 0..=l {
                    let ok = fc_class_count(l as i64, a as i64) == class[a].into();
                    t.check(ok, || format!("class l={l} a={a}"));
                    for last in [false, true] {
                        let got = segment_count(l as i64, a as i64, LastBit::of(last));
                        t.check(got == seg[a][last as usize].into(), || format!("segment l={l} a={a} last={last}"));
                    }
                }
            }
        }
        VerifyTarget::Vandermonde => {
            let max = args.max.unwrap_or(20) as i64;
            for d in 0..=max {
                for e in 0..=max {
                    for f in 0..=(d + e) {
                        let (lhs, rhs) = vandermonde_check(d, e, f);
                        t.check(lhs == rhs, || format!("D={d} E={e} F={f}"));
                    }
                }
            }
        }
        VerifyTarget::ClosedForm => {
            let max_k = args.max.unwrap_or(4);
            for k in 1..=max_k {
                let pair = make_padded_pair(k)?;
                for len in 0..=9 {
                    for w in words(len) {
                        for (v, z) in [(Variant::X, &pair.x), (Variant::Y, &pair.y)] {
                            let ok = padded_subseq_count(&pair, &w, v) == subsequence_count_oracle(&w, z);
                            t.check(ok, || format!("k={k} w={w} {v:?}"));
                        }
                    }
                }
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for i in 0..args.samples {
                let pair = make_padded_pair(1 + i as usize % max_k.max(1))?;
                let len = rng.random_range(0..=pair.n);
                let w = BitString::from_bits((0..len).map(|_| rng.random::<bool>()));
                for (v, z) in [(Variant::X, &pair.x), (Variant::Y, &pair.y)] {
                    let ok = padded_subseq_count(&pair, &w, v) == subsequence_count_oracle(&w, z);
                    t.check(ok, || format!("k={} w={w} {v:?}", pair.k));
                }
            }
        }
        VerifyTarget::Pairsum => {
            for k in 1..=args.max.unwrap_or(3).min(4) {
                let pair = make_padded_pair(k)?;
                let table = tracelab::combinatorics::BinomialTable::new(pair.n + 2);
                let brute = fold_traces(
                    &pair.x,
                    &pair.y,
                    std::collections::BTreeMap::<(usize, usize), u128>::new,
                    |acc, v| {
                        let d = v.count_x as i128 - v.count_y as i128;
                        *acc.entry((v.len, v.fc)).or_default() += (d * d) as u128;
                    },
                    |mut a, b| {
                        for (key, v) in b {
                            *a.entry(key).or_default() += v;
                        }
                        a
                    },
                )?;
                for p in CountProfile::all_up_to(pair.n) {
                    let want = brute.get(&(p.m, p.f)).copied().unwrap_or_default();
                    let junction = inner_diff_sq_sum(&pair, p);
                    let scan = inner_diff_sq_sum_scan(&table, k, p);
                    t.check(junction == want.into() && scan == want.into(), || format!("k={k} m={} f={}", p.m, p.f));
                }
            }
        }
        VerifyTarget::Lemma2 => {
            let grid = match &args.config {
                Some(path) => load_grid(path)?,
                None => Lemma2Grid::standard(),
            };
            record(lemma2_audit(&grid)?)?;
        }
        VerifyTarget::Lemma5 => record(lemma5_audit(&k_list(&[50, 100, 200]))?)?,
        VerifyTarget::Lemma6 => record(lemma6_7_audit(&k_list(&[100, 400]), SymmetryDisplay::Lemma6, 20)?)?,
        VerifyTarget::Lemma7 => {
            for which in [SymmetryDisplay::Lemma7a, SymmetryDisplay::Lemma7b] {
                record(lemma6_7_audit(&k_list(&[100, 400]), which, 20)?)?;
            }
        }
    }
    Ok(t.report(args.target, audits))
}
