//! Command-line front end: every analysis as a subcommand with reproducible
//! seeds and machine-readable output.
//!
//! Exit codes: 0 success, 1 a declared size cap was hit, 2 usage or invalid
//! input, 3 a verification found failures or the evidence was inconsistent.

mod args;
mod output;
mod verify;

use std::ffi::OsString;
use std::io::Write;

use clap::error::ErrorKind;
use clap::Parser;
use serde::Serialize;
use tracelab::channel::{sample_traces, write_trace_dump, TraceDumpHeader};
use tracelab::distance::{chi_sq_monte_carlo, distance_report, ESetSpec, BRUTE_FORCE_MAX_LEN};
use tracelab::distinguisher::{
    deck_signature, empirical_error_rate, estimate_sample_complexity, find_min_distinguishing_word,
    first_differing_power_sum, mean_based_error_rate, multiplicity_table, poly_multiplicity, PolySpec,
};
use tracelab::pairsum::{scaling_fit, surrogate_distance_with, ScalingMethod, ScalingOptions};
use tracelab::{make_padded_pair, BitString, ChannelSpec, Error, PaddedPair};

pub use args::Cli;
use args::*;
use output::{csv_table, json_document, json_lines, Header};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INFEASIBLE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_FAILED: i32 = 3;

/// Parses `args` (program name first), runs the command, and writes to the
/// process's stdout/stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

/// [`run`] with explicit output streams.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{text}");
                    EXIT_USAGE
                }
            };
        }
    };
    let result = match cli.global.threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| execute(&cli)),
            Err(e) => Err(Error::InvalidParameter(format!("thread pool: {e}"))),
        },
        None => execute(&cli),
    };
    match result {
        Ok(Outcome { text, code }) => match emit(&cli, &text, out) {
            Ok(()) => code,
            Err(e) => {
                let _ = writeln!(err, "error: {e}");
                EXIT_USAGE
            }
        },
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                Error::Infeasible { .. } => EXIT_INFEASIBLE,
                Error::Inconsistent(_) => EXIT_FAILED,
                _ => EXIT_USAGE,
            }
        }
    }
}

struct Outcome {
    text: String,
    code: i32,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Self { text, code: EXIT_OK }
    }
}

fn emit(cli: &Cli, text: &str, out: &mut dyn Write) -> std::io::Result<()> {
    match &cli.global.out {
        Some(path) => std::fs::write(path, text),
        None => out.write_all(text.as_bytes()),
    }
}

fn header(cli: &Cli) -> Header {
    let mut config = serde_json::to_value(&cli.command).expect("config serializes");
    if let serde_json::Value::Object(map) = &mut config {
        map.insert("seed".into(), cli.global.seed.into());
    }
    Header::new(config)
}

fn resolve_pair(p: &PairArgs) -> tracelab::Result<(BitString, BitString, Option<PaddedPair>)> {
    match (p.k, &p.x, &p.y) {
        (Some(k), _, _) => {
            let pair = make_padded_pair(k)?;
            Ok((pair.x.clone(), pair.y.clone(), Some(pair)))
        }
        (None, Some(x), Some(y)) => {
            let padded = PaddedPair::recognize(x).map(|(p, _)| p).filter(|p| p.x == *x && p.y == *y);
            Ok((x.clone(), y.clone(), padded))
        }
        _ => Err(Error::InvalidParameter("give either --k or both --x and --y".into())),
    }
}

fn execute(cli: &Cli) -> tracelab::Result<Outcome> {
    let seed = cli.global.seed;
    let format = cli.global.format;
    let h = header(cli);
    let doc = |result: &dyn erased::Json| json_document(&h, &result.value());
    Ok(match &cli.command {
        Command::GenPair(a) => {
            let p = make_padded_pair(a.k)?;
            match format.unwrap_or(Format::Text) {
                Format::Json => Outcome::ok(doc(&p)),
                Format::Csv => Outcome::ok(csv_table(&h, &[&p])),
                Format::Text => Outcome::ok(format!("{}x={} y={} n={}\n", h.comment(), p.x, p.y, p.n)),
            }
        }
        Command::Sample(a) => {
            let x = match (a.k, &a.x) {
                (Some(k), _) => {
                    let p = make_padded_pair(k)?;
                    match a.variant {
                        Side::X => p.x,
                        Side::Y => p.y,
                    }
                }
                (None, Some(x)) => x.clone(),
                (None, None) => return Err(Error::InvalidParameter("give --k or --x".into())),
            };
            let spec = ChannelSpec::new(a.q, seed)?;
            let traces = sample_traces(&x, &spec, 0, a.samples as usize);
            let mut buf = Vec::new();
            let dump = TraceDumpHeader { x, q: a.q, seed };
            write_trace_dump(&mut buf, &dump, &[]).expect("in-memory write");
            buf.extend_from_slice(h.comment().as_bytes());
            for t in &traces {
                buf.extend_from_slice(format!("{t}\n").as_bytes());
            }
            Outcome::ok(String::from_utf8(buf).expect("utf-8 dump"))
        }
        Command::Distance(a) => {
            let (x, y, pair) = resolve_pair(&a.pair)?;
            match a.method {
                DistanceMethod::Exact => {
                    if x.len() > BRUTE_FORCE_MAX_LEN {
                        return Err(Error::Infeasible {
                            what: "brute-force source length",
                            limit: BRUTE_FORCE_MAX_LEN as u64,
                            requested: x.len() as u64,
                        });
                    }
                    let eset = match (&pair, a.radius) {
                        (Some(p), Some(r)) => ESetSpec::with_radius(p.k, r),
                        (Some(p), None) => ESetSpec::new(p.k),
                        (None, _) => ESetSpec::everything(0),
                    };
                    let report = distance_report(&x, &y, a.q, &eset)?;
                    Outcome::ok(doc(&report))
                }
                DistanceMethod::Mc => {
                    let pair = pair.ok_or_else(|| Error::InvalidParameter("Monte Carlo needs a padded pair".into()))?;
                    let est = chi_sq_monte_carlo(&pair, a.samples, &ChannelSpec::new(a.q, seed)?)?;
                    Outcome::ok(doc(&serde_json::json!({ "n": pair.n, "q": a.q, "chi_sq": est })))
                }
            }
        }
        Command::Surrogate(a) => {
            let pair = make_padded_pair(a.k)?;
            let report = surrogate_distance_with(&pair, a.windowed, a.avoid_term.into());
            match format.unwrap_or(Format::Json) {
                Format::Csv => Outcome::ok(csv_table(&h, &report.per_profile)),
                _ => Outcome::ok(doc(&report)),
            }
        }
        Command::Scaling(a) => {
            let method = match a.method {
                ScalingArg::Exact => ScalingMethod::ExactSurrogate,
                ScalingArg::Mc => ScalingMethod::McChiSq,
            };
            let opts = ScalingOptions {
                samples: a.samples,
                seed,
            };
            let fit = scaling_fit(&a.k_list, method, &opts)?;
            match format.unwrap_or(Format::Csv) {
                Format::Json => Outcome::ok(doc(&fit)),
                _ => {
                    #[derive(Serialize)]
                    struct Row {
                        n: usize,
                        k: usize,
                        method: &'static str,
                        value: f64,
                        std_error: Option<f64>,
                        slope_so_far: Option<f64>,
                    }
                    let rows: Vec<Row> = fit
                        .points
                        .iter()
                        .map(|p| Row {
                            n: p.n,
                            k: p.k,
                            method: method.name(),
                            value: p.value,
                            std_error: p.std_error,
                            slope_so_far: p.slope_so_far,
                        })
                        .collect();
                    Outcome::ok(csv_table(&h, &rows))
                }
            }
        }
        Command::Distinguish(a) => {
            let (x, y, _) = resolve_pair(&a.pair)?;
            let spec = ChannelSpec::new(a.q, seed)?;
            let word = match a.method {
                TestMethod::Mean => Some(
                    find_min_distinguishing_word(&x, &y, a.max)
                        .ok_or_else(|| Error::InvalidParameter(format!("no distinguishing word up to length {}", a.max)))?,
                ),
                TestMethod::Lrt => None,
            };
            let records = a
                .traces
                .iter()
                .map(|&t| match &word {
                    Some(w) => mean_based_error_rate(&x, &y, w, a.q, t, a.trials, &spec),
                    None => empirical_error_rate(&x, &y, a.q, t, a.trials, &spec),
                })
                .collect::<tracelab::Result<Vec<_>>>()?;
            Outcome::ok(json_lines(&h, &records))
        }
        Command::Complexity(a) => {
            let (x, y, _) = resolve_pair(&a.pair)?;
            let spec = ChannelSpec::new(a.q, seed)?;
            let sc = estimate_sample_complexity(&x, &y, a.q, a.delta, a.trials, &spec)?;
            let h2 = if x.len() <= BRUTE_FORCE_MAX_LEN {
                Some(tracelab::distance::hellinger_sq_bruteforce(&x, &y, a.q)?)
            } else {
                None
            };
            let result = serde_json::json!({
                "t_star": sc.t_star,
                "target_delta": sc.target_delta,
                "hellinger_sq": h2,
                "t_star_times_hellinger_sq": h2.map(|h| h * sc.t_star as f64),
                "steps": sc.steps,
            });
            Outcome::ok(doc(&result))
        }
        Command::Verify(a) => {
            let report = verify::verify(a, seed)?;
            let code = if report.failures == 0 { EXIT_OK } else { EXIT_FAILED };
            Outcome {
                text: doc(&report),
                code,
            }
        }
        Command::Deck(a) => {
            let sig_x = deck_signature(&a.x, a.max);
            let result = match &a.y {
                None => serde_json::json!({ "x": sig_x }),
                Some(y) => {
                    if y.len() != a.x.len() {
                        return Err(Error::LengthMismatch {
                            left: a.x.len(),
                            right: y.len(),
                        });
                    }
                    let first = first_differing_power_sum(&a.x, y, a.max);
                    let word = first.and_then(|m0| find_min_distinguishing_word(&a.x, y, m0 + 1));
                    serde_json::json!({
                        "x": sig_x,
                        "y": deck_signature(y, a.max),
                        "first_differing_order": first,
                        "distinguishing_word": word,
                    })
                }
            };
            Outcome::ok(doc(&result))
        }
        Command::PolyMult(a) => match &a.coeffs {
            Some(signs) => {
                let p = PolySpec::parse_signs(signs)?;
                let m = poly_multiplicity(&p);
                Outcome::ok(doc(&serde_json::json!({ "degree": p.degree(), "signs": signs, "multiplicity": m })))
            }
            None => {
                let rows = multiplicity_table(a.max)?;
                match format.unwrap_or(Format::Csv) {
                    Format::Json => Outcome::ok(doc(&rows)),
                    _ => Outcome::ok(csv_table(&h, &rows)),
                }
            }
        },
    })
}

mod erased {
    /// Object-safe serialization to a JSON value.
    pub trait Json {
        fn value(&self) -> serde_json::Value;
    }

    impl<T: serde::Serialize> Json for T {
        fn value(&self) -> serde_json::Value {
            serde_json::to_value(self).expect("result serializes")
        }
    }
}
