//! Batch front end: reads a partial sequence as JSON, prints a JSON answer.
//!
//! Exit codes: 0 on success, 2 when the answer is mathematically negative
//! (no completion, not partial PD, witness found), 1 on any other error.

mod json;

use std::ffi::OsString;
use std::fs;
use std::io::Read;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use hankel_core::linalg::{certification_order, check_definiteness, partial_definiteness};
use hankel_core::measure::extract_measure;
use hankel_core::{
    classify, complete, decide, find_witness, CompleteOptions, CompletionCertificate, Definiteness, Error,
    HankelView, OracleOptions, PartialSequence, Pattern, Status, Strategy, ToleranceOptions,
};

#[derive(Debug, Parser)]
#[command(name = "hankel", version, about = "Positive (semi)definite Hankel moment completion")]
struct Cli {
    #[command(flatten)]
    tol: TolArgs,
    /// Seed for randomized searches.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct TolArgs {
    /// Relative tolerance below zero still counted as semidefinite.
    #[arg(long, global = true)]
    psd_tol: Option<f64>,
    /// Relative margin an eigenvalue must exceed to count as definite.
    #[arg(long, global = true)]
    pd_margin: Option<f64>,
    /// Relative slack for free even entries in the Schur walk.
    #[arg(long, global = true)]
    gamma: Option<f64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Is the input partial positive definite?
    Check {
        #[arg(default_value = "-")]
        input: String,
    },
    /// Classify a pattern such as `0,1,4`.
    ClassifyPattern {
        pattern: String,
        /// Defaults to the largest index of the pattern.
        #[arg(long)]
        horizon: Option<usize>,
    },
    /// Build a completion and print its certificate.
    Complete {
        #[arg(long, default_value = "auto",
              value_parser = ["auto", "schur", "measure", "geometric", "lift"])]
        strategy: String,
        /// Target horizon; defaults to the input horizon.
        #[arg(long)]
        horizon: Option<usize>,
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        l0: Option<usize>,
        #[arg(default_value = "-")]
        input: String,
    },
    /// Atomic measures.
    Measure {
        #[command(subcommand)]
        action: MeasureCommand,
    },
    /// Decide completability of the input at one order.
    Oracle {
        /// Defaults to ⌈horizon/2⌉.
        #[arg(long)]
        order: Option<usize>,
        #[arg(long, default_value_t = 20_000)]
        budget: usize,
        /// Ask for a semidefinite completion instead of a definite one.
        #[arg(long)]
        psd: bool,
        #[arg(default_value = "-")]
        input: String,
    },
    /// Search for a partial instance on a pattern that has no completion.
    Witness {
        pattern: String,
        /// Defaults to ⌈max(P)/2⌉.
        #[arg(long)]
        order: Option<usize>,
        #[arg(long, default_value_t = 20_000)]
        budget: usize,
        #[arg(long)]
        psd: bool,
    },
}

#[derive(Debug, Subcommand)]
enum MeasureCommand {
    /// Recover atoms and weights from a fully specified sequence.
    Extract {
        #[arg(default_value = "-")]
        input: String,
    },
}

/// What `run` wants printed and returned to the shell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
}

enum Failure {
    Core(Error),
    Usage(String),
    Io(String),
    Validation(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn report(self) -> Outcome {
        let (kind, detail, code) = match self {
            Failure::Core(e) => (e.kind(), e.to_string(), if e.is_negative_answer() { 2 } else { 1 }),
            Failure::Usage(d) => ("Usage", d, 1),
            Failure::Io(d) => ("Io", d, 1),
            Failure::Validation(d) => ("ValidationFailed", d, 1),
        };
        Outcome {
            code,
            stdout: json::to_string(&json!({"error": {"kind": kind, "detail": detail}})),
        }
    }
}

type Answer = std::result::Result<Outcome, Failure>;

fn answer<T: Serialize>(value: &T, negative: bool) -> Answer {
    Ok(Outcome {
        code: if negative { 2 } else { 0 },
        stdout: json::to_string(value),
    })
}

/// Runs one command. `stdin` is read only when the input path is `-`.
pub fn run<I, T>(argv: I, stdin: &mut dyn Read) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            return Outcome {
                code: 0,
                stdout: e.to_string(),
            };
        }
        Err(e) => return Failure::Usage(e.kind().to_string() + ": " + e.to_string().trim()).report(),
    };
    dispatch(cli, stdin).unwrap_or_else(Failure::report)
}

fn tolerances(args: &TolArgs) -> std::result::Result<ToleranceOptions, Failure> {
    let mut tol = ToleranceOptions::default();
    if let Some(v) = args.psd_tol {
        tol.psd_tol = v;
    }
    if let Some(v) = args.pd_margin {
        tol.pd_margin = v;
    }
    if let Some(v) = args.gamma {
        tol.gamma = v;
    }
    tol.validate()?;
    Ok(tol)
}

fn read_sequence(path: &str, stdin: &mut dyn Read) -> std::result::Result<PartialSequence, Failure> {
    let text = if path == "-" {
        let mut buf = String::new();
        stdin
            .read_to_string(&mut buf)
            .map_err(|e| Failure::Io(format!("standard input: {e}")))?;
        buf
    } else {
        fs::read_to_string(path).map_err(|e| Failure::Io(format!("{path}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| Failure::Core(Error::InvalidInput(format!("{path}: {e}"))))
}

fn parse_pattern(text: &str) -> std::result::Result<Pattern, Failure> {
    Ok(Pattern::from_str(text)?)
}

fn dispatch(cli: Cli, stdin: &mut dyn Read) -> Answer {
    let tol = tolerances(&cli.tol)?;
    let mode = |psd: bool| if psd { Definiteness::Psd } else { Definiteness::Pd };
    match cli.command {
        Command::Check { input } => {
            let s = read_sequence(&input, stdin)?;
            let report = partial_definiteness(&s, &tol)?;
            let out = json!({
                "partial_positive_definite": report.positive_definite,
                "partial_positive_semidefinite": report.positive_semidefinite,
                "order": report.order,
                "maximal_sets": report.maximal_sets,
                "first_non_pd": report.first_non_pd,
            });
            answer(&out, !report.positive_definite)
        }
        Command::ClassifyPattern { pattern, horizon } => {
            let p = parse_pattern(&pattern)?;
            let horizon = horizon.unwrap_or(p.max().unwrap_or(0));
            let verdict = classify(&p, horizon, &tol)?;
            let negative = matches!(verdict.status, Status::NotPdCompletable | Status::NotPsdCompletable);
            answer(&verdict, negative)
        }
        Command::Complete {
            strategy,
            horizon,
            d,
            l0,
            input,
        } => {
            let strategy = Strategy::from_str(&strategy)?;
            if strategy == Strategy::Measure {
                if d == Some(0) {
                    return Err(Failure::Usage("--d must be at least 1".into()));
                }
                if let Some(l0) = l0.filter(|l| l % 2 == 1) {
                    return Err(Failure::Usage(format!("--l0 must be even, got {l0}")));
                }
            }
            let s = read_sequence(&input, stdin)?;
            let opts = CompleteOptions {
                strategy,
                target_horizon: horizon,
                d,
                l0,
                tol,
                seed: cli.seed,
            };
            let cert = complete(&s, &opts)?;
            revalidate(&cert, &s, &tol)?;
            answer(&cert, false)
        }
        Command::Measure {
            action: MeasureCommand::Extract { input },
        } => {
            let s = read_sequence(&input, stdin)?;
            let values = s.prefix(s.horizon())?;
            let measure = extract_measure(&values, &tol)?;
            answer(&measure, false)
        }
        Command::Oracle {
            order,
            budget,
            psd,
            input,
        } => {
            let s = read_sequence(&input, stdin)?;
            let order = order.unwrap_or_else(|| certification_order(&s));
            let opts = OracleOptions {
                mode: mode(psd),
                budget,
                seed: cli.seed,
                tol,
                ..OracleOptions::default()
            };
            let result = decide(&s, order, &opts)?;
            answer(&result, result.is_infeasible())
        }
        Command::Witness {
            pattern,
            order,
            budget,
            psd,
        } => {
            let p = parse_pattern(&pattern)?;
            let order = order.unwrap_or(p.max().unwrap_or(0).div_ceil(2));
            let opts = OracleOptions {
                mode: mode(psd),
                budget,
                seed: cli.seed,
                tol,
                ..OracleOptions::default()
            };
            match find_witness(&p, order, &opts)? {
                Some(w) => answer(&json!({"found": true, "witness": w}), true),
                None => answer(&json!({"found": false}), false),
            }
        }
    }
}

/// Re-checks every `H_n` of a completion independently of the strategy that
/// produced it.
fn revalidate(cert: &CompletionCertificate, s: &PartialSequence, tol: &ToleranceOptions) -> std::result::Result<(), Failure> {
    cert.verify(s, tol)
        .map_err(|e| Failure::Validation(e.to_string()))?;
    for n in 0..=cert.completed.len().saturating_sub(1) / 2 {
        let view = HankelView::from_values(&cert.completed[..=2 * n])?;
        let report = check_definiteness(&view, tol)?;
        let ok = if cert.promises_pd { report.is_pd } else { report.is_psd };
        if !ok {
            return Err(Failure::Validation(format!(
                "H_{n} fails the independent check (smallest eigenvalue {:e})",
                report.min_eigenvalue
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_with(args: &[&str], input: &str) -> Outcome {
        let argv = std::iter::once("hankel").chain(args.iter().copied());
        run(argv, &mut input.as_bytes())
    }

    #[test]
    fn usage_errors_exit_one() {
        let out = run_with(&["complete", "--strategy", "bogus"], "");
        assert_eq!(out.code, 1);
        assert!(out.stdout.contains("\"kind\":\"Usage\""), "{}", out.stdout);
        let out = run_with(&["frobnicate"], "");
        assert_eq!(out.code, 1);
    }

    #[test]
    fn help_exits_zero() {
        let out = run_with(&["--help"], "");
        assert_eq!(out.code, 0);
        assert!(out.stdout.contains("classify-pattern"));
    }

    #[test]
    fn bad_tolerance_rejected() {
        let out = run_with(&["--pd-margin=-1", "check"], r#"{"entries":[]}"#);
        assert_eq!(out.code, 1);
        assert!(out.stdout.contains("InvalidInput"));
    }

    #[test]
    fn odd_offset_rejected() {
        let input = r#"{"entries":[{"index":0,"value":1.0}]}"#;
        let out = run_with(&["complete", "--strategy", "measure", "--l0", "1"], input);
        assert_eq!(out.code, 1);
    }
}
