use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rayon::prelude::*;

use catalytic::analysis::{analyze, AnalysisOptions};
use catalytic::corpus;
use catalytic::equation::CatalyticEquation;
use catalytic::numeric::{parse_rat, Rat, DEFAULT_PRECISION, MIN_PRECISION};
use catalytic::report::{render_text, AnalysisReport};

/// Exact and asymptotic analysis of catalytic functional equations.
#[derive(Parser)]
#[command(name = "catalytic", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyse an equation file or a corpus entry (`corpus:NAME`).
    Analyze {
        input: String,
        /// Print the first N exact coefficients of M(z,0).
        #[arg(long, value_name = "N")]
        coeffs: Option<usize>,
        /// Extrapolate the coefficient asymptotics.
        #[arg(long)]
        asymptotics: bool,
        /// Limit law for the parameter marked by x.
        #[arg(long)]
        clt: bool,
        /// Working precision in bits (default from CATALYTIC_PRECISION or 256).
        #[arg(long, value_name = "BITS")]
        precision: Option<usize>,
        /// Write the JSON report here.
        #[arg(long, value_name = "PATH")]
        json: Option<PathBuf>,
        /// Expected dominant singularity (rational), for branch selection in generic mode.
        #[arg(long, value_name = "VALUE")]
        expect_z0: Option<String>,
        /// Substitute u -> u + C before the analysis.
        #[arg(long, value_name = "C", allow_hyphen_values = true)]
        shift_u: Option<String>,
        /// Largest coefficient index used by --asymptotics.
        #[arg(long, value_name = "N", default_value_t = 1000)]
        terms: usize,
    },
    /// Check corpus entries against their expected values.
    Validate {
        name: Option<String>,
        #[arg(long)]
        all: bool,
        #[arg(long, value_name = "BITS")]
        precision: Option<usize>,
    },
    /// List corpus entries.
    List,
}

const USAGE: u8 = 1;
const FAILURE: u8 = 2;

fn usage(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(USAGE)
}

fn failure(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(FAILURE)
}

fn precision(flag: Option<usize>) -> Result<usize, String> {
    let p = match flag {
        Some(p) => p,
        None => match std::env::var("CATALYTIC_PRECISION") {
            Ok(v) => v.trim().parse().map_err(|_| format!("CATALYTIC_PRECISION is not an integer: `{v}`"))?,
            Err(_) => DEFAULT_PRECISION,
        },
    };
    if p < MIN_PRECISION {
        return Err(format!("precision must be at least {MIN_PRECISION} bits"));
    }
    Ok(p)
}

fn rational(flag: &str, s: &str) -> Result<Rat, String> {
    parse_rat(s).ok_or_else(|| format!("{flag} expects a rational p/q, got `{s}`"))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match cli.command {
        Command::Analyze { input, coeffs, asymptotics, clt, precision: p, json, expect_z0, shift_u, terms } => {
            let prec = match precision(p) {
                Ok(p) => p,
                Err(e) => return usage(e),
            };
            let expect_z0 = match expect_z0.as_deref().map(|s| rational("--expect-z0", s)).transpose() {
                Ok(v) => v,
                Err(e) => return usage(e),
            };
            let shift = match shift_u.as_deref().map(|s| rational("--shift-u", s)).transpose() {
                Ok(v) => v,
                Err(e) => return usage(e),
            };
            let eq = match load_input(&input) {
                Ok(eq) => eq,
                Err(Input::Usage(m)) => return usage(m),
                Err(Input::Failure(m)) => return failure(m),
            };
            let eq = match shift {
                Some(c) => eq.shift_u(&c),
                None => eq,
            };
            let opts =
                AnalysisOptions { precision: prec, coefficients: coeffs, asymptotics, asymptotic_terms: terms, clt, expect_z0, ..Default::default() };
            let a = match analyze(&eq, &opts) {
                Ok(a) => a,
                Err(e) => return failure(e),
            };
            print!("{}", render_text(&a));
            if let Some(path) = json {
                let report = AnalysisReport::from(&a);
                let text = serde_json::to_string_pretty(&report).expect("report serializes");
                if let Err(e) = std::fs::write(&path, text + "\n") {
                    return failure(format!("cannot write {}: {e}", path.display()));
                }
            }
            ExitCode::SUCCESS
        }
        Command::Validate { name, all, precision: p } => {
            let prec = match precision(p) {
                Ok(p) => p,
                Err(e) => return usage(e),
            };
            let names: Vec<String> = match (name, all) {
                (Some(_), true) => return usage("give either an entry name or --all"),
                (Some(n), false) => vec![n],
                (None, true) => corpus::list().into_iter().map(String::from).collect(),
                (None, false) => return usage("give an entry name or --all"),
            };
            let mut reports: Vec<_> = names.par_iter().map(|n| (n.clone(), corpus::validate_at(n, prec))).collect();
            reports.sort_by(|a, b| a.0.cmp(&b.0));
            let mut ok = true;
            for (n, r) in reports {
                match r {
                    Ok(r) => {
                        println!("{n}: {}", if r.passed() { "pass" } else { "FAIL" });
                        if let Some(e) = &r.error {
                            println!("  error: {e}");
                        }
                        for c in &r.checks {
                            println!("  {} {:<22} expected {}  observed {}", if c.pass { "ok  " } else { "FAIL" }, c.key, c.expected, c.observed);
                        }
                        for w in &r.warnings {
                            println!("  warning: {w}");
                        }
                        ok &= r.passed();
                    }
                    Err(e) => {
                        eprintln!("error: {e}");
                        ok = false;
                    }
                }
            }
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(FAILURE)
            }
        }
        Command::List => {
            for n in corpus::list() {
                let note = corpus::load(n).map(|e| e.note).unwrap_or_default();
                println!("{n:<22} {note}");
            }
            ExitCode::SUCCESS
        }
    }
}

enum Input {
    Usage(String),
    Failure(String),
}

fn load_input(input: &str) -> Result<CatalyticEquation, Input> {
    if let Some(name) = input.strip_prefix("corpus:") {
        return corpus::load(name).map(|e| e.equation).map_err(|e| Input::Failure(e.to_string()));
    }
    let text = std::fs::read_to_string(input).map_err(|e| Input::Usage(format!("cannot read {input}: {e}")))?;
    corpus::parse_document(&text).map(|d| d.equation).map_err(|e| Input::Failure(format!("{input}: {e}")))
}
