//! `cptrace`: JSON-driven front end for building and verifying traces on
//! crossed products of finite systems.

mod commands;
mod load;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};

use cptrace_core::analyze::DEFAULT_SEED;
use cptrace_core::Tolerances;

#[derive(Parser, Debug)]
#[command(name = "cptrace", version, about = "Traces on crossed products C(X) ⋊ G of finite systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Parse and validate the given input files.
    Validate,
    /// Build a functional from a build spec (`--field`) and check it.
    Build,
    /// Run the state and trace checks on a functional (`--trace`).
    Check,
    /// Recover the measure and the field of states from a trace.
    Decompose,
    /// List the extremal traces of a system with abelian group.
    EnumerateExtremal,
    /// Block decomposition of the crossed product by the brute-force oracle.
    Oracle,
    /// GNS representation of a state.
    Gns,
    /// Induce a state from a subgroup (`--psi`), or compare induced constructions (`--field`).
    Induce,
    /// Build a trace on a `ℤ` system from per-orbit circle measures (`--zdata`).
    Zbuild,
    /// Decompose a trace on a `ℤ` system into per-orbit circle measures.
    Zdecompose,
    /// Run the bundled corpus through all checks.
    Corpus,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::Build => "build",
            Command::Check => "check",
            Command::Decompose => "decompose",
            Command::EnumerateExtremal => "enumerate-extremal",
            Command::Oracle => "oracle",
            Command::Gns => "gns",
            Command::Induce => "induce",
            Command::Zbuild => "zbuild",
            Command::Zdecompose => "zdecompose",
            Command::Corpus => "corpus",
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct Opts {
    /// Equality tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Accepted negative margin for minimal eigenvalues.
    #[arg(long, global = true)]
    psd_tol: Option<f64>,
    /// Relative rank threshold.
    #[arg(long, global = true)]
    rank_tol: Option<f64>,
    /// Failures below this level are flagged as tolerance-related.
    #[arg(long, global = true)]
    warn_tol: Option<f64>,
    /// Seed for the oracle and for random corpus data.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Truncation window for `ℤ` systems.
    #[arg(long, global = true)]
    pub window: Option<usize>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub system: Option<PathBuf>,
    #[arg(long, global = true)]
    pub trace: Option<PathBuf>,
    /// Field or build spec.
    #[arg(long, global = true)]
    pub field: Option<PathBuf>,
    #[arg(long, global = true)]
    pub zdata: Option<PathBuf>,
    /// Function on a subgroup, for `induce`.
    #[arg(long, global = true)]
    pub psi: Option<PathBuf>,
    /// Treat the functional as a state only: skip the trace-only checks.
    #[arg(long, global = true)]
    pub state: bool,
}

/// A failure before any check could run.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub kind: String,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        CliError { code: 2, kind: "Input".into(), message: message.into() }
    }

    /// Classifies a core error; `context` (usually a file name) prefixes the message.
    pub fn from_core(e: cptrace_core::Error, context: Option<&str>) -> Self {
        let message = match context {
            Some(c) => format!("{c}: {e}"),
            None => e.to_string(),
        };
        CliError { code: if e.is_input_error() { 2 } else { 1 }, kind: e.kind().into(), message }
    }
}

impl From<cptrace_core::Error> for CliError {
    fn from(e: cptrace_core::Error) -> Self {
        CliError::from_core(e, None)
    }
}

/// The body of a report and whether every check passed.
pub struct Outcome {
    pub body: Map<String, Value>,
    pub pass: bool,
}

fn tolerances(opts: &Opts) -> Result<Tolerances, CliError> {
    let mut t = Tolerances::default();
    for (name, given, slot) in [
        ("--tol", opts.tol, &mut t.tol),
        ("--psd-tol", opts.psd_tol, &mut t.psd_tol),
        ("--rank-tol", opts.rank_tol, &mut t.rank_tol),
        ("--warn-tol", opts.warn_tol, &mut t.warn_tol),
    ] {
        if let Some(v) = given {
            if !(v.is_finite() && v > 0.0) {
                return Err(CliError::input(format!("{name} must be positive, got {v}")));
            }
            *slot = v;
        }
    }
    Ok(t)
}

fn run(command: Command, opts: &Opts) -> (Value, u8) {
    let mut report = Map::new();
    report.insert("command".into(), json!(command.name()));
    let result = tolerances(opts).and_then(|tol| {
        report.insert("tolerances".into(), serde_json::to_value(tol).expect("plain numbers"));
        report.insert("seed".into(), json!(opts.seed));
        commands::dispatch(command, opts, &tol)
    });
    let code = match result {
        Ok(outcome) => {
            report.extend(outcome.body);
            report.insert("status".into(), json!(if outcome.pass { "pass" } else { "fail" }));
            if outcome.pass {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("cptrace: {}", e.message);
            report.insert("status".into(), json!("error"));
            report.insert("error".into(), json!({"kind": e.kind, "message": e.message}));
            e.code
        }
    };
    (Value::Object(report), code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (report, code) = run(cli.command, &cli.opts);
    let text = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    match &cli.opts.out {
        Some(path) => {
            if let Err(e) = fs::write(path, text) {
                eprintln!("cptrace: cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    ExitCode::from(code)
}
