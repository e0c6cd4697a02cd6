// SPDX-License-Identifier: MIT OR Apache-2.0
//! Command-line front end. Every command prints one JSON report tagged
//! with [`SCHEMA`] and exits with an [`Exit`] code.

mod commands;
mod pipeline;

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::circuits::{validate_verifier, Caps, VerifierSpec};
use crate::error::Error;
use crate::sdp::DEFAULT_TOL;

pub use commands::{WitnessFile, AGREEMENT_TOL};
pub use pipeline::{parse_stage, Stage, StageBound};

pub const SCHEMA: &str = "qipl-lab.report/1";

/// Process exit codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exit {
    /// Success, yes verdict or accept.
    Ok = 0,
    /// No verdict or reject.
    No = 1,
    /// Unreadable input or invalid arguments.
    Usage = 2,
    /// Two independent computations disagree, or a solver failed.
    Disagreement = 3,
    /// A transform stage refused its input.
    Stage = 4,
    PromiseViolation = 5,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Pretty,
}

#[derive(Debug, Parser)]
#[command(name = "qipl-lab", version, about = "Optimal prover values, transforms and protocol checks for small quantum interactive proofs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Target duality gap of the SDP solver.
    #[arg(long, global = true, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    /// Largest verifier register allowed, in qubits.
    #[arg(long, global = true, default_value_t = 12)]
    pub max_qubits: usize,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Optimal acceptance probability from the SDP, checked against an
    /// explicit prover search.
    Omega {
        verifier: PathBuf,
        #[arg(long, default_value_t = 6)]
        restarts: usize,
        #[arg(long, default_value_t = 200)]
        iterations: usize,
    },
    /// Apply a sequence of transforms, reporting the value after each.
    Transform {
        verifier: PathBuf,
        /// `name[:key=value,...]`, repeatable. Names: perfect_completeness
        /// (c, s), sequential_repetition (r), parallel_repetition (k),
        /// turn_halving, single_coin, scale_acceptance (p), complement.
        #[arg(long = "stage")]
        stages: Vec<String>,
        /// Skip the value computation after each stage.
        #[arg(long)]
        no_omega: bool,
    },
    /// Run the fingerprinting 3-SAT protocol on a DIMACS formula.
    Sat {
        formula: PathBuf,
        /// Honest prover with this assignment, e.g. `101`.
        #[arg(long, conflicts_with = "samples")]
        assignment: Option<String>,
        /// Best classical prover on this many sampled fingerprint keys.
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Game value of a semi-unbounded circuit on an input.
    Sac1 {
        circuit: PathBuf,
        /// Input bits, e.g. `0110`.
        #[arg(long, default_value = "")]
        input: String,
    },
    /// Decide a tuple-of-state-pairs instance from exact distances.
    Statetest { instance: PathBuf },
    /// Check a witness for a verifier.
    Witness { verifier: PathBuf, witness: PathBuf },
    /// Solve the per-branch program and write its blocks as a witness.
    ExtractWitness {
        verifier: PathBuf,
        /// Measurement outcome bits of the branch.
        #[arg(long, default_value = "")]
        branch: String,
        /// Threshold recorded in the witness; defaults to the solved value.
        #[arg(long)]
        c: Option<f64>,
    },
}

/// A command's result before it is written out.
#[derive(Debug)]
pub struct Outcome {
    pub exit: Exit,
    pub result: Value,
}

impl Outcome {
    fn new(exit: Exit, result: Value) -> Self {
        Self { exit, result }
    }
}

/// Maps a library error to an exit code.
pub fn exit_for(e: &Error) -> Exit {
    match e {
        Error::Convergence { .. } | Error::Infeasible(_) => Exit::Disagreement,
        _ => Exit::Usage,
    }
}

fn failure(e: &Error) -> Outcome {
    Outcome::new(exit_for(e), json!({ "error": e.to_string() }))
}

pub(crate) fn read(path: &std::path::Path) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| Error::Argument(format!("cannot read {}: {e}", path.display())))
}

pub(crate) fn parse_bits(s: &str) -> Result<Vec<bool>, Error> {
    s.chars()
        .map(|ch| match ch {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(Error::Argument(format!("{s:?} is not a bit string"))),
        })
        .collect()
}

/// Parses a verifier file and checks it against the register cap.
pub(crate) fn load_verifier(path: &std::path::Path, max_qubits: usize) -> Result<VerifierSpec, Outcome> {
    let v = read(path).and_then(|s| VerifierSpec::from_json(&s)).map_err(|e| failure(&e))?;
    let caps = Caps { max_register_qubits: max_qubits, ..Caps::default() };
    let violations = validate_verifier(&v, &caps);
    if violations.is_empty() {
        Ok(v)
    } else {
        Err(Outcome::new(Exit::Usage, json!({ "error": "verifier violates the caps", "violations": violations })))
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Omega { .. } => "omega",
        Command::Transform { .. } => "transform",
        Command::Sat { .. } => "sat",
        Command::Sac1 { .. } => "sac1",
        Command::Statetest { .. } => "statetest",
        Command::Witness { .. } => "witness",
        Command::ExtractWitness { .. } => "extract-witness",
    }
}

/// Runs a parsed command line and returns the full report.
pub fn run(cli: &Cli) -> (Exit, Value) {
    let cap = Caps::default().max_register_qubits;
    let outcome = if cli.max_qubits == 0 || cli.max_qubits > cap {
        Outcome::new(Exit::Usage, json!({ "error": format!("--max-qubits must be in 1..={cap}") }))
    } else if !(cli.tol > 0.0 && cli.tol < 1.0) {
        Outcome::new(Exit::Usage, json!({ "error": "--tol must be in (0, 1)" }))
    } else {
        commands::dispatch(cli).unwrap_or_else(|o| o)
    };
    let report = json!({
        "schema": SCHEMA,
        "command": command_name(&cli.command),
        "seed": cli.seed,
        "exit_code": outcome.exit as i32,
        "result": outcome.result,
    });
    (outcome.exit, report)
}

/// Parses `args`, runs the command, writes the report and returns the exit
/// code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { Exit::Usage as i32 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let (exit, report) = run(&cli);
    let text = match cli.format {
        Format::Json => report.to_string(),
        Format::Pretty => serde_json::to_string_pretty(&report).expect("reports serialize"),
    };
    match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text + "\n") {
                eprintln!("cannot write {}: {e}", path.display());
                return Exit::Usage as i32;
            }
        }
        None => println!("{text}"),
    }
    exit as i32
}
