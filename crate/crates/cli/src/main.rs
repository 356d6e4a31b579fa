mod commands;
mod render;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use exchange_core::model::outcomes::DEFAULT_BUDGET;
use exchange_core::model::Budget;
use exchange_core::Error;
use serde::Serialize;
use serde_json::Value;

#[derive(Parser)]
#[command(name = "exchange", version, about = "Stability solvers for exchange economies with indivisible goods")]
struct Cli {
    /// Print a machine-readable JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,

    /// Cap on enumeration steps before a size refusal.
    #[arg(long, global = true, env = "EXCHANGE_BUDGET", default_value_t = DEFAULT_BUDGET)]
    budget: u128,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse an economy file and check endowments and categories.
    Validate { path: PathBuf },
    /// Run a solver on an economy file.
    Solve(SolveArgs),
    /// Check a structural property of an economy (or an NTU game file).
    Check(CheckArgs),
    /// Generate a random economy.
    Gen(GenArgs),
    /// Write a bundled instance and verify its headline claim.
    Examples(ExampleArgs),
    /// Round a fractional matrix file into an integral assignment.
    Round { path: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Solver {
    WeakCore,
    StrongCore,
    PairwiseStable,
    Ttc,
    Talgo,
    Bargaining,
}

#[derive(Args)]
pub struct SolveArgs {
    pub solver: Solver,
    pub path: PathBuf,
    /// Largest coalition size used by the T operator.
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    /// Coalition structure for `bargaining`, e.g. "1,2;3".
    #[arg(long)]
    pub structure: Option<String>,
    /// Allocation for `bargaining`, bundles in agent order, e.g. "l1,r2;l2,r1;l3,r3".
    #[arg(long, requires = "structure")]
    pub allocation: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum CheckKind {
    Injective,
    Monotone,
    Dtu,
    Gft,
    Balanced,
    Convex,
}

#[derive(Args)]
pub struct CheckArgs {
    pub check: CheckKind,
    pub path: PathBuf,
    /// For `monotone`: also compare bundles valued -inf.
    #[arg(long)]
    pub raw: bool,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum FamilyArg {
    Dichotomous,
    Categorical,
    Housing,
    AdditiveCommon,
    AdditiveFree,
}

#[derive(Args)]
pub struct GenArgs {
    #[arg(long)]
    pub family: FamilyArg,
    #[arg(long)]
    pub agents: usize,
    /// Number of objects (defaults to the number of agents).
    #[arg(long)]
    pub objects: Option<usize>,
    /// Categories, for the categorical family.
    #[arg(long, default_value_t = 2)]
    pub categories: usize,
    /// Objects per category, for the categorical family.
    #[arg(long, default_value_t = 2)]
    pub per_category: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output file; without it the economy goes to stdout (or into the JSON report).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum ExampleName {
    Ex1,
    Ex2,
    Roommate,
    Konishi,
    ShoesGft,
}

#[derive(Args)]
pub struct ExampleArgs {
    pub name: ExampleName,
    /// Directory to write the instance file into.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// What a command produced: whether its claim holds, a JSON payload and a
/// text rendering.
pub struct Outcome {
    pub holds: bool,
    pub result: Value,
    pub text: Vec<String>,
    pub input: Option<Vec<u8>>,
    pub seed: Option<u64>,
}

impl Outcome {
    pub fn new(holds: bool, result: Value, text: Vec<String>) -> Self {
        Outcome { holds, result, text, input: None, seed: None }
    }

    pub fn with_input(mut self, bytes: Vec<u8>) -> Self {
        self.input = Some(bytes);
        self
    }
}

/// A failure with its exit code: 1 precondition, 2 parse, 3 size refusal.
pub struct Failure {
    pub code: u8,
    pub kind: &'static str,
    pub message: String,
    pub input: Option<Vec<u8>>,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let (code, kind) = match &e {
            Error::Json(_)
            | Error::BadRational(_)
            | Error::UnknownObject(_)
            | Error::UnknownAgent(_)
            | Error::Input(_) => (2, "parse"),
            Error::Budget { .. } | Error::Size(_) => (3, "size-refusal"),
            Error::Precondition(_) => (1, "precondition"),
            Error::Invariant(_) | Error::LongCycle { .. } | Error::WitnessBelowTarget { .. } => (1, "invariant"),
        };
        Failure { code, kind, message: e.to_string(), input: None }
    }
}

impl Failure {
    pub fn io(path: &std::path::Path, e: std::io::Error) -> Self {
        Failure { code: 2, kind: "io", message: format!("{}: {e}", path.display()), input: None }
    }

    pub fn precondition(message: String) -> Self {
        Failure { code: 1, kind: "precondition", message, input: None }
    }
}

#[derive(Serialize)]
struct RunReport<'a> {
    command: Vec<String>,
    input_sha256: Option<String>,
    seed: Option<u64>,
    status: &'a str,
    exit_code: u8,
    #[serde(skip_serializing_if = "Option::is_none")]
    result: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<Value>,
}

fn digest(bytes: &Option<Vec<u8>>) -> Option<String> {
    use sha2::{Digest, Sha256};
    bytes.as_ref().map(|b| hex::encode(Sha256::digest(b)))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command: Vec<String> = std::env::args().skip(1).collect();
    let budget = Budget(cli.budget);
    let start = Instant::now();
    let outcome = match &cli.command {
        Command::Validate { path } => commands::validate(path),
        Command::Solve(args) => commands::solve(args, budget),
        Command::Check(args) => commands::check(args, budget),
        Command::Gen(args) => commands::gen(args),
        Command::Examples(args) => commands::examples(args, budget),
        Command::Round { path } => commands::round(path),
    };
    let elapsed = start.elapsed();
    let code = match &outcome {
        Ok(o) if o.holds => 0,
        Ok(_) => 1,
        Err(f) => f.code,
    };
    if cli.json {
        let report = match &outcome {
            Ok(o) => RunReport {
                command,
                input_sha256: digest(&o.input),
                seed: o.seed,
                status: if o.holds { "ok" } else { "claim-fails" },
                exit_code: code,
                result: Some(o.result.clone()),
                error: None,
            },
            Err(f) => RunReport {
                command,
                input_sha256: digest(&f.input),
                seed: None,
                status: f.kind,
                exit_code: code,
                result: None,
                error: Some(serde_json::json!({ "kind": f.kind, "message": f.message })),
            },
        };
        println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    } else {
        match &outcome {
            Ok(o) => {
                for line in &o.text {
                    println!("{line}");
                }
            }
            Err(f) => eprintln!("error ({}): {}", f.kind, f.message),
        }
        eprintln!("[{:.3}s]", elapsed.as_secs_f64());
    }
    ExitCode::from(code)
}
