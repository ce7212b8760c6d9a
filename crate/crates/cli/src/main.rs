mod algebra;
mod config;
mod dynamics;
mod report;
mod sequences;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Serialize, Serializer};
use serde_json::Value;

use report::Report;

/// Exact permutation-operator algebra on ±1 sequences, with predictability
/// experiments for Lorenz-63 and the upscale cascade.
#[derive(Parser, Debug)]
#[command(name = "granular", version)]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// File of `key = value` lines used as defaults for flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
enum Command {
    /// Check the identities of i and its dyadic roots.
    AlgebraVerify(algebra::AlgebraVerify),
    /// Check I, J, K against their printed forms and the root generation.
    QuatVerify(algebra::QuatVerify),
    /// Generate or count the square roots of minus one.
    #[command(subcommand)]
    Roots(algebra::RootsCmd),
    /// Make sequences or correlate two of them.
    #[command(subcommand)]
    Seq(sequences::SeqCmd),
    /// The family point S(λ) = i^(2λ/pi)(S), or why it is undefined.
    Rotate(sequences::Rotate),
    /// Build S' with a given cosine or sine against S.
    Superpose(sequences::Superpose),
    /// Disjointness certificate and grid intersection for a cosine.
    Definability(sequences::DefinabilityCmd),
    /// Realized correlation for every admissible cosine.
    InterferenceScan(sequences::InterferenceScan),
    /// Correlation table and counterfactual queries for a pair (S, S').
    EprTable(sequences::EprTable),
    /// Partial sums of the predictability horizon series.
    Cascade(dynamics::Cascade),
    /// Lorenz-63 trajectories, counterfactual perturbations, Lyapunov exponent.
    #[command(subcommand)]
    Lorenz(dynamics::LorenzCmd),
}

impl Command {
    fn run(&self) -> Result<Report, String> {
        match self {
            Command::AlgebraVerify(a) => a.run(),
            Command::QuatVerify(a) => a.run(),
            Command::Roots(a) => a.run(),
            Command::Seq(a) => a.run(),
            Command::Rotate(a) => a.run(),
            Command::Superpose(a) => a.run(),
            Command::Definability(a) => a.run(),
            Command::InterferenceScan(a) => a.run(),
            Command::EprTable(a) => a.run(),
            Command::Cascade(a) => a.run(),
            Command::Lorenz(a) => a.run(),
        }
    }
}

/// Serializes through `Display`.
pub fn display<T: std::fmt::Display, S: Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

pub fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn command_name(config: &Value) -> String {
    ["command", "action"]
        .iter()
        .filter_map(|k| config.get(*k).and_then(Value::as_str))
        .collect::<Vec<_>>()
        .join(" ")
}

fn main() -> ExitCode {
    let args = match config::expand(std::env::args().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let cli = Cli::try_parse_from(args).unwrap_or_else(|e| e.exit());

    let mut config = report::to_value(&cli.command);
    if let Value::Object(map) = &mut config {
        map.insert("format".into(), report::to_value(cli.format));
    }
    let name = command_name(&config);

    let report = match cli.command.run() {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let bytes = match cli.format {
        Format::Json => report::render_json(&name, &config, &report),
        Format::Csv => report::render_csv(&name, &config, &report),
    };
    let written = match &cli.out {
        Some(path) => std::fs::write(path, &bytes).map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(&bytes).map_err(err)
        }
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    if report.failures.is_empty() {
        ExitCode::SUCCESS
    } else {
        for f in &report.failures {
            eprintln!("verification failed: {f}");
        }
        ExitCode::from(1)
    }
}
