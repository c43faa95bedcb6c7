mod analysis;
mod gen;
mod osc;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use colossal::factored::DEFAULT_MATERIALIZE_BOUND;
use colossal::primes::DEFAULT_SIEVE_LIMIT;
use colossal::robin::DEFAULT_K_MAX;
use colossal::{Error, PrimeSieve};

use output::Format;

#[derive(Parser, Debug)]
#[command(
    name = "colossal",
    version,
    about = "Colossally abundant numbers, Robin's inequality and oscillation geometry"
)]
struct Cli {
    #[command(flatten)]
    config: RunConfig,
    #[command(subcommand)]
    command: Command,
}

/// Settings shared by every subcommand. Each flag has a `COLOSSAL_` env override.
#[derive(Args, Debug, Clone)]
pub struct RunConfig {
    /// Primes are sieved up to this bound.
    #[arg(long, global = true, env = "COLOSSAL_SIEVE_LIMIT", default_value_t = DEFAULT_SIEVE_LIMIT,
          value_parser = clap::value_parser!(u64).range(2..))]
    pub sieve_limit: u64,

    /// Output format for record streams.
    #[arg(long, global = true, env = "COLOSSAL_FORMAT", value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Search horizon k_max for k_i and eligible-point scans.
    #[arg(long, global = true, env = "COLOSSAL_K_MAX", default_value_t = DEFAULT_K_MAX,
          value_parser = positive_usize)]
    pub k_max: usize,

    /// Integers above this bound are left unmaterialized.
    #[arg(long, global = true, env = "COLOSSAL_MATERIALIZE_BOUND", default_value_t = DEFAULT_MATERIALIZE_BOUND,
          value_parser = clap::value_parser!(u128))]
    pub materialize_bound: u128,

    /// Write output here instead of stdout.
    #[arg(long, short, global = true, env = "COLOSSAL_OUTPUT")]
    pub output: Option<PathBuf>,
}

impl RunConfig {
    pub fn sieve(&self) -> colossal::Result<PrimeSieve> {
        PrimeSieve::new(self.sieve_limit)
    }
}

pub fn positive_usize(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(v) => Ok(v),
        Err(e) => Err(e.to_string()),
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Stream CA records from the seed or a checkpoint.
    Gen(gen::GenArgs),
    /// Per-number statistics for chosen indices as CSV or JSONL.
    Stats(analysis::StatsArgs),
    /// Printed-precision statistics or 𝒢/ℒ tables.
    #[command(subcommand)]
    Table(analysis::TableCmd),
    /// First k with ℛ_{i,k} ≥ 1.
    Ki(analysis::KiArgs),
    /// 𝒢, ℒ, ℛ and 𝒟 for windows from one base index.
    Gl(analysis::GlArgs),
    /// Assert Robin's inequality and the step invariants along the sequence.
    Verify(analysis::VerifyArgs),
    /// Brute-force σ table cross-check of the engine.
    Oracle(analysis::OracleArgs),
    /// Oscillation-quotient evaluation and plot data.
    #[command(subcommand)]
    Osc(osc::OscCmd),
}

/// Raised when a verification sweep finds a violation.
#[derive(Debug)]
pub struct VerificationFailed(pub String);

impl std::fmt::Display for VerificationFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "verification failed: {}", self.0)
    }
}

impl std::error::Error for VerificationFailed {}

const EXIT_USAGE: u8 = 1;
const EXIT_RESOURCE: u8 = 2;
const EXIT_VERIFICATION: u8 = 3;
const EXIT_WITNESS: u8 = 4;

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<VerificationFailed>().is_some() {
        return EXIT_VERIFICATION;
    }
    match err.downcast_ref::<Error>() {
        Some(Error::FourExponentialsWitness { .. }) => EXIT_WITNESS,
        Some(Error::SieveExhausted { .. } | Error::Resource(_) | Error::TooLarge { .. }) => {
            EXIT_RESOURCE
        }
        Some(Error::Drift { .. }) => EXIT_VERIFICATION,
        _ => EXIT_USAGE,
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let config = cli.config;
    match cli.command {
        Command::Gen(args) => gen::run(&config, &args),
        Command::Stats(args) => analysis::stats(&config, &args),
        Command::Table(cmd) => analysis::table(&config, &cmd),
        Command::Ki(args) => analysis::ki(&config, &args),
        Command::Gl(args) => analysis::gl(&config, &args),
        Command::Verify(args) => analysis::verify(&config, &args),
        Command::Oracle(args) => analysis::oracle(&config, &args),
        Command::Osc(cmd) => osc::run(&config, &cmd),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            if let Some(Error::FourExponentialsWitness { .. }) = err.downcast_ref::<Error>() {
                eprintln!("FOUR EXPONENTIALS DISPROVED? Two ε candidates tie; save this output.");
            }
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
