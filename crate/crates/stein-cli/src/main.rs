use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use stein_cli::{cmd_fourier, cmd_reduce, cmd_st, cmd_symbol, cmd_verify, CliError, JobConfig, Outcome, Suite};

#[derive(Parser)]
#[command(name = "stein", version, about = "Exact Steinberg-module and polylogarithm computations")]
struct Cli {
    /// Seed for every random choice; recorded in the output.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Ambient dimension for random test cases.
    #[arg(long, global = true)]
    dim: Option<usize>,
    /// Weight for weight-dependent studies.
    #[arg(long, global = true)]
    weight: Option<u32>,
    /// Number of random evaluation points for the ρ oracle.
    #[arg(long = "oracle-points", global = true, default_value_t = 5)]
    oracle_points: usize,
    /// Coordinate bound for oracle points; truncation box for Fourier sums.
    #[arg(long = "box", global = true, default_value_t = 10_000)]
    box_size: i64,
    /// Number of random cases for `verify`.
    #[arg(long, global = true)]
    cases: Option<usize>,
    /// Write the artifact here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Flag-basis normal form of a Steinberg element given as JSON.
    Reduce { input: PathBuf },
    /// Bar-complex symbol of L[v] or I[v]; vectors as a JSON array.
    Symbol { kind: String, vectors: String },
    /// Run a relation suite: shuffle, dihedral, cobracket, duality, ashrudolph.
    Verify {
        suite: String,
        /// JSON file of cases expected to vanish instead of random cases.
        #[arg(long)]
        fixture: Option<PathBuf>,
    },
    /// Verify a polylogarithm identity file.
    St { identity: PathBuf },
    /// Fourier convergence or coefficient-shuffle study from a spec file.
    Fourier {
        spec: PathBuf,
        /// Evaluation point for Bernoulli studies, as a rational.
        #[arg(long)]
        x: Option<String>,
    },
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    let cfg = JobConfig {
        seed: cli.seed,
        oracle_points: cli.oracle_points,
        box_size: cli.box_size,
        dim: cli.dim,
        weight: cli.weight,
        cases: cli.cases,
        out: cli.out.clone(),
    };
    if cfg.box_size < 1 || cfg.oracle_points == 0 {
        return Err(CliError::Argument("--box and --oracle-points must be positive".into()));
    }
    let outcome = match &cli.command {
        Command::Reduce { input } => cmd_reduce(&cfg, input)?,
        Command::Symbol { kind, vectors } => cmd_symbol(&cfg, kind, vectors)?,
        Command::Verify { suite, fixture } => cmd_verify(&cfg, suite.parse::<Suite>()?, fixture.as_deref())?,
        Command::St { identity } => cmd_st(&cfg, identity)?,
        Command::Fourier { spec, x } => cmd_fourier(&cfg, spec, x.as_deref())?,
    };
    outcome.emit(cfg.out.as_deref())?;
    Ok(outcome)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(o) => ExitCode::from(o.exit_code() as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
