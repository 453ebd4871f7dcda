use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use nclab::harness::{self, load_config, parse_rational, RunOptions, RunReport};
use nclab::ncpoly::DecomposeOptions;
use nclab::{Error, Result};

#[derive(Parser)]
#[command(name = "nclab", version, about = "Noncommutative polynomial power sums and quantum central limit experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decompose a polynomial into power sums of Lie elements.
    Decompose {
        #[arg(long)]
        poly: String,
        /// Number of generators.
        #[arg(long)]
        a: usize,
        /// Merge ratio, an integer or fraction greater than 1.
        #[arg(long, default_value = "2")]
        q: String,
        /// Reject polynomials that are not self-adjoint.
        #[arg(long)]
        require_sa: bool,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// KS distance and moment gaps of p(Ã⃗) against its Gaussian limit.
    Sweep(RunArgs),
    /// Commutator norm decay of averaged generators.
    Decay(RunArgs),
    /// Reorder defect of the power-sum exponential.
    Reorder(RunArgs),
    /// Ordered joint characteristic function against its Gaussian limit.
    Ojcf(RunArgs),
    /// Commutator integral, product-exponential and unitary-invariance checks.
    Lemmas(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

fn experiment(args: &RunArgs, run: fn(&harness::ExperimentConfig, &RunOptions) -> Result<RunReport>) -> Result<()> {
    if args.jobs == 0 {
        return Err(Error::Config("--jobs must be at least 1".into()));
    }
    let cfg = load_config(&args.config)?;
    let report = run(&cfg, &RunOptions { jobs: args.jobs, out: args.out.clone() })?;
    println!("{report}");
    Ok(())
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Decompose { poly, a, q, require_sa, format } => {
            let opts = DecomposeOptions { q: parse_rational(&q)?, ..DecomposeOptions::default() };
            let report = harness::run_decompose(&poly, a, &opts, require_sa)?;
            match format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&report.to_json()).expect("json value")),
                Format::Text => print!("{}", report.to_text()),
            }
            if !report.round_trip_exact {
                return Err(Error::Internal("decomposition does not re-expand to the input".into()));
            }
            Ok(())
        }
        Command::Sweep(args) => experiment(&args, harness::run_clt_sweep),
        Command::Decay(args) => experiment(&args, harness::run_commutator_decay),
        Command::Reorder(args) => experiment(&args, harness::run_reorder_decay),
        Command::Ojcf(args) => experiment(&args, harness::run_ordered_cf),
        Command::Lemmas(args) => experiment(&args, harness::run_lemma_checks),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
