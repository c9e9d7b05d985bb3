use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fglfans::commands::{cmd_basis, cmd_check_descent, cmd_rank, cmd_resolve, Outcome, QUASIPROJECTIVE_WARNING};
use fglfans::config::{Coeff, DegreeRange, Format, JobConfig, DEFAULT_TRUNC};
use fglfans::selftest::{cmd_selftest, SelftestConfig};
use fglfans::CliError;
use fglfans_core::fan::CenterOrder;

/// Piecewise graded power series on fans with formal group law coefficients.
#[derive(Parser, Debug)]
#[command(name = "fglfans", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct JobArgs {
    /// Fan file: {"rank": n, "rays": [[..]], "cones": [[..]]}.
    #[arg(long)]
    fan: PathBuf,
    /// Inclusive degree range `a..b`, or a single degree.
    #[arg(long, default_value = "0..3", allow_hyphen_values = true)]
    degrees: DegreeRange,
    /// Coefficient ring truncation: weights above D are dropped.
    #[arg(long, default_value_t = DEFAULT_TRUNC)]
    trunc: usize,
    #[arg(long, value_enum, default_value_t = Coeff::Universal)]
    coeff: Coeff,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
}

impl JobArgs {
    fn config(&self) -> JobConfig {
        JobConfig {
            fan: self.fan.clone(),
            degrees: self.degrees,
            trunc: self.trunc,
            coeff: self.coeff,
            format: self.format,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Order {
    Forward,
    Reverse,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Ranks of the global sections per degree.
    Rank(JobArgs),
    /// A basis of the global sections per degree.
    Basis(JobArgs),
    /// Checks that the descent square of a star subdivision is Cartesian.
    CheckDescent {
        #[command(flatten)]
        job: JobArgs,
        /// New ray, comma separated; omit for the identity subdivision.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        ray: Option<Vec<i64>>,
    },
    /// Resolves the fan by star subdivisions.
    Resolve {
        #[arg(long)]
        fan: PathBuf,
        #[arg(long, value_enum, default_value_t = Order::Forward)]
        order: Order,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Runs the consistency checks over the bundled corpus.
    Selftest {
        #[arg(long, default_value_t = DEFAULT_TRUNC)]
        trunc: usize,
        /// Directory of fans and fixtures to use instead of the bundle.
        #[arg(long)]
        corpus: Option<PathBuf>,
        /// Rewrite the expected-rank fixtures.
        #[arg(long)]
        bless: bool,
    },
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var("FGLFANS_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::config(format!("FGLFANS_THREADS must be a positive integer, got `{value}`")))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(CliError::internal)
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    configure_threads()?;
    if !matches!(cli.command, Command::Selftest { .. }) {
        eprintln!("{QUASIPROJECTIVE_WARNING}");
    }
    match cli.command {
        Command::Rank(job) => cmd_rank(&job.config()),
        Command::Basis(job) => cmd_basis(&job.config()),
        Command::CheckDescent { job, ray } => cmd_check_descent(&job.config(), ray.as_deref()),
        Command::Resolve { fan, order, format } => {
            let cfg = JobConfig {
                fan,
                degrees: DegreeRange { first: 0, last: 0 },
                trunc: DEFAULT_TRUNC,
                coeff: Coeff::Universal,
                format,
            };
            let order = match order {
                Order::Forward => CenterOrder::Forward,
                Order::Reverse => CenterOrder::Reverse,
            };
            cmd_resolve(&cfg, order)
        }
        Command::Selftest { trunc, corpus, bless } => cmd_selftest(&SelftestConfig { trunc, corpus, bless }),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(outcome) => {
            print!("{}", outcome.output);
            ExitCode::from(outcome.exit_code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code as u8)
        }
    }
}
