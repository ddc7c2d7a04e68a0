//! `mmds`: embed dissimilarity matrices and metric measure spaces from the
//! command line.
//!
//! Exit codes: 0 success, 2 I/O failure, 3 invalid input or arguments,
//! 4 eigensolver failure.

mod commands;
mod scenario;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mmds::Error;

#[derive(Debug, Parser)]
#[command(
    name = "mmds",
    version,
    about = "Multidimensional scaling of metric measure spaces"
)]
struct Cli {
    /// On failure, also print a JSON error object to stderr.
    #[arg(long, global = true)]
    error_json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Square dissimilarity matrix as CSV (an optional header row holds labels).
    #[arg(long, required_unless_present = "space", conflicts_with = "space")]
    input: Option<PathBuf>,

    /// Metric measure space as JSON: {"n", "dist", "weights", "labels"}.
    #[arg(long)]
    space: Option<PathBuf>,

    /// Accept a square CSV matrix that is not a valid dissimilarity matrix and
    /// center the symmetric part of -d^2/2.
    #[arg(long, requires = "input")]
    raw: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Embed a matrix (classical MDS) or a weighted space (measure MDS).
    Embed {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(1..))]
        m: u64,
        /// Negative eigenvalues above -tol still count as Euclidean.
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        out_prefix: PathBuf,
        /// Embedding file format.
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Also write a scatter plot of the first two coordinates.
        #[arg(long)]
        svg: bool,
    },
    /// Report whether the input is Euclidean (prints JSON).
    EuclideanTest {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Analytic and numeric embeddings of the n-point circle.
    CircleDemo {
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u64).range(1..))]
        m: u64,
        #[arg(long)]
        out_prefix: PathBuf,
        #[arg(long)]
        svg: bool,
    },
    /// Run a convergence scenario.
    Converge {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        out_prefix: PathBuf,
        /// Report format.
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Also write a line chart of residual and TV distance by stage.
        #[arg(long)]
        svg: bool,
    },
    /// Perturb a dissimilarity matrix with seeded uniform noise.
    Perturb {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out_prefix: PathBuf,
        /// Also run a stability table over these magnitudes.
        #[arg(long, value_delimiter = ',')]
        stability: Option<Vec<f64>>,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(1..))]
        m: u64,
        /// Stability table format.
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Strain of the MDS solution or of a given configuration (prints JSON).
    Strain {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(1..))]
        m: u64,
        /// Configuration CSV, one row per point.
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

fn run(cli: &Cli) -> Result<(), Error> {
    match &cli.command {
        Command::Embed {
            input,
            m,
            tol,
            out_prefix,
            format,
            svg,
        } => commands::embed(input, *m as usize, *tol, out_prefix, *format, *svg),
        Command::EuclideanTest { input, tol } => {
            print!("{}", commands::euclidean_test(input, *tol)?);
            Ok(())
        }
        Command::CircleDemo {
            n,
            m,
            out_prefix,
            svg,
        } => commands::circle_demo(*n, *m as usize, out_prefix, *svg),
        Command::Converge {
            scenario,
            out_prefix,
            format,
            svg,
        } => commands::converge(scenario, out_prefix, *format, *svg),
        Command::Perturb {
            input,
            eps,
            seed,
            out_prefix,
            stability,
            trials,
            m,
            format,
        } => commands::perturb(
            input,
            *eps,
            *seed,
            out_prefix,
            stability.as_deref(),
            *trials,
            *m as usize,
            *format,
        ),
        Command::Strain { input, m, config } => {
            print!(
                "{}",
                commands::strain_cmd(input, *m as usize, config.as_deref())?
            );
            Ok(())
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io(_) => 2,
        Error::NoConvergence { .. } => 4,
        _ => 3,
    }
}

fn kind(code: u8) -> &'static str {
    match code {
        2 => "io",
        4 => "solver",
        _ => "validation",
    }
}

fn report(code: u8, message: &str, as_json: bool) {
    eprintln!("error: {message}");
    if as_json {
        let obj = serde_json::json!({
            "error": { "kind": kind(code), "code": code, "message": message }
        });
        eprintln!("{obj}");
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let as_json = std::env::args().any(|a| a == "--error-json");
            let _ = e.print();
            if as_json {
                report(3, &e.kind().to_string(), true);
            }
            return ExitCode::from(3);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let code = exit_code(&e);
            report(code, &e.to_string(), cli.error_json);
            ExitCode::from(code)
        }
    }
}
