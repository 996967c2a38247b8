//! The `yoccoz` command line.
//!
//! Exit codes: 0 success, 2 usage, 3 numeric failure (JSON diagnostics on
//! stderr), 4 hypothesis not met.

pub mod commands;
pub mod config;
pub mod json;
pub mod molecule;
pub mod svg;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::commands::{ModuliArgs, PlotArgs, PortraitInput};
use crate::config::{parse_complex, Overrides, RunConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: i32,
    pub kind: String,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError::usage_kind("Usage", message)
    }

    pub fn usage_kind(kind: impl Into<String>, message: impl Into<String>) -> Self {
        CliError { code: 2, kind: kind.into(), message: message.into() }
    }

    pub fn numeric(kind: impl Into<String>, message: impl Into<String>) -> Self {
        CliError { code: 3, kind: kind.into(), message: message.into() }
    }

    pub fn hypothesis(message: impl Into<String>) -> Self {
        CliError { code: 4, kind: "HypothesisNotMet".into(), message: message.into() }
    }

    /// The text written to stderr.
    pub fn render(&self) -> String {
        match self.code {
            3 => json::to_string(&serde_json::json!({ "error": self.kind, "message": self.message })),
            4 => format!("error: {}\n", self.message),
            _ => format!("error: {}: {}\n", self.kind, self.message),
        }
    }
}

#[derive(Parser)]
#[command(name = "yoccoz", version, about = "Yoccoz puzzles for quadratic polynomials", arg_required_else_help = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by the run commands; they override `--config`.
#[derive(Args, Clone, Default)]
struct RunArgs {
    /// Parameter `c` as `RE[,IM]`.
    #[arg(long, allow_hyphen_values = true, value_name = "RE[,IM]")]
    c: Option<String>,
    /// Molecule bounds `R,Q,N`.
    #[arg(long, value_name = "R,Q,N")]
    bounds: Option<String>,
    #[arg(long, value_name = "M")]
    max_depth: Option<usize>,
    /// Grid cells per side for moduli (power of two, 64..=4096).
    #[arg(long, value_name = "N")]
    resolution: Option<usize>,
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// TOML file with the same keys as the flags.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
}

impl RunArgs {
    fn resolve(&self) -> Result<RunConfig, CliError> {
        RunConfig::resolve(&Overrides {
            c: self.c.clone(),
            bounds: self.bounds.clone(),
            max_depth: self.max_depth,
            resolution: self.resolution,
            out: self.out.clone(),
            config: self.config.clone(),
        })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Validate a ray portrait, or cluster the landing rays of periodic points.
    Portrait {
        /// Classes separated by `;`, angles by `,` (e.g. `1/7,2/7,4/7`).
        #[arg(long, conflicts_with_all = ["c", "period"])]
        angles: Option<String>,
        #[arg(long, allow_hyphen_values = true, value_name = "RE[,IM]", requires = "period")]
        c: Option<String>,
        /// Period of the landing points.
        #[arg(long, requires = "c")]
        period: Option<usize>,
        /// Largest ray period tried.
        #[arg(long, default_value_t = 6)]
        max_ray_period: u32,
        /// Write the JSON here instead of stdout.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Run the lemma registry and write a verification report.
    Verify(RunArgs),
    /// Tabulate planar moduli of the principal nest.
    Moduli {
        #[command(flatten)]
        run: RunArgs,
        /// Return times of the transfer row (default: the period p).
        #[arg(long, value_delimiter = ',')]
        times: Option<Vec<usize>>,
        /// Vertex-disk radius of the bigon row, relative to the vertex distance.
        #[arg(long, default_value_t = 0.1)]
        neighborhood: f64,
    },
    /// Render the Julia set with its puzzle, or the parameter plane.
    Plot {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        julia: bool,
        #[arg(long)]
        molecule: bool,
        #[arg(long, default_value_t = 3)]
        puzzle_depth: usize,
        #[arg(long, default_value_t = 6)]
        period_bound: usize,
        #[arg(long, default_value_t = 400)]
        pixels: usize,
    },
}

fn dispatch(command: Command) -> Result<String, CliError> {
    match command {
        Command::Portrait { angles, c, period, max_ray_period, out } => {
            let input = match (angles, c, period) {
                (Some(a), _, _) => PortraitInput::Angles(a),
                (None, Some(c), Some(period)) => PortraitInput::Landing { c: parse_complex(&c)?, period, max_ray_period },
                _ => return Err(CliError::usage("portrait needs --angles or --c with --period")),
            };
            let text = commands::portrait(&input)?;
            match out {
                Some(path) => {
                    std::fs::write(&path, &text)
                        .map_err(|e| CliError::numeric("Io", format!("{}: {e}", path.display())))?;
                    Ok(String::new())
                }
                None => Ok(text),
            }
        }
        Command::Verify(run) => commands::verify(&run.resolve()?),
        Command::Moduli { run, times, neighborhood } => {
            if !(neighborhood > 0.0 && neighborhood < 0.5) {
                return Err(CliError::usage("neighborhood must be in (0, 0.5)"));
            }
            commands::moduli(&run.resolve()?, &ModuliArgs { times, neighborhood })
        }
        Command::Plot { run, julia, molecule, puzzle_depth, period_bound, pixels } => {
            commands::plot(&run.resolve()?, &PlotArgs { julia, molecule, puzzle_depth, period_bound, pixels })
        }
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match dispatch(cli.command) {
        Ok(text) => {
            print!("{text}");
            0
        }
        Err(e) => {
            eprint!("{}", e.render());
            e.code
        }
    }
}
