mod commands;
mod error;
mod input;
mod output;
mod sweep;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::CliError;
use crate::output::Format;

#[derive(Parser, Debug)]
#[command(name = "trapwalk", version, about = "Survival of a random walk among soft traps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Where the landscape comes from: a JSON file or the recursion flags.
#[derive(Args, Debug, Clone, Default)]
pub struct Source {
    /// Landscape JSON file (`{"intervals": [...], "wall": ...}`).
    #[arg(long, value_name = "PATH", conflicts_with_all = ["i1", "c", "n"])]
    pub landscape: Option<PathBuf>,
    #[arg(long, value_name = "NAT")]
    pub i1: Option<u64>,
    /// Scale factor as `a/b`.
    #[arg(long, value_name = "RATIONAL", allow_hyphen_values = true)]
    pub c: Option<String>,
    /// Number of intervals.
    #[arg(long, value_name = "NAT")]
    pub n: Option<usize>,
    /// Absolute wall position; overrides any wall in the file.
    #[arg(long, value_name = "NAT")]
    pub wall: Option<String>,
}

#[derive(Args, Debug, Clone)]
pub struct Out {
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeArg {
    Site,
    Trap,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a recursion landscape.
    Gen {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        out: Out,
    },
    /// Finite or infinite expected survival for a recursion.
    Classify {
        #[arg(long, value_name = "NAT")]
        i1: u64,
        #[arg(long, value_name = "RATIONAL")]
        c: String,
        /// Terms in the reported partial sum of the upper series.
        #[arg(long, value_name = "NAT", default_value_t = 10)]
        imax: usize,
        #[arg(long, value_name = "NAT", default_value_t = trapwalk_core::criticality::DEFAULT_MAX_SHIFT)]
        max_shift: usize,
        #[command(flatten)]
        out: Out,
    },
    /// Exact expected survival time of a walled landscape.
    Expect {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        out: Out,
    },
    /// Monte Carlo estimate of the expected survival time.
    Simulate {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_name = "NAT", default_value_t = 10_000)]
        paths: u64,
        #[arg(long, value_name = "NAT", default_value_t = 4)]
        workers: usize,
        #[arg(long, value_enum, default_value = "trap")]
        mode: ModeArg,
        /// Step cap per path (site mode) or hop cap (trap mode).
        #[arg(long, value_name = "NAT")]
        step_cap: Option<u64>,
        #[command(flatten)]
        out: Out,
    },
    /// List embedded-walk histories up to a target index.
    Enumerate {
        #[arg(long, value_name = "NAT")]
        imax: usize,
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        out: Out,
    },
    /// Check the inter-arrival bounds on a recursion landscape.
    VerifyBounds {
        #[arg(long, value_name = "NAT")]
        i1: u64,
        #[arg(long, value_name = "RATIONAL")]
        c: String,
        #[arg(long, value_name = "NAT", default_value_t = 6)]
        imax: usize,
        /// Intervals to generate; defaults to `imax + 1`.
        #[arg(long, value_name = "NAT")]
        n: Option<usize>,
        #[command(flatten)]
        out: Out,
    },
    /// Split statistics at a trap, or a search for a non-monotone pair.
    Monotonicity {
        #[command(flatten)]
        source: Source,
        /// Split at trap `k - 1`; requires a landscape.
        #[arg(long, value_name = "NAT")]
        k: Option<usize>,
        #[arg(long, value_name = "NAT", default_value_t = 8)]
        search_i1: u64,
        #[arg(long, value_name = "NAT", default_value_t = 200)]
        search_i3: u64,
        #[command(flatten)]
        out: Out,
    },
    /// Validate an explicit path and compute tau.
    Replay {
        #[command(flatten)]
        source: Source,
        /// Trajectory JSON (`{"sites": [...], "end": "death"}` or `turning_points`).
        #[arg(long, value_name = "PATH", required_unless_present = "example")]
        trajectory: Option<PathBuf>,
        /// Use the built-in worked example instead of a file.
        #[arg(long, conflicts_with_all = ["trajectory", "landscape", "i1", "c", "n"])]
        example: bool,
        /// Also decompose at the split next to trap `k - 1`.
        #[arg(long, value_name = "NAT")]
        k: Option<usize>,
        #[command(flatten)]
        out: Out,
    },
    /// Run a grid of classifications and truncated computations.
    Sweep {
        #[arg(long, value_name = "PATH")]
        config: PathBuf,
        #[command(flatten)]
        out: Out,
    },
}

fn run(cmd: Command) -> Result<(), CliError> {
    let budget = input::digit_budget()?;
    match cmd {
        Command::Gen { source, out } => out.emit(&commands::gen(&source, budget)?),
        Command::Classify {
            i1,
            c,
            imax,
            max_shift,
            out,
        } => out.emit(&commands::classify(i1, &c, imax, max_shift, budget)?),
        Command::Expect { source, out } => out.emit(&commands::expect(&source, budget)?),
        Command::Simulate {
            source,
            seed,
            paths,
            workers,
            mode,
            step_cap,
            out,
        } => {
            let req = commands::SimRequest {
                seed,
                paths,
                workers,
                mode,
                step_cap,
            };
            out.emit(&commands::simulate(&source, &req, budget)?)
        }
        Command::Enumerate { imax, source, out } => {
            let rows = commands::enumerate(imax, &source, budget)?;
            out.emit_rows(&rows, commands::EnumerateOutput { imax, rows: &rows })
        }
        Command::VerifyBounds { i1, c, imax, n, out } => out.emit(&commands::verify_bounds(i1, &c, imax, n, budget)?),
        Command::Monotonicity {
            source,
            k,
            search_i1,
            search_i3,
            out,
        } => out.emit(&commands::monotonicity(&source, k, search_i1, search_i3, budget)?),
        Command::Replay {
            source,
            trajectory,
            example,
            k,
            out,
        } => out.emit(&commands::replay(&source, trajectory.as_deref(), example, k, budget)?),
        Command::Sweep { config, out } => {
            let rows = sweep::run_file(&config, budget)?;
            out.emit_rows(&rows, sweep::SweepOutput { rows: &rows })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => ExitCode::from(64),
                ErrorKind::InvalidValue | ErrorKind::ValueValidation => ExitCode::from(2),
                _ => ExitCode::from(64),
            };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
