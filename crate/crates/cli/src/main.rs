//! `mechforge`: exact equilibrium, mechanism and planning reports for games
//! given as JSON files.
//!
//! Exit codes: 0 success, 2 input error, 3 domain precondition failed,
//! 4 target not implementable.

mod commands;
mod error;
mod input;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{CurveScheme, Format, Info};
use error::{CliError, CliResult};

#[derive(Parser)]
#[command(name = "mechforge", version, about = "Exact analysis of transfer mechanisms for finite games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Equilibria, best and worst equilibrium values, optimum and efficiency.
    Analyze {
        game: PathBuf,
        /// Comma-separated player weights summing to 1 (default uniform).
        #[arg(long)]
        weights: Option<String>,
        #[arg(long, default_value = "0")]
        epsilon: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact efficiency-versus-budget step curve.
    Curve {
        game: PathBuf,
        #[arg(long, value_enum)]
        scheme: CurveScheme,
        #[arg(long)]
        weights: Option<String>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Witness transfer making a target profile an equilibrium.
    Implement {
        game: PathBuf,
        /// Comma-joined action labels, one per player.
        #[arg(long)]
        target: String,
        /// `kappa`, `theta`, a box file, or `reward-budget:K`, `punish-budget:X`, `zero`.
        #[arg(long)]
        scheme: String,
        /// Reward budget or tax rate for `kappa` and `theta`.
        #[arg(long, allow_hyphen_values = true)]
        budget: Option<String>,
        #[arg(long, value_enum, default_value = "full")]
        info: Info,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Scheme value under full versus partial information.
    CompareInfo {
        game: PathBuf,
        /// Box file, or `reward-budget:K`, `punish-budget:X`, `zero`.
        #[arg(long = "box")]
        box_spec: String,
        #[arg(long)]
        weights: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Optimal tax rate for payoffs scaled by c(theta) = c0 + c1 theta.
    PlanTheta {
        game: PathBuf,
        /// `c0,c1`
        #[arg(long, allow_hyphen_values = true)]
        scale: String,
        #[arg(long)]
        weights: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the planner curve as CSV.
        #[arg(long)]
        curve_out: Option<PathBuf>,
    },
}

fn configure_threads() -> CliResult<()> {
    let Ok(text) = std::env::var("MECHFORGE_THREADS") else {
        return Ok(());
    };
    let n: usize = text
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Input(format!("MECHFORGE_THREADS={text:?} is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Input(format!("cannot configure {n} threads: {e}")))
}

fn run(cli: Cli) -> CliResult<()> {
    configure_threads()?;
    match cli.command {
        Command::Analyze {
            game,
            weights,
            epsilon,
            out,
        } => commands::analyze(&game, weights.as_deref(), &epsilon, out.as_deref()),
        Command::Curve {
            game,
            scheme,
            weights,
            format,
            out,
        } => commands::curve(&game, scheme, weights.as_deref(), format, out.as_deref()),
        Command::Implement {
            game,
            target,
            scheme,
            budget,
            info,
            out,
        } => commands::implement(&game, &target, &scheme, budget.as_deref(), info, out.as_deref()),
        Command::CompareInfo {
            game,
            box_spec,
            weights,
            out,
        } => commands::compare_info(&game, &box_spec, weights.as_deref(), out.as_deref()),
        Command::PlanTheta {
            game,
            scale,
            weights,
            out,
            curve_out,
        } => commands::plan_theta(&game, &scale, weights.as_deref(), out.as_deref(), curve_out.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("mechforge: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
