use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use dioph_lab::boxdim::SlopeMode;
use dioph_lab::exponents::DEFAULT_BURN_IN;
use dioph_lab::rational::Rational;

mod commands;
mod config;
mod error;
mod params;
mod verify;

use commands::{write_output, EstimateArgs, EvalDimArgs, ScheduleArgs};
use config::ExperimentConfig;
use error::CliError;
use params::{parse_grid, rational_arg, Grid, RegimeArg};

/// Dimensions and digit experiments for sets of numbers with prescribed
/// approximation exponents along a denominator sequence.
#[derive(Debug, Parser)]
#[command(name = "dioph-lab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Mode {
    /// Least-squares slope over every depth.
    AllDepths,
    /// Minimum ratio over the block ends.
    BlockEnds,
}

#[derive(Debug, clap::Args)]
struct ConstructionArgs {
    /// Denominator sequence, e.g. `linear`, `poly:d=2`, `geometric:eta=2,a1=1`.
    #[arg(long)]
    seq: String,
    #[arg(long, value_parser = rational_arg)]
    theta: Rational,
    #[arg(long, value_parser = rational_arg)]
    vhat: Rational,
    #[arg(long, default_value_t = 3)]
    base: u32,
    /// `eta1` or `geo:l=<int>`.
    #[arg(long, default_value = "eta1")]
    regime: RegimeArg,
}

impl From<ConstructionArgs> for ScheduleArgs {
    fn from(a: ConstructionArgs) -> Self {
        ScheduleArgs { seq: a.seq, theta: a.theta, vhat: a.vhat, base: a.base, regime: a.regime }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate every applicable dimension formula exactly.
    EvalDim {
        #[arg(long, value_parser = rational_arg)]
        eta: Rational,
        #[arg(long, value_parser = rational_arg, required_unless_present = "vhat_grid", conflicts_with = "vhat_grid")]
        vhat: Option<Rational>,
        /// `start:stop:count`, endpoints included.
        #[arg(long, value_parser = parse_grid)]
        vhat_grid: Option<Grid>,
        #[arg(long, value_parser = rational_arg)]
        theta: Option<Rational>,
        #[arg(long, value_parser = rational_arg, requires = "theta")]
        rho: Option<Rational>,
        /// Print CSV instead of a table.
        #[arg(long)]
        csv: bool,
    },
    /// Emit the digits of a point of the constructed Cantor set.
    GenDigits {
        #[command(flatten)]
        construction: ConstructionArgs,
        #[arg(long)]
        depth: u64,
        /// Digit file path (stdout when absent).
        #[arg(long)]
        out: Option<String>,
        /// Also write the block schedule as CSV.
        #[arg(long)]
        schedule_csv: Option<String>,
    },
    /// Estimate both exponents of a digit file.
    Estimate {
        #[arg(long)]
        digits: String,
        #[arg(long)]
        seq: String,
        /// Use only the first DEPTH digits.
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_BURN_IN)]
        burn_in: f64,
        /// CSV path (stdout when absent).
        #[arg(long)]
        csv: Option<String>,
    },
    /// Count cylinders of the constructed set and fit a dimension.
    BoxDim {
        #[command(flatten)]
        construction: ConstructionArgs,
        #[arg(long)]
        max_depth: u64,
        #[arg(long, value_enum, default_value_t = Mode::BlockEnds)]
        mode: Mode,
        /// CSV path (stdout when absent).
        #[arg(long)]
        csv: Option<String>,
    },
    /// Run a parameter grid from a `key = value` config file.
    Sweep {
        #[arg(long)]
        config: String,
        /// Overrides the config's `out`.
        #[arg(long)]
        out: Option<String>,
    },
    /// Run the invariant checks at quick scales.
    Verify,
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::EvalDim { eta, vhat, vhat_grid, theta, rho, csv } => {
            let vhat = match (vhat, vhat_grid) {
                (Some(v), _) => vec![v],
                (None, Some(g)) => g.points(),
                (None, None) => return Err(CliError::Usage("need --vhat or --vhat-grid".into())),
            };
            print!("{}", commands::eval_dim(&EvalDimArgs { eta, vhat, theta, rho, csv })?);
        }
        Command::GenDigits { construction, depth, out, schedule_csv } => {
            let (digits, schedule) = commands::gen_digits(&construction.into(), depth)?;
            write_output(out.as_deref(), &digits)?;
            if let Some(path) = schedule_csv {
                write_output(Some(&path), &schedule)?;
            }
        }
        Command::Estimate { digits, seq, depth, burn_in, csv } => {
            let (table, summary) = commands::estimate(&EstimateArgs { digits, seq, depth, burn_in })?;
            write_output(csv.as_deref(), &table)?;
            eprintln!("{summary}");
        }
        Command::BoxDim { construction, max_depth, mode, csv } => {
            let mode = match mode {
                Mode::AllDepths => SlopeMode::AllDepths,
                Mode::BlockEnds => SlopeMode::AtBlockEnds,
            };
            let (table, summary) = commands::box_dim(&construction.into(), max_depth, mode)?;
            write_output(csv.as_deref(), &table)?;
            eprintln!("{summary}");
        }
        Command::Sweep { config, out } => {
            let cfg = ExperimentConfig::read(&config)?;
            let table = commands::sweep(&cfg)?;
            write_output(out.as_deref().or(cfg.out.as_deref()), &table)?;
        }
        Command::Verify => {
            let checks = verify::run();
            let failed = checks.iter().filter(|c| !c.ok).count();
            for c in &checks {
                println!("{} {}: {}", if c.ok { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            if failed > 0 {
                return Err(CliError::ChecksFailed(failed));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
