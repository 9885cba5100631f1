//! `talloc`: plot data, allocation decisions, simulation and backtests for
//! budget-threshold allocation under GED returns.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "talloc", version, about)]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Write the primary output here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug, Clone)]
pub struct KappaGrid {
    /// Single kappa value (overrides the range).
    #[arg(long, allow_negative_numbers = true)]
    pub kappa: Option<f64>,
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    pub from: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub to: f64,
    #[arg(long, default_value_t = 0.005, allow_negative_numbers = true)]
    pub step: f64,
}

#[derive(Args, Debug, Clone)]
pub struct StrategyArgs {
    /// Threshold multiple of the standard deviation.
    #[arg(long, default_value_t = 0.4, allow_negative_numbers = true)]
    pub k: f64,
    /// Position limit L.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub limit: f64,
    /// Estimator window in periods.
    #[arg(long, default_value_t = 60)]
    pub window: usize,
    /// `rolling` or `ewma`.
    #[arg(long, default_value = "rolling")]
    pub estimator: String,
    /// First period that takes a position (defaults to the window).
    #[arg(long)]
    pub warmup: Option<usize>,
    /// Where to write the key-value summary (standard error if omitted).
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Risk-scaling function tau(kappa) over a grid.
    Tau(KappaGrid),
    /// Budget-threshold utility U(W, beta) for several budgets.
    UtilityCurve {
        /// Comma-separated budgets.
        #[arg(long, value_delimiter = ',', default_values_t = vec![-1.0, 0.0, 1.0, 2.0], allow_negative_numbers = true)]
        beta: Vec<f64>,
        #[arg(long, default_value_t = -3.0, allow_negative_numbers = true)]
        w_min: f64,
        #[arg(long, default_value_t = 3.0, allow_negative_numbers = true)]
        w_max: f64,
        #[arg(long, default_value_t = 121)]
        points: usize,
    },
    /// Risk-cost multiple of the standard deviation against kappa.
    RiskScaling(KappaGrid),
    /// Relative position h/L against standardised alpha.
    HoldingCurve {
        #[arg(long, default_value_t = 0.4, allow_negative_numbers = true)]
        k: f64,
        #[arg(long, default_value_t = -1.0, allow_negative_numbers = true)]
        x_min: f64,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        x_max: f64,
        #[arg(long, default_value_t = 401)]
        points: usize,
    },
    /// Optimal holding for one query.
    Allocate {
        #[arg(long, allow_negative_numbers = true)]
        alpha: f64,
        /// GED scale parameter.
        #[arg(
            long,
            conflicts_with = "s",
            required_unless_present = "s",
            allow_negative_numbers = true
        )]
        sigma: Option<f64>,
        /// Standard deviation of returns.
        #[arg(long, allow_negative_numbers = true)]
        s: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        kappa: f64,
        #[arg(long, allow_negative_numbers = true)]
        limit: f64,
        /// Use the semi-empirical rule with this K.
        #[arg(long, allow_negative_numbers = true)]
        k: Option<f64>,
    },
    /// Closed-form expected utility, optionally checked by quadrature.
    Eu {
        #[arg(long, allow_negative_numbers = true)]
        h: f64,
        #[arg(long, allow_negative_numbers = true)]
        alpha: f64,
        #[arg(long, allow_negative_numbers = true)]
        sigma: f64,
        #[arg(long, allow_negative_numbers = true)]
        kappa: f64,
        /// Also evaluate the integral numerically.
        #[arg(long)]
        oracle: bool,
    },
    /// Write a simulated return series.
    Simulate {
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        mu: f64,
        #[arg(long, allow_negative_numbers = true)]
        sigma: f64,
        #[arg(long, allow_negative_numbers = true)]
        kappa: f64,
        #[arg(long)]
        n: usize,
        /// Draw per-period conditional means uniformly within ±spread·s and
        /// write them with s as alpha,s columns.
        #[arg(long, allow_negative_numbers = true)]
        alpha_spread: Option<f64>,
    },
    /// Backtest the three-state rule on a CSV series.
    Backtest {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        strategy: StrategyArgs,
    },
    /// Sweep K and report the utility-maximising value.
    Calibrate {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        strategy: StrategyArgs,
        #[arg(long, default_value_t = 0.05, allow_negative_numbers = true)]
        k_min: f64,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        k_max: f64,
        #[arg(long, default_value_t = 0.05, allow_negative_numbers = true)]
        k_step: f64,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if is_broken_pipe(&e) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn is_broken_pipe(e: &anyhow::Error) -> bool {
    e.chain().any(|c| {
        c.downcast_ref::<std::io::Error>()
            .is_some_and(|io| io.kind() == std::io::ErrorKind::BrokenPipe)
    })
}
