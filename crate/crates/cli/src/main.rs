//! `ranklq`: rank-based L_q independence tests from the command line.
//!
//! Exit codes: 0 success, 1 usage error, 2 data or calibration error,
//! 3 internal invariant violation.

mod cache;
mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ranklq::rng::DEFAULT_SEED;
use ranklq::{CoefficientKind, Error};

#[derive(Parser, Debug)]
#[command(name = "ranklq", version, about = "Rank-based L_q tests for mutual independence")]
pub struct Cli {
    /// Cap on worker threads (results do not depend on it).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Test mutual independence of the columns of a CSV file.
    Test(TestArgs),
    /// Build a calibration record and write it as JSON.
    Calibrate(CalibrateArgs),
    /// Exact null moment E[T^r] of a single pair.
    Moments(MomentsArgs),
    /// Constants behind the calibration.
    #[command(subcommand)]
    Constants(ConstantsCmd),
    /// Size and power simulations.
    #[command(subcommand)]
    Simulate(SimulateCmd),
}

#[derive(Args, Debug)]
pub struct TestArgs {
    /// Input CSV (one column per variable, optional header row).
    #[arg(long = "in", value_name = "PATH")]
    pub input: PathBuf,
    /// rho, tau, D, R, taustar or pearson.
    #[arg(long)]
    pub kind: CoefficientKind,
    #[arg(long, default_value = "2,4,6,inf")]
    pub norms: String,
    /// Comma-separated weights for the Cauchy combination (equal by default).
    #[arg(long)]
    pub weights: Option<String>,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Monte Carlo replicates for automatic calibration.
    #[arg(long = "B", default_value_t = 100_000)]
    pub b: usize,
    /// Calibration record to use instead of the cache.
    #[arg(long, value_name = "PATH")]
    pub calibration: Option<PathBuf>,
    /// Fail instead of running a Monte Carlo calibration.
    #[arg(long)]
    pub no_auto_calibrate: bool,
    #[arg(long, value_enum, default_value_t = Ties::Reject)]
    pub ties: Ties,
    /// Write the report here instead of stdout.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ties {
    Reject,
    Random,
}

#[derive(Args, Debug)]
pub struct CalibrateArgs {
    #[arg(long)]
    pub kind: CoefficientKind,
    #[arg(long)]
    pub n: usize,
    #[arg(long = "B", default_value_t = 1_000_000)]
    pub b: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Use only the large-n leading constants.
    #[arg(long)]
    pub leading: bool,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
}

#[derive(Args, Debug)]
pub struct MomentsArgs {
    #[arg(long)]
    pub kind: CoefficientKind,
    #[arg(long)]
    pub r: usize,
    #[arg(long)]
    pub n: usize,
    /// Average over all n! permutations instead (n <= 9).
    #[arg(long)]
    pub brute_force: bool,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Subcommand, Debug)]
pub enum ConstantsCmd {
    /// Binomial-basis coefficient Omega_{T,r,b}.
    Omega {
        #[arg(long)]
        kind: CoefficientKind,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        b: usize,
        /// Allow enumerations beyond the default work limit.
        #[arg(long)]
        long_running: bool,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Leading-order mu and v of the q-th power at sample size n.
    Leading {
        #[arg(long)]
        kind: CoefficientKind,
        #[arg(long)]
        q: usize,
        #[arg(long)]
        n: usize,
    },
    /// Spectral constants of a degenerate coefficient.
    Spectral {
        #[arg(long)]
        kind: CoefficientKind,
    },
}

#[derive(Args, Debug)]
pub struct SimCommon {
    #[arg(long, default_value = "rho,tau,D,R,taustar,pearson")]
    pub kinds: String,
    /// Grid points such as 100x50,200x200.
    #[arg(long, default_value = "100x50")]
    pub np: String,
    #[arg(long, default_value_t = 200)]
    pub reps: usize,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Monte Carlo replicates for the degenerate calibrations.
    #[arg(long = "B", default_value_t = 100_000)]
    pub b: usize,
    /// 1000 replicates, B = 10^6 and the four published grid points.
    #[arg(long)]
    pub full_scale: bool,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
    pub format: TableFormat,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableFormat {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum SimulateCmd {
    /// Empirical size under independent margins.
    Size {
        #[command(flatten)]
        common: SimCommon,
        #[arg(long, default_value = "normal,t3,chisq")]
        laws: String,
    },
    /// Power along the number of dependent coordinates k.
    Power {
        #[command(flatten)]
        common: SimCommon,
        /// linear, sine_cuberoot or sine_cubic.
        #[arg(long, default_value = "linear")]
        design: String,
        #[arg(long, default_value = "2,4,6,8,10,12,14,16")]
        ks: String,
    },
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::UnsupportedKind(_) | Error::BadWeights(_) | Error::InfeasibleB(_) => 1,
        Error::BadPermutation { .. } | Error::TooLargeForReference { .. } | Error::NotPositiveDefinite(_) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    if let Some(t) = cli.threads {
        if t == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(1);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(3);
        }
    }
    match std::panic::catch_unwind(|| commands::run(cli.command)) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
        Err(_) => ExitCode::from(3),
    }
}
