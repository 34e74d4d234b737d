//! Command-line front end for the horseshoe shrinkage library.
//!
//! Five subcommands cover the workflow: `estimate` (posterior summaries
//! for observed data), `simulate` (replicated risk curves), `gibbs`
//! (full posterior sampling), `verify` (numeric certification of the
//! closed-form inequalities), and `rates` (risk against the minimax
//! reference across problem sizes).
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or input
//! error, 3 numerical failure. All outputs are CSV and byte-identical
//! across runs with equal flags; parallelism never enters the output
//! order. Set `RAYON_NUM_THREADS` to cap worker threads.

mod commands;
mod csvio;

use clap::{Parser, Subcommand, ValueEnum};
use horseshoe::Error;
use std::path::PathBuf;

/// Failure classes carrying the exit-code contract.
pub enum Failure {
    /// Bad flags or malformed input: exit 2.
    Usage(String),
    /// A certification suite found a violated inequality: exit 1.
    Verification(String),
    /// The numerics gave up (quadrature, series, or sampler): exit 3.
    Numeric(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Verification(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Numeric(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Verification(m) | Failure::Numeric(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        fn is_usage(e: &Error) -> bool {
            match e {
                Error::Domain(_) => true,
                Error::Replicate { source, .. } => is_usage(source),
                _ => false,
            }
        }
        if is_usage(&e) {
            Failure::Usage(e.to_string())
        } else {
            Failure::Numeric(e.to_string())
        }
    }
}

#[derive(Parser)]
#[command(
    name = "horseshoe",
    version,
    about = "Horseshoe shrinkage estimation for sparse normal means"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Posterior mean, variance, and shrinkage weight for a column of
    /// observations.
    Estimate {
        /// CSV with a single column `y`.
        #[arg(long)]
        input: PathBuf,
        /// Known noise standard deviation.
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        /// Scale choice: `eb`, `oracle:n:p[:log]`, or `fixed:v`.
        #[arg(long, default_value = "eb")]
        tau: String,
        /// Threshold constant for `eb` (threshold sqrt(c1 sigma^2 log n)).
        #[arg(long, default_value_t = 2.0)]
        c1: f64,
        /// Count divisor for `eb`.
        #[arg(long, default_value_t = 1.0)]
        c2: f64,
        /// Keep the raw `eb` estimate instead of clamping into [1/n, 1].
        #[arg(long)]
        no_truncate: bool,
        #[arg(long)]
        output: PathBuf,
    },
    /// Replicated squared-error risk over a grid of signal amplitudes.
    Simulate {
        #[arg(long, default_value_t = 400)]
        n: usize,
        /// Number of signal coordinates.
        #[arg(long, default_value_t = 20)]
        p: usize,
        /// Amplitudes: `lo..hi` (integers, inclusive) or a comma list.
        #[arg(long = "A-range", default_value = "1..10")]
        a_range: String,
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        /// Comma list: `eb[:c1:c2[:raw]]`, `oracle[:log]`, `fixed:v`,
        /// `gibbs[:iterations:burn_in]`, `gibbs-trunc[:iterations:burn_in]`.
        #[arg(long, default_value = "eb,gibbs")]
        estimators: String,
        #[arg(long, default_value_t = 100)]
        replicates: usize,
        #[arg(long, default_value_t = horseshoe::DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        output: PathBuf,
    },
    /// Full posterior sampling; writes `<prefix>_theta_mean.csv` and
    /// `<prefix>_tau_samples.csv`.
    Gibbs {
        /// CSV with a single column `y`.
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        /// Total sweeps, including burn-in.
        #[arg(long, default_value_t = 6000)]
        iterations: usize,
        #[arg(long, default_value_t = 1000)]
        burn_in: usize,
        #[arg(long, default_value_t = horseshoe::DEFAULT_SEED)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = TauPriorArg::HalfCauchy)]
        tau_prior: TauPriorArg,
        #[arg(long)]
        output_prefix: String,
    },
    /// Numeric certification of the closed-form inequalities; exits 1 if
    /// any grid point fails.
    Verify {
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        #[arg(long)]
        output: PathBuf,
    },
    /// Risk of the oracle plug-in against the minimax reference across
    /// problem sizes.
    Rates {
        /// Comma list of problem sizes.
        #[arg(long, default_value = "200,400,800")]
        n_list: String,
        /// `sqrt`, `constant:K`, or `fraction:F`.
        #[arg(long, default_value = "sqrt")]
        p_rule: String,
        #[arg(long, value_enum, default_value_t = TauVariantArg::Plain)]
        tau_variant: TauVariantArg,
        #[arg(long, default_value_t = 100)]
        replicates: usize,
        #[arg(long, default_value_t = horseshoe::DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        output: PathBuf,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    All,
    /// Integral envelopes on the standard grid.
    Envelopes,
    /// Closed-form posterior-mean bounds.
    MeanBounds,
    /// Variance range and the bounded-shrinkage gap.
    Shrinkage,
    /// Small-tau integral approximations.
    Asymptotics,
    /// Gaussian-tail and Chernoff count bounds.
    TailBound,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TauPriorArg {
    HalfCauchy,
    /// Half-Cauchy restricted to (0, 1].
    Truncated,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TauVariantArg {
    /// tau = p/n.
    Plain,
    /// tau = (p/n) sqrt(log(n/p)).
    Log,
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Estimate { input, sigma, tau, c1, c2, no_truncate, output } => {
            commands::run_estimate(&commands::EstimateArgs {
                input,
                sigma,
                tau,
                c1,
                c2,
                no_truncate,
                output,
            })
        }
        Command::Simulate { n, p, a_range, sigma, estimators, replicates, seed, output } => {
            commands::run_simulate(&commands::SimulateArgs {
                n,
                p,
                a_range,
                sigma,
                estimators,
                replicates,
                seed,
                output,
            })
        }
        Command::Gibbs { input, sigma, iterations, burn_in, seed, tau_prior, output_prefix } => {
            commands::run_gibbs(&commands::GibbsArgs {
                input,
                sigma,
                iterations,
                burn_in,
                seed,
                tau_prior,
                output_prefix,
            })
        }
        Command::Verify { suite, output } => {
            commands::run_verify(&commands::VerifyArgs { suite, output })
        }
        Command::Rates { n_list, p_rule, tau_variant, replicates, seed, output } => {
            commands::run_rates(&commands::RatesArgs {
                n_list,
                p_rule,
                tau_variant,
                replicates,
                seed,
                output,
            })
        }
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(f) = dispatch(cli) {
        eprintln!("error: {}", f.message());
        std::process::exit(f.code());
    }
}
