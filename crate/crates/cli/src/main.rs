use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use crossings_cli::{cmd_constants, cmd_curve, cmd_orthant, cmd_simulate, cmd_verify, OrthantMethod, VerifyOptions};

#[derive(Parser)]
#[command(name = "crossings", version, about = "Moments of sign changes in stationary Gaussian AR(1) segments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Closed,
    Qmc,
}

#[derive(Subcommand)]
enum Command {
    /// Four-point orthant constants and V(S4) at one correlation.
    Constants {
        #[arg(long, allow_negative_numbers = true)]
        rho: f64,
    },
    /// Exact and IIA variance curves as CSV.
    Curve {
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, allow_negative_numbers = true)]
        rho_min: f64,
        #[arg(long, allow_negative_numbers = true)]
        rho_max: f64,
        #[arg(long)]
        step: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the golden-constant, identity and oracle checks.
    Verify {
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        /// Smaller grids and budgets.
        #[arg(long)]
        fast: bool,
        #[arg(long, hide = true)]
        corrupt_constant: Option<String>,
    },
    /// Monte Carlo estimate of the mean and variance of S_n.
    Simulate {
        #[arg(long)]
        n: usize,
        #[arg(long, allow_negative_numbers = true)]
        rho: f64,
        #[arg(long)]
        paths: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        csv: bool,
    },
    /// Probability of one sign pattern, e.g. 1010.
    Orthant {
        #[arg(long)]
        pattern: String,
        #[arg(long, allow_negative_numbers = true)]
        rho: f64,
        #[arg(long, value_enum, default_value_t = MethodArg::Closed)]
        method: MethodArg,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn fail(e: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let text = match cli.command {
        Command::Constants { rho } => cmd_constants(rho).map_err(anyhow::Error::from),
        Command::Curve { n, rho_min, rho_max, step, out } => cmd_curve(n, rho_min, rho_max, step, &out)
            .map(|rows| format!("wrote {} rows to {}\n", rows.len(), out.display())),
        Command::Verify { tol, fast, corrupt_constant } => {
            let opts = VerifyOptions { tol, fast, corrupt: corrupt_constant };
            return match cmd_verify(&opts) {
                Ok(report) => {
                    print!("{}", report.render());
                    if report.passed() {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(1)
                    }
                }
                Err(e) => fail(e),
            };
        }
        Command::Simulate { n, rho, paths, seed, csv } => cmd_simulate(n, rho, paths, seed, csv).map_err(Into::into),
        Command::Orthant { pattern, rho, method, tol, seed } => {
            let method = match method {
                MethodArg::Closed => OrthantMethod::Closed,
                MethodArg::Qmc => OrthantMethod::Qmc,
            };
            cmd_orthant(&pattern, rho, method, tol, seed).map_err(Into::into)
        }
    };
    match text {
        Ok(t) => {
            print!("{t}");
            ExitCode::SUCCESS
        }
        Err(e) => fail(e),
    }
}
