use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rank3eq::commands::{self, EXIT_INPUT};
use rank3eq_core::{DegeneracyPolicy, SolveConfig};

/// Solve the general linear rank-3 tensor equation in four dimensions.
#[derive(Parser)]
#[command(name = "rank3eq", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct Tolerances {
    /// Relative determinant gate: refuse when |det| < tol · max|entry|^n.
    #[arg(long, env = "RANK3EQ_TOL_DET", default_value_t = 1e-9)]
    tol_det: f64,
    /// Largest accepted relative residual ‖L(N) − B‖ / ‖B‖.
    #[arg(long, env = "RANK3EQ_TOL_RESIDUAL", default_value_t = 1e-9)]
    tol_residual: f64,
}

impl Tolerances {
    fn config(self) -> SolveConfig {
        SolveConfig {
            policy: DegeneracyPolicy {
                det_rel: self.tol_det,
                ..DegeneracyPolicy::default()
            },
            residual_tol: self.tol_residual,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance with the structured method and write a report.
    Solve {
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        tol: Tolerances,
        /// Print determinants and stage timings to stderr.
        #[arg(short, long)]
        verbose: bool,
    },
    /// Solve with both methods (or against a golden report) and compare.
    Verify {
        input: PathBuf,
        /// Compare against this report instead of running the oracle.
        #[arg(long)]
        against: Option<PathBuf>,
        #[command(flatten)]
        tol: Tolerances,
    },
    /// Report Γ, A and operator determinants without solving.
    Check {
        input: PathBuf,
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        tol: Tolerances,
    },
    /// Emit a reproducible random instance.
    Random {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        /// `euclidean` or `minkowski`.
        #[arg(long, default_value = "minkowski")]
        metric: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Time the structured and brute-force solvers on random instances.
    Bench {
        #[arg(long, default_value_t = 1000)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write one row per instance to this CSV file.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        tol: Tolerances,
    },
    /// Solve by brute force on the 64×64 operator and write a report.
    Oracle {
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> anyhow::Result<i32> {
    let out = &mut std::io::stdout().lock();
    match cli.command {
        Command::Solve {
            input,
            output,
            tol,
            verbose,
        } => commands::cmd_solve(&input, output.as_deref(), &tol.config(), verbose, out),
        Command::Verify {
            input,
            against,
            tol,
        } => commands::cmd_verify(&input, against.as_deref(), &tol.config(), out),
        Command::Check { input, json, tol } => {
            commands::cmd_check(&input, json, &tol.config().policy, out)
        }
        Command::Random {
            seed,
            scale,
            metric,
            output,
        } => commands::cmd_random(seed, scale, &metric, output.as_deref(), out),
        Command::Bench {
            count,
            seed,
            csv,
            json,
            tol,
        } => commands::cmd_bench(count, seed, &tol.config(), csv.as_deref(), json, out),
        Command::Oracle { input, output } => commands::cmd_oracle(&input, output.as_deref(), out),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INPUT as u8)
        }
    }
}
