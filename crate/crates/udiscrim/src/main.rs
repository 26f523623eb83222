use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use udiscrim::cli;
use udiscrim::Tolerances;

/// Decide whether and how multipartite unitary gates can be perfectly
/// discriminated, and simulate the LOCC protocol that does it.
#[derive(Parser)]
#[command(name = "udiscrim", version, about)]
struct Cli {
    /// Scale factor applied to every default tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Classify a gate as Product, ProductSwap, PartitionPrimitive or
    /// Imprimitive.
    Classify { gate: PathBuf },
    /// Minimal parallel run count for perfect discrimination of two gates.
    Minruns {
        u: PathBuf,
        v: PathBuf,
        /// Extend both gates by an ancilla block of this many levels.
        #[arg(long)]
        embed: Option<usize>,
        /// Evaluate the product-input criterion on W = U†V (W must factor).
        #[arg(long)]
        local_product: bool,
        /// Search cap on the run count.
        #[arg(long, default_value_t = 12)]
        max_n: usize,
    },
    /// Canonical (Cartan) decomposition of a two-qubit gate.
    Kak { gate: PathBuf },
    /// Simulate the LOCC discrimination protocol against a hidden gate.
    Simulate {
        /// Gate files; the hidden gate is drawn among them per trial.
        #[arg(required = true, num_args = 2..)]
        gates: Vec<PathBuf>,
        /// choi | parallel | pipeline2q | eliminate
        #[arg(long)]
        strategy: String,
        /// Base seed; defaults to UDISCRIM_SEED, then 0.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 1)]
        trials: usize,
        /// Write the per-trial transcript log here.
        #[arg(long)]
        log: Option<PathBuf>,
    },
    /// Lie-algebra closure dimension and matched party partition.
    LieClosure { gate: PathBuf },
}

fn main() -> ExitCode {
    let args = Cli::parse();
    let tol = match args.tol {
        Some(f) => Tolerances::scaled(f),
        None => Tolerances::default(),
    };
    let echo = std::env::args().skip(1).collect::<Vec<_>>().join(" ");
    let outcome = match &args.cmd {
        Cmd::Classify { gate } => cli::cmd_classify(gate, echo, &tol),
        Cmd::Minruns {
            u,
            v,
            embed,
            local_product,
            max_n,
        } => cli::cmd_minruns(u, v, *embed, *local_product, *max_n, echo, &tol),
        Cmd::Kak { gate } => cli::cmd_kak(gate, echo, &tol),
        Cmd::Simulate {
            gates,
            strategy,
            seed,
            trials,
            log,
        } => {
            let seed = seed.unwrap_or_else(|| {
                std::env::var("UDISCRIM_SEED")
                    .ok()
                    .and_then(|s| s.parse().ok())
                    .unwrap_or(0)
            });
            cli::cmd_simulate(gates, strategy, seed, *trials, log.as_deref(), echo, &tol)
        }
        Cmd::LieClosure { gate } => cli::cmd_lie_closure(gate, echo, &tol),
    };
    match outcome {
        Ok(report) => {
            println!("{}", report.to_json());
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(cli::exit_code(&err) as u8)
        }
    }
}
