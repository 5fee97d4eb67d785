use std::path::PathBuf;
use std::process::ExitCode;

use betaflow::jobs::{self, Job, OracleJob, SftEmit, PRECISION_ENV};
use betaflow::{Error, Variant};
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "betaflow", version, about = "Symbolic dynamics of intermediate beta-transformations")]
struct Cli {
    /// Ball precision in bits for inexact inputs
    #[arg(long, global = true, env = PRECISION_ENV, default_value_t = 64, value_parser = clap::value_parser!(u32).range(16..=65536))]
    precision: u32,
    /// Write the artifact here instead of standard output
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

/// β as `poly:c0,c1,...[@lo,hi]`, `rat:p/q`, `dec:x` or a rational; α as a
/// rational, `dec:x` or `expr:` in b.
#[derive(clap::Args, Debug)]
struct System {
    #[arg(long, allow_hyphen_values = true)]
    beta: String,
    #[arg(long, allow_hyphen_values = true)]
    alpha: String,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Side {
    Upper,
    Lower,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Emit {
    Dot,
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Itinerary of a point
    Expand {
        #[command(flatten)]
        system: System,
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        x: String,
        #[arg(long, value_enum, default_value = "upper")]
        variant: Side,
        /// Exact period search budget
        #[arg(long, default_value_t = 64)]
        steps: usize,
    },
    /// Kneading invariants and their validity
    Kneading {
        #[command(flatten)]
        system: System,
    },
    /// Parameters realising a kneading pair
    Solve {
        #[arg(long)]
        lower: String,
        #[arg(long)]
        upper: String,
    },
    /// Conjugate greedy system with a hole; optional A/B membership of ξ
    Conjugate {
        #[command(flatten)]
        system: System,
        #[arg(long)]
        xi: Option<String>,
    },
    /// Markov partition and adjacency of a finite-type system
    Sft {
        #[command(flatten)]
        system: System,
        #[arg(long, value_enum, default_value = "json")]
        emit: Emit,
    },
    /// Survivor-set dimension on an evenly spaced grid of holes
    Sweep {
        #[command(flatten)]
        system: System,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        /// Word-counting depth for the second estimate
        #[arg(long, default_value_t = 30)]
        depth: usize,
        #[arg(long, default_value = "9/10")]
        t_max: String,
        #[arg(long, default_value_t = 64)]
        lyndon_bound: usize,
        /// Also write a plotting script for the CSV
        #[arg(long)]
        plot_script: Option<PathBuf>,
    },
    /// Bifurcation-set membership of a hole, or the critical hole
    Bifurcation {
        #[command(flatten)]
        system: System,
        #[arg(long, allow_hyphen_values = true)]
        t: Option<String>,
        #[arg(long)]
        critical: bool,
        #[arg(long, default_value_t = 64)]
        depth: usize,
    },
    /// Finite-type parameters approximating a system from inside
    ApproxSft {
        #[command(flatten)]
        system: System,
        #[arg(long, default_value_t = 3)]
        n: usize,
    },
    /// Winning-set certificate at a point
    Winning {
        #[command(flatten)]
        system: System,
        #[arg(long, default_value = "0")]
        xi: String,
        #[arg(long, default_value = "1/2")]
        gamma: String,
        #[arg(long, default_value_t = 8)]
        depth: usize,
    },
    /// Independent numerical cross-checks
    Oracle {
        #[command(subcommand)]
        oracle: Oracle,
    },
}

#[derive(Subcommand, Debug)]
enum Oracle {
    /// Number of admissible words of each length up to n
    Language {
        #[command(flatten)]
        system: System,
        #[arg(long, default_value_t = 12)]
        n: usize,
    },
    /// Box-counting dimension of the survivor set
    BoxCount {
        #[command(flatten)]
        system: System,
        #[arg(long, allow_hyphen_values = true)]
        t: String,
        #[arg(long, default_value_t = 1 << 16)]
        grid: usize,
        #[arg(long, default_value_t = 40)]
        steps: usize,
    },
    /// Monte Carlo fraction of orbits entering the hole
    Escape {
        #[command(flatten)]
        system: System,
        #[arg(long, allow_hyphen_values = true)]
        t: String,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, default_value_t = 1000)]
        steps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn job(command: Command) -> Job {
    match command {
        Command::Expand { system: System { beta, alpha }, x, variant, steps } => {
            let variant = match variant {
                Side::Upper => Variant::Upper,
                Side::Lower => Variant::Lower,
            };
            Job::Expand { beta, alpha, x, variant, steps }
        }
        Command::Kneading { system: System { beta, alpha } } => Job::Kneading { beta, alpha },
        Command::Solve { lower, upper } => Job::Solve { lower, upper },
        Command::Conjugate { system: System { beta, alpha }, xi } => Job::Conjugate { beta, alpha, xi },
        Command::Sft { system: System { beta, alpha }, emit } => {
            let emit = match emit {
                Emit::Dot => SftEmit::Dot,
                Emit::Csv => SftEmit::Csv,
                Emit::Json => SftEmit::Json,
            };
            Job::Sft { beta, alpha, emit }
        }
        Command::Sweep { system: System { beta, alpha }, samples, depth, t_max, lyndon_bound, .. } => {
            Job::Sweep { beta, alpha, samples, depth, t_max, lyndon_bound }
        }
        Command::Bifurcation { system: System { beta, alpha }, t, critical, depth } => {
            Job::Bifurcation { beta, alpha, t, critical, depth }
        }
        Command::ApproxSft { system: System { beta, alpha }, n } => Job::ApproxSft { beta, alpha, n },
        Command::Winning { system: System { beta, alpha }, xi, gamma, depth } => {
            Job::Winning { beta, alpha, xi, gamma, depth }
        }
        Command::Oracle { oracle } => Job::Oracle(match oracle {
            Oracle::Language { system: System { beta, alpha }, n } => OracleJob::Language { beta, alpha, n },
            Oracle::BoxCount { system: System { beta, alpha }, t, grid, steps } => {
                OracleJob::BoxCount { beta, alpha, t, grid, steps }
            }
            Oracle::Escape { system: System { beta, alpha }, t, samples, steps, seed } => {
                OracleJob::Escape { beta, alpha, t, samples, steps, seed }
            }
        }),
    }
}

/// Usage-level failures exit with 2, domain failures with 1.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidParams(_) | Error::Parse(_) => 2,
        _ => 1,
    }
}

fn write(path: &PathBuf, body: &str) -> Result<(), Error> {
    std::fs::write(path, body).map_err(|e| Error::Parse(format!("cannot write {}: {e}", path.display())))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let plot = match &cli.command {
        Command::Sweep { plot_script, .. } => plot_script.clone(),
        _ => None,
    };
    let result = jobs::run(&job(cli.command), cli.precision).and_then(|a| {
        match &cli.out {
            Some(path) => write(path, &a.body)?,
            None => print!("{}", a.body),
        }
        if let Some(script) = plot {
            let csv = cli.out.as_ref().map_or_else(|| "sweep.csv".to_string(), |p| p.display().to_string());
            write(&script, &jobs::sweep_plot_script(&csv))?;
        }
        Ok(())
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.code());
            ExitCode::from(exit_code(&e))
        }
    }
}
