mod commands;
mod config;
mod suite;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

/// Exact and Monte Carlo verification of intertwining, duality and orthogonality
/// identities for consistent particle systems.
#[derive(Parser)]
#[command(name = "intertwine", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a suite of checks from a JSON config; writes <name>.json and <name>.csv.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides every sample count in the config.
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Draw Pascal point processes and write their cell counts as CSV.
    SamplePascal {
        /// JSON file with the intensity measure; defaults to the uniform measure of mass --mass.
        #[arg(long)]
        alpha: Option<PathBuf>,
        #[arg(long, default_value_t = 1.0)]
        mass: f64,
        #[arg(long)]
        p: f64,
        /// Number of equal cells of [0,1) to count in.
        #[arg(long, default_value_t = 4)]
        cells: usize,
        #[arg(long, default_value_t = 10_000)]
        draws: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Simulate one labelled gSIP trajectory and write its event log as JSON lines.
    SimulateGsip {
        /// JSON file with `alpha`, `c`, `eta0` and `t_end`.
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tabulate a family of monic orthogonal polynomials as CSV (n, x, value).
    EmitPolynomials {
        #[arg(long, value_enum)]
        family: Family,
        /// Charlier rate.
        #[arg(long)]
        alpha: Option<f64>,
        /// Meixner shape.
        #[arg(long)]
        a: Option<f64>,
        /// Meixner parameter.
        #[arg(long)]
        p: Option<f64>,
        /// Krawtchouk number of trials.
        #[arg(long)]
        trials: Option<u32>,
        /// Krawtchouk success probability.
        #[arg(long)]
        theta: Option<f64>,
        #[arg(long, default_value_t = 5)]
        max_degree: u32,
        #[arg(long, default_value_t = 20)]
        max_x: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Charlier,
    Meixner,
    Krawtchouk,
}

fn init_threads() -> anyhow::Result<()> {
    if let Ok(v) = std::env::var("INTERTWINE_THREADS") {
        let n: usize = v
            .parse()
            .map_err(|_| anyhow::anyhow!("INTERTWINE_THREADS must be a positive integer, got {v:?}"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = init_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    let result = match cli.command {
        Command::Run { config, seed, samples, out } => return suite::run(&config, seed, samples, &out),
        Command::SamplePascal { alpha, mass, p, cells, draws, seed, out } => {
            commands::sample_pascal(alpha.as_deref(), mass, p, cells, draws, seed, out.as_deref())
        }
        Command::SimulateGsip { config, seed, out } => commands::simulate_gsip(&config, seed, out.as_deref()),
        Command::EmitPolynomials { family, alpha, a, p, trials, theta, max_degree, max_x, out } => {
            let params = match family {
                Family::Charlier => alpha
                    .map(|alpha| intertwine::orthopoly::PolyParams::Charlier { alpha })
                    .ok_or_else(|| anyhow::anyhow!("charlier needs --alpha")),
                Family::Meixner => match (a, p) {
                    (Some(a), Some(p)) => Ok(intertwine::orthopoly::PolyParams::Meixner { a, p }),
                    _ => Err(anyhow::anyhow!("meixner needs --a and --p")),
                },
                Family::Krawtchouk => match (trials, theta) {
                    (Some(trials), Some(theta)) => {
                        Ok(intertwine::orthopoly::PolyParams::Krawtchouk { trials, theta })
                    }
                    _ => Err(anyhow::anyhow!("krawtchouk needs --trials and --theta")),
                },
            };
            params.and_then(|params| commands::emit_polynomials(params, max_degree, max_x, out.as_deref()))
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
