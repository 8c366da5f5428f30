use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod cmd;
mod out;

use cmd::Failure;

#[derive(Parser, Debug)]
#[command(name = "detour", version, about = "Facility placement around an obstacle: mechanisms, incentive checks and bounds")]
struct Cli {
    #[command(flatten)]
    config: RunConfig,

    #[command(subcommand)]
    command: Command,
}

/// Settings shared by every command.
#[derive(Args, Debug, Clone)]
pub struct RunConfig {
    /// Base seed for every random draw.
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,

    /// Worker threads. `DETOUR_WORKERS` takes precedence when set.
    #[arg(long, global = true, default_value_t = 1)]
    pub workers: usize,

    /// Gains at or below this do not count as violations.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,

    /// Offset of the near-obstacle locations in the lower-bound profiles.
    #[arg(long, global = true, default_value_t = 1e-6)]
    pub eps: f64,

    /// Write results here instead of standard output.
    #[arg(short, long, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one mechanism on an instance file.
    Solve {
        #[arg(short, long)]
        mechanism: String,
        #[arg(short, long)]
        input: PathBuf,
        #[arg(long, default_value = "mc")]
        objective: String,
    },
    /// Search random instances for incentive violations.
    Verify(VerifyArgs),
    /// Lower-bound tables, bound curves and gap statistics.
    Bounds {
        #[command(subcommand)]
        what: BoundsCommand,
    },
    /// Worst approximation ratio over seeded random instances.
    Ratio {
        #[arg(short, long)]
        mechanism: String,
        #[arg(long, default_value = "mc")]
        objective: String,
        #[arg(long, default_value_t = 0.0)]
        k: f64,
        #[arg(long = "L", default_value_t = 0.0)]
        length: f64,
        #[arg(long, default_value_t = 10_000)]
        budget: u64,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Property {
    /// Single-agent misreports.
    Sp,
    /// Coalition misreports (size 2 unless --coalition says otherwise).
    Gsp,
    /// Output unchanged by same-side moves that do not cross it.
    Mono,
    /// Agent costs single-peaked along each coordinate.
    Peaked,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    pub property: Property,
    /// Mechanism name; not needed for `peaked`.
    #[arg(short, long)]
    pub mechanism: Option<String>,
    /// Number of random instances.
    #[arg(long, default_value_t = 1000)]
    pub trials: u64,
    /// Misreport grid points per agent; random moves (`mono`) or edge
    /// pairs (`peaked`) per instance.
    #[arg(long, default_value_t = 200)]
    pub grid: usize,
    #[arg(long)]
    pub coalition: Option<usize>,
    /// Misreports may land on either side of the obstacle.
    #[arg(long)]
    pub cross_region: bool,
    /// Check this instance file instead of random ones.
    #[arg(short, long)]
    pub input: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum BoundsCommand {
    /// Grid-search lower bound per k.
    Table {
        #[arg(long, default_value_t = 0.0)]
        k_start: f64,
        #[arg(long, default_value_t = 0.99)]
        k_end: f64,
        #[arg(long, default_value_t = 0.01)]
        k_step: f64,
        #[arg(long, default_value_t = 1000)]
        grid: usize,
        #[arg(long, default_value = "fixed05")]
        o_mode: String,
        /// Report grid cells whose profiles have out-of-order extremes.
        #[arg(long)]
        verbose: bool,
    },
    /// Upper and lower bound curves over k in [0, 1).
    Curves {
        #[arg(long, default_value_t = 0.001)]
        k_step: f64,
        /// Add the safe grid-search bound (slow).
        #[arg(long)]
        with_computer_lb: bool,
        #[arg(long, default_value_t = 1000)]
        grid: usize,
    },
    /// Largest deterministic and randomized gaps between upper and lower bounds.
    Gaps {
        /// k step of the randomized comparison.
        #[arg(long, default_value_t = 0.001)]
        k_step: f64,
        /// k step of the grid-search table behind the deterministic gap.
        #[arg(long, default_value_t = 0.01)]
        table_step: f64,
        #[arg(long, default_value_t = 1000)]
        grid: usize,
    },
}

fn workers(config: &RunConfig) -> Result<usize, Failure> {
    let n = match std::env::var("DETOUR_WORKERS") {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map_err(|_| Failure::usage(format!("DETOUR_WORKERS must be a positive integer, got `{v}`")))?,
        Err(_) => config.workers,
    };
    if n == 0 {
        return Err(Failure::usage("worker count must be positive"));
    }
    Ok(n)
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers(&cli.config)?)
        .build()
        .map_err(|e| Failure::other(e.to_string()))?;
    let config = cli.config;
    pool.install(|| match cli.command {
        Command::Solve {
            mechanism,
            input,
            objective,
        } => cmd::solve(&config, &mechanism, &input, &objective),
        Command::Verify(args) => cmd::verify(&config, &args),
        Command::Bounds { what } => match what {
            BoundsCommand::Table {
                k_start,
                k_end,
                k_step,
                grid,
                o_mode,
                verbose,
            } => cmd::bounds_table(&config, k_start, k_end, k_step, grid, &o_mode, verbose),
            BoundsCommand::Curves {
                k_step,
                with_computer_lb,
                grid,
            } => cmd::bounds_curves(&config, k_step, with_computer_lb, grid),
            BoundsCommand::Gaps {
                k_step,
                table_step,
                grid,
            } => cmd::bounds_gaps(&config, k_step, table_step, grid),
        },
        Command::Ratio {
            mechanism,
            objective,
            k,
            length,
            budget,
        } => cmd::ratio(&config, &mechanism, &objective, k, length, budget),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
