use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use mginf_polling::commands::{self, Overrides};
use mginf_polling::config::ConfigFile;
use mginf_polling::optimizer::Objective;

/// Analysis, simulation and visit-order optimization of M/G/inf polling systems.
#[derive(Parser)]
#[command(name = "polling", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON config file.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Write the CSV table here.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Master seed, overrides sim.master_seed.
    #[arg(long, global = true, value_name = "U64")]
    seed: Option<u64>,

    /// Measured cycles per replication, overrides sim.measured_cycles.
    #[arg(long, global = true, value_name = "N")]
    cycles: Option<u64>,

    /// Also rank every visiting order (optimize).
    #[arg(long, global = true)]
    brute_force: bool,

    #[arg(long, global = true, value_enum)]
    objective: Option<ObjectiveArg>,

    /// Transform points for analyze, e.g. "0.1,0.5,1".
    #[arg(long, global = true, value_name = "a,b,c")]
    s_grid: Option<String>,

    /// Multiply every validate tolerance by this factor.
    #[arg(long, global = true, default_value_t = 1.0)]
    tolerance_scale: f64,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Exact means, sojourn times and transforms.
    Analyze,
    /// Discrete-event simulation estimates.
    Simulate,
    /// Mean sojourn time along the sweep grid.
    Sweep,
    /// Index-rule visiting order and its throughput.
    Optimize,
    /// Analytic results against simulation and closed forms.
    Validate,
}

#[derive(ValueEnum, Clone, Copy)]
enum ObjectiveArg {
    Max,
    Min,
}

const CONFIG_ERROR: u8 = 2;
const VALIDATION_FAILED: u8 = 1;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(VALIDATION_FAILED),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(CONFIG_ERROR)
        }
    }
}

fn run(cli: &Cli) -> Result<bool, String> {
    if let Ok(v) = std::env::var("POLLING_NUM_THREADS") {
        let threads: usize = v
            .parse()
            .ok()
            .filter(|&t| t > 0)
            .ok_or_else(|| format!("POLLING_NUM_THREADS must be a positive integer, got {v:?}"))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| e.to_string())?;
    }
    let path = cli.config.as_ref().ok_or("--config PATH is required")?;
    let config = ConfigFile::load(path).map_err(|e| e.to_string())?;
    let overrides = Overrides {
        seed: cli.seed,
        cycles: cli.cycles,
        s_grid: cli
            .s_grid
            .as_deref()
            .map(commands::parse_s_grid)
            .transpose()
            .map_err(|e| e.to_string())?,
        objective: cli.objective.map(|o| match o {
            ObjectiveArg::Max => Objective::Max,
            ObjectiveArg::Min => Objective::Min,
        }),
        brute_force: cli.brute_force,
        tolerance_scale: cli.tolerance_scale,
    };
    let output = match cli.command {
        Command::Analyze => commands::analyze(&config, &overrides),
        Command::Simulate => commands::simulate(&config, &overrides),
        Command::Sweep => commands::sweep(&config, &overrides),
        Command::Optimize => commands::optimize(&config, &overrides),
        Command::Validate => commands::validate(&config, &overrides),
    }
    .map_err(|e| e.to_string())?;

    match (&cli.out, &output.csv) {
        (Some(out), Some(csv)) => {
            std::fs::write(out, csv).map_err(|e| format!("cannot write {}: {e}", out.display()))?;
            print!("{}", output.text);
        }
        (None, Some(csv)) if matches!(cli.command, Command::Sweep) => print!("{csv}"),
        _ => print!("{}", output.text),
    }
    Ok(output.success)
}
