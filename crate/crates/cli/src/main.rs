//! `chainmetric`: generate sample spaces, compute chain metrics and their
//! limits, and run the claims table.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

/// Chain metrics and discrete length metrics on finite metric spaces.
///
/// Spaces are given as a JSON space file written by `gen`, or inline as a
/// generator with parameters, e.g. `--space "y-spider k=64 h=1/512"`.
/// Set CHAINMETRIC_THREADS to cap parallelism.
#[derive(Debug, Parser)]
#[command(name = "chainmetric", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a sample space and write it as JSON.
    Gen(GenArgs),
    /// Chain metric d_eps for one pair or all pairs.
    Chain(ChainArgs),
    /// Estimate the discrete length metric d_0 along a decreasing eps schedule.
    D0(D0Args),
    /// Iterate the chain operator over a list of levels.
    Iterate(IterateArgs),
    /// Length of a polyline given in a JSON path file.
    Length(LengthArgs),
    /// Waypoints at multiples of delta along a minimizing chain.
    Waypoints(WaypointArgs),
    /// Run the claims table at a preset scale.
    Verify(VerifyArgs),
    /// Sweep d_eps over grids of h and eps and write CSV.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
struct GenArgs {
    /// Generator: comb, y-spider, x-rectifiable, slit-plane, rational-grid,
    /// multi-edge-graph or yn-tower.
    generator: String,
    /// Parameters as key=value, e.g. k=64 h=1/512.
    params: Vec<String>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct ChainArgs {
    #[arg(long)]
    space: String,
    #[arg(long)]
    eps: String,
    /// Landmark name or point id.
    #[arg(long, requires = "target")]
    source: Option<String>,
    #[arg(long, requires = "source")]
    target: Option<String>,
    /// Only steps admitted by the generator's path predicate.
    #[arg(long)]
    constrained: bool,
    /// All-pairs matrix output: `.csv` for CSV, anything else for DMX.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also print the witness chain for a pair as a JSON id array.
    #[arg(long)]
    witness: bool,
}

#[derive(Debug, Args)]
struct D0Args {
    #[arg(long)]
    space: String,
    /// Two landmarks or ids, e.g. p,q.
    #[arg(long, default_value = "p,q")]
    pair: String,
    /// Strictly decreasing eps values, e.g. 1/8,1/16,1/32.
    #[arg(long)]
    schedule: String,
    #[arg(long, default_value_t = chainmetric::chains::DEFAULT_RTOL)]
    rtol: f64,
    #[arg(long)]
    constrained: bool,
    /// Print the report as JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct IterateArgs {
    #[arg(long)]
    space: String,
    /// eps of each level, e.g. 1/64,1/4,1/4.
    #[arg(long)]
    levels: String,
    #[arg(long, default_value = "p,q")]
    pair: String,
    /// Build each level from the previous one literally (memory heavy).
    #[arg(long)]
    nested: bool,
}

#[derive(Debug, Args)]
struct LengthArgs {
    #[arg(long)]
    path: PathBuf,
}

#[derive(Debug, Args)]
struct WaypointArgs {
    #[arg(long)]
    space: String,
    #[arg(long)]
    eps: String,
    #[arg(long, default_value = "p,q")]
    pair: String,
    #[arg(long)]
    delta: String,
    #[arg(long)]
    constrained: bool,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// smoke, desk or full.
    #[arg(long)]
    preset: String,
    /// JSON report path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Criterion numbers to run, e.g. 1,4,9.
    #[arg(long)]
    only: Option<String>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Generator with parameters, e.g. "y-spider k=64 h=1/512"; h is
    /// replaced by each value of the h grid.
    #[arg(long)]
    space_spec: String,
    #[arg(long)]
    eps_grid: String,
    #[arg(long)]
    h_grid: String,
    #[arg(long, default_value = "p,q")]
    pair: String,
    #[arg(long)]
    constrained: bool,
    #[arg(long)]
    csv: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = commands::init_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    let result = match cli.command {
        Command::Gen(a) => commands::gen(&a.generator, &a.params, &a.out),
        Command::Chain(a) => commands::chain(
            &a.space,
            &a.eps,
            a.source.as_deref().zip(a.target.as_deref()),
            a.constrained,
            a.out.as_deref(),
            a.witness,
        ),
        Command::D0(a) => commands::d0(
            &a.space,
            &a.pair,
            &a.schedule,
            a.rtol,
            a.constrained,
            a.json,
        ),
        Command::Iterate(a) => commands::iterate(&a.space, &a.levels, &a.pair, a.nested),
        Command::Length(a) => commands::length(&a.path),
        Command::Waypoints(a) => {
            commands::waypoints(&a.space, &a.eps, &a.pair, &a.delta, a.constrained, a.json)
        }
        Command::Verify(a) => commands::verify(&a.preset, a.out.as_deref(), a.only.as_deref()),
        Command::Sweep(a) => commands::sweep(
            &a.space_spec,
            &a.eps_grid,
            &a.h_grid,
            &a.pair,
            a.constrained,
            &a.csv,
        ),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
