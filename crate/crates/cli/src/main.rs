use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use mmwave_assoc::config::ExperimentConfig;
use mmwave_assoc::experiment::run_experiment;
use mmwave_assoc::figures::{run_figure, FigureOptions, DEFAULT_FIGURE_RUNS};
use mmwave_assoc::matching::{deferred_acceptance, describe, mmq_match, verify, MatchingInstance};

/// Cell association simulator for mixed mmW/uW networks.
#[derive(Parser)]
#[command(version, args_conflicts_with_subcommands = true)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args)]
struct RunArgs {
    /// Experiment config (TOML).
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Independent runs per grid point.
    #[arg(long)]
    runs: Option<usize>,
    /// Base seed; run i uses seed + i.
    #[arg(long)]
    seed: Option<u64>,
    /// Output file (or directory for figures).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the canned sweep for one figure and write <out>/<id>.csv.
    Figure {
        #[arg(value_parser = ["fig3", "fig4", "fig5", "fig6", "fig7"])]
        id: String,
        #[command(flatten)]
        common: Common,
    },
    /// Solve a text matching instance and print the verifier report.
    Match {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = Algorithm::Mmq)]
        algorithm: Algorithm,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Algorithm {
    Mmq,
    Da,
}

fn simulate(args: RunArgs) -> anyhow::Result<()> {
    let Some(path) = args.config else {
        bail!("--config is required (or use the `figure` / `match` subcommands)");
    };
    let mut cfg = ExperimentConfig::load(&path)?;
    let c = args.common;
    if let Some(n) = c.runs {
        cfg.n_runs = n;
    }
    if let Some(s) = c.seed {
        cfg.scenario.seed = s;
    }
    if let Some(o) = c.out {
        cfg.output = o;
    }
    if let Some(w) = c.workers {
        cfg.workers = w;
    }
    let summary = run_experiment(&cfg)?;
    println!("wrote {}", summary.rows_path.display());
    println!("wrote {}", summary.aggregate_path.display());
    Ok(())
}

fn figure(id: &str, c: Common) -> anyhow::Result<()> {
    let opts = FigureOptions {
        n_runs: c.runs.unwrap_or(DEFAULT_FIGURE_RUNS),
        seed: c.seed.unwrap_or(0),
        workers: c.workers.unwrap_or(0),
        out_dir: c.out.unwrap_or_else(|| PathBuf::from(".")),
    };
    let path = run_figure(id, &opts)?;
    println!("wrote {}", path.display());
    Ok(())
}

/// Returns whether the matching passed every check.
fn solve(path: &PathBuf, algorithm: Algorithm) -> anyhow::Result<bool> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let instance: MatchingInstance = text.parse()?;
    let matching = match algorithm {
        Algorithm::Mmq => mmq_match(&instance)?,
        Algorithm::Da => deferred_acceptance(&instance),
    };
    let report = verify(&instance, &matching)?;
    print!("{}", describe(&matching, &report));
    Ok(report.feasible && report.is_stable() && report.pareto_optimal != Some(false))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let outcome = match cli.command {
        None => simulate(cli.run).map(|()| true),
        Some(Command::Figure { id, common }) => figure(&id, common).map(|()| true),
        Some(Command::Match { instance, algorithm }) => solve(&instance, algorithm),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            log::error!("{e:#}");
            ExitCode::from(2)
        }
    }
}
