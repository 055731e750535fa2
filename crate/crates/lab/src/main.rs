use std::path::PathBuf;
use std::process::ExitCode;

use adaptscale::suite::{gen_traces, run_fhopt_ab, run_matrix, run_sensitivity};
use adaptscale::ExperimentConfig;
use anyhow::Context;
use clap::{Parser, Subcommand};

/// Deterministic autoscaling lab: HPA vs MPC under cold starts.
#[derive(Parser)]
#[command(name = "adaptscale", version)]
struct Cli {
    /// TOML config; every field is optional and defaults are filled in.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides `out_dir`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Comma-separated seeds (overrides `seeds`).
    #[arg(long, global = true, value_delimiter = ',')]
    seeds: Option<Vec<u64>>,
    /// Per-event cold-start jitter fraction; 0 disables jitter.
    #[arg(long, global = true)]
    jitter: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Every policy × workload × seed at the configured cold start.
    RunMatrix,
    /// Every policy at each cold-start level.
    Sweep {
        /// Comma-separated archetypes to sweep (overrides `sensitivity.archetypes`).
        #[arg(long, value_delimiter = ',')]
        archetypes: Option<Vec<String>>,
    },
    /// Adaptive horizon against a fixed horizon, paired by seed.
    Abtest,
    /// Write the demand traces as CSV with checksums.
    GenTraces,
    /// Print the fully resolved config as TOML.
    ShowConfig,
}

fn load(cli: &Cli) -> anyhow::Result<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(out) = &cli.out {
        cfg.out_dir = out.clone();
    }
    if let Some(seeds) = &cli.seeds {
        cfg.seeds = seeds.clone();
    }
    if let Some(j) = cli.jitter {
        cfg.set_jitter(j);
    }
    if let Command::Sweep { archetypes: Some(a) } = &cli.command {
        cfg.sensitivity.archetypes = a.clone();
    }
    cfg.validate().context("invalid configuration after applying flags")?;
    Ok(cfg)
}

fn execute(cli: &Cli) -> anyhow::Result<()> {
    let cfg = load(cli)?;
    match &cli.command {
        Command::RunMatrix => {
            let out = run_matrix(&cfg)?;
            println!("{} cells -> {}", out.cells.len(), out.dir.display());
        }
        Command::Sweep { .. } => {
            let out = run_sensitivity(&cfg)?;
            println!("{} cells -> {}", out.suite.cells.len(), out.suite.dir.display());
        }
        Command::Abtest => {
            let out = run_fhopt_ab(&cfg)?;
            for c in &out.ab.comparisons {
                let test = c.test.map_or_else(
                    || "no test (fewer than two pairs)".to_string(),
                    |t| format!("W = {}, p = {:.4}", t.statistic_w, t.p_value),
                );
                println!("{}: adaptive {:.4} vs fixed {:.4}, {test}", c.workload, c.mean_adaptive, c.mean_fixed);
                if let Some(caveat) = &c.power_caveat {
                    println!("  caveat: {caveat}");
                }
            }
            println!("{} cells -> {}", out.suite.cells.len(), out.suite.dir.display());
        }
        Command::GenTraces => {
            let files = gen_traces(&cfg)?;
            println!("{} traces -> {}", files.len(), cfg.out_dir.join("traces").display());
        }
        Command::ShowConfig => print!("{}", cfg.to_toml()),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
