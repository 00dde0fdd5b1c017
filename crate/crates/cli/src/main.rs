//! Configuration-driven command line for biased subgradient experiments:
//! single runs, eps/alpha sweeps, the verification battery, and the catalog
//! listing.
//!
//! Exit codes: 0 on success, 1 when a check or run fails, 2 on config or
//! usage errors.

mod config;
mod output;
mod verify;

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use subgrad::analysis::{fluctuation, sweep, SweepCell, SweepConfig as AnalysisSweep};
use subgrad::catalog;
use subgrad::solver::run;

use config::{config_hash, parse_run_config, parse_sweep_config, Pairing};
use output::{write_json, write_sweep_csv, write_trajectory_csv, StampedReport};

#[derive(Debug)]
pub enum CliError {
    /// Bad configuration, unknown names, unusable paths: exit code 2.
    Config(String),
    /// A run diverged or a verification check failed: exit code 1.
    Check(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "config error: {msg}"),
            CliError::Check(msg) => write!(f, "check failure: {msg}"),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "subgrad",
    version,
    about = "Biased subgradient experiments on nonsmooth test functions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output directory for CSV/JSON artifacts.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Overrides the seed in the config file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for sweep cells (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment from a config file; writes a trajectory CSV and a
    /// fluctuation report JSON.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run an eps/alpha sweep; writes the sweep table CSV and the fit JSON.
    Sweep {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run a verification suite and write its JSON report.
    Verify { suite: String },
    /// List catalog functions and their metadata as JSON.
    Catalog,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        // Ignore failure: the global pool may already exist in tests.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global();
    }
    let result = match &cli.command {
        Command::Run { config } => cmd_run(config, &cli),
        Command::Sweep { config } => cmd_sweep(config, &cli),
        Command::Verify { suite } => cmd_verify(suite, &cli),
        Command::Catalog => cmd_catalog(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e @ CliError::Check(_)) => {
            eprintln!("{e}");
            ExitCode::from(1)
        }
        Err(e @ CliError::Config(_)) => {
            eprintln!("{e}");
            ExitCode::from(2)
        }
    }
}

fn read_config(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))
}

fn ensure_out_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir)
        .map_err(|e| CliError::Config(format!("cannot create {}: {e}", dir.display())))
}

fn cmd_run(config_path: &Path, cli: &Cli) -> Result<(), CliError> {
    let mut config = parse_run_config(&read_config(config_path)?)?;
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    let hash = config_hash(&config);
    let f = config::resolve_function(&config.function)?;
    let traj = run(
        f,
        &config.x0,
        &config.schedule,
        &config.bias,
        config.iterations,
        config.seed,
    )
    .map_err(|e| CliError::Check(e.to_string()))?;
    let report = fluctuation(
        f,
        &traj,
        config.bias.epsilon,
        config.burn_in_fraction,
        &config.schedule,
    )
    .map_err(|e| CliError::Check(e.to_string()))?;

    ensure_out_dir(&cli.out)?;
    let stem = config.output_stem.clone().unwrap_or_else(|| config.function.clone());
    let csv_path = cli.out.join(format!("{stem}_trajectory.csv"));
    let json_path = cli.out.join(format!("{stem}_fluctuation.json"));
    write_trajectory_csv(&csv_path, &traj, &hash)?;
    write_json(
        &json_path,
        &StampedReport {
            config_hash: hash,
            seed: config.seed,
            function: config.function.clone(),
            body: output::FluctuationFile { report },
        },
    )?;
    println!("wrote {} and {}", csv_path.display(), json_path.display());
    Ok(())
}

fn cmd_sweep(config_path: &Path, cli: &Cli) -> Result<(), CliError> {
    let mut config = parse_sweep_config(&read_config(config_path)?)?;
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    let hash = config_hash(&config);
    let f = config::resolve_function(&config.function)?;
    let bias_kind = config::resolve_bias_kind(&config.bias_kind)?;

    let cells: Vec<SweepCell> = match config.pairing {
        Pairing::Zip => config
            .epsilons
            .iter()
            .zip(&config.alphas)
            .map(|(&epsilon, &alpha)| SweepCell { epsilon, alpha })
            .collect(),
        Pairing::Cross => config
            .epsilons
            .iter()
            .flat_map(|&epsilon| {
                config.alphas.iter().map(move |&alpha| SweepCell { epsilon, alpha })
            })
            .collect(),
        Pairing::EpsSqOverTen => config
            .epsilons
            .iter()
            .map(|&epsilon| SweepCell { epsilon, alpha: epsilon * epsilon / 10.0 })
            .collect(),
    };

    // The theoretical exponent enters the one-sided comparison when the
    // entry has certified constants.
    let rho = match (f.kl, f.mr) {
        (Some(kl), Some(mr)) => {
            subgrad::analysis::rho_exponent(kl.theta, mr.beta).ok().map(|(r, _)| r)
        }
        _ => None,
    };
    let analysis_config = AnalysisSweep {
        function: f,
        bias_kind,
        x0: config.x0.clone(),
        iterations: config.iterations,
        burn_in_fraction: config.burn_in_fraction,
        seed: config.seed,
        rho,
    };
    let table = sweep(&analysis_config, &cells).map_err(|e| CliError::Check(e.to_string()))?;
    if table.fitted_slope.is_none() {
        eprintln!(
            "warning: fit refused (need >= 3 distinct converged epsilon values); table still written"
        );
    }

    ensure_out_dir(&cli.out)?;
    let stem = config
        .output_stem
        .clone()
        .unwrap_or_else(|| format!("{}_sweep", config.function));
    let csv_path = cli.out.join(format!("{stem}.csv"));
    let json_path = cli.out.join(format!("{stem}_fit.json"));
    write_sweep_csv(&csv_path, &table, &hash)?;
    write_json(
        &json_path,
        &StampedReport {
            config_hash: hash,
            seed: config.seed,
            function: config.function.clone(),
            body: table,
        },
    )?;
    println!("wrote {} and {}", csv_path.display(), json_path.display());
    Ok(())
}

fn cmd_verify(suite: &str, cli: &Cli) -> Result<(), CliError> {
    let report = verify::run_suite(suite)?;
    for c in &report.checks {
        println!(
            "{}: {} (max violation {:.3e}) — {}",
            c.name,
            if c.passed { "PASS" } else { "FAIL" },
            c.max_violation,
            c.detail
        );
    }
    ensure_out_dir(&cli.out)?;
    let path = cli.out.join(format!("verify_{suite}.json"));
    write_json(&path, &report)?;
    println!("wrote {}", path.display());
    if report.passed {
        Ok(())
    } else {
        Err(CliError::Check(format!("suite {suite} has failing checks")))
    }
}

fn cmd_catalog() -> Result<(), CliError> {
    let summaries: Vec<_> = catalog::catalog().iter().map(|f| f.summary()).collect();
    let text = serde_json::to_string_pretty(&summaries)
        .map_err(|e| CliError::Config(format!("cannot serialize catalog: {e}")))?;
    println!("{text}");
    Ok(())
}
