//! CSV and JSON writers. Floats are printed with Rust's shortest
//! round-trip formatting, so identical inputs produce byte-identical files.

use std::fs;
use std::path::Path;

use serde::Serialize;

use subgrad::analysis::{FluctuationReport, SweepTable};
use subgrad::solver::Trajectory;

use crate::CliError;

fn fmt(v: f64) -> String {
    format!("{v}")
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents)
        .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))
}

/// Trajectory CSV: k, alpha_k, state components, objective value, oracle
/// components. The final row has no step or oracle.
pub fn write_trajectory_csv(
    path: &Path,
    traj: &Trajectory,
    config_hash: &str,
) -> Result<(), CliError> {
    let dim = traj.points[0].len();
    let mut out = String::new();
    out.push_str(&format!("# config_hash={config_hash} seed={}\n", traj.seed));
    out.push_str("k,alpha_k");
    for i in 0..dim {
        out.push_str(&format!(",x_{i}"));
    }
    out.push_str(",f");
    for i in 0..dim {
        out.push_str(&format!(",v_{i}"));
    }
    out.push('\n');
    for k in 0..traj.points.len() {
        out.push_str(&k.to_string());
        out.push(',');
        if k < traj.steps.len() {
            out.push_str(&fmt(traj.steps[k]));
        }
        for x in &traj.points[k] {
            out.push(',');
            out.push_str(&fmt(*x));
        }
        out.push(',');
        out.push_str(&fmt(traj.values[k]));
        for i in 0..dim {
            out.push(',');
            if k < traj.oracle_vectors.len() {
                out.push_str(&fmt(traj.oracle_vectors[k][i]));
            }
        }
        out.push('\n');
    }
    write_file(path, &out)
}

#[derive(Serialize)]
pub struct StampedReport<T: Serialize> {
    pub config_hash: String,
    pub seed: u64,
    pub function: String,
    #[serde(flatten)]
    pub body: T,
}

pub fn write_json<T: Serialize>(path: &Path, report: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(report)
        .map_err(|e| CliError::Config(format!("cannot serialize report: {e}")))?;
    text.push('\n');
    write_file(path, &text)
}

#[derive(Serialize)]
pub struct FluctuationFile {
    pub report: FluctuationReport,
}

/// Sweep CSV: one row per cell; diverged cells keep empty measurement
/// columns and carry the status flag.
pub fn write_sweep_csv(path: &Path, table: &SweepTable, config_hash: &str) -> Result<(), CliError> {
    let mut out = String::new();
    out.push_str(&format!("# config_hash={config_hash}\n"));
    out.push_str("epsilon,alpha,radius,value_dist,status\n");
    for row in &table.rows {
        out.push_str(&fmt(row.epsilon));
        out.push(',');
        out.push_str(&fmt(row.alpha));
        out.push(',');
        if !row.diverged {
            out.push_str(&fmt(row.radius));
        }
        out.push(',');
        if !row.diverged {
            out.push_str(&fmt(row.value_dist));
        }
        out.push(',');
        out.push_str(if row.diverged { "diverged" } else { "ok" });
        out.push('\n');
    }
    write_file(path, &out)
}
