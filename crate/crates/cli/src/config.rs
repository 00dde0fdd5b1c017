//! Experiment configuration files: a single TOML tree per command.
//!
//! The schema is documented in the repository README. Fields reference the
//! catalog by name; the seed is mandatory so every output is reproducible.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use subgrad::catalog::{self, CatalogFunction};
use subgrad::solver::{BiasModel, StepSchedule};

use crate::CliError;

fn default_burn_in() -> f64 {
    0.5
}

/// Configuration of a single run (subcommand `run`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub function: String,
    pub x0: Vec<f64>,
    pub iterations: usize,
    pub seed: u64,
    #[serde(default = "default_burn_in")]
    pub burn_in_fraction: f64,
    pub schedule: StepSchedule,
    pub bias: BiasModel,
    /// Basename for output files; defaults to the function name.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_stem: Option<String>,
}

/// How the eps and alpha grids combine into sweep cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pairing {
    /// Pair epsilons[i] with alphas[i].
    Zip,
    /// Every epsilon with every alpha.
    Cross,
    /// alpha = eps^2 / 10 per cell; `alphas` stays empty.
    EpsSqOverTen,
}

/// Configuration of an eps/alpha sweep (subcommand `sweep`). Cells use
/// constant steps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub function: String,
    pub x0: Vec<f64>,
    pub iterations: usize,
    pub seed: u64,
    #[serde(default = "default_burn_in")]
    pub burn_in_fraction: f64,
    /// One of "none", "adversarial", "random_bounded".
    pub bias_kind: String,
    pub epsilons: Vec<f64>,
    #[serde(default)]
    pub alphas: Vec<f64>,
    pub pairing: Pairing,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_stem: Option<String>,
}

pub fn parse_run_config(text: &str) -> Result<RunConfig, CliError> {
    let config: RunConfig =
        toml::from_str(text).map_err(|e| CliError::Config(format!("bad run config: {e}")))?;
    validate_common(&config.function, &config.x0, config.iterations, config.burn_in_fraction)?;
    Ok(config)
}

pub fn parse_sweep_config(text: &str) -> Result<SweepConfig, CliError> {
    let config: SweepConfig =
        toml::from_str(text).map_err(|e| CliError::Config(format!("bad sweep config: {e}")))?;
    validate_common(&config.function, &config.x0, config.iterations, config.burn_in_fraction)?;
    if config.epsilons.is_empty() {
        return Err(CliError::Config("sweep needs a nonempty epsilon grid".into()));
    }
    if config.epsilons.iter().any(|e| !(*e > 0.0)) {
        return Err(CliError::Config("sweep epsilons must be positive".into()));
    }
    match config.pairing {
        Pairing::Zip if config.alphas.len() != config.epsilons.len() => {
            return Err(CliError::Config(format!(
                "zip pairing needs matching grids, got {} epsilons and {} alphas",
                config.epsilons.len(),
                config.alphas.len()
            )));
        }
        Pairing::Cross if config.alphas.is_empty() => {
            return Err(CliError::Config("cross pairing needs a nonempty alpha grid".into()));
        }
        Pairing::EpsSqOverTen if !config.alphas.is_empty() => {
            return Err(CliError::Config(
                "eps_sq_over_ten pairing derives alphas; leave the alpha grid empty".into(),
            ));
        }
        _ => {}
    }
    resolve_bias_kind(&config.bias_kind)?;
    Ok(config)
}

fn validate_common(
    function: &str,
    x0: &[f64],
    iterations: usize,
    burn_in_fraction: f64,
) -> Result<(), CliError> {
    let f = resolve_function(function)?;
    if x0.len() != f.dim {
        return Err(CliError::Config(format!(
            "x0 has dimension {}, {} needs {}",
            x0.len(),
            f.name,
            f.dim
        )));
    }
    if iterations == 0 {
        return Err(CliError::Config("iterations must be >= 1".into()));
    }
    if !(0.0..1.0).contains(&burn_in_fraction) {
        return Err(CliError::Config(format!(
            "burn_in_fraction must be in [0, 1), got {burn_in_fraction}"
        )));
    }
    Ok(())
}

pub fn resolve_function(name: &str) -> Result<&'static CatalogFunction, CliError> {
    catalog::by_name(name).ok_or_else(|| {
        CliError::Config(format!(
            "unknown function {name:?}; valid names: {}",
            catalog::names().join(", ")
        ))
    })
}

pub fn resolve_bias_kind(kind: &str) -> Result<fn(f64) -> BiasModel, CliError> {
    fn none_at(epsilon: f64) -> BiasModel {
        BiasModel { kind: subgrad::solver::BiasKind::None, epsilon }
    }
    match kind {
        "none" => Ok(none_at),
        "adversarial" => Ok(BiasModel::adversarial),
        "random_bounded" => Ok(BiasModel::random_bounded),
        other => Err(CliError::Config(format!(
            "unknown bias kind {other:?}; expected none, adversarial, or random_bounded"
        ))),
    }
}

/// Hash of the resolved configuration (after any seed override); stamped
/// into every output file.
pub fn config_hash<T: Serialize>(config: &T) -> String {
    let canonical = toml::to_string(config).expect("configs serialize");
    let digest = Sha256::digest(canonical.as_bytes());
    digest[..8].iter().map(|b| format!("{b:02x}")).collect()
}
