//! Discrete biased subgradient recursion x_{k+1} = x_k - alpha_k v(x_k),
//! where v(x) sits within epsilon of the Clarke subdifferential.
//!
//! The subgradient selection is the min-norm element; it is deterministic,
//! matches the selection used by the continuous-time flow, and makes the
//! adversarial bias model the natural worst case.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::{CatalogError, CatalogFunction};
use crate::vecmath::{add_scaled, is_finite, norm, scale};

/// Iterates whose norm exceeds this are treated as divergent.
pub const DIVERGENCE_GUARD: f64 = 1e8;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("trajectory diverged at step {step}")]
    Diverged {
        step: usize,
        partial: Box<Trajectory>,
    },
}

/// Oracle perturbation rule; the produced offset b always has ||b|| <= epsilon,
/// so the oracle output s + b stays within epsilon of the subdifferential.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BiasKind {
    None,
    /// Constant offset epsilon * direction for a fixed unit direction.
    Fixed { direction: Vec<f64> },
    /// Opposes descent: -epsilon * s/||s||, or epsilon * e1 when s = 0.
    Adversarial,
    /// Uniform draw from the epsilon-ball, seeded per run.
    RandomBounded,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiasModel {
    #[serde(flatten)]
    pub kind: BiasKind,
    pub epsilon: f64,
}

impl BiasModel {
    pub fn new(kind: BiasKind, epsilon: f64) -> Result<Self, SolverError> {
        if !(epsilon >= 0.0) || !epsilon.is_finite() {
            return Err(SolverError::InvalidConfig(format!(
                "bias epsilon must be finite and nonnegative, got {epsilon}"
            )));
        }
        if let BiasKind::Fixed { direction } = &kind {
            let n = norm(direction);
            if !((n - 1.0).abs() <= 1e-9) {
                return Err(SolverError::InvalidConfig(format!(
                    "fixed bias direction must be a unit vector, got norm {n}"
                )));
            }
        }
        Ok(Self { kind, epsilon })
    }

    pub fn none() -> Self {
        Self { kind: BiasKind::None, epsilon: 0.0 }
    }

    pub fn adversarial(epsilon: f64) -> Self {
        Self { kind: BiasKind::Adversarial, epsilon }
    }

    pub fn random_bounded(epsilon: f64) -> Self {
        Self { kind: BiasKind::RandomBounded, epsilon }
    }
}

/// Mutable bias state threaded through a run (only the random kind has any).
#[derive(Debug, Clone)]
pub struct BiasState {
    rng: Option<ChaCha8Rng>,
}

impl BiasState {
    pub fn new(model: &BiasModel, seed: u64) -> Self {
        let rng = match model.kind {
            BiasKind::RandomBounded => Some(ChaCha8Rng::seed_from_u64(seed)),
            _ => None,
        };
        Self { rng }
    }

    fn perturbation(&mut self, model: &BiasModel, s: &[f64]) -> Vec<f64> {
        let eps = model.epsilon;
        let dim = s.len();
        match &model.kind {
            BiasKind::None => vec![0.0; dim],
            BiasKind::Fixed { direction } => scale(eps, direction),
            BiasKind::Adversarial => {
                let n = norm(s);
                if n > 0.0 {
                    scale(-eps / n, s)
                } else {
                    let mut b = vec![0.0; dim];
                    b[0] = eps;
                    b
                }
            }
            BiasKind::RandomBounded => {
                if eps == 0.0 {
                    return vec![0.0; dim];
                }
                let rng = self.rng.as_mut().expect("random bias carries a generator");
                loop {
                    let b: Vec<f64> = (0..dim).map(|_| rng.gen_range(-eps..=eps)).collect();
                    if norm(&b) <= eps {
                        return b;
                    }
                }
            }
        }
    }
}

/// Step-size schedules of the recursion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StepSchedule {
    /// alpha_k = alpha for all k.
    Constant { alpha: f64 },
    /// alpha_k = 1/sqrt(horizon + 1) for every k up to the horizon.
    SqrtHorizon { horizon: usize },
    /// alpha_k = alpha0 / (k + 1).
    OneOverK { alpha0: f64 },
    /// Explicit positive step list.
    Explicit { steps: Vec<f64> },
}

impl StepSchedule {
    pub fn validate(&self, iterations: usize) -> Result<(), SolverError> {
        let bad = |msg: String| Err(SolverError::InvalidConfig(msg));
        match self {
            StepSchedule::Constant { alpha } if !(alpha > &0.0) => {
                bad(format!("constant step must be positive, got {alpha}"))
            }
            StepSchedule::OneOverK { alpha0 } if !(alpha0 > &0.0) => {
                bad(format!("one_over_k alpha0 must be positive, got {alpha0}"))
            }
            StepSchedule::Explicit { steps } => {
                if steps.len() < iterations {
                    bad(format!(
                        "explicit schedule has {} steps, run needs {iterations}",
                        steps.len()
                    ))
                } else if steps.iter().any(|a| !(a > &0.0)) {
                    bad("explicit schedule contains a nonpositive step".into())
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }

    pub fn step(&self, k: usize) -> f64 {
        match self {
            StepSchedule::Constant { alpha } => *alpha,
            StepSchedule::SqrtHorizon { horizon } => 1.0 / ((*horizon as f64) + 1.0).sqrt(),
            StepSchedule::OneOverK { alpha0 } => alpha0 / (k as f64 + 1.0),
            StepSchedule::Explicit { steps } => steps[k],
        }
    }
}

/// One finished run of the recursion.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    /// x_0 .. x_K.
    pub points: Vec<Vec<f64>>,
    /// f(x_0) .. f(x_K).
    pub values: Vec<f64>,
    /// Oracle outputs v(x_0) .. v(x_{K-1}).
    pub oracle_vectors: Vec<Vec<f64>>,
    /// Steps alpha_0 .. alpha_{K-1}.
    pub steps: Vec<f64>,
    pub seed: u64,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn horizon(&self) -> f64 {
        self.steps.iter().sum()
    }

    pub fn max_step(&self) -> f64 {
        self.steps.iter().copied().fold(0.0, f64::max)
    }
}

/// Deterministic subgradient selection: the min-norm element of the
/// subdifferential.
pub fn select_subgradient(f: &CatalogFunction, x: &[f64]) -> Result<Vec<f64>, SolverError> {
    Ok(f.clarke(x)?.min_norm_element())
}

/// Biased oracle output s + b with dist(s + b, subdiff f(x)) <= epsilon.
pub fn biased_oracle(
    f: &CatalogFunction,
    x: &[f64],
    bias: &BiasModel,
    state: &mut BiasState,
) -> Result<Vec<f64>, SolverError> {
    let s = select_subgradient(f, x)?;
    let b = state.perturbation(bias, &s);
    Ok(s.iter().zip(&b).map(|(si, bi)| si + bi).collect())
}

/// Runs the recursion for `iterations` steps from x0. The trajectory is
/// bit-reproducible given (config, seed). A non-finite value or an iterate
/// beyond the divergence guard aborts with the partial trajectory attached.
pub fn run(
    f: &CatalogFunction,
    x0: &[f64],
    schedule: &StepSchedule,
    bias: &BiasModel,
    iterations: usize,
    seed: u64,
) -> Result<Trajectory, SolverError> {
    if iterations == 0 {
        return Err(SolverError::InvalidConfig("iteration count must be >= 1".into()));
    }
    if !is_finite(x0) {
        return Err(SolverError::InvalidConfig("x0 must be finite".into()));
    }
    schedule.validate(iterations)?;
    if x0.len() != f.dim {
        return Err(CatalogError::DimensionMismatch { expected: f.dim, got: x0.len() }.into());
    }

    let mut state = BiasState::new(bias, seed);
    let mut traj = Trajectory {
        points: Vec::with_capacity(iterations + 1),
        values: Vec::with_capacity(iterations + 1),
        oracle_vectors: Vec::with_capacity(iterations),
        steps: Vec::with_capacity(iterations),
        seed,
    };
    let mut x = x0.to_vec();
    traj.points.push(x.clone());
    traj.values.push(f.eval(&x)?);

    for k in 0..iterations {
        let alpha = schedule.step(k);
        let v = biased_oracle(f, &x, bias, &mut state)?;
        x = add_scaled(&x, -alpha, &v);
        let value = f.eval(&x)?;
        traj.oracle_vectors.push(v);
        traj.steps.push(alpha);
        traj.points.push(x.clone());
        traj.values.push(value);
        if !is_finite(&x) || !value.is_finite() || norm(&x) > DIVERGENCE_GUARD {
            return Err(SolverError::Diverged { step: k, partial: Box::new(traj) });
        }
    }
    Ok(traj)
}
