//! Experiment-level verification: fluctuation radii against the C eps^rho
//! law, eps-sweeps with slope fits, the convex averaged-iterate bound, the
//! coercive error bound, the Ekeland witness search, and level repulsion.
//!
//! Tail suprema over the final half of a long run stand in for the limsup
//! quantities; the abstract constants C and eps-bar are never asserted, only
//! one-sided slope comparisons and the existence of a finite constant making
//! the bound hold on the grid.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::catalog::{
    dist_to_components, dist_to_sorted_values, CatalogError, CatalogFunction, ErrorBoundParams,
    GridSpec,
};
use crate::solver::{run, BiasModel, SolverError, StepSchedule, Trajectory};
use crate::vecmath::norm;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error("solver failed: {0}")]
    Solver(String),
    #[error("domain violation: {0}")]
    Domain(String),
    #[error("the bound is undefined: {0}")]
    BoundUndefined(String),
    #[error("check inapplicable: {0}")]
    Inapplicable(String),
}

impl From<SolverError> for AnalysisError {
    fn from(e: SolverError) -> Self {
        match e {
            SolverError::Catalog(c) => AnalysisError::Catalog(c),
            other => AnalysisError::Solver(other.to_string()),
        }
    }
}

/// Which side of max{theta(beta + 2), 1} determined the exponent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RhoBranch {
    ThetaTerm,
    One,
}

/// rho = beta / max{theta(beta + 2), 1}.
pub fn rho_exponent(theta: f64, beta: f64) -> Result<(f64, RhoBranch), AnalysisError> {
    if !(0.0..1.0).contains(&theta) {
        return Err(AnalysisError::Domain(format!("theta must be in [0, 1), got {theta}")));
    }
    if !(beta > 0.0) {
        return Err(AnalysisError::Domain(format!("beta must be positive, got {beta}")));
    }
    let t = theta * (beta + 2.0);
    if t > 1.0 {
        Ok((beta / t, RhoBranch::ThetaTerm))
    } else {
        Ok((beta, RhoBranch::One))
    }
}

/// Tail statistics of one run.
#[derive(Debug, Clone, Serialize)]
pub struct FluctuationReport {
    pub burn_in: usize,
    /// sup over the tail of dist(x_k, crit f).
    pub radius: f64,
    /// sup over the tail of dist(f(x_k), vcrit_eps f).
    pub value_dist: f64,
    pub epsilon: f64,
    pub schedule: String,
}

/// Tail suprema after discarding the first `burn_in_fraction` of the run.
/// The eps-critical value set is the analytic one at eps = 0 and the default
/// grid approximation otherwise.
pub fn fluctuation(
    f: &CatalogFunction,
    traj: &Trajectory,
    epsilon: f64,
    burn_in_fraction: f64,
    schedule: &StepSchedule,
) -> Result<FluctuationReport, AnalysisError> {
    let vcrit = vcrit_values(f, epsilon, &GridSpec::default_for_dim(f.dim))?;
    fluctuation_with_values(f, traj, epsilon, burn_in_fraction, schedule, &vcrit)
}

/// Same as [`fluctuation`] with a precomputed eps-critical value list, for
/// sweeps that reuse one grid scan across cells.
pub fn fluctuation_with_values(
    f: &CatalogFunction,
    traj: &Trajectory,
    epsilon: f64,
    burn_in_fraction: f64,
    schedule: &StepSchedule,
    vcrit: &[f64],
) -> Result<FluctuationReport, AnalysisError> {
    if !(0.0..1.0).contains(&burn_in_fraction) {
        return Err(AnalysisError::Domain(format!(
            "burn-in fraction must be in [0, 1), got {burn_in_fraction}"
        )));
    }
    let burn_in = ((traj.len() as f64) * burn_in_fraction).floor() as usize;
    let mut radius = 0.0f64;
    let mut value_dist = 0.0f64;
    for (x, v) in traj.points[burn_in..].iter().zip(&traj.values[burn_in..]) {
        radius = radius.max(f.dist_to_crit(x)?);
        value_dist = value_dist.max(dist_to_sorted_values(vcrit, *v));
    }
    Ok(FluctuationReport {
        burn_in,
        radius,
        value_dist,
        epsilon,
        schedule: schedule_label(schedule),
    })
}

fn schedule_label(s: &StepSchedule) -> String {
    match s {
        StepSchedule::Constant { alpha } => format!("constant({alpha})"),
        StepSchedule::SqrtHorizon { horizon } => format!("sqrt_horizon({horizon})"),
        StepSchedule::OneOverK { alpha0 } => format!("one_over_k({alpha0})"),
        StepSchedule::Explicit { steps } => format!("explicit({} steps)", steps.len()),
    }
}

fn vcrit_values(
    f: &CatalogFunction,
    epsilon: f64,
    grid: &GridSpec,
) -> Result<Vec<f64>, AnalysisError> {
    if epsilon == 0.0 {
        let mut v = f.crit_values.clone();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Ok(v)
    } else {
        Ok(f.vcrit_eps_approx(epsilon, grid)?.values().to_vec())
    }
}

/// One sweep cell: a bias level paired with a constant step.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SweepCell {
    pub epsilon: f64,
    pub alpha: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub epsilon: f64,
    pub alpha: f64,
    pub radius: f64,
    pub value_dist: f64,
    pub diverged: bool,
}

/// Sweep results with the log radius vs log eps fit.
#[derive(Debug, Clone, Serialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    /// OLS slope of log radius against log eps over converged rows.
    pub fitted_slope: Option<f64>,
    /// exp(intercept) of the same regression.
    pub fitted_c: Option<f64>,
    /// Smallest C with radius <= C eps^rho across converged rows, at the
    /// requested rho; finite iff the one-sided bound is satisfiable.
    pub bound_c: Option<f64>,
    pub rho: Option<f64>,
    /// Fit verdict: slope >= rho - 0.1 and a finite bound constant exist.
    pub consistent: Option<bool>,
}

pub struct SweepConfig<'a> {
    pub function: &'a CatalogFunction,
    pub bias_kind: fn(f64) -> BiasModel,
    pub x0: Vec<f64>,
    pub iterations: usize,
    pub burn_in_fraction: f64,
    pub seed: u64,
    /// Theoretical exponent for the one-sided comparison, when known.
    pub rho: Option<f64>,
}

/// Runs one cell per (eps, alpha) pair in parallel and fits the scaling law.
/// A fit needs at least 3 distinct eps values; diverged cells are flagged
/// and excluded.
pub fn sweep(config: &SweepConfig, cells: &[SweepCell]) -> Result<SweepTable, AnalysisError> {
    // One grid scan per distinct eps, shared across cells.
    let mut eps_values: Vec<f64> = cells.iter().map(|c| c.epsilon).collect();
    eps_values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    eps_values.dedup();
    let grid = GridSpec::default_for_dim(config.function.dim);
    let vcrit_sets: Vec<(f64, Vec<f64>)> = eps_values
        .par_iter()
        .map(|&eps| Ok((eps, vcrit_values(config.function, eps, &grid)?)))
        .collect::<Result<_, AnalysisError>>()?;

    let rows: Vec<SweepRow> = cells
        .par_iter()
        .enumerate()
        .map(|(idx, cell)| {
            let schedule = StepSchedule::Constant { alpha: cell.alpha };
            let bias = (config.bias_kind)(cell.epsilon);
            let seed = config.seed.wrapping_add(idx as u64);
            match run(
                config.function,
                &config.x0,
                &schedule,
                &bias,
                config.iterations,
                seed,
            ) {
                Ok(traj) => {
                    let vcrit = &vcrit_sets
                        .iter()
                        .find(|(e, _)| *e == cell.epsilon)
                        .expect("every cell eps was scanned")
                        .1;
                    let report = fluctuation_with_values(
                        config.function,
                        &traj,
                        cell.epsilon,
                        config.burn_in_fraction,
                        &schedule,
                        vcrit,
                    )?;
                    Ok(SweepRow {
                        epsilon: cell.epsilon,
                        alpha: cell.alpha,
                        radius: report.radius,
                        value_dist: report.value_dist,
                        diverged: false,
                    })
                }
                Err(SolverError::Diverged { .. }) => Ok(SweepRow {
                    epsilon: cell.epsilon,
                    alpha: cell.alpha,
                    radius: f64::NAN,
                    value_dist: f64::NAN,
                    diverged: true,
                }),
                Err(e) => Err(AnalysisError::from(e)),
            }
        })
        .collect::<Result<_, AnalysisError>>()?;

    let fit_rows: Vec<SweepRow> = rows
        .iter()
        .filter(|r| !r.diverged && r.radius > 0.0)
        .cloned()
        .collect();
    let mut distinct: Vec<f64> = fit_rows.iter().map(|r| r.epsilon).collect();
    distinct.sort_by(|a, b| a.partial_cmp(b).unwrap());
    distinct.dedup();

    let mut table = SweepTable {
        rows,
        fitted_slope: None,
        fitted_c: None,
        bound_c: None,
        rho: config.rho,
        consistent: None,
    };
    if distinct.len() < 3 {
        return Ok(table);
    }
    let xs: Vec<f64> = fit_rows.iter().map(|r| r.epsilon.ln()).collect();
    let ys: Vec<f64> = fit_rows.iter().map(|r| r.radius.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    table.fitted_slope = Some(slope);
    table.fitted_c = Some(intercept.exp());
    if let Some(rho) = config.rho {
        let bound_c = fit_rows
            .iter()
            .map(|r| r.radius / r.epsilon.powf(rho))
            .fold(0.0f64, f64::max);
        table.bound_c = Some(bound_c);
        table.consistent = Some(slope >= rho - 0.1 && bound_c.is_finite());
    }
    Ok(table)
}

/// Both sides of the convex averaged-iterate bound.
#[derive(Debug, Clone, Serialize)]
pub struct ConvexBoundCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub weighted_mean_gap: f64,
    pub min_gap: f64,
    pub holds: bool,
}

/// Evaluates
/// (2 - a - eps c) sum a_i (f(x_i) - f*) / sum a_i
///   <= (1 - a)(eps c)^{1/(1-a)} + (||x0 - x*||^2 + (L + eps)^2 sum a_i^2) / sum a_i
/// on a finished run. For a = 1 the first right-hand term is 0 when
/// eps c < 1 and the bound is undefined otherwise.
pub fn convex_bound(
    lipschitz: f64,
    epsilon: f64,
    eb: &ErrorBoundParams,
    x0_dist: f64,
    f_star: f64,
    steps: &[f64],
    values: &[f64],
) -> Result<ConvexBoundCheck, AnalysisError> {
    if steps.len() != values.len() || steps.is_empty() {
        return Err(AnalysisError::Domain(format!(
            "need matching nonempty steps/values, got {} and {}",
            steps.len(),
            values.len()
        )));
    }
    let ec = epsilon * eb.c;
    let head_term = if eb.a == 1.0 {
        if ec >= 1.0 {
            return Err(AnalysisError::BoundUndefined(format!(
                "a = 1 requires eps*c < 1, got {ec}"
            )));
        }
        0.0
    } else {
        (1.0 - eb.a) * ec.powf(1.0 / (1.0 - eb.a))
    };
    let sum_a: f64 = steps.iter().sum();
    let sum_a_sq: f64 = steps.iter().map(|a| a * a).sum();
    let weighted: f64 = steps.iter().zip(values).map(|(a, v)| a * (v - f_star)).sum();
    let weighted_mean_gap = weighted / sum_a;
    let min_gap = values
        .iter()
        .map(|v| v - f_star)
        .fold(f64::INFINITY, f64::min);
    let lhs = (2.0 - eb.a - ec) * weighted_mean_gap;
    let le = lipschitz + epsilon;
    let rhs = head_term + (x0_dist * x0_dist + le * le * sum_a_sq) / sum_a;
    Ok(ConvexBoundCheck {
        lhs,
        rhs,
        weighted_mean_gap,
        min_gap,
        holds: lhs <= rhs + 1e-9,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct NumericLemmaCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// g(delta) = s delta^t - delta <= -(1 - t)(delta - s^{1/(1-t)}).
pub fn numeric_lemma_check(s: f64, t: f64, delta: f64) -> Result<NumericLemmaCheck, AnalysisError> {
    if !(s > 0.0) || !(0.0 < t && t < 1.0) || !(delta >= 0.0) {
        return Err(AnalysisError::Domain(format!(
            "need s > 0, t in (0, 1), delta >= 0; got s={s}, t={t}, delta={delta}"
        )));
    }
    let lhs = s * delta.powf(t) - delta;
    let rhs = -(1.0 - t) * (delta - s.powf(1.0 / (1.0 - t)));
    Ok(NumericLemmaCheck { lhs, rhs, holds: lhs <= rhs + 1e-12 })
}

/// Max over grid nodes of dist(x, argmin) - c/2 ((f - min)^a + (f - min)).
pub fn error_bound_check(
    f: &CatalogFunction,
    grid: &GridSpec,
    eb: &ErrorBoundParams,
) -> Result<f64, AnalysisError> {
    let argmin = f
        .argmin
        .as_ref()
        .ok_or_else(|| AnalysisError::Inapplicable(format!("{} has no argmin data", f.name)))?;
    let mut max_violation = f64::NEG_INFINITY;
    let mut failure: Option<CatalogError> = None;
    grid.for_each_node(f.dim, |x, _| {
        if failure.is_some() {
            return;
        }
        match f.eval(x) {
            Ok(v) => {
                let gap = v - f.min_value;
                let lhs = dist_to_components(argmin, x);
                let rhs = eb.c / 2.0 * (gap.powf(eb.a) + gap);
                max_violation = max_violation.max(lhs - rhs);
            }
            Err(e) => failure = Some(e),
        }
    });
    if let Some(e) = failure {
        return Err(e.into());
    }
    Ok(max_violation)
}

/// Outcome of the Ekeland witness search.
#[derive(Debug, Clone, Serialize)]
pub struct EkelandWitness {
    pub witness: Option<Vec<f64>>,
    /// Best grid candidate (minimal combined constraint violation).
    pub best_candidate: Vec<f64>,
    pub best_violation: f64,
}

/// Exhaustive grid search for y with ||y|| >= ||x|| - ||x||^a (up to one
/// grid cell) and dist(0, subdiff f(y)) ||x||^a <= f(x) - inf f.
pub fn ekeland_witness(
    f: &CatalogFunction,
    x: &[f64],
    a: f64,
    grid: &GridSpec,
) -> Result<EkelandWitness, AnalysisError> {
    if !(0.0 < a && a < 1.0) {
        return Err(AnalysisError::Domain(format!("need a in (0, 1), got {a}")));
    }
    let xn = norm(x);
    let pow = xn.powf(a);
    let gap = f.eval(x)? - f.min_value;
    let cell_diag = grid.cell() * (f.dim as f64).sqrt();
    let mut witness: Option<Vec<f64>> = None;
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut failure: Option<CatalogError> = None;
    grid.for_each_node(f.dim, |y, _| {
        if witness.is_some() || failure.is_some() {
            return;
        }
        let sub = match f.clarke(y) {
            Ok(p) => p.dist_origin(),
            Err(e) => {
                failure = Some(e);
                return;
            }
        };
        let norm_deficit = (xn - pow - cell_diag) - norm(y);
        let sub_excess = sub * pow - gap;
        let violation = norm_deficit.max(0.0) + sub_excess.max(0.0);
        if violation <= 1e-12 {
            witness = Some(y.to_vec());
        }
        if best.as_ref().is_none_or(|(v, _)| violation < *v) {
            best = Some((violation, y.to_vec()));
        }
    });
    if let Some(e) = failure {
        return Err(e.into());
    }
    let (best_violation, best_candidate) = best.expect("grids are nonempty");
    Ok(EkelandWitness { witness, best_candidate, best_violation })
}

/// Which side of the level the tail of one run settled on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RepulsionBranch {
    /// min of the tail values stayed above l + 2 eta.
    Above,
    /// max of the tail values stayed below l - 2 eta.
    Below,
    /// The tail straddled the forbidden band around l.
    Straddled,
}

#[derive(Debug, Clone, Serialize)]
pub struct RepulsionCheck {
    pub level: f64,
    /// eta = (grid distance to vcrit_eps - value resolution) / 16.
    pub eta: f64,
    pub branches: Vec<RepulsionBranch>,
    pub holds: bool,
}

/// Verifies the repulsion dichotomy around an eps-regular level l: every
/// run tail either stays above l + 2 eta or below l - 2 eta, with
/// eta = dist(l, vcrit_eps f)/16 computed from the grid approximation and
/// shrunk by the grid's value resolution.
pub fn level_repulsion_check(
    f: &CatalogFunction,
    level: f64,
    epsilon: f64,
    grid: &GridSpec,
    runs: &[Trajectory],
    burn_in_fraction: f64,
) -> Result<RepulsionCheck, AnalysisError> {
    let vcrit = f.vcrit_eps_approx(epsilon, grid)?;
    let dist = vcrit.dist_to(level);
    let eta = (dist - vcrit.value_cell) / 16.0;
    if !(eta > 0.0) {
        return Err(AnalysisError::Inapplicable(format!(
            "level {level} is not resolvably eps-regular: grid distance {dist}, \
             value resolution {}",
            vcrit.value_cell
        )));
    }
    let mut branches = Vec::with_capacity(runs.len());
    for traj in runs {
        let burn_in = ((traj.len() as f64) * burn_in_fraction).floor() as usize;
        let tail = &traj.values[burn_in..];
        let tail_min = tail.iter().cloned().fold(f64::INFINITY, f64::min);
        let tail_max = tail.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let branch = if tail_min > level + 2.0 * eta {
            RepulsionBranch::Above
        } else if tail_max < level - 2.0 * eta {
            RepulsionBranch::Below
        } else {
            RepulsionBranch::Straddled
        };
        branches.push(branch);
    }
    let holds = branches.iter().all(|b| *b != RepulsionBranch::Straddled);
    Ok(RepulsionCheck { level, eta, branches, holds })
}
