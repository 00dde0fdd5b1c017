//! Verification battery behind `subgrad verify <suite>`: each suite drives
//! the corresponding analysis checks across the catalog and reports
//! per-check verdicts with the largest observed violation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use subgrad::analysis::{
    convex_bound, ekeland_witness, error_bound_check, level_repulsion_check, numeric_lemma_check,
    rho_exponent, RepulsionBranch,
};
use subgrad::catalog::{by_name, catalog, dist_to_components, GridSpec};
use subgrad::flow::{integrate, quantitative_estimate_check, weak_lyapunov_check, QuantitativeEstimate};
use subgrad::solver::{run, BiasModel, StepSchedule};

use crate::CliError;

pub const SUITES: &[&str] = &[
    "lyapunov",
    "repulsion",
    "convex",
    "error-bound",
    "ekeland",
    "numeric-lemma",
    "exponents",
    "all",
];

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub max_violation: f64,
    pub detail: String,
}

#[derive(Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

pub fn run_suite(suite: &str) -> Result<SuiteReport, CliError> {
    let checks = match suite {
        "lyapunov" => lyapunov_suite()?,
        "repulsion" => repulsion_suite()?,
        "convex" => convex_suite()?,
        "error-bound" => error_bound_suite()?,
        "ekeland" => ekeland_suite()?,
        "numeric-lemma" => numeric_lemma_suite()?,
        "exponents" => exponents_suite()?,
        "all" => {
            let mut all = Vec::new();
            for s in SUITES.iter().filter(|s| **s != "all") {
                all.extend(run_suite(s)?.checks);
            }
            all
        }
        other => {
            return Err(CliError::Config(format!(
                "unknown suite {other:?}; expected one of {}",
                SUITES.join(", ")
            )))
        }
    };
    let passed = checks.iter().all(|c| c.passed);
    Ok(SuiteReport { suite: suite.to_string(), passed, checks })
}

fn check(name: impl Into<String>, passed: bool, max_violation: f64, detail: String) -> CheckResult {
    CheckResult { name: name.into(), passed, max_violation, detail }
}

fn lyapunov_suite() -> Result<Vec<CheckResult>, CliError> {
    let mesh = 1e-4;
    let cases = [
        ("power_2", 1.0, 10.0, (0.0, 1.0), 0.5),
        ("abs", 1.0, 1.0, (0.0, 1.0), 1.5),
        ("double_well", 2.0, 10.0, (0.0, 1.0), 0.6),
    ];
    let mut results = Vec::new();
    for (name, x0, horizon, band, delta) in cases {
        let f = by_name(name).expect("battery names exist");
        for eps in [0.0, 0.1] {
            let bias = if eps == 0.0 { BiasModel::none() } else { BiasModel::adversarial(eps) };
            let curve = integrate(f, &[x0], &bias, horizon, mesh, 0)
                .map_err(|e| CliError::Check(e.to_string()))?;
            let lyap = weak_lyapunov_check(&curve, f, eps)
                .map_err(|e| CliError::Check(e.to_string()))?;
            results.push(check(
                format!("lyapunov/{name}/eps={eps}"),
                lyap.passes,
                lyap.max_adjusted_violation,
                format!("raw violation {:.3e}", lyap.max_raw_violation),
            ));
            let predicted = (band.1 - band.0) / (delta * (delta - eps));
            let outcome = quantitative_estimate_check(&curve, f, eps, band, delta)
                .map_err(|e| CliError::Check(e.to_string()))?;
            let (passed, detail, violation) = match outcome {
                QuantitativeEstimate::HitTime(t) => (
                    t <= predicted + 1e-12,
                    format!("hit at t={t:.4}, predicted horizon {predicted:.4}"),
                    (t - predicted).max(0.0),
                ),
                QuantitativeEstimate::Violation => {
                    (false, "no delta-critical time found".into(), f64::INFINITY)
                }
            };
            results.push(check(
                format!("quantitative/{name}/eps={eps}"),
                passed,
                violation,
                detail,
            ));
        }
    }
    Ok(results)
}

fn repulsion_suite() -> Result<Vec<CheckResult>, CliError> {
    let mut results = Vec::new();

    let dw = by_name("double_well").unwrap();
    let sched = StepSchedule::Constant { alpha: 1e-3 };
    let mut runs = Vec::new();
    for i in 0..20u64 {
        let x0 = -2.2 + 4.4 * (i as f64 + 0.5) / 20.0;
        let traj = run(dw, &[x0], &sched, &BiasModel::adversarial(0.05), 100_000, i)
            .map_err(|e| CliError::Check(e.to_string()))?;
        runs.push(traj);
    }
    let grid = GridSpec::default_for_dim(1);
    let rep = level_repulsion_check(dw, 0.5, 0.05, &grid, &runs, 0.5)
        .map_err(|e| CliError::Check(e.to_string()))?;
    let below = rep.branches.iter().filter(|b| **b == RepulsionBranch::Below).count();
    results.push(check(
        "repulsion/double_well/l=0.5",
        rep.holds && below == runs.len(),
        0.0,
        format!("eta {:.4}, {below}/{} tails below", rep.eta, runs.len()),
    ));

    let abs = by_name("abs").unwrap();
    let traj = run(abs, &[1.0], &sched, &BiasModel::adversarial(0.1), 100_000, 0)
        .map_err(|e| CliError::Check(e.to_string()))?;
    let rep = level_repulsion_check(abs, 0.3, 0.1, &grid, &[traj], 0.5)
        .map_err(|e| CliError::Check(e.to_string()))?;
    results.push(check(
        "repulsion/abs/l=0.3",
        rep.holds && rep.branches[0] == RepulsionBranch::Below,
        0.0,
        format!("eta {:.4}", rep.eta),
    ));

    // A run parked in the upper valley keeps its values above the level.
    let ridge = by_name("ridge_nc").unwrap();
    let ridge_grid = GridSpec::new(-2.5, 2.5, 801);
    let traj = run(ridge, &[0.4, 0.0], &sched, &BiasModel::adversarial(0.05), 100_000, 0)
        .map_err(|e| CliError::Check(e.to_string()))?;
    let rep = level_repulsion_check(ridge, 0.5, 0.05, &ridge_grid, &[traj], 0.5)
        .map_err(|e| CliError::Check(e.to_string()))?;
    results.push(check(
        "repulsion/ridge_nc/l=0.5",
        rep.holds && rep.branches[0] == RepulsionBranch::Above,
        0.0,
        format!("eta {:.4}, branch above", rep.eta),
    ));

    Ok(results)
}

fn convex_suite() -> Result<Vec<CheckResult>, CliError> {
    let mut results = Vec::new();
    let horizon = 2000usize;
    for f in catalog().iter().filter(|f| f.convex) {
        let eb = f.error_bound.expect("convex entries carry error bounds");
        let x0 = vec![1.0; f.dim];
        let x0_dist = dist_to_components(f.argmin.as_ref().unwrap(), &x0);
        let mut worst = f64::NEG_INFINITY;
        let mut holds = true;
        for eps in [0.0, 0.1, 0.5 / eb.c] {
            for seed in 0..5u64 {
                let sched = StepSchedule::SqrtHorizon { horizon: horizon - 1 };
                let traj = run(f, &x0, &sched, &BiasModel::random_bounded(eps), horizon, seed)
                    .map_err(|e| CliError::Check(e.to_string()))?;
                let cb = convex_bound(
                    f.lipschitz_on_box,
                    eps,
                    &eb,
                    x0_dist,
                    f.min_value,
                    &traj.steps,
                    &traj.values[..horizon],
                )
                .map_err(|e| CliError::Check(e.to_string()))?;
                worst = worst.max(cb.lhs - cb.rhs);
                holds &= cb.holds;
            }
        }
        results.push(check(
            format!("convex/{}", f.name),
            holds,
            worst,
            "3 bias levels x 5 seeds".into(),
        ));
    }
    Ok(results)
}

fn error_bound_suite() -> Result<Vec<CheckResult>, CliError> {
    let mut results = Vec::new();
    for f in catalog().iter().filter(|f| f.convex) {
        let eb = f.error_bound.unwrap();
        let grid = GridSpec::default_for_dim(f.dim);
        let violation =
            error_bound_check(f, &grid, &eb).map_err(|e| CliError::Check(e.to_string()))?;
        results.push(check(
            format!("error-bound/{}", f.name),
            violation <= 1e-9,
            violation,
            format!("max violation on the default grid, a={}, c={}", eb.a, eb.c),
        ));
    }
    Ok(results)
}

fn ekeland_suite() -> Result<Vec<CheckResult>, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    let names = ["abs", "power_2", "power_3", "power_4", "double_well"];
    let exponents = [0.3, 0.5, 0.7];
    let mut found = 0usize;
    let mut worst = 0.0f64;
    for trial in 0..100 {
        let f = by_name(names[trial % names.len()]).unwrap();
        let a = exponents[trial % exponents.len()];
        let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let x: f64 = sign * rng.gen_range(0.5..3.0);
        let grid = GridSpec::new(-(x.abs() + 1.0), x.abs() + 1.0, 4001);
        let w = ekeland_witness(f, &[x], a, &grid).map_err(|e| CliError::Check(e.to_string()))?;
        if w.witness.is_some() {
            found += 1;
        } else {
            worst = worst.max(w.best_violation);
        }
    }
    Ok(vec![check(
        "ekeland/witness-search",
        found == 100,
        worst,
        format!("{found}/100 triples produced a witness"),
    )])
}

fn numeric_lemma_suite() -> Result<Vec<CheckResult>, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(909);
    let mut worst = f64::NEG_INFINITY;
    let mut violations = 0usize;
    for _ in 0..10_000 {
        let s: f64 = rng.gen_range(1e-9..=10.0);
        let t: f64 = rng.gen_range(1e-9..1.0 - 1e-12);
        let delta: f64 = rng.gen_range(0.0..=100.0);
        let c = numeric_lemma_check(s, t, delta).map_err(|e| CliError::Check(e.to_string()))?;
        if !c.holds {
            violations += 1;
        }
        if c.lhs.is_finite() && c.rhs.is_finite() {
            worst = worst.max(c.lhs - c.rhs);
        }
    }
    Ok(vec![check(
        "numeric-lemma/random-triples",
        violations == 0,
        worst,
        format!("{violations} violations in 10000 triples"),
    )])
}

fn exponents_suite() -> Result<Vec<CheckResult>, CliError> {
    let mut results = Vec::new();
    for a in [2.0f64, 3.0, 4.0] {
        let theta = 1.0 - 1.0 / a;
        let beta = 1.0 / (a - 1.0);
        let (rho, _) = rho_exponent(theta, beta).map_err(|e| CliError::Check(e.to_string()))?;
        let identity = (theta * (beta + 2.0) - (2.0 - 1.0 / a)).abs();
        let direct = (rho - beta / (theta * (beta + 2.0)).max(1.0)).abs();
        let violation = identity.max(direct);
        results.push(check(
            format!("exponents/power-a={a}"),
            violation <= 1e-15,
            violation,
            format!("theta={theta}, beta={beta}, rho={rho}"),
        ));
    }
    Ok(results)
}
