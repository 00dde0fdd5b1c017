//! Continuous-time counterpart of the solver: small-step Euler selection
//! dynamics for the biased inclusion dx/dt in -subdiff f(x) + B(0, eps),
//! affine interpolants of discrete runs, and the descent-inequality checks.
//!
//! Explicit Euler with the min-norm selection is the right scheme here: the
//! affine interpolants of exactly this recursion are the curves whose
//! small-step limits solve the inclusion, and higher-order stages are
//! meaningless for a set-valued right-hand side. Selections switch at mesh
//! nodes only; there is no event detection, so trajectories chatter with
//! radius O(h) across nonsmooth interfaces.

use thiserror::Error;

use crate::catalog::{CatalogError, CatalogFunction};
use crate::solver::{BiasModel, BiasState, SolverError, Trajectory, DIVERGENCE_GUARD};
use crate::vecmath::{is_finite, norm, sub};

/// Slack constant for discrete checks of continuous inequalities, per unit
/// time and unit mesh width: 10 (L + eps)^2, from the Lipschitz modulus of
/// the descent integrand.
pub fn slack_constant(lipschitz: f64, epsilon: f64) -> f64 {
    10.0 * (lipschitz + epsilon) * (lipschitz + epsilon)
}

#[derive(Debug, Error)]
pub enum FlowError {
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("check inapplicable: {0}")]
    Inapplicable(String),
    #[error("curve diverged at t={t}")]
    Diverged { t: f64 },
}

/// Uniform-mesh curve driven by x(t+h) = x(t) + h (-selection(t) + bias(t)).
///
/// For integrated curves, `selections[j]` is the min-norm element of the
/// subdifferential at `states[j]` and `bias_vectors[j]` has norm <= epsilon.
/// For interpolated discrete runs, `selections[j]` holds the segment oracle
/// (so the advance identity is exact inside segments) and the bias slot is
/// zero; the gap to a true selection is exactly the interpolation defect.
#[derive(Debug, Clone)]
pub struct Curve {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub selections: Vec<Vec<f64>>,
    pub bias_vectors: Vec<Vec<f64>>,
    pub mesh: f64,
    pub epsilon: f64,
}

impl Curve {
    pub fn terminal(&self) -> &[f64] {
        self.states.last().expect("curves are nonempty")
    }

    pub fn horizon(&self) -> f64 {
        *self.times.last().expect("curves are nonempty")
    }
}

/// Euler integration of the biased inclusion with the min-norm selection and
/// a bias field evaluated pathwise.
pub fn integrate(
    f: &CatalogFunction,
    x0: &[f64],
    bias: &BiasModel,
    horizon: f64,
    mesh: f64,
    seed: u64,
) -> Result<Curve, FlowError> {
    if !(mesh > 0.0) || !(horizon >= mesh) {
        return Err(FlowError::InvalidParams(format!(
            "need mesh > 0 and horizon >= mesh, got h={mesh}, T={horizon}"
        )));
    }
    let steps = (horizon / mesh).round() as usize;
    let mut state = BiasState::new(bias, seed);
    let mut curve = Curve {
        times: Vec::with_capacity(steps + 1),
        states: Vec::with_capacity(steps + 1),
        selections: Vec::with_capacity(steps),
        bias_vectors: Vec::with_capacity(steps),
        mesh,
        epsilon: bias.epsilon,
    };
    let mut x = x0.to_vec();
    curve.times.push(0.0);
    curve.states.push(x.clone());
    for j in 0..steps {
        let selection = f.clarke(&x)?.min_norm_element();
        // The oracle convention is v = s + b_oracle with update -v; in curve
        // form the drift is -s + b with b = -b_oracle, same epsilon-ball.
        let v = crate::solver::biased_oracle(f, &x, bias, &mut state)
            .map_err(|e| FlowError::InvalidParams(e.to_string()))?;
        let b: Vec<f64> = selection.iter().zip(&v).map(|(s, vi)| s - vi).collect();
        for ((xi, si), bi) in x.iter_mut().zip(&selection).zip(&b) {
            *xi += mesh * (-si + bi);
        }
        curve.selections.push(selection);
        curve.bias_vectors.push(b);
        curve.times.push(mesh * (j + 1) as f64);
        curve.states.push(x.clone());
        if !is_finite(&x) || norm(&x) > DIVERGENCE_GUARD {
            return Err(FlowError::Diverged { t: mesh * (j + 1) as f64 });
        }
    }
    Ok(curve)
}

/// Result of the weak-Lyapunov pairwise check.
#[derive(Debug, Clone)]
pub struct LyapunovReport {
    /// max over mesh pairs t1 < t2 of f(x(t2)) - f(x(t1)) + integral term.
    pub max_raw_violation: f64,
    /// Same with the discretization slack C_slack * h * (t2 - t1) subtracted.
    pub max_adjusted_violation: f64,
    pub slack_rate: f64,
    pub passes: bool,
}

/// Checks f(x(t2)) - f(x(t1)) <= -int ||v||(||v|| - eps) dt over all mesh
/// pairs, up to discretization slack. The integral uses the trapezoid rule
/// on the selection norms; left sums under-integrate decaying integrands and
/// would flag spurious violations of size O(h) per unit time.
pub fn weak_lyapunov_check(
    curve: &Curve,
    f: &CatalogFunction,
    epsilon: f64,
) -> Result<LyapunovReport, FlowError> {
    let n = curve.states.len();
    let mut phi = Vec::with_capacity(n);
    for (j, x) in curve.states.iter().enumerate() {
        let s = if j < curve.selections.len() {
            curve.selections[j].clone()
        } else {
            f.clarke(x)?.min_norm_element()
        };
        let ns = norm(&s);
        phi.push(ns * (ns - epsilon));
    }
    let mut values = Vec::with_capacity(n);
    for x in &curve.states {
        values.push(f.eval(x)?);
    }
    let h = curve.mesh;
    let slack_rate = slack_constant(f.lipschitz_on_box, epsilon) * h;

    // m_j = f_j + I_j with I the cumulative trapezoid integral; the worst
    // pair violation is max_j (m_j - min_{i<=j} m_i), computed in one sweep.
    let mut max_raw = f64::NEG_INFINITY;
    let mut max_adj = f64::NEG_INFINITY;
    let mut integral = 0.0;
    let mut min_raw = values[0];
    let mut min_adj = values[0];
    for j in 1..n {
        integral += h * 0.5 * (phi[j - 1] + phi[j]);
        let raw = values[j] + integral;
        let adj = raw - slack_rate * curve.times[j];
        max_raw = max_raw.max(raw - min_raw);
        max_adj = max_adj.max(adj - min_adj);
        min_raw = min_raw.min(raw);
        min_adj = min_adj.min(adj);
    }
    if n < 2 {
        max_raw = 0.0;
        max_adj = 0.0;
    }
    Ok(LyapunovReport {
        max_raw_violation: max_raw,
        max_adjusted_violation: max_adj,
        slack_rate,
        passes: max_adj <= 0.0,
    })
}

/// Outcome of the quantitative-estimate check: the hit time within the
/// predicted horizon, or a violation flag that would falsify the estimate.
#[derive(Debug, Clone, PartialEq)]
pub enum QuantitativeEstimate {
    HitTime(f64),
    Violation,
}

/// Searches [0, T] with T = (b - a)/(delta (delta - eps)) for a mesh time
/// whose state is delta-critical, assuming f stays inside [a, b] up to the
/// hit. Leaving the band first makes the estimate inapplicable.
pub fn quantitative_estimate_check(
    curve: &Curve,
    f: &CatalogFunction,
    epsilon: f64,
    band: (f64, f64),
    delta: f64,
) -> Result<QuantitativeEstimate, FlowError> {
    let (a, b) = band;
    if !(delta > epsilon) || !(b > a) {
        return Err(FlowError::InvalidParams(format!(
            "need delta > eps and b > a, got delta={delta}, eps={epsilon}, band=({a}, {b})"
        )));
    }
    let horizon = (b - a) / (delta * (delta - epsilon));
    if curve.horizon() + 1e-12 < horizon {
        return Err(FlowError::Inapplicable(format!(
            "curve covers {} < required horizon {horizon}",
            curve.horizon()
        )));
    }
    for (t, x) in curve.times.iter().zip(&curve.states) {
        if *t > horizon + 1e-12 {
            break;
        }
        if f.clarke(x)?.dist_origin() <= delta {
            return Ok(QuantitativeEstimate::HitTime(*t));
        }
        let v = f.eval(x)?;
        if v < a - 1e-12 || v > b + 1e-12 {
            return Err(FlowError::Inapplicable(format!(
                "curve left the band [{a}, {b}] at t={t} with f={v}"
            )));
        }
    }
    Ok(QuantitativeEstimate::Violation)
}

/// Piecewise-affine interpolant of a discrete run through its iterates at
/// cumulative-step times, resampled to a uniform mesh of a quarter of the
/// smallest step.
pub fn interpolate(traj: &Trajectory) -> Curve {
    assert!(!traj.is_empty(), "cannot interpolate an empty trajectory");
    let total: f64 = traj.steps.iter().sum();
    let dim = traj.points[0].len();
    if traj.steps.is_empty() || total <= 0.0 {
        return Curve {
            times: vec![0.0],
            states: vec![traj.points[0].clone()],
            selections: vec![],
            bias_vectors: vec![],
            mesh: 1.0,
            epsilon: 0.0,
        };
    }
    let min_step = traj.steps.iter().copied().fold(f64::INFINITY, f64::min);
    let mesh = min_step / 4.0;
    let n = (total / mesh).floor() as usize;

    let mut cumulative = Vec::with_capacity(traj.steps.len() + 1);
    cumulative.push(0.0);
    for a in &traj.steps {
        cumulative.push(cumulative.last().unwrap() + a);
    }

    let mut curve = Curve {
        times: Vec::with_capacity(n + 1),
        states: Vec::with_capacity(n + 1),
        selections: Vec::with_capacity(n),
        bias_vectors: Vec::with_capacity(n),
        mesh,
        epsilon: 0.0,
    };
    let mut seg = 0usize;
    for j in 0..=n {
        let t = (mesh * j as f64).min(total);
        while seg + 1 < cumulative.len() - 1 && cumulative[seg + 1] <= t {
            seg += 1;
        }
        let tau = (t - cumulative[seg]) / traj.steps[seg];
        let x0 = &traj.points[seg];
        let x1 = &traj.points[seg + 1];
        let state: Vec<f64> = (0..dim).map(|k| x0[k] + tau * (x1[k] - x0[k])).collect();
        curve.times.push(t);
        curve.states.push(state);
        if j < n {
            curve.selections.push(traj.oracle_vectors[seg].clone());
            curve.bias_vectors.push(vec![0.0; dim]);
        }
    }
    curve
}

/// Numerically evaluated graph-distance defect of the affine interpolant.
#[derive(Debug, Clone)]
pub struct DefectReport {
    pub defect: f64,
    /// max-step * horizon * (L + eps).
    pub bound: f64,
    /// Sub-mesh width used for the quadrature.
    pub quad_mesh: f64,
    pub horizon: f64,
    pub max_step: f64,
    pub passes: bool,
}

/// Integrates dist((gamma(t), dgamma(t)), graph[-subdiff f + B(0, eps)]) along
/// the interpolant. On each segment the graph point is anchored at the
/// segment base, so the integrand is the hypotenuse of the spatial drift and
/// the oracle's velocity residual at the base.
pub fn interpolation_defect(
    traj: &Trajectory,
    f: &CatalogFunction,
    epsilon: f64,
) -> Result<DefectReport, FlowError> {
    const SUBDIV: usize = 16;
    let horizon = traj.horizon();
    let max_step = traj.max_step();
    let mut defect = 0.0;
    let mut quad_mesh = 0.0f64;
    for (k, alpha) in traj.steps.iter().enumerate() {
        let x = &traj.points[k];
        let v = &traj.oracle_vectors[k];
        let hull = f.clarke(x)?;
        let projected = hull
            .project_point(v)
            .map_err(CatalogError::from_polytope)?;
        let vel_residual = (norm(&sub(v, &projected)) - epsilon).max(0.0);
        let speed = norm(v);
        let sub_h = alpha / SUBDIV as f64;
        quad_mesh = quad_mesh.max(sub_h);
        let mut seg = 0.0;
        for i in 0..=SUBDIV {
            let tau = sub_h * i as f64;
            let g = ((tau * speed).powi(2) + vel_residual * vel_residual).sqrt();
            let w = if i == 0 || i == SUBDIV { 0.5 } else { 1.0 };
            seg += w * g * sub_h;
        }
        defect += seg;
    }
    let bound = max_step * horizon * (f.lipschitz_on_box + epsilon);
    Ok(DefectReport {
        defect,
        bound,
        quad_mesh,
        horizon,
        max_step,
        passes: defect <= bound + 10.0 * quad_mesh * horizon,
    })
}

impl CatalogError {
    fn from_polytope(e: crate::polytope::PolytopeError) -> CatalogError {
        match e {
            crate::polytope::PolytopeError::DimensionMismatch { expected, got } => {
                CatalogError::DimensionMismatch { expected, got }
            }
            crate::polytope::PolytopeError::Empty => {
                CatalogError::DimensionMismatch { expected: 0, got: 0 }
            }
        }
    }
}

impl From<SolverError> for FlowError {
    fn from(e: SolverError) -> Self {
        match e {
            SolverError::Catalog(c) => FlowError::Catalog(c),
            other => FlowError::InvalidParams(other.to_string()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::by_name;
    use crate::solver::{run, StepSchedule};

    #[test]
    fn gradient_flow_matches_exponential_decay() {
        let p2 = by_name("power_2").unwrap();
        let curve = integrate(p2, &[1.0], &BiasModel::none(), 1.0, 1e-4, 0).unwrap();
        let x1 = curve.terminal()[0];
        assert!((x1 - (-2.0f64).exp()).abs() <= 1e-3, "x(1) = {x1}");
    }

    #[test]
    fn abs_descends_at_unit_speed_then_parks() {
        let abs = by_name("abs").unwrap();
        let curve = integrate(abs, &[1.0], &BiasModel::none(), 2.0, 1e-4, 0).unwrap();
        let mid = &curve.states[curve.times.iter().position(|t| (t - 0.5).abs() < 1e-9).unwrap()];
        assert!((mid[0] - 0.5).abs() <= 1e-9);
        assert!(curve.terminal()[0].abs() <= 2e-4);
    }

    #[test]
    fn adversarial_bias_halves_descent_speed() {
        let abs = by_name("abs").unwrap();
        let curve = integrate(abs, &[1.0], &BiasModel::adversarial(0.5), 2.0, 1e-4, 0).unwrap();
        let quarter =
            &curve.states[curve.times.iter().position(|t| (t - 1.0).abs() < 1e-9).unwrap()];
        assert!((quarter[0] - 0.5).abs() <= 1e-9);
        assert!(curve.terminal()[0].abs() <= 2e-4);
    }

    #[test]
    fn weak_lyapunov_smooth_decay_has_no_raw_violation() {
        let p2 = by_name("power_2").unwrap();
        let curve = integrate(p2, &[1.0], &BiasModel::none(), 1.0, 1e-4, 0).unwrap();
        let report = weak_lyapunov_check(&curve, p2, 0.0).unwrap();
        assert!(report.max_raw_violation <= 1e-6, "{}", report.max_raw_violation);
        assert!(report.passes);
    }

    #[test]
    fn weak_lyapunov_adversarial_abs_rate() {
        let abs = by_name("abs").unwrap();
        let curve = integrate(abs, &[1.0], &BiasModel::adversarial(0.5), 1.0, 1e-4, 0).unwrap();
        let report = weak_lyapunov_check(&curve, abs, 0.5).unwrap();
        assert!(report.max_raw_violation <= 1e-9);
        // Decrease rate matches ||v||(||v|| - eps) = 0.5 while x > 0.
        let i = curve.times.iter().position(|t| (t - 0.8).abs() < 1e-9).unwrap();
        let drop = abs.eval(&curve.states[0]).unwrap() - abs.eval(&curve.states[i]).unwrap();
        assert!((drop - 0.5 * 0.8).abs() <= 1e-6);
    }

    #[test]
    fn weak_lyapunov_constant_curve_is_flat() {
        let abs = by_name("abs").unwrap();
        let curve = integrate(abs, &[0.0], &BiasModel::none(), 1.0, 1e-3, 0).unwrap();
        let report = weak_lyapunov_check(&curve, abs, 0.0).unwrap();
        assert_eq!(report.max_raw_violation, 0.0);
        for s in &curve.states {
            assert_eq!(s[0], 0.0);
        }
    }

    #[test]
    fn quantitative_estimate_power_two() {
        let p2 = by_name("power_2").unwrap();
        let curve = integrate(p2, &[1.0], &BiasModel::adversarial(0.1), 5.0, 1e-4, 0).unwrap();
        match quantitative_estimate_check(&curve, p2, 0.1, (0.0, 1.0), 0.5).unwrap() {
            QuantitativeEstimate::HitTime(t) => {
                assert!(t <= 5.0, "hit at {t}");
                // The biased flow reaches |2x| <= 0.5 near t = ln(4.75)/2.
                assert!((t - 0.5f64 * 4.75f64.ln()).abs() <= 0.01, "hit at {t}");
            }
            QuantitativeEstimate::Violation => panic!("estimate falsified"),
        }
    }

    #[test]
    fn quantitative_estimate_immediate_for_loose_delta() {
        let abs = by_name("abs").unwrap();
        let curve = integrate(abs, &[1.0], &BiasModel::adversarial(0.2), 1.0, 1e-3, 0).unwrap();
        match quantitative_estimate_check(&curve, abs, 0.2, (0.0, 1.0), 1.5).unwrap() {
            QuantitativeEstimate::HitTime(t) => assert_eq!(t, 0.0),
            QuantitativeEstimate::Violation => panic!("estimate falsified"),
        }
    }

    #[test]
    fn quantitative_estimate_double_well() {
        let dw = by_name("double_well").unwrap();
        let curve = integrate(dw, &[2.0], &BiasModel::adversarial(0.1), 4.0, 1e-4, 0).unwrap();
        match quantitative_estimate_check(&curve, dw, 0.1, (0.0, 1.0), 0.6).unwrap() {
            QuantitativeEstimate::HitTime(t) => assert!(t <= (1.0) / (0.6 * 0.5) + 1e-9),
            QuantitativeEstimate::Violation => panic!("estimate falsified"),
        }
    }

    #[test]
    fn quantitative_estimate_band_breach_is_inapplicable() {
        let p2 = by_name("power_2").unwrap();
        // f drops below the band floor a = 0.5 long before becoming
        // 0.05-critical, so the precondition fails.
        let curve = integrate(p2, &[1.0], &BiasModel::none(), 50.0, 1e-3, 0).unwrap();
        match quantitative_estimate_check(&curve, p2, 0.0, (0.5, 1.0), 0.05) {
            Err(FlowError::Inapplicable(_)) => {}
            other => panic!("expected inapplicable, got {other:?}"),
        }
    }

    #[test]
    fn interpolant_of_two_points_is_a_line() {
        let p2 = by_name("power_2").unwrap();
        let traj = run(
            p2,
            &[1.0],
            &StepSchedule::Constant { alpha: 0.25 },
            &BiasModel::none(),
            1,
            0,
        )
        .unwrap();
        let curve = interpolate(&traj);
        assert_eq!(curve.states.len(), 5);
        for (t, x) in curve.times.iter().zip(&curve.states) {
            assert!((x[0] - (1.0 - 2.0 * t)).abs() <= 1e-12);
        }
    }

    #[test]
    fn interpolant_of_fixed_point_is_constant() {
        let abs = by_name("abs").unwrap();
        let traj = run(
            abs,
            &[0.0],
            &StepSchedule::Constant { alpha: 0.3 },
            &BiasModel::none(),
            5,
            0,
        )
        .unwrap();
        let curve = interpolate(&traj);
        for x in &curve.states {
            assert_eq!(x[0], 0.0);
        }
    }

    #[test]
    fn interpolant_of_period_two_orbit_is_a_sawtooth() {
        let abs = by_name("abs").unwrap();
        let traj = run(
            abs,
            &[1.0],
            &StepSchedule::Constant { alpha: 0.4 },
            &BiasModel::none(),
            6,
            0,
        )
        .unwrap();
        let curve = interpolate(&traj);
        // After the descent phase the curve oscillates linearly between
        // +0.2 and -0.2, crossing zero inside each late segment.
        let amplitude = curve
            .states
            .iter()
            .zip(&curve.times)
            .filter(|(_, t)| **t >= 0.8)
            .map(|(x, _)| x[0].abs())
            .fold(0.0f64, f64::max);
        assert!((amplitude - 0.2).abs() <= 1e-12);
        // Sign changes of the sampled states, skipping the zero nodes the
        // sawtooth passes through exactly.
        let signs: Vec<f64> = curve
            .states
            .iter()
            .map(|x| x[0])
            .filter(|v| v.abs() > 1e-9)
            .collect();
        let crossings = signs.windows(2).filter(|w| w[0] * w[1] < 0.0).count();
        assert!(crossings >= 3);
    }

    #[test]
    fn defect_vanishes_at_fixed_points() {
        let abs = by_name("abs").unwrap();
        let traj = run(
            abs,
            &[0.0],
            &StepSchedule::Constant { alpha: 0.3 },
            &BiasModel::none(),
            5,
            0,
        )
        .unwrap();
        let report = interpolation_defect(&traj, abs, 0.0).unwrap();
        assert_eq!(report.defect, 0.0);
        assert!(report.passes);
    }

    #[test]
    fn defect_single_step_is_quadratic_in_alpha() {
        let p2 = by_name("power_2").unwrap();
        let alpha = 0.125;
        let traj = run(
            p2,
            &[1.0],
            &StepSchedule::Constant { alpha },
            &BiasModel::none(),
            1,
            0,
        )
        .unwrap();
        let report = interpolation_defect(&traj, p2, 0.0).unwrap();
        // One segment: integral of tau * ||v|| over [0, alpha] = alpha^2 ||v|| / 2.
        let exact = alpha * alpha * 2.0 / 2.0;
        assert!((report.defect - exact).abs() <= 1e-3 * exact);
        assert!(report.defect <= alpha * alpha * (p2.lipschitz_on_box + 0.0));
    }

    #[test]
    fn defect_small_step_long_run_stays_below_bound() {
        let p2 = by_name("power_2").unwrap();
        let traj = run(
            p2,
            &[1.0],
            &StepSchedule::Constant { alpha: 1e-4 },
            &BiasModel::none(),
            10_000,
            0,
        )
        .unwrap();
        let report = interpolation_defect(&traj, p2, 0.0).unwrap();
        assert!(report.defect <= report.bound, "{} > {}", report.defect, report.bound);
    }

    /// Near-constant objective along a window forces eps-stationarity of the
    /// visited states.
    #[test]
    fn flat_value_windows_are_eps_stationary() {
        let p2 = by_name("power_2").unwrap();
        let eps = 0.1;
        let curve = integrate(p2, &[1.0], &BiasModel::adversarial(eps), 8.0, 1e-3, 0).unwrap();
        let start = curve.times.iter().position(|t| *t >= 7.0).unwrap();
        let window = &curve.states[start..];
        let spread = {
            let vals: Vec<f64> = window.iter().map(|x| p2.eval(x).unwrap()).collect();
            vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
                - vals.iter().cloned().fold(f64::INFINITY, f64::min)
        };
        assert!(spread <= 1e-4);
        for x in window {
            let d = p2.clarke(x).unwrap().dist_origin();
            assert!(d <= eps + 1e-2, "dist {d}");
        }
    }

    /// Sublevel sets below an eps-regular value trap the flow.
    #[test]
    fn regular_sublevels_trap_curves() {
        let dw = by_name("double_well").unwrap();
        let eps = 0.1;
        let level = 0.5;
        let curve = integrate(dw, &[1.6], &BiasModel::adversarial(eps), 5.0, 1e-4, 0).unwrap();
        assert!(dw.eval(&curve.states[0]).unwrap() <= level);
        let slack = slack_constant(dw.lipschitz_on_box, eps) * curve.mesh;
        for x in &curve.states {
            assert!(dw.eval(x).unwrap() < level + slack);
        }
    }

    /// Halving the mesh moves the terminal state by O(h) on smooth entries.
    #[test]
    fn integrator_consistency_order() {
        for name in ["power_2", "power_4"] {
            let f = by_name(name).unwrap();
            let meshes = [4e-3, 2e-3, 1e-3, 5e-4];
            let mut gaps = Vec::new();
            for h in meshes {
                let a = integrate(f, &[1.0], &BiasModel::none(), 1.0, h, 0).unwrap();
                let b = integrate(f, &[1.0], &BiasModel::none(), 1.0, h / 2.0, 0).unwrap();
                gaps.push((a.terminal()[0] - b.terminal()[0]).abs());
            }
            // Log-log slope of the terminal gap against the mesh.
            let xs: Vec<f64> = meshes.iter().map(|h| h.ln()).collect();
            let ys: Vec<f64> = gaps.iter().map(|g| g.ln()).collect();
            let n = xs.len() as f64;
            let mx = xs.iter().sum::<f64>() / n;
            let my = ys.iter().sum::<f64>() / n;
            let slope = xs
                .iter()
                .zip(&ys)
                .map(|(x, y)| (x - mx) * (y - my))
                .sum::<f64>()
                / xs.iter().map(|x| (x - mx) * (x - mx)).sum::<f64>();
            assert!(slope >= 0.9, "{name}: observed order {slope}");
        }
    }
}
