//! Fixed library of nonsmooth semialgebraic test functions with exact
//! subdifferentials, analytic critical sets, and certified growth exponents.
//!
//! Every entry is piecewise C^1, so its Clarke subdifferential at a point is
//! the convex hull of the gradients of the active pieces. A piece counts as
//! active when its defining value is within `ACTIVITY_TOL` of the switching
//! value; the subdifferential is upper semicontinuous, so over-inclusion is
//! safe for every check built on top of it.
//!
//! Stored (theta, c) and (beta, c) constants are analytic for the univariate
//! power family and grid-certified for the multivariate entries; the
//! certificate tests in this module re-derive them on band samples.

use std::sync::OnceLock;

use serde::Serialize;
use thiserror::Error;

use crate::polytope::Polytope;
use crate::vecmath::{dist, norm};

/// A piece is active when its switching value is within this tolerance.
pub const ACTIVITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CatalogError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("grid-approximated eps-critical set is empty at eps={epsilon}")]
    EmptyCriticalSet { epsilon: f64 },
}

/// Where a stored constant comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ParamSource {
    Analytic,
    GridCertified,
}

/// Nonsmooth Lojasiewicz-type inequality data:
/// dist(f(x), vcrit f)^theta <= c * dist(0, subdiff f(x)) on the band.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct KlParams {
    pub theta: f64,
    pub c: f64,
    pub valid_band: f64,
    pub source: ParamSource,
}

/// Metric subregularity data:
/// dist(x, crit f) <= c * dist(0, subdiff f(x))^beta on the band.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MrParams {
    pub beta: f64,
    pub c: f64,
    pub valid_band: f64,
    pub source: ParamSource,
}

/// Global error bound for convex coercive entries:
/// c/2 * ((f(x) - min f)^a + (f(x) - min f)) >= dist(x, argmin f).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ErrorBoundParams {
    pub a: f64,
    pub c: f64,
    pub source: ParamSource,
}

/// Component of a critical or argmin set: an isolated point or a segment.
#[derive(Debug, Clone)]
pub enum CritComponent {
    Point(Vec<f64>),
    Segment(Vec<f64>, Vec<f64>),
}

impl CritComponent {
    pub fn dist_to(&self, x: &[f64]) -> f64 {
        match self {
            CritComponent::Point(p) => dist(p, x),
            CritComponent::Segment(a, b) => {
                let d: Vec<f64> = b.iter().zip(a).map(|(bi, ai)| bi - ai).collect();
                let len_sq: f64 = d.iter().map(|v| v * v).sum();
                let t = if len_sq <= 0.0 {
                    0.0
                } else {
                    let num: f64 = x
                        .iter()
                        .zip(a)
                        .zip(&d)
                        .map(|((xi, ai), di)| (xi - ai) * di)
                        .sum();
                    (num / len_sq).clamp(0.0, 1.0)
                };
                let proj: Vec<f64> = a.iter().zip(&d).map(|(ai, di)| ai + t * di).collect();
                dist(&proj, x)
            }
        }
    }
}

pub fn dist_to_components(components: &[CritComponent], x: &[f64]) -> f64 {
    components
        .iter()
        .map(|c| c.dist_to(x))
        .fold(f64::INFINITY, f64::min)
}

/// Uniform grid on [lo, hi]^dim with a fixed node count per axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub nodes_per_axis: usize,
}

impl GridSpec {
    pub fn new(lo: f64, hi: f64, nodes_per_axis: usize) -> Self {
        assert!(lo < hi && nodes_per_axis >= 2, "grid needs lo < hi and >= 2 nodes");
        Self { lo, hi, nodes_per_axis }
    }

    /// Default desk-scale grids: [-10, 10] with 4001 nodes per axis in 1-D
    /// and 801 per axis in 2-D.
    pub fn default_for_dim(dim: usize) -> Self {
        let nodes = if dim <= 1 { 4001 } else { 801 };
        Self::new(-10.0, 10.0, nodes)
    }

    pub fn cell(&self) -> f64 {
        (self.hi - self.lo) / (self.nodes_per_axis - 1) as f64
    }

    fn coord(&self, i: usize) -> f64 {
        self.lo + self.cell() * i as f64
    }

    /// Visits every node of the dim-dimensional grid. The callback receives
    /// the node coordinates and whether the node lies on the boundary shell.
    pub fn for_each_node<F: FnMut(&[f64], bool)>(&self, dim: usize, mut visit: F) {
        let n = self.nodes_per_axis;
        let mut idx = vec![0usize; dim];
        let mut x = vec![0.0f64; dim];
        loop {
            let mut boundary = false;
            for (k, &i) in idx.iter().enumerate() {
                x[k] = self.coord(i);
                boundary |= i == 0 || i == n - 1;
            }
            visit(&x, boundary);
            let mut k = 0;
            loop {
                if k == dim {
                    return;
                }
                idx[k] += 1;
                if idx[k] < n {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
        }
    }
}

/// Grid approximation of the set of eps-critical values, together with the
/// largest subgradient vertex norm seen on the grid (a value-resolution
/// modulus: |f| varies by at most that norm times a cell diagonal per cell).
#[derive(Debug, Clone)]
pub struct VcritApprox {
    values: Vec<f64>,
    pub subgrad_norm_bound: f64,
    pub value_cell: f64,
}

impl VcritApprox {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dist_to(&self, v: f64) -> f64 {
        dist_to_sorted_values(&self.values, v)
    }
}

pub fn dist_to_sorted_values(values: &[f64], v: f64) -> f64 {
    match values.binary_search_by(|probe| probe.partial_cmp(&v).unwrap()) {
        Ok(_) => 0.0,
        Err(i) => {
            let mut d = f64::INFINITY;
            if i < values.len() {
                d = d.min(values[i] - v);
            }
            if i > 0 {
                d = d.min(v - values[i - 1]);
            }
            d
        }
    }
}

/// Verdict of the boundary-shell boundedness probe.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum BoundednessVerdict {
    Bounded,
    UnboundedEvidence,
}

#[derive(Debug, Clone)]
pub struct BoundednessCheck {
    pub verdict: BoundednessVerdict,
    /// Boundary-shell nodes that belong to the eps-critical set.
    pub witnesses: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum EntryKind {
    Abs,
    Power(i32),
    DoubleWell,
    L1TwoD,
    MaxQuad,
    RidgeNc,
    SqrtLike,
}

/// A catalog objective: evaluation, exact Clarke subdifferential, analytic
/// critical-set data, and certified growth constants.
#[derive(Debug, Clone)]
pub struct CatalogFunction {
    kind: EntryKind,
    pub name: &'static str,
    pub dim: usize,
    pub crit_points: Vec<CritComponent>,
    pub crit_values: Vec<f64>,
    pub lipschitz_on_box: f64,
    pub box_radius: f64,
    pub kl: Option<KlParams>,
    pub mr: Option<MrParams>,
    pub error_bound: Option<ErrorBoundParams>,
    pub min_value: f64,
    pub argmin: Option<Vec<CritComponent>>,
    pub convex: bool,
    /// Diagnostic entries are listed but excluded from solver batteries.
    pub diagnostic_only: bool,
}

impl CatalogFunction {
    fn check_dim(&self, x: &[f64]) -> Result<(), CatalogError> {
        if x.len() != self.dim {
            return Err(CatalogError::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        Ok(())
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64, CatalogError> {
        self.check_dim(x)?;
        Ok(match self.kind {
            EntryKind::Abs => x[0].abs(),
            EntryKind::Power(a) => x[0].abs().powi(a),
            EntryKind::DoubleWell => {
                let t = x[0].abs() - 1.0;
                t * t
            }
            EntryKind::L1TwoD => x[0].abs() + x[1].abs(),
            EntryKind::MaxQuad => {
                let q1 = x[0] * x[0] + (x[1] - 1.0) * (x[1] - 1.0);
                let q2 = x[0] * x[0] + (x[1] + 1.0) * (x[1] + 1.0);
                q1.max(q2)
            }
            EntryKind::RidgeNc => {
                let t = x[1] * x[1] - 1.0;
                x[0].abs() + t * t
            }
            EntryKind::SqrtLike => {
                let r = x[0].abs();
                if r <= 1.0 {
                    (1.0 + r) / 2.0
                } else {
                    r.sqrt()
                }
            }
        })
    }

    /// Clarke subdifferential as the hull of active-piece gradients.
    pub fn clarke(&self, x: &[f64]) -> Result<Polytope, CatalogError> {
        self.check_dim(x)?;
        let verts: Vec<Vec<f64>> = match self.kind {
            EntryKind::Abs => sign_set(x[0]).iter().map(|&s| vec![s]).collect(),
            EntryKind::Power(a) => {
                let s = if x[0] >= 0.0 { 1.0 } else { -1.0 };
                vec![vec![a as f64 * x[0].abs().powi(a - 1) * s]]
            }
            EntryKind::DoubleWell => {
                if x[0].abs() <= ACTIVITY_TOL {
                    vec![vec![2.0 * (x[0] - 1.0)], vec![2.0 * (x[0] + 1.0)]]
                } else if x[0] > 0.0 {
                    vec![vec![2.0 * (x[0] - 1.0)]]
                } else {
                    vec![vec![2.0 * (x[0] + 1.0)]]
                }
            }
            EntryKind::L1TwoD => {
                let mut verts = Vec::new();
                for &sx in &sign_set(x[0]) {
                    for &sy in &sign_set(x[1]) {
                        verts.push(vec![sx, sy]);
                    }
                }
                verts
            }
            EntryKind::MaxQuad => {
                let q1 = x[0] * x[0] + (x[1] - 1.0) * (x[1] - 1.0);
                let q2 = x[0] * x[0] + (x[1] + 1.0) * (x[1] + 1.0);
                let m = q1.max(q2);
                let mut verts = Vec::new();
                if q1 >= m - ACTIVITY_TOL {
                    verts.push(vec![2.0 * x[0], 2.0 * (x[1] - 1.0)]);
                }
                if q2 >= m - ACTIVITY_TOL {
                    verts.push(vec![2.0 * x[0], 2.0 * (x[1] + 1.0)]);
                }
                verts
            }
            EntryKind::RidgeNc => {
                let gy = 4.0 * x[1] * (x[1] * x[1] - 1.0);
                sign_set(x[0]).iter().map(|&s| vec![s, gy]).collect()
            }
            EntryKind::SqrtLike => {
                let r = x[0].abs();
                if r <= ACTIVITY_TOL {
                    vec![vec![-0.5], vec![0.5]]
                } else {
                    let s = if x[0] > 0.0 { 1.0 } else { -1.0 };
                    let g = if r < 1.0 { 0.5 } else { 0.5 / r.sqrt() };
                    vec![vec![s * g]]
                }
            }
        };
        Ok(Polytope::new(verts).expect("catalog vertices are well-formed"))
    }

    /// dist(0, clarke(x)).
    pub fn subgrad_dist_origin(&self, x: &[f64]) -> Result<f64, CatalogError> {
        Ok(self.clarke(x)?.dist_origin())
    }

    /// Distance from x to the analytic critical set.
    pub fn dist_to_crit(&self, x: &[f64]) -> Result<f64, CatalogError> {
        self.check_dim(x)?;
        Ok(dist_to_components(&self.crit_points, x))
    }

    /// All grid nodes belonging to the eps-critical set.
    pub fn crit_eps_grid(&self, epsilon: f64, grid: &GridSpec) -> Vec<Vec<f64>> {
        let mut nodes = Vec::new();
        grid.for_each_node(self.dim, |x, _| {
            let d = self.clarke(x).expect("grid node has the entry dimension").dist_origin();
            if d <= epsilon {
                nodes.push(x.to_vec());
            }
        });
        nodes
    }

    /// Grid approximation of the eps-critical values.
    pub fn vcrit_eps_approx(
        &self,
        epsilon: f64,
        grid: &GridSpec,
    ) -> Result<VcritApprox, CatalogError> {
        let mut values = Vec::new();
        let mut max_norm = 0.0f64;
        grid.for_each_node(self.dim, |x, _| {
            let p = self.clarke(x).expect("grid node has the entry dimension");
            for v in p.vertices() {
                max_norm = max_norm.max(norm(v));
            }
            if p.dist_origin() <= epsilon {
                values.push(self.eval(x).unwrap());
            }
        });
        if values.is_empty() {
            return Err(CatalogError::EmptyCriticalSet { epsilon });
        }
        values.sort_by(|a, b| a.partial_cmp(b).unwrap());
        values.dedup();
        let value_cell = max_norm * grid.cell() * (self.dim as f64).sqrt();
        Ok(VcritApprox {
            values,
            subgrad_norm_bound: max_norm,
            value_cell,
        })
    }

    /// Distance from a value to the grid-approximated eps-critical values.
    pub fn dist_value_to_vcrit_eps(
        &self,
        value: f64,
        epsilon: f64,
        grid: &GridSpec,
    ) -> Result<f64, CatalogError> {
        Ok(self.vcrit_eps_approx(epsilon, grid)?.dist_to(value))
    }

    /// Boundary-shell probe for boundedness of the eps-critical set: any
    /// boundary node inside the set is evidence that the set escapes the box.
    pub fn check_crit_eps_bounded(&self, epsilon: f64, grid: &GridSpec) -> BoundednessCheck {
        let mut witnesses = Vec::new();
        grid.for_each_node(self.dim, |x, boundary| {
            if boundary
                && self.clarke(x).expect("grid node has the entry dimension").dist_origin()
                    <= epsilon
            {
                witnesses.push(x.to_vec());
            }
        });
        let verdict = if witnesses.is_empty() {
            BoundednessVerdict::Bounded
        } else {
            BoundednessVerdict::UnboundedEvidence
        };
        BoundednessCheck { verdict, witnesses }
    }

    pub fn summary(&self) -> CatalogSummary {
        CatalogSummary {
            name: self.name,
            dim: self.dim,
            lipschitz_on_box: self.lipschitz_on_box,
            box_radius: self.box_radius,
            min_value: self.min_value,
            convex: self.convex,
            diagnostic_only: self.diagnostic_only,
            crit_values: self.crit_values.clone(),
            kl: self.kl,
            mr: self.mr,
            error_bound: self.error_bound,
        }
    }
}

/// JSON-friendly metadata for the CLI catalog listing.
#[derive(Debug, Clone, Serialize)]
pub struct CatalogSummary {
    pub name: &'static str,
    pub dim: usize,
    pub lipschitz_on_box: f64,
    pub box_radius: f64,
    pub min_value: f64,
    pub convex: bool,
    pub diagnostic_only: bool,
    pub crit_values: Vec<f64>,
    pub kl: Option<KlParams>,
    pub mr: Option<MrParams>,
    pub error_bound: Option<ErrorBoundParams>,
}

fn sign_set(v: f64) -> Vec<f64> {
    if v.abs() <= ACTIVITY_TOL {
        vec![-1.0, 1.0]
    } else if v > 0.0 {
        vec![1.0]
    } else {
        vec![-1.0]
    }
}

fn pt(coords: &[f64]) -> CritComponent {
    CritComponent::Point(coords.to_vec())
}

fn build_abs() -> CatalogFunction {
    CatalogFunction {
        kind: EntryKind::Abs,
        name: "abs",
        dim: 1,
        crit_points: vec![pt(&[0.0])],
        crit_values: vec![0.0],
        lipschitz_on_box: 1.0,
        box_radius: 10.0,
        kl: Some(KlParams { theta: 0.0, c: 1.0, valid_band: 0.5, source: ParamSource::Analytic }),
        mr: Some(MrParams { beta: 1.0, c: 1.0, valid_band: 0.5, source: ParamSource::Analytic }),
        error_bound: Some(ErrorBoundParams { a: 1.0, c: 1.0, source: ParamSource::Analytic }),
        min_value: 0.0,
        argmin: Some(vec![pt(&[0.0])]),
        convex: true,
        diagnostic_only: false,
    }
}

fn build_power(a: i32) -> CatalogFunction {
    let af = a as f64;
    let name: &'static str = match a {
        2 => "power_2",
        3 => "power_3",
        4 => "power_4",
        _ => unreachable!("catalog only ships powers 2..4"),
    };
    CatalogFunction {
        kind: EntryKind::Power(a),
        name,
        dim: 1,
        crit_points: vec![pt(&[0.0])],
        crit_values: vec![0.0],
        lipschitz_on_box: af * 10.0f64.powi(a - 1),
        box_radius: 10.0,
        // theta = 1 - 1/a and beta = 1/(a-1); the constants below make both
        // inequalities hold with equality along |x|^a.
        kl: Some(KlParams {
            theta: 1.0 - 1.0 / af,
            c: 1.0 / af,
            valid_band: 1.0,
            source: ParamSource::Analytic,
        }),
        mr: Some(MrParams {
            beta: 1.0 / (af - 1.0),
            c: af.powf(-1.0 / (af - 1.0)),
            valid_band: 1.0,
            source: ParamSource::Analytic,
        }),
        error_bound: Some(ErrorBoundParams { a: 1.0 / af, c: 2.0, source: ParamSource::Analytic }),
        min_value: 0.0,
        argmin: Some(vec![pt(&[0.0])]),
        convex: true,
        diagnostic_only: false,
    }
}

fn build_double_well() -> CatalogFunction {
    CatalogFunction {
        kind: EntryKind::DoubleWell,
        name: "double_well",
        dim: 1,
        crit_points: vec![pt(&[-1.0]), pt(&[0.0]), pt(&[1.0])],
        crit_values: vec![0.0, 1.0],
        lipschitz_on_box: 18.0,
        box_radius: 10.0,
        kl: Some(KlParams {
            theta: 0.5,
            c: 0.5,
            valid_band: 0.2,
            source: ParamSource::GridCertified,
        }),
        mr: Some(MrParams {
            beta: 1.0,
            c: 0.5,
            valid_band: 0.2,
            source: ParamSource::GridCertified,
        }),
        error_bound: None,
        min_value: 0.0,
        argmin: None,
        convex: false,
        diagnostic_only: false,
    }
}

fn build_l1_2d() -> CatalogFunction {
    CatalogFunction {
        kind: EntryKind::L1TwoD,
        name: "l1_2d",
        dim: 2,
        crit_points: vec![pt(&[0.0, 0.0])],
        crit_values: vec![0.0],
        lipschitz_on_box: 2.0f64.sqrt(),
        box_radius: 10.0,
        kl: Some(KlParams {
            theta: 0.0,
            c: 1.0,
            valid_band: 0.5,
            source: ParamSource::GridCertified,
        }),
        mr: Some(MrParams {
            beta: 1.0,
            c: 1.0,
            valid_band: 0.5,
            source: ParamSource::GridCertified,
        }),
        error_bound: Some(ErrorBoundParams { a: 1.0, c: 1.0, source: ParamSource::Analytic }),
        min_value: 0.0,
        argmin: Some(vec![pt(&[0.0, 0.0])]),
        convex: true,
        diagnostic_only: false,
    }
}

fn build_max_quad() -> CatalogFunction {
    CatalogFunction {
        kind: EntryKind::MaxQuad,
        name: "max_quad",
        dim: 2,
        crit_points: vec![pt(&[0.0, 0.0])],
        crit_values: vec![1.0],
        lipschitz_on_box: 884.0f64.sqrt(),
        box_radius: 10.0,
        kl: Some(KlParams {
            theta: 0.5,
            c: 0.5,
            valid_band: 0.5,
            source: ParamSource::GridCertified,
        }),
        mr: Some(MrParams {
            beta: 1.0,
            c: 0.5,
            valid_band: 0.5,
            source: ParamSource::GridCertified,
        }),
        error_bound: Some(ErrorBoundParams {
            a: 0.5,
            c: 2.0,
            source: ParamSource::GridCertified,
        }),
        min_value: 1.0,
        argmin: Some(vec![pt(&[0.0, 0.0])]),
        convex: true,
        diagnostic_only: false,
    }
}

fn build_ridge_nc() -> CatalogFunction {
    CatalogFunction {
        kind: EntryKind::RidgeNc,
        name: "ridge_nc",
        dim: 2,
        crit_points: vec![pt(&[0.0, -1.0]), pt(&[0.0, 0.0]), pt(&[0.0, 1.0])],
        crit_values: vec![0.0, 1.0],
        lipschitz_on_box: (1.0f64 + 3960.0 * 3960.0).sqrt(),
        box_radius: 10.0,
        kl: Some(KlParams {
            theta: 0.5,
            c: 0.5,
            valid_band: 0.05,
            source: ParamSource::GridCertified,
        }),
        // c = 1 is tight: points (x, 1) with x near 1 carry the critical
        // value 1 while sitting at distance ~1 from the critical set with a
        // unit subgradient.
        mr: Some(MrParams {
            beta: 1.0,
            c: 1.0,
            valid_band: 0.05,
            source: ParamSource::GridCertified,
        }),
        error_bound: None,
        min_value: 0.0,
        argmin: None,
        convex: false,
        diagnostic_only: false,
    }
}

fn build_sqrt_like() -> CatalogFunction {
    CatalogFunction {
        kind: EntryKind::SqrtLike,
        name: "sqrt_like",
        dim: 1,
        crit_points: vec![pt(&[0.0])],
        crit_values: vec![0.5],
        lipschitz_on_box: 0.5,
        box_radius: 10.0,
        kl: None,
        mr: None,
        error_bound: None,
        min_value: 0.5,
        argmin: None,
        convex: false,
        // Exists to exhibit an unbounded eps-critical set under the
        // boundary-shell probe; excluded from solver batteries.
        diagnostic_only: true,
    }
}

static CATALOG: OnceLock<Vec<CatalogFunction>> = OnceLock::new();

/// The full catalog, in a fixed order.
pub fn catalog() -> &'static [CatalogFunction] {
    CATALOG.get_or_init(|| {
        vec![
            build_abs(),
            build_power(2),
            build_power(3),
            build_power(4),
            build_double_well(),
            build_l1_2d(),
            build_max_quad(),
            build_ridge_nc(),
            build_sqrt_like(),
        ]
    })
}

pub fn by_name(name: &str) -> Option<&'static CatalogFunction> {
    catalog().iter().find(|f| f.name == name)
}

pub fn names() -> Vec<&'static str> {
    catalog().iter().map(|f| f.name).collect()
}
