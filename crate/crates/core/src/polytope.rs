//! Exact convex-polytope arithmetic on vertex lists: membership distance and
//! minimum-norm elements of subdifferentials.
//!
//! The catalog only ever produces hulls of at most 16 vertices in dimension
//! at most 4, so everything here is dense and direct. The minimum-norm point
//! is computed by Wolfe's active-set algorithm over the vertex set, with a
//! projected-gradient fallback on the simplex of convex weights when the
//! active-set linear algebra degenerates.

use thiserror::Error;

use crate::vecmath::{dist, dot, norm, norm_sq, sub};

/// Squared-norm decrease below which a min-norm solve is considered converged.
pub const MIN_NORM_TOL: f64 = 1e-12;

/// Duplicate vertices closer than this are merged before solving.
pub const DEDUP_TOL: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolytopeError {
    #[error("polytope needs at least one vertex")]
    Empty,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// Convex hull of an explicit vertex list in R^p.
#[derive(Debug, Clone, PartialEq)]
pub struct Polytope {
    vertices: Vec<Vec<f64>>,
    dim: usize,
}

impl Polytope {
    /// Builds a polytope from a nonempty vertex list of uniform dimension.
    /// Vertices within `DEDUP_TOL` of an earlier vertex are dropped.
    pub fn new(vertices: Vec<Vec<f64>>) -> Result<Self, PolytopeError> {
        let first = vertices.first().ok_or(PolytopeError::Empty)?;
        let dim = first.len();
        let mut kept: Vec<Vec<f64>> = Vec::with_capacity(vertices.len());
        for v in &vertices {
            if v.len() != dim {
                return Err(PolytopeError::DimensionMismatch {
                    expected: dim,
                    got: v.len(),
                });
            }
            if kept.iter().all(|u| dist(u, v) > DEDUP_TOL) {
                kept.push(v.clone());
            }
        }
        Ok(Self { vertices: kept, dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    /// Euclidean projection of the origin onto the hull.
    pub fn min_norm_element(&self) -> Vec<f64> {
        min_norm_point(&self.vertices)
    }

    /// Euclidean projection of `w` onto the hull: argmin over the hull of
    /// the distance to `w`. Reduces to a min-norm solve on shifted vertices.
    pub fn project_point(&self, w: &[f64]) -> Result<Vec<f64>, PolytopeError> {
        if w.len() != self.dim {
            return Err(PolytopeError::DimensionMismatch {
                expected: self.dim,
                got: w.len(),
            });
        }
        let shifted: Vec<Vec<f64>> = self.vertices.iter().map(|v| sub(v, w)).collect();
        let q = min_norm_point(&shifted);
        Ok(q.iter().zip(w).map(|(qi, wi)| qi + wi).collect())
    }

    /// dist(0, hull) = norm of the min-norm element.
    pub fn dist_origin(&self) -> f64 {
        norm(&self.min_norm_element())
    }

    /// Distance from `w` to the hull.
    pub fn dist_point(&self, w: &[f64]) -> Result<f64, PolytopeError> {
        let p = self.project_point(w)?;
        Ok(dist(&p, w))
    }
}

/// Wolfe's minimum-norm-point algorithm over a finite vertex set.
///
/// Ties in vertex selection break toward the lowest index so that solves are
/// reproducible. Falls back to projected gradient on the weight simplex if
/// the active-set system degenerates or the iteration cap is hit.
fn min_norm_point(vertices: &[Vec<f64>]) -> Vec<f64> {
    let m = vertices.len();
    let scale = 1.0 + vertices.iter().map(|v| norm_sq(v)).fold(0.0, f64::max);
    let tol = MIN_NORM_TOL * scale;

    // Initial active set: the lowest-index vertex of minimum norm.
    let mut best = 0;
    for (i, v) in vertices.iter().enumerate() {
        if norm_sq(v) < norm_sq(&vertices[best]) {
            best = i;
        }
    }
    let mut active: Vec<usize> = vec![best];
    let mut weights: Vec<f64> = vec![1.0];
    let mut x = vertices[best].clone();

    for _major in 0..1000 {
        // Linear minimization over all vertices.
        let mut j = 0;
        let mut j_val = dot(&x, &vertices[0]);
        for (i, v) in vertices.iter().enumerate().skip(1) {
            let val = dot(&x, v);
            if val < j_val {
                j = i;
                j_val = val;
            }
        }
        if j_val >= norm_sq(&x) - tol {
            return x;
        }
        if !active.contains(&j) {
            active.push(j);
            weights.push(0.0);
        }

        // Minor cycle: move to the affine minimizer, dropping vertices whose
        // weight would go negative, until the minimizer is a convex combination.
        let mut minor_ok = false;
        for _minor in 0..(m + 2) {
            let mu = match affine_minimizer(vertices, &active) {
                Some(mu) => mu,
                None => return simplex_pgd(vertices),
            };
            if mu.iter().all(|&c| c >= -1e-12) {
                weights = mu.iter().map(|&c| c.max(0.0)).collect();
                x = combine(vertices, &active, &weights);
                minor_ok = true;
                break;
            }
            let mut theta = 1.0f64;
            for (i, (&lam, &m_i)) in weights.iter().zip(&mu).enumerate() {
                let _ = i;
                if m_i < lam {
                    let t = lam / (lam - m_i);
                    if t < theta {
                        theta = t;
                    }
                }
            }
            for (lam, &m_i) in weights.iter_mut().zip(&mu) {
                *lam = (1.0 - theta) * *lam + theta * m_i;
            }
            // Drop vertices whose weight hit zero; keep at least one.
            let mut keep_active = Vec::with_capacity(active.len());
            let mut keep_weights = Vec::with_capacity(active.len());
            for (idx, lam) in active.iter().zip(&weights) {
                if *lam > 1e-14 {
                    keep_active.push(*idx);
                    keep_weights.push(*lam);
                }
            }
            if keep_active.is_empty() {
                keep_active.push(active[0]);
                keep_weights.push(1.0);
            }
            active = keep_active;
            let total: f64 = keep_weights.iter().sum();
            weights = keep_weights.iter().map(|w| w / total).collect();
            x = combine(vertices, &active, &weights);
        }
        if !minor_ok {
            return simplex_pgd(vertices);
        }
    }
    simplex_pgd(vertices)
}

fn combine(vertices: &[Vec<f64>], active: &[usize], weights: &[f64]) -> Vec<f64> {
    let dim = vertices[0].len();
    let mut x = vec![0.0; dim];
    for (&idx, &w) in active.iter().zip(weights) {
        for (xi, vi) in x.iter_mut().zip(&vertices[idx]) {
            *xi += w * vi;
        }
    }
    x
}

/// Affine minimizer of ||sum_i mu_i v_i||^2 subject to sum mu = 1 over the
/// active vertices, via the bordered Gram system. Returns None when the
/// system is numerically singular.
fn affine_minimizer(vertices: &[Vec<f64>], active: &[usize]) -> Option<Vec<f64>> {
    let s = active.len();
    let n = s + 1;
    // Rows: [0 1..1 | 1], [1 G_i. | 0].
    let mut a = vec![vec![0.0; n + 1]; n];
    for i in 0..s {
        a[0][i + 1] = 1.0;
        a[i + 1][0] = 1.0;
    }
    a[0][n] = 1.0;
    for i in 0..s {
        for k in 0..s {
            a[i + 1][k + 1] = dot(&vertices[active[i]], &vertices[active[k]]);
        }
    }
    solve_dense(&mut a).map(|sol| sol[1..].to_vec())
}

/// Gaussian elimination with partial pivoting on an augmented system.
fn solve_dense(a: &mut [Vec<f64>]) -> Option<Vec<f64>> {
    let n = a.len();
    let mut row_scale = 0.0f64;
    for row in a.iter() {
        for &v in &row[..n] {
            row_scale = row_scale.max(v.abs());
        }
    }
    let pivot_tol = 1e-13 * (1.0 + row_scale);
    for col in 0..n {
        let mut piv = col;
        for r in col + 1..n {
            if a[r][col].abs() > a[piv][col].abs() {
                piv = r;
            }
        }
        if a[piv][col].abs() <= pivot_tol {
            return None;
        }
        a.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            let (pivot_rows, rest) = a.split_at_mut(col + 1);
            let pivot_row = &pivot_rows[col];
            for (rc, pc) in rest[r - col - 1][col..=n].iter_mut().zip(&pivot_row[col..=n]) {
                *rc -= f * pc;
            }
        }
    }
    let mut sol = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = a[row][n];
        for c in row + 1..n {
            acc -= a[row][c] * sol[c];
        }
        sol[row] = acc / a[row][row];
    }
    Some(sol)
}

/// Projected gradient on the simplex of convex weights. Slower than Wolfe
/// but unconditionally stable; only reached on degenerate vertex sets.
fn simplex_pgd(vertices: &[Vec<f64>]) -> Vec<f64> {
    let m = vertices.len();
    let mut gram = vec![vec![0.0; m]; m];
    for i in 0..m {
        for k in 0..m {
            gram[i][k] = dot(&vertices[i], &vertices[k]);
        }
    }
    let lip = 2.0
        * gram
            .iter()
            .map(|row| row.iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
        + 1e-30;
    let step = 1.0 / lip;
    let mut lam = vec![1.0 / m as f64; m];
    let mut q_prev = f64::INFINITY;
    let mut stall = 0;
    for _ in 0..200_000 {
        let grad: Vec<f64> = (0..m).map(|i| 2.0 * dot(&gram[i], &lam)).collect();
        let moved: Vec<f64> = lam.iter().zip(&grad).map(|(l, g)| l - step * g).collect();
        lam = project_simplex(&moved);
        let q = dot(&lam, &(0..m).map(|i| dot(&gram[i], &lam)).collect::<Vec<_>>());
        if q_prev - q < 1e-16 * (1.0 + q.abs()) {
            stall += 1;
            if stall > 8 {
                break;
            }
        } else {
            stall = 0;
        }
        q_prev = q;
    }
    combine(vertices, &(0..m).collect::<Vec<_>>(), &lam)
}

/// Euclidean projection onto the probability simplex (sort-based).
fn project_simplex(y: &[f64]) -> Vec<f64> {
    let mut u = y.to_vec();
    u.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut cum = 0.0;
    let mut tau = 0.0;
    for (j, &uj) in u.iter().enumerate() {
        cum += uj;
        let t = (cum - 1.0) / (j as f64 + 1.0);
        if uj - t > 0.0 {
            tau = t;
        }
    }
    y.iter().map(|&v| (v - tau).max(0.0)).collect()
}
