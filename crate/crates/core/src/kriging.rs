//! Ordinary Kriging for a single target position.
//!
//! The system for `N` known points is the usual Lagrangian form
//!
//! ```text
//! | G   1 | |w |   |g|
//! | 1'  0 | |mu| = |1|
//! ```
//!
//! with `G[i][j] = gamma(|p_i - p_j|)` and `g[i] = gamma(|p_i - target|)`.
//! The prediction is `sum(w_i * v_i)` and the Kriging variance is
//! `sum(w_i * g_i) + mu`.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::linalg::LuFactors;
use crate::raster::{distance, PixelSample};
use crate::variogram::VariogramModel;

/// Pivots below this (on the sill-normalised system) count as singular.
pub const PIVOT_TOL: f64 = 1e-12;
/// Allowed drift of the weight sum from one.
pub const UNIT_SUM_TOL: f64 = 1e-10;
/// Relative jitter added to off-diagonal entries on the retry.
const JITTER: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct KrigingSystem {
    /// Row-major `(N + 1) x (N + 1)` matrix.
    pub matrix: Vec<f64>,
    pub rhs: Vec<f64>,
    pub points: Vec<PixelSample>,
    pub target: (usize, usize),
    pub model: VariogramModel,
}

impl KrigingSystem {
    /// Number of known points `N`.
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points.len() + 1
    }

    pub fn at(&self, row: usize, col: usize) -> f64 {
        self.matrix[row * self.dim() + col]
    }
}

pub fn assemble_system(points: &[PixelSample], target: (usize, usize), model: &VariogramModel) -> Result<KrigingSystem> {
    if points.is_empty() {
        return Err(Error::InvalidParameter("kriging needs at least one known point".into()));
    }
    let mut seen = HashSet::with_capacity(points.len());
    for p in points {
        if !seen.insert((p.row, p.col)) {
            return Err(Error::DuplicatePosition(p.row, p.col));
        }
    }

    let n = points.len();
    let m = n + 1;
    let mut matrix = vec![0.0; m * m];
    for i in 0..n {
        for j in i + 1..n {
            let g = model.eval(distance((points[i].row, points[i].col), (points[j].row, points[j].col)));
            matrix[i * m + j] = g;
            matrix[j * m + i] = g;
        }
        matrix[i * m + n] = 1.0;
        matrix[n * m + i] = 1.0;
    }
    let mut rhs: Vec<f64> = points.iter().map(|p| model.eval(p.distance_to(target.0, target.1))).collect();
    rhs.push(1.0);

    Ok(KrigingSystem { matrix, rhs, points: points.to_vec(), target, model: *model })
}

/// Weights of a solved system, together with the target-side semivariances
/// needed to evaluate the Kriging variance.
#[derive(Debug, Clone, PartialEq)]
pub struct KrigingWeights {
    pub weights: Vec<f64>,
    pub lagrange: f64,
    pub target_gamma: Vec<f64>,
    /// Set when the direct solve failed and inverse-distance weights were used.
    pub degraded: bool,
}

/// Solves for the BLUE weights.
///
/// Falls back in two steps when the system is numerically singular: first a
/// retry with `1e-6 * sill` added to the off-diagonal semivariances, then
/// normalised inverse-square-distance weights with `degraded` set.
pub fn solve_weights(system: &KrigingSystem) -> KrigingWeights {
    let n = system.len();
    let target_gamma = system.rhs[..n].to_vec();

    if let Some(hit) = system.points.iter().position(|p| (p.row, p.col) == system.target) {
        let mut weights = vec![0.0; n];
        weights[hit] = 1.0;
        return KrigingWeights { weights, lagrange: 0.0, target_gamma, degraded: false };
    }

    let scale = if system.model.sill > 0.0 { system.model.sill } else { 1.0 };
    if let Some((weights, lagrange)) = try_solve(system, scale, 0.0) {
        return KrigingWeights { weights, lagrange, target_gamma, degraded: false };
    }
    if let Some((weights, lagrange)) = try_solve(system, scale, JITTER) {
        return KrigingWeights { weights, lagrange, target_gamma, degraded: false };
    }

    KrigingWeights { weights: inverse_distance_weights(system), lagrange: 0.0, target_gamma, degraded: true }
}

/// Solves the system with every semivariance divided by `scale`, adding
/// `jitter` (relative to the sill) to the off-diagonal entries of the point block.
fn try_solve(system: &KrigingSystem, scale: f64, jitter: f64) -> Option<(Vec<f64>, f64)> {
    let n = system.len();
    let m = n + 1;
    let mut a = system.matrix.clone();
    for i in 0..n {
        for j in 0..n {
            a[i * m + j] /= scale;
            if i != j {
                a[i * m + j] += jitter;
            }
        }
    }
    let mut b = system.rhs.clone();
    for v in &mut b[..n] {
        *v /= scale;
    }

    let lu = LuFactors::factor(&a, m, PIVOT_TOL)?;
    let x = lu.solve_refined(&a, &b, 2);
    if x.iter().any(|v| !v.is_finite()) {
        return None;
    }
    let sum: f64 = x[..n].iter().sum();
    if (sum - 1.0).abs() >= UNIT_SUM_TOL {
        return None;
    }
    Some((x[..n].to_vec(), x[n] * scale))
}

fn inverse_distance_weights(system: &KrigingSystem) -> Vec<f64> {
    let raw: Vec<f64> = system
        .points
        .iter()
        .map(|p| {
            let d = p.distance_to(system.target.0, system.target.1);
            1.0 / (d * d)
        })
        .collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / total).collect()
}

/// Applies the weights: returns `(prediction, variance)`. Round-off negatives
/// in the variance are clamped to zero.
pub fn predict(weights: &KrigingWeights, values: &[f64]) -> Result<(f64, f64)> {
    if weights.weights.len() != values.len() {
        return Err(Error::LengthMismatch(weights.weights.len(), values.len()));
    }
    let predicted = weights.weights.iter().zip(values).map(|(w, v)| w * v).sum();
    let variance: f64 =
        weights.weights.iter().zip(&weights.target_gamma).map(|(w, g)| w * g).sum::<f64>() + weights.lagrange;
    Ok((predicted, variance.max(0.0)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct KrigingSolution {
    pub weights: Vec<f64>,
    pub lagrange: f64,
    /// Unclamped prediction.
    pub predicted: f64,
    pub variance: f64,
    pub degraded: bool,
}

/// Assemble, solve and predict in one go.
pub fn krige(points: &[PixelSample], target: (usize, usize), model: &VariogramModel) -> Result<KrigingSolution> {
    let system = assemble_system(points, target, model)?;
    let w = solve_weights(&system);
    let values: Vec<f64> = points.iter().map(|p| p.value).collect();
    let (predicted, variance) = predict(&w, &values)?;
    Ok(KrigingSolution { weights: w.weights, lagrange: w.lagrange, predicted, variance, degraded: w.degraded })
}
