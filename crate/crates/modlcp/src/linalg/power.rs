//! Spectral radius estimation for entrywise nonnegative matrices.
//!
//! The estimator runs power iteration on a positively shifted copy of the
//! matrix and tracks the Collatz-Wielandt bracket
//! `min_i (Ax)_i/x_i <= rho <= max_i (Ax)_i/x_i` (valid for x > 0). The
//! shift keeps the iterate strictly positive so the bracket stays defined,
//! and for nonnegative A the Perron root shifts exactly: rho(A + eI) =
//! rho(A) + e, so it is subtracted back out at the end. For reducible
//! matrices the bracket need not close; the upper bound still stabilizes at
//! the radius, so stabilization of the upper estimate is the fallback
//! convergence test.

use super::sparse::SparseMatrix;
use super::LinalgError;

pub const DEFAULT_POWER_TOL: f64 = 1e-10;
pub const DEFAULT_POWER_MAX_ITER: usize = 50_000;

#[derive(Debug, Clone, Copy)]
pub struct RadiusEstimate {
    /// Best estimate of the spectral radius.
    pub estimate: f64,
    /// Collatz-Wielandt lower bound from the last iterate.
    pub lower: f64,
    /// Collatz-Wielandt upper bound from the last iterate.
    pub upper: f64,
    pub iterations: usize,
    /// False when the iteration hit max_iter without meeting either test;
    /// the estimate is then reported with a warning, never silently.
    pub converged: bool,
}

/// Power-iteration radius estimate for a nonnegative matrix given as a
/// matvec. Start vector is e = (1, ..., 1).
pub fn power_radius(
    n: usize,
    apply: impl Fn(&[f64], &mut [f64]),
    tol: f64,
    max_iter: usize,
) -> RadiusEstimate {
    assert!(tol > 0.0);
    if n == 0 {
        return RadiusEstimate {
            estimate: 0.0,
            lower: 0.0,
            upper: 0.0,
            iterations: 0,
            converged: true,
        };
    }
    let mut x = vec![1.0; n];
    let mut y = vec![0.0; n];
    apply(&x, &mut y);
    let scale = y.iter().cloned().fold(0.0, f64::max);
    if scale == 0.0 {
        // Ae = 0 with A >= 0 forces A = 0
        return RadiusEstimate {
            estimate: 0.0,
            lower: 0.0,
            upper: 0.0,
            iterations: 1,
            converged: true,
        };
    }
    let shift = 0.01 * scale;
    let mut prev_upper = f64::INFINITY;
    let mut stable = 0usize;
    let (mut lower, mut upper) = (0.0, f64::INFINITY);
    for it in 1..=max_iter {
        apply(&x, &mut y);
        for i in 0..n {
            y[i] += shift * x[i];
        }
        lower = f64::INFINITY;
        upper = 0.0;
        for i in 0..n {
            let r = y[i] / x[i];
            lower = lower.min(r);
            upper = upper.max(r);
        }
        let certified = upper - lower <= tol * upper.max(1.0);
        let stabilized = {
            if (upper - prev_upper).abs() <= 0.1 * tol * upper.max(1.0) {
                stable += 1;
            } else {
                stable = 0;
            }
            stable >= 20
        };
        if certified || stabilized {
            return RadiusEstimate {
                estimate: (upper - shift).max(0.0),
                lower: (lower - shift).max(0.0),
                upper: (upper - shift).max(0.0),
                iterations: it,
                converged: true,
            };
        }
        prev_upper = upper;
        let norm = y.iter().cloned().fold(0.0, f64::max);
        for i in 0..n {
            x[i] = y[i] / norm;
        }
    }
    RadiusEstimate {
        estimate: (upper - shift).max(0.0),
        lower: (lower - shift).max(0.0),
        upper: (upper - shift).max(0.0),
        iterations: max_iter,
        converged: false,
    }
}

/// Radius estimate for a nonnegative sparse matrix.
pub fn spectral_radius_nonneg_detailed(
    a: &SparseMatrix,
    tol: f64,
    max_iter: usize,
) -> Result<RadiusEstimate, LinalgError> {
    for i in 0..a.dim() {
        let (cols, vals) = a.row(i);
        for (&j, &v) in cols.iter().zip(vals) {
            if v < 0.0 {
                return Err(LinalgError::NegativeEntry { row: i, col: j });
            }
        }
    }
    Ok(power_radius(
        a.dim(),
        |x, y| a.matvec_into(x, y),
        tol,
        max_iter,
    ))
}

/// Radius estimate, collapsed to the scalar the classification rules need.
pub fn spectral_radius_nonneg(
    a: &SparseMatrix,
    tol: f64,
    max_iter: usize,
) -> Result<f64, LinalgError> {
    spectral_radius_nonneg_detailed(a, tol, max_iter).map(|r| r.estimate)
}
