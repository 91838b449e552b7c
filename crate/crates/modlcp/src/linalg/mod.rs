//! Sparse matrix storage, triangular solves, matrix classification and the
//! nonnegative spectral-radius estimator used by the convergence checks.

mod classify;
mod dense;
mod mm;
mod power;
mod sparse;

pub use classify::{classify, MatrixClass, DEFAULT_CLASS_TOL};
pub use dense::DenseLu;
pub use mm::{read_matrix_market, read_vector, write_matrix_market, write_vector};
pub use power::{
    power_radius, spectral_radius_nonneg, spectral_radius_nonneg_detailed, RadiusEstimate,
    DEFAULT_POWER_MAX_ITER, DEFAULT_POWER_TOL,
};
pub use sparse::{
    combine_dlu, comparison_matrix, lower_triangular_solve, split_dlu, upper_triangular_solve,
    SparseMatrix,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("invalid sparse structure: {0}")]
    InvalidStructure(String),
    #[error("singular system: near-zero diagonal at row {row}")]
    SingularDiagonal { row: usize },
    #[error("zero diagonal at row {row}: Jacobi iteration matrix undefined")]
    ZeroDiagonal { row: usize },
    #[error("diagonal entry {index} is not strictly positive: {value}")]
    NonPositiveDiagonal { index: usize, value: f64 },
    #[error("diagonal entry {index} is negative: {value}")]
    NegativeDiagonal { index: usize, value: f64 },
    #[error("matrix has a negative entry at ({row}, {col}); nonnegative input required")]
    NegativeEntry { row: usize, col: usize },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("matrix market parse error: {0}")]
    MatrixMarket(String),
}

/// Positive or nonnegative diagonal matrix stored as its diagonal entries.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalMatrix {
    diag: Vec<f64>,
}

impl DiagonalMatrix {
    /// Diagonal with arbitrary finite entries (e.g. the D factor of `split_dlu`).
    pub fn new(diag: Vec<f64>) -> Result<Self, LinalgError> {
        for (i, &v) in diag.iter().enumerate() {
            if !v.is_finite() {
                return Err(LinalgError::NonFinite { row: i, col: i });
            }
        }
        Ok(Self { diag })
    }

    /// Strictly positive diagonal, as required of the omega parameter matrices.
    pub fn positive(diag: Vec<f64>) -> Result<Self, LinalgError> {
        for (i, &v) in diag.iter().enumerate() {
            if !(v > 0.0) || !v.is_finite() {
                return Err(LinalgError::NonPositiveDiagonal { index: i, value: v });
            }
        }
        Ok(Self { diag })
    }

    /// Nonnegative diagonal; zero entries admissible (the omega-3 role).
    pub fn nonnegative(diag: Vec<f64>) -> Result<Self, LinalgError> {
        for (i, &v) in diag.iter().enumerate() {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(LinalgError::NegativeDiagonal { index: i, value: v });
            }
        }
        Ok(Self { diag })
    }

    /// k * I of size n.
    pub fn scalar(n: usize, k: f64) -> Self {
        Self { diag: vec![k; n] }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn entries(&self) -> &[f64] {
        &self.diag
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            diag: self.diag.iter().map(|v| v * s).collect(),
        }
    }

    /// Componentwise product D*x.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.diag.len());
        self.diag.iter().zip(x).map(|(d, v)| d * v).collect()
    }

    /// Componentwise D^{-1} x. Caller guarantees nonzero entries.
    pub fn solve_vec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.diag.len());
        self.diag.iter().zip(x).map(|(d, v)| v / d).collect()
    }

    pub fn all_positive(&self) -> bool {
        self.diag.iter().all(|&v| v > 0.0)
    }
}
