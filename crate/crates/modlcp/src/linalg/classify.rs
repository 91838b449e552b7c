//! Z/M/H/H+ matrix classification.
//!
//! The M-matrix test used here is rho(D^{-1}|B|) < 1 on the comparison
//! matrix, the same Jacobi radius the convergence regions are stated in.

use super::power::{spectral_radius_nonneg, DEFAULT_POWER_MAX_ITER, DEFAULT_POWER_TOL};
use super::sparse::SparseMatrix;
use super::LinalgError;

/// Strict-inequality margin for the "rho < 1" tests. Matrices inside the
/// margin are reported not-H with `borderline` set instead of guessed.
pub const DEFAULT_CLASS_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy)]
pub struct MatrixClass {
    pub is_z: bool,
    pub is_m: bool,
    pub is_h: bool,
    pub is_h_plus: bool,
    /// rho(D^{-1}|B|) where <A> = D - |B|.
    pub jacobi_rho: f64,
    /// Jacobi radius landed within the tolerance band around 1.
    pub borderline: bool,
}

pub fn classify(a: &SparseMatrix, tol: f64) -> Result<MatrixClass, LinalgError> {
    let n = a.dim();
    let diag = a.diagonal_entries();
    for (i, &d) in diag.iter().enumerate() {
        if d == 0.0 {
            return Err(LinalgError::ZeroDiagonal { row: i });
        }
    }

    let mut is_z = true;
    let mut jacobi = Vec::with_capacity(a.nnz());
    for i in 0..n {
        let (cols, vals) = a.row(i);
        for (&j, &v) in cols.iter().zip(vals) {
            if j != i {
                if v > 0.0 {
                    is_z = false;
                }
                jacobi.push((i, j, v.abs() / diag[i].abs()));
            }
        }
    }
    let jac = SparseMatrix::from_triplets(n, &jacobi)?;
    let jacobi_rho = spectral_radius_nonneg(&jac, DEFAULT_POWER_TOL, DEFAULT_POWER_MAX_ITER)?;

    let is_h = jacobi_rho < 1.0 - tol;
    let borderline = !is_h && jacobi_rho < 1.0 + tol;
    let all_diag_positive = diag.iter().all(|&d| d > 0.0);
    Ok(MatrixClass {
        is_z,
        is_m: is_z && is_h && all_diag_positive,
        is_h,
        is_h_plus: is_h && all_diag_positive,
        jacobi_rho,
        borderline,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(n: usize, dense: &[f64]) -> SparseMatrix {
        SparseMatrix::from_dense(n, dense).unwrap()
    }

    #[test]
    fn laplacian_block_is_m_and_h_plus() {
        let a = mat(2, &[2.0, -1.0, -1.0, 2.0]);
        let c = classify(&a, DEFAULT_CLASS_TOL).unwrap();
        assert!(c.is_m && c.is_h_plus && c.is_z);
        assert!((c.jacobi_rho - 0.5).abs() < 1e-9);
    }

    #[test]
    fn dominated_diagonal_is_not_h() {
        let a = mat(2, &[1.0, 2.0, 2.0, 1.0]);
        let c = classify(&a, DEFAULT_CLASS_TOL).unwrap();
        assert!(!c.is_h && !c.is_m);
        assert!((c.jacobi_rho - 2.0).abs() < 1e-8);
    }

    #[test]
    fn identity_is_m() {
        let a = SparseMatrix::identity(4);
        let c = classify(&a, DEFAULT_CLASS_TOL).unwrap();
        assert!(c.is_m);
        assert_eq!(c.jacobi_rho, 0.0);
    }

    #[test]
    fn zero_diagonal_rejected() {
        let a = mat(2, &[0.0, 1.0, 1.0, 1.0]);
        assert!(matches!(
            classify(&a, DEFAULT_CLASS_TOL),
            Err(LinalgError::ZeroDiagonal { row: 0 })
        ));
    }

    #[test]
    fn strictly_dominant_z_matrix_is_m() {
        // positive diagonal, nonpositive off-diagonals, strict row dominance
        let a = mat(
            3,
            &[5.0, -1.0, -2.0, -1.0, 4.0, -1.5, 0.0, -3.0, 3.5],
        );
        let c = classify(&a, DEFAULT_CLASS_TOL).unwrap();
        assert!(c.is_m);
    }

    #[test]
    fn negative_diagonal_h_but_not_h_plus() {
        let a = mat(2, &[-4.0, 1.0, 1.0, -4.0]);
        let c = classify(&a, DEFAULT_CLASS_TOL).unwrap();
        assert!(c.is_h && !c.is_h_plus && !c.is_m);
    }
}
