//! LCP problem representation, the natural residual, the modulus change of
//! variables, and a brute-force active-set oracle for small instances.
//!
//! LCP(q, A): find z >= 0 with r = Az + q >= 0 and z^T r = 0.

use thiserror::Error;

use crate::linalg::{DenseLu, DiagonalMatrix, LinalgError, SparseMatrix};

#[derive(Debug, Error)]
pub enum LcpError {
    #[error("q has length {got}, matrix dimension is {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("known solution fails verification: {0}")]
    BadKnownSolution(String),
    #[error("gamma/omega must be strictly positive diagonal matrices")]
    NonPositiveParameter,
    #[error("enumeration oracle supports n <= {max}, got {got}")]
    TooLargeForOracle { max: usize, got: usize },
    #[error("enumeration oracle found no feasible active set (matrix may not be a P-matrix)")]
    NoFeasibleActiveSet,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// The pair (A, q), optionally with a known solution z* checked at
/// construction.
#[derive(Debug, Clone)]
pub struct LcpProblem {
    a: SparseMatrix,
    q: Vec<f64>,
    known_solution: Option<Vec<f64>>,
}

impl LcpProblem {
    pub fn new(a: SparseMatrix, q: Vec<f64>) -> Result<Self, LcpError> {
        if q.len() != a.dim() {
            return Err(LcpError::DimensionMismatch {
                expected: a.dim(),
                got: q.len(),
            });
        }
        Ok(Self {
            a,
            q,
            known_solution: None,
        })
    }

    pub fn with_known_solution(
        a: SparseMatrix,
        q: Vec<f64>,
        z_star: Vec<f64>,
    ) -> Result<Self, LcpError> {
        let mut p = Self::new(a, q)?;
        if z_star.len() != p.dim() {
            return Err(LcpError::DimensionMismatch {
                expected: p.dim(),
                got: z_star.len(),
            });
        }
        let report = p.verify_solution(&z_star, 1e-10);
        if !report.pass {
            return Err(LcpError::BadKnownSolution(format!(
                "min(z) = {:.3e}, min(r) = {:.3e}, z'r = {:.3e}, RES = {:.3e}",
                report.min_z, report.min_r, report.complementarity, report.residual
            )));
        }
        p.known_solution = Some(z_star);
        Ok(p)
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    pub fn matrix(&self) -> &SparseMatrix {
        &self.a
    }

    pub fn q(&self) -> &[f64] {
        &self.q
    }

    pub fn known_solution(&self) -> Option<&[f64]> {
        self.known_solution.as_deref()
    }

    /// RES(z) = || min(Az + q, z) ||_2, with the minimum taken componentwise.
    pub fn residual(&self, z: &[f64]) -> f64 {
        assert_eq!(z.len(), self.dim());
        let r = self.a.matvec(z);
        let mut s = 0.0;
        for i in 0..self.dim() {
            let m = (r[i] + self.q[i]).min(z[i]);
            s += m * m;
        }
        s.sqrt()
    }

    /// Feasibility and complementarity report for a candidate z.
    pub fn verify_solution(&self, z: &[f64], tol: f64) -> VerifyReport {
        assert_eq!(z.len(), self.dim());
        let n = self.dim();
        let mut r = self.a.matvec(z);
        for i in 0..n {
            r[i] += self.q[i];
        }
        let min_z = z.iter().cloned().fold(f64::INFINITY, f64::min);
        let min_r = r.iter().cloned().fold(f64::INFINITY, f64::min);
        let complementarity: f64 = z.iter().zip(&r).map(|(a, b)| a * b).sum();
        let residual = self.residual(z);
        VerifyReport {
            min_z,
            min_r,
            complementarity,
            residual,
            pass: min_z >= -tol
                && min_r >= -tol
                && complementarity.abs() <= tol * n as f64
                && residual <= tol,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyReport {
    pub min_z: f64,
    pub min_r: f64,
    /// z^T r
    pub complementarity: f64,
    /// RES(z)
    pub residual: f64,
    pub pass: bool,
}

/// Complementary pair (z, r), both componentwise nonnegative.
#[derive(Debug, Clone, PartialEq)]
pub struct LcpSolution {
    pub z: Vec<f64>,
    pub r: Vec<f64>,
}

/// Modulus-space vector; its sign pattern encodes the active set.
#[derive(Debug, Clone, PartialEq)]
pub struct ModulusVector(pub Vec<f64>);

/// x = (1/2)(Gamma^{-1} z - Omega^{-1} r).
pub fn modulus_from_solution(
    z: &[f64],
    r: &[f64],
    gamma: &DiagonalMatrix,
    omega: &DiagonalMatrix,
) -> Result<ModulusVector, LcpError> {
    if !gamma.all_positive() || !omega.all_positive() {
        return Err(LcpError::NonPositiveParameter);
    }
    assert_eq!(z.len(), gamma.len());
    assert_eq!(r.len(), omega.len());
    let x = z
        .iter()
        .zip(r)
        .zip(gamma.entries().iter().zip(omega.entries()))
        .map(|((&zi, &ri), (&gi, &oi))| 0.5 * (zi / gi - ri / oi))
        .collect();
    Ok(ModulusVector(x))
}

/// z = Gamma(|x| + x), r = Omega(|x| - x). One of the two factors vanishes
/// componentwise, so z_i r_i = 0 holds exactly.
pub fn solution_from_modulus(
    x: &ModulusVector,
    gamma: &DiagonalMatrix,
    omega: &DiagonalMatrix,
) -> LcpSolution {
    let n = x.0.len();
    assert_eq!(gamma.len(), n);
    assert_eq!(omega.len(), n);
    let mut z = vec![0.0; n];
    let mut r = vec![0.0; n];
    for i in 0..n {
        let xi = x.0[i];
        let a = xi.abs();
        z[i] = gamma.entries()[i] * (a + xi);
        r[i] = omega.entries()[i] * (a - xi);
    }
    LcpSolution { z, r }
}

const ORACLE_MAX_DIM: usize = 20;
const ORACLE_FEAS_TOL: f64 = 1e-10;

/// Brute-force oracle: enumerate all active sets, solve each reduced linear
/// system, return the first feasible candidate (the solution is unique for
/// P-matrices, so the set choice only matters under degeneracy).
pub fn solve_enumeration(p: &LcpProblem) -> Result<LcpSolution, LcpError> {
    let n = p.dim();
    if n > ORACLE_MAX_DIM {
        return Err(LcpError::TooLargeForOracle {
            max: ORACLE_MAX_DIM,
            got: n,
        });
    }
    let dense = p.matrix().to_dense();
    for mask in 0u32..(1u32 << n) {
        let active: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let k = active.len();
        let mut z = vec![0.0; n];
        if k > 0 {
            let mut sub = vec![0.0; k * k];
            let mut rhs = vec![0.0; k];
            for (ri, &i) in active.iter().enumerate() {
                rhs[ri] = -p.q()[i];
                for (ci, &j) in active.iter().enumerate() {
                    sub[ri * k + ci] = dense[i * n + j];
                }
            }
            let lu = match DenseLu::factor(k, sub) {
                Ok(lu) => lu,
                Err(_) => continue, // singular principal submatrix: skip set
            };
            let zsub = lu.solve(&rhs);
            for (ri, &i) in active.iter().enumerate() {
                z[i] = zsub[ri];
            }
        }
        if z.iter().any(|&v| v < -ORACLE_FEAS_TOL) {
            continue;
        }
        let mut r = p.matrix().matvec(&z);
        for i in 0..n {
            r[i] += p.q()[i];
        }
        if r.iter().any(|&v| v < -ORACLE_FEAS_TOL) {
            continue;
        }
        for v in z.iter_mut().chain(r.iter_mut()) {
            if v.abs() <= ORACLE_FEAS_TOL {
                *v = 0.0;
            }
        }
        return Ok(LcpSolution { z, r });
    }
    Err(LcpError::NoFeasibleActiveSet)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::DiagonalMatrix;

    fn mat(n: usize, dense: &[f64]) -> SparseMatrix {
        SparseMatrix::from_dense(n, dense).unwrap()
    }

    #[test]
    fn residual_examples() {
        // A = 2I, q = (-2, 1), z = (1, 0): Az+q = (0, 1), min = (0, 0)
        let p = LcpProblem::new(mat(2, &[2.0, 0.0, 0.0, 2.0]), vec![-2.0, 1.0]).unwrap();
        assert_eq!(p.residual(&[1.0, 0.0]), 0.0);

        // q >= 0 means z* = 0
        let p = LcpProblem::new(SparseMatrix::identity(2), vec![1.0, 1.0]).unwrap();
        assert_eq!(p.residual(&[0.0, 0.0]), 0.0);
    }

    #[test]
    fn residual_zero_at_known_solution() {
        let p = crate::problems::example1(3, 1.5).unwrap();
        let z = p.known_solution().unwrap().to_vec();
        assert!(p.residual(&z) < 1e-12);
    }

    #[test]
    fn modulus_transform_examples() {
        let g = DiagonalMatrix::positive(vec![1.0, 1.0]).unwrap();
        let o = DiagonalMatrix::positive(vec![2.0, 2.0]).unwrap();
        let x = modulus_from_solution(&[2.0, 0.0], &[0.0, 4.0], &g, &o).unwrap();
        assert_eq!(x.0, vec![1.0, -1.0]);

        let x0 = modulus_from_solution(&[0.0, 0.0], &[0.0, 0.0], &g, &o).unwrap();
        assert_eq!(x0.0, vec![0.0, 0.0]);

        let gi = DiagonalMatrix::positive(vec![1.0, 1.0]).unwrap();
        let oi = DiagonalMatrix::positive(vec![1.0, 1.0]).unwrap();
        let x = modulus_from_solution(&[1.0, 2.0], &[0.0, 0.0], &gi, &oi).unwrap();
        assert_eq!(x.0, vec![0.5, 1.0]);
    }

    #[test]
    fn solution_from_modulus_examples() {
        let g = DiagonalMatrix::positive(vec![1.0, 1.0]).unwrap();
        let o = DiagonalMatrix::positive(vec![2.0, 2.0]).unwrap();
        let s = solution_from_modulus(&ModulusVector(vec![1.0, -1.0]), &g, &o);
        assert_eq!(s.z, vec![2.0, 0.0]);
        assert_eq!(s.r, vec![0.0, 4.0]);

        let s0 = solution_from_modulus(&ModulusVector(vec![0.0, 0.0]), &g, &o);
        assert_eq!(s0.z, vec![0.0, 0.0]);
        assert_eq!(s0.r, vec![0.0, 0.0]);

        let gh = DiagonalMatrix::positive(vec![0.5, 0.5]).unwrap();
        let oi = DiagonalMatrix::positive(vec![1.0, 1.0]).unwrap();
        let s = solution_from_modulus(&ModulusVector(vec![-3.0, 2.0]), &gh, &oi);
        assert_eq!(s.z, vec![0.0, 2.0]);
        assert_eq!(s.r, vec![6.0, 0.0]);
    }

    #[test]
    fn verify_solution_examples() {
        let p = LcpProblem::new(SparseMatrix::identity(2), vec![-1.0, -1.0]).unwrap();
        let rep = p.verify_solution(&[1.0, 1.0], 1e-12);
        assert!(rep.pass);
        assert_eq!(rep.complementarity, 0.0);

        let rep = p.verify_solution(&[-0.5, 1.0], 1e-8);
        assert!(!rep.pass && rep.min_z < -1e-8);
    }

    #[test]
    fn nonpositive_parameter_rejected() {
        assert!(DiagonalMatrix::positive(vec![1.0, 0.0]).is_err());
    }

    #[test]
    fn enumeration_examples() {
        let p = LcpProblem::new(mat(2, &[2.0, 0.0, 0.0, 2.0]), vec![-2.0, 1.0]).unwrap();
        let s = solve_enumeration(&p).unwrap();
        assert_eq!(s.z, vec![1.0, 0.0]);

        let p = LcpProblem::new(SparseMatrix::identity(2), vec![1.0, 1.0]).unwrap();
        assert_eq!(solve_enumeration(&p).unwrap().z, vec![0.0, 0.0]);

        let p = LcpProblem::new(mat(2, &[4.0, -1.0, -1.0, 4.0]), vec![-3.0, -3.0]).unwrap();
        let s = solve_enumeration(&p).unwrap();
        assert!((s.z[0] - 1.0).abs() < 1e-12 && (s.z[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn enumeration_rejects_large() {
        let p = LcpProblem::new(SparseMatrix::identity(21), vec![1.0; 21]).unwrap();
        assert!(matches!(
            solve_enumeration(&p),
            Err(LcpError::TooLargeForOracle { .. })
        ));
    }

    #[test]
    fn oracle_agrees_with_verifier_on_random_hplus() {
        for seed in 0..200 {
            let p = crate::problems::random_hplus(6, seed).unwrap();
            let s = solve_enumeration(&p).unwrap();
            assert!(
                p.verify_solution(&s.z, 1e-8).pass,
                "seed {seed} failed verification"
            );
        }
    }
}
