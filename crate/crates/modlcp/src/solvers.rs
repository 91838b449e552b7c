//! Splitting constructors and the modulus-based iteration steppers:
//! the single-sweep baseline (GMMS), the two-sweep method (TMMS), its
//! general form (GTMMS), the accelerated two-sweep method (ATMMS) and the
//! relaxation accelerated two-sweep method (RATMMS), plus the iteration
//! driver with the standard stopping rule.

use std::time::Instant;

use thiserror::Error;

use crate::lcp::{LcpProblem, ModulusVector};
use crate::linalg::{
    combine_dlu, lower_triangular_solve, DenseLu, DiagonalMatrix, LinalgError, SparseMatrix,
};

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("alpha must be nonzero for the AOR splitting")]
    AlphaZero,
    #[error("theta must be nonnegative, got {0}")]
    NegativeTheta(f64),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("splitting is inconsistent: m1 - n1 and m2 - n2 disagree beyond 1e-12 relative")]
    InconsistentSplitting,
    #[error("splitting base does not match A*Omega1 of the problem")]
    SplittingBaseMismatch,
    #[error("singular step system at diagonal index {row}")]
    SingularSystem { row: usize },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Two splittings of the same base matrix A*Omega1:
/// base = m1 - n1 = m2 - n2.
#[derive(Debug, Clone)]
pub struct SplittingPair {
    pub m1: SparseMatrix,
    pub n1: SparseMatrix,
    pub m2: SparseMatrix,
    pub n2: SparseMatrix,
    pub base: SparseMatrix,
}

impl SplittingPair {
    pub fn explicit(
        m1: SparseMatrix,
        n1: SparseMatrix,
        m2: SparseMatrix,
        n2: SparseMatrix,
        base: SparseMatrix,
    ) -> Result<Self, SolveError> {
        let sp = Self { m1, n1, m2, n2, base };
        sp.validate()?;
        Ok(sp)
    }

    fn validate(&self) -> Result<(), SolveError> {
        let tol = 1e-12 * self.base.infinity_norm().max(1.0);
        let d1 = self.m1.add_scaled(1.0, &self.n1, -1.0);
        let d2 = self.m2.add_scaled(1.0, &self.n2, -1.0);
        if d1.add_scaled(1.0, &d2, -1.0).infinity_norm() > tol
            || d1.add_scaled(1.0, &self.base, -1.0).infinity_norm() > tol
        {
            return Err(SolveError::InconsistentSplitting);
        }
        Ok(())
    }
}

/// AOR splitting family of Remark-style form:
/// m1 = (1/alpha)(D - beta*L), n1 = (1/alpha)[(1-alpha)D + (alpha-beta)L + alpha*U],
/// m2 = D - U, n2 = L, for (D, L, U) the D-L-U split of the base matrix.
pub fn aor_splitting(
    a_omega1: &SparseMatrix,
    alpha: f64,
    beta: f64,
) -> Result<SplittingPair, SolveError> {
    if alpha == 0.0 {
        return Err(SolveError::AlphaZero);
    }
    let m1 = combine_dlu(a_omega1, 1.0 / alpha, -beta / alpha, 0.0);
    let n1 = combine_dlu(
        a_omega1,
        (1.0 - alpha) / alpha,
        (alpha - beta) / alpha,
        1.0,
    );
    let m2 = combine_dlu(a_omega1, 1.0, 0.0, -1.0);
    let n2 = combine_dlu(a_omega1, 0.0, 1.0, 0.0);
    Ok(SplittingPair {
        m1,
        n1,
        m2,
        n2,
        base: a_omega1.clone(),
    })
}

#[derive(Debug, Clone)]
pub enum SplittingSpec {
    Aor { alpha: f64, beta: f64 },
    Explicit(SplittingPair),
}

/// Full parameterization of the relaxation accelerated two-sweep method.
#[derive(Debug, Clone)]
pub struct RatmmsParams {
    pub omega1: DiagonalMatrix,
    pub omega2: DiagonalMatrix,
    pub omega3: DiagonalMatrix,
    pub theta: f64,
    pub splitting: SplittingSpec,
}

impl RatmmsParams {
    pub fn validate(&self, n: usize) -> Result<(), SolveError> {
        if self.theta < 0.0 {
            return Err(SolveError::NegativeTheta(self.theta));
        }
        for (len, _) in [
            (self.omega1.len(), "omega1"),
            (self.omega2.len(), "omega2"),
            (self.omega3.len(), "omega3"),
        ] {
            if len != n {
                return Err(SolveError::DimensionMismatch {
                    expected: n,
                    got: len,
                });
            }
        }
        if let SplittingSpec::Aor { alpha, .. } = self.splitting {
            if alpha == 0.0 {
                return Err(SolveError::AlphaZero);
            }
        }
        Ok(())
    }

    pub fn build_splitting(&self, a_omega1: &SparseMatrix) -> Result<SplittingPair, SolveError> {
        match &self.splitting {
            SplittingSpec::Aor { alpha, beta } => aor_splitting(a_omega1, *alpha, *beta),
            SplittingSpec::Explicit(sp) => {
                let tol = 1e-10 * a_omega1.infinity_norm().max(1.0);
                if sp.base.add_scaled(1.0, a_omega1, -1.0).infinity_norm() > tol {
                    return Err(SolveError::SplittingBaseMismatch);
                }
                Ok(sp.clone())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodId {
    /// Single-sweep baseline: the modulus term uses the current iterate.
    Gmms,
    /// Two-sweep method on A itself with gamma = 1.
    Tmms,
    /// General two-sweep method on A*Omega1.
    Gtmms,
    /// Accelerated two-sweep method (two splittings).
    Atmms,
    /// Relaxation accelerated two-sweep method.
    Ratmms,
}

impl MethodId {
    pub fn name(&self) -> &'static str {
        match self {
            MethodId::Gmms => "GMMS",
            MethodId::Tmms => "TMMS",
            MethodId::Gtmms => "GTMMS",
            MethodId::Atmms => "ATMMS",
            MethodId::Ratmms => "RATMMS",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct StoppingRule {
    pub res_tol: f64,
    pub max_iter: usize,
    pub divergence_cap: f64,
}

impl Default for StoppingRule {
    fn default() -> Self {
        Self {
            res_tol: 1e-5,
            max_iter: 500,
            divergence_cap: 1e12,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Converged,
    MaxIterExceeded,
    Diverged,
}

#[derive(Debug, Clone)]
pub struct IterationReport {
    pub iterations: usize,
    /// RES per iterate, length = iterations.
    pub residuals: Vec<f64>,
    pub z: Vec<f64>,
    pub x_final: ModulusVector,
    pub status: Status,
    pub wall_seconds: f64,
    pub notes: Vec<String>,
}

impl IterationReport {
    pub fn final_residual(&self) -> f64 {
        self.residuals.last().copied().unwrap_or(f64::NAN)
    }
}

enum SystemSolver {
    Lower(SparseMatrix),
    Dense(DenseLu),
}

impl SystemSolver {
    fn build(system: SparseMatrix) -> Result<Self, SolveError> {
        if system.is_lower_triangular() {
            Ok(SystemSolver::Lower(system))
        } else {
            let n = system.dim();
            let lu = DenseLu::factor(n, system.to_dense())
                .map_err(|e| map_singular(e))?;
            Ok(SystemSolver::Dense(lu))
        }
    }

    fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>, SolveError> {
        match self {
            SystemSolver::Lower(m) => lower_triangular_solve(m, rhs).map_err(map_singular),
            SystemSolver::Dense(lu) => Ok(lu.solve(rhs)),
        }
    }
}

fn map_singular(e: LinalgError) -> SolveError {
    match e {
        LinalgError::SingularDiagonal { row } => SolveError::SingularSystem { row },
        other => SolveError::Linalg(other),
    }
}

/// One solver run with all per-step constants prepared once: the step system
/// matrix is constant across iterations, so it is factored (or recognized as
/// triangular) up front.
pub struct PreparedSolver<'a> {
    problem: &'a LcpProblem,
    method: MethodId,
    theta: f64,
    omega1: DiagonalMatrix,
    omega2: DiagonalMatrix,
    omega3: DiagonalMatrix,
    sp: SplittingPair,
    system: SystemSolver,
}

impl<'a> PreparedSolver<'a> {
    pub fn new(
        problem: &'a LcpProblem,
        method: MethodId,
        params: &RatmmsParams,
    ) -> Result<Self, SolveError> {
        let n = problem.dim();
        params.validate(n)?;
        // TMMS iterates on A itself with gamma = 1; the others on A*Omega1.
        let base = match method {
            MethodId::Tmms => problem.matrix().clone(),
            _ => problem.matrix().scale_columns(&params.omega1),
        };
        let sp = params.build_splitting(&base)?;
        let system_diag = match method {
            MethodId::Ratmms => DiagonalMatrix::new(
                params
                    .omega2
                    .entries()
                    .iter()
                    .zip(params.omega3.entries())
                    .map(|(a, b)| a + b)
                    .collect(),
            )
            .expect("finite"),
            _ => params.omega2.clone(),
        };
        let system = SystemSolver::build(sp.m1.add_diagonal(&system_diag))?;
        let omega1 = match method {
            MethodId::Tmms => DiagonalMatrix::scalar(n, 1.0),
            _ => params.omega1.clone(),
        };
        Ok(Self {
            problem,
            method,
            theta: params.theta,
            omega1,
            omega2: params.omega2.clone(),
            omega3: params.omega3.clone(),
            sp,
            system,
        })
    }

    pub fn splitting(&self) -> &SplittingPair {
        &self.sp
    }

    /// One application of the selected linear-system update.
    pub fn step(&self, x_prev: &[f64], x_curr: &[f64]) -> Result<Vec<f64>, SolveError> {
        let n = self.problem.dim();
        let q = self.problem.q();
        let abs_curr: Vec<f64> = x_curr.iter().map(|v| v.abs()).collect();
        let mut rhs = vec![0.0; n];
        match self.method {
            MethodId::Ratmms => {
                let blended: Vec<f64> = x_curr
                    .iter()
                    .zip(x_prev)
                    .map(|(c, p)| self.theta * c + (1.0 - self.theta) * p)
                    .collect();
                let abs_prev: Vec<f64> = x_prev.iter().map(|v| v.abs()).collect();
                self.sp.n1.matvec_into(&blended, &mut rhs);
                let m2_abs = self.sp.m2.matvec(&abs_curr);
                let n2_abs = self.sp.n2.matvec(&abs_prev);
                for i in 0..n {
                    rhs[i] += self.omega3.entries()[i] * blended[i]
                        + self.omega2.entries()[i] * abs_curr[i]
                        - m2_abs[i]
                        + n2_abs[i]
                        - q[i];
                }
            }
            MethodId::Atmms => {
                let abs_prev: Vec<f64> = x_prev.iter().map(|v| v.abs()).collect();
                self.sp.n1.matvec_into(x_curr, &mut rhs);
                let m2_abs = self.sp.m2.matvec(&abs_curr);
                let n2_abs = self.sp.n2.matvec(&abs_prev);
                for i in 0..n {
                    rhs[i] += self.omega2.entries()[i] * abs_curr[i] - m2_abs[i] + n2_abs[i]
                        - q[i];
                }
            }
            MethodId::Gtmms | MethodId::Tmms => {
                let abs_prev: Vec<f64> = x_prev.iter().map(|v| v.abs()).collect();
                self.sp.n1.matvec_into(x_curr, &mut rhs);
                let base_abs = self.sp.base.matvec(&abs_prev);
                for i in 0..n {
                    rhs[i] += self.omega2.entries()[i] * abs_prev[i] - base_abs[i] - q[i];
                }
            }
            MethodId::Gmms => {
                self.sp.n1.matvec_into(x_curr, &mut rhs);
                let base_abs = self.sp.base.matvec(&abs_curr);
                for i in 0..n {
                    rhs[i] += self.omega2.entries()[i] * abs_curr[i] - base_abs[i] - q[i];
                }
            }
        }
        self.system.solve(&rhs)
    }

    /// z = Omega1(|x| + x).
    pub fn recover(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.omega1.entries())
            .map(|(&xi, &oi)| oi * (xi.abs() + xi))
            .collect()
    }
}

/// Iterate the selected method from x0 = x1 = 0 under the stopping rule.
pub fn solve(
    p: &LcpProblem,
    method: MethodId,
    params: &RatmmsParams,
    stop: &StoppingRule,
) -> Result<IterationReport, SolveError> {
    let prepared = PreparedSolver::new(p, method, params)?;
    let n = p.dim();
    let mut notes = Vec::new();
    if p.matrix().diagonal_entries().iter().any(|&d| d <= 0.0) {
        notes.push("system matrix has a nonpositive diagonal entry; not H+ (convergence not guaranteed)".into());
    }
    if params.theta == 0.0 {
        notes.push("theta = 0 lies outside the certified range (0, inf)".into());
    }

    let start = Instant::now();
    let mut x_prev = vec![0.0; n];
    let mut x_curr = vec![0.0; n];
    let mut residuals = Vec::new();
    let mut status = Status::MaxIterExceeded;
    for _ in 0..stop.max_iter {
        let x_next = prepared.step(&x_prev, &x_curr)?;
        if x_next.iter().any(|v| !v.is_finite()) {
            // keep the last finite iterate for the report
            status = Status::Diverged;
            residuals.push(f64::INFINITY);
            break;
        }
        let z = prepared.recover(&x_next);
        let res = p.residual(&z);
        residuals.push(res);
        x_prev = std::mem::replace(&mut x_curr, x_next);
        if res <= stop.res_tol {
            status = Status::Converged;
            break;
        }
        if res > stop.divergence_cap {
            status = Status::Diverged;
            break;
        }
    }
    let wall_seconds = start.elapsed().as_secs_f64();
    let z = prepared.recover(&x_curr);
    Ok(IterationReport {
        iterations: residuals.len(),
        residuals,
        z,
        x_final: ModulusVector(x_curr),
        status,
        wall_seconds,
        notes,
    })
}

/// One RATMMS update: solve
/// (O3 + O2 + M1) x+ = (O3 + N1)[theta*xc + (1-theta)*xp]
///                    + (O2 - M2)|xc| + N2|xp| - q.
pub fn ratmms_step(
    x_prev: &ModulusVector,
    x_curr: &ModulusVector,
    p: &LcpProblem,
    params: &RatmmsParams,
    sp: &SplittingPair,
) -> Result<ModulusVector, SolveError> {
    let mut params = params.clone();
    params.splitting = SplittingSpec::Explicit(sp.clone());
    let prepared = PreparedSolver::new(p, MethodId::Ratmms, &params)?;
    prepared.step(&x_prev.0, &x_curr.0).map(ModulusVector)
}

/// One GTMMS update: solve (O2 + M1) x+ = N1 xc + (O2 - A*O1)|xp| - q.
pub fn gtmms_step(
    x_prev: &ModulusVector,
    x_curr: &ModulusVector,
    p: &LcpProblem,
    omega1: &DiagonalMatrix,
    omega2: &DiagonalMatrix,
    sp: &SplittingPair,
) -> Result<ModulusVector, SolveError> {
    let params = RatmmsParams {
        omega1: omega1.clone(),
        omega2: omega2.clone(),
        omega3: DiagonalMatrix::scalar(p.dim(), 0.0),
        theta: 1.0,
        splitting: SplittingSpec::Explicit(sp.clone()),
    };
    let prepared = PreparedSolver::new(p, MethodId::Gtmms, &params)?;
    prepared.step(&x_prev.0, &x_curr.0).map(ModulusVector)
}

/// One GMMS (single-sweep) update: solve
/// (O2 + M1) x+ = N1 xc + (O2 - A*O1)|xc| - q.
pub fn gmms_step(
    x_curr: &ModulusVector,
    p: &LcpProblem,
    omega1: &DiagonalMatrix,
    omega2: &DiagonalMatrix,
    sp: &SplittingPair,
) -> Result<ModulusVector, SolveError> {
    let params = RatmmsParams {
        omega1: omega1.clone(),
        omega2: omega2.clone(),
        omega3: DiagonalMatrix::scalar(p.dim(), 0.0),
        theta: 1.0,
        splitting: SplittingSpec::Explicit(sp.clone()),
    };
    let prepared = PreparedSolver::new(p, MethodId::Gmms, &params)?;
    prepared.step(&x_curr.0, &x_curr.0).map(ModulusVector)
}

/// One TMMS update on A = M - N: solve
/// (Omega + M) x+ = N xc + (Omega - A)|xp| - gamma*q. Recovery for this
/// method is z = (1/gamma)(|x| + x).
pub fn tmms_step(
    x_prev: &ModulusVector,
    x_curr: &ModulusVector,
    p: &LcpProblem,
    omega: &DiagonalMatrix,
    gamma: f64,
    m: &SparseMatrix,
    n_split: &SparseMatrix,
) -> Result<ModulusVector, SolveError> {
    assert!(gamma > 0.0, "gamma must be positive");
    let n = p.dim();
    if omega.len() != n {
        return Err(SolveError::DimensionMismatch {
            expected: n,
            got: omega.len(),
        });
    }
    let system = SystemSolver::build(m.add_diagonal(omega))?;
    let abs_prev: Vec<f64> = x_prev.0.iter().map(|v| v.abs()).collect();
    let mut rhs = n_split.matvec(&x_curr.0);
    let a_abs = p.matrix().matvec(&abs_prev);
    for i in 0..n {
        rhs[i] += omega.entries()[i] * abs_prev[i] - a_abs[i] - gamma * p.q()[i];
    }
    system.solve(&rhs).map(ModulusVector)
}
