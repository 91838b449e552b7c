//! Executable convergence theory: the iteration bound matrix and its
//! spectral radius, the diagonally-scaled sufficient conditions with the
//! delta thresholds, the AOR/SOR parameter regions, and the H-compatible
//! splitting test.

use thiserror::Error;

use crate::linalg::{
    classify, comparison_matrix, lower_triangular_solve, power_radius,
    spectral_radius_nonneg_detailed, DenseLu, DiagonalMatrix, LinalgError, RadiusEstimate,
    SparseMatrix, DEFAULT_CLASS_TOL, DEFAULT_POWER_MAX_ITER, DEFAULT_POWER_TOL,
};
use crate::solvers::{RatmmsParams, SolveError, SplittingPair, SplittingSpec};

/// Margin for the strict inequalities of the certified parameter regions.
const STRICT_MARGIN: f64 = 1e-10;

/// Dimension cap for assembling the bound matrix explicitly; larger
/// problems fall back to the matrix-free radius estimate.
pub const BOUND_MATRIX_MAX_DIM: usize = 2000;

#[derive(Debug, Error)]
pub enum CertificateError {
    #[error("system matrix O3 + O2 + <M1> is not an M-matrix; the bound matrix is undefined")]
    NonMSystemMatrix,
    #[error("failed to construct a valid scaling matrix V: {0}")]
    VConstruction(String),
    #[error("explicit bound matrix limited to n <= {max}, got {got}; use the matrix-free radius")]
    TooLargeForExplicit { max: usize, got: usize },
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Theorem1Case {
    None,
    CaseI,
    CaseII,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Theorem2Case {
    None,
    C1i,
    C1ii,
    C1iii,
    C1iv,
    C2i,
    C2ii,
}

impl Theorem2Case {
    pub fn label(&self) -> &'static str {
        match self {
            Theorem2Case::None => "none",
            Theorem2Case::C1i => "1.i",
            Theorem2Case::C1ii => "1.ii",
            Theorem2Case::C1iii => "1.iii",
            Theorem2Case::C1iv => "1.iv",
            Theorem2Case::C2i => "2.i",
            Theorem2Case::C2ii => "2.ii",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ConvergenceCertificate {
    /// Estimate of the bound-matrix spectral radius.
    pub rho_tilde_l: f64,
    /// Collatz-Wielandt bracket around the estimate.
    pub rho_bracket: (f64, f64),
    pub bound_holds: bool,
    pub theorem1_case: Theorem1Case,
    pub theorem2_case: Theorem2Case,
    /// rho(D^{-1}|B|) of A*Omega1.
    pub rho_jacobi: f64,
    pub h_compatible: (bool, bool),
    pub notes: Vec<String>,
}

/// Entrywise H-compatibility of each splitting: <base> = <m> - |n|.
pub fn check_h_compatible(sp: &SplittingPair) -> (bool, bool) {
    let tol = 1e-12 * sp.base.infinity_norm().max(1.0);
    let comp_base = comparison_matrix(&sp.base);
    let check = |m: &SparseMatrix, n: &SparseMatrix| -> bool {
        let rhs = comparison_matrix(m).add_scaled(1.0, &n.abs(), -1.0);
        comp_base.add_scaled(1.0, &rhs, -1.0).infinity_norm() <= tol
    };
    (check(&sp.m1, &sp.n1), check(&sp.m2, &sp.n2))
}

fn bound_rhs_matrix(params: &RatmmsParams, sp: &SplittingPair) -> SparseMatrix {
    let coeff = params.theta + (1.0 - params.theta).abs();
    let abs_o3_n1 = sp.n1.add_diagonal(&params.omega3).abs();
    let abs_o2_m2 = sp.m2.scaled(-1.0).add_diagonal(&params.omega2).abs();
    abs_o3_n1
        .scaled(coeff)
        .add_scaled(1.0, &abs_o2_m2, 1.0)
        .add_scaled(1.0, &sp.n2.abs(), 1.0)
}

fn bound_system_matrix(
    params: &RatmmsParams,
    sp: &SplittingPair,
) -> Result<SparseMatrix, CertificateError> {
    let diag_sum = DiagonalMatrix::new(
        params
            .omega2
            .entries()
            .iter()
            .zip(params.omega3.entries())
            .map(|(a, b)| a + b)
            .collect(),
    )?;
    let system = comparison_matrix(&sp.m1).add_diagonal(&diag_sum);
    let class = classify(&system, DEFAULT_CLASS_TOL)?;
    if !class.is_m {
        return Err(CertificateError::NonMSystemMatrix);
    }
    Ok(system)
}

/// Assemble the bound matrix
/// (O3 + O2 + <M1>)^{-1} [(theta + |1-theta|)|O3 + N1| + |O2 - M2| + |N2|]
/// explicitly, column by column.
pub fn bound_matrix(
    params: &RatmmsParams,
    sp: &SplittingPair,
) -> Result<SparseMatrix, CertificateError> {
    let n = sp.base.dim();
    if n > BOUND_MATRIX_MAX_DIM {
        return Err(CertificateError::TooLargeForExplicit {
            max: BOUND_MATRIX_MAX_DIM,
            got: n,
        });
    }
    let system = bound_system_matrix(params, sp)?;
    let rhs = bound_rhs_matrix(params, sp);
    let rhs_by_col = rhs.transpose();

    let lower = system.is_lower_triangular();
    let lu = if lower {
        None
    } else {
        Some(DenseLu::factor(n, system.to_dense()).map_err(SolveError::Linalg)?)
    };

    let mut triplets = Vec::new();
    let mut col = vec![0.0; n];
    for j in 0..n {
        let (rows, vals) = rhs_by_col.row(j);
        if rows.is_empty() {
            continue;
        }
        col.iter_mut().for_each(|v| *v = 0.0);
        for (&i, &v) in rows.iter().zip(vals) {
            col[i] = v;
        }
        let x = if lower {
            lower_triangular_solve(&system, &col)?
        } else {
            lu.as_ref().unwrap().solve(&col)
        };
        for (i, &v) in x.iter().enumerate() {
            if v != 0.0 {
                triplets.push((i, j, v));
            }
        }
    }
    Ok(SparseMatrix::from_triplets(n, &triplets)?)
}

/// Spectral radius of the bound matrix, matrix-free: the operator is
/// applied through a sparse matvec followed by a triangular (or dense)
/// solve, so nothing of size n^2 is formed.
pub fn bound_matrix_radius(
    params: &RatmmsParams,
    sp: &SplittingPair,
    tol: f64,
    max_iter: usize,
) -> Result<RadiusEstimate, CertificateError> {
    let n = sp.base.dim();
    let system = bound_system_matrix(params, sp)?;
    let rhs = bound_rhs_matrix(params, sp);
    let lower = system.is_lower_triangular();
    let lu = if lower {
        None
    } else {
        Some(DenseLu::factor(n, system.to_dense()).map_err(SolveError::Linalg)?)
    };
    let apply = |x: &[f64], y: &mut [f64]| {
        let mut w = vec![0.0; x.len()];
        rhs.matvec_into(x, &mut w);
        let solved = if lower {
            lower_triangular_solve(&system, &w).expect("diagonal checked at build")
        } else {
            lu.as_ref().unwrap().solve(&w)
        };
        y.copy_from_slice(&solved);
    };
    Ok(power_radius(n, apply, tol, max_iter))
}

#[derive(Debug, Clone)]
pub struct Theorem1Certificate {
    pub case: Theorem1Case,
    pub delta1: Option<f64>,
    pub delta2: Option<f64>,
    /// The scaling diagonal actually used.
    pub v: Vec<f64>,
}

/// Construct the scaling diagonal V: solve <A*Omega1> v = e, which makes
/// <A*Omega1> V strictly row-diagonally dominant with row sums e.
pub fn construct_scaling(base: &SparseMatrix) -> Result<Vec<f64>, CertificateError> {
    let comp = comparison_matrix(base);
    let e = vec![1.0; base.dim()];
    let v = m_matrix_solve(&comp, &e)?;
    if v.iter().any(|&x| !(x > 0.0)) {
        return Err(CertificateError::VConstruction(
            "solution of <A*Omega1> v = e is not strictly positive; input is likely not H+"
                .into(),
        ));
    }
    // sanity: <base> V must be strictly dominant with positive diagonal
    let diag = comp.diagonal_entries();
    for i in 0..base.dim() {
        let (cols, vals) = comp.row(i);
        let off: f64 = cols
            .iter()
            .zip(vals)
            .filter(|(&j, _)| j != i)
            .map(|(&j, &val)| (val * v[j]).abs())
            .sum();
        if diag[i] * v[i] <= off {
            return Err(CertificateError::VConstruction(format!(
                "row {i} of <A*Omega1> V is not strictly dominant"
            )));
        }
    }
    Ok(v)
}

/// Gauss-Seidel solve for an M-matrix system; converges because the
/// Gauss-Seidel splitting of an M-matrix is regular.
fn m_matrix_solve(a: &SparseMatrix, b: &[f64]) -> Result<Vec<f64>, CertificateError> {
    let n = a.dim();
    let diag = a.diagonal_entries();
    for (i, &d) in diag.iter().enumerate() {
        if d <= 0.0 {
            return Err(CertificateError::VConstruction(format!(
                "nonpositive diagonal at row {i}"
            )));
        }
    }
    let mut x = vec![0.0; n];
    let scale = a.infinity_norm().max(1.0)
        * b.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
    for _ in 0..200_000 {
        let mut max_delta = 0.0f64;
        for i in 0..n {
            let (cols, vals) = a.row(i);
            let mut s = b[i];
            for (&j, &v) in cols.iter().zip(vals) {
                if j != i {
                    s -= v * x[j];
                }
            }
            let next = s / diag[i];
            max_delta = max_delta.max((next - x[i]).abs());
            x[i] = next;
        }
        if max_delta <= 1e-14 * scale {
            // residual check before accepting
            let r = a.matvec(&x);
            let res = r
                .iter()
                .zip(b)
                .map(|(ri, bi)| (ri - bi).abs())
                .fold(0.0, f64::max);
            if res <= 1e-11 * scale {
                return Ok(x);
            }
        }
    }
    Err(CertificateError::VConstruction(
        "iterative solve for the scaling matrix did not converge".into(),
    ))
}

/// Evaluate the diagonally-scaled sufficient conditions (the delta
/// thresholds) for the given parameterization.
pub fn check_theorem1(
    params: &RatmmsParams,
    sp: &SplittingPair,
    v: Option<&[f64]>,
) -> Result<Theorem1Certificate, CertificateError> {
    let base = &sp.base;
    let n = base.dim();
    let v: Vec<f64> = match v {
        Some(v) => {
            if v.len() != n {
                return Err(CertificateError::VConstruction(format!(
                    "V has length {}, expected {n}",
                    v.len()
                )));
            }
            v.to_vec()
        }
        None => construct_scaling(base)?,
    };
    let theta = params.theta;
    let comp_base = comparison_matrix(base);
    let d_m2: Vec<f64> = sp.m2.diagonal_entries();
    let omega2 = params.omega2.entries();

    // |M2| + |N2| - <base>, applied to v
    let abs_sum = sp.m2.abs().add_scaled(1.0, &sp.n2.abs(), 1.0);
    let lhs_vec: Vec<f64> = {
        let t = abs_sum.add_scaled(1.0, &comp_base, -1.0).matvec(&v);
        t.iter().map(|x| 0.5 * x).collect()
    };
    let sandwich = (0..n).all(|i| {
        lhs_vec[i] + STRICT_MARGIN < omega2[i] * v[i]
            && omega2[i] * v[i] + STRICT_MARGIN < d_m2[i] * v[i]
    });

    if theta > 0.0 && theta <= 1.0 {
        // boundary Omega2 e = D_{M2} e counts as satisfied (the condition
        // is written with >=)
        let ge_dm2 = (0..n).all(|i| omega2[i] >= d_m2[i]);
        let case = if ge_dm2 || sandwich {
            Theorem1Case::CaseI
        } else {
            Theorem1Case::None
        };
        return Ok(Theorem1Certificate {
            case,
            delta1: None,
            delta2: None,
            v,
        });
    }

    if theta > 1.0 {
        let comp_v = comp_base.matvec(&v);
        let mut n1_abs_v = sp.n1.abs().matvec(&v);
        for i in 0..n {
            n1_abs_v[i] += params.omega3.entries()[i] * v[i];
        }
        let delta1 = (0..n)
            .map(|i| {
                if n1_abs_v[i] == 0.0 {
                    f64::INFINITY
                } else {
                    comp_v[i] / n1_abs_v[i]
                }
            })
            .fold(f64::INFINITY, f64::min)
            + 1.0;
        let numer = {
            // (2*Omega2 + <base> - |M2| - |N2|) v
            let m = comp_base.add_scaled(1.0, &abs_sum, -1.0);
            let mut t = m.matvec(&v);
            for i in 0..n {
                t[i] += 2.0 * omega2[i] * v[i];
            }
            t
        };
        let delta2 = (0..n)
            .map(|i| {
                if n1_abs_v[i] == 0.0 {
                    f64::INFINITY
                } else {
                    numer[i] / (2.0 * n1_abs_v[i])
                }
            })
            .fold(f64::INFINITY, f64::min)
            + 1.0;

        let d_base = base.diagonal_entries();
        let ge_d_base = (0..n).all(|i| omega2[i] >= d_base[i].abs());
        let case = if (ge_d_base && theta + STRICT_MARGIN < delta1)
            || (sandwich && theta + STRICT_MARGIN < delta2)
        {
            Theorem1Case::CaseII
        } else {
            Theorem1Case::None
        };
        return Ok(Theorem1Certificate {
            case,
            delta1: Some(delta1),
            delta2: Some(delta2),
            v,
        });
    }

    // theta = 0 is outside both cases
    Ok(Theorem1Certificate {
        case: Theorem1Case::None,
        delta1: None,
        delta2: None,
        v,
    })
}

/// Hypotheses on the parameter diagonals relative to D_{A*Omega1}, computed
/// from the actual matrices.
#[derive(Debug, Clone, Copy)]
pub struct Theorem2Hypotheses {
    pub omega2_ge_half_diag: bool,
    pub omega2_ge_diag: bool,
    /// Omega2 >= (1/2) D + (theta - 1) Omega3.
    pub omega2_ge_half_diag_plus_relaxed: bool,
    /// Omega3 <= D / (2 (theta - 1)).
    pub omega3_within_cap: bool,
}

pub fn theorem2_hypotheses(
    omega2: &DiagonalMatrix,
    omega3: &DiagonalMatrix,
    base_diag: &[f64],
    theta: f64,
) -> Theorem2Hypotheses {
    let o2 = omega2.entries();
    let o3 = omega3.entries();
    let n = base_diag.len();
    let omega2_ge_half_diag = (0..n).all(|i| o2[i] >= 0.5 * base_diag[i].abs());
    let omega2_ge_diag = (0..n).all(|i| o2[i] >= base_diag[i].abs());
    let (plus, cap) = if theta > 1.0 {
        (
            (0..n).all(|i| o2[i] >= 0.5 * base_diag[i].abs() + (theta - 1.0) * o3[i]),
            (0..n).all(|i| o3[i] <= base_diag[i].abs() / (2.0 * (theta - 1.0))),
        )
    } else {
        (true, true)
    };
    Theorem2Hypotheses {
        omega2_ge_half_diag,
        omega2_ge_diag,
        omega2_ge_half_diag_plus_relaxed: plus,
        omega3_within_cap: cap,
    }
}

/// AOR-family parameter regions. Returns the first enumerated sub-case that
/// holds; `None` proves nothing about divergence.
pub fn check_theorem2(
    rho: f64,
    theta: f64,
    alpha: f64,
    beta: f64,
    hyp: &Theorem2Hypotheses,
) -> Theorem2Case {
    debug_assert!(rho >= 0.0);
    if theta > 0.0 && theta <= 1.0 {
        if hyp.omega2_ge_half_diag
            && alpha > 0.0
            && alpha < 2.0 / (1.0 + 2.0 * rho)
            && beta > 0.0
            && beta <= alpha
            && rho < 0.5
        {
            return Theorem2Case::C1i;
        }
        if hyp.omega2_ge_half_diag
            && 2.0 * beta * rho < alpha
            && alpha < 2.0 - 2.0 * beta * rho
            && alpha > 0.0
            && alpha <= beta
            && rho < 1.0 / (2.0 * beta)
        {
            return Theorem2Case::C1ii;
        }
        if hyp.omega2_ge_diag
            && alpha > 0.0
            && alpha < 1.0 / rho
            && beta > 0.0
            && beta <= alpha
            && rho < 1.0
        {
            return Theorem2Case::C1iii;
        }
        if hyp.omega2_ge_diag
            && beta * rho < alpha
            && alpha > 0.0
            && alpha <= beta
            && rho < 1.0 / beta
        {
            return Theorem2Case::C1iv;
        }
        return Theorem2Case::None;
    }
    if theta > 1.0 && hyp.omega2_ge_half_diag_plus_relaxed && hyp.omega3_within_cap {
        // rho < 1/(2 theta): the proof's form of the radius cap, with the
        // undefined omega symbol read as theta
        if beta > 0.0 && beta <= alpha && rho < 1.0 / (2.0 * theta) {
            let lo = 2.0 * (theta - 1.0) / (2.0 * theta * (1.0 - rho) - 1.0);
            let hi = 2.0 * theta / (2.0 * theta * (1.0 + rho) - 1.0);
            if alpha > lo && alpha < hi {
                return Theorem2Case::C2i;
            }
        }
        if alpha > 0.0 && alpha <= beta && rho < 1.0 / (2.0 * theta * beta) {
            let lo = 2.0 * (theta * beta * rho + theta - 1.0) / (2.0 * theta - 1.0);
            let hi = 2.0 * theta * (1.0 - beta * rho) / (2.0 * theta - 1.0);
            if alpha > lo && alpha < hi {
                return Theorem2Case::C2ii;
            }
        }
    }
    Theorem2Case::None
}

/// Full certificate for one configuration.
pub fn certify(
    problem_matrix: &SparseMatrix,
    params: &RatmmsParams,
) -> Result<ConvergenceCertificate, CertificateError> {
    let base = problem_matrix.scale_columns(&params.omega1);
    let sp = params.build_splitting(&base)?;
    let mut notes = Vec::new();

    let base_class = classify(&base, DEFAULT_CLASS_TOL)?;
    if !base_class.is_h_plus {
        notes.push("A*Omega1 is not H+; the certificates assume an H+ system matrix".into());
    }
    let rho_jacobi = base_class.jacobi_rho;

    let h_compatible = check_h_compatible(&sp);

    // the inverse fills in, so the assembled matrix is dense; beyond a small
    // dimension the matrix-free product (matvec + triangular solve) is cheaper
    let radius = if base.dim() <= 100 {
        let l = bound_matrix(params, &sp)?;
        spectral_radius_nonneg_detailed(&l, DEFAULT_POWER_TOL, DEFAULT_POWER_MAX_ITER)?
    } else {
        bound_matrix_radius(params, &sp, DEFAULT_POWER_TOL, DEFAULT_POWER_MAX_ITER)?
    };
    if !radius.converged {
        notes.push("bound-matrix radius estimate did not converge; value is an estimate".into());
    }

    let theorem1_case = match check_theorem1(params, &sp, None) {
        Ok(cert) => cert.case,
        Err(e) => {
            notes.push(format!("theorem-1 check unavailable: {e}"));
            Theorem1Case::None
        }
    };
    let theorem2_case = match params.splitting {
        SplittingSpec::Aor { alpha, beta } => {
            if params.theta > 1.0 {
                notes.push(
                    "theta > 1 region evaluated with the undefined omega symbol read as theta"
                        .into(),
                );
            }
            let hyp = theorem2_hypotheses(
                &params.omega2,
                &params.omega3,
                &base.diagonal_entries(),
                params.theta,
            );
            check_theorem2(rho_jacobi, params.theta, alpha, beta, &hyp)
        }
        SplittingSpec::Explicit(_) => {
            notes.push("AOR parameter region not applicable to an explicit splitting".into());
            Theorem2Case::None
        }
    };

    Ok(ConvergenceCertificate {
        rho_tilde_l: radius.estimate,
        rho_bracket: (radius.lower, radius.upper),
        bound_holds: radius.estimate < 1.0,
        theorem1_case,
        theorem2_case,
        rho_jacobi,
        h_compatible,
        notes,
    })
}
