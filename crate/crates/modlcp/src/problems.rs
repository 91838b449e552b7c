//! Deterministic benchmark problem generators and the random H+ instance
//! source used by the property tests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::lcp::{LcpError, LcpProblem};
use crate::linalg::SparseMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Example1,
    Example2,
}

#[derive(Debug, Clone, Copy)]
pub struct BenchmarkSpec {
    pub family: Family,
    /// Block size; the system dimension is m^2.
    pub m: usize,
    /// Diagonal shift mu >= 0.
    pub mu: f64,
}

impl BenchmarkSpec {
    pub fn generate(&self) -> Result<LcpProblem, LcpError> {
        match self.family {
            Family::Example1 => example1(self.m, self.mu),
            Family::Example2 => example2(self.m, self.mu),
        }
    }
}

/// Block-tridiagonal family: A = tridiag(-I, S, -I) + mu*I with
/// S = tridiag(-1, 4, -1); q = -A z* for z* = (1, 2, 1, 2, ...).
pub fn example1(m: usize, mu: f64) -> Result<LcpProblem, LcpError> {
    block_tridiag(m, mu, 1.0, 1.0)
}

/// Nonsymmetric variant: sub-diagonal weight -1.5 and super-diagonal weight
/// -0.5 at both block and scalar levels.
pub fn example2(m: usize, mu: f64) -> Result<LcpProblem, LcpError> {
    block_tridiag(m, mu, 1.5, 0.5)
}

fn block_tridiag(m: usize, mu: f64, sub: f64, sup: f64) -> Result<LcpProblem, LcpError> {
    assert!(m >= 1, "block size must be at least 1");
    let n = m * m;
    let mut triplets = Vec::with_capacity(5 * n);
    for block in 0..m {
        for s in 0..m {
            let i = block * m + s;
            if block > 0 {
                triplets.push((i, i - m, -sub));
            }
            if s > 0 {
                triplets.push((i, i - 1, -sub));
            }
            triplets.push((i, i, 4.0 + mu));
            if s + 1 < m {
                triplets.push((i, i + 1, -sup));
            }
            if block + 1 < m {
                triplets.push((i, i + m, -sup));
            }
        }
    }
    let a = SparseMatrix::from_triplets(n, &triplets)?;
    let z_star = alternating_solution(n);
    let mut q = a.matvec(&z_star);
    for v in &mut q {
        *v = -*v;
    }
    LcpProblem::with_known_solution(a, q, z_star)
}

/// z* = (1, 2, 1, 2, ...); for odd n the last entry is 1.
pub fn alternating_solution(n: usize) -> Vec<f64> {
    (0..n).map(|i| if i % 2 == 0 { 1.0 } else { 2.0 }).collect()
}

/// Deterministic random H+ problem: diagonal in [3, 5], off-diagonals drawn
/// in [-1, 1] and rescaled so each comparison-matrix row is strictly
/// dominant (off-diagonal absolute sum <= 0.9 * diagonal); q in [-5, 5].
pub fn random_hplus(n: usize, seed: u64) -> Result<LcpProblem, LcpError> {
    assert!((2..=20).contains(&n), "random_hplus supports 2 <= n <= 20");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut dense = vec![0.0f64; n * n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                dense[i * n + j] = rng.gen_range(-1.0..1.0);
            }
        }
    }
    for i in 0..n {
        let diag = rng.gen_range(3.0..5.0);
        let off_sum: f64 = (0..n)
            .filter(|&j| j != i)
            .map(|j| dense[i * n + j].abs())
            .sum();
        if off_sum > 0.9 * diag {
            let scale = 0.9 * diag / off_sum;
            for j in 0..n {
                if j != i {
                    dense[i * n + j] *= scale;
                }
            }
        }
        dense[i * n + i] = diag;
    }
    let q = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
    let a = SparseMatrix::from_dense(n, &dense)?;
    LcpProblem::new(a, q)
}
