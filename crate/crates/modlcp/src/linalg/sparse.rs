//! Compressed sparse row storage for square matrices, with the splitting
//! helpers the modulus-based iterations are built from.

use super::{DiagonalMatrix, LinalgError};

/// Square real matrix in CSR layout. Column indices are strictly increasing
/// within each row and every stored value is finite.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    n: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    pub fn new(
        n: usize,
        row_offsets: Vec<usize>,
        col_indices: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self, LinalgError> {
        if row_offsets.len() != n + 1 {
            return Err(LinalgError::InvalidStructure(format!(
                "row_offsets length {} != n+1 = {}",
                row_offsets.len(),
                n + 1
            )));
        }
        if row_offsets[0] != 0 || *row_offsets.last().unwrap() != col_indices.len() {
            return Err(LinalgError::InvalidStructure(
                "row_offsets endpoints inconsistent with col_indices".into(),
            ));
        }
        if col_indices.len() != values.len() {
            return Err(LinalgError::InvalidStructure(
                "col_indices and values length mismatch".into(),
            ));
        }
        for i in 0..n {
            let (lo, hi) = (row_offsets[i], row_offsets[i + 1]);
            if lo > hi {
                return Err(LinalgError::InvalidStructure(format!(
                    "row_offsets not monotone at row {i}"
                )));
            }
            let mut prev: Option<usize> = None;
            for k in lo..hi {
                let j = col_indices[k];
                if j >= n {
                    return Err(LinalgError::InvalidStructure(format!(
                        "column index {j} out of range in row {i}"
                    )));
                }
                if let Some(p) = prev {
                    if j <= p {
                        return Err(LinalgError::InvalidStructure(format!(
                            "column indices not strictly increasing in row {i}"
                        )));
                    }
                }
                prev = Some(j);
                if !values[k].is_finite() {
                    return Err(LinalgError::NonFinite { row: i, col: j });
                }
            }
        }
        Ok(Self {
            n,
            row_offsets,
            col_indices,
            values,
        })
    }

    /// Build from (row, col, value) triplets. Entries are sorted; duplicates
    /// are rejected; explicit zeros are dropped.
    pub fn from_triplets(
        n: usize,
        triplets: &[(usize, usize, f64)],
    ) -> Result<Self, LinalgError> {
        let mut entries: Vec<(usize, usize, f64)> = Vec::with_capacity(triplets.len());
        for &(i, j, v) in triplets {
            if i >= n || j >= n {
                return Err(LinalgError::InvalidStructure(format!(
                    "triplet index ({i}, {j}) out of range for n = {n}"
                )));
            }
            if !v.is_finite() {
                return Err(LinalgError::NonFinite { row: i, col: j });
            }
            if v != 0.0 {
                entries.push((i, j, v));
            }
        }
        entries.sort_unstable_by_key(|&(i, j, _)| (i, j));
        for w in entries.windows(2) {
            if w[0].0 == w[1].0 && w[0].1 == w[1].1 {
                return Err(LinalgError::InvalidStructure(format!(
                    "duplicate entry at ({}, {})",
                    w[0].0, w[0].1
                )));
            }
        }
        let mut row_offsets = vec![0usize; n + 1];
        for &(i, _, _) in &entries {
            row_offsets[i + 1] += 1;
        }
        for i in 0..n {
            row_offsets[i + 1] += row_offsets[i];
        }
        let col_indices = entries.iter().map(|e| e.1).collect();
        let values = entries.iter().map(|e| e.2).collect();
        Ok(Self {
            n,
            row_offsets,
            col_indices,
            values,
        })
    }

    /// Build from a row-major dense matrix, dropping zeros.
    pub fn from_dense(n: usize, dense: &[f64]) -> Result<Self, LinalgError> {
        assert_eq!(dense.len(), n * n);
        let mut triplets = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let v = dense[i * n + j];
                if v != 0.0 {
                    triplets.push((i, j, v));
                }
            }
        }
        Self::from_triplets(n, &triplets)
    }

    pub fn identity(n: usize) -> Self {
        Self {
            n,
            row_offsets: (0..=n).collect(),
            col_indices: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let (lo, hi) = (self.row_offsets[i], self.row_offsets[i + 1]);
        (&self.col_indices[lo..hi], &self.values[lo..hi])
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn col_indices(&self) -> &[usize] {
        &self.col_indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&j) {
            Ok(k) => vals[k],
            Err(_) => 0.0,
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        self.matvec_into(x, &mut y);
        y
    }

    pub fn matvec_into(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n);
        for i in 0..self.n {
            let (cols, vals) = self.row(i);
            let mut s = 0.0;
            for (&j, &v) in cols.iter().zip(vals) {
                s += v * x[j];
            }
            y[i] = s;
        }
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.n * self.n];
        for i in 0..self.n {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                d[i * self.n + j] = v;
            }
        }
        d
    }

    /// Diagonal entries, zero where no entry is stored.
    pub fn diagonal_entries(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    /// Apply f to every stored value, keeping the pattern. Zeros produced by
    /// f stay stored; callers that care re-normalize via `from_triplets`.
    pub fn map_values(&self, f: impl Fn(usize, usize, f64) -> f64) -> Self {
        let mut out = self.clone();
        for i in 0..self.n {
            let (lo, hi) = (self.row_offsets[i], self.row_offsets[i + 1]);
            for k in lo..hi {
                out.values[k] = f(i, self.col_indices[k], self.values[k]);
            }
        }
        out
    }

    /// Entrywise absolute value.
    pub fn abs(&self) -> Self {
        self.map_values(|_, _, v| v.abs())
    }

    pub fn scaled(&self, s: f64) -> Self {
        self.map_values(|_, _, v| s * v)
    }

    /// Right-multiply by a diagonal matrix: (A D)_{ij} = a_{ij} d_j.
    pub fn scale_columns(&self, d: &DiagonalMatrix) -> Self {
        let e = d.entries();
        self.map_values(|_, j, v| v * e[j])
    }

    /// ca*self + cb*b, merging sparsity patterns.
    pub fn add_scaled(&self, ca: f64, b: &SparseMatrix, cb: f64) -> Self {
        assert_eq!(self.n, b.n);
        let mut row_offsets = vec![0usize; self.n + 1];
        let mut col_indices = Vec::with_capacity(self.nnz() + b.nnz());
        let mut values = Vec::with_capacity(self.nnz() + b.nnz());
        for i in 0..self.n {
            let (ac, av) = self.row(i);
            let (bc, bv) = b.row(i);
            let (mut p, mut q) = (0, 0);
            while p < ac.len() || q < bc.len() {
                let (j, v) = if q >= bc.len() || (p < ac.len() && ac[p] < bc[q]) {
                    let r = (ac[p], ca * av[p]);
                    p += 1;
                    r
                } else if p >= ac.len() || bc[q] < ac[p] {
                    let r = (bc[q], cb * bv[q]);
                    q += 1;
                    r
                } else {
                    let r = (ac[p], ca * av[p] + cb * bv[q]);
                    p += 1;
                    q += 1;
                    r
                };
                col_indices.push(j);
                values.push(v);
            }
            row_offsets[i + 1] = col_indices.len();
        }
        Self {
            n: self.n,
            row_offsets,
            col_indices,
            values,
        }
    }

    /// self + diag(d), guaranteeing a stored diagonal entry in every row.
    pub fn add_diagonal(&self, d: &DiagonalMatrix) -> Self {
        assert_eq!(self.n, d.len());
        let e = d.entries();
        let mut row_offsets = vec![0usize; self.n + 1];
        let mut col_indices = Vec::with_capacity(self.nnz() + self.n);
        let mut values = Vec::with_capacity(self.nnz() + self.n);
        for i in 0..self.n {
            let (cols, vals) = self.row(i);
            let mut placed = false;
            for (&j, &v) in cols.iter().zip(vals) {
                if !placed && j > i {
                    col_indices.push(i);
                    values.push(e[i]);
                    placed = true;
                }
                if j == i {
                    col_indices.push(j);
                    values.push(v + e[i]);
                    placed = true;
                } else {
                    col_indices.push(j);
                    values.push(v);
                }
            }
            if !placed {
                col_indices.push(i);
                values.push(e[i]);
            }
            row_offsets[i + 1] = col_indices.len();
        }
        // rows that had the diagonal inserted mid-row keep sorted order by
        // construction: the insertion happens right before the first j > i
        Self {
            n: self.n,
            row_offsets,
            col_indices,
            values,
        }
    }

    pub fn transpose(&self) -> Self {
        let mut row_offsets = vec![0usize; self.n + 1];
        for &j in &self.col_indices {
            row_offsets[j + 1] += 1;
        }
        for i in 0..self.n {
            row_offsets[i + 1] += row_offsets[i];
        }
        let mut next = row_offsets.clone();
        let mut col_indices = vec![0usize; self.nnz()];
        let mut values = vec![0.0; self.nnz()];
        for i in 0..self.n {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                let k = next[j];
                col_indices[k] = i;
                values[k] = v;
                next[j] += 1;
            }
        }
        Self {
            n: self.n,
            row_offsets,
            col_indices,
            values,
        }
    }

    pub fn is_lower_triangular(&self) -> bool {
        (0..self.n).all(|i| self.row(i).0.iter().all(|&j| j <= i))
    }

    /// Max absolute row sum.
    pub fn infinity_norm(&self) -> f64 {
        (0..self.n)
            .map(|i| self.row(i).1.iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// True iff all stored entries are >= 0.
    pub fn is_nonnegative(&self) -> bool {
        self.values.iter().all(|&v| v >= 0.0)
    }
}

/// Comparison matrix: |a_ii| on the diagonal, -|a_ij| off it. Same pattern.
pub fn comparison_matrix(a: &SparseMatrix) -> SparseMatrix {
    a.map_values(|i, j, v| if i == j { v.abs() } else { -v.abs() })
}

/// Split A = D - L - U with D diagonal, L strictly lower and U strictly upper;
/// L and U carry the negated off-diagonal entries of A.
pub fn split_dlu(a: &SparseMatrix) -> (DiagonalMatrix, SparseMatrix, SparseMatrix) {
    let n = a.dim();
    let mut d = vec![0.0; n];
    let mut lower = Vec::new();
    let mut upper = Vec::new();
    for i in 0..n {
        let (cols, vals) = a.row(i);
        for (&j, &v) in cols.iter().zip(vals) {
            if j == i {
                d[i] = v;
            } else if j < i {
                lower.push((i, j, -v));
            } else {
                upper.push((i, j, -v));
            }
        }
    }
    let l = SparseMatrix::from_triplets(n, &lower).expect("valid by construction");
    let u = SparseMatrix::from_triplets(n, &upper).expect("valid by construction");
    (DiagonalMatrix::new(d).expect("finite by invariant"), l, u)
}

/// Assemble c_d*D + c_l*L + c_u*U from the D-L-U split of `a`, without
/// materializing the factors. L and U are the negated strict parts, so an
/// off-diagonal entry a_ij contributes -c*a_ij.
pub fn combine_dlu(a: &SparseMatrix, c_d: f64, c_l: f64, c_u: f64) -> SparseMatrix {
    let n = a.dim();
    let mut triplets = Vec::with_capacity(a.nnz());
    for i in 0..n {
        let (cols, vals) = a.row(i);
        for (&j, &v) in cols.iter().zip(vals) {
            let c = if j == i {
                c_d
            } else if j < i {
                -c_l
            } else {
                -c_u
            };
            if c != 0.0 {
                triplets.push((i, j, c * v));
            }
        }
    }
    SparseMatrix::from_triplets(n, &triplets).expect("valid by construction")
}

/// Forward substitution for a lower triangular CSR matrix.
pub fn lower_triangular_solve(m: &SparseMatrix, b: &[f64]) -> Result<Vec<f64>, LinalgError> {
    let n = m.dim();
    if b.len() != n {
        return Err(LinalgError::DimensionMismatch {
            expected: n,
            got: b.len(),
        });
    }
    let mut x = vec![0.0; n];
    for i in 0..n {
        let (cols, vals) = m.row(i);
        let mut s = b[i];
        let mut diag = 0.0;
        for (&j, &v) in cols.iter().zip(vals) {
            if j < i {
                s -= v * x[j];
            } else if j == i {
                diag = v;
            }
            // entries past the diagonal are ignored; the caller promises a
            // lower triangular matrix
        }
        if diag.abs() < 1e-30 {
            return Err(LinalgError::SingularDiagonal { row: i });
        }
        x[i] = s / diag;
    }
    Ok(x)
}

/// Backward substitution for an upper triangular CSR matrix.
pub fn upper_triangular_solve(m: &SparseMatrix, b: &[f64]) -> Result<Vec<f64>, LinalgError> {
    let n = m.dim();
    if b.len() != n {
        return Err(LinalgError::DimensionMismatch {
            expected: n,
            got: b.len(),
        });
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let (cols, vals) = m.row(i);
        let mut s = b[i];
        let mut diag = 0.0;
        for (&j, &v) in cols.iter().zip(vals) {
            if j > i {
                s -= v * x[j];
            } else if j == i {
                diag = v;
            }
        }
        if diag.abs() < 1e-30 {
            return Err(LinalgError::SingularDiagonal { row: i });
        }
        x[i] = s / diag;
    }
    Ok(x)
}
