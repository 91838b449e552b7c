//! Dense LU with partial pivoting. Small systems only: the enumeration
//! oracle (n <= 20) and the factor-once path for non-triangular splittings.

use super::LinalgError;

#[derive(Debug, Clone)]
pub struct DenseLu {
    n: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
}

impl DenseLu {
    /// Factor a row-major dense matrix.
    pub fn factor(n: usize, mut a: Vec<f64>) -> Result<Self, LinalgError> {
        assert_eq!(a.len(), n * n);
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let mut p = k;
            let mut best = a[perm[k] * n + k].abs();
            for r in k + 1..n {
                let v = a[perm[r] * n + k].abs();
                if v > best {
                    best = v;
                    p = r;
                }
            }
            if best < 1e-30 {
                return Err(LinalgError::SingularDiagonal { row: k });
            }
            perm.swap(k, p);
            let pk = perm[k];
            let pivot = a[pk * n + k];
            for r in k + 1..n {
                let pr = perm[r];
                let m = a[pr * n + k] / pivot;
                a[pr * n + k] = m;
                for c in k + 1..n {
                    a[pr * n + c] -= m * a[pk * n + c];
                }
            }
        }
        Ok(Self { n, lu: a, perm })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        assert_eq!(b.len(), self.n);
        let n = self.n;
        let mut y = vec![0.0; n];
        for i in 0..n {
            let pi = self.perm[i];
            let mut s = b[pi];
            for j in 0..i {
                s -= self.lu[pi * n + j] * y[j];
            }
            y[i] = s;
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let pi = self.perm[i];
            let mut s = y[i];
            for j in i + 1..n {
                s -= self.lu[pi * n + j] * x[j];
            }
            x[i] = s / self.lu[pi * n + i];
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_small_system() {
        // [[2, 1], [1, 3]] x = [3, 5] -> x = [4/5, 7/5]
        let lu = DenseLu::factor(2, vec![2.0, 1.0, 1.0, 3.0]).unwrap();
        let x = lu.solve(&[3.0, 5.0]);
        assert!((x[0] - 0.8).abs() < 1e-14);
        assert!((x[1] - 1.4).abs() < 1e-14);
    }

    #[test]
    fn pivots_on_zero_leading_entry() {
        let lu = DenseLu::factor(2, vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        let x = lu.solve(&[2.0, 3.0]);
        assert_eq!(x, vec![3.0, 2.0]);
    }

    #[test]
    fn singular_rejected() {
        assert!(DenseLu::factor(2, vec![1.0, 2.0, 2.0, 4.0]).is_err());
    }
}
