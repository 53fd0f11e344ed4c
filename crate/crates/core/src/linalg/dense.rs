use crate::error::{Error, Result};

/// Square dense matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_row_major(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::DimensionMismatch(format!(
                "{} values for a {n}x{n} matrix",
                data.len()
            )));
        }
        Ok(Self { n, data })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        self.data
            .chunks_exact(self.n)
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// LU factorization with partial pivoting. A pivot below
    /// `1e-12 * max|B|` is reported as singular.
    pub fn lu(&self) -> Result<LuFactors> {
        let n = self.n;
        let scale = self.max_abs();
        let mut lu = self.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for col in 0..n {
            let (piv_row, piv_abs) = (col..n)
                .map(|r| (r, lu[r * n + col].abs()))
                .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if !(piv_abs > 1e-12 * scale) {
                return Err(Error::Singular {
                    index: col,
                    pivot: piv_abs.max(0.0),
                });
            }
            if piv_row != col {
                for j in 0..n {
                    lu.swap(col * n + j, piv_row * n + j);
                }
                perm.swap(col, piv_row);
            }
            let pivot = lu[col * n + col];
            for r in col + 1..n {
                let factor = lu[r * n + col] / pivot;
                if factor == 0.0 {
                    continue;
                }
                lu[r * n + col] = factor;
                for j in col + 1..n {
                    lu[r * n + j] -= factor * lu[col * n + j];
                }
            }
        }
        Ok(LuFactors { n, lu, perm })
    }
}

impl std::ops::Index<(usize, usize)> for DenseMatrix {
    type Output = f64;
    fn index(&self, (r, c): (usize, usize)) -> &f64 {
        &self.data[r * self.n + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut f64 {
        &mut self.data[r * self.n + c]
    }
}

/// Packed `PA = LU` factors; `L` has a unit diagonal.
#[derive(Debug, Clone)]
pub struct LuFactors {
    n: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
}

impl LuFactors {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.n;
        assert_eq!(rhs.len(), n);
        let mut x: Vec<f64> = self.perm.iter().map(|&p| rhs[p]).collect();
        for i in 0..n {
            let row = &self.lu[i * n..i * n + i];
            let s: f64 = row.iter().zip(&x[..i]).map(|(a, b)| a * b).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let row = &self.lu[i * n + i + 1..(i + 1) * n];
            let s: f64 = row.iter().zip(&x[i + 1..]).map(|(a, b)| a * b).sum();
            x[i] = (x[i] - s) / self.lu[i * n + i];
        }
        x
    }
}

/// Solves `B x = r` for every right-hand side column.
pub fn dense_solve(b: &DenseMatrix, rhs: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    if let Some(bad) = rhs.iter().find(|r| r.len() != b.dim()) {
        return Err(Error::DimensionMismatch(format!(
            "right-hand side of length {} for a {}x{} matrix",
            bad.len(),
            b.dim(),
            b.dim()
        )));
    }
    let lu = b.lu()?;
    Ok(rhs.iter().map(|r| lu.solve(r)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_returns_rhs() {
        let rhs = vec![vec![1.0, -2.0, 3.5]];
        let x = dense_solve(&DenseMatrix::identity(3), &rhs).unwrap();
        assert_eq!(x, rhs);
    }

    #[test]
    fn permutation_requires_pivoting() {
        let b = DenseMatrix::from_row_major(2, vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        let x = dense_solve(&b, &[vec![3.0, 7.0]]).unwrap();
        assert_eq!(x[0], vec![7.0, 3.0]);
    }

    #[test]
    fn singular_matrix_reports_index() {
        let b = DenseMatrix::from_row_major(3, vec![1.0, 2.0, 0.0, 2.0, 4.0, 0.0, 0.0, 0.0, 1.0])
            .unwrap();
        match dense_solve(&b, &[vec![1.0; 3]]) {
            Err(Error::Singular { index, .. }) => assert_eq!(index, 1),
            other => panic!("expected singular, got {other:?}"),
        }
    }

    #[test]
    fn random_element_sized_blocks_have_small_residual() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let n = 18;
            let data: Vec<f64> = (0..n * n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let b = DenseMatrix::from_row_major(n, data).unwrap();
            let rhs: Vec<Vec<f64>> = (0..3)
                .map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect())
                .collect();
            let sols = dense_solve(&b, &rhs).unwrap();
            for (x, r) in sols.iter().zip(&rhs) {
                let bx = b.matvec(x);
                let res = bx.iter().zip(r).map(|(a, c)| (a - c).powi(2)).sum::<f64>().sqrt();
                let xn = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                assert!(res <= 1e-10 * b.max_abs() * xn, "residual {res}");
            }
        }
    }
}
