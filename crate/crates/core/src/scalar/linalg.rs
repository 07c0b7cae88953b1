//! Dense exact linear algebra over a [`Field`].

use serde::{Deserialize, Serialize};

use super::field::Field;

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Matrix<E> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<E>,
}

impl<E: Clone> Matrix<E> {
    pub fn from_rows(rows: &[Vec<E>]) -> Result<Self, LinalgError> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(LinalgError::Ragged);
        }
        Ok(Matrix { rows: rows.len(), cols, data: rows.iter().flatten().cloned().collect() })
    }

    pub fn filled(rows: usize, cols: usize, value: E) -> Self {
        Matrix { rows, cols, data: vec![value; rows * cols] }
    }

    pub fn get(&self, i: usize, j: usize) -> &E {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: E) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[E] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j).clone());
            }
        }
        Matrix { rows: self.cols, cols: self.rows, data }
    }

    pub fn to_rows(&self) -> Vec<Vec<E>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum LinalgError {
    #[error("rows of unequal length")]
    Ragged,
    #[error("entry at ({row}, {col}) is not an element of the working field")]
    ForeignEntry { row: usize, col: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
}

/// Result of exact Gauss-Jordan elimination.
#[derive(Clone, Debug, PartialEq)]
pub struct RowReduction<E> {
    pub rank: usize,
    /// Pivot column of each nonzero row of the echelon form.
    pub pivots: Vec<usize>,
    /// Basis of the right kernel, one vector per free column.
    pub kernel: Vec<Vec<E>>,
}

/// Reduced row echelon form with pivot = first nonzero entry in column order.
///
/// The pivoting rule is fixed, so the output depends only on the input matrix.
pub fn rref<F: Field>(field: &F, m: &Matrix<F::Elem>) -> Result<(Matrix<F::Elem>, Vec<usize>), LinalgError> {
    for i in 0..m.rows {
        for j in 0..m.cols {
            if !field.contains(m.get(i, j)) {
                return Err(LinalgError::ForeignEntry { row: i, col: j });
            }
        }
    }
    let mut a = m.clone();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..a.cols {
        if r == a.rows {
            break;
        }
        let Some(p) = (r..a.rows).find(|&i| !field.is_zero(a.get(i, c))) else {
            continue;
        };
        if p != r {
            for j in 0..a.cols {
                a.data.swap(p * a.cols + j, r * a.cols + j);
            }
        }
        let inv = field.inv(a.get(r, c)).expect("pivot is nonzero");
        for j in c..a.cols {
            let v = field.mul(a.get(r, j), &inv);
            a.set(r, j, v);
        }
        for i in 0..a.rows {
            if i == r || field.is_zero(a.get(i, c)) {
                continue;
            }
            let factor = a.get(i, c).clone();
            for j in c..a.cols {
                let v = field.sub(a.get(i, j), &field.mul(&factor, a.get(r, j)));
                a.set(i, j, v);
            }
        }
        pivots.push(c);
        r += 1;
    }
    Ok((a, pivots))
}

/// Rank and right-kernel basis of `m`.
pub fn row_reduce<F: Field>(field: &F, m: &Matrix<F::Elem>) -> Result<RowReduction<F::Elem>, LinalgError> {
    let (e, pivots) = rref(field, m)?;
    let mut is_pivot = vec![false; m.cols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let kernel = (0..m.cols)
        .filter(|&c| !is_pivot[c])
        .map(|free| {
            let mut v = vec![field.zero(); m.cols];
            v[free] = field.one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = field.neg(e.get(row, free));
            }
            v
        })
        .collect();
    Ok(RowReduction { rank: pivots.len(), pivots, kernel })
}

pub fn rank<F: Field>(field: &F, m: &Matrix<F::Elem>) -> Result<usize, LinalgError> {
    Ok(rref(field, m)?.1.len())
}

/// Determinant by fraction-free-free elimination (plain Gaussian elimination over the field).
pub fn determinant<F: Field>(field: &F, m: &Matrix<F::Elem>) -> Result<F::Elem, LinalgError> {
    if m.rows != m.cols {
        return Err(LinalgError::NotSquare { rows: m.rows, cols: m.cols });
    }
    let n = m.rows;
    let mut a = m.clone();
    let mut det = field.one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !field.is_zero(a.get(i, c))) else {
            return Ok(field.zero());
        };
        if p != c {
            for j in 0..n {
                a.data.swap(p * n + j, c * n + j);
            }
            det = field.neg(&det);
        }
        let pivot = a.get(c, c).clone();
        det = field.mul(&det, &pivot);
        let inv = field.inv(&pivot).expect("pivot is nonzero");
        for i in c + 1..n {
            if field.is_zero(a.get(i, c)) {
                continue;
            }
            let factor = field.mul(a.get(i, c), &inv);
            for j in c..n {
                let v = field.sub(a.get(i, j), &field.mul(&factor, a.get(c, j)));
                a.set(i, j, v);
            }
        }
    }
    Ok(det)
}

/// `m * v` for a column vector `v`.
pub fn mat_vec<F: Field>(field: &F, m: &Matrix<F::Elem>, v: &[F::Elem]) -> Vec<F::Elem> {
    (0..m.rows)
        .map(|i| {
            m.row(i).iter().zip(v).fold(field.zero(), |acc, (a, b)| field.add(&acc, &field.mul(a, b)))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::field::{PrimeField, Rationals};
    use rand::SeedableRng;

    fn identity(f: &PrimeField, n: usize) -> Matrix<u64> {
        let mut m = Matrix::filled(n, n, 0);
        for i in 0..n {
            m.set(i, i, f.one());
        }
        m
    }

    #[test]
    fn identity_has_full_rank() {
        let f = PrimeField::p31();
        let red = row_reduce(&f, &identity(&f, 3)).unwrap();
        assert_eq!(red.rank, 3);
        assert!(red.kernel.is_empty());
    }

    #[test]
    fn zero_matrix_kernel_is_everything() {
        let f = PrimeField::p31();
        let red = row_reduce(&f, &Matrix::filled(2, 4, 0)).unwrap();
        assert_eq!(red.rank, 0);
        assert_eq!(red.kernel.len(), 4);
    }

    #[test]
    fn foreign_entries_are_rejected() {
        let f = PrimeField::new(7).unwrap();
        let m = Matrix::from_rows(&[vec![1, 9]]).unwrap();
        assert_eq!(row_reduce(&f, &m), Err(LinalgError::ForeignEntry { row: 0, col: 1 }));
    }

    #[test]
    fn kernel_vectors_are_annihilated() {
        let f = PrimeField::p31();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let rows = rng.gen_range(1..6);
            let cols = rng.gen_range(1..7);
            // low-rank product to get interesting kernels
            let inner = rng.gen_range(1..4);
            let a: Vec<Vec<u64>> = (0..rows).map(|_| (0..inner).map(|_| f.sample(&mut rng)).collect()).collect();
            let b: Vec<Vec<u64>> = (0..inner).map(|_| (0..cols).map(|_| f.sample(&mut rng)).collect()).collect();
            let m: Vec<Vec<u64>> = (0..rows)
                .map(|i| {
                    (0..cols)
                        .map(|j| (0..inner).fold(0, |acc, k| f.add(&acc, &f.mul(&a[i][k], &b[k][j]))))
                        .collect()
                })
                .collect();
            let m = Matrix::from_rows(&m).unwrap();
            let red = row_reduce(&f, &m).unwrap();
            assert_eq!(red.rank + red.kernel.len(), cols);
            for v in &red.kernel {
                assert!(mat_vec(&f, &m, v).iter().all(|x| *x == 0));
            }
        }
    }

    #[test]
    fn rational_determinant() {
        let q = Rationals::default();
        let m = Matrix::from_rows(&[
            vec![q.from_i64(2), q.from_i64(1)],
            vec![q.from_i64(7), q.from_i64(4)],
        ])
        .unwrap();
        assert_eq!(determinant(&q, &m).unwrap(), q.from_i64(1));
    }

    use rand::Rng;
}
