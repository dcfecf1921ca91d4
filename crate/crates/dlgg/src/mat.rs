//! Dense symmetric-matrix storage and Cholesky factorization.
//!
//! Symmetric matrices are stored as the packed upper triangle plus diagonal,
//! so `entry(i, j) == entry(j, i)` holds by construction: there is a single
//! storage cell per unordered index pair and symmetry cannot be violated by
//! a buggy update.

use crate::error::{Error, Result};
use crate::scalar::{c, Scalar};

/// Relative pivot threshold for positive-definiteness checks.
const PIVOT_REL_TOL: f64 = 1e-12;

/// Symmetric `p x p` matrix, packed upper-triangle-plus-diagonal storage.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix<T> {
    dim: usize,
    data: Vec<T>,
}

#[inline]
fn packed_index(dim: usize, i: usize, j: usize) -> usize {
    debug_assert!(i <= j && j < dim);
    i * (2 * dim - i + 1) / 2 + (j - i)
}

impl<T: Scalar> SymMatrix<T> {
    /// All-zero symmetric matrix.
    ///
    /// Model-level matrices have `dim >= 2` (enforced by [`PrecisionMatrix`]
    /// and [`ScatterMatrix`]); 1x1 blocks arise internally from column
    /// partitions of 2x2 matrices.
    pub fn zeros(dim: usize) -> Result<Self> {
        if dim < 1 {
            return Err(Error::InvalidArgument(
                "symmetric matrix dimension must be >= 1".into(),
            ));
        }
        Ok(SymMatrix {
            dim,
            data: vec![T::zero(); dim * (dim + 1) / 2],
        })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        let mut m = Self::zeros(dim)?;
        for i in 0..dim {
            m.set(i, i, T::one());
        }
        Ok(m)
    }

    /// Build from a function of (row, col); only the upper triangle is queried.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> T) -> Result<Self> {
        let mut m = Self::zeros(dim)?;
        for i in 0..dim {
            for j in i..dim {
                m.set(i, j, f(i, j));
            }
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        self.data[packed_index(self.dim, a, b)]
    }

    /// Sets both `(i, j)` and `(j, i)` (same storage cell).
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        self.data[packed_index(self.dim, a, b)] = v;
    }

    /// Packed storage in row-major upper-triangle order, diagonal included.
    pub fn packed(&self) -> &[T] {
        &self.data
    }

    pub fn from_packed(dim: usize, data: Vec<T>) -> Result<Self> {
        if dim < 1 || data.len() != dim * (dim + 1) / 2 {
            return Err(Error::InvalidArgument(format!(
                "packed length {} does not match dimension {dim}",
                data.len()
            )));
        }
        Ok(SymMatrix { dim, data })
    }

    pub fn max_abs_diag(&self) -> T {
        (0..self.dim)
            .map(|i| self.get(i, i).abs())
            .fold(T::zero(), T::max)
    }

    /// Largest |entry| over the strict upper triangle.
    pub fn max_abs_offdiag(&self) -> T {
        let mut m = T::zero();
        for i in 0..self.dim {
            for j in (i + 1)..self.dim {
                m = m.max(self.get(i, j).abs());
            }
        }
        m
    }

    /// tr(A B) for symmetric A, B of equal dimension.
    pub fn trace_product(&self, other: &SymMatrix<T>) -> T {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let mut acc = T::zero();
        for i in 0..self.dim {
            acc = acc + self.get(i, i) * other.get(i, i);
        }
        let mut off = T::zero();
        for i in 0..self.dim {
            for j in (i + 1)..self.dim {
                off = off + self.get(i, j) * other.get(i, j);
            }
        }
        acc + off + off
    }

    /// Copy with row/column `j` deleted; remaining indices keep their order.
    pub fn delete_row_col(&self, j: usize) -> Result<SymMatrix<T>> {
        assert!(j < self.dim);
        let keep: Vec<usize> = (0..self.dim).filter(|&k| k != j).collect();
        SymMatrix::from_fn(self.dim - 1, |r, s| self.get(keep[r], keep[s]))
    }

    /// Cholesky factorization `A = L L^T`.
    ///
    /// Fails with the 0-based pivot index when a pivot drops below
    /// `1e-12 * A_ii` (relative to that row's own diagonal entry). The
    /// per-row scale matters: shrinkage produces conditionals whose diagonal
    /// entries legitimately span many orders of magnitude, and a threshold
    /// tied to the max diagonal would reject those well-conditioned-after-
    /// scaling matrices.
    pub fn cholesky(&self) -> Result<CholeskyFactor<T>> {
        let p = self.dim;
        let rel = c::<T>(PIVOT_REL_TOL);
        let mut l = vec![T::zero(); p * (p + 1) / 2];
        let lidx = |i: usize, j: usize| i * (i + 1) / 2 + j;
        for i in 0..p {
            for j in 0..=i {
                let mut s = self.get(i, j);
                for k in 0..j {
                    s = s - l[lidx(i, k)] * l[lidx(j, k)];
                }
                if i == j {
                    let d = self.get(i, i);
                    if !(d > T::zero()) || s <= d * rel || !s.is_finite() {
                        return Err(Error::NotPositiveDefinite { pivot: i });
                    }
                    l[lidx(i, i)] = s.sqrt();
                } else {
                    l[lidx(i, j)] = s / l[lidx(j, j)];
                }
            }
        }
        Ok(CholeskyFactor { dim: p, data: l })
    }

    /// Tolerance-gated positive semi-definiteness check.
    ///
    /// Runs an outer-product Cholesky on a dense working copy. A pivot below
    /// `-tol` fails outright; a pivot in `[-tol, tol]` must come with a
    /// (numerically) zero remaining column, as exact PSD matrices require.
    pub fn check_psd(&self) -> Result<()> {
        let p = self.dim;
        let scale = self.max_abs_diag().max(T::one());
        let tol = scale * c::<T>(1e-10);
        let mut w = vec![T::zero(); p * p];
        for i in 0..p {
            for j in 0..p {
                w[i * p + j] = self.get(i, j);
            }
        }
        for k in 0..p {
            let d = w[k * p + k];
            if d < -tol {
                return Err(Error::NotPositiveSemiDefinite { pivot: k });
            }
            if d <= tol {
                // Zero pivot: the rest of this row/column of the Schur
                // complement must vanish too.
                let col_tol = scale * c::<T>(1e-7);
                for i in (k + 1)..p {
                    if w[i * p + k].abs() > col_tol {
                        return Err(Error::NotPositiveSemiDefinite { pivot: k });
                    }
                }
                for i in (k + 1)..p {
                    w[i * p + k] = T::zero();
                    w[k * p + i] = T::zero();
                }
                continue;
            }
            for i in (k + 1)..p {
                let f = w[i * p + k] / d;
                for j in (k + 1)..p {
                    let delta = f * w[k * p + j];
                    w[i * p + j] = w[i * p + j] - delta;
                }
            }
        }
        Ok(())
    }
}

/// Lower-triangular Cholesky factor, packed row-major.
#[derive(Debug, Clone)]
pub struct CholeskyFactor<T> {
    dim: usize,
    data: Vec<T>,
}

impl<T: Scalar> CholeskyFactor<T> {
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        if j > i {
            T::zero()
        } else {
            self.data[i * (i + 1) / 2 + j]
        }
    }

    /// log det(A) = 2 sum log L_ii for A = L L^T.
    pub fn log_det(&self) -> T {
        let mut acc = T::zero();
        for i in 0..self.dim {
            acc = acc + self.get(i, i).ln();
        }
        acc + acc
    }

    /// Solve L y = b in place.
    pub fn solve_lower(&self, b: &mut [T]) {
        assert_eq!(b.len(), self.dim);
        for i in 0..self.dim {
            let mut s = b[i];
            for k in 0..i {
                s = s - self.get(i, k) * b[k];
            }
            b[i] = s / self.get(i, i);
        }
    }

    /// Solve L^T x = b in place.
    pub fn solve_lower_transpose(&self, b: &mut [T]) {
        assert_eq!(b.len(), self.dim);
        for i in (0..self.dim).rev() {
            let mut s = b[i];
            for k in (i + 1)..self.dim {
                s = s - self.get(k, i) * b[k];
            }
            b[i] = s / self.get(i, i);
        }
    }

    /// Solve (L L^T) x = b.
    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let mut x = b.to_vec();
        self.solve_lower(&mut x);
        self.solve_lower_transpose(&mut x);
        x
    }

    /// x^T A^{-1} x via one triangular solve.
    pub fn inv_quad_form(&self, x: &[T]) -> T {
        let mut w = x.to_vec();
        self.solve_lower(&mut w);
        w.iter().map(|&v| v * v).sum()
    }

    /// Explicit A^{-1} as a symmetric matrix (column-by-column solve).
    pub fn inverse(&self) -> SymMatrix<T> {
        let p = self.dim;
        let mut inv = SymMatrix::zeros(p).expect("dim >= 1");
        let mut e = vec![T::zero(); p];
        for j in 0..p {
            e.iter_mut().for_each(|v| *v = T::zero());
            e[j] = T::one();
            let col = self.solve(&e);
            for i in j..p {
                inv.set(i, j, col[i]);
            }
        }
        inv
    }

    /// A = L L^T reconstructed (testing aid).
    pub fn reconstruct(&self) -> SymMatrix<T> {
        let p = self.dim;
        SymMatrix::from_fn(p, |i, j| {
            let mut s = T::zero();
            for k in 0..=i.min(j) {
                s = s + self.get(i, k) * self.get(j, k);
            }
            s
        })
        .expect("dim >= 1")
    }
}

/// Symmetric positive-definite precision matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct PrecisionMatrix<T> {
    m: SymMatrix<T>,
}

impl<T: Scalar> PrecisionMatrix<T> {
    /// Validate positive definiteness (Cholesky succeeds, diagonal > 0).
    pub fn new(m: SymMatrix<T>) -> Result<Self> {
        if m.dim() < 2 {
            return Err(Error::InvalidArgument(
                "precision matrix dimension must be >= 2".into(),
            ));
        }
        for i in 0..m.dim() {
            if m.get(i, i) <= T::zero() {
                return Err(Error::NotPositiveDefinite { pivot: i });
            }
        }
        m.cholesky()?;
        Ok(PrecisionMatrix { m })
    }

    /// Wrap without re-factorizing; caller guarantees positive definiteness.
    pub(crate) fn from_sym_unchecked(m: SymMatrix<T>) -> Self {
        PrecisionMatrix { m }
    }

    pub fn dim(&self) -> usize {
        self.m.dim()
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.m.get(i, j)
    }

    pub fn as_sym(&self) -> &SymMatrix<T> {
        &self.m
    }

    pub fn into_sym(self) -> SymMatrix<T> {
        self.m
    }

    pub fn cholesky(&self) -> Result<CholeskyFactor<T>> {
        self.m.cholesky()
    }

    /// log det via the Cholesky factor.
    pub fn log_det(&self) -> Result<T> {
        Ok(self.m.cholesky()?.log_det())
    }

    /// Inverse (the covariance matrix when `self` is a precision matrix).
    pub fn inverse(&self) -> Result<SymMatrix<T>> {
        Ok(self.m.cholesky()?.inverse())
    }
}

/// Scatter matrix S = X^T X of a centered data set, with the sample count.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatterMatrix<T> {
    m: SymMatrix<T>,
    n: usize,
}

impl<T: Scalar> ScatterMatrix<T> {
    /// Validate positive semi-definiteness (tolerance-gated).
    pub fn new(m: SymMatrix<T>, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("sample count must be positive".into()));
        }
        if m.dim() < 2 {
            return Err(Error::InvalidArgument(
                "scatter matrix dimension must be >= 2".into(),
            ));
        }
        m.check_psd()?;
        Ok(ScatterMatrix { m, n })
    }

    /// S = sum_i x_i x_i^T over the rows of `data`.
    pub fn from_data(data: &Matrix<T>) -> Result<Self> {
        let n = data.rows();
        let p = data.cols();
        let mut m = SymMatrix::zeros(p)?;
        for i in 0..p {
            for j in i..p {
                let mut s = T::zero();
                for r in 0..n {
                    s = s + data.get(r, i) * data.get(r, j);
                }
                m.set(i, j, s);
            }
        }
        ScatterMatrix::new(m, n)
    }

    pub fn dim(&self) -> usize {
        self.m.dim()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.m.get(i, j)
    }

    pub fn as_sym(&self) -> &SymMatrix<T> {
        &self.m
    }
}

/// Plain dense row-major matrix (data sets, generated samples).
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let r = rows.len();
        if r == 0 {
            return Err(Error::InvalidArgument("matrix needs at least one row".into()));
        }
        let cols = rows[0].len();
        let mut data = Vec::with_capacity(r * cols);
        for (idx, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::InvalidArgument(format!(
                    "ragged rows: row {} has {} entries, expected {cols}",
                    idx + 1,
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        Ok(Matrix { rows: r, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> T {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: T) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }
}
