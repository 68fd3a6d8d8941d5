use std::ops::{Index, IndexMut};

use super::complex::Complex;
use super::poly::PolyCoeffs;
use crate::error::{Error, Result};

/// Dense row-major matrix of `f64`.
///
/// Entries are validated finite on construction; all operations are
/// deterministic (fixed iteration order, no randomized pivoting).
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    /// Builds a matrix from row-major data, validating the entry count and
    /// that every entry is finite.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows * cols != data.len() {
            return Err(Error::Dimension(format!(
                "{}x{} matrix needs {} entries, got {}",
                rows,
                cols,
                rows * cols,
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("matrix entries must be finite".into()));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Convenience constructor for literals; panics on ragged or non-finite
    /// input.
    pub fn from_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend_from_slice(row);
        }
        Matrix::new(r, c, data).expect("invalid literal matrix")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    /// Matrix product.
    pub fn mul(&self, rhs: &Matrix) -> Result<Matrix> {
        if self.cols != rhs.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, rhs: &Matrix) -> Result<Matrix> {
        self.zip_with(rhs, |a, b| a + b)
    }

    pub fn sub(&self, rhs: &Matrix) -> Result<Matrix> {
        self.zip_with(rhs, |a, b| a - b)
    }

    fn zip_with(&self, rhs: &Matrix, f: impl Fn(f64, f64) -> f64) -> Result<Matrix> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::Dimension(format!(
                "shape {}x{} vs {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn scale(&self, c: f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * c).collect(),
        }
    }

    /// Maximum absolute row sum.
    pub fn inf_norm(&self) -> f64 {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)].abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Rank by row reduction with partial pivoting; pivots with magnitude
    /// below `tol` times the largest absolute entry of the input count as
    /// zero. The threshold is fixed from the input so the result is
    /// invariant under row permutation and uniform scaling.
    pub fn numeric_rank(&self, tol: f64) -> usize {
        assert!(tol > 0.0, "tolerance must be positive");
        let threshold = tol * self.max_abs();
        let mut a = self.clone();
        let (m, n) = (a.rows, a.cols);
        let mut rank = 0;
        let mut row = 0;
        for col in 0..n {
            if row >= m {
                break;
            }
            let mut pivot_row = row;
            for r in row + 1..m {
                if a[(r, col)].abs() > a[(pivot_row, col)].abs() {
                    pivot_row = r;
                }
            }
            let pivot = a[(pivot_row, col)];
            if pivot.abs() <= threshold {
                continue;
            }
            if pivot_row != row {
                for j in 0..n {
                    let tmp = a[(row, j)];
                    a[(row, j)] = a[(pivot_row, j)];
                    a[(pivot_row, j)] = tmp;
                }
            }
            for r in row + 1..m {
                let factor = a[(r, col)] / a[(row, col)];
                if factor != 0.0 {
                    for j in col..n {
                        a[(r, j)] -= factor * a[(row, j)];
                    }
                }
            }
            rank += 1;
            row += 1;
        }
        rank
    }

    /// Positive-definiteness via Cholesky. Requires symmetry within 1e-12
    /// relative; pivots must exceed 1e-12 times the largest diagonal entry.
    pub fn is_positive_definite(&self) -> Result<bool> {
        if !self.is_square() {
            return Err(Error::Shape(format!(
                "{}x{} matrix is not square",
                self.rows, self.cols
            )));
        }
        let scale = self.max_abs();
        for i in 0..self.rows {
            for j in i + 1..self.cols {
                if (self[(i, j)] - self[(j, i)]).abs() > 1e-12 * scale.max(1e-300) {
                    return Err(Error::Shape("matrix is not symmetric".into()));
                }
            }
        }
        let n = self.rows;
        let diag_scale = (0..n).map(|i| self[(i, i)].abs()).fold(0.0, f64::max);
        let floor = 1e-12 * diag_scale;
        let mut l = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let mut sum = self[(i, j)];
                for k in 0..j {
                    sum -= l[i * n + k] * l[j * n + k];
                }
                if i == j {
                    if sum <= floor {
                        return Ok(false);
                    }
                    l[i * n + i] = sum.sqrt();
                } else {
                    l[i * n + j] = sum / l[j * n + j];
                }
            }
        }
        Ok(true)
    }

    /// Coefficients of det(lambda I - self), ascending degree, via the
    /// Faddeev-LeVerrier recurrence. Exact for integer matrices within the
    /// representable range. Requires a square matrix with n <= 8.
    pub fn char_poly(&self) -> PolyCoeffs {
        assert!(
            self.is_square(),
            "characteristic polynomial needs a square matrix"
        );
        let n = self.rows;
        assert!((1..=8).contains(&n), "kernel supports 1 <= n <= 8");
        // c[n] = 1; M_1 = I; c_{n-k} = -tr(A M_k)/k; M_{k+1} = A M_k + c_{n-k} I
        let mut coeffs = vec![0.0; n + 1];
        coeffs[n] = 1.0;
        let mut m = Matrix::identity(n);
        for k in 1..=n {
            let am = self.mul(&m).expect("square product");
            let c = -am.trace() / k as f64;
            coeffs[n - k] = c;
            if k < n {
                m = am;
                for i in 0..n {
                    m[(i, i)] += c;
                }
            }
        }
        PolyCoeffs::new(coeffs).expect("leading coefficient is 1")
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Dense row-major matrix of complex scalars. Used for the eigen-system
/// rank diagnostics, where elimination runs directly in complex arithmetic
/// instead of a doubled real embedding.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix {
            rows,
            cols,
            data: vec![Complex::ZERO; rows * cols],
        }
    }

    pub fn from_real(m: &Matrix) -> Self {
        let mut out = ComplexMatrix::zeros(m.rows(), m.cols());
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                out[(i, j)] = Complex::from_re(m[(i, j)]);
            }
        }
        out
    }

    /// lambda I - a, for the resolvent-style rank tests.
    pub fn shifted_from_real(a: &Matrix, lambda: Complex) -> Self {
        assert!(a.is_square());
        let mut m = ComplexMatrix::zeros(a.rows(), a.cols());
        for i in 0..a.rows() {
            for j in 0..a.cols() {
                let aij = Complex::from_re(a[(i, j)]);
                m[(i, j)] = if i == j { lambda - aij } else { -aij };
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Rank by complex Gaussian elimination with partial pivoting on the
    /// modulus; same thresholding rule as [`Matrix::numeric_rank`].
    pub fn numeric_rank(&self, tol: f64) -> usize {
        assert!(tol > 0.0, "tolerance must be positive");
        let threshold = tol * self.max_abs();
        let mut a = self.clone();
        let (m, n) = (a.rows, a.cols);
        let mut rank = 0;
        let mut row = 0;
        for col in 0..n {
            if row >= m {
                break;
            }
            let mut pivot_row = row;
            for r in row + 1..m {
                if a[(r, col)].abs() > a[(pivot_row, col)].abs() {
                    pivot_row = r;
                }
            }
            if a[(pivot_row, col)].abs() <= threshold {
                continue;
            }
            if pivot_row != row {
                for j in 0..n {
                    let tmp = a[(row, j)];
                    a[(row, j)] = a[(pivot_row, j)];
                    a[(pivot_row, j)] = tmp;
                }
            }
            for r in row + 1..m {
                let factor = a[(r, col)] / a[(row, col)];
                if factor != Complex::ZERO {
                    for j in col..n {
                        let sub = factor * a[(row, j)];
                        a[(r, j)] = a[(r, j)] - sub;
                    }
                }
            }
            rank += 1;
            row += 1;
        }
        rank
    }

    /// Determinant via elimination (product of pivots, sign from swaps).
    pub fn det(&self) -> Complex {
        assert!(self.rows == self.cols, "determinant needs a square matrix");
        let mut a = self.clone();
        let n = a.rows;
        let mut det = Complex::ONE;
        for col in 0..n {
            let mut pivot_row = col;
            for r in col + 1..n {
                if a[(r, col)].abs() > a[(pivot_row, col)].abs() {
                    pivot_row = r;
                }
            }
            if a[(pivot_row, col)] == Complex::ZERO {
                return Complex::ZERO;
            }
            if pivot_row != col {
                for j in 0..n {
                    let tmp = a[(col, j)];
                    a[(col, j)] = a[(pivot_row, j)];
                    a[(pivot_row, j)] = tmp;
                }
                det = -det;
            }
            det = det * a[(col, col)];
            for r in col + 1..n {
                let factor = a[(r, col)] / a[(col, col)];
                for j in col..n {
                    let sub = factor * a[(col, j)];
                    a[(r, j)] = a[(r, j)] - sub;
                }
            }
        }
        det
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex;
    fn index(&self, (i, j): (usize, usize)) -> &Complex {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex {
        &mut self.data[i * self.cols + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_product_is_neutral() {
        let m = Matrix::from_rows(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let i = Matrix::identity(2);
        assert_eq!(i.mul(&m).unwrap(), m);
        assert_eq!(m.mul(&i).unwrap(), m);
    }

    #[test]
    fn zero_product_is_zero() {
        let m = Matrix::from_rows(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let z = Matrix::zeros(2, 2);
        assert_eq!(z.mul(&m).unwrap(), z);
    }

    #[test]
    fn block_product_from_inertia_ratios() {
        // A1*A3 for sigma1=0.4, sigma3=0.25; trace = -phi2 = -2.3 and
        // det = 4*phi1 = 0.4 pin the entries.
        let a1 = Matrix::from_rows(&[&[0.0, 1.0], &[-1.6, 0.6]]);
        let a3 = Matrix::from_rows(&[&[0.0, 1.0], &[-0.25, -0.75]]);
        let p = a1.mul(&a3).unwrap();
        let expect = Matrix::from_rows(&[&[-0.25, -0.75], &[-0.15, -2.05]]);
        for i in 0..2 {
            for j in 0..2 {
                assert!((p[(i, j)] - expect[(i, j)]).abs() < 1e-15);
            }
        }
        assert!((p[(0, 0)] + p[(1, 1)] + 2.3).abs() < 1e-12);
        assert!((p[(0, 0)] * p[(1, 1)] - p[(0, 1)] * p[(1, 0)] - 0.4).abs() < 1e-12);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let a = Matrix::zeros(2, 3);
        let b = Matrix::zeros(2, 2);
        assert!(matches!(a.mul(&b), Err(Error::Dimension(_))));
    }

    #[test]
    fn rejects_non_finite_entries() {
        assert!(Matrix::new(1, 2, vec![1.0, f64::NAN]).is_err());
        assert!(Matrix::new(1, 2, vec![1.0, f64::INFINITY]).is_err());
        assert!(Matrix::new(2, 2, vec![1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn inf_norm_cases() {
        assert_eq!(Matrix::zeros(3, 3).inf_norm(), 0.0);
        assert_eq!(Matrix::identity(3).inf_norm(), 1.0);
        let m = Matrix::from_rows(&[&[1.0, -2.0], &[3.0, 4.0]]);
        assert_eq!(m.inf_norm(), 7.0);
    }

    #[test]
    fn rank_basic() {
        assert_eq!(Matrix::identity(4).numeric_rank(1e-9), 4);
        let m = Matrix::from_rows(&[&[1.0, 2.0], &[2.0, 4.0]]);
        assert_eq!(m.numeric_rank(1e-9), 1);
        assert_eq!(Matrix::zeros(3, 3).numeric_rank(1e-9), 0);
    }

    #[test]
    fn pd_small_cases() {
        assert!(Matrix::identity(6).is_positive_definite().unwrap());
        let m = Matrix::from_rows(&[&[1.0, 2.0], &[2.0, 1.0]]);
        assert!(!m.is_positive_definite().unwrap());
        // P1 block for J=(100,95,99), alpha3=1, alpha13=-5 (alpha1 = 415/858)
        let p1 = Matrix::from_rows(&[
            &[0.21212121212121213, -0.25252525252525254],
            &[-0.25252525252525254, 0.4836829836829837],
        ]);
        assert!(p1.is_positive_definite().unwrap());
        let asym = Matrix::from_rows(&[&[1.0, 0.5], &[0.0, 1.0]]);
        assert!(matches!(asym.is_positive_definite(), Err(Error::Shape(_))));
    }

    #[test]
    fn char_poly_small_cases() {
        // A2 block at sigma2 = 1/6: lambda^2 + 0.5
        let a2 = Matrix::from_rows(&[&[0.0, 1.0], &[-0.5, 0.0]]);
        let p = a2.char_poly();
        assert_eq!(p.coeffs(), &[0.5, 0.0, 1.0]);

        let p = Matrix::identity(3).char_poly();
        assert_eq!(p.coeffs(), &[-1.0, 3.0, -3.0, 1.0]);

        let p = Matrix::zeros(2, 2).char_poly();
        assert_eq!(p.coeffs(), &[0.0, 0.0, 1.0]);
    }

    #[test]
    fn complex_rank_and_det() {
        let i = ComplexMatrix::from_real(&Matrix::identity(3));
        assert_eq!(i.numeric_rank(1e-9), 3);
        assert_eq!(i.det(), Complex::ONE);

        // lambda I - A singular exactly at an eigenvalue of the rotation
        // generator [[0,1],[-1,0]] (eigenvalues +/- i).
        let a = Matrix::from_rows(&[&[0.0, 1.0], &[-1.0, 0.0]]);
        let shifted = ComplexMatrix::shifted_from_real(&a, Complex::I);
        assert_eq!(shifted.numeric_rank(1e-9), 1);
        assert!(shifted.det().abs() < 1e-14);
    }

    #[test]
    fn complex_rank_drops_by_one_at_simple_eigenvalue() {
        // coupled roll-yaw block for sigma1=0.4, sigma3=0.25 at its largest
        // eigenvalue 1.4527452067086393i: simple, so the rank is 3
        let a13 = Matrix::from_rows(&[
            &[0.0, 0.0, 0.0, 1.0],
            &[0.0, 0.0, -1.6, 0.6],
            &[0.0, 1.0, 0.0, 0.0],
            &[-0.25, -0.75, 0.0, 0.0],
        ]);
        let lambda = Complex::new(0.0, 1.4527452067086393);
        let shifted = ComplexMatrix::shifted_from_real(&a13, lambda);
        assert_eq!(shifted.numeric_rank(1e-9), 3);
        // off the spectrum the shift is regular
        let shifted = ComplexMatrix::shifted_from_real(&a13, Complex::new(0.0, 2.0));
        assert_eq!(shifted.numeric_rank(1e-9), 4);
    }
}
