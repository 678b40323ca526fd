use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{Real, C};

/// Dense complex matrix.
///
/// Storage is column-major (nalgebra) but callers only see `(row, col)`
/// accessors and whole-matrix operations.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix<T: Real> {
    data: DMatrix<C<T>>,
}

impl<T: Real> fmt::Debug for ComplexMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ComplexMatrix {}x{} {:?}", self.rows(), self.cols(), self.data)
    }
}

impl<T: Real> ComplexMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { data: DMatrix::zeros(rows, cols) }
    }

    pub fn identity(n: usize) -> Self {
        Self { data: DMatrix::identity(n, n) }
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> C<T>) -> Self {
        Self { data: DMatrix::from_fn(rows, cols, f) }
    }

    /// Builds a matrix from entries listed row by row.
    pub fn from_row_major(rows: usize, cols: usize, entries: &[C<T>]) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::InvalidShape(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Ok(Self { data: DMatrix::from_row_slice(rows, cols, entries) })
    }

    pub fn from_real_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        Self::from_fn(rows, cols, |i, j| Complex::new(f(i, j), T::zero()))
    }

    /// Diagonal matrix with the given real diagonal.
    pub fn from_diagonal(diag: &[T]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| if i == j { Complex::new(diag[i], T::zero()) } else { Complex::new(T::zero(), T::zero()) })
    }

    pub fn from_nalgebra(data: DMatrix<C<T>>) -> Self {
        Self { data }
    }

    pub fn as_nalgebra(&self) -> &DMatrix<C<T>> {
        &self.data
    }

    pub fn into_nalgebra(self) -> DMatrix<C<T>> {
        self.data
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.data.nrows()
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.data.ncols()
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        self.data.shape()
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> C<T> {
        self.data[(row, col)]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: C<T>) {
        self.data[(row, col)] = value;
    }

    pub fn is_empty(&self) -> bool {
        self.rows() == 0 || self.cols() == 0
    }

    /// Entries row by row.
    pub fn to_row_major(&self) -> Vec<C<T>> {
        let mut out = Vec::with_capacity(self.rows() * self.cols());
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                out.push(self.data[(i, j)]);
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        Self { data: self.data.adjoint() }
    }

    pub fn transpose(&self) -> Self {
        Self { data: self.data.transpose() }
    }

    pub fn scale(&self, s: T) -> Self {
        Self { data: self.data.map(|z| z * s) }
    }

    pub fn scale_complex(&self, s: C<T>) -> Self {
        Self { data: self.data.map(|z| z * s) }
    }

    pub fn frobenius_norm_sqr(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr())
    }

    pub fn frobenius_norm(&self) -> T {
        self.frobenius_norm_sqr().sqrt()
    }

    pub fn column_norm(&self, col: usize) -> T {
        self.data.column(col).iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Contiguous block of columns `start..end`.
    pub fn columns(&self, start: usize, end: usize) -> Self {
        assert!(start <= end && end <= self.cols(), "column range {start}..{end} out of bounds");
        Self { data: self.data.columns(start, end - start).into_owned() }
    }

    /// Contiguous block of rows `start..end`.
    pub fn row_range(&self, start: usize, end: usize) -> Self {
        assert!(start <= end && end <= self.rows(), "row range {start}..{end} out of bounds");
        Self { data: self.data.rows(start, end - start).into_owned() }
    }

    /// Gathers the listed columns in order.
    pub fn select_columns(&self, idx: &[usize]) -> Self {
        Self::from_fn(self.rows(), idx.len(), |i, j| self.data[(i, idx[j])])
    }

    /// Writes `block`'s columns into the listed column positions.
    pub fn scatter_columns(&mut self, idx: &[usize], block: &Self) {
        assert_eq!(block.cols(), idx.len());
        assert_eq!(block.rows(), self.rows());
        for (j, &c) in idx.iter().enumerate() {
            self.data.set_column(c, &block.data.column(j));
        }
    }

    pub fn hstack(&self, other: &Self) -> Result<Self> {
        if self.rows() != other.rows() {
            return Err(Error::InvalidShape(format!(
                "hstack of {}x{} and {}x{}",
                self.rows(),
                self.cols(),
                other.rows(),
                other.cols()
            )));
        }
        let split = self.cols();
        Ok(Self::from_fn(self.rows(), split + other.cols(), |i, j| {
            if j < split {
                self.data[(i, j)]
            } else {
                other.data[(i, j - split)]
            }
        }))
    }

    pub fn vstack(&self, other: &Self) -> Result<Self> {
        if self.cols() != other.cols() {
            return Err(Error::InvalidShape(format!(
                "vstack of {}x{} and {}x{}",
                self.rows(),
                self.cols(),
                other.rows(),
                other.cols()
            )));
        }
        let split = self.rows();
        Ok(Self::from_fn(split + other.rows(), self.cols(), |i, j| {
            if i < split {
                self.data[(i, j)]
            } else {
                other.data[(i - split, j)]
            }
        }))
    }

    /// `self * other` with a shape check.
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols() != other.rows() {
            return Err(Error::InvalidShape(format!(
                "product of {}x{} and {}x{}",
                self.rows(),
                self.cols(),
                other.rows(),
                other.cols()
            )));
        }
        Ok(Self { data: &self.data * &other.data })
    }

    /// `self^H * other` without materializing the adjoint.
    pub fn adjoint_mul(&self, other: &Self) -> Self {
        Self { data: self.data.ad_mul(&other.data) }
    }

    /// `self * other^H`.
    pub fn mul_adjoint(&self, other: &Self) -> Self {
        Self { data: &self.data * other.data.adjoint() }
    }

    /// Adds `s` to every diagonal entry.
    pub fn add_diagonal(&self, s: T) -> Self {
        let mut out = self.clone();
        let n = self.rows().min(self.cols());
        for k in 0..n {
            out.data[(k, k)].re += s;
        }
        out
    }

    /// Largest absolute entrywise deviation from `other`.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!(self.shape(), other.shape());
        self.data
            .iter()
            .zip(other.data.iter())
            .fold(T::zero(), |acc, (a, b)| acc.max(crate::scalar::modulus(*a - *b)))
    }

    /// `‖self − other‖_F`.
    pub fn distance(&self, other: &Self) -> T {
        (self - other).frobenius_norm()
    }

    /// Hermitian test `‖A − A^H‖_F ≤ tol·max(‖A‖_F, 1)`.
    pub fn is_hermitian(&self, tol: T) -> bool {
        if self.rows() != self.cols() {
            return false;
        }
        let skew = (&self.data - self.data.adjoint()).norm();
        skew <= tol * self.frobenius_norm().max(T::one())
    }

    /// Drops to `f64` regardless of `T`.
    pub fn map_to_f64(&self) -> ComplexMatrix<f64> {
        ComplexMatrix::from_nalgebra(
            self.data.map(|z| Complex::new(z.re.to_f64_lossy(), z.im.to_f64_lossy())),
        )
    }
}

impl<T: Real> Add for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn add(self, rhs: Self) -> ComplexMatrix<T> {
        ComplexMatrix { data: &self.data + &rhs.data }
    }
}

impl<T: Real> Sub for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn sub(self, rhs: Self) -> ComplexMatrix<T> {
        ComplexMatrix { data: &self.data - &rhs.data }
    }
}

impl<T: Real> Mul for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    /// Panics on mismatched shapes; use [`ComplexMatrix::matmul`] for a checked product.
    fn mul(self, rhs: Self) -> ComplexMatrix<T> {
        ComplexMatrix { data: &self.data * &rhs.data }
    }
}

impl<T: Real> Neg for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn neg(self) -> ComplexMatrix<T> {
        ComplexMatrix { data: -&self.data }
    }
}
