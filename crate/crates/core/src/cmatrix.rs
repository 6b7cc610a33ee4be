//! Dense complex matrices (row-major) and small vector helpers.
//!
//! Desk-scale problems (a few hundred unknowns) make dense storage the
//! simplest correct choice; structure metadata is tracked separately by the
//! assembly layer.

use crate::scalar::Real;
use num_complex::Complex;
use std::ops::{Index, IndexMut};

#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix<R: Real> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<R>>,
}

impl<R: Real> CMatrix<R> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix {
            rows,
            cols,
            data: vec![Complex::new(R::zero(), R::zero()); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex::new(R::one(), R::zero());
        }
        m
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

    pub fn row(&self, i: usize) -> &[Complex<R>] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [Complex<R>] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// y = A x.
    pub fn matvec(&self, x: &[Complex<R>]) -> Vec<Complex<R>> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let mut acc = Complex::new(R::zero(), R::zero());
                for (a, b) in self.row(i).iter().zip(x) {
                    acc = acc + a * b;
                }
                acc
            })
            .collect()
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self[(i, k)];
                if aik.re == R::zero() && aik.im == R::zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] = out[(i, j)] + aik * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn scaled(&self, s: Complex<R>) -> Self {
        let mut out = self.clone();
        for v in &mut out.data {
            *v = *v * s;
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (v, w) in out.data.iter_mut().zip(&other.data) {
            *v = *v + *w;
        }
        out
    }

    /// self - s * other.
    pub fn sub_scaled(&self, other: &Self, s: Complex<R>) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (v, w) in out.data.iter_mut().zip(&other.data) {
            *v = *v - s * *w;
        }
        out
    }

    pub fn max_abs(&self) -> R {
        self.data
            .iter()
            .map(|v| v.norm())
            .fold(R::zero(), |a, b| if b > a { b } else { a })
    }

    pub fn frobenius(&self) -> R {
        self.data
            .iter()
            .map(|v| v.norm_sqr())
            .fold(R::zero(), |a, b| a + b)
            .sqrt()
    }

    /// Largest entrywise |self - other|.
    pub fn max_abs_diff(&self, other: &Self) -> R {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(R::zero(), |a, b| if b > a { b } else { a })
    }
}

impl<R: Real> Index<(usize, usize)> for CMatrix<R> {
    type Output = Complex<R>;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex<R> {
        &self.data[i * self.cols + j]
    }
}

impl<R: Real> IndexMut<(usize, usize)> for CMatrix<R> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<R> {
        &mut self.data[i * self.cols + j]
    }
}

/// Unconjugated dot product sum_i a_i b_i.
pub fn dot<R: Real>(a: &[Complex<R>], b: &[Complex<R>]) -> Complex<R> {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = Complex::new(R::zero(), R::zero());
    for (x, y) in a.iter().zip(b) {
        acc = acc + x * y;
    }
    acc
}

/// Hermitian dot product sum_i conj(a_i) b_i.
pub fn hdot<R: Real>(a: &[Complex<R>], b: &[Complex<R>]) -> Complex<R> {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = Complex::new(R::zero(), R::zero());
    for (x, y) in a.iter().zip(b) {
        acc = acc + x.conj() * y;
    }
    acc
}

/// Euclidean norm.
pub fn norm2<R: Real>(a: &[Complex<R>]) -> R {
    a.iter()
        .map(|v| v.norm_sqr())
        .fold(R::zero(), |x, y| x + y)
        .sqrt()
}

/// y += s * x.
pub fn axpy<R: Real>(y: &mut [Complex<R>], s: Complex<R>, x: &[Complex<R>]) {
    debug_assert_eq!(y.len(), x.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi = *yi + s * xi;
    }
}

pub fn scale_vec<R: Real>(a: &mut [Complex<R>], s: Complex<R>) {
    for v in a.iter_mut() {
        *v = *v * s;
    }
}
