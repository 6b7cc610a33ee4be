//! Partial-pivoted LU factorization of dense complex matrices.

use crate::cmatrix::CMatrix;
use crate::error::{Error, Result};
use crate::scalar::Real;
use num_complex::Complex;

/// LU factorization handle: L (unit lower) and U packed in place, plus the
/// row permutation.
#[derive(Debug, Clone)]
pub struct Lu<R: Real> {
    lu: CMatrix<R>,
    piv: Vec<usize>,
}

/// Factors a square matrix with partial pivoting.
pub fn lu_factor<R: Real>(a: &CMatrix<R>) -> Result<Lu<R>> {
    if !a.is_square() {
        return Err(Error::Domain(format!(
            "lu_factor: matrix is {}x{}, need square",
            a.rows(),
            a.cols()
        )));
    }
    let n = a.rows();
    let mut lu = a.clone();
    let mut piv: Vec<usize> = (0..n).collect();
    let tiny = R::of(1e-300);
    for k in 0..n {
        // Pivot search on column k.
        let mut p = k;
        let mut best = lu[(k, k)].norm_sqr();
        for i in k + 1..n {
            let m = lu[(i, k)].norm_sqr();
            if m > best {
                best = m;
                p = i;
            }
        }
        if p != k {
            for j in 0..n {
                let t = lu[(k, j)];
                lu[(k, j)] = lu[(p, j)];
                lu[(p, j)] = t;
            }
            piv.swap(k, p);
        }
        let pivot = lu[(k, k)];
        if pivot.norm() < tiny {
            return Err(Error::Singular { pivot: k });
        }
        for i in k + 1..n {
            let f = lu[(i, k)] / pivot;
            lu[(i, k)] = f;
            for j in k + 1..n {
                let u = lu[(k, j)];
                lu[(i, j)] = lu[(i, j)] - f * u;
            }
        }
    }
    Ok(Lu { lu, piv })
}

impl<R: Real> Lu<R> {
    pub fn dim(&self) -> usize {
        self.lu.rows()
    }

    /// Solves A x = rhs.
    pub fn solve(&self, rhs: &[Complex<R>]) -> Vec<Complex<R>> {
        let n = self.dim();
        assert_eq!(rhs.len(), n, "rhs length mismatch");
        let mut x: Vec<Complex<R>> = self.piv.iter().map(|&p| rhs[p]).collect();
        // Forward: L y = P rhs.
        for i in 1..n {
            let mut acc = x[i];
            for j in 0..i {
                acc = acc - self.lu[(i, j)] * x[j];
            }
            x[i] = acc;
        }
        // Backward: U x = y.
        for i in (0..n).rev() {
            let mut acc = x[i];
            for j in i + 1..n {
                acc = acc - self.lu[(i, j)] * x[j];
            }
            x[i] = acc / self.lu[(i, i)];
        }
        x
    }

    /// Product of U's diagonal with the permutation sign: det(A).
    pub fn determinant(&self) -> Complex<R> {
        let n = self.dim();
        let mut det = Complex::new(R::one(), R::zero());
        for i in 0..n {
            det = det * self.lu[(i, i)];
        }
        // Permutation parity.
        let mut perm = self.piv.clone();
        let mut sign = R::one();
        for i in 0..n {
            while perm[i] != i {
                let t = perm[i];
                perm.swap(i, t);
                sign = -sign;
            }
        }
        det.scale(sign)
    }
}
