//! Singular values by one-sided Jacobi orthogonalization, and the
//! 2-norm condition number built on top of them.

use crate::cmatrix::CMatrix;
use crate::error::{Error, Result};
use crate::scalar::Real;
use num_complex::Complex;

/// All singular values of a square complex matrix, descending.
pub fn singular_values<R: Real>(a: &CMatrix<R>) -> Result<Vec<R>> {
    if !a.is_square() {
        return Err(Error::Domain(format!(
            "singular_values: matrix is {}x{}, need square",
            a.rows(),
            a.cols()
        )));
    }
    let n = a.rows();
    if n == 0 {
        return Ok(Vec::new());
    }
    // Work on columns of a copy; rotations orthogonalize column pairs.
    let mut cols: Vec<Vec<Complex<R>>> = (0..n)
        .map(|j| (0..n).map(|i| a[(i, j)]).collect())
        .collect();
    let eps = R::epsilon();
    let max_sweeps = 60;
    for _ in 0..max_sweeps {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let mut alpha = R::zero();
                let mut beta = R::zero();
                let mut gamma = Complex::new(R::zero(), R::zero());
                for i in 0..n {
                    alpha += cols[p][i].norm_sqr();
                    beta += cols[q][i].norm_sqr();
                    gamma = gamma + cols[p][i].conj() * cols[q][i];
                }
                let g = gamma.norm();
                if g <= eps * (alpha * beta).sqrt() || g == R::zero() {
                    continue;
                }
                rotated = true;
                let phase = gamma.unscale(g);
                let zeta = (beta - alpha) / (R::of(2.0) * g);
                let t = {
                    let sign = if zeta < R::zero() { -R::one() } else { R::one() };
                    sign / (zeta.abs() + (R::one() + zeta * zeta).sqrt())
                };
                let c = R::one() / (R::one() + t * t).sqrt();
                let s = c * t;
                for i in 0..n {
                    let up = cols[p][i];
                    let vq = cols[q][i];
                    cols[p][i] = up.scale(c) - (phase.conj() * vq).scale(s);
                    cols[q][i] = (phase * up).scale(s) + vq.scale(c);
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<R> = cols
        .iter()
        .map(|col| {
            col.iter()
                .map(|v| v.norm_sqr())
                .fold(R::zero(), |a, b| a + b)
                .sqrt()
        })
        .collect();
    sv.sort_by(|x, y| y.partial_cmp(x).unwrap());
    Ok(sv)
}

/// 2-norm condition number sigma_max / sigma_min. Singular matrices map
/// to infinity.
pub fn condition_number<R: Real>(a: &CMatrix<R>) -> Result<R> {
    if !a.is_square() {
        return Err(Error::Domain(format!(
            "condition_number: matrix is {}x{}, need square",
            a.rows(),
            a.cols()
        )));
    }
    if a.rows() > 2000 {
        return Err(Error::Domain(format!(
            "condition_number: dimension {} exceeds the dense limit 2000",
            a.rows()
        )));
    }
    if a.rows() == 0 {
        return Err(Error::Domain("condition_number: empty matrix".into()));
    }
    let sv = singular_values(a)?;
    let smax = sv[0];
    let smin = sv[sv.len() - 1];
    if smin == R::zero() {
        return Ok(R::infinity());
    }
    Ok(smax / smin)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_is_perfectly_conditioned() {
        let a = CMatrix::<f64>::identity(5);
        let sv = singular_values(&a).unwrap();
        for s in &sv {
            assert!((s - 1.0).abs() < 1e-14);
        }
        assert!((condition_number(&a).unwrap() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn diagonal_condition() {
        let mut a = CMatrix::<f64>::zeros(2, 2);
        a[(0, 0)] = c(1.0, 0.0);
        a[(1, 1)] = c(1e-3, 0.0);
        let k = condition_number(&a).unwrap();
        assert!((k - 1e3).abs() < 1e-9 * 1e3);
    }

    #[test]
    fn complex_diagonal_magnitudes_sorted() {
        let mut a = CMatrix::<f64>::zeros(4, 4);
        a[(0, 0)] = c(0.0, 3.0);
        a[(1, 1)] = c(-7.0, 0.0);
        a[(2, 2)] = c(1.0, 1.0);
        a[(3, 3)] = c(0.5, -0.5);
        let sv = singular_values(&a).unwrap();
        let want = [7.0, 3.0, 2f64.sqrt(), 0.5 * 2f64.sqrt()];
        for (s, w) in sv.iter().zip(want) {
            assert!((s - w).abs() < 1e-13, "{s} vs {w}");
        }
    }

    #[test]
    fn unitary_invariance_of_condition() {
        // Multiplying rows by unit phases leaves singular values alone.
        let mut a = CMatrix::<f64>::zeros(3, 3);
        a[(0, 0)] = c(2.0, 1.0);
        a[(0, 1)] = c(0.3, -0.2);
        a[(1, 1)] = c(-1.5, 0.7);
        a[(1, 2)] = c(0.1, 0.1);
        a[(2, 0)] = c(0.4, 0.0);
        a[(2, 2)] = c(0.9, -2.0);
        let k0 = condition_number(&a).unwrap();
        let phases = [c(0.0, 1.0), (c(0.0, 1.0) * 0.6).exp(), c(-1.0, 0.0)];
        let mut b = CMatrix::<f64>::zeros(3, 3);
        for i in 0..3 {
            for j in 0..3 {
                b[(i, j)] = phases[i] * a[(i, j)];
            }
        }
        let k1 = condition_number(&b).unwrap();
        assert!((k0 - k1).abs() < 1e-11 * k0);
    }

    #[test]
    fn scaling_leaves_condition_unchanged() {
        let mut a = CMatrix::<f64>::zeros(2, 2);
        a[(0, 0)] = c(3.0, 0.0);
        a[(0, 1)] = c(1.0, 2.0);
        a[(1, 0)] = c(0.0, -1.0);
        a[(1, 1)] = c(4.0, 4.0);
        let k0 = condition_number(&a).unwrap();
        let k1 = condition_number(&a.scaled(c(0.0, 2.5))).unwrap();
        assert!((k0 - k1).abs() < 1e-11 * k0);
    }

    #[test]
    fn singular_matrix_reports_infinite_condition() {
        let mut a = CMatrix::<f64>::zeros(3, 3);
        a[(0, 0)] = c(1.0, 0.0);
        a[(0, 1)] = c(2.0, 0.0);
        a[(1, 0)] = c(2.0, 0.0);
        a[(1, 1)] = c(4.0, 0.0);
        a[(2, 2)] = c(1.0, 0.0);
        let k = condition_number(&a).unwrap();
        assert!(k.is_infinite());
    }

    #[test]
    fn frobenius_norm_preserved() {
        let mut a = CMatrix::<f64>::zeros(3, 3);
        let vals = [
            [c(1.0, 0.5), c(-0.3, 1.0), c(0.0, 0.0)],
            [c(2.0, -1.0), c(0.7, 0.7), c(1.1, 0.0)],
            [c(0.2, 0.2), c(-1.4, 0.0), c(3.0, -0.5)],
        ];
        for i in 0..3 {
            for j in 0..3 {
                a[(i, j)] = vals[i][j];
            }
        }
        let sv = singular_values(&a).unwrap();
        let fro2: f64 = sv.iter().map(|s| s * s).sum();
        assert!((fro2.sqrt() - a.frobenius()).abs() < 1e-12 * a.frobenius());
    }

    #[test]
    fn dimension_cap() {
        let a = CMatrix::<f64>::identity(2001);
        assert!(matches!(
            condition_number(&a),
            Err(crate::error::Error::Domain(_))
        ));
    }
}
