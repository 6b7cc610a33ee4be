//! Eigenvalues of dense complex matrices: Householder reduction to
//! Hessenberg form followed by the shifted QR iteration with Givens
//! rotations and deflation.

use crate::cmatrix::CMatrix;
use crate::error::{Error, Result};
use crate::scalar::Real;
use num_complex::Complex;

/// All eigenvalues of a square complex matrix, unordered.
pub fn eigenvalues<R: Real>(a: &CMatrix<R>) -> Result<Vec<Complex<R>>> {
    if !a.is_square() {
        return Err(Error::Domain(format!(
            "eigenvalues: matrix is {}x{}, need square",
            a.rows(),
            a.cols()
        )));
    }
    let mut h = a.clone();
    hessenberg(&mut h);
    qr_eigenvalues(&mut h)
}

/// In-place Householder reduction to upper Hessenberg form.
fn hessenberg<R: Real>(h: &mut CMatrix<R>) {
    let n = h.rows();
    if n < 3 {
        return;
    }
    let zero = Complex::new(R::zero(), R::zero());
    for j in 0..n - 2 {
        let mut xnorm2 = R::zero();
        for i in j + 1..n {
            xnorm2 += h[(i, j)].norm_sqr();
        }
        let xnorm = xnorm2.sqrt();
        if xnorm == R::zero() {
            continue;
        }
        let x0 = h[(j + 1, j)];
        let phase = if x0.norm() == R::zero() {
            Complex::new(R::one(), R::zero())
        } else {
            x0.unscale(x0.norm())
        };
        let alpha = -phase.scale(xnorm);
        let mut u: Vec<Complex<R>> = (j + 1..n).map(|i| h[(i, j)]).collect();
        u[0] = u[0] - alpha;
        let unorm2: R = u.iter().map(|v| v.norm_sqr()).fold(R::zero(), |a, b| a + b);
        if unorm2 < R::of(1e-300) {
            continue;
        }
        let beta = R::of(2.0) / unorm2;
        // Left: rows j+1..n over columns j..n.
        for col in j..n {
            let mut s = zero;
            for i in j + 1..n {
                s = s + u[i - j - 1].conj() * h[(i, col)];
            }
            let s = s.scale(beta);
            for i in j + 1..n {
                h[(i, col)] = h[(i, col)] - u[i - j - 1] * s;
            }
        }
        // Right: columns j+1..n over all rows.
        for row in 0..n {
            let mut s = zero;
            for col in j + 1..n {
                s = s + h[(row, col)] * u[col - j - 1];
            }
            let s = s.scale(beta);
            for col in j + 1..n {
                h[(row, col)] = h[(row, col)] - s * u[col - j - 1].conj();
            }
        }
        h[(j + 1, j)] = alpha;
        for i in j + 2..n {
            h[(i, j)] = zero;
        }
    }
}

/// Complex Givens rotation mapping (a, b) to (r, 0):
/// [c, s; -conj(s), c] [a; b] = [r; 0] with real c.
fn givens<R: Real>(a: Complex<R>, b: Complex<R>) -> (R, Complex<R>, Complex<R>) {
    let na = a.norm();
    let nb = b.norm();
    if nb == R::zero() {
        return (R::one(), Complex::new(R::zero(), R::zero()), a);
    }
    if na == R::zero() {
        return (R::zero(), b.conj().unscale(nb), Complex::new(nb, R::zero()));
    }
    let t = na.hypot(nb);
    let c = na / t;
    let phase = a.unscale(na);
    let s = phase * b.conj().unscale(t);
    let r = phase.scale(t);
    (c, s, r)
}

/// Eigenvalue of the trailing 2x2 of the active block closest to its last
/// diagonal entry.
fn wilkinson_shift<R: Real>(h: &CMatrix<R>, hi: usize) -> Complex<R> {
    let a = h[(hi - 2, hi - 2)];
    let b = h[(hi - 2, hi - 1)];
    let c = h[(hi - 1, hi - 2)];
    let d = h[(hi - 1, hi - 1)];
    let delta = (a - d).scale(R::of(0.5));
    let bc = b * c;
    let root = (delta * delta + bc).sqrt();
    let denom_plus = delta + root;
    let denom_minus = delta - root;
    let denom = if denom_plus.norm() >= denom_minus.norm() {
        denom_plus
    } else {
        denom_minus
    };
    if denom.norm() == R::zero() {
        return d;
    }
    d - bc / denom
}

/// Both eigenvalues of a 2x2 block.
fn eig2<R: Real>(
    a: Complex<R>,
    b: Complex<R>,
    c: Complex<R>,
    d: Complex<R>,
) -> (Complex<R>, Complex<R>) {
    let half_tr = (a + d).scale(R::of(0.5));
    let det = a * d - b * c;
    let disc = (half_tr * half_tr - det).sqrt();
    (half_tr + disc, half_tr - disc)
}

fn qr_eigenvalues<R: Real>(h: &mut CMatrix<R>) -> Result<Vec<Complex<R>>> {
    let n = h.rows();
    let mut eigs: Vec<Complex<R>> = Vec::with_capacity(n);
    if n == 0 {
        return Ok(eigs);
    }
    let eps = R::epsilon();
    let zero = Complex::new(R::zero(), R::zero());
    let mut hi = n;
    let mut iter_total = 0usize;
    let max_total = 30 * n;
    let mut stagnant = 0usize;
    while hi > 0 {
        if hi == 1 {
            eigs.push(h[(0, 0)]);
            break;
        }
        // Deflation point: largest l with a negligible subdiagonal.
        let mut l = hi - 1;
        while l > 0 {
            let sub = h[(l, l - 1)].norm();
            let scale = h[(l - 1, l - 1)].norm() + h[(l, l)].norm();
            if sub <= eps * scale.max(R::of(1e-300)) {
                h[(l, l - 1)] = zero;
                break;
            }
            l -= 1;
        }
        if l == hi - 1 {
            eigs.push(h[(hi - 1, hi - 1)]);
            hi -= 1;
            stagnant = 0;
            continue;
        }
        if l + 2 == hi {
            let (e1, e2) = eig2(h[(l, l)], h[(l, l + 1)], h[(l + 1, l)], h[(l + 1, l + 1)]);
            eigs.push(e1);
            eigs.push(e2);
            hi -= 2;
            stagnant = 0;
            continue;
        }
        iter_total += 1;
        stagnant += 1;
        if iter_total > max_total {
            return Err(Error::Numeric(format!(
                "QR iteration did not converge after {max_total} steps"
            )));
        }
        let mu = if stagnant > 0 && stagnant % 10 == 0 {
            // Exceptional shift to break stagnation; the active block has
            // size >= 3 here so hi - 3 is in range.
            let kick = h[(hi - 1, hi - 2)].norm() + h[(hi - 2, hi - 3)].norm();
            h[(hi - 1, hi - 1)] + Complex::new(R::of(0.75) * kick, R::zero())
        } else {
            wilkinson_shift(h, hi)
        };
        qr_step(h, l, hi, mu);
    }
    Ok(eigs)
}

/// One explicit shifted QR step on the active block l..hi.
fn qr_step<R: Real>(h: &mut CMatrix<R>, l: usize, hi: usize, mu: Complex<R>) {
    let zero = Complex::new(R::zero(), R::zero());
    for i in l..hi {
        h[(i, i)] = h[(i, i)] - mu;
    }
    let mut rots: Vec<(R, Complex<R>)> = Vec::with_capacity(hi - l - 1);
    for i in l..hi - 1 {
        let (c, s, r) = givens(h[(i, i)], h[(i + 1, i)]);
        rots.push((c, s));
        h[(i, i)] = r;
        h[(i + 1, i)] = zero;
        for col in i + 1..hi {
            let a = h[(i, col)];
            let b = h[(i + 1, col)];
            h[(i, col)] = a.scale(c) + s * b;
            h[(i + 1, col)] = b.scale(c) - s.conj() * a;
        }
    }
    for (idx, &(c, s)) in rots.iter().enumerate() {
        let i = l + idx;
        let row_end = (i + 2).min(hi);
        for row in l..row_end {
            let a = h[(row, i)];
            let b = h[(row, i + 1)];
            h[(row, i)] = a.scale(c) + b * s.conj();
            h[(row, i + 1)] = b.scale(c) - a * s;
        }
    }
    for i in l..hi {
        h[(i, i)] = h[(i, i)] + mu;
    }
}
