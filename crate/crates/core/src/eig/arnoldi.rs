//! Shift-invert Arnoldi iteration for the separated resonance problem.

use super::lu::{lu_factor, Lu};
use super::schur::eigenvalues;
use super::{
    make_set, omega_partial, random_unit_vector, refine_pair, ResonancePair, ResonanceSet,
    SeparatedProblem,
};
use crate::cmatrix::{axpy, hdot, norm2, scale_vec, CMatrix};
use crate::error::{Error, Result};
use crate::scalar::Real;
use num_complex::Complex;

const BREAKDOWN: f64 = 1e-14;
const MAX_RESTARTS: u64 = 5;

/// Finds the n_wanted eigenpairs of S u = omega^2 M u nearest the shift
/// (in omega), each with residual at most tol, by Arnoldi iteration on
/// T = (S - shift^2 M)^-1 M with a k-dimensional Krylov space.
pub fn shift_invert_arnoldi<R: Real>(
    problem: &SeparatedProblem<R>,
    shift: Complex<R>,
    k: usize,
    n_wanted: usize,
    tol: R,
) -> Result<ResonanceSet<R>> {
    let s = &problem.stiffness;
    let m = &problem.mass;
    let n = s.rows();
    if n == 0 {
        return Err(Error::Domain("shift_invert_arnoldi: empty problem".into()));
    }
    if n_wanted == 0 {
        return Err(Error::Domain(
            "shift_invert_arnoldi: n_wanted must be at least 1".into(),
        ));
    }
    if n_wanted > n {
        return Err(Error::Domain(format!(
            "shift_invert_arnoldi: n_wanted = {n_wanted} exceeds problem dimension {n}"
        )));
    }
    if k <= n_wanted {
        return Err(Error::Domain(format!(
            "shift_invert_arnoldi: Krylov dimension k = {k} must exceed n_wanted = {n_wanted}"
        )));
    }
    if !(tol > R::zero()) {
        return Err(Error::Domain(format!(
            "shift_invert_arnoldi: tolerance must be positive, got {tol}"
        )));
    }
    let k = k.min(n);
    let lambda_shift = shift * shift;
    let op = lu_factor(&s.sub_scaled(m, lambda_shift))?;

    let mut best: Vec<ResonancePair<R>> = Vec::new();
    for attempt in 0..=MAX_RESTARTS {
        let seed = 0x5eed_ba5e_0000_0000 ^ attempt.wrapping_mul(0x9e37_79b9_7f4a_7c15);
        let v0 = random_unit_vector::<R>(n, seed);
        let (vs, h, m_steps) = build_krylov(&op, m, v0, k);
        if m_steps < n_wanted {
            // Breakdown before enough directions were available.
            continue;
        }
        let mut hm = CMatrix::zeros(m_steps, m_steps);
        for i in 0..m_steps {
            for j in 0..m_steps {
                hm[(i, j)] = h[(i, j)];
            }
        }
        let thetas = eigenvalues(&hm)?;
        let mut cands: Vec<ResonancePair<R>> = Vec::new();
        for theta in thetas {
            if theta.norm() < R::of(1e-300) {
                continue;
            }
            let lambda = lambda_shift + theta.inv();
            let y = small_eigvec(&hm, theta, seed);
            let mut v = vec![Complex::new(R::zero(), R::zero()); n];
            for (j, yj) in y.iter().enumerate() {
                axpy(&mut v, *yj, &vs[j]);
            }
            let nv = norm2(&v);
            if !nv.is_finite() || nv == R::zero() {
                continue;
            }
            scale_vec(&mut v, Complex::new(R::one() / nv, R::zero()));
            cands.push(refine_pair(s, m, lambda, v));
        }
        dedup_by_omega(&mut cands);
        cands.retain(|p| p.residual <= tol);
        cands.sort_by(|a, b| {
            (a.omega - shift)
                .norm()
                .partial_cmp(&(b.omega - shift).norm())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        cands.truncate(n_wanted);
        if cands.len() >= n_wanted {
            return Ok(make_set(problem, cands));
        }
        if cands.len() > best.len() {
            best = cands;
        }
    }
    Err(Error::NonConvergence {
        wanted: n_wanted,
        converged: best.len(),
        partial: omega_partial(&best),
    })
}

/// Modified Gram-Schmidt Arnoldi with one re-orthogonalization pass.
/// Returns the basis, the square Hessenberg matrix, and the number of steps
/// actually completed (smaller than k only on breakdown).
fn build_krylov<R: Real>(
    op: &Lu<R>,
    m: &CMatrix<R>,
    v0: Vec<Complex<R>>,
    k: usize,
) -> (Vec<Vec<Complex<R>>>, CMatrix<R>, usize) {
    let mut vs = vec![v0];
    let mut h = CMatrix::zeros(k, k);
    let mut m_steps = k;
    for j in 0..k {
        let mv = m.matvec(&vs[j]);
        let mut w = op.solve(&mv);
        for _pass in 0..2 {
            for i in 0..=j {
                let hij = hdot(&vs[i], &w);
                axpy(&mut w, -hij, &vs[i]);
                h[(i, j)] = h[(i, j)] + hij;
            }
        }
        let nw = norm2(&w);
        if j + 1 < k {
            if nw < R::of(BREAKDOWN) {
                m_steps = j + 1;
                break;
            }
            h[(j + 1, j)] = Complex::new(nw, R::zero());
            scale_vec(&mut w, Complex::new(R::one() / nw, R::zero()));
            vs.push(w);
        }
    }
    (vs, h, m_steps)
}

/// Eigenvector of the small Hessenberg matrix for a known eigenvalue, by
/// inverse iteration at a perturbed shift.
fn small_eigvec<R: Real>(hm: &CMatrix<R>, theta: Complex<R>, seed: u64) -> Vec<Complex<R>> {
    let msize = hm.rows();
    let eye = CMatrix::identity(msize);
    let mut y = random_unit_vector::<R>(msize, seed ^ 0xabcd_ef01);
    for scale in [1e-12, 1e-9, 1e-6] {
        let pert = Complex::new(R::of(scale) * (R::one() + theta.norm()), R::zero());
        let Ok(fact) = lu_factor(&hm.sub_scaled(&eye, theta + pert)) else {
            continue;
        };
        for _ in 0..2 {
            let z = fact.solve(&y);
            let nz = norm2(&z);
            if !nz.is_finite() || nz == R::zero() {
                break;
            }
            y = z;
            scale_vec(&mut y, Complex::new(R::one() / nz, R::zero()));
        }
        break;
    }
    y
}

/// Keeps the smaller-residual representative of near-coincident frequencies.
fn dedup_by_omega<R: Real>(pairs: &mut Vec<ResonancePair<R>>) {
    pairs.sort_by(|a, b| {
        a.residual
            .partial_cmp(&b.residual)
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut kept: Vec<ResonancePair<R>> = Vec::with_capacity(pairs.len());
    for p in pairs.drain(..) {
        let close = kept
            .iter()
            .any(|q| (p.omega - q.omega).norm() < R::of(1e-9) * (R::one() + q.omega.norm()));
        if !close {
            kept.push(p);
        }
    }
    *pairs = kept;
}
