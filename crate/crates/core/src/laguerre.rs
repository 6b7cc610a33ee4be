//! Generalized Laguerre polynomials and functions, their recurrences and
//! derivative expansion, and Gauss quadrature rules on (0, inf) with weight
//! exp(-c x).
//!
//! The radial basis is phi_n(x) = exp(-x) L_n(2x) with (phi_n, phi_k) =
//! delta_{nk}/2 in L2(0, inf); the shifted families L_{n,m} enter through
//! index and derivative identities.

use crate::cmatrix::CMatrix;
use crate::error::{Error, Result};
use crate::scalar::Real;
use num_complex::Complex;

/// Generalized Laguerre polynomial L_{n,m}(x), by the three-term recurrence
/// k L_{k,m} = (2k-1+m-x) L_{k-1,m} - (k-1+m) L_{k-2,m}, seeded with
/// L_{0,m} = 1 and L_{1,m} = 1+m-x.
pub fn eval_laguerre<R: Real>(n: usize, m: i64, x: Complex<R>) -> Result<Complex<R>> {
    if m < -(n as i64) {
        return Err(Error::Domain(format!(
            "eval_laguerre: shift m = {m} below -n = {}",
            -(n as i64)
        )));
    }
    let one = Complex::new(R::one(), R::zero());
    if n == 0 {
        return Ok(one);
    }
    let mr = R::of(m as f64);
    let mut prev = one;
    let mut cur = Complex::new(R::one() + mr, R::zero()) - x;
    for k in 2..=n {
        let kr = R::of_usize(k);
        let a = Complex::new(R::of_usize(2 * k - 1) + mr, R::zero()) - x;
        let b = R::of_usize(k - 1) + mr;
        let next = (a * cur - prev.scale(b)).unscale(kr);
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// Generalized Laguerre function phi_{n,m}(x) = exp(-x) L_{n,m}(2x).
///
/// For the m = 0 family the value is produced by the function-level
/// recurrence k phi_k = (2k-1-2x) phi_{k-1} - (k-1) phi_{k-2}, which stays
/// bounded where the polynomial factor alone would overflow.
pub fn eval_phi<R: Real>(n: usize, m: i64, x: Complex<R>) -> Result<Complex<R>> {
    if m < -(n as i64) {
        return Err(Error::Domain(format!(
            "eval_phi: shift m = {m} below -n = {}",
            -(n as i64)
        )));
    }
    let e = (-x).exp();
    if m == 0 {
        if n == 0 {
            return Ok(e);
        }
        let two_x = x + x;
        let mut prev = e;
        let mut cur = (Complex::new(R::one(), R::zero()) - two_x) * e;
        for k in 2..=n {
            let kr = R::of_usize(k);
            let a = Complex::new(R::of_usize(2 * k - 1), R::zero()) - two_x;
            let next = (a * cur - prev.scale(R::of_usize(k - 1))).unscale(kr);
            prev = cur;
            cur = next;
        }
        return Ok(cur);
    }
    Ok(e * eval_laguerre(n, m, x + x)?)
}

/// All of phi_0(x) .. phi_{n_max}(x) at a real point, by the bounded
/// recurrence. The workhorse for quadrature tables.
pub fn phi_block<R: Real>(n_max: usize, x: R) -> Vec<R> {
    let mut out = Vec::with_capacity(n_max + 1);
    let e = (-x).exp();
    out.push(e);
    if n_max == 0 {
        return out;
    }
    out.push((R::one() - R::of(2.0) * x) * e);
    for k in 2..=n_max {
        let a = R::of_usize(2 * k - 1) - R::of(2.0) * x;
        let v = (a * out[k - 1] - R::of_usize(k - 1) * out[k - 2]) / R::of_usize(k);
        out.push(v);
    }
    out
}

/// Lower-triangular matrix D with phi_n'(x) = sum_k D[n][k] phi_k(x):
/// D[n][n] = -1 and D[n][k] = -2 for k < n.
pub fn derivative_expansion<R: Real>(n_max: usize) -> CMatrix<R> {
    let mut d = CMatrix::zeros(n_max + 1, n_max + 1);
    let m1 = Complex::new(-R::one(), R::zero());
    let m2 = Complex::new(-R::of(2.0), R::zero());
    for n in 0..=n_max {
        for k in 0..n {
            d[(n, k)] = m2;
        }
        d[(n, n)] = m1;
    }
    d
}

/// Gauss rule for integrals over (0, inf) against the weight exp(-c x).
#[derive(Debug, Clone)]
pub struct QuadratureRule<R: Real> {
    nodes: Vec<R>,
    weights: Vec<R>,
    log_weights: Vec<R>,
    weight_exponent: R,
}

impl<R: Real> QuadratureRule<R> {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[R] {
        &self.nodes
    }

    pub fn weights(&self) -> &[R] {
        &self.weights
    }

    pub fn weight_exponent(&self) -> R {
        self.weight_exponent
    }

    /// Integrates g against the rule weight: sum_i w_i g(x_i) approximates
    /// the integral of g(x) exp(-c x) over (0, inf).
    pub fn integrate<F: Fn(R) -> Complex<R>>(&self, g: F) -> Complex<R> {
        let mut acc = Complex::new(R::zero(), R::zero());
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            acc = acc + g(x).scale(w);
        }
        acc
    }

    /// Weights with the exp(-c x) factor lifted: sum_i v_i f(x_i)
    /// approximates the integral of f itself, for f that decays at least as
    /// fast as the rule weight.
    ///
    /// While the raw weight is representable the product is formed as
    /// (sqrt(w) exp(c x/2))^2, which stays a few ulp accurate; once w has
    /// underflowed the computation moves to log space (the ln/exp round trip
    /// there costs ~|log w| ulp of relative accuracy, acceptable only as a
    /// fallback). Nodes whose log weight is -inf contribute zero.
    pub fn exp_weights(&self) -> Vec<R> {
        let c = self.weight_exponent;
        let exp_cap = R::max_value().ln() * R::of(0.95);
        self.nodes
            .iter()
            .zip(self.weights.iter().zip(&self.log_weights))
            .map(|(&x, (&w, &lw))| {
                let half = c * x * R::of(0.5);
                if w > R::zero() && half < exp_cap {
                    let u = w.sqrt() * half.exp();
                    u * u
                } else if lw.is_infinite() {
                    R::zero()
                } else {
                    (lw + c * x).exp()
                }
            })
            .collect()
    }
}

/// Gauss-Laguerre rule with `n_nodes` nodes for weight exp(-c x), via
/// eigen-decomposition of the symmetric tridiagonal Jacobi matrix.
pub fn gauss_laguerre<R: Real>(n_nodes: usize, weight_exponent: R) -> Result<QuadratureRule<R>> {
    if n_nodes < 1 {
        return Err(Error::Domain("gauss_laguerre: need at least one node".into()));
    }
    if !(weight_exponent > R::zero()) {
        return Err(Error::Domain(format!(
            "gauss_laguerre: weight exponent must be positive, got {weight_exponent}"
        )));
    }
    let n = n_nodes;
    // Jacobi matrix of the Laguerre polynomials for weight exp(-t).
    let mut d: Vec<R> = (0..n).map(|k| R::of_usize(2 * k + 1)).collect();
    let mut e: Vec<R> = (0..n).map(|k| R::of_usize(k + 1)).collect();
    let mut z: Vec<R> = vec![R::zero(); n];
    z[0] = R::one();
    imtqlx(&mut d, &mut e, &mut z)?;

    let c = weight_exponent;
    let ln_c = c.ln();
    let nodes: Vec<R> = d.iter().map(|&t| t / c).collect();
    let weights: Vec<R> = z.iter().map(|&v| v * v / c).collect();
    let log_weights: Vec<R> = z
        .iter()
        .map(|&v| {
            let av = v.abs();
            if av == R::zero() {
                R::neg_infinity()
            } else {
                R::of(2.0) * av.ln() - ln_c
            }
        })
        .collect();
    Ok(QuadratureRule {
        nodes,
        weights,
        log_weights,
        weight_exponent,
    })
}

/// Gauss-Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre<R: Real>(n_nodes: usize) -> Result<(Vec<R>, Vec<R>)> {
    if n_nodes < 1 {
        return Err(Error::Domain("gauss_legendre: need at least one node".into()));
    }
    let n = n_nodes;
    let mut d: Vec<R> = vec![R::zero(); n];
    let mut e: Vec<R> = (0..n)
        .map(|k| {
            let kk = R::of_usize(k + 1);
            kk / (R::of(4.0) * kk * kk - R::one()).sqrt()
        })
        .collect();
    let mut z: Vec<R> = vec![R::zero(); n];
    z[0] = R::one();
    imtqlx(&mut d, &mut e, &mut z)?;
    let weights: Vec<R> = z.iter().map(|&v| R::of(2.0) * v * v).collect();
    Ok((d, weights))
}

/// Implicit QL iteration with shifts for a symmetric tridiagonal matrix,
/// accumulating first-row eigenvector components in `z`. On return `d` holds
/// the eigenvalues in ascending order.
fn imtqlx<R: Real>(d: &mut [R], e: &mut [R], z: &mut [R]) -> Result<()> {
    let n = d.len();
    if n == 1 {
        return Ok(());
    }
    e[n - 1] = R::zero();
    let prec = R::epsilon();
    for l in 0..n {
        let mut iter = 0usize;
        loop {
            let mut m = l;
            while m < n - 1 {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= prec * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::Numeric(
                    "tridiagonal eigensolve failed to converge".into(),
                ));
            }
            let mut g = (d[l + 1] - d[l]) / (R::of(2.0) * e[l]);
            let mut r = (g * g + R::one()).sqrt();
            let sign_r = if g >= R::zero() { r.abs() } else { -r.abs() };
            g = d[m] - d[l] + e[l] / (g + sign_r);
            let mut s = R::one();
            let mut c = R::one();
            let mut p = R::zero();
            let mut i = m;
            while i > l {
                i -= 1;
                let mut f = s * e[i];
                let b = c * e[i];
                r = (f * f + g * g).sqrt();
                e[i + 1] = r;
                if r == R::zero() {
                    d[i + 1] = d[i + 1] - p;
                    e[m] = R::zero();
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + R::of(2.0) * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                f = z[i + 1];
                z[i + 1] = s * z[i] + c * f;
                z[i] = c * z[i] - s * f;
                if i == l {
                    break;
                }
            }
            d[l] = d[l] - p;
            e[l] = g;
            e[m] = R::zero();
        }
    }
    // Sort ascending, carrying z.
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| d[a].partial_cmp(&d[b]).unwrap());
    let d_old = d.to_vec();
    let z_old = z.to_vec();
    for (k, &i) in idx.iter().enumerate() {
        d[k] = d_old[i];
        z[k] = z_old[i];
    }
    Ok(())
}

/// Radial basis workspace: the quadrature rule sized for products of two
/// basis functions times a degree-2 polynomial weight, and the table of
/// phi_n values at its nodes.
#[derive(Debug, Clone)]
pub struct LaguerreBasis<R: Real> {
    n_max: usize,
    rule: QuadratureRule<R>,
    phi_nodes: Vec<Vec<R>>,
}

impl<R: Real> LaguerreBasis<R> {
    /// Workspace for indices 0..=n_max. The rule has ceil((2N+q+2)/2) nodes
    /// with q = 2, exact for every assembled integrand.
    pub fn new(n_max: usize) -> Result<Self> {
        let q = 2usize;
        let n_nodes = (2 * n_max + q + 2).div_ceil(2);
        let rule = gauss_laguerre(n_nodes, R::of(2.0))?;
        let phi_nodes = phi_table(n_max, rule.nodes());
        Ok(LaguerreBasis {
            n_max,
            rule,
            phi_nodes,
        })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn rule(&self) -> &QuadratureRule<R> {
        &self.rule
    }

    /// phi_n values at the rule nodes; row n holds phi_n(x_i).
    pub fn phi_at_nodes(&self) -> &[Vec<R>] {
        &self.phi_nodes
    }
}

/// Table of phi_n(x_i) for n = 0..=n_max over a set of real nodes.
pub fn phi_table<R: Real>(n_max: usize, nodes: &[R]) -> Vec<Vec<R>> {
    let mut rows = vec![vec![R::zero(); nodes.len()]; n_max + 1];
    for (i, &x) in nodes.iter().enumerate() {
        let col = phi_block(n_max, x);
        for (n, v) in col.into_iter().enumerate() {
            rows[n][i] = v;
        }
    }
    rows
}
