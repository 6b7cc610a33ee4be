//! Truncated-PML baseline: the same complex-scaled radial forms assembled
//! with high-order 1D finite elements on [0, T] and a homogeneous Dirichlet
//! condition at the truncation point.

use crate::assembly::{PotentialSpec, ScalingConfig};
use crate::cmatrix::CMatrix;
use crate::error::{Error, Result};
use crate::laguerre::gauss_legendre;
use crate::scalar::Real;
use num_complex::Complex;

#[derive(Debug, Clone)]
pub struct PmlConfig<R: Real> {
    pub t: R,
    pub n_elems: usize,
    pub order: usize,
    pub cfg: ScalingConfig<R>,
}

impl<R: Real> PmlConfig<R> {
    pub fn new(t: R, n_elems: usize, order: usize, cfg: ScalingConfig<R>) -> Result<Self> {
        if !(t > R::zero()) || !t.is_finite() {
            return Err(Error::Domain(format!(
                "truncation length must be positive and finite, got {t}"
            )));
        }
        if n_elems < 1 {
            return Err(Error::Domain("need at least one element".into()));
        }
        if order < 1 {
            return Err(Error::Domain(format!(
                "element order must be >= 1, got {order}"
            )));
        }
        Ok(PmlConfig {
            t,
            n_elems,
            order,
            cfg,
        })
    }

    /// Vertex modes plus internal bubbles, before the Dirichlet elimination.
    pub fn dof_before_elimination(&self) -> usize {
        self.n_elems * self.order + 1
    }
}

/// Legendre values P_0..P_max at t.
fn legendre_values<R: Real>(max: usize, t: R) -> Vec<R> {
    let mut p = Vec::with_capacity(max + 1);
    p.push(R::one());
    if max == 0 {
        return p;
    }
    p.push(t);
    for j in 1..max {
        let jf = R::of_usize(j);
        let next = ((R::of(2.0) * jf + R::one()) * t * p[j] - jf * p[j - 1])
            / (jf + R::one());
        p.push(next);
    }
    p
}

/// Shape values and reference-coordinate derivatives at t: two affine vertex
/// modes, then integrated-Legendre bubbles (P_j - P_{j-2})/sqrt(2(2j-1)) for
/// j = 2..=order, whose derivative is sqrt((2j-1)/2) P_{j-1}.
fn shapes_at<R: Real>(order: usize, t: R) -> (Vec<R>, Vec<R>) {
    let p = legendre_values(order, t);
    let half = R::of(0.5);
    let mut vals = Vec::with_capacity(order + 1);
    let mut ders = Vec::with_capacity(order + 1);
    vals.push((R::one() - t) * half);
    ders.push(-half);
    vals.push((R::one() + t) * half);
    ders.push(half);
    for j in 2..=order {
        let jf = R::of_usize(j);
        let two_jm1 = R::of(2.0) * jf - R::one();
        vals.push((p[j] - p[j - 2]) / (R::of(2.0) * two_jm1).sqrt());
        ders.push((two_jm1 * half).sqrt() * p[j - 1]);
    }
    (vals, ders)
}

/// Assembles S = (1/sigma) int (1+sigma xi/R)^2 u'v' + nu(nu+1) sigma int u v
/// and M = sigma int (1+sigma xi/R)^2 u v (optionally potential-weighted) on
/// [0, T], eliminating the vertex at T. Returns (S, M, trace-at-0 vector).
#[allow(clippy::type_complexity)]
pub fn assemble_pml<R: Real>(
    pml: &PmlConfig<R>,
    nu: usize,
    pot: Option<&PotentialSpec<R>>,
) -> Result<(CMatrix<R>, CMatrix<R>, Vec<Complex<R>>)> {
    let n_el = pml.n_elems;
    let order = pml.order;
    let sigma = pml.cfg.sigma;
    let s_ratio = sigma.unscale(pml.cfg.radius);
    let dim_full = pml.dof_before_elimination();
    let dim = dim_full - 1;
    let eliminated = n_el; // global index of the vertex at xi = T
    let reduce = |g: usize| -> Option<usize> {
        match g.cmp(&eliminated) {
            std::cmp::Ordering::Less => Some(g),
            std::cmp::Ordering::Equal => None,
            std::cmp::Ordering::Greater => Some(g - 1),
        }
    };
    let (qt, qw) = gauss_legendre(order + 2)?;
    let h = pml.t / R::of_usize(n_el);
    let jac = h * R::of(0.5);
    let d_scale = R::of(2.0) / h;
    let one = Complex::new(R::one(), R::zero());
    let inv_sigma = one / sigma;
    let nu_factor = R::of_usize(nu) * R::of_usize(nu + 1);

    let shape_table: Vec<(Vec<R>, Vec<R>)> = qt.iter().map(|&t| shapes_at(order, t)).collect();

    let mut s_mat = CMatrix::<R>::zeros(dim, dim);
    let mut m_mat = CMatrix::<R>::zeros(dim, dim);
    let n_shapes = order + 1;
    let mut globals = vec![0usize; n_shapes];
    for e in 0..n_el {
        globals[0] = e;
        globals[1] = e + 1;
        for j in 2..=order {
            globals[j] = (n_el + 1) + e * (order - 1) + (j - 2);
        }
        let x_left = h * R::of_usize(e);
        // Per-node complex weights for the three forms.
        let mut w_stiff = Vec::with_capacity(qt.len());
        let mut w_mass0 = Vec::with_capacity(qt.len());
        let mut w_mass1 = Vec::with_capacity(qt.len());
        for (k, &t) in qt.iter().enumerate() {
            let xi = x_left + jac * (t + R::one());
            let base = qw[k] * jac;
            let geo = (one + s_ratio.scale(xi)) * (one + s_ratio.scale(xi));
            w_stiff.push(inv_sigma * geo.scale(base * d_scale * d_scale));
            w_mass0.push(sigma.scale(base));
            let mut layer = geo;
            if let Some(p) = pot {
                let arg = if p.scale_argument {
                    sigma.scale(xi)
                } else {
                    Complex::new(xi, R::zero())
                };
                let val = (p.profile)(arg);
                if !val.re.is_finite() || !val.im.is_finite() {
                    return Err(Error::Domain(format!(
                        "potential profile not finite at node {xi}: {val}"
                    )));
                }
                layer *= one + val.scale(p.eps_tilde);
            }
            w_mass1.push(sigma * layer.scale(base));
        }
        for a in 0..n_shapes {
            let Some(ga) = reduce(globals[a]) else {
                continue;
            };
            for b in 0..n_shapes {
                let Some(gb) = reduce(globals[b]) else {
                    continue;
                };
                let mut acc_s = Complex::new(R::zero(), R::zero());
                let mut acc_m = Complex::new(R::zero(), R::zero());
                for (k, (vals, ders)) in shape_table.iter().enumerate() {
                    let vv = vals[a] * vals[b];
                    acc_s += w_stiff[k].scale(ders[a] * ders[b]) + w_mass0[k].scale(nu_factor * vv);
                    acc_m += w_mass1[k].scale(vv);
                }
                s_mat[(ga, gb)] += acc_s;
                m_mat[(ga, gb)] += acc_m;
            }
        }
    }
    let mut trace = vec![Complex::new(R::zero(), R::zero()); dim];
    trace[0] = one;
    Ok((s_mat, m_mat, trace))
}
