//! Complex-scaled radial bilinear forms over the Laguerre basis: the mass
//! forms m0, m1 (plain and potential-weighted), the stiffness form s, the
//! trace coupling vector, and matrix-structure reports.
//!
//! With s = sigma/R the assembled matrices are
//!   m0[j,l] = sigma * (phi_j, phi_l) = sigma/2 * delta_{jl}
//!   m1[j,l] = sigma * ((1 + s x)^2 phi_j, phi_l)
//!   st[j,l] = (1/sigma) * ((1 + s x)^2 phi_j', phi_l')
//! all complex symmetric.

use crate::cmatrix::CMatrix;
use crate::error::{Error, Result};
use crate::laguerre::{derivative_expansion, gauss_laguerre, phi_table, LaguerreBasis};
use crate::scalar::Real;
use num_complex::Complex;
use std::fmt;
use std::sync::Arc;

/// Complex scaling parameters: the scaling factor sigma (Im > 0) and the
/// interface radius R.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingConfig<R: Real> {
    pub sigma: Complex<R>,
    pub radius: R,
}

impl<R: Real> ScalingConfig<R> {
    pub fn new(sigma: Complex<R>, radius: R) -> Result<Self> {
        if !(sigma.im > R::zero()) {
            return Err(Error::Domain(format!(
                "scaling factor must have positive imaginary part, got {sigma}"
            )));
        }
        if !(radius > R::zero()) || !radius.is_finite() {
            return Err(Error::Domain(format!(
                "interface radius must be positive, got {radius}"
            )));
        }
        Ok(ScalingConfig { sigma, radius })
    }
}

/// Radial inhomogeneity: amplitude eps_tilde times a profile callback.
/// When `scale_argument` is set the profile is evaluated at sigma*xi instead
/// of xi.
#[derive(Clone)]
pub struct PotentialSpec<R: Real> {
    pub eps_tilde: R,
    pub profile: Arc<dyn Fn(Complex<R>) -> Complex<R> + Send + Sync>,
    pub scale_argument: bool,
    pub id: String,
}

impl<R: Real> PotentialSpec<R> {
    /// The reference profile (xi-1)^2 / (1 + (xi-1)^4).
    pub fn bump(eps_tilde: R, scale_argument: bool) -> Self {
        PotentialSpec {
            eps_tilde,
            profile: Arc::new(|z: Complex<R>| {
                let one = Complex::new(R::one(), R::zero());
                let d = z - one;
                let d2 = d * d;
                d2 / (one + d2 * d2)
            }),
            scale_argument,
            id: "bump".into(),
        }
    }

    /// No inhomogeneity (eps_tilde = 0).
    pub fn none() -> Self {
        PotentialSpec {
            eps_tilde: R::zero(),
            profile: Arc::new(|_| Complex::new(R::zero(), R::zero())),
            scale_argument: false,
            id: "none".into(),
        }
    }

    /// Constant profile 1 with the given amplitude.
    pub fn constant(eps_tilde: R) -> Self {
        PotentialSpec {
            eps_tilde,
            profile: Arc::new(|_| Complex::new(R::one(), R::zero())),
            scale_argument: false,
            id: "constant".into(),
        }
    }

    /// Look up a profile by identifier.
    pub fn by_id(id: &str, eps_tilde: R, scale_argument: bool) -> Result<Self> {
        match id {
            "bump" => Ok(Self::bump(eps_tilde, scale_argument)),
            "constant" => {
                let mut p = Self::constant(eps_tilde);
                p.scale_argument = scale_argument;
                Ok(p)
            }
            "none" => Ok(Self::none()),
            other => Err(Error::Domain(format!("unknown potential id {other:?}"))),
        }
    }
}

impl<R: Real> fmt::Debug for PotentialSpec<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PotentialSpec")
            .field("eps_tilde", &self.eps_tilde)
            .field("scale_argument", &self.scale_argument)
            .field("id", &self.id)
            .finish()
    }
}

/// Detected band structure of a matrix at a tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bandwidth {
    Banded(usize),
    Dense,
}

impl fmt::Display for Bandwidth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bandwidth::Banded(b) => write!(f, "{b}"),
            Bandwidth::Dense => write!(f, "dense"),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct StructureInfo<R: Real> {
    pub bandwidth_detected: Bandwidth,
    pub nnz_above_tol: usize,
    pub tol: R,
}

/// An assembled radial form: dense entries with structure metadata and the
/// scaling parameters used.
#[derive(Debug, Clone)]
pub struct RadialOperator<R: Real> {
    pub dim: usize,
    pub entries: CMatrix<R>,
    pub structure: StructureInfo<R>,
    pub sigma: Complex<R>,
    pub radius: R,
    pub form: String,
}

impl<R: Real> RadialOperator<R> {
    fn new(entries: CMatrix<R>, cfg: &ScalingConfig<R>, form: &str) -> Self {
        let dim = entries.rows();
        let structure = scan_structure(&entries, R::of(1e-12));
        RadialOperator {
            dim,
            entries,
            structure,
            sigma: cfg.sigma,
            radius: cfg.radius,
            form: form.into(),
        }
    }

    /// Entries above exact zero as "i,j,re,im" lines.
    pub fn to_coo_csv(&self) -> String {
        let mut out = String::from("i,j,re,im\n");
        for i in 0..self.dim {
            for j in 0..self.dim {
                let e = self.entries[(i, j)];
                if e.re != R::zero() || e.im != R::zero() {
                    out.push_str(&format!("{i},{j},{:e},{:e}\n", e.re, e.im));
                }
            }
        }
        out
    }

    /// JSON header describing the operator.
    pub fn header_json(&self) -> String {
        format!(
            "{{\"dim\":{},\"sigma\":[{:e},{:e}],\"radius\":{:e},\"form\":\"{}\"}}",
            self.dim, self.sigma.re, self.sigma.im, self.radius, self.form
        )
    }
}

/// Structure report of an assembled operator at a caller tolerance.
pub fn structure_report<R: Real>(op: &RadialOperator<R>, tol: R) -> Result<StructureInfo<R>> {
    if !(tol > R::zero()) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    Ok(scan_structure(&op.entries, tol))
}

fn scan_structure<R: Real>(m: &CMatrix<R>, tol: R) -> StructureInfo<R> {
    let dim = m.rows();
    let mut band = 0usize;
    let mut nnz = 0usize;
    for i in 0..dim {
        for j in 0..dim {
            if m[(i, j)].norm() > tol {
                nnz += 1;
                band = band.max(i.abs_diff(j));
            }
        }
    }
    let bandwidth_detected = if dim > 1 && band == dim - 1 {
        // At full bandwidth, call the matrix dense when a sizable share of
        // the far-from-diagonal region is populated.
        let half = (dim - 1) / 2;
        let mut far_total = 0usize;
        let mut far_hit = 0usize;
        for i in 0..dim {
            for j in 0..dim {
                if i.abs_diff(j) > half {
                    far_total += 1;
                    if m[(i, j)].norm() > tol {
                        far_hit += 1;
                    }
                }
            }
        }
        if far_total > 0 && 10 * far_hit > far_total {
            Bandwidth::Dense
        } else {
            Bandwidth::Banded(band)
        }
    } else {
        Bandwidth::Banded(band)
    };
    StructureInfo {
        bandwidth_detected,
        nnz_above_tol: nnz,
        tol,
    }
}

/// Compensated accumulator; the node sums cancel heavily for far-off-band
/// entries, and plain summation leaves ~1e-13 residue there.
struct Kahan<R: Real> {
    sum: R,
    comp: R,
}

impl<R: Real> Kahan<R> {
    fn new() -> Self {
        Kahan {
            sum: R::zero(),
            comp: R::zero(),
        }
    }

    #[inline]
    fn add(&mut self, term: R) {
        let y = term - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }
}

/// Moment matrices G_p[j,l] = integral of x^p phi_j phi_l for p = 0, 1, 2,
/// from a rule with the given node count.
fn moment_matrices<R: Real>(n_max: usize, n_nodes: usize) -> Result<[Vec<Vec<R>>; 3]> {
    let rule = gauss_laguerre(n_nodes, R::of(2.0))?;
    let v = rule.exp_weights();
    let table = phi_table(n_max, rule.nodes());
    let dim = n_max + 1;
    let mut g = [
        vec![vec![R::zero(); dim]; dim],
        vec![vec![R::zero(); dim]; dim],
        vec![vec![R::zero(); dim]; dim],
    ];
    for j in 0..dim {
        for l in j..dim {
            let mut acc = [Kahan::new(), Kahan::new(), Kahan::new()];
            for i in 0..rule.len() {
                let base = v[i] * table[j][i] * table[l][i];
                let x = rule.nodes()[i];
                acc[0].add(base);
                acc[1].add(base * x);
                acc[2].add(base * x * x);
            }
            for p in 0..3 {
                g[p][j][l] = acc[p].sum;
                g[p][l][j] = acc[p].sum;
            }
        }
    }
    Ok(g)
}

fn default_nodes(n_max: usize) -> usize {
    // Degree-2 polynomial weight over basis order N.
    (2 * n_max + 2 + 2).div_ceil(2)
}

/// Combination G_0 + 2 s G_1 + s^2 G_2 as a complex matrix, s = sigma/R.
fn scaled_weight_matrix<R: Real>(
    n_max: usize,
    cfg: &ScalingConfig<R>,
    n_nodes: usize,
) -> Result<CMatrix<R>> {
    let g = moment_matrices::<R>(n_max, n_nodes)?;
    let s = cfg.sigma.unscale(cfg.radius);
    let two_s = s + s;
    let s2 = s * s;
    let dim = n_max + 1;
    let mut w = CMatrix::zeros(dim, dim);
    for j in 0..dim {
        for l in 0..dim {
            w[(j, l)] = Complex::new(g[0][j][l], R::zero()) + two_s.scale(g[1][j][l])
                + s2.scale(g[2][j][l]);
        }
    }
    Ok(w)
}

/// Diagonal mass form m0 = sigma/2 * I (orthonormality makes it exact).
pub fn assemble_mass0<R: Real>(n_max: usize, cfg: &ScalingConfig<R>) -> RadialOperator<R> {
    let dim = n_max + 1;
    let mut m = CMatrix::zeros(dim, dim);
    let half_sigma = cfg.sigma.scale(R::of(0.5));
    for j in 0..dim {
        m[(j, j)] = half_sigma;
    }
    RadialOperator::new(m, cfg, "mass0")
}

/// Weighted mass form m1[j,l] = sigma * ((1 + sigma x/R)^2 phi_j, phi_l);
/// pentadiagonal because the weight is a degree-2 polynomial.
pub fn assemble_mass1<R: Real>(n_max: usize, cfg: &ScalingConfig<R>) -> Result<RadialOperator<R>> {
    mass1_with_nodes(n_max, cfg, default_nodes(n_max))
}

fn mass1_with_nodes<R: Real>(
    n_max: usize,
    cfg: &ScalingConfig<R>,
    n_nodes: usize,
) -> Result<RadialOperator<R>> {
    let w = scaled_weight_matrix(n_max, cfg, n_nodes)?;
    let dim = n_max + 1;
    let mut m = CMatrix::zeros(dim, dim);
    for j in 0..dim {
        for l in j..dim {
            let e = cfg.sigma * w[(j, l)];
            m[(j, l)] = e;
            m[(l, j)] = e;
        }
    }
    Ok(RadialOperator::new(m, cfg, "mass1"))
}

/// Stiffness form st[j,l] = (1/sigma) * ((1 + sigma x/R)^2 phi_j', phi_l'),
/// with derivatives expanded through the lower-triangular derivative matrix.
pub fn assemble_stiffness<R: Real>(
    n_max: usize,
    cfg: &ScalingConfig<R>,
) -> Result<RadialOperator<R>> {
    stiffness_with_nodes(n_max, cfg, default_nodes(n_max))
}

fn stiffness_with_nodes<R: Real>(
    n_max: usize,
    cfg: &ScalingConfig<R>,
    n_nodes: usize,
) -> Result<RadialOperator<R>> {
    let w = scaled_weight_matrix(n_max, cfg, n_nodes)?;
    let d = derivative_expansion::<R>(n_max);
    let dw = d.matmul(&w);
    let dwdt = dw.matmul(&d.transpose());
    let dim = n_max + 1;
    let inv_sigma = Complex::new(R::one(), R::zero()) / cfg.sigma;
    let mut m = CMatrix::zeros(dim, dim);
    for j in 0..dim {
        for l in j..dim {
            // Symmetrize: the product is symmetric up to roundoff.
            let e = inv_sigma
                * (dwdt[(j, l)] + dwdt[(l, j)]).scale(R::of(0.5));
            m[(j, l)] = e;
            m[(l, j)] = e;
        }
    }
    Ok(RadialOperator::new(m, cfg, "stiffness"))
}

/// m1-type mass with the integrand additionally weighted by
/// (1 + eps_tilde * profile). Assembled twice (n_nodes and 2*n_nodes) and the
/// finer result returned after a stability check.
pub fn assemble_weighted_mass<R: Real>(
    n_max: usize,
    cfg: &ScalingConfig<R>,
    pot: &PotentialSpec<R>,
    n_nodes: usize,
) -> Result<RadialOperator<R>> {
    if n_nodes < n_max + 4 {
        return Err(Error::Domain(format!(
            "weighted mass needs at least N+4 = {} nodes, got {n_nodes}",
            n_max + 4
        )));
    }
    let coarse = weighted_mass_with_nodes(n_max, cfg, pot, n_nodes)?;
    let fine = weighted_mass_with_nodes(n_max, cfg, pot, 2 * n_nodes)?;
    let delta = coarse.max_abs_diff(&fine);
    if delta > R::of(1e-6) {
        return Err(Error::Numeric(format!(
            "weighted mass unstable under node doubling: max entry change {delta:e}"
        )));
    }
    Ok(RadialOperator::new(fine, cfg, "weighted_mass"))
}

fn weighted_mass_with_nodes<R: Real>(
    n_max: usize,
    cfg: &ScalingConfig<R>,
    pot: &PotentialSpec<R>,
    n_nodes: usize,
) -> Result<CMatrix<R>> {
    let rule = gauss_laguerre(n_nodes, R::of(2.0))?;
    let v = rule.exp_weights();
    let table = phi_table(n_max, rule.nodes());
    let s = cfg.sigma.unscale(cfg.radius);
    let one = Complex::new(R::one(), R::zero());
    // Effective complex weight per node: (1 + s x)^2 (1 + eps * profile).
    let mut wnode = Vec::with_capacity(rule.len());
    for &x in rule.nodes() {
        let arg = if pot.scale_argument {
            cfg.sigma.scale(x)
        } else {
            Complex::new(x, R::zero())
        };
        let p = (pot.profile)(arg);
        if !p.re.is_finite() || !p.im.is_finite() {
            return Err(Error::Domain(format!(
                "potential profile not finite at node {x}: {p}"
            )));
        }
        let eff = one + p.scale(pot.eps_tilde);
        if eff.norm() < R::of(1e-300) {
            return Err(Error::Domain(format!(
                "effective weight 1 + eps*p vanishes at node {x}"
            )));
        }
        let lin = one + s.scale(x);
        wnode.push(lin * lin * eff);
    }
    let dim = n_max + 1;
    let mut m = CMatrix::zeros(dim, dim);
    for j in 0..dim {
        for l in j..dim {
            let mut re = Kahan::new();
            let mut im = Kahan::new();
            for i in 0..rule.len() {
                let t = wnode[i].scale(v[i] * table[j][i] * table[l][i]);
                re.add(t.re);
                im.add(t.im);
            }
            let e = cfg.sigma * Complex::new(re.sum, im.sum);
            m[(j, l)] = e;
            m[(l, j)] = e;
        }
    }
    Ok(m)
}

/// Evaluation-at-xi=0 functional on the coupled basis: e_0.
pub fn trace_vector<R: Real>(n_max: usize) -> Vec<R> {
    let mut t = vec![R::zero(); n_max + 1];
    t[0] = R::one();
    t
}

/// Shared basis workspace for callers that assemble several forms at one N.
pub fn basis_for<R: Real>(n_max: usize) -> Result<LaguerreBasis<R>> {
    LaguerreBasis::new(n_max)
}
