//! Complex dense eigen-machinery: LU factorization, QR eigenvalues, Jacobi
//! singular values, and the shift-invert Arnoldi resonance solver with
//! two-scaling stability filtering.

mod arnoldi;
pub mod lu;
pub mod schur;
pub mod svd;

pub use arnoldi::shift_invert_arnoldi;
pub use lu::{lu_factor, Lu};
pub use schur::eigenvalues;
pub use svd::{condition_number, singular_values};

use crate::assembly::{self, PotentialSpec, ScalingConfig};
use crate::cmatrix::{dot, hdot, norm2, scale_vec, CMatrix};
use crate::error::{Error, Result};
use crate::scalar::Real;
use num_complex::Complex;
use std::fmt;

/// One separated radial eigenvalue problem S u = omega^2 M u for a fixed
/// spherical index nu.
#[derive(Debug, Clone)]
pub struct SeparatedProblem<R: Real> {
    pub nu: usize,
    pub stiffness: CMatrix<R>,
    pub mass: CMatrix<R>,
    pub scaling: ScalingConfig<R>,
    pub potential: PotentialSpec<R>,
}

impl<R: Real> SeparatedProblem<R> {
    /// Homogeneous exterior problem: S = stiffness + nu(nu+1) mass0,
    /// M = mass1, on the degree-N radial basis.
    pub fn homogeneous(nu: usize, n_max: usize, scaling: &ScalingConfig<R>) -> Result<Self> {
        let st = assembly::assemble_stiffness(n_max, scaling)?;
        let m0 = assembly::assemble_mass0(n_max, scaling);
        let m1 = assembly::assemble_mass1(n_max, scaling)?;
        let nn = Complex::new(R::of_usize(nu) * R::of_usize(nu + 1), R::zero());
        let s = st.entries.add(&m0.entries.scaled(nn));
        Ok(SeparatedProblem {
            nu,
            stiffness: s,
            mass: m1.entries,
            scaling: *scaling,
            potential: PotentialSpec::none(),
        })
    }

    /// Same stiffness side, mass side weighted by (1 + eps_tilde p).
    pub fn with_potential(
        nu: usize,
        n_max: usize,
        scaling: &ScalingConfig<R>,
        potential: &PotentialSpec<R>,
        n_nodes: usize,
    ) -> Result<Self> {
        let st = assembly::assemble_stiffness(n_max, scaling)?;
        let m0 = assembly::assemble_mass0(n_max, scaling);
        let mw = assembly::assemble_weighted_mass(n_max, scaling, potential, n_nodes)?;
        let nn = Complex::new(R::of_usize(nu) * R::of_usize(nu + 1), R::zero());
        let s = st.entries.add(&m0.entries.scaled(nn));
        Ok(SeparatedProblem {
            nu,
            stiffness: s,
            mass: mw.entries,
            scaling: *scaling,
            potential: potential.clone(),
        })
    }

    /// Wraps an externally assembled pair (also used by the truncated-layer
    /// discretization).
    pub fn from_matrices(
        nu: usize,
        stiffness: CMatrix<R>,
        mass: CMatrix<R>,
        scaling: &ScalingConfig<R>,
        potential: &PotentialSpec<R>,
    ) -> Result<Self> {
        if !stiffness.is_square() || !mass.is_square() || stiffness.rows() != mass.rows() {
            return Err(Error::Domain(format!(
                "problem matrices must be square and equal-sized, got {}x{} and {}x{}",
                stiffness.rows(),
                stiffness.cols(),
                mass.rows(),
                mass.cols()
            )));
        }
        Ok(SeparatedProblem {
            nu,
            stiffness,
            mass,
            scaling: *scaling,
            potential: potential.clone(),
        })
    }

    pub fn dim(&self) -> usize {
        self.stiffness.rows()
    }

    /// Basis order N (dimension is N+1).
    pub fn n_basis(&self) -> usize {
        self.dim().saturating_sub(1)
    }
}

/// Stability classification of one resonance candidate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    Physical,
    EssentialArtifact,
    Unknown,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Classification::Physical => "physical",
            Classification::EssentialArtifact => "essential_artifact",
            Classification::Unknown => "unknown",
        };
        f.write_str(s)
    }
}

/// One computed eigenpair: frequency omega (Re >= 0 branch), eigenvector,
/// and the explicitly recomputed residual norm(S v - omega^2 M v) / norm(v).
#[derive(Debug, Clone)]
pub struct ResonancePair<R: Real> {
    pub omega: Complex<R>,
    pub vector: Vec<Complex<R>>,
    pub residual: R,
    pub classification: Classification,
}

/// Solver output: eigenpairs plus the problem metadata needed to serialize
/// and compare runs.
#[derive(Debug, Clone)]
pub struct ResonanceSet<R: Real> {
    pub nu: usize,
    pub n_basis: usize,
    pub sigma: Complex<R>,
    pub radius: R,
    pub eps_tilde: R,
    pub pairs: Vec<ResonancePair<R>>,
}

impl<R: Real> ResonanceSet<R> {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "nu,N,sigma_re,sigma_im,eps_tilde,omega_re,omega_im,residual,classification\n",
        );
        for p in &self.pairs {
            out.push_str(&format!(
                "{},{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{}\n",
                self.nu,
                self.n_basis,
                self.sigma.re,
                self.sigma.im,
                self.eps_tilde,
                p.omega.re,
                p.omega.im,
                p.residual,
                p.classification
            ));
        }
        out
    }
}

pub(crate) fn make_set<R: Real>(
    problem: &SeparatedProblem<R>,
    pairs: Vec<ResonancePair<R>>,
) -> ResonanceSet<R> {
    ResonanceSet {
        nu: problem.nu,
        n_basis: problem.n_basis(),
        sigma: problem.scaling.sigma,
        radius: problem.scaling.radius,
        eps_tilde: problem.potential.eps_tilde,
        pairs,
    }
}

pub(crate) fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub(crate) fn random_unit_vector<R: Real>(n: usize, seed: u64) -> Vec<Complex<R>> {
    let mut state = seed;
    let mut unit = move || {
        let bits = splitmix64(&mut state) >> 11;
        R::of(bits as f64 / (1u64 << 53) as f64 - 0.5)
    };
    let mut v: Vec<Complex<R>> = (0..n).map(|_| Complex::new(unit(), unit())).collect();
    let nrm = norm2(&v);
    if nrm > R::zero() {
        scale_vec(&mut v, Complex::new(R::one() / nrm, R::zero()));
    } else {
        v[0] = Complex::new(R::one(), R::zero());
    }
    v
}

/// Square root of lambda on the resonance branch: Re >= 0, and Im >= 0 when
/// Re = 0.
pub(crate) fn principal_omega<R: Real>(lambda: Complex<R>) -> Complex<R> {
    let w = lambda.sqrt();
    if w.re > R::zero() || (w.re == R::zero() && w.im >= R::zero()) {
        w
    } else {
        -w
    }
}

/// norm(S v - omega^2 M v) / norm(v).
pub(crate) fn eigen_residual<R: Real>(
    s: &CMatrix<R>,
    m: &CMatrix<R>,
    omega: Complex<R>,
    v: &[Complex<R>],
) -> R {
    let sv = s.matvec(v);
    let mv = m.matvec(v);
    let w2 = omega * omega;
    let mut acc = R::zero();
    for i in 0..v.len() {
        acc += (sv[i] - w2 * mv[i]).norm_sqr();
    }
    acc.sqrt() / norm2(v)
}

/// One or more inverse-iteration steps at a slightly perturbed shift,
/// followed by a Rayleigh-quotient estimate. The unconjugated quotient is
/// preferred (the problems are complex symmetric); the Hermitian one is the
/// fallback for near-isotropic vectors.
pub(crate) fn inverse_iteration<R: Real>(
    s: &CMatrix<R>,
    m: &CMatrix<R>,
    lambda: Complex<R>,
    start: &[Complex<R>],
    steps: usize,
) -> Option<(Complex<R>, Vec<Complex<R>>)> {
    let pert = R::of(1e-11) * (R::one() + lambda.norm());
    let shifted = s.sub_scaled(m, lambda + Complex::new(pert, R::zero()));
    let fact = lu_factor(&shifted).ok()?;
    let mut x = start.to_vec();
    for _ in 0..steps {
        let mx = m.matvec(&x);
        x = fact.solve(&mx);
        let nx = norm2(&x);
        if !nx.is_finite() || nx == R::zero() {
            return None;
        }
        scale_vec(&mut x, Complex::new(R::one() / nx, R::zero()));
    }
    let sx = s.matvec(&x);
    let mx = m.matvec(&x);
    let den = dot(&x, &mx);
    let den_h = hdot(&x, &mx);
    let lam = if den.norm() > R::of(1e-8) * den_h.norm() && den.norm() > R::zero() {
        dot(&x, &sx) / den
    } else if den_h.norm() > R::zero() {
        hdot(&x, &sx) / den_h
    } else {
        return None;
    };
    if !lam.re.is_finite() || !lam.im.is_finite() {
        return None;
    }
    Some((lam, x))
}

/// Refines a candidate (lambda, v) and returns the better of the refined and
/// unrefined pairs by explicit residual.
pub(crate) fn refine_pair<R: Real>(
    s: &CMatrix<R>,
    m: &CMatrix<R>,
    lambda: Complex<R>,
    v: Vec<Complex<R>>,
) -> ResonancePair<R> {
    let omega0 = principal_omega(lambda);
    let r0 = eigen_residual(s, m, omega0, &v);
    if let Some((lam_r, x)) = inverse_iteration(s, m, lambda, &v, 1) {
        let omega1 = principal_omega(lam_r);
        let r1 = eigen_residual(s, m, omega1, &x);
        if r1 < r0 {
            return ResonancePair {
                omega: omega1,
                vector: x,
                residual: r1,
                classification: Classification::Unknown,
            };
        }
    }
    ResonancePair {
        omega: omega0,
        vector: v,
        residual: r0,
        classification: Classification::Unknown,
    }
}

pub(crate) fn omega_partial<R: Real>(pairs: &[ResonancePair<R>]) -> Vec<(f64, f64)> {
    pairs
        .iter()
        .map(|p| {
            (
                p.omega.re.to_f64().unwrap_or(f64::NAN),
                p.omega.im.to_f64().unwrap_or(f64::NAN),
            )
        })
        .collect()
}

/// Full spectrum of S u = omega^2 M u by a single shift-invert transform and
/// dense QR; the slow, reliable oracle for the Arnoldi path.
pub fn dense_eig<R: Real>(problem: &SeparatedProblem<R>) -> Result<ResonanceSet<R>> {
    let s = &problem.stiffness;
    let m = &problem.mass;
    let n = s.rows();
    if n == 0 {
        return Err(Error::Domain("dense_eig: empty problem".into()));
    }
    if n > 2000 {
        return Err(Error::Domain(format!(
            "dense_eig: dimension {n} exceeds the dense limit 2000"
        )));
    }
    // M must be invertible for the lambda = tau + 1/theta map to cover the
    // whole spectrum; probe with a random solve.
    let mf = lu_factor(m).map_err(|_| {
        Error::Domain("dense_eig: mass matrix is numerically singular".into())
    })?;
    let probe = random_unit_vector::<R>(n, 0x70b5_1e5e_ed00_0001);
    let x = mf.solve(&probe);
    let mx = m.matvec(&x);
    let mut acc = R::zero();
    for i in 0..n {
        acc += (mx[i] - probe[i]).norm_sqr();
    }
    if !(acc.sqrt() < R::of(1e-6)) {
        return Err(Error::Domain(
            "dense_eig: mass matrix failed the invertibility probe".into(),
        ));
    }
    let mnorm = m.frobenius();
    let tau0 = Complex::new(R::of(0.618), R::of(0.786)).scale(s.frobenius() / mnorm);
    let mut fact = None;
    let mut tau = tau0;
    for attempt in 0..5 {
        match lu_factor(&s.sub_scaled(m, tau)) {
            Ok(f) => {
                fact = Some((f, tau));
                break;
            }
            Err(_) => {
                tau = tau0.scale(R::of(1.0 + 0.137 * (attempt + 1) as f64));
            }
        }
    }
    let (fact, tau) = fact.ok_or_else(|| {
        Error::Numeric("dense_eig: S - tau M was singular at every probe shift".into())
    })?;
    let mut t = CMatrix::zeros(n, n);
    let mut col = vec![Complex::new(R::zero(), R::zero()); n];
    for j in 0..n {
        for (i, c) in col.iter_mut().enumerate() {
            *c = m[(i, j)];
        }
        let y = fact.solve(&col);
        for i in 0..n {
            t[(i, j)] = y[i];
        }
    }
    let thetas = schur::eigenvalues(&t)?;
    let mut pairs: Vec<ResonancePair<R>> = Vec::with_capacity(thetas.len());
    for (idx, theta) in thetas.into_iter().enumerate() {
        if theta.norm() < R::of(1e-300) {
            continue;
        }
        let lambda = tau + theta.inv();
        let start = random_unit_vector::<R>(n, 0xd0_0d1e ^ (idx as u64).wrapping_mul(0x9e37));
        let pair = match inverse_iteration(s, m, lambda, &start, 2) {
            Some((lam_r, x)) => {
                let omega_r = principal_omega(lam_r);
                let rr = eigen_residual(s, m, omega_r, &x);
                let omega0 = principal_omega(lambda);
                let r0 = eigen_residual(s, m, omega0, &x);
                if rr <= r0 {
                    ResonancePair {
                        omega: omega_r,
                        vector: x,
                        residual: rr,
                        classification: Classification::Unknown,
                    }
                } else {
                    ResonancePair {
                        omega: omega0,
                        vector: x,
                        residual: r0,
                        classification: Classification::Unknown,
                    }
                }
            }
            None => {
                let omega0 = principal_omega(lambda);
                let r0 = eigen_residual(s, m, omega0, &start);
                ResonancePair {
                    omega: omega0,
                    vector: start,
                    residual: r0,
                    classification: Classification::Unknown,
                }
            }
        };
        pairs.push(pair);
    }
    pairs.sort_by(|a, b| {
        (a.omega.re, a.omega.im)
            .partial_cmp(&(b.omega.re, b.omega.im))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(make_set(problem, pairs))
}

/// Classifies the primary run's resonances by their drift under a change of
/// scaling factor. Stable candidates are physical; candidates that drift and
/// hug the rotated essential-spectrum ray arg(omega) = -arg(sigma) are
/// discretization artifacts.
pub fn filter_resonances<R: Real>(
    primary: &ResonanceSet<R>,
    alt: &ResonanceSet<R>,
) -> Result<ResonanceSet<R>> {
    if primary.nu != alt.nu
        || primary.n_basis != alt.n_basis
        || primary.radius != alt.radius
        || primary.eps_tilde != alt.eps_tilde
    {
        return Err(Error::Domain(format!(
            "filter_resonances: runs describe different problems \
             (nu {} vs {}, N {} vs {}, R {} vs {}, eps {} vs {})",
            primary.nu,
            alt.nu,
            primary.n_basis,
            alt.n_basis,
            primary.radius,
            alt.radius,
            primary.eps_tilde,
            alt.eps_tilde
        )));
    }
    if primary.sigma == alt.sigma {
        return Err(Error::Domain(
            "filter_resonances: the comparison run must use a different sigma".into(),
        ));
    }
    let ray = -primary.sigma.arg();
    let mut out = primary.clone();
    for pair in &mut out.pairs {
        let delta_stable = R::of(1e-6) * (R::one() + pair.omega.norm());
        let drift = alt
            .pairs
            .iter()
            .map(|q| (pair.omega - q.omega).norm())
            .fold(R::infinity(), |a, b| if b < a { b } else { a });
        let mut angle = pair.omega.arg() - ray;
        let two_pi = R::of(2.0) * R::PI();
        while angle > R::PI() {
            angle -= two_pi;
        }
        while angle < -R::PI() {
            angle += two_pi;
        }
        pair.classification = if drift < delta_stable {
            Classification::Physical
        } else if drift > R::of(100.0) * delta_stable && angle.abs() < R::of(0.2) {
            Classification::EssentialArtifact
        } else {
            Classification::Unknown
        };
    }
    Ok(out)
}
