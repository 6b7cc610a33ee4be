//! Spherical Hankel functions of the first kind, resonance reference values
//! as roots of h_nu', and the expansion coefficients alpha_{n,k}(a) and
//! beta_{n,k}(a) with their large-n asymptotics.

use crate::cmatrix::CMatrix;
use crate::eig::eigenvalues;
use crate::error::{Error, Result};
use crate::laguerre::{eval_laguerre, gauss_laguerre, gauss_legendre, phi_block};
use crate::scalar::Real;
use num_complex::Complex;

const EULER_GAMMA: f64 = 0.5772156649015328606065120900824024;

fn check_off_cut<R: Real>(a: Complex<R>, what: &str) -> Result<()> {
    if a.im == R::zero() && a.re <= R::zero() {
        return Err(Error::Domain(format!(
            "{what}: argument {a} lies on the branch cut (-inf, 0]"
        )));
    }
    Ok(())
}

/// h_tilde_nu(z) = (-i)^nu sum_m i^m (nu+m)! / (m!(nu-m)!(2z)^m) and its
/// derivative with respect to z.
fn h_tilde_pair<R: Real>(nu: usize, z: Complex<R>) -> (Complex<R>, Complex<R>) {
    let i = Complex::new(R::zero(), R::one());
    let two_z = z.scale(R::of(2.0));
    let mut term = (-i).powu(nu as u32);
    let mut sum = term;
    let mut weighted = Complex::new(R::zero(), R::zero());
    for m in 1..=nu {
        let factor = R::of_usize(nu + m) * R::of_usize(nu - m + 1) / R::of_usize(m);
        term = term * i.scale(factor) / two_z;
        sum += term;
        weighted += term.scale(R::of_usize(m));
    }
    (sum, -weighted / z)
}

/// Spherical Hankel function of the first kind,
/// h_nu(z) = -(i/z) exp(iz) h_tilde_nu(z).
pub fn eval_h<R: Real>(nu: usize, z: Complex<R>) -> Result<Complex<R>> {
    if z.re == R::zero() && z.im == R::zero() {
        return Err(Error::Domain("eval_h: pole at z = 0".into()));
    }
    let i = Complex::new(R::zero(), R::one());
    let (ht, _) = h_tilde_pair(nu, z);
    Ok(-(i / z) * (i * z).exp() * ht)
}

/// Derivative of h_nu by product/chain rule on the closed form.
pub fn eval_h_prime<R: Real>(nu: usize, z: Complex<R>) -> Result<Complex<R>> {
    if z.re == R::zero() && z.im == R::zero() {
        return Err(Error::Domain("eval_h_prime: pole at z = 0".into()));
    }
    let i = Complex::new(R::zero(), R::one());
    let (ht, htp) = h_tilde_pair(nu, z);
    let z2 = z * z;
    let prefactor = -i * (i * z).exp();
    Ok(prefactor * ((i / z - z2.inv()) * ht + htp / z))
}

fn h_second<R: Real>(nu: usize, z: Complex<R>) -> Result<Complex<R>> {
    let h = eval_h(nu, z)?;
    let hp = eval_h_prime(nu, z)?;
    let nn = Complex::new(R::of_usize(nu) * R::of_usize(nu + 1), R::zero());
    let z2 = z * z;
    Ok(-(z.scale(R::of(2.0)) * hp + (z2 - nn) * h) / z2)
}

/// Axis-aligned search rectangle in the right half-plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchBox<R: Real> {
    pub re_min: R,
    pub re_max: R,
    pub im_min: R,
    pub im_max: R,
}

impl<R: Real> SearchBox<R> {
    pub fn new(re_min: R, re_max: R, im_min: R, im_max: R) -> Result<Self> {
        if !(re_min > R::zero()) {
            return Err(Error::Domain(format!(
                "search box must lie in Re(z) > 0, got re_min = {re_min}"
            )));
        }
        Ok(SearchBox {
            re_min,
            re_max,
            im_min,
            im_max,
        })
    }

    pub fn is_empty(&self) -> bool {
        self.re_min > self.re_max || self.im_min > self.im_max
    }

    pub fn contains(&self, z: Complex<R>) -> bool {
        z.re >= self.re_min && z.re <= self.re_max && z.im >= self.im_min && z.im <= self.im_max
    }
}

/// Roots of h_nu' inside the box, sorted by real part. h_nu'(z) times
/// z^(nu+2) exp(-iz) is a polynomial of degree nu+1, so the roots come from
/// a companion-matrix eigensolve polished by Newton on h_nu' itself.
pub fn resonance_roots<R: Real>(nu: usize, search_box: SearchBox<R>) -> Result<Vec<Complex<R>>> {
    if search_box.is_empty() {
        return Ok(Vec::new());
    }
    let zero = Complex::new(R::zero(), R::zero());
    let i = Complex::new(R::zero(), R::one());
    // P(z) = z^nu h_tilde_nu(z): p[nu - m] = c_m with the term recursion.
    let mut p = vec![zero; nu + 1];
    let mut c = (-i).powu(nu as u32);
    p[nu] = c;
    for m in 1..=nu {
        let factor = R::of_usize(nu + m) * R::of_usize(nu - m + 1) / (R::of(2.0) * R::of_usize(m));
        c = c * i.scale(factor);
        p[nu - m] = c;
    }
    // Q(z) = z P'(z) + (iz - (nu+1)) P(z), degree nu + 1.
    let deg = nu + 1;
    let mut q = vec![zero; deg + 1];
    for (j, qj) in q.iter_mut().enumerate() {
        let mut v = zero;
        if j <= nu {
            let shift = R::of_usize(j) - R::of_usize(nu + 1);
            v += p[j].scale(shift);
        }
        if j >= 1 {
            v += i * p[j - 1];
        }
        *qj = v;
    }
    let lead = q[deg];
    let mut companion = CMatrix::<R>::zeros(deg, deg);
    for j in 0..deg {
        companion[(0, j)] = -(q[deg - 1 - j] / lead);
    }
    for j in 0..deg - 1 {
        companion[(j + 1, j)] = Complex::new(R::one(), R::zero());
    }
    let candidates = eigenvalues(&companion)?;
    let mut roots: Vec<Complex<R>> = Vec::new();
    'cand: for mut z in candidates {
        // Newton polish on h_nu' directly.
        for _ in 0..30 {
            if !z.re.is_finite() || !z.im.is_finite() || (z.re == R::zero() && z.im == R::zero()) {
                continue 'cand;
            }
            let hp = eval_h_prime(nu, z)?;
            if hp.norm() < R::of(1e-13) {
                break;
            }
            let hpp = h_second(nu, z)?;
            if hpp.norm() == R::zero() {
                break;
            }
            z -= hp / hpp;
        }
        if !z.re.is_finite() || !z.im.is_finite() || !(z.re > R::zero()) {
            continue;
        }
        if eval_h_prime(nu, z)?.norm() >= R::of(1e-12) {
            continue;
        }
        if !search_box.contains(z) {
            continue;
        }
        let dup = roots
            .iter()
            .any(|r| (*r - z).norm() < R::of(1e-9) * (R::one() + r.norm()));
        if !dup {
            roots.push(z);
        }
    }
    roots.sort_by(|a, b| {
        (a.re, a.im)
            .partial_cmp(&(b.re, b.im))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(roots)
}

/// Principal-branch exponential integral E_1(z): power series for small |z|,
/// modified-Lentz continued fraction otherwise.
pub fn exp_integral_e1<R: Real>(z: Complex<R>) -> Result<Complex<R>> {
    if z.re == R::zero() && z.im == R::zero() {
        return Err(Error::Domain(
            "exp_integral_e1: logarithmic singularity at z = 0".into(),
        ));
    }
    let eps = R::epsilon();
    if z.norm() < R::of(8.0) {
        // E1(z) = -gamma - ln z + sum_{k>=1} (-1)^{k+1} z^k / (k k!).
        let mut term = z;
        let mut sum = z;
        for k in 2..500 {
            let kf = R::of_usize(k);
            term = term * z.scale((kf - R::one()) / (kf * kf)).scale(-R::one());
            sum += term;
            if term.norm() < eps * sum.norm() {
                let gamma = Complex::new(R::of(EULER_GAMMA), R::zero());
                return Ok(sum - gamma - z.ln());
            }
        }
        Err(Error::Numeric(format!(
            "exp_integral_e1: series did not converge at z = {z}"
        )))
    } else {
        // Continued fraction e^{-z} / (z+1 - 1/(z+3 - 4/(z+5 - 9/(...)))).
        let tiny = Complex::new(R::of(1e-300), R::zero());
        let guard = |v: Complex<R>| if v.norm() < R::of(1e-300) { tiny } else { v };
        let one = Complex::new(R::one(), R::zero());
        let mut b = z + one;
        let mut c = Complex::new(R::of(1e300), R::zero());
        let mut d = guard(b).inv();
        let mut f = d;
        for k in 1..400 {
            let kf = R::of_usize(k);
            let a = Complex::new(-kf * kf, R::zero());
            b += Complex::new(R::of(2.0), R::zero());
            d = guard(a * d + b).inv();
            c = guard(b + a / c);
            let delta = c * d;
            f *= delta;
            if (delta - one).norm() < eps {
                return Ok((-z).exp() * f);
            }
        }
        Err(Error::Numeric(format!(
            "exp_integral_e1: continued fraction did not converge at z = {z}"
        )))
    }
}

struct PanelRules<R: Real> {
    small: (Vec<R>, Vec<R>),
    large: (Vec<R>, Vec<R>),
}

fn panel_rules<R: Real>() -> Result<PanelRules<R>> {
    Ok(PanelRules {
        small: gauss_legendre(24)?,
        large: gauss_legendre(48)?,
    })
}

fn gl_panel<R: Real, F: Fn(R) -> Complex<R>>(
    f: &F,
    lo: R,
    hi: R,
    rule: &(Vec<R>, Vec<R>),
) -> Complex<R> {
    let half = (hi - lo) * R::of(0.5);
    let mid = (hi + lo) * R::of(0.5);
    let mut acc = Complex::new(R::zero(), R::zero());
    for (t, w) in rule.0.iter().zip(&rule.1) {
        acc += f(mid + half * *t).scale(*w);
    }
    acc.scale(half)
}

fn adaptive_panel<R: Real, F: Fn(R) -> Complex<R>>(
    f: &F,
    lo: R,
    hi: R,
    rules: &PanelRules<R>,
    abs_floor: R,
    depth: usize,
) -> Complex<R> {
    let coarse = gl_panel(f, lo, hi, &rules.small);
    let fine = gl_panel(f, lo, hi, &rules.large);
    let err = (fine - coarse).norm();
    if err <= R::of(1e-15) * fine.norm() + abs_floor || depth == 0 {
        return fine;
    }
    let mid = (lo + hi) * R::of(0.5);
    adaptive_panel(f, lo, mid, rules, abs_floor, depth - 1)
        + adaptive_panel(f, mid, hi, rules, abs_floor, depth - 1)
}

/// alpha_{n,1}(a) via the single-integral form
/// int_0^inf xi^n exp(-xi) / (2a+xi)^(n+1) dxi with the integrand evaluated
/// in log-space and panels organized around the saddle point.
fn alpha_lemma<R: Real>(n: usize, a: Complex<R>) -> Result<Complex<R>> {
    let two_a = a.scale(R::of(2.0));
    let nf = R::of_usize(n);
    let np1 = R::of_usize(n + 1);
    let one = Complex::new(R::one(), R::zero());
    // Saddle of n ln(xi) - xi - (n+1) ln(2a+xi): root of
    // xi^2 + (2a+1) xi - 2an = 0, taken at its real part and clamped.
    let b = two_a + one;
    let disc = (b * b + a.scale(R::of(8.0) * nf)).sqrt();
    let saddle = ((disc - b).scale(R::of(0.5)).re).max(R::one());
    let g = |xi: R| -> Complex<R> {
        let log_pow = if n == 0 { R::zero() } else { nf * xi.ln() };
        let expo = Complex::new(log_pow - xi, R::zero()) - (two_a + xi).ln().scale(np1);
        expo.exp()
    };
    let rules = panel_rules::<R>()?;
    let peak = g(saddle).norm();
    let mut brks = vec![R::zero(), saddle];
    let mut t = saddle;
    let limit = saddle + R::of(150.0);
    while t < limit {
        t = t * R::of(2.0) + R::of(10.0);
        brks.push(t);
    }
    let abs_floor = R::of(1e-19) * peak * (R::one() + *brks.last().unwrap());
    let mut acc = Complex::new(R::zero(), R::zero());
    for w in brks.windows(2) {
        acc += adaptive_panel(&g, w[0], w[1], &rules, abs_floor, 12);
    }
    Ok(acc)
}

/// General-k route: quadrature of the defining integral
/// int exp(-xi) phi_n(xi) / (a+xi)^k dxi with the exp(-2 xi) factor folded
/// into the rule weights.
fn alpha_definition<R: Real>(n: usize, k: usize, a: Complex<R>) -> Result<Complex<R>> {
    let n_nodes = (n + 160).min(320);
    let rule = gauss_laguerre(n_nodes, R::of(2.0))?;
    let lifted = rule.exp_weights();
    let mut acc = Complex::new(R::zero(), R::zero());
    for (x, w) in rule.nodes().iter().zip(&lifted) {
        let phi = phi_block(n, *x)[n];
        acc += (a + *x).powi(-(k as i32)).scale(phi * (-*x).exp() * *w);
    }
    Ok(acc)
}

/// Expansion coefficient alpha_{n,k}(a) = int_0^inf e^{-xi} phi_n(xi)
/// (a+xi)^{-k} dxi.
pub fn alpha<R: Real>(n: usize, k: usize, a: Complex<R>) -> Result<Complex<R>> {
    check_off_cut(a, "alpha")?;
    if k == 0 {
        return Err(Error::Domain("alpha: pole order k must be >= 1".into()));
    }
    if n > 200 {
        return Err(Error::Domain(format!(
            "alpha: index n = {n} beyond the supported range n <= 200"
        )));
    }
    if k == 1 {
        alpha_lemma(n, a)
    } else {
        alpha_definition(n, k, a)
    }
}

/// All alpha_{n,1}(a) for n = 0..=n_max by backward recurrence
/// (n alpha_n = (2n-1+2a) alpha_{n-1} - (n-1) alpha_{n-2}), normalized by the
/// quadrature value of alpha_0 and validated by doubling the start offset.
pub(crate) fn alpha_block<R: Real>(n_max: usize, a: Complex<R>) -> Result<Vec<Complex<R>>> {
    check_off_cut(a, "alpha_block")?;
    let alpha0 = alpha_lemma(0, a)?;
    let mut offset = 250usize;
    let mut prev: Option<Vec<Complex<R>>> = None;
    for _ in 0..5 {
        let vals = miller_descend(n_max, offset, a, alpha0);
        if let Some(p) = &prev {
            let mut worst = R::zero();
            for (v, q) in vals.iter().zip(p) {
                let rel = (v - q).norm() / (v.norm() + R::of(1e-300));
                if rel > worst {
                    worst = rel;
                }
            }
            if worst < R::of(1e-13) {
                return Ok(vals);
            }
        }
        prev = Some(vals);
        offset *= 2;
    }
    Err(Error::Numeric(format!(
        "alpha_block: backward recurrence failed to stabilize at a = {a}"
    )))
}

fn miller_descend<R: Real>(
    n_max: usize,
    offset: usize,
    a: Complex<R>,
    alpha0: Complex<R>,
) -> Vec<Complex<R>> {
    let zero = Complex::new(R::zero(), R::zero());
    let two_a = a.scale(R::of(2.0));
    let top = n_max + offset;
    let mut buf = vec![zero; n_max + 1];
    let mut hi = zero; // trial value at index m+1
    let mut lo = Complex::new(R::one(), R::zero()); // trial value at index m
    let mut m = top - 1;
    loop {
        if m <= n_max {
            buf[m] = lo;
        }
        if m == 0 {
            break;
        }
        // Recurrence at index m+1 solved for the value at m-1.
        let mf = R::of_usize(m);
        let next = ((two_a + Complex::new(R::of(2.0) * mf + R::one(), R::zero())) * lo
            - hi.scale(mf + R::one()))
        .unscale(mf);
        hi = lo;
        lo = next;
        if lo.norm() > R::of(1e250) {
            let shrink = R::of(1e-250);
            hi = hi.scale(shrink);
            lo = lo.scale(shrink);
            for v in buf.iter_mut().skip(m) {
                *v = v.scale(shrink);
            }
        }
        m -= 1;
    }
    let factor = alpha0 / buf[0];
    for v in buf.iter_mut() {
        *v = *v * factor;
    }
    buf
}

/// Large-n asymptotic exp(a - 2 sqrt(2a(n+1))) sqrt(pi) (2a(n+1))^(-1/4),
/// principal branches throughout.
pub fn alpha_asymptotic<R: Real>(n: usize, a: Complex<R>) -> Result<Complex<R>> {
    check_off_cut(a, "alpha_asymptotic")?;
    let arg = a.scale(R::of(2.0) * R::of_usize(n + 1));
    let root = arg.sqrt();
    let quarter = (arg.ln().scale(R::of(-0.25))).exp();
    Ok((a - root.scale(R::of(2.0))).exp().scale(R::PI().sqrt()) * quarter)
}

/// beta_{n,k}(a) = int phi_n phi_k / (a+x) dx = alpha_{n,1}(a) L_k(-2a),
/// valid for n >= k.
pub fn beta<R: Real>(n: usize, k: usize, a: Complex<R>) -> Result<Complex<R>> {
    check_off_cut(a, "beta")?;
    if n < k {
        return Err(Error::Domain(format!(
            "beta: the product identity requires n >= k, got n = {n}, k = {k}"
        )));
    }
    let al = alpha(n, 1, a)?;
    let lk = eval_laguerre(k, 0, -a.scale(R::of(2.0)))?;
    Ok(al * lk)
}
