//! Approximation-error laboratory: projections onto the Laguerre space,
//! closed-form coefficients and tails for exponentials, best-approximation
//! errors for scaled spherical Hankel functions, the epsilon cross term, and
//! the predicted convergence-rate terms.

use crate::error::{Error, Result};
use crate::hankel::{alpha_block, eval_h};
use crate::laguerre::{eval_laguerre, gauss_laguerre, phi_table, QuadratureRule};
use crate::scalar::Real;
use num_complex::Complex;

/// Truncated expansion f ~ sum_n coefficients[n] phi_n together with the
/// L2 norm of the discarded remainder.
#[derive(Debug, Clone)]
pub struct ProjectionResult<R: Real> {
    pub coefficients: Vec<Complex<R>>,
    pub tail_error: R,
}

/// The two terms of the predicted error bound
/// c1 |(1+i sigma omega)/(1-i sigma omega)|^(N+1)
///   + c2 exp(-2 Re sqrt(2R(N+1)/sigma)) (N+1)^(nu/2).
#[derive(Debug, Clone, Copy)]
pub struct RatePrediction<R: Real> {
    pub exp_term: R,
    pub alg_term: R,
}

impl<R: Real> RatePrediction<R> {
    pub fn total(&self) -> R {
        self.exp_term + self.alg_term
    }
}

/// int_0^inf exp(-b xi) phi_n(xi) dxi = (b-1)^n / (b+1)^(n+1).
pub fn laplace_coefficient<R: Real>(b: Complex<R>, n: usize) -> Result<Complex<R>> {
    if !(b.re > -R::one()) {
        return Err(Error::Domain(format!(
            "laplace_coefficient: need Re(b) > -1, got b = {b}"
        )));
    }
    let one = Complex::new(R::one(), R::zero());
    Ok((b - one).powu(n as u32) / (b + one).powu(n as u32 + 1))
}

/// Orthogonal projection of exp(-b x) onto span(phi_0..phi_N), all in closed
/// form: c_n = (2/(b+1)) ((b-1)/(b+1))^n.
pub fn project_exp<R: Real>(b: Complex<R>, n_max: usize) -> Result<ProjectionResult<R>> {
    if !(b.re > R::zero()) {
        return Err(Error::Domain(format!(
            "project_exp: exp(-b x) is square-integrable only for Re(b) > 0, got b = {b}"
        )));
    }
    let one = Complex::new(R::one(), R::zero());
    let ratio = (b - one) / (b + one);
    let mut c = one.scale(R::of(2.0)) / (b + one);
    let mut coefficients = Vec::with_capacity(n_max + 1);
    for _ in 0..=n_max {
        coefficients.push(c);
        c *= ratio;
    }
    Ok(ProjectionResult {
        coefficients,
        tail_error: exp_tail_error(b, n_max)?,
    })
}

/// || exp(-b x) - Pi_N exp(-b x) || = |(b-1)/(b+1)|^(N+1) / sqrt(2 Re b).
pub fn exp_tail_error<R: Real>(b: Complex<R>, n_max: usize) -> Result<R> {
    if !(b.re > R::zero()) {
        return Err(Error::Domain(format!(
            "exp_tail_error: need Re(b) > 0, got b = {b}"
        )));
    }
    let one = Complex::new(R::one(), R::zero());
    let ratio = ((b - one) / (b + one)).norm();
    Ok(ratio.powi(n_max as i32 + 1) / (R::of(2.0) * b.re).sqrt())
}

fn projection_coefficients<R: Real, F: Fn(R) -> Complex<R>>(
    f: &F,
    n_max: usize,
    rule: &QuadratureRule<R>,
) -> (Vec<Complex<R>>, R) {
    let lifted = rule.exp_weights();
    let phis = phi_table(n_max, rule.nodes());
    let samples: Vec<Complex<R>> = rule.nodes().iter().map(|&x| f(x)).collect();
    let mut norm_sq = R::zero();
    for (v, w) in samples.iter().zip(&lifted) {
        norm_sq += v.norm_sqr() * *w;
    }
    let mut coefficients = Vec::with_capacity(n_max + 1);
    for row in &phis {
        let mut acc = Complex::new(R::zero(), R::zero());
        for ((v, w), p) in samples.iter().zip(&lifted).zip(row) {
            acc += v.scale(*w * *p);
        }
        coefficients.push(acc.scale(R::of(2.0)));
    }
    (coefficients, norm_sq)
}

/// Projection of an arbitrary decaying callback by quadrature, with the tail
/// recovered from the norm identity ||f||^2 = tail^2 + sum |c_n|^2 / 2.
pub fn project_general<R: Real, F: Fn(R) -> Complex<R>>(
    f: F,
    n_max: usize,
    rule: &QuadratureRule<R>,
) -> Result<ProjectionResult<R>> {
    let (coefficients, norm_sq) = projection_coefficients(&f, n_max, rule);
    let mut captured = R::zero();
    for c in &coefficients {
        captured += c.norm_sqr() * R::of(0.5);
    }
    let variance = norm_sq - captured;
    if variance < -R::of(1e-13) * norm_sq {
        return Err(Error::Numeric(format!(
            "project_general: captured energy exceeds the quadrature norm by {variance:e}; \
             the rule is too coarse for this integrand"
        )));
    }
    Ok(ProjectionResult {
        coefficients,
        tail_error: variance.max(R::zero()).sqrt(),
    })
}

/// Best-approximation error ||(I - Pi_N) h_nu(omega (R + sigma x))|| computed
/// coefficient-wise over the next 150 modes; a Parseval-style remainder would
/// sit on a roundoff floor near 1e-9 and is deliberately left out.
pub fn hankel_best_approx_error<R: Real>(
    nu: usize,
    omega: Complex<R>,
    sigma: Complex<R>,
    radius: R,
    n_max: usize,
) -> Result<R> {
    let weight = sigma * omega;
    if !(weight.im > R::zero()) {
        return Err(Error::Domain(format!(
            "hankel_best_approx_error: need Im(sigma*omega) > 0 for square integrability, \
             got sigma*omega = {weight}"
        )));
    }
    if nu > 12 {
        return Err(Error::Domain(format!(
            "hankel_best_approx_error: order nu = {nu} beyond the supported range nu <= 12"
        )));
    }
    if !(radius > R::zero()) {
        return Err(Error::Domain("hankel_best_approx_error: radius must be positive".into()));
    }
    let margin = 150usize;
    let m = n_max + margin;
    let exponent = R::one() + weight.im;
    let tail_at = |k_nodes: usize| -> Result<R> {
        let rule = gauss_laguerre(k_nodes, exponent)?;
        let lifted = rule.exp_weights();
        let phis = phi_table(m, rule.nodes());
        let mut samples = Vec::with_capacity(rule.len());
        for &x in rule.nodes() {
            samples.push(eval_h(nu, omega * (sigma.scale(x) + radius))?);
        }
        let mut acc = R::zero();
        for row in phis.iter().take(m + 1).skip(n_max + 1) {
            let mut c = Complex::new(R::zero(), R::zero());
            for ((v, w), p) in samples.iter().zip(&lifted).zip(row) {
                c += v.scale(*w * *p);
            }
            acc += c.scale(R::of(2.0)).norm_sqr() * R::of(0.5);
        }
        Ok(acc.sqrt())
    };
    let coarse = tail_at(m + 40)?;
    let fine = tail_at(2 * (m + 40))?;
    if (coarse - fine).abs() > R::of(1e-8) * R::one().max(fine) {
        return Err(Error::Numeric(format!(
            "hankel_best_approx_error: node doubling moved the result by {:e}",
            (coarse - fine).abs()
        )));
    }
    Ok(fine)
}

/// epsilon(N, a, b) = ||(I - Pi_N) (a + x)^{-1} Pi_N exp(-b x)||, evaluated
/// through the alpha/beta coefficient identities.
pub fn epsilon_term<R: Real>(n_max: usize, a: Complex<R>, b: Complex<R>) -> Result<R> {
    if a.im == R::zero() && a.re <= R::zero() {
        return Err(Error::Domain(format!(
            "epsilon_term: a = {a} lies on the branch cut (-inf, 0]"
        )));
    }
    if !(b.re > R::zero()) {
        return Err(Error::Domain(format!(
            "epsilon_term: need Re(b) > 0, got b = {b}"
        )));
    }
    let one = Complex::new(R::one(), R::zero());
    let ratio = (b - one) / (b + one);
    let minus_two_a = -a.scale(R::of(2.0));
    let mut inner = Complex::new(R::zero(), R::zero());
    let mut rk = one;
    for k in 0..=n_max {
        inner += rk * eval_laguerre(k, 0, minus_two_a)?;
        rk *= ratio;
    }
    let prefactor = (one.scale(R::of(4.0)) / (b + one)).norm_sqr() * inner.norm_sqr() * R::of(0.5);
    // Upper cutoff sized from the alpha decay exp(-2 Re sqrt(2a) sqrt(n)).
    let decay = (a.scale(R::of(2.0))).sqrt().re.max(R::of(1e-3));
    let m_f = (R::of_usize(n_max).sqrt() + R::of(9.5) / decay + R::of(6.0)).powi(2) + R::of(50.0);
    let m = (m_f.to_usize().unwrap_or(usize::MAX)).min(200_000);
    let block = alpha_block(m, a)?;
    let mut sum = R::zero();
    let mut prev = R::infinity();
    let mut non_decreasing = 0usize;
    let mut converged = false;
    for v in block.iter().take(m + 1).skip(n_max + 1) {
        let inc = v.norm_sqr();
        sum += inc;
        if inc >= prev {
            non_decreasing += 1;
            if non_decreasing >= 50 {
                return Err(Error::Numeric(format!(
                    "epsilon_term: tail increments stopped decreasing at a = {a}"
                )));
            }
        } else {
            non_decreasing = 0;
        }
        prev = inc;
        if inc < R::of(1e-16) * sum {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Numeric(format!(
            "epsilon_term: tail did not converge within {m} terms at a = {a}"
        )));
    }
    Ok((prefactor * sum).sqrt())
}

/// Evaluates the two bound terms with caller-supplied fit constants.
pub fn predicted_rates<R: Real>(
    nu: usize,
    omega: Complex<R>,
    sigma: Complex<R>,
    radius: R,
    n_max: usize,
    c1: R,
    c2: R,
) -> Result<RatePrediction<R>> {
    let weight = sigma * omega;
    if !(weight.im > R::zero()) {
        return Err(Error::Domain(format!(
            "predicted_rates: need Im(sigma*omega) > 0, got sigma*omega = {weight}"
        )));
    }
    if sigma.im == R::zero() && sigma.re <= R::zero() {
        return Err(Error::Domain(format!(
            "predicted_rates: sigma = {sigma} lies on the branch cut (-inf, 0]"
        )));
    }
    if !(radius > R::zero()) {
        return Err(Error::Domain("predicted_rates: radius must be positive".into()));
    }
    let i = Complex::new(R::zero(), R::one());
    let one = Complex::new(R::one(), R::zero());
    let rho = ((one + i * weight) / (one - i * weight)).norm();
    let np1 = R::of_usize(n_max + 1);
    let exp_term = c1 * rho.powi(n_max as i32 + 1);
    let root = (Complex::new(R::of(2.0) * radius * np1, R::zero()) / sigma).sqrt();
    let alg_term = c2 * (-R::of(2.0) * root.re).exp() * np1.powf(R::of_usize(nu) / R::of(2.0));
    Ok(RatePrediction { exp_term, alg_term })
}

/// Least-squares line through (x, ln e) for samples with e in
/// (1e-11, 1e-2), returning (slope, intercept).
pub fn fit_log_slope<R: Real>(xs: &[R], errors: &[R]) -> Result<(R, R)> {
    if xs.len() != errors.len() {
        return Err(Error::Domain(format!(
            "fit_log_slope: {} abscissae vs {} errors",
            xs.len(),
            errors.len()
        )));
    }
    let lo = R::of(1e-11);
    let hi = R::of(1e-2);
    let mut pts: Vec<(R, R)> = Vec::new();
    for (&x, &e) in xs.iter().zip(errors) {
        if e > lo && e < hi {
            pts.push((x, e.ln()));
        }
    }
    if pts.len() < 2 {
        return Err(Error::Domain(format!(
            "fit_log_slope: only {} samples inside the (1e-11, 1e-2) window",
            pts.len()
        )));
    }
    let n = R::of_usize(pts.len());
    let mut sx = R::zero();
    let mut sy = R::zero();
    let mut sxx = R::zero();
    let mut sxy = R::zero();
    for &(x, y) in &pts {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    let det = n * sxx - sx * sx;
    if det.abs() < R::of(1e-300) {
        return Err(Error::Domain(
            "fit_log_slope: degenerate abscissae".into(),
        ));
    }
    let slope = (n * sxy - sx * sy) / det;
    let intercept = (sy - slope * sx) / n;
    Ok((slope, intercept))
}
