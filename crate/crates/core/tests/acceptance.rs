//! End-to-end acceptance gate. Each test covers one numbered criterion and
//! prints a single `criterion N: PASS/FAIL` line with the measured numbers,
//! so a full run doubles as a results table (use `-- --nocapture` to see the
//! passing lines; failing lines surface in the assert message).

use csie_core::approx::{
    exp_tail_error, fit_log_slope, hankel_best_approx_error, laplace_coefficient, predicted_rates,
    project_general,
};
use csie_core::assembly::{trace_vector, PotentialSpec, ScalingConfig};
use csie_core::eig::{condition_number, dense_eig, shift_invert_arnoldi, SeparatedProblem};
use csie_core::hankel::{alpha, alpha_asymptotic, beta, resonance_roots, SearchBox};
use csie_core::laguerre::{eval_laguerre, eval_phi, gauss_laguerre, gauss_legendre, phi_table};
use csie_core::pml::{assemble_pml, PmlConfig};
use num_complex::Complex;
use std::time::Instant;

type C = Complex<f64>;

fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

/// First reference resonance (nu = 3), quoted to the precision used in the
/// comparison figures.
fn reference_root_nu3() -> C {
    c(2.90391653245, -1.20186645975)
}

/// Second reference resonance; the owning nu is recovered by scanning.
fn reference_root_second() -> C {
    c(5.77658328455, -1.41788771722)
}

fn gate(criterion: usize, checks: &[(bool, String)]) {
    let ok = checks.iter().all(|(p, _)| *p);
    let details: Vec<String> = checks
        .iter()
        .map(|(p, s)| {
            if *p {
                s.clone()
            } else {
                format!("FAILED<{s}>")
            }
        })
        .collect();
    let line = format!(
        "criterion {criterion}: {} - {}",
        if ok { "PASS" } else { "FAIL" },
        details.join("; ")
    );
    println!("{line}");
    assert!(ok, "{line}");
}

fn omega_probe() -> C {
    c(10.0, -0.5)
}

/// Least-squares slope of ln(y) against ln(x), without any error windowing
/// (the library fit targets approximation-error magnitudes; condition
/// numbers live on the other side of 1).
fn log_log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for (&x, &y) in xs.iter().zip(ys) {
        let (lx, ly) = (x.ln(), y.ln());
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

fn min_distance_to(set: &csie_core::eig::ResonanceSet<f64>, target: C) -> f64 {
    set.pairs
        .iter()
        .map(|p| (p.omega - target).norm())
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn criterion_1_orthonormality_and_recurrence_properties() {
    let t0 = Instant::now();
    let mut checks = Vec::new();

    // Orthonormality (phi_n, phi_k) = delta_{nk}/2 for n,k <= 50.
    let rule = gauss_laguerre::<f64>(110, 2.0).unwrap();
    let lifted = rule.exp_weights();
    let table = phi_table(50, rule.nodes());
    let mut worst = 0.0f64;
    for n in 0..=50usize {
        for k in 0..=n {
            let mut acc = 0.0;
            for i in 0..lifted.len() {
                acc += lifted[i] * table[n][i] * table[k][i];
            }
            let want = if n == k { 0.5 } else { 0.0 };
            worst = worst.max((acc - want).abs());
        }
    }
    checks.push((worst < 1e-12, format!("orthonormality dev {worst:.2e}")));

    // (ii) phi_{n,m-1} = phi_{n,m} - phi_{n-1,m}.
    let mut dev_ii = 0.0f64;
    for n in 1..=30usize {
        for m in [0i64, 1, 2] {
            for x in [c(0.3, 0.7), c(2.0, -0.5), c(5.0, 0.0)] {
                let lhs = eval_phi(n, m - 1, x).unwrap();
                let rhs = eval_phi(n, m, x).unwrap() - eval_phi(n - 1, m, x).unwrap();
                dev_ii = dev_ii.max((lhs - rhs).norm() / rhs.norm().max(1.0));
            }
        }
    }
    checks.push((dev_ii < 1e-12, format!("(ii) family recursion dev {dev_ii:.2e}")));

    // (v) (x^2 phi_l, phi_k) = 0 beyond bandwidth 2.
    let mut dev_v = 0.0f64;
    for l in 0..=40usize {
        for k in 0..=40usize {
            if l.abs_diff(k) <= 2 {
                continue;
            }
            let mut acc = 0.0;
            for i in 0..lifted.len() {
                acc += lifted[i] * rule.nodes()[i].powi(2) * table[l][i] * table[k][i];
            }
            dev_v = dev_v.max(acc.abs());
        }
    }
    checks.push((dev_v < 1e-10, format!("(v) sparsity dev {dev_v:.2e}")));

    // (vii) the m = -1 family carries the delta trace at the origin, and the
    // assembled trace vector reflects it.
    let mut dev_vii = (eval_phi(0, 0, c(0.0, 0.0)).unwrap() - c(1.0, 0.0)).norm();
    for n in 1..=30usize {
        dev_vii = dev_vii.max(eval_phi(n, -1, c(0.0, 0.0)).unwrap().norm());
    }
    let tr = trace_vector::<f64>(5);
    let tr_ok = tr.len() == 6 && tr[0] == 1.0 && tr[1..].iter().all(|&v| v == 0.0);
    checks.push((
        dev_vii < 1e-14 && tr_ok,
        format!("(vii) trace dev {dev_vii:.2e}"),
    ));

    // (viii) k phi_k = (2k-1-2x) phi_{k-1} - (k-1) phi_{k-2}.
    let mut dev_viii = 0.0f64;
    for n in 2..=30usize {
        for x in [c(0.1, 0.0), c(1.3, -0.8), c(4.0, 2.0), c(9.5, 0.0)] {
            let lhs = eval_phi(n, 0, x).unwrap().scale(n as f64);
            let rhs = (c(2.0 * n as f64 - 1.0, 0.0) - x - x) * eval_phi(n - 1, 0, x).unwrap()
                - eval_phi(n - 2, 0, x).unwrap().scale(n as f64 - 1.0);
            dev_viii = dev_viii.max((lhs - rhs).norm() / rhs.norm().max(1.0));
        }
    }
    checks.push((dev_viii < 1e-12, format!("(viii) recurrence dev {dev_viii:.2e}")));

    // (ix) generating function sum_k L_k(x) t^k = exp(-tx/(1-t))/(1-t).
    let mut dev_ix = 0.0f64;
    for t in [c(0.3, 0.0), c(0.0, 0.5), c(-0.2, 0.4)] {
        for x in [0.0f64, 1.0, 4.7, 10.0] {
            let mut acc = c(0.0, 0.0);
            let mut tp = c(1.0, 0.0);
            for k in 0..=80usize {
                acc += eval_laguerre(k, 0, c(x, 0.0)).unwrap() * tp;
                tp *= t;
            }
            let one = c(1.0, 0.0);
            let closed = (-t.scale(x) / (one - t)).exp() / (one - t);
            dev_ix = dev_ix.max((acc - closed).norm());
        }
    }
    checks.push((dev_ix < 1e-10, format!("(ix) generating function dev {dev_ix:.2e}")));

    let dt = t0.elapsed().as_secs_f64();
    checks.push((dt < 5.0, format!("runtime {dt:.2}s < 5s")));
    gate(1, &checks);
}

#[test]
fn criterion_2_closed_forms_against_quadrature() {
    let mut checks = Vec::new();

    // Laplace coefficients (phi_n, e^{-bx}) = (b-1)^n/(b+1)^{n+1}, against a
    // composite Gauss-Legendre rule on unit panels (resolves the e^{-i Im(b) x}
    // oscillation exactly). The quadrature route runs in doubles, so
    // deviations are measured against the coefficient scale of each family:
    // the integrand is O(1) while real-b coefficients decay geometrically
    // below the summation floor.
    let (gl_nodes, gl_weights) = gauss_legendre::<f64>(24).unwrap();
    let mut worst_rel = 0.0f64;
    for b in [c(3.0, 0.0), c(1.0, 2.0), c(0.2, 5.0)] {
        // Truncation point where exp(-(1+Re b)x) has absorbed the growth of
        // L_60(2x) down to ~1e-18.
        let x_cut = ((40.0 + 60.0 * (800.0f64).ln()) / (1.0 + b.re)).ceil();
        let panels = x_cut as usize;
        let mut nodes = Vec::with_capacity(24 * panels);
        let mut weights = Vec::with_capacity(24 * panels);
        for p in 0..panels {
            for (t, w) in gl_nodes.iter().zip(&gl_weights) {
                nodes.push(p as f64 + 0.5 * (t + 1.0));
                weights.push(0.5 * w);
            }
        }
        // L_n(2x) table by the three-term recurrence, rows n = 0..=60.
        let mut lag = vec![vec![0.0f64; nodes.len()]; 61];
        for (i, &x) in nodes.iter().enumerate() {
            let y = 2.0 * x;
            lag[0][i] = 1.0;
            lag[1][i] = 1.0 - y;
            for k in 2..=60 {
                lag[k][i] = ((2.0 * k as f64 - 1.0 - y) * lag[k - 1][i]
                    - (k as f64 - 1.0) * lag[k - 2][i])
                    / k as f64;
            }
        }
        let ew: Vec<C> = nodes
            .iter()
            .zip(&weights)
            .map(|(&x, &w)| ((b + 1.0) * (-x)).exp().scale(w))
            .collect();
        let closed: Vec<C> = (0..=60)
            .map(|n| laplace_coefficient(b, n).unwrap())
            .collect();
        let scale = closed.iter().map(|v| v.norm()).fold(0.0, f64::max);
        for (n, &cf) in closed.iter().enumerate() {
            let mut quad = c(0.0, 0.0);
            for (i, &w) in ew.iter().enumerate() {
                quad += w.scale(lag[n][i]);
            }
            worst_rel = worst_rel.max((cf - quad).norm() / scale);
        }
    }
    checks.push((
        worst_rel < 1e-11,
        format!("laplace coefficient dev {worst_rel:.2e}"),
    ));

    // Tail-error closed form against the quadrature-side tail of a general
    // projection of the same exponential.
    let rule = gauss_laguerre::<f64>(400, 2.0).unwrap();
    let mut worst_tail = 0.0f64;
    for b in [c(1.0, 2.0), c(2.5, 0.0)] {
        for n_max in [6usize, 14] {
            let closed = exp_tail_error(b, n_max).unwrap();
            let proj = project_general(|x: f64| c(-b.re * x, -b.im * x).exp(), n_max, &rule)
                .unwrap();
            worst_tail = worst_tail.max((closed - proj.tail_error).abs());
        }
    }
    checks.push((worst_tail < 1e-10, format!("tail equality dev {worst_tail:.2e}")));

    // beta_{n,k}(a) = alpha_{n,1}(a) L_k(-2a) against direct quadrature of
    // phi_n phi_k / (a + x) on an n >= k grid.
    let brule = gauss_laguerre::<f64>(220, 2.0).unwrap();
    let blift = brule.exp_weights();
    let btable = phi_table(20, brule.nodes());
    let mut worst_beta = 0.0f64;
    for a in [c(2.0, 0.0), c(1.0, 1.0), c(2.0, -3.0)] {
        for n in 0..=20usize {
            for k in 0..=n {
                let mut quad = c(0.0, 0.0);
                for i in 0..blift.len() {
                    quad += (a + brule.nodes()[i]).inv().scale(blift[i] * btable[n][i] * btable[k][i]);
                }
                let closed = beta(n, k, a).unwrap();
                let dev = (closed - quad).norm() / (quad.norm() + 2e-6);
                worst_beta = worst_beta.max(dev);
            }
        }
    }
    checks.push((worst_beta < 1e-9, format!("beta identity dev {worst_beta:.2e}")));

    gate(2, &checks);
}

#[test]
fn criterion_3_alpha_asymptotic_ratio() {
    let mut checks = Vec::new();
    for a in [c(1.0, 0.0), c(2.0, -3.0)] {
        let err = |n: usize| -> f64 {
            let exact = alpha(n, 1, a).unwrap();
            let asym = alpha_asymptotic(n, a).unwrap();
            (exact / asym - c(1.0, 0.0)).norm()
        };
        for n in [20usize, 40] {
            let e_n = err(n);
            let e_4n = err(4 * n);
            checks.push((
                e_4n < 0.6 * e_n,
                format!("a={a}: e_{}={:.2e} vs 0.6*e_{}={:.2e}", 4 * n, e_4n, n, 0.6 * e_n),
            ));
        }
    }
    gate(3, &checks);
}

#[test]
fn criterion_4_two_regime_error_rates() {
    let t0 = Instant::now();
    let mut checks = Vec::new();
    let omega = omega_probe();

    // Exponential regime: slope of ln(error) vs N matches ln|(1+i sigma omega)/(1-i sigma omega)|
    // per sigma, independent of the interface radius.
    for (sigma, n_lo, n_hi) in [(c(0.3, 0.3), 36usize, 76usize), (c(0.2, 0.4), 36, 68)] {
        let i_sw = c(0.0, 1.0) * sigma * omega;
        let one = c(1.0, 0.0);
        let predicted = ((one + i_sw).norm() / (one - i_sw).norm()).ln();
        let mut slopes = Vec::new();
        for radius in [2.0f64, 3.0, 4.0] {
            let ns: Vec<usize> = (n_lo..=n_hi).step_by(4).collect();
            let xs: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
            let errs: Vec<f64> = ns
                .iter()
                .map(|&n| hankel_best_approx_error(0, omega, sigma, radius, n).unwrap())
                .collect();
            let (slope, _) = fit_log_slope(&xs, &errs).unwrap();
            slopes.push(slope);
        }
        let worst_dev = slopes
            .iter()
            .map(|s| (s - predicted).abs() / predicted.abs())
            .fold(0.0, f64::max);
        let spread = {
            let mx = slopes.iter().cloned().fold(f64::MIN, f64::max);
            let mn = slopes.iter().cloned().fold(f64::MAX, f64::min);
            let mean = slopes.iter().sum::<f64>() / slopes.len() as f64;
            (mx - mn) / mean.abs()
        };
        checks.push((
            worst_dev < 0.05,
            format!("sigma={sigma}: slope dev {:.1}%", 100.0 * worst_dev),
        ));
        checks.push((
            spread < 0.02,
            format!("sigma={sigma}: R spread {:.2}%", 100.0 * spread),
        ));
    }

    // Super-algebraic regime at R = 0.1: ln(error) vs sqrt(N+1) slope matches
    // -2 Re sqrt(2R/sigma), independent of omega.
    let sigma_s = c(0.1, 0.1);
    let radius_s = 0.1f64;
    let predicted_s = -2.0 * (c(2.0 * radius_s, 0.0) / sigma_s).sqrt().re;
    let mut slopes_s = Vec::new();
    for om in [c(10.0, -0.5), c(6.0, -0.3)] {
        let ns: Vec<usize> = (2..=120).step_by(2).collect();
        let xs: Vec<f64> = ns.iter().map(|&n| ((n + 1) as f64).sqrt()).collect();
        let errs: Vec<f64> = ns
            .iter()
            .map(|&n| hankel_best_approx_error(0, om, sigma_s, radius_s, n).unwrap())
            .collect();
        let (slope, _) = fit_log_slope(&xs, &errs).unwrap();
        slopes_s.push(slope);
    }
    let dev_s = slopes_s
        .iter()
        .map(|s| (s - predicted_s).abs() / predicted_s.abs())
        .fold(0.0, f64::max);
    let spread_s = {
        let mx = slopes_s.iter().cloned().fold(f64::MIN, f64::max);
        let mn = slopes_s.iter().cloned().fold(f64::MAX, f64::min);
        (mx - mn) / (slopes_s.iter().sum::<f64>() / 2.0).abs()
    };
    checks.push((dev_s < 0.10, format!("sqrt slope dev {:.1}%", 100.0 * dev_s)));
    checks.push((
        spread_s < 0.05,
        format!("omega spread {:.1}%", 100.0 * spread_s),
    ));

    // nu-dependence bounded by the (N+1)^{nu/2} factor: anchor the two rate
    // constants, then require the measured error to stay below 1.1x the
    // predicted total over the whole sweep.
    for nu in [0usize, 2, 5] {
        let err_at = |n: usize| hankel_best_approx_error(nu, omega, sigma_s, radius_s, n).unwrap();
        let terms = |n: usize| predicted_rates(nu, omega, sigma_s, radius_s, n, 1.0, 1.0).unwrap();
        let c2 = [10usize, 40]
            .iter()
            .map(|&n| err_at(n) / terms(n).alg_term)
            .fold(0.0, f64::max);
        let c1 = err_at(110) / terms(110).exp_term;
        let mut worst_ratio = 0.0f64;
        for n in 5..=120usize {
            let t = terms(n);
            let bound = c1 * t.exp_term + c2 * t.alg_term;
            worst_ratio = worst_ratio.max(err_at(n) / bound);
        }
        checks.push((
            worst_ratio <= 1.1,
            format!("nu={nu}: bound ratio {worst_ratio:.3}"),
        ));
    }

    let dt = t0.elapsed().as_secs_f64();
    checks.push((dt < 120.0, format!("runtime {dt:.1}s < 120s")));
    gate(4, &checks);
}

#[test]
fn criterion_5_reference_resonances_and_eigenvalue_rate() {
    let t0 = Instant::now();
    let mut checks = Vec::new();

    // The quoted nu = 3 value is itself a polynomial-oracle root.
    let box3 = SearchBox::new(0.5, 7.0, -3.0, -0.05).unwrap();
    let roots3 = resonance_roots::<f64>(3, box3).unwrap();
    let oracle_dist = roots3
        .iter()
        .map(|r| (r - reference_root_nu3()).norm())
        .fold(f64::INFINITY, f64::min);
    checks.push((
        oracle_dist < 1e-9,
        format!("nu=3 oracle root dist {oracle_dist:.2e}"),
    ));

    // Infinite-element solve at 60 radial DOF.
    let cfg = ScalingConfig::new(c(0.5, 0.5), 1.0).unwrap();
    let prob3 = SeparatedProblem::homogeneous(3, 59, &cfg).unwrap();
    let set3 = dense_eig(&prob3).unwrap();
    let err3 = min_distance_to(&set3, reference_root_nu3());
    checks.push((err3 < 1e-8, format!("nu=3 at 60 DOF err {err3:.2e}")));

    // Second reference: recover the owning nu by scanning the oracle, then
    // match the eigensolver against it.
    let second = reference_root_second();
    let mut owner = None;
    for nu in 0..=8usize {
        let bx = SearchBox::new(0.2, 8.0, -3.0, -0.05).unwrap();
        let roots = resonance_roots::<f64>(nu, bx).unwrap();
        if roots.iter().any(|r| (r - second).norm() < 1e-6) {
            owner = Some(nu);
            break;
        }
    }
    let owner_ok = owner.is_some();
    let mut err2 = f64::INFINITY;
    if let Some(nu) = owner {
        let prob = SeparatedProblem::homogeneous(nu, 59, &cfg).unwrap();
        let set = dense_eig(&prob).unwrap();
        err2 = min_distance_to(&set, second);
    }
    checks.push((
        owner_ok && err2 < 1e-8,
        format!("second root at nu={owner:?}, err {err2:.2e}"),
    ));

    // Eigenvalue errors decay at the squared approximation rate.
    let target = roots3
        .iter()
        .copied()
        .min_by(|a, b| {
            (a - reference_root_nu3())
                .norm()
                .partial_cmp(&(b - reference_root_nu3()).norm())
                .unwrap()
        })
        .unwrap();
    let sigma_r = c(0.3, 1.5);
    let cfg_r = ScalingConfig::new(sigma_r, 1.0).unwrap();
    let ns: Vec<usize> = (20..=70).step_by(10).collect();
    let xs: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
    let mut eig_errs = Vec::new();
    let mut approx_errs = Vec::new();
    for &n in &ns {
        let prob = SeparatedProblem::homogeneous(3, n, &cfg_r).unwrap();
        let set = dense_eig(&prob).unwrap();
        eig_errs.push(min_distance_to(&set, target));
        approx_errs.push(hankel_best_approx_error(3, target, sigma_r, 1.0, n).unwrap());
    }
    let (slope_eig, _) = fit_log_slope(&xs, &eig_errs).unwrap();
    let (slope_approx, _) = fit_log_slope(&xs, &approx_errs).unwrap();
    let ratio = slope_eig / slope_approx;
    checks.push((
        (1.6..=2.4).contains(&ratio),
        format!("eig/approx rate ratio {ratio:.2}"),
    ));

    let dt = t0.elapsed().as_secs_f64();
    checks.push((dt < 60.0, format!("runtime {dt:.1}s < 60s")));
    gate(5, &checks);
}

#[test]
fn criterion_6_truncated_layer_plateau() {
    let mut checks = Vec::new();
    let target = reference_root_nu3();
    let sigma_pml = (c(1.0, 1.0) / target).scale(1.0);

    let plateau = |t_len: f64| -> f64 {
        let mut best = f64::INFINITY;
        for n_elems in [2usize, 4, 8, 16, 24] {
            let cfg = ScalingConfig::new(sigma_pml, 1.0).unwrap();
            let pml = PmlConfig::new(t_len, n_elems, 5, cfg).unwrap();
            let (s, m, _) = assemble_pml(&pml, 3, None).unwrap();
            let prob =
                SeparatedProblem::from_matrices(3, s, m, &pml.cfg, &PotentialSpec::none()).unwrap();
            let set = dense_eig(&prob).unwrap();
            best = best.min(min_distance_to(&set, target));
        }
        best
    };

    let p5 = plateau(5.0);
    checks.push((
        (1e-4..=1e-2).contains(&p5),
        format!("T=5 plateau {p5:.2e} in [1e-4,1e-2]"),
    ));

    let cfg_ie = ScalingConfig::new(c(0.5, 0.5), 1.0).unwrap();
    let prob_ie = SeparatedProblem::homogeneous(3, 59, &cfg_ie).unwrap();
    let set_ie = shift_invert_arnoldi(&prob_ie, c(2.9, -1.2), 40, 3, 1e-9).unwrap();
    let err_ie = min_distance_to(&set_ie, target);
    checks.push((
        err_ie < 1e-8,
        format!("radial basis err {err_ie:.2e} at 60 DOF"),
    ));

    let p8 = plateau(8.0);
    checks.push((p8 < p5, format!("T=8 plateau {p8:.2e} < T=5 plateau")));

    gate(6, &checks);
}

#[test]
fn criterion_7_radial_inhomogeneity_branches() {
    let mut checks = Vec::new();
    let cfg = ScalingConfig::new(c(0.35, 0.7), 1.0).unwrap();
    let eps_grid = [0.0f64, 0.5, 1.0, 1.5];

    for nu in 1..=5usize {
        let bx = SearchBox::new(0.05, 8.0, -5.0, -0.01).unwrap();
        let roots = resonance_roots::<f64>(nu, bx).unwrap();
        let start = roots
            .iter()
            .copied()
            .max_by(|a, b| a.re.partial_cmp(&b.re).unwrap())
            .unwrap();

        let mut tracked = start;
        let mut ims = Vec::new();
        let mut eps0_err = f64::NAN;
        for (idx, &eps) in eps_grid.iter().enumerate() {
            let pot = PotentialSpec::bump(eps, false);
            let prob = SeparatedProblem::with_potential(nu, 60, &cfg, &pot, 400).unwrap();
            let set = dense_eig(&prob).unwrap();
            let nearest = set
                .pairs
                .iter()
                .map(|p| p.omega)
                .min_by(|a, b| {
                    (a - tracked)
                        .norm()
                        .partial_cmp(&(b - tracked).norm())
                        .unwrap()
                })
                .unwrap();
            if idx == 0 {
                eps0_err = (nearest - start).norm();
            }
            tracked = nearest;
            ims.push(nearest.im.abs());
        }
        let monotone = ims.windows(2).all(|w| w[1] < w[0]);
        checks.push((
            eps0_err < 1e-8 && monotone,
            format!(
                "nu={nu}: eps=0 err {eps0_err:.2e}, |Im| path {}",
                ims.iter()
                    .map(|v| format!("{v:.4}"))
                    .collect::<Vec<_>>()
                    .join(">")
            ),
        ));
    }

    gate(7, &checks);
}

#[test]
fn criterion_8_condition_number_growth() {
    let mut checks = Vec::new();
    let cfg = ScalingConfig::new(c(0.3, 0.3), 1.0).unwrap();
    let omega = omega_probe();
    let lambda = omega * omega;

    let kappa_max = |dofs: usize| -> f64 {
        let mut worst = 0.0f64;
        for nu in 0..=12usize {
            let prob = SeparatedProblem::homogeneous(nu, dofs - 1, &cfg).unwrap();
            let a = prob.stiffness.sub_scaled(&prob.mass, lambda);
            worst = worst.max(condition_number(&a).unwrap());
        }
        worst
    };

    let k60 = kappa_max(60);
    checks.push((
        (1e4..=1e6).contains(&k60),
        format!("kappa at 60 DOF {k60:.3e} vs band [1e4,1e6]"),
    ));

    let ns: Vec<f64> = (1..=10).map(|k| (10 * k) as f64).collect();
    let ks: Vec<f64> = ns.iter().map(|&n| kappa_max(n as usize)).collect();
    let slope = log_log_slope(&ns, &ks);
    checks.push((slope < 3.0, format!("log-log growth slope {slope:.2}")));

    gate(8, &checks);
}

#[test]
fn criterion_9_solver_cross_validation() {
    let mut checks = Vec::new();

    let cases = [
        (1usize, 39usize, c(0.3, 0.3), c(1.05, -0.95), 30usize, 6usize),
        (2usize, 199usize, c(0.3, 0.3), c(3.0, -1.0), 120usize, 4usize),
    ];

    // Residuals are absolute (norm(S v - omega^2 M v) / norm(v)), so pairs at
    // the far end of the pencil spectrum sit on an eps*(|lambda|*norm(M))
    // floor that grows with dimension; the residual bound is checked on the
    // pairs the cross-validation actually reports (every Arnoldi pair and its
    // dense counterpart), plus the full dense set where the scale permits.
    let mut worst_resid = 0.0f64;
    for (nu, n_max, sigma, shift, k, n_wanted) in cases {
        let cfg = ScalingConfig::new(sigma, 1.0).unwrap();
        let prob = SeparatedProblem::homogeneous(nu, n_max, &cfg).unwrap();
        let dense = dense_eig(&prob).unwrap();
        let arn = shift_invert_arnoldi(&prob, shift, k, n_wanted, 1e-9).unwrap();

        let mut worst_gap = 0.0f64;
        for p in &arn.pairs {
            let near = dense
                .pairs
                .iter()
                .min_by(|a, b| {
                    (a.omega - p.omega)
                        .norm()
                        .partial_cmp(&(b.omega - p.omega).norm())
                        .unwrap()
                })
                .unwrap();
            worst_gap = worst_gap.max((near.omega - p.omega).norm() / (1.0 + p.omega.norm()));
            worst_resid = worst_resid.max(p.residual).max(near.residual);
        }
        if n_max + 1 <= 50 {
            for p in &dense.pairs {
                worst_resid = worst_resid.max(p.residual);
            }
        }
        checks.push((
            worst_gap < 1e-8,
            format!("dim {}: agreement gap {worst_gap:.2e}", n_max + 1),
        ));
    }
    checks.push((
        worst_resid < 1e-9,
        format!("max reported residual {worst_resid:.2e}"),
    ));

    gate(9, &checks);
}
