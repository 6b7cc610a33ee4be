//! Randomized invariant checks across the public surface.

use csie_core::approx::{exp_tail_error, laplace_coefficient, predicted_rates, project_exp,
    project_general};
use csie_core::assembly::{PotentialSpec, ScalingConfig};
use csie_core::eig::{dense_eig, SeparatedProblem};
use csie_core::hankel::{alpha, resonance_roots, SearchBox};
use csie_core::laguerre::{gauss_laguerre, phi_block};
use csie_core::pml::{assemble_pml, PmlConfig};
use num_complex::Complex;
use proptest::prelude::*;

type C = Complex<f64>;

fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

proptest! {
    #[test]
    fn parseval_holds_for_exponential_projections(
        re in 0.05f64..4.0,
        im in -4.0f64..4.0,
        n_max in 0usize..40,
    ) {
        let b = c(re, im);
        let proj = project_exp(b, n_max).unwrap();
        let captured: f64 = proj.coefficients.iter().map(|v| 0.5 * v.norm_sqr()).sum();
        let total = captured + proj.tail_error.powi(2);
        let want = 1.0 / (2.0 * re);
        prop_assert!(
            (total - want).abs() <= 1e-9 * want,
            "captured+tail^2 = {total}, norm^2 = {want}"
        );
    }

    #[test]
    fn projection_coefficients_match_the_laplace_formula(
        re in 0.05f64..4.0,
        im in -4.0f64..4.0,
    ) {
        let b = c(re, im);
        let proj = project_exp(b, 60).unwrap();
        let scale = proj.coefficients.iter().map(|v| v.norm()).fold(0.0, f64::max);
        for (n, &cf) in proj.coefficients.iter().enumerate() {
            let want = laplace_coefficient(b, n).unwrap().scale(2.0);
            prop_assert!(
                (cf - want).norm() <= 1e-11 * scale,
                "n = {n}: {cf} vs {want}"
            );
        }
    }

    #[test]
    fn tail_error_is_monotone_in_the_cutoff(
        re in 0.05f64..4.0,
        im in -4.0f64..4.0,
        n_max in 0usize..50,
    ) {
        let b = c(re, im);
        let coarse = exp_tail_error(b, n_max).unwrap();
        let fine = exp_tail_error(b, n_max + 1).unwrap();
        prop_assert!(fine <= coarse * (1.0 + 1e-12), "{fine} > {coarse}");
    }

    #[test]
    fn quadrature_reproduces_monomial_moments(
        exponent in 0.5f64..4.0,
        m in 0usize..=15,
    ) {
        let rule = gauss_laguerre::<f64>(40, exponent).unwrap();
        let got = rule.integrate(|x| c(x.powi(m as i32), 0.0)).re;
        let want = (1..=m).map(|k| k as f64).product::<f64>() / exponent.powi(m as i32 + 1);
        prop_assert!((got - want).abs() <= 1e-12 * want, "m = {m}: {got} vs {want}");
    }

    #[test]
    fn rate_terms_depend_only_on_their_own_parameters(
        s_re in 0.05f64..1.0,
        s_im in 0.05f64..1.0,
        om_re in 1.0f64..12.0,
        om_im in -0.9f64..0.0,
        r1 in 0.1f64..4.0,
        r2 in 0.1f64..4.0,
        nu in 0usize..=8,
        n in 0usize..=80,
    ) {
        let sigma = c(s_re, s_im);
        let omega = c(om_re, om_im);
        prop_assume!((sigma * omega).im > 0.0);
        let a = predicted_rates(nu, omega, sigma, r1, n, 1.0, 1.0).unwrap();
        let b = predicted_rates(nu, omega, sigma, r2, n, 1.0, 1.0).unwrap();
        prop_assert_eq!(a.exp_term, b.exp_term);
        let other = c(om_re + 1.0, om_im - 0.2);
        prop_assume!((sigma * other).im > 0.0);
        let d = predicted_rates(nu, other, sigma, r1, n, 1.0, 1.0).unwrap();
        prop_assert_eq!(a.alg_term, d.alg_term);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn general_projection_recovers_planted_coefficients(
        planted in prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 1..=6),
    ) {
        let coeffs: Vec<C> = planted.iter().map(|&(re, im)| c(re, im)).collect();
        let scale = coeffs.iter().map(|v| v.norm()).fold(1.0, f64::max);
        let rule = gauss_laguerre::<f64>(64, 2.0).unwrap();
        let deg = coeffs.len() - 1;
        let f = |x: f64| -> C {
            let phis = phi_block(deg, x);
            coeffs
                .iter()
                .zip(&phis)
                .map(|(a, &p)| a.scale(p))
                .fold(c(0.0, 0.0), |acc, v| acc + v)
        };
        let proj = project_general(f, 8, &rule).unwrap();
        for n in 0..=8usize {
            let want = if n <= deg { coeffs[n] } else { c(0.0, 0.0) };
            prop_assert!(
                (proj.coefficients[n] - want).norm() <= 1e-10 * scale,
                "n = {n}: {} vs {want}",
                proj.coefficients[n]
            );
        }
        prop_assert!(proj.tail_error <= 1e-7 * scale, "tail {}", proj.tail_error);
    }

    #[test]
    fn alpha_commutes_with_conjugation(
        re in 0.2f64..3.0,
        im in 0.05f64..3.0,
        n in 0usize..=60,
    ) {
        let a = c(re, im);
        let plus = alpha(n, 1, a).unwrap();
        let minus = alpha(n, 1, a.conj()).unwrap();
        prop_assert!(
            (minus - plus.conj()).norm() <= 1e-10 * plus.norm(),
            "alpha({n}, {a}) = {plus} vs conj-route {minus}"
        );
    }

    #[test]
    fn truncated_layer_matrices_stay_complex_symmetric(
        s_re in -0.3f64..0.8,
        s_im in 0.1f64..1.2,
        t_len in 1.0f64..6.0,
        n_elems in 1usize..=4,
        order in 1usize..=4,
        nu in 0usize..=3,
    ) {
        let cfg = ScalingConfig::new(c(s_re, s_im), 1.0).unwrap();
        let pml = PmlConfig::new(t_len, n_elems, order, cfg).unwrap();
        let (s, m, trace) = assemble_pml(&pml, nu, None).unwrap();
        let dim = s.rows();
        let tol = 1e-12 * s.max_abs().max(m.max_abs());
        for i in 0..dim {
            for j in 0..i {
                prop_assert!((s[(i, j)] - s[(j, i)]).norm() <= tol);
                prop_assert!((m[(i, j)] - m[(j, i)]).norm() <= tol);
            }
        }
        prop_assert_eq!(trace.len(), dim);
        prop_assert_eq!(trace[0], c(1.0, 0.0));
        prop_assert!(trace[1..].iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn polynomial_roots_stay_inside_the_requested_box(
        nu in 0usize..=4,
        re_min in 0.05f64..0.5,
        re_len in 1.5f64..7.5,
        im_max in -0.1f64..-0.01,
        im_len in 1.9f64..3.9,
    ) {
        let bx = SearchBox::new(re_min, re_min + re_len, im_max - im_len, im_max).unwrap();
        let roots = resonance_roots::<f64>(nu, bx).unwrap();
        for r in &roots {
            prop_assert!(bx.contains(*r), "{r} escaped the box");
        }
        for w in roots.windows(2) {
            prop_assert!(w[0].re <= w[1].re || (w[0].re == w[1].re && w[0].im <= w[1].im));
            prop_assert!((w[1] - w[0]).norm() > 1e-9 * (1.0 + w[0].norm()));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn dense_spectra_live_on_the_principal_branch(
        nu in 0usize..=3,
        n_max in 6usize..=14,
        s_re in 0.1f64..0.8,
        s_im in 0.1f64..0.8,
        eps in 0.0f64..1.0,
    ) {
        let cfg = ScalingConfig::new(c(s_re, s_im), 1.0).unwrap();
        let pot = PotentialSpec::bump(eps, false);
        let prob = SeparatedProblem::with_potential(nu, n_max, &cfg, &pot, 200).unwrap();
        let set = dense_eig(&prob).unwrap();
        prop_assert!(!set.pairs.is_empty());
        for p in &set.pairs {
            prop_assert!(
                p.omega.re >= 0.0 || p.omega.re.abs() <= 1e-12 * p.omega.norm(),
                "omega = {} off the principal branch",
                p.omega
            );
        }
    }
}
