use num_complex::Complex;
use rayon::prelude::*;
use serde_json::json;

use csie_core::approx::{exp_tail_error, hankel_best_approx_error, predicted_rates};
use csie_core::assembly::{
    assemble_mass0, assemble_mass1, assemble_stiffness, structure_report, PotentialSpec,
    ScalingConfig,
};
use csie_core::eig::{condition_number, dense_eig, shift_invert_arnoldi, SeparatedProblem};
use csie_core::hankel::{resonance_roots, SearchBox};
use csie_core::laguerre::{gauss_laguerre, phi_table};
use csie_core::pml::{assemble_pml, PmlConfig};

use crate::config::{
    cx, numeric_failure, ConditionSweepParams, Experiment, Failure, HankelErrorParams,
    MatrixStructureParams, PmlCompareParams, ProjectExpParams, RadialPotentialSweepParams,
    RatesOverlayParams, ResonanceConvergenceParams, C,
};

pub struct RunOutput {
    pub header: &'static str,
    pub rows: Vec<String>,
    pub quadrature: serde_json::Value,
}

fn f(x: f64) -> String {
    format!("{x:.16e}")
}

fn par_map<T, U, G>(tuples: &[T], g: G) -> Result<Vec<U>, Failure>
where
    T: Sync,
    U: Send,
    G: Fn(&T) -> Result<U, Failure> + Sync + Send,
{
    let results: Vec<Result<U, Failure>> = tuples.par_iter().map(g).collect();
    let mut out = Vec::with_capacity(results.len());
    for r in results {
        out.push(r?);
    }
    Ok(out)
}

pub fn run(exp: &Experiment) -> Result<RunOutput, Failure> {
    match exp {
        Experiment::ProjectExp(p) => project_exp(p),
        Experiment::HankelError(p) => hankel_error(p),
        Experiment::RatesOverlay(p) => rates_overlay(p),
        Experiment::ConditionSweep(p) => condition_sweep(p),
        Experiment::ResonanceConvergence(p) => resonance_convergence(p),
        Experiment::PmlCompare(p) => pml_compare(p),
        Experiment::RadialPotentialSweep(p) => radial_potential_sweep(p),
        Experiment::MatrixStructure(p) => matrix_structure(p),
    }
}

/// Tail error of projecting exp(-b x) onto the first n+1 basis functions,
/// once through the geometric closed form and once through quadrature
/// coefficients summed over a margin of trailing modes.
fn project_exp(p: &ProjectExpParams) -> Result<RunOutput, Failure> {
    let b = cx(p.b);
    let tuple = format!("b=({}, {})", p.b[0], p.b[1]);
    let rho = ((b - 1.0) / (b + 1.0)).norm();
    if !(rho < 1.0) {
        return Err(Failure::Numeric(format!(
            "coefficient ratio |(b-1)/(b+1)| = {rho} is not < 1 [at {tuple}]"
        )));
    }
    let margin = ((-13.0 * std::f64::consts::LN_10 / (2.0 * rho.ln())).ceil() as usize).max(150);
    if margin > 4000 {
        return Err(Failure::Numeric(format!(
            "profile decays too slowly: {margin} trailing modes would be needed [at {tuple}]"
        )));
    }
    let n_top = p.n_max + margin;
    let nodes = p.quad_nodes.max(n_top + 40);
    let rule = gauss_laguerre(nodes, 2.0).map_err(|e| numeric_failure(e, &tuple))?;
    let lifted = rule.exp_weights();
    let phis = phi_table(n_top, rule.nodes());
    let samples: Vec<C> = rule.nodes().iter().map(|&x| (-b.scale(x)).exp()).collect();
    let mut coeffs = Vec::with_capacity(n_top + 1);
    for row in &phis {
        let mut c = Complex::new(0.0, 0.0);
        for ((v, w), phi) in samples.iter().zip(&lifted).zip(row) {
            c += v.scale(w * phi);
        }
        coeffs.push(c.scale(2.0));
    }
    let mut tail_sq = vec![0.0f64; n_top + 2];
    for k in (0..=n_top).rev() {
        tail_sq[k] = tail_sq[k + 1] + coeffs[k].norm_sqr() * 0.5;
    }
    let mut rows = Vec::with_capacity(p.n_max + 1);
    for n in 0..=p.n_max {
        let closed = exp_tail_error(b, n).map_err(|e| numeric_failure(e, &tuple))?;
        let quad = tail_sq[n + 1].max(0.0).sqrt();
        rows.push(format!(
            "{},{},{},{},{},{}",
            f(p.b[0]),
            f(p.b[1]),
            p.quad_nodes,
            n,
            f(closed),
            f(quad)
        ));
    }
    Ok(RunOutput {
        header: "b_re,b_im,quad_nodes,n,error_closed_form,error_quadrature",
        rows,
        quadrature: json!({
            "gauss_laguerre_nodes": nodes,
            "weight_exponent": 2.0,
            "trailing_modes": margin,
        }),
    })
}

/// Best-approximation error of the outgoing radial solution over sigma,
/// radius and truncation order.
fn hankel_error(p: &HankelErrorParams) -> Result<RunOutput, Failure> {
    let omega = cx(p.omega);
    let mut tuples = Vec::new();
    for s in &p.sigma {
        for &r in &p.radius {
            for n in p.n_range.values() {
                tuples.push((*s, r, n));
            }
        }
    }
    let nu = p.nu;
    let rows = par_map(&tuples, |&(s, r, n)| {
        let tuple = format!("sigma=({}, {}), radius={}, nu={}, n={}", s[0], s[1], r, nu, n);
        let err = hankel_best_approx_error(nu, omega, cx(s), r, n)
            .map_err(|e| numeric_failure(e, &tuple))?;
        Ok(format!(
            "{},{},{},{},{},{},{},{}",
            f(p.omega[0]),
            f(p.omega[1]),
            f(s[0]),
            f(s[1]),
            f(r),
            nu,
            n,
            f(err)
        ))
    })?;
    let n_stop = p.n_range.stop;
    Ok(RunOutput {
        header: "omega_re,omega_im,sigma_re,sigma_im,radius,nu,n,error",
        rows,
        quadrature: json!({
            "gauss_laguerre_nodes_max": 2 * (n_stop + 190),
            "trailing_modes": 150,
            "node_doubling_check": true,
        }),
    })
}

/// Same error curve as hankel_error plus the two predicted bound terms with
/// constants anchored at the ends of the range: the algebraic term at the
/// first order, the exponential term at the last.
fn rates_overlay(p: &RatesOverlayParams) -> Result<RunOutput, Failure> {
    let omega = cx(p.omega);
    let sigma = cx(p.sigma);
    let ns = p.n_range.values();
    let errs: Vec<f64> = par_map(&ns, |&n| {
        let tuple = format!("nu={}, n={}", p.nu, n);
        hankel_best_approx_error(p.nu, omega, sigma, p.radius, n)
            .map_err(|err| numeric_failure(err, &tuple))
    })?;
    let unit = |n: usize| -> Result<(f64, f64), Failure> {
        let r = predicted_rates(p.nu, omega, sigma, p.radius, n, 1.0, 1.0)
            .map_err(|e| numeric_failure(e, &format!("nu={}, n={}", p.nu, n)))?;
        Ok((r.exp_term, r.alg_term))
    };
    let (_, alg_first) = unit(ns[0])?;
    let (exp_last, _) = unit(*ns.last().unwrap())?;
    let c2 = if alg_first > 0.0 { errs[0] / alg_first } else { 0.0 };
    let c1 = if exp_last > 0.0 { *errs.last().unwrap() / exp_last } else { 0.0 };
    let mut rows = Vec::with_capacity(ns.len());
    for (&n, &e) in ns.iter().zip(&errs) {
        let (eu, au) = unit(n)?;
        rows.push(format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            f(p.omega[0]),
            f(p.omega[1]),
            f(p.sigma[0]),
            f(p.sigma[1]),
            f(p.radius),
            p.nu,
            n,
            f(e),
            f(c1 * eu),
            f(c2 * au),
            f(c1 * eu + c2 * au)
        ));
    }
    Ok(RunOutput {
        header: "omega_re,omega_im,sigma_re,sigma_im,radius,nu,n,error,\
                 fitted_exp_term,fitted_alg_term,fitted_total",
        rows,
        quadrature: json!({
            "gauss_laguerre_nodes_max": 2 * (p.n_range.stop + 190),
            "trailing_modes": 150,
            "node_doubling_check": true,
        }),
    })
}

/// Spectral condition number of S - omega^2 M over mode number and matrix
/// size.
fn condition_sweep(p: &ConditionSweepParams) -> Result<RunOutput, Failure> {
    let cfg = ScalingConfig::new(cx(p.sigma), p.radius)
        .map_err(|e| Failure::Validation(e.to_string()))?;
    let lambda = cx(p.omega) * cx(p.omega);
    let mut tuples = Vec::new();
    for &nu in &p.nu_list {
        for n in p.n_range.values() {
            tuples.push((nu, n));
        }
    }
    let rows = par_map(&tuples, |&(nu, n)| {
        let tuple = format!("nu={nu}, n_dofs={n}");
        let prob =
            SeparatedProblem::homogeneous(nu, n - 1, &cfg).map_err(|e| numeric_failure(e, &tuple))?;
        let pencil = prob.stiffness.sub_scaled(&prob.mass, lambda);
        let kappa = condition_number(&pencil).map_err(|e| numeric_failure(e, &tuple))?;
        Ok(format!(
            "{},{},{},{},{},{},{},{}",
            f(p.sigma[0]),
            f(p.sigma[1]),
            f(p.omega[0]),
            f(p.omega[1]),
            f(p.radius),
            nu,
            n,
            f(kappa)
        ))
    })?;
    Ok(RunOutput {
        header: "sigma_re,sigma_im,omega_re,omega_im,radius,nu,n_dofs,kappa",
        rows,
        quadrature: json!({ "assembly": "closed_form" }),
    })
}

/// Shift-invert Arnoldi resonance nearest the shift, over matrix size.
fn resonance_convergence(p: &ResonanceConvergenceParams) -> Result<RunOutput, Failure> {
    let cfg = ScalingConfig::new(cx(p.sigma), p.radius)
        .map_err(|e| Failure::Validation(e.to_string()))?;
    let shift = cx(p.shift);
    let k = p.krylov_dim();
    let ns = p.n_range.values();
    let rows = par_map(&ns, |&n| {
        let tuple = format!("nu={}, n_dofs={n}, shift=({}, {})", p.nu, p.shift[0], p.shift[1]);
        let prob = SeparatedProblem::homogeneous(p.nu, n - 1, &cfg)
            .map_err(|e| numeric_failure(e, &tuple))?;
        let set = shift_invert_arnoldi(&prob, shift, k, p.n_wanted, p.tol)
            .map_err(|e| numeric_failure(e, &tuple))?;
        let pair = set
            .pairs
            .iter()
            .min_by(|a, b| {
                (a.omega - shift)
                    .norm()
                    .partial_cmp(&(b.omega - shift).norm())
                    .unwrap()
            })
            .ok_or_else(|| Failure::Numeric(format!("no eigenpairs returned [at {tuple}]")))?;
        Ok(format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            p.nu,
            f(p.sigma[0]),
            f(p.sigma[1]),
            f(p.radius),
            f(p.shift[0]),
            f(p.shift[1]),
            k,
            p.n_wanted,
            f(p.tol),
            n,
            f(pair.omega.re),
            f(pair.omega.im),
            f(pair.residual)
        ))
    })?;
    Ok(RunOutput {
        header: "nu,sigma_re,sigma_im,radius,shift_re,shift_im,krylov,n_wanted,tol,\
                 n_dofs,omega_re,omega_im,residual",
        rows,
        quadrature: json!({ "assembly": "closed_form" }),
    })
}

/// Distance of the computed spectrum to a reference resonance for the
/// truncated scaled layer against the radial basis, over truncation length
/// and mesh size.
fn pml_compare(p: &PmlCompareParams) -> Result<RunOutput, Failure> {
    let reference = cx(p.reference);
    let layer_cfg = ScalingConfig::new(cx(p.sigma), p.radius)
        .map_err(|e| Failure::Validation(e.to_string()))?;
    let radial_cfg = ScalingConfig::new(cx(p.radial_sigma), p.radius)
        .map_err(|e| Failure::Validation(e.to_string()))?;
    let none = PotentialSpec::none();

    enum Case {
        Layer { t: f64, n_elems: usize },
        Radial { n_dofs: usize },
    }
    let mut tuples = Vec::new();
    for &t in &p.t_values {
        for &ne in &p.n_elems_values {
            tuples.push(Case::Layer { t, n_elems: ne });
        }
    }
    for &n in &p.radial_n_values {
        tuples.push(Case::Radial { n_dofs: n });
    }

    let nearest = |prob: &SeparatedProblem<f64>, tuple: &str| -> Result<(usize, f64), Failure> {
        let set = dense_eig(prob).map_err(|e| numeric_failure(e, tuple))?;
        let err = set
            .pairs
            .iter()
            .map(|q| (q.omega - reference).norm())
            .fold(f64::INFINITY, f64::min);
        Ok((prob.dim(), err))
    };

    let rows = par_map(&tuples, |case| match case {
        Case::Layer { t, n_elems } => {
            let tuple = format!("method=truncated_layer, t={t}, order={}, n_elems={n_elems}", p.order);
            let pml = PmlConfig::new(*t, *n_elems, p.order, layer_cfg)
                .map_err(|e| numeric_failure(e, &tuple))?;
            let (s, m, _) =
                assemble_pml(&pml, p.nu, None).map_err(|e| numeric_failure(e, &tuple))?;
            let prob = SeparatedProblem::from_matrices(p.nu, s, m, &layer_cfg, &none)
                .map_err(|e| numeric_failure(e, &tuple))?;
            let (dofs, err) = nearest(&prob, &tuple)?;
            Ok(format!(
                "truncated_layer,{},{},{},{},{},{},{},{},{}",
                p.nu,
                f(p.sigma[0]),
                f(p.sigma[1]),
                f(p.radius),
                f(*t),
                p.order,
                n_elems,
                dofs,
                f(err)
            ))
        }
        Case::Radial { n_dofs } => {
            let tuple = format!("method=radial_basis, n_dofs={n_dofs}");
            let prob = SeparatedProblem::homogeneous(p.nu, n_dofs - 1, &radial_cfg)
                .map_err(|e| numeric_failure(e, &tuple))?;
            let (dofs, err) = nearest(&prob, &tuple)?;
            Ok(format!(
                "radial_basis,{},{},{},{},{},{},{},{},{}",
                p.nu,
                f(p.radial_sigma[0]),
                f(p.radial_sigma[1]),
                f(p.radius),
                f(0.0),
                0,
                0,
                dofs,
                f(err)
            ))
        }
    })?;
    Ok(RunOutput {
        header: "method,nu,sigma_re,sigma_im,radius,t,order,n_elems,dofs,error",
        rows,
        quadrature: json!({ "element_gauss_legendre_points": p.order + 2 }),
    })
}

/// Resonance branches of the inhomogeneous problem tracked from the
/// unperturbed resonance of largest real part as the amplitude grows.
fn radial_potential_sweep(p: &RadialPotentialSweepParams) -> Result<RunOutput, Failure> {
    let cfg = ScalingConfig::new(cx(p.sigma), p.radius)
        .map_err(|e| Failure::Validation(e.to_string()))?;
    let groups = par_map(&p.nu_list, |&nu| {
        let span = nu as f64;
        let tuple = format!("nu={nu}");
        let search = SearchBox::new(0.05, span + 8.0, -span - 5.0, -0.005)
            .map_err(|e| numeric_failure(e, &tuple))?;
        let roots = resonance_roots(nu, search).map_err(|e| numeric_failure(e, &tuple))?;
        let mut previous = roots
            .iter()
            .copied()
            .max_by(|a, b| a.re.partial_cmp(&b.re).unwrap())
            .ok_or_else(|| {
                Failure::Numeric(format!("no unperturbed resonance found [at {tuple}]"))
            })?;
        let mut rows = Vec::with_capacity(p.eps_values.len());
        for &eps in &p.eps_values {
            let tuple = format!("nu={nu}, eps_tilde={eps}");
            let pot = PotentialSpec::by_id(&p.potential, eps, p.scale_argument)
                .map_err(|e| numeric_failure(e, &tuple))?;
            let prob = SeparatedProblem::with_potential(nu, p.n_max, &cfg, &pot, p.n_nodes)
                .map_err(|e| numeric_failure(e, &tuple))?;
            let set = dense_eig(&prob).map_err(|e| numeric_failure(e, &tuple))?;
            let pair = set
                .pairs
                .iter()
                .min_by(|a, b| {
                    (a.omega - previous)
                        .norm()
                        .partial_cmp(&(b.omega - previous).norm())
                        .unwrap()
                })
                .ok_or_else(|| Failure::Numeric(format!("no eigenpairs returned [at {tuple}]")))?;
            previous = pair.omega;
            rows.push(format!(
                "{},{},{},{},{},{},{},{},{},{},{},{}",
                nu,
                f(p.sigma[0]),
                f(p.sigma[1]),
                f(p.radius),
                p.potential,
                p.scale_argument,
                f(eps),
                p.n_max,
                p.n_nodes,
                f(pair.omega.re),
                f(pair.omega.im),
                f(pair.residual)
            ));
        }
        Ok(rows)
    })?;
    let rows = groups.into_iter().flatten().collect();
    Ok(RunOutput {
        header: "nu,sigma_re,sigma_im,radius,potential,scale_argument,eps_tilde,n_max,\
                 n_nodes,omega_re,omega_im,residual",
        rows,
        quadrature: json!({ "gauss_laguerre_nodes": p.n_nodes }),
    })
}

/// Band structure of the assembled radial operators.
fn matrix_structure(p: &MatrixStructureParams) -> Result<RunOutput, Failure> {
    let cfg = ScalingConfig::new(cx(p.sigma), p.radius)
        .map_err(|e| Failure::Validation(e.to_string()))?;
    let tuple = format!("n_max={}", p.n_max);
    let mass0 = assemble_mass0(p.n_max, &cfg);
    let mass1 = assemble_mass1(p.n_max, &cfg).map_err(|e| numeric_failure(e, &tuple))?;
    let stiffness = assemble_stiffness(p.n_max, &cfg).map_err(|e| numeric_failure(e, &tuple))?;
    let mut rows = Vec::with_capacity(3);
    for (name, op) in [("mass0", &mass0), ("mass1", &mass1), ("stiffness", &stiffness)] {
        let info = structure_report(op, p.tol).map_err(|e| numeric_failure(e, &tuple))?;
        rows.push(format!(
            "{},{},{},{},{},{},{},{}",
            name,
            p.n_max + 1,
            f(p.sigma[0]),
            f(p.sigma[1]),
            f(p.radius),
            f(p.tol),
            info.bandwidth_detected,
            info.nnz_above_tol
        ));
    }
    Ok(RunOutput {
        header: "operator,dim,sigma_re,sigma_im,radius,tol,bandwidth,nnz_above_tol",
        rows,
        quadrature: json!({ "assembly": "closed_form" }),
    })
}

pub fn catalogue() -> String {
    let mut s = String::new();
    s.push_str("experiments (complex numbers are [re, im] pairs):\n\n");
    s.push_str(
        "project_exp\n  \
         tail error of projecting exp(-b x) onto the radial basis, closed form vs quadrature\n  \
         parameters: b (Re b > 0), n_max, quad_nodes (default 400)\n  \
         columns: b_re,b_im,quad_nodes,n,error_closed_form,error_quadrature\n\n",
    );
    s.push_str(
        "hankel_error\n  \
         best-approximation error of the outgoing radial solution\n  \
         parameters: omega, sigma (list), radius (list), nu (<= 12), \
         n_range {start, stop, step}; requires Im(sigma*omega) > 0\n  \
         columns: omega_re,omega_im,sigma_re,sigma_im,radius,nu,n,error\n\n",
    );
    s.push_str(
        "rates_overlay\n  \
         hankel_error curve plus the predicted exponential and algebraic bound terms, \
         anchored at the range ends\n  \
         parameters: omega, sigma, radius, nu (<= 12), n_range\n  \
         columns: ...,error,fitted_exp_term,fitted_alg_term,fitted_total\n\n",
    );
    s.push_str(
        "condition_sweep\n  \
         spectral condition number of S - omega^2 M\n  \
         parameters: sigma, omega, radius, nu_list, n_range (degrees of freedom)\n  \
         columns: sigma_re,sigma_im,omega_re,omega_im,radius,nu,n_dofs,kappa\n\n",
    );
    s.push_str(
        "resonance_convergence\n  \
         shift-invert Arnoldi resonance nearest the shift, over matrix size\n  \
         parameters: nu, sigma, radius (default 1), shift, n_range (degrees of freedom), \
         n_wanted (default 2), krylov (default max(40, 4 n_wanted)), tol (default 1e-9)\n  \
         columns: nu,sigma_re,sigma_im,radius,shift_re,shift_im,krylov,n_wanted,tol,\
         n_dofs,omega_re,omega_im,residual\n\n",
    );
    s.push_str(
        "pml_compare\n  \
         truncated scaled layer vs radial basis: distance of the spectrum to a \
         reference resonance\n  \
         parameters: nu, reference, sigma, radius (default 1), T via t_values (list), \
         order, n_elems range via n_elems_values (list), radial_sigma, radial_n_values (list)\n  \
         columns: method,nu,sigma_re,sigma_im,radius,t,order,n_elems,dofs,error\n\n",
    );
    s.push_str(
        "radial_potential_sweep\n  \
         resonance branches under a radial inhomogeneity, tracked from the unperturbed \
         resonance of largest real part\n  \
         parameters: nu_list (each >= 1), sigma, radius (default 1), eps_values \
         (increasing), n_max, n_nodes (default 400), potential (bump|constant|none), \
         scale_argument (default false)\n  \
         columns: nu,sigma_re,sigma_im,radius,potential,scale_argument,eps_tilde,n_max,\
         n_nodes,omega_re,omega_im,residual\n\n",
    );
    s.push_str(
        "matrix_structure\n  \
         detected band structure of the assembled radial operators\n  \
         parameters: sigma, radius, n_max, tol (default 1e-12)\n  \
         columns: operator,dim,sigma_re,sigma_im,radius,tol,bandwidth,nnz_above_tol\n",
    );
    s
}
