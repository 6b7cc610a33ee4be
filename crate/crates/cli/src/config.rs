use num_complex::Complex;
use serde::Deserialize;

pub type C = Complex<f64>;

pub fn cx(v: [f64; 2]) -> C {
    Complex::new(v[0], v[1])
}

/// Outcome of a CLI invocation that did not succeed; the variant picks the
/// process exit code.
#[derive(Debug)]
pub enum Failure {
    Io(String),
    Validation(String),
    Numeric(String),
}

impl Failure {
    pub fn code(&self) -> i32 {
        match self {
            Failure::Io(_) => 1,
            Failure::Validation(_) => 2,
            Failure::Numeric(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Io(m) | Failure::Validation(m) | Failure::Numeric(m) => m,
        }
    }
}

/// Maps a library error raised while computing one parameter tuple onto the
/// numeric exit path, keeping the tuple in the message.
pub fn numeric_failure(err: csie_core::Error, tuple: &str) -> Failure {
    Failure::Numeric(format!("{err} [at {tuple}]"))
}

pub const EXPERIMENT_NAMES: [&str; 8] = [
    "project_exp",
    "hankel_error",
    "rates_overlay",
    "condition_sweep",
    "resonance_convergence",
    "pml_compare",
    "radial_potential_sweep",
    "matrix_structure",
];

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: String,
    pub parameters: serde_json::Value,
    pub output_path: String,
}

/// Inclusive, strictly increasing integer range start..=stop by step.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NRange {
    pub start: usize,
    pub stop: usize,
    #[serde(default = "default_step")]
    pub step: usize,
}

fn default_step() -> usize {
    1
}

impl NRange {
    pub fn values(&self) -> Vec<usize> {
        (self.start..=self.stop).step_by(self.step.max(1)).collect()
    }

    fn check(&self, field: &str) -> Result<(), Failure> {
        if self.step == 0 {
            return Err(invalid(field, "step must be at least 1"));
        }
        if self.stop < self.start {
            return Err(invalid(
                field,
                &format!("empty range: stop = {} < start = {}", self.stop, self.start),
            ));
        }
        Ok(())
    }
}

fn invalid(field: &str, why: &str) -> Failure {
    Failure::Validation(format!("parameters.{field}: {why}"))
}

fn require_scaling(sigma: [f64; 2], radius: f64, field: &str) -> Result<(), Failure> {
    if !(sigma[1] > 0.0) {
        return Err(invalid(
            field,
            &format!("Im(sigma) = {} must be positive", sigma[1]),
        ));
    }
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(invalid("radius", "interface radius must be positive"));
    }
    Ok(())
}

fn require_decaying_weight(sigma: [f64; 2], omega: [f64; 2], field: &str) -> Result<(), Failure> {
    let w = cx(sigma) * cx(omega);
    if !(w.im > 0.0) {
        return Err(invalid(
            field,
            &format!(
                "Im(sigma*omega) = {:e} <= 0, so the scaled radial profile does not decay; \
                 pick sigma with Im(sigma * omega) > 0",
                w.im
            ),
        ));
    }
    Ok(())
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProjectExpParams {
    pub b: [f64; 2],
    pub n_max: usize,
    #[serde(default = "default_quad_nodes")]
    pub quad_nodes: usize,
}

fn default_quad_nodes() -> usize {
    400
}

impl ProjectExpParams {
    fn validate(&self) -> Result<(), Failure> {
        if !(self.b[0] > 0.0) {
            return Err(invalid("b", "Re(b) must be positive for a decaying profile"));
        }
        if self.quad_nodes < 2 {
            return Err(invalid("quad_nodes", "need at least 2 quadrature nodes"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HankelErrorParams {
    pub omega: [f64; 2],
    pub sigma: Vec<[f64; 2]>,
    pub radius: Vec<f64>,
    pub nu: usize,
    pub n_range: NRange,
}

impl HankelErrorParams {
    fn validate(&self) -> Result<(), Failure> {
        if self.sigma.is_empty() {
            return Err(invalid("sigma", "need at least one scaling factor"));
        }
        if self.radius.is_empty() {
            return Err(invalid("radius", "need at least one interface radius"));
        }
        for (i, s) in self.sigma.iter().enumerate() {
            require_decaying_weight(*s, self.omega, &format!("sigma[{i}]"))?;
        }
        for (i, r) in self.radius.iter().enumerate() {
            if !(*r > 0.0) {
                return Err(invalid(&format!("radius[{i}]"), "must be positive"));
            }
        }
        if self.nu > 12 {
            return Err(invalid("nu", "supported range is nu <= 12"));
        }
        self.n_range.check("n_range")
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RatesOverlayParams {
    pub omega: [f64; 2],
    pub sigma: [f64; 2],
    pub radius: f64,
    pub nu: usize,
    pub n_range: NRange,
}

impl RatesOverlayParams {
    fn validate(&self) -> Result<(), Failure> {
        require_decaying_weight(self.sigma, self.omega, "sigma")?;
        if !(self.radius > 0.0) {
            return Err(invalid("radius", "must be positive"));
        }
        if self.nu > 12 {
            return Err(invalid("nu", "supported range is nu <= 12"));
        }
        self.n_range.check("n_range")?;
        if self.n_range.values().len() < 2 {
            return Err(invalid(
                "n_range",
                "rate fitting needs at least two truncation orders",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConditionSweepParams {
    pub sigma: [f64; 2],
    pub omega: [f64; 2],
    pub radius: f64,
    pub nu_list: Vec<usize>,
    pub n_range: NRange,
}

impl ConditionSweepParams {
    fn validate(&self) -> Result<(), Failure> {
        require_scaling(self.sigma, self.radius, "sigma")?;
        if self.nu_list.is_empty() {
            return Err(invalid("nu_list", "need at least one mode number"));
        }
        self.n_range.check("n_range")?;
        if self.n_range.start < 1 {
            return Err(invalid("n_range", "entries count degrees of freedom, so start >= 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResonanceConvergenceParams {
    pub nu: usize,
    pub sigma: [f64; 2],
    #[serde(default = "default_radius")]
    pub radius: f64,
    pub shift: [f64; 2],
    pub n_range: NRange,
    #[serde(default = "default_n_wanted")]
    pub n_wanted: usize,
    #[serde(default)]
    pub krylov: Option<usize>,
    #[serde(default = "default_tol")]
    pub tol: f64,
}

fn default_radius() -> f64 {
    1.0
}

fn default_n_wanted() -> usize {
    2
}

fn default_tol() -> f64 {
    1e-9
}

impl ResonanceConvergenceParams {
    pub fn krylov_dim(&self) -> usize {
        self.krylov.unwrap_or_else(|| 40.max(4 * self.n_wanted))
    }

    fn validate(&self) -> Result<(), Failure> {
        require_scaling(self.sigma, self.radius, "sigma")?;
        if self.n_wanted < 1 {
            return Err(invalid("n_wanted", "must be at least 1"));
        }
        if self.krylov_dim() <= self.n_wanted {
            return Err(invalid("krylov", "Krylov dimension must exceed n_wanted"));
        }
        if !(self.tol > 0.0) {
            return Err(invalid("tol", "must be positive"));
        }
        self.n_range.check("n_range")?;
        if self.n_range.start <= self.n_wanted {
            return Err(invalid(
                "n_range",
                "entries count degrees of freedom and must exceed n_wanted",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PmlCompareParams {
    pub nu: usize,
    pub reference: [f64; 2],
    pub sigma: [f64; 2],
    #[serde(default = "default_radius")]
    pub radius: f64,
    pub t_values: Vec<f64>,
    pub order: usize,
    pub n_elems_values: Vec<usize>,
    pub radial_sigma: [f64; 2],
    pub radial_n_values: Vec<usize>,
}

impl PmlCompareParams {
    fn validate(&self) -> Result<(), Failure> {
        require_scaling(self.sigma, self.radius, "sigma")?;
        require_scaling(self.radial_sigma, self.radius, "radial_sigma")?;
        if self.t_values.is_empty() {
            return Err(invalid("t_values", "need at least one truncation length"));
        }
        for (i, t) in self.t_values.iter().enumerate() {
            if !(*t > 0.0) {
                return Err(invalid(&format!("t_values[{i}]"), "must be positive"));
            }
        }
        if self.order < 1 {
            return Err(invalid("order", "element order must be at least 1"));
        }
        if self.n_elems_values.is_empty() {
            return Err(invalid("n_elems_values", "need at least one element count"));
        }
        for (i, ne) in self.n_elems_values.iter().enumerate() {
            if *ne < 1 {
                return Err(invalid(&format!("n_elems_values[{i}]"), "must be at least 1"));
            }
        }
        if self.radial_n_values.is_empty() {
            return Err(invalid("radial_n_values", "need at least one dof count"));
        }
        for (i, n) in self.radial_n_values.iter().enumerate() {
            if *n < 1 {
                return Err(invalid(&format!("radial_n_values[{i}]"), "must be at least 1"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadialPotentialSweepParams {
    pub nu_list: Vec<usize>,
    pub sigma: [f64; 2],
    #[serde(default = "default_radius")]
    pub radius: f64,
    pub eps_values: Vec<f64>,
    pub n_max: usize,
    #[serde(default = "default_quad_nodes")]
    pub n_nodes: usize,
    #[serde(default = "default_potential")]
    pub potential: String,
    #[serde(default)]
    pub scale_argument: bool,
}

fn default_potential() -> String {
    "bump".into()
}

impl RadialPotentialSweepParams {
    fn validate(&self) -> Result<(), Failure> {
        require_scaling(self.sigma, self.radius, "sigma")?;
        if self.nu_list.is_empty() {
            return Err(invalid("nu_list", "need at least one mode number"));
        }
        for (i, nu) in self.nu_list.iter().enumerate() {
            if *nu < 1 {
                return Err(invalid(
                    &format!("nu_list[{i}]"),
                    "branch tracking starts from a resonance of the unperturbed problem, \
                     and nu = 0 has none below the real axis",
                ));
            }
        }
        if self.eps_values.is_empty() {
            return Err(invalid("eps_values", "need at least one amplitude"));
        }
        for w in self.eps_values.windows(2) {
            if w[1] <= w[0] {
                return Err(invalid("eps_values", "amplitudes must be strictly increasing"));
            }
        }
        if self.eps_values[0] < 0.0 {
            return Err(invalid("eps_values", "amplitudes must be nonnegative"));
        }
        if !matches!(self.potential.as_str(), "bump" | "constant" | "none") {
            return Err(invalid(
                "potential",
                &format!("unknown profile {:?}; known: bump, constant, none", self.potential),
            ));
        }
        if self.n_nodes < 2 {
            return Err(invalid("n_nodes", "need at least 2 quadrature nodes"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixStructureParams {
    pub sigma: [f64; 2],
    pub radius: f64,
    pub n_max: usize,
    #[serde(default = "default_structure_tol")]
    pub tol: f64,
}

fn default_structure_tol() -> f64 {
    1e-12
}

impl MatrixStructureParams {
    fn validate(&self) -> Result<(), Failure> {
        require_scaling(self.sigma, self.radius, "sigma")?;
        if !(self.tol > 0.0) {
            return Err(invalid("tol", "must be positive"));
        }
        Ok(())
    }
}

/// A parsed and validated experiment, ready to dispatch.
#[derive(Debug, Clone)]
pub enum Experiment {
    ProjectExp(ProjectExpParams),
    HankelError(HankelErrorParams),
    RatesOverlay(RatesOverlayParams),
    ConditionSweep(ConditionSweepParams),
    ResonanceConvergence(ResonanceConvergenceParams),
    PmlCompare(PmlCompareParams),
    RadialPotentialSweep(RadialPotentialSweepParams),
    MatrixStructure(MatrixStructureParams),
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::ProjectExp(_) => "project_exp",
            Experiment::HankelError(_) => "hankel_error",
            Experiment::RatesOverlay(_) => "rates_overlay",
            Experiment::ConditionSweep(_) => "condition_sweep",
            Experiment::ResonanceConvergence(_) => "resonance_convergence",
            Experiment::PmlCompare(_) => "pml_compare",
            Experiment::RadialPotentialSweep(_) => "radial_potential_sweep",
            Experiment::MatrixStructure(_) => "matrix_structure",
        }
    }
}

fn params<T: serde::de::DeserializeOwned>(
    name: &str,
    value: &serde_json::Value,
) -> Result<T, Failure> {
    serde_json::from_value(value.clone())
        .map_err(|e| Failure::Validation(format!("parameters ({name}): {e}")))
}

pub fn parse_config(text: &str) -> Result<(ExperimentConfig, Experiment), Failure> {
    let cfg: ExperimentConfig = serde_json::from_str(text)
        .map_err(|e| Failure::Validation(format!("config: {e}")))?;
    if cfg.output_path.is_empty() {
        return Err(Failure::Validation("output_path: must not be empty".into()));
    }
    let exp = match cfg.experiment.as_str() {
        "project_exp" => {
            let p: ProjectExpParams = params(&cfg.experiment, &cfg.parameters)?;
            p.validate()?;
            Experiment::ProjectExp(p)
        }
        "hankel_error" => {
            let p: HankelErrorParams = params(&cfg.experiment, &cfg.parameters)?;
            p.validate()?;
            Experiment::HankelError(p)
        }
        "rates_overlay" => {
            let p: RatesOverlayParams = params(&cfg.experiment, &cfg.parameters)?;
            p.validate()?;
            Experiment::RatesOverlay(p)
        }
        "condition_sweep" => {
            let p: ConditionSweepParams = params(&cfg.experiment, &cfg.parameters)?;
            p.validate()?;
            Experiment::ConditionSweep(p)
        }
        "resonance_convergence" => {
            let p: ResonanceConvergenceParams = params(&cfg.experiment, &cfg.parameters)?;
            p.validate()?;
            Experiment::ResonanceConvergence(p)
        }
        "pml_compare" => {
            let p: PmlCompareParams = params(&cfg.experiment, &cfg.parameters)?;
            p.validate()?;
            Experiment::PmlCompare(p)
        }
        "radial_potential_sweep" => {
            let p: RadialPotentialSweepParams = params(&cfg.experiment, &cfg.parameters)?;
            p.validate()?;
            Experiment::RadialPotentialSweep(p)
        }
        "matrix_structure" => {
            let p: MatrixStructureParams = params(&cfg.experiment, &cfg.parameters)?;
            p.validate()?;
            Experiment::MatrixStructure(p)
        }
        other => {
            return Err(Failure::Validation(format!(
                "experiment: unknown name {other:?}; valid names: {}",
                EXPERIMENT_NAMES.join(", ")
            )));
        }
    };
    Ok((cfg, exp))
}
