//! One-step methods and the integration driver.

mod steps;

pub mod presets;

pub use steps::{collocation_step, drg_step, implicit_midpoint_step};

use crate::error::{Error, Result};
use crate::geometry::ManifoldPoint;
use crate::gradients::{DiscreteGradient, SkewApprox, DEFAULT_NQ};
use crate::problems::Problem;
use crate::quadrature::CollocationTableau;

/// Fixed-point solver settings shared by all implicit steps.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverOptions {
    /// Stop when the ambient sup-norm update is at most this.
    pub fp_tol: f64,
    pub fp_max_iter: usize,
    /// Gauss–Legendre nodes for the collocation gradient averages.
    pub nq: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { fp_tol: 1e-14, fp_max_iter: 200, nq: DEFAULT_NQ }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.fp_tol > 0.0) {
            return Err(Error::InvalidArgument(format!("fp_tol must be positive, got {}", self.fp_tol)));
        }
        if self.fp_max_iter == 0 {
            return Err(Error::InvalidArgument("fp_max_iter must be at least 1".into()));
        }
        if self.nq == 0 {
            return Err(Error::InvalidArgument("nq must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StepOutcome {
    pub point: ManifoldPoint,
    /// Fixed-point sweeps used, summed over substeps.
    pub iterations: usize,
}

/// A DRG scheme: gradient, skew approximation and whether the argument roles
/// are swapped (the adjoint scheme).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DrgStep {
    pub gradient: DiscreteGradient,
    pub skew: SkewApprox,
    pub adjoint: bool,
}

impl DrgStep {
    pub fn new(gradient: DiscreteGradient, skew: SkewApprox) -> Self {
        Self { gradient, skew, adjoint: false }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum OneStepMethod {
    Drg(DrgStep),
    Collocation(CollocationTableau),
    /// Substeps applied in list order, substep `i` with step `γ_i h`.
    Composition(Vec<(OneStepMethod, f64)>),
    ImplicitMidpoint,
}

/// Tolerance on `|Σγ_i - 1|` for compositions.
pub const COMPOSITION_SUM_TOL: f64 = 1e-14;

impl OneStepMethod {
    pub fn drg(gradient: DiscreteGradient, skew: SkewApprox) -> Self {
        OneStepMethod::Drg(DrgStep::new(gradient, skew))
    }

    pub fn compose(parts: Vec<(OneStepMethod, f64)>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidArgument("empty composition".into()));
        }
        let sum: f64 = parts.iter().map(|(_, g)| g).sum();
        if (sum - 1.0).abs() > COMPOSITION_SUM_TOL {
            return Err(Error::InvalidArgument(format!(
                "composition coefficients sum to {sum}, not 1"
            )));
        }
        Ok(OneStepMethod::Composition(parts))
    }

    /// The adjoint method `ψ*_h = (ψ_{-h})⁻¹`.
    pub fn adjoint(&self) -> Result<Self> {
        match self {
            OneStepMethod::Drg(d) => Ok(OneStepMethod::Drg(DrgStep { adjoint: !d.adjoint, ..*d })),
            OneStepMethod::Composition(parts) => {
                let mut out = Vec::with_capacity(parts.len());
                for (m, g) in parts.iter().rev() {
                    out.push((m.adjoint()?, *g));
                }
                Ok(OneStepMethod::Composition(out))
            }
            OneStepMethod::ImplicitMidpoint => Ok(OneStepMethod::ImplicitMidpoint),
            OneStepMethod::Collocation(_) => {
                Err(Error::Unsupported("adjoint of a collocation method".into()))
            }
        }
    }

    /// Number of elementary steps per call.
    pub fn stages(&self) -> usize {
        match self {
            OneStepMethod::Composition(parts) => parts.iter().map(|(m, _)| m.stages()).sum(),
            _ => 1,
        }
    }

    /// Advances `u` by `h`. Negative `h` is allowed.
    pub fn step(
        &self,
        problem: &dyn Problem,
        opts: &SolverOptions,
        u: &ManifoldPoint,
        h: f64,
    ) -> Result<StepOutcome> {
        match self {
            OneStepMethod::Drg(d) => {
                drg_step(problem, &d.gradient, d.skew, d.adjoint, opts, u, h)
            }
            OneStepMethod::Collocation(tab) => collocation_step(problem, tab, opts, u, h),
            OneStepMethod::ImplicitMidpoint => implicit_midpoint_step(problem, opts, u, h),
            OneStepMethod::Composition(parts) => {
                let mut point = u.clone();
                let mut iterations = 0;
                for (m, g) in parts {
                    let o = m.step(problem, opts, &point, g * h)?;
                    point = o.point;
                    iterations += o.iterations;
                }
                Ok(StepOutcome { point, iterations })
            }
        }
    }
}

/// Output of [`integrate`]. On failure the record stops at the last
/// successful step and `failure` holds the error.
#[derive(Clone, Debug, PartialEq)]
pub struct RunRecord {
    pub times: Vec<f64>,
    pub states: Vec<ManifoldPoint>,
    pub energies: Vec<f64>,
    /// Solver sweeps for each step; one entry fewer than `times`.
    pub iterations: Vec<usize>,
    pub failure: Option<Error>,
}

impl RunRecord {
    /// `H(u_k) - H(u_0)` for every recorded step.
    pub fn energy_errors(&self) -> Vec<f64> {
        let h0 = self.energies.first().copied().unwrap_or(0.0);
        self.energies.iter().map(|e| e - h0).collect()
    }

    pub fn max_energy_drift(&self) -> f64 {
        self.energy_errors().iter().fold(0.0, |a, e| a.max(e.abs()))
    }

    pub fn last(&self) -> &ManifoldPoint {
        self.states.last().expect("record holds at least the initial state")
    }
}

/// Number of steps `N` with `N h = t_end`, within 1e-12 relative.
pub fn step_count(h: f64, t_end: f64) -> Result<usize> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::InvalidArgument(format!("h must be positive, got {h}")));
    }
    if !(t_end >= 0.0) || !t_end.is_finite() {
        return Err(Error::InvalidArgument(format!("t_end must be non-negative, got {t_end}")));
    }
    let ratio = t_end / h;
    let n = ratio.round();
    if (ratio - n).abs() > 1e-12 * ratio.max(1.0) {
        return Err(Error::InvalidArgument(format!(
            "t_end = {t_end} is not an integer multiple of h = {h}"
        )));
    }
    Ok(n as usize)
}

/// Applies `method` `t_end / h` times starting from `u0`.
pub fn integrate(
    method: &OneStepMethod,
    problem: &dyn Problem,
    opts: &SolverOptions,
    u0: &ManifoldPoint,
    h: f64,
    t_end: f64,
) -> Result<RunRecord> {
    opts.validate()?;
    let n = step_count(h, t_end)?;
    let m = problem.manifold();
    let u0 = m.point(u0.coords().to_vec())?;
    let mut rec = RunRecord {
        times: vec![0.0],
        energies: vec![problem.value(u0.coords())],
        states: vec![u0],
        iterations: Vec::with_capacity(n),
        failure: None,
    };
    for k in 1..=n {
        match method.step(problem, opts, rec.last(), h) {
            Ok(o) => {
                rec.times.push(k as f64 * h);
                rec.energies.push(problem.value(o.point.coords()));
                rec.states.push(o.point);
                rec.iterations.push(o.iterations);
            }
            Err(e) => {
                rec.failure = Some(e);
                break;
            }
        }
    }
    Ok(rec)
}
