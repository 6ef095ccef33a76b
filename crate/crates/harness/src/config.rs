//! Strict JSON experiment configuration.
//!
//! A config is a flat JSON object. Unknown keys are rejected. Defaults:
//! `fp_tol = 1e-14`, `fp_max_iter = 200`, `nq = 16`, `norm = "ambient"`,
//! spinning top `inertia = [1, 2, 4]` and `initial = (-1, -1, 1)/√3`, spin
//! chain `spins = 5`, `angle = π/3`, `wavenumber = 2π/spins`,
//! `frame_a = (1, 2, -1)`, `frame_a_tilde = (2, 1, 4)` (both normalised).

use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};

use drg_core::integrators::step_count;
use drg_core::problems::ExactChainSolution;
use drg_core::{Oscillator, Problem, SolverOptions, SpinChain, SpinningTop};
use serde::Deserialize;

use crate::methods::{MethodId, MethodOptions};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("malformed config: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid `{key}`: {message}")]
    Invalid { key: &'static str, message: String },
}

fn invalid(key: &'static str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid { key, message: message.into() }
}

/// The document as written, before validation.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub problem: String,
    pub inertia: Option<[f64; 3]>,
    pub spins: Option<usize>,
    pub angle: Option<f64>,
    pub wavenumber: Option<f64>,
    pub frame_a: Option<[f64; 3]>,
    pub frame_a_tilde: Option<[f64; 3]>,
    pub initial: Option<Vec<f64>>,
    pub method: Option<String>,
    pub methods: Option<Vec<String>>,
    pub center: Option<String>,
    pub omega: Option<String>,
    pub nq: Option<usize>,
    pub stages: Option<usize>,
    pub fp_tol: Option<f64>,
    pub fp_max_iter: Option<usize>,
    pub h: Option<f64>,
    pub h_list: Option<Vec<f64>>,
    pub t_end: Option<f64>,
    pub reference: Option<String>,
    pub reference_stages: Option<usize>,
    pub reference_refinement: Option<f64>,
    pub norm: Option<String>,
    pub fit_floor: Option<f64>,
    pub initial_conditions: Option<Vec<Vec<f64>>>,
    pub fine_h: Option<f64>,
    pub coarse_h: Option<f64>,
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ProblemSpec {
    Top { inertia: [f64; 3] },
    Chain { spins: usize, exact: ExactChainSolution },
    Oscillator,
}

impl ProblemSpec {
    pub fn id(&self) -> &'static str {
        match self {
            ProblemSpec::Top { .. } => "top",
            ProblemSpec::Chain { .. } => "chain",
            ProblemSpec::Oscillator => "oscillator",
        }
    }

    pub fn build(&self) -> Box<dyn Problem> {
        match self {
            ProblemSpec::Top { inertia } => {
                Box::new(SpinningTop::new(*inertia).expect("inertia validated"))
            }
            ProblemSpec::Chain { spins, .. } => {
                Box::new(SpinChain::new(*spins).expect("spin count validated"))
            }
            ProblemSpec::Oscillator => Box::new(Oscillator::new()),
        }
    }

    /// Exact state at time `t`, when one is known.
    pub fn exact(&self, u0: &[f64], t: f64) -> Option<Vec<f64>> {
        match self {
            ProblemSpec::Chain { spins, exact } => {
                let chain = SpinChain::new(*spins).expect("spin count validated");
                Some(exact.state(&chain, t).into_coords())
            }
            ProblemSpec::Oscillator => Some(Oscillator::new().exact(u0, t).into_coords()),
            ProblemSpec::Top { .. } => None,
        }
    }

    fn default_initial(&self) -> Vec<f64> {
        match self {
            ProblemSpec::Top { .. } => {
                let a = 1.0 / 3f64.sqrt();
                vec![-a, -a, a]
            }
            ProblemSpec::Chain { .. } => self.exact(&[], 0.0).expect("chain has an exact solution"),
            ProblemSpec::Oscillator => vec![1.0, 0.0],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Reference {
    /// The problem's closed-form solution.
    Exact,
    /// Gauss collocation with `stages` stages at `min(h_list) / refinement`.
    Collocation { stages: usize, refinement: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Norm {
    Ambient,
    Riemannian,
}

impl Norm {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "ambient" => Some(Norm::Ambient),
            "riemannian" => Some(Norm::Riemannian),
            _ => None,
        }
    }
}

impl fmt::Display for Norm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Norm::Ambient => "ambient",
            Norm::Riemannian => "riemannian",
        })
    }
}

pub const DEFAULT_FIT_FLOOR: f64 = 5e-12;

/// A validated experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentSpec {
    pub problem: ProblemSpec,
    pub initial: Vec<f64>,
    /// Whether `initial` came from the config rather than the defaults.
    pub explicit_initial: bool,
    pub methods: Vec<MethodId>,
    pub method_options: MethodOptions,
    pub solver: SolverOptions,
    pub h: Option<f64>,
    pub h_list: Vec<f64>,
    pub t_end: Option<f64>,
    pub reference: Reference,
    pub norm: Norm,
    pub fit_floor: f64,
    pub initial_conditions: Vec<Vec<f64>>,
    pub fine_h: f64,
    pub coarse_h: f64,
    pub out: Option<PathBuf>,
}

fn positive(key: &'static str, v: f64) -> Result<f64, ConfigError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(invalid(key, format!("must be a positive number, got {v}")))
    }
}

fn normalised(key: &'static str, v: [f64; 3]) -> Result<[f64; 3], ConfigError> {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    if !(n > 0.0) || !n.is_finite() {
        return Err(invalid(key, "must be a nonzero finite vector"));
    }
    Ok([v[0] / n, v[1] / n, v[2] / n])
}

impl ExperimentSpec {
    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let raw: RawConfig = serde_json::from_str(text)?;
        Self::from_raw(raw)
    }

    pub fn from_raw(raw: RawConfig) -> Result<Self, ConfigError> {
        let problem = match raw.problem.as_str() {
            "top" => {
                let inertia = raw.inertia.unwrap_or([1.0, 2.0, 4.0]);
                SpinningTop::new(inertia).map_err(|e| invalid("inertia", e.to_string()))?;
                ProblemSpec::Top { inertia }
            }
            "chain" => {
                let spins = raw.spins.unwrap_or(5);
                SpinChain::new(spins).map_err(|e| invalid("spins", e.to_string()))?;
                let angle = raw.angle.unwrap_or(PI / 3.0);
                let wavenumber = raw.wavenumber.unwrap_or(2.0 * PI / spins as f64);
                let a = normalised("frame_a", raw.frame_a.unwrap_or([1.0, 2.0, -1.0]))?;
                let at =
                    normalised("frame_a_tilde", raw.frame_a_tilde.unwrap_or([2.0, 1.0, 4.0]))?;
                let exact = ExactChainSolution::new(angle, wavenumber, a, at)
                    .map_err(|e| invalid("frame_a_tilde", e.to_string()))?;
                ProblemSpec::Chain { spins, exact }
            }
            "oscillator" => ProblemSpec::Oscillator,
            other => {
                return Err(invalid(
                    "problem",
                    format!("unknown problem `{other}`; valid: top, chain, oscillator"),
                ))
            }
        };
        let chain_only = [
            ("spins", raw.spins.is_some()),
            ("angle", raw.angle.is_some()),
            ("wavenumber", raw.wavenumber.is_some()),
            ("frame_a", raw.frame_a.is_some()),
            ("frame_a_tilde", raw.frame_a_tilde.is_some()),
        ];
        for (key, set) in chain_only {
            if set && !matches!(problem, ProblemSpec::Chain { .. }) {
                return Err(invalid(key, "only applies to problem `chain`"));
            }
        }
        if raw.inertia.is_some() && !matches!(problem, ProblemSpec::Top { .. }) {
            return Err(invalid("inertia", "only applies to problem `top`"));
        }

        let manifold_check = |key: &'static str, coords: &[f64]| -> Result<Vec<f64>, ConfigError> {
            let p = problem.build();
            let m = p.manifold();
            if coords.len() != m.ambient_dim() {
                return Err(invalid(
                    key,
                    format!("expected {} coordinates, got {}", m.ambient_dim(), coords.len()),
                ));
            }
            m.project_point(coords)
                .map(|q| q.into_coords())
                .map_err(|e| invalid(key, e.to_string()))
        };
        let explicit_initial = raw.initial.is_some();
        let initial = match &raw.initial {
            Some(v) => manifold_check("initial", v)?,
            None => problem.default_initial(),
        };
        let initial_conditions = match &raw.initial_conditions {
            Some(list) => {
                list.iter().map(|v| manifold_check("initial_conditions", v)).collect::<Result<_, _>>()?
            }
            None => vec![initial.clone()],
        };

        let mut ids = Vec::new();
        if let Some(m) = &raw.method {
            ids.push(m.clone());
        }
        if let Some(ms) = &raw.methods {
            ids.extend(ms.iter().cloned());
        }
        let methods = ids
            .iter()
            .map(|s| MethodId::parse(s).map_err(|e| invalid("method", e)))
            .collect::<Result<Vec<_>, _>>()?;

        let solver = SolverOptions {
            fp_tol: positive("fp_tol", raw.fp_tol.unwrap_or(1e-14))?,
            fp_max_iter: raw.fp_max_iter.unwrap_or(200),
            nq: raw.nq.unwrap_or(drg_core::gradients::DEFAULT_NQ),
        };
        if solver.fp_max_iter == 0 {
            return Err(invalid("fp_max_iter", "must be at least 1"));
        }
        if solver.nq == 0 || solver.nq > drg_core::quadrature::MAX_QUADRATURE_NODES {
            return Err(invalid(
                "nq",
                format!("must be in 1..={}", drg_core::quadrature::MAX_QUADRATURE_NODES),
            ));
        }
        let method_options = MethodOptions::from_raw(&raw, solver.nq)?;

        let h = raw.h.map(|h| positive("h", h)).transpose()?;
        let h_list = raw.h_list.clone().unwrap_or_default();
        for (i, &x) in h_list.iter().enumerate() {
            positive("h_list", x)?;
            if i > 0 && x >= h_list[i - 1] {
                return Err(invalid("h_list", "must be strictly decreasing"));
            }
        }
        let t_end = raw.t_end;
        if let Some(t) = t_end {
            if !(t >= 0.0) || !t.is_finite() {
                return Err(invalid("t_end", format!("must be non-negative, got {t}")));
            }
            for (key, step) in
                h.iter().map(|&x| ("h", x)).chain(h_list.iter().map(|&x| ("h_list", x)))
            {
                step_count(step, t).map_err(|e| invalid(key, e.to_string()))?;
            }
        }

        let reference = match raw.reference.as_deref() {
            None | Some("auto") => match problem {
                ProblemSpec::Top { .. } => Reference::Collocation {
                    stages: raw.reference_stages.unwrap_or(4),
                    refinement: raw.reference_refinement.unwrap_or(100.0),
                },
                _ => Reference::Exact,
            },
            Some("exact") => {
                if matches!(problem, ProblemSpec::Top { .. }) {
                    return Err(invalid("reference", "the spinning top has no exact solution"));
                }
                Reference::Exact
            }
            Some("collocation") => Reference::Collocation {
                stages: raw.reference_stages.unwrap_or(4),
                refinement: raw.reference_refinement.unwrap_or(100.0),
            },
            Some(other) => {
                return Err(invalid(
                    "reference",
                    format!("unknown reference `{other}`; valid: auto, exact, collocation"),
                ))
            }
        };
        if let Reference::Collocation { stages, refinement } = reference {
            if !(1..=8).contains(&stages) {
                return Err(invalid("reference_stages", "must be in 1..=8"));
            }
            positive("reference_refinement", refinement)?;
        }

        let norm = match raw.norm.as_deref() {
            None => Norm::Ambient,
            Some(s) => Norm::parse(s)
                .ok_or_else(|| invalid("norm", format!("unknown norm `{s}`; valid: ambient, riemannian")))?,
        };

        Ok(Self {
            problem,
            initial,
            explicit_initial,
            methods,
            method_options,
            solver,
            h,
            h_list,
            t_end,
            reference,
            norm,
            fit_floor: positive("fit_floor", raw.fit_floor.unwrap_or(DEFAULT_FIT_FLOOR))?,
            initial_conditions,
            fine_h: positive("fine_h", raw.fine_h.unwrap_or(0.01))?,
            coarse_h: positive("coarse_h", raw.coarse_h.unwrap_or(1.0))?,
            out: raw.out,
        })
    }

    pub fn require_h(&self) -> Result<f64, ConfigError> {
        self.h.ok_or_else(|| invalid("h", "required for this study"))
    }

    pub fn require_t_end(&self) -> Result<f64, ConfigError> {
        self.t_end.ok_or_else(|| invalid("t_end", "required for this study"))
    }

    pub fn require_methods(&self) -> Result<&[MethodId], ConfigError> {
        if self.methods.is_empty() {
            Err(invalid("method", "at least one method is required"))
        } else {
            Ok(&self.methods)
        }
    }
}
