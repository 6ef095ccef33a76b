//! The four experiments: single runs, order studies, energy-drift studies
//! and level-curve studies.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use drg_core::integrators::{integrate, presets};
use drg_core::{Error, ManifoldPoint, Problem, RunRecord};
use rayon::prelude::*;

use crate::config::{ExperimentSpec, Norm, ProblemSpec, Reference};
use crate::csvio::{self, OrderRow};
use crate::methods::MethodId;

fn build(spec: &ExperimentSpec, id: MethodId) -> Result<drg_core::OneStepMethod> {
    id.build(&spec.method_options).with_context(|| format!("building method `{id}`"))
}

fn start(problem: &dyn Problem, coords: &[f64]) -> Result<ManifoldPoint> {
    Ok(problem.manifold().point(coords.to_vec())?)
}

pub struct RunOutput {
    pub label: String,
    pub record: RunRecord,
}

/// Integrates the single configured method from `initial` with step `h`.
pub fn run(spec: &ExperimentSpec) -> Result<RunOutput> {
    let ids = spec.require_methods()?;
    if ids.len() != 1 {
        bail!("`run` takes exactly one method, got {}", ids.len());
    }
    let (h, t_end) = (spec.require_h()?, spec.require_t_end()?);
    let problem = spec.problem.build();
    let method = build(spec, ids[0])?;
    let u0 = start(problem.as_ref(), &spec.initial)?;
    let record = integrate(&method, problem.as_ref(), &spec.solver, &u0, h, t_end)?;
    Ok(RunOutput { label: ids[0].label(&spec.method_options), record })
}

/// Writes the trajectory; a failed integration still writes the rows it
/// has and is then reported as an error.
pub fn save_run(out: &RunOutput, path: &Path) -> Result<()> {
    csvio::write_trajectory(path, &out.record)?;
    if let Some(e) = &out.record.failure {
        bail!(
            "{} failed after t = {}: {e}",
            out.label,
            out.record.times.last().copied().unwrap_or(0.0)
        );
    }
    Ok(())
}

pub fn error_between(problem: &dyn Problem, norm: Norm, a: &[f64], b: &[f64]) -> f64 {
    match norm {
        Norm::Ambient => a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt(),
        Norm::Riemannian => problem
            .manifold()
            .distance(&ManifoldPoint::new(a.to_vec()), &ManifoldPoint::new(b.to_vec())),
    }
}

/// The state the order study compares against at `t_end`.
pub fn reference_state(spec: &ExperimentSpec, problem: &dyn Problem, t_end: f64) -> Result<Vec<f64>> {
    match spec.reference {
        Reference::Exact => {
            if matches!(spec.problem, ProblemSpec::Chain { .. }) && spec.explicit_initial {
                bail!("`initial` cannot be set with the exact chain reference; it fixes the initial state");
            }
            spec.problem
                .exact(&spec.initial, t_end)
                .with_context(|| format!("problem `{}` has no exact solution", spec.problem.id()))
        }
        Reference::Collocation { stages, refinement } => {
            let h_min = spec.h_list.iter().copied().fold(f64::INFINITY, f64::min);
            let h_ref = h_min / refinement;
            let method = presets::collocation(stages)?;
            let u0 = start(problem, &spec.initial)?;
            let rec = integrate(&method, problem, &spec.solver, &u0, h_ref, t_end)
                .context("reference step size")?;
            if let Some(e) = rec.failure {
                bail!("reference integration failed: {e}");
            }
            Ok(rec.last().coords().to_vec())
        }
    }
}

/// Least-squares slope of `ln err` against `ln h` over the rows whose error
/// in `norm` is finite and above `floor`. NaN when fewer than two remain.
pub fn fit_slope(rows: &[OrderRow], norm: Norm, floor: f64) -> f64 {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| (r.h, if norm == Norm::Ambient { r.err_ambient } else { r.err_riemannian }))
        .filter(|(_, e)| e.is_finite() && *e > floor)
        .map(|(h, e)| (h.ln(), e.ln()))
        .collect();
    if pts.len() < 2 {
        return f64::NAN;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

#[derive(Clone, Debug)]
pub struct OrderSeries {
    pub label: String,
    pub rows: Vec<OrderRow>,
    /// Step sizes whose integration failed, with the error.
    pub failures: Vec<(f64, Error)>,
    pub slope: f64,
}

/// Error at `t_end` for every configured method and every `h` in `h_list`.
pub fn order(spec: &ExperimentSpec) -> Result<Vec<OrderSeries>> {
    let ids = spec.require_methods()?.to_vec();
    let t_end = spec.require_t_end()?;
    if spec.h_list.is_empty() {
        bail!("invalid `h_list`: required for the order study");
    }
    let problem = spec.problem.build();
    let reference = reference_state(spec, problem.as_ref(), t_end)?;
    let methods = ids.iter().map(|&id| build(spec, id)).collect::<Result<Vec<_>>>()?;
    let u0 = start(problem.as_ref(), &spec.initial)?;

    let jobs: Vec<(usize, f64)> =
        (0..ids.len()).flat_map(|m| spec.h_list.iter().map(move |&h| (m, h))).collect();
    let results: Vec<Result<Vec<f64>, Error>> = jobs
        .par_iter()
        .map(|&(m, h)| {
            let rec = integrate(&methods[m], problem.as_ref(), &spec.solver, &u0, h, t_end)?;
            match rec.failure {
                Some(e) => Err(e),
                None => Ok(rec.last().coords().to_vec()),
            }
        })
        .collect();

    let mut out = Vec::with_capacity(ids.len());
    for (m, id) in ids.iter().enumerate() {
        let mut rows = Vec::new();
        let mut failures = Vec::new();
        for ((_, h), res) in jobs.iter().zip(&results).filter(|((j, _), _)| *j == m) {
            match res {
                Ok(x) => rows.push(OrderRow {
                    h: *h,
                    err_ambient: error_between(problem.as_ref(), Norm::Ambient, x, &reference),
                    err_riemannian: error_between(problem.as_ref(), Norm::Riemannian, x, &reference),
                }),
                Err(e) => {
                    rows.push(OrderRow { h: *h, err_ambient: f64::NAN, err_riemannian: f64::NAN });
                    failures.push((*h, e.clone()));
                }
            }
        }
        let slope = fit_slope(&rows, spec.norm, spec.fit_floor);
        out.push(OrderSeries { label: id.label(&spec.method_options), rows, failures, slope });
    }
    Ok(out)
}

/// One file for a single method; a directory of `<label>.csv` otherwise.
pub fn save_order(series: &[OrderSeries], out: &Path) -> Result<Vec<PathBuf>> {
    let paths: Vec<PathBuf> = if series.len() == 1 {
        vec![out.to_path_buf()]
    } else {
        series.iter().map(|s| out.join(format!("{}.csv", s.label))).collect()
    };
    for (s, p) in series.iter().zip(&paths) {
        csvio::write_order(p, &s.rows, s.slope)?;
    }
    Ok(paths)
}

#[derive(Clone, Debug)]
pub struct DriftOutput {
    pub times: Vec<f64>,
    /// `H(u_k) - H(u_0)` per method, NaN after a failure.
    pub columns: Vec<(String, Vec<f64>)>,
    pub failures: Vec<(String, Error)>,
    /// Largest `| |s_i| - 1 |` over all recorded states, per method.
    pub sphere_deviation: Vec<(String, f64)>,
}

/// Energy error against time for several methods sharing `h` and `t_end`.
pub fn drift(spec: &ExperimentSpec) -> Result<DriftOutput> {
    let ids = spec.require_methods()?.to_vec();
    let (h, t_end) = (spec.require_h()?, spec.require_t_end()?);
    let problem = spec.problem.build();
    let methods = ids.iter().map(|&id| build(spec, id)).collect::<Result<Vec<_>>>()?;
    let u0 = start(problem.as_ref(), &spec.initial)?;
    let n = drg_core::integrators::step_count(h, t_end)?;
    let records = methods
        .par_iter()
        .map(|m| integrate(m, problem.as_ref(), &spec.solver, &u0, h, t_end))
        .collect::<Result<Vec<_>, _>>()?;

    let times: Vec<f64> = (0..=n).map(|k| k as f64 * h).collect();
    let mut out = DriftOutput {
        times,
        columns: Vec::new(),
        failures: Vec::new(),
        sphere_deviation: Vec::new(),
    };
    for (id, rec) in ids.iter().zip(records) {
        let label = id.label(&spec.method_options);
        let mut col = rec.energy_errors();
        col.resize(n + 1, f64::NAN);
        let dev = rec
            .states
            .iter()
            .map(|s| problem.manifold().constraint_violation(s.coords()))
            .fold(0.0, f64::max);
        out.sphere_deviation.push((label.clone(), dev));
        if let Some(e) = rec.failure {
            out.failures.push((label.clone(), e));
        }
        out.columns.push((label, col));
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct LevelPair {
    /// Symmetrized Itoh–Abe at `fine_h`.
    pub fine: RunRecord,
    /// Itoh–Abe at `coarse_h`.
    pub coarse: RunRecord,
}

/// Fine SIA and coarse IA trajectories for each initial condition.
pub fn levels(spec: &ExperimentSpec) -> Result<Vec<LevelPair>> {
    if !matches!(spec.problem, ProblemSpec::Top { .. }) {
        bail!("the level-curve study needs problem `top`");
    }
    let t_end = spec.require_t_end()?;
    let problem = spec.problem.build();
    let (fine, coarse) = (presets::sia(), presets::ia());
    spec.initial_conditions
        .par_iter()
        .map(|ic| {
            let u0 = start(problem.as_ref(), ic)?;
            let f = integrate(&fine, problem.as_ref(), &spec.solver, &u0, spec.fine_h, t_end)
                .context("fine_h")?;
            let c = integrate(&coarse, problem.as_ref(), &spec.solver, &u0, spec.coarse_h, t_end)
                .context("coarse_h")?;
            Ok(LevelPair { fine: f, coarse: c })
        })
        .collect()
}

/// Writes `ic<k>_sia.csv` and `ic<k>_ia.csv` into `dir`.
pub fn save_levels(pairs: &[LevelPair], dir: &Path) -> Result<Vec<PathBuf>> {
    let mut paths = Vec::new();
    for (k, p) in pairs.iter().enumerate() {
        for (rec, name) in [(&p.fine, "sia"), (&p.coarse, "ia")] {
            let path = dir.join(format!("ic{k}_{name}.csv"));
            csvio::write_trajectory(&path, rec)?;
            if let Some(e) = &rec.failure {
                bail!("initial condition {k}, {name}: {e}");
            }
            paths.push(path);
        }
    }
    Ok(paths)
}
