use crate::error::{Error, Result};
use crate::geometry::{ManifoldPoint, TangentVector};
use crate::gradients::{riemannian_gradient, DiscreteGradient, SkewApprox};
use crate::linalg::{axpy, sup_dist};
use crate::problems::Problem;
use crate::quadrature::{gauss_legendre, CollocationTableau};

use super::{SolverOptions, StepOutcome};

/// One step of the DRG scheme
///
/// `v = φ_c(φ_c⁻¹(u) + h Ω̄(u, v) ḡ(u, v))`, `c = c(u, v)`,
///
/// by fixed-point iteration from `v = u`. With `adjoint` set the roles of
/// `u` and `v` are swapped inside `ḡ`, `Ω̄` and `c`.
pub fn drg_step(
    problem: &dyn Problem,
    gradient: &DiscreteGradient,
    skew: SkewApprox,
    adjoint: bool,
    opts: &SolverOptions,
    u: &ManifoldPoint,
    h: f64,
) -> Result<StepOutcome> {
    let m = problem.manifold();
    if h == 0.0 {
        return Ok(StepOutcome { point: u.clone(), iterations: 0 });
    }
    let mut v = u.clone();
    let mut update = f64::INFINITY;
    for it in 1..=opts.fp_max_iter {
        let (a, b) = if adjoint { (&v, u) } else { (u, &v) };
        let c = gradient.center.center(m, a, b)?;
        let g = gradient.evaluate_at(problem, &c, a, b)?;
        let y = skew.apply(problem, &c, a, b, &g)?;
        let mut w = m.inverse_retract(&c, u)?;
        axpy(h, &y.comps, &mut w.comps);
        let next = m.retract(&w)?;
        update = sup_dist(next.coords(), v.coords());
        v = next;
        if update <= opts.fp_tol {
            return Ok(StepOutcome { point: v, iterations: it });
        }
    }
    Err(Error::NonConvergence { iterations: opts.fp_max_iter, update })
}

/// One step of the energy-preserving collocation-like method with center
/// `c = u0`. The unknowns are the stage slopes `f_j ∈ T_cM`; the tangent
/// curve is `σ(τh) = φ_c⁻¹(u0) + h Σ_j (∫₀^τ l_j) f_j`.
pub fn collocation_step(
    problem: &dyn Problem,
    tab: &CollocationTableau,
    opts: &SolverOptions,
    u0: &ManifoldPoint,
    h: f64,
) -> Result<StepOutcome> {
    let m = problem.manifold();
    if h == 0.0 {
        return Ok(StepOutcome { point: u0.clone(), iterations: 0 });
    }
    let c = u0;
    let x0 = m.inverse_retract(c, u0)?.comps;
    let n = x0.len();
    let s = tab.stages();
    let (qn, qw) = gauss_legendre(opts.nq)?;
    // σ at the quadrature nodes needs ∫₀^ξ_q l_k; the averaging weights are
    // w_q l_j(ξ_q) / b_j
    let q_int: Vec<Vec<f64>> =
        qn.iter().map(|&xi| (0..s).map(|k| tab.integrated(k, xi)).collect()).collect();
    let avg_w: Vec<Vec<f64>> = (0..s)
        .map(|j| {
            qn.iter()
                .zip(&qw)
                .map(|(&xi, &w)| w * tab.lagrange(j, xi) / tab.weights()[j])
                .collect()
        })
        .collect();

    let sigma = |coeffs: &[f64], f: &[Vec<f64>]| -> Vec<f64> {
        let mut x = x0.clone();
        for (a, fk) in coeffs.iter().zip(f) {
            axpy(h * a, fk, &mut x);
        }
        x
    };

    let mut f = vec![vec![0.0; n]; s];
    let mut update = f64::INFINITY;
    for it in 1..=opts.fp_max_iter {
        // pulled-back gradients at the quadrature points
        let mut pulled = Vec::with_capacity(qn.len());
        for coeffs in &q_int {
            let x = TangentVector::new(c.clone(), sigma(coeffs, &f));
            let p = m.retract(&x)?;
            let g = riemannian_gradient(problem, m, &p)?;
            pulled.push(m.tangent_map_transpose(&x, &g)?.comps);
        }
        let mut next = Vec::with_capacity(s);
        for j in 0..s {
            let x = TangentVector::new(c.clone(), sigma(&tab.stage_coeffs()[j], &f));
            let big_u = m.retract(&x)?;
            let mut avg = vec![0.0; n];
            for (w, pq) in avg_w[j].iter().zip(&pulled) {
                axpy(*w, pq, &mut avg);
            }
            let avg = TangentVector::new(c.clone(), avg);
            let grad_j = m.inverse_tangent_map_transpose(c, &big_u, &avg)?;
            let om = m.project(&big_u, &problem.omega(&big_u, &grad_j.comps))?;
            next.push(m.inverse_tangent_map(c, &om)?.comps);
        }
        update = next
            .iter()
            .zip(&f)
            .map(|(a, b)| h.abs() * sup_dist(a, b))
            .fold(0.0, f64::max);
        f = next;
        if update <= opts.fp_tol {
            let x = TangentVector::new(c.clone(), sigma(tab.weights(), &f));
            return Ok(StepOutcome { point: m.retract(&x)?, iterations: it });
        }
    }
    Err(Error::NonConvergence { iterations: opts.fp_max_iter, update })
}

/// Classical implicit midpoint rule `v = u + h F((u + v)/2)` in ambient
/// coordinates. No projection is applied.
pub fn implicit_midpoint_step(
    problem: &dyn Problem,
    opts: &SolverOptions,
    u: &ManifoldPoint,
    h: f64,
) -> Result<StepOutcome> {
    if h == 0.0 {
        return Ok(StepOutcome { point: u.clone(), iterations: 0 });
    }
    let x = u.coords();
    let mut v = x.to_vec();
    let mut update = f64::INFINITY;
    for it in 1..=opts.fp_max_iter {
        let mid: Vec<f64> = x.iter().zip(&v).map(|(a, b)| 0.5 * (a + b)).collect();
        let mut next = x.to_vec();
        axpy(h, &problem.field(&mid), &mut next);
        update = sup_dist(&next, &v);
        v = next;
        if update <= opts.fp_tol {
            return Ok(StepOutcome { point: ManifoldPoint::new(v), iterations: it });
        }
    }
    Err(Error::NonConvergence { iterations: opts.fp_max_iter, update })
}
