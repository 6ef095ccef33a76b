//! First integrals, Riemannian gradients, skew operators and discrete
//! Riemannian gradients (DRGs).
//!
//! A DRG of `H` is a map `(u, v) ↦ ḡ(u, v) ∈ T_cM`, `c = c(u, v)`, with
//!
//! ```text
//! H(v) - H(u) = g(ḡ(u, v), φ_c⁻¹(v) - φ_c⁻¹(u))      (secant identity)
//! ḡ(u, u)     = grad H(u)                             (consistency)
//! ```
//!
//! Every gradient returned here is tangent at the center `c`.

use crate::error::{Error, Result};
use crate::geometry::{CenterFunction, Manifold, ManifoldPoint, TangentVector};
use crate::linalg::{axpy, dot, sub};
use crate::problems::{Problem, SpinChain};
use crate::quadrature::gauss_legendre;

/// A smooth scalar function on the ambient space whose restriction to the
/// manifold is conserved by the flow.
pub trait FirstIntegral {
    fn value(&self, u: &[f64]) -> f64;

    /// Euclidean gradient in ambient coordinates.
    fn ambient_gradient(&self, u: &[f64]) -> Vec<f64>;

    /// `H(a + δ) - H(a)`. Implementations should avoid the cancellation of
    /// the naive difference when `δ` is small; divided differences of `H`
    /// depend on it.
    fn increment(&self, a: &[f64], delta: &[f64]) -> f64 {
        let b: Vec<f64> = a.iter().zip(delta).map(|(x, d)| x + d).collect();
        self.value(&b) - self.value(a)
    }
}

/// Tangent projection of the ambient gradient.
pub fn riemannian_gradient(
    h: &dyn FirstIntegral,
    m: &dyn Manifold,
    u: &ManifoldPoint,
) -> Result<TangentVector> {
    m.project(u, &h.ambient_gradient(u.coords()))
}

/// Threshold on `g(grad H, grad H)` below which [`omega_from_field`] refuses
/// to divide.
pub const CRITICAL_POINT_THRESHOLD: f64 = 1e-14;

/// The skew operator built from a vector field with first integral `H`:
///
/// `Ω y = [g(grad H, y) F - g(F, y) grad H] / g(grad H, grad H)`.
pub fn omega_from_field(
    field: &dyn Fn(&[f64]) -> Vec<f64>,
    h: &dyn FirstIntegral,
    m: &dyn Manifold,
    u: &ManifoldPoint,
    y: &TangentVector,
) -> Result<TangentVector> {
    let grad = riemannian_gradient(h, m, u)?;
    let f = m.project(u, &field(u.coords()))?;
    let gg = m.metric(&grad, &grad)?;
    if gg <= CRITICAL_POINT_THRESHOLD {
        return Err(Error::CriticalPoint { norm_sq: gg });
    }
    let a = m.metric(&grad, y)? / gg;
    let b = m.metric(&f, y)? / gg;
    let mut out = vec![0.0; f.comps.len()];
    axpy(a, &f.comps, &mut out);
    axpy(-b, &grad.comps, &mut out);
    Ok(TangentVector::new(u.clone(), out))
}

/// Two-point approximation `Ω̄(u, v)` of the skew operator, acting on `T_cM`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SkewApprox {
    /// `Ω(u)`, sandwiched between tangent projections onto `T_cM`.
    AtLeft,
    /// `Ω(c(u, v))`.
    AtCenter,
    /// `T_Uφ_c⁻¹ Ω(U) (T_Uφ_c⁻¹)ᵀ` at the path point
    /// `U = φ_c((1-θ) φ_c⁻¹(u) + θ φ_c⁻¹(v))`, `θ = fraction`.
    PulledBack { fraction: f64 },
}

impl SkewApprox {
    /// Applies `Ω̄(u, v)` to `y ∈ T_cM` where `c` is the step center.
    pub fn apply(
        &self,
        problem: &dyn Problem,
        c: &ManifoldPoint,
        u: &ManifoldPoint,
        v: &ManifoldPoint,
        y: &TangentVector,
    ) -> Result<TangentVector> {
        let m = problem.manifold();
        match *self {
            SkewApprox::AtLeft => {
                let z = m.project(u, &m.project(c, &y.comps)?.comps)?;
                let w = problem.omega(u, &z.comps);
                let w = m.project(u, &w)?;
                m.project(c, &w.comps)
            }
            SkewApprox::AtCenter => {
                let z = m.project(c, &y.comps)?;
                m.project(c, &problem.omega(c, &z.comps))
            }
            SkewApprox::PulledBack { fraction } => {
                let xu = m.inverse_retract(c, u)?;
                let xv = m.inverse_retract(c, v)?;
                let mut x = vec![0.0; xu.comps.len()];
                axpy(1.0 - fraction, &xu.comps, &mut x);
                axpy(fraction, &xv.comps, &mut x);
                let big_u = m.retract(&TangentVector::new(c.clone(), x))?;
                let z = m.inverse_tangent_map_transpose(c, &big_u, y)?;
                let w = m.project(&big_u, &problem.omega(&big_u, &z.comps))?;
                m.inverse_tangent_map(c, &w)
            }
        }
    }

    /// Whether `Ω̄(u, v) = Ω̄(v, u)` when paired with a symmetric center.
    pub fn is_symmetric(&self) -> bool {
        match *self {
            SkewApprox::AtLeft => false,
            SkewApprox::AtCenter => true,
            SkewApprox::PulledBack { fraction } => fraction == 0.5,
        }
    }
}

/// `Ω̄(u, v) y` with the center taken from `cf`.
pub fn omega_bar(
    problem: &dyn Problem,
    tag: SkewApprox,
    cf: CenterFunction,
    u: &ManifoldPoint,
    v: &ManifoldPoint,
    y: &TangentVector,
) -> Result<TangentVector> {
    let c = cf.center(problem.manifold(), u, v)?;
    tag.apply(problem, &c, u, v, y)
}

/// Which discrete Riemannian gradient to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DrgKind {
    /// Average vector field with an `nq`-node Gauss–Legendre rule.
    Avf { nq: usize },
    Midpoint,
    ItohAbe,
    SymmetrizedItohAbe,
    /// Spin-chain specific modified midpoint gradient.
    ModifiedMidpoint,
}

pub const DEFAULT_NQ: usize = 16;

/// A discrete Riemannian gradient: kind plus center function. The retraction
/// is the one carried by the problem's manifold.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DiscreteGradient {
    pub kind: DrgKind,
    pub center: CenterFunction,
}

impl DiscreteGradient {
    pub fn new(kind: DrgKind, center: CenterFunction) -> Self {
        Self { kind, center }
    }

    pub fn evaluate(
        &self,
        problem: &dyn Problem,
        u: &ManifoldPoint,
        v: &ManifoldPoint,
    ) -> Result<TangentVector> {
        let c = self.center.center(problem.manifold(), u, v)?;
        self.evaluate_at(problem, &c, u, v)
    }

    /// Evaluates with a precomputed center `c = c(u, v)`.
    pub fn evaluate_at(
        &self,
        problem: &dyn Problem,
        c: &ManifoldPoint,
        u: &ManifoldPoint,
        v: &ManifoldPoint,
    ) -> Result<TangentVector> {
        let m = problem.manifold();
        match self.kind {
            DrgKind::Avf { nq } => avf_at(problem, m, nq, c, u, v),
            DrgKind::Midpoint => midpoint_at(problem, m, c, u, v),
            DrgKind::ItohAbe => {
                let basis = m.orthonormal_basis(c);
                itoh_abe_at(problem, m, c, &basis, u, v)
            }
            DrgKind::SymmetrizedItohAbe => symmetrized_ia_at(problem, m, c, u, v),
            DrgKind::ModifiedMidpoint => {
                let chain = problem.as_spin_chain().ok_or_else(|| {
                    Error::Unsupported("modified midpoint gradient needs a spin chain".into())
                })?;
                if self.center != CenterFunction::ChordalMidpoint {
                    return Err(Error::Unsupported(
                        "modified midpoint gradient uses the chordal-midpoint center".into(),
                    ));
                }
                mmp_at(chain, c, u, v)
            }
        }
    }

    /// Whether `ḡ(u, v) = ḡ(v, u)` and `c(u, v) = c(v, u)`.
    pub fn is_symmetric(&self) -> bool {
        self.center.is_symmetric() && !matches!(self.kind, DrgKind::ItohAbe)
    }
}

/// AVF gradient `∫₀¹ (T_γφ_c)ᵀ grad H(φ_c(γ_ξ)) dξ` along the straight line
/// `γ_ξ = (1-ξ) φ_c⁻¹(u) + ξ φ_c⁻¹(v)`, by `nq`-point Gauss–Legendre.
pub fn drg_avf(
    h: &dyn FirstIntegral,
    m: &dyn Manifold,
    cf: CenterFunction,
    nq: usize,
    u: &ManifoldPoint,
    v: &ManifoldPoint,
) -> Result<TangentVector> {
    let c = cf.center(m, u, v)?;
    avf_at(h, m, nq, &c, u, v)
}

fn avf_at(
    h: &dyn FirstIntegral,
    m: &dyn Manifold,
    nq: usize,
    c: &ManifoldPoint,
    u: &ManifoldPoint,
    v: &ManifoldPoint,
) -> Result<TangentVector> {
    let (nodes, weights) = gauss_legendre(nq)?;
    let xu = m.inverse_retract(c, u)?;
    let xv = m.inverse_retract(c, v)?;
    let mut acc = vec![0.0; xu.comps.len()];
    for (&xi, &w) in nodes.iter().zip(&weights) {
        let mut gamma = vec![0.0; acc.len()];
        axpy(1.0 - xi, &xu.comps, &mut gamma);
        axpy(xi, &xv.comps, &mut gamma);
        let gamma = TangentVector::new(c.clone(), gamma);
        let p = m.retract(&gamma)?;
        let grad = riemannian_gradient(h, m, &p)?;
        let pulled = m.tangent_map_transpose(&gamma, &grad)?;
        axpy(w, &pulled.comps, &mut acc);
    }
    Ok(TangentVector::new(c.clone(), acc))
}

/// Below this value of `g(η, η)` the midpoint gradient returns its
/// continuous limit `grad H(c)`.
pub const MIDPOINT_DEGENERACY: f64 = 1e-14;

/// Midpoint (Gonzalez-type) gradient:
/// `grad H(c) + [(H(v) - H(u) - g(grad H(c), η)) / g(η, η)] η`,
/// `η = φ_c⁻¹(v) - φ_c⁻¹(u)`.
pub fn drg_midpoint(
    h: &dyn FirstIntegral,
    m: &dyn Manifold,
    cf: CenterFunction,
    u: &ManifoldPoint,
    v: &ManifoldPoint,
) -> Result<TangentVector> {
    let c = cf.center(m, u, v)?;
    midpoint_at(h, m, &c, u, v)
}

fn midpoint_at(
    h: &dyn FirstIntegral,
    m: &dyn Manifold,
    c: &ManifoldPoint,
    u: &ManifoldPoint,
    v: &ManifoldPoint,
) -> Result<TangentVector> {
    let xu = m.inverse_retract(c, u)?;
    let xv = m.inverse_retract(c, v)?;
    let eta = TangentVector::new(c.clone(), sub(&xv.comps, &xu.comps));
    let mut grad = riemannian_gradient(h, m, c)?;
    let ee = m.metric(&eta, &eta)?;
    if ee <= MIDPOINT_DEGENERACY {
        return Ok(grad);
    }
    let num = h.value(v.coords()) - h.value(u.coords()) - m.metric(&grad, &eta)?;
    axpy(num / ee, &eta.comps, &mut grad.comps);
    Ok(grad)
}

/// Below this magnitude an Itoh–Abe increment `α_j` is treated as zero and
/// the directional derivative replaces the divided difference.
pub const ITOH_ABE_ZERO_INCREMENT: f64 = 1e-12;

/// Itoh–Abe gradient along the orthonormal basis of `T_cM`.
pub fn drg_itoh_abe(
    h: &dyn FirstIntegral,
    m: &dyn Manifold,
    cf: CenterFunction,
    u: &ManifoldPoint,
    v: &ManifoldPoint,
) -> Result<TangentVector> {
    let c = cf.center(m, u, v)?;
    let basis = m.orthonormal_basis(&c);
    itoh_abe_at(h, m, &c, &basis, u, v)
}

fn itoh_abe_at(
    h: &dyn FirstIntegral,
    m: &dyn Manifold,
    c: &ManifoldPoint,
    basis: &[TangentVector],
    u: &ManifoldPoint,
    v: &ManifoldPoint,
) -> Result<TangentVector> {
    let xu = m.inverse_retract(c, u)?;
    let xv = m.inverse_retract(c, v)?;
    let diff = sub(&xv.comps, &xu.comps);

    // w_j is accumulated from increments w_j - w_{j-1} computed without
    // cancellation, so that a_j keeps full relative accuracy for small α_j
    let mut eta = xu;
    let mut w = u.coords().to_vec();
    let mut out = vec![0.0; diff.len()];
    for e in basis {
        let alpha = dot(&diff, &e.comps);
        let step: Vec<f64> = e.comps.iter().map(|x| alpha * x).collect();
        let a = if alpha.abs() > ITOH_ABE_ZERO_INCREMENT {
            let dw = m.retract_increment(&eta, &step)?;
            let a = h.increment(&w, &dw) / alpha;
            axpy(1.0, &dw, &mut w);
            a
        } else {
            let wp = ManifoldPoint::new(w.clone());
            let grad = riemannian_gradient(h, m, &wp)?;
            let dir = m.tangent_map(&eta, e)?;
            if alpha != 0.0 {
                axpy(1.0, &m.retract_increment(&eta, &step)?, &mut w);
            }
            dot(&grad.comps, &dir.comps)
        };
        axpy(1.0, &step, &mut eta.comps);
        axpy(a, &e.comps, &mut out);
    }
    Ok(TangentVector::new(c.clone(), out))
}

/// `½ (IA(u, v) + IA(v, u))`, both halves at the same center and basis.
pub fn drg_symmetrized_ia(
    h: &dyn FirstIntegral,
    m: &dyn Manifold,
    cf: CenterFunction,
    u: &ManifoldPoint,
    v: &ManifoldPoint,
) -> Result<TangentVector> {
    let c = cf.center(m, u, v)?;
    symmetrized_ia_at(h, m, &c, u, v)
}

fn symmetrized_ia_at(
    h: &dyn FirstIntegral,
    m: &dyn Manifold,
    c: &ManifoldPoint,
    u: &ManifoldPoint,
    v: &ManifoldPoint,
) -> Result<TangentVector> {
    let basis = m.orthonormal_basis(c);
    let forward = itoh_abe_at(h, m, c, &basis, u, v)?;
    let backward = itoh_abe_at(h, m, c, &basis, v, u)?;
    let comps = forward
        .comps
        .iter()
        .zip(&backward.comps)
        .map(|(a, b)| 0.5 * (a + b))
        .collect();
    Ok(TangentVector::new(c.clone(), comps))
}

/// Modified midpoint gradient of the spin chain. Block `i` is
///
/// `c_{i-1} + c_{i+1} + [(s̃_iᵀs̃_{i-1} - s_iᵀs_{i-1} - (c_{i-1}+c_{i+1})ᵀη_i) / η_iᵀη_i] η_i`
///
/// with chordal-midpoint centers `c_i` and `η_i = -2 φ_{c_i}⁻¹(s_i)`,
/// projected onto `T_{c_i}S²`.
pub fn drg_mmp_spin_chain(
    chain: &SpinChain,
    u: &ManifoldPoint,
    v: &ManifoldPoint,
) -> Result<TangentVector> {
    let c = chain.manifold().chordal_midpoint(u, v)?;
    mmp_at(chain, &c, u, v)
}

fn mmp_at(
    chain: &SpinChain,
    c: &ManifoldPoint,
    u: &ManifoldPoint,
    v: &ManifoldPoint,
) -> Result<TangentVector> {
    let m = chain.manifold();
    let xu = m.inverse_retract(c, u)?;
    let (s, st, cc) = (u.coords(), v.coords(), c.coords());
    let blk = |a: &[f64], i: usize| -> [f64; 3] { [a[3 * i], a[3 * i + 1], a[3 * i + 2]] };
    let mut out = Vec::with_capacity(s.len());
    for i in 0..chain.spins() {
        let (ip, inx) = (chain.prev(i), chain.next(i));
        let (cp, cn) = (blk(cc, ip), blk(cc, inx));
        let nb = [cp[0] + cn[0], cp[1] + cn[1], cp[2] + cn[2]];
        let x = blk(&xu.comps, i);
        let eta = [-2.0 * x[0], -2.0 * x[1], -2.0 * x[2]];
        let ee = dot(&eta, &eta);
        let mut g = nb;
        if ee > MIDPOINT_DEGENERACY {
            let num = dot(&blk(st, i), &blk(st, ip)) - dot(&blk(s, i), &blk(s, ip)) - dot(&nb, &eta);
            let k = num / ee;
            for a in 0..3 {
                g[a] += k * eta[a];
            }
        }
        out.extend_from_slice(&g);
    }
    m.project(c, &out)
}
