//! Named methods.
//!
//! Plain IA uses the left center. Every other DRG preset, and every stage
//! of a composition, uses the chordal-midpoint center with the skew operator
//! evaluated there.

use super::OneStepMethod;
use crate::error::Result;
use crate::geometry::CenterFunction;
use crate::gradients::{DiscreteGradient, DrgKind, SkewApprox};
use crate::quadrature::CollocationTableau;

fn drg(kind: DrgKind, center: CenterFunction) -> OneStepMethod {
    OneStepMethod::drg(DiscreteGradient::new(kind, center), SkewApprox::AtCenter)
}

/// Triple-jump coefficients `(γ₁, γ₂, γ₁)`.
pub fn triple_jump() -> [f64; 3] {
    let cbrt2 = 2f64.powf(1.0 / 3.0);
    let g1 = 1.0 / (2.0 - cbrt2);
    [g1, -cbrt2 / (2.0 - cbrt2), g1]
}

fn triple(base: OneStepMethod) -> OneStepMethod {
    let [a, b, c] = triple_jump();
    OneStepMethod::Composition(vec![(base.clone(), a), (base.clone(), b), (base, c)])
}

fn ia_mid() -> OneStepMethod {
    drg(DrgKind::ItohAbe, CenterFunction::ChordalMidpoint)
}

pub fn ia() -> OneStepMethod {
    drg(DrgKind::ItohAbe, CenterFunction::Left)
}

pub fn avf(nq: usize) -> OneStepMethod {
    drg(DrgKind::Avf { nq }, CenterFunction::ChordalMidpoint)
}

pub fn mp() -> OneStepMethod {
    drg(DrgKind::Midpoint, CenterFunction::ChordalMidpoint)
}

pub fn sia() -> OneStepMethod {
    drg(DrgKind::SymmetrizedItohAbe, CenterFunction::ChordalMidpoint)
}

pub fn mmp() -> OneStepMethod {
    drg(DrgKind::ModifiedMidpoint, CenterFunction::ChordalMidpoint)
}

/// `ψ_{h/2} ∘ ψ*_{h/2}` for IA: symmetric, order 2.
pub fn ia2() -> OneStepMethod {
    let base = ia_mid();
    let adj = base.adjoint().expect("DRG steps have adjoints");
    OneStepMethod::Composition(vec![(adj, 0.5), (base, 0.5)])
}

/// `ψ_{αh} ∘ ψ*_{βh} ∘ ψ_{αh}` for IA with `α = 1 - 1/√2`, `β = √2 - 1`.
/// These weights cancel the `h²` error term of the order-1 IA step.
pub fn comp2() -> OneStepMethod {
    let base = ia_mid();
    let adj = base.adjoint().expect("DRG steps have adjoints");
    let alpha = 1.0 - 1.0 / 2f64.sqrt();
    let beta = 1.0 - 2.0 * alpha;
    OneStepMethod::Composition(vec![(base.clone(), alpha), (adj, beta), (base, alpha)])
}

pub fn comp_sia() -> OneStepMethod {
    triple(sia())
}

pub fn comp4() -> OneStepMethod {
    triple(ia2())
}

pub fn collocation(stages: usize) -> Result<OneStepMethod> {
    Ok(OneStepMethod::Collocation(CollocationTableau::gauss(stages)?))
}
