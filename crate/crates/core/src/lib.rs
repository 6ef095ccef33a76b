//! Energy-preserving discrete Riemannian gradient integrators.
//!
//! The crate is organised bottom-up:
//!
//! - [`geometry`]: manifolds stored in ambient coordinates (unit sphere,
//!   products of spheres, Euclidean space) with retractions, tangent maps,
//!   center functions and distances.
//! - [`gradients`]: first integrals, Riemannian gradients, skew operators and
//!   the discrete Riemannian gradients (AVF, midpoint, Itoh–Abe, symmetrized
//!   Itoh–Abe, modified midpoint for spin chains).
//! - [`quadrature`]: Gauss–Legendre rules and collocation tableaux.
//! - [`integrators`]: one-step methods built from the pieces above, plus
//!   adjoints, compositions, an implicit-midpoint baseline and a driver loop.
//! - [`problems`]: the spinning top, the Heisenberg spin chain and a flat
//!   harmonic oscillator.

pub mod error;
pub mod geometry;
pub mod gradients;
pub mod integrators;
pub mod linalg;
pub mod problems;
pub mod quadrature;

pub use error::{Error, Result};
pub use geometry::{CenterFunction, Euclidean, Manifold, ManifoldPoint, Spheres, TangentVector};
pub use gradients::{DiscreteGradient, DrgKind, FirstIntegral, SkewApprox};
pub use integrators::{presets, OneStepMethod, RunRecord, SolverOptions, StepOutcome};
pub use problems::{ExactChainSolution, Oscillator, Problem, SpinChain, SpinningTop};
pub use quadrature::CollocationTableau;
