//! Manifolds in ambient coordinates.
//!
//! Points and tangent vectors are stored as flat coordinate lists in the
//! embedding space. Every manifold exposes the same capability set: the
//! metric, a retraction `φ_p` with its inverse, the tangent maps of both and
//! their metric transposes, tangent projection, a deterministic orthonormal
//! tangent basis and the Riemannian distance.

mod euclidean;
mod spheres;

pub use euclidean::Euclidean;
pub use spheres::Spheres;

use std::fmt;

use crate::error::{Error, Result};

/// A point on a manifold, in ambient coordinates.
///
/// Construction does not check the manifold constraint; use
/// [`Manifold::point`] for a checked constructor.
#[derive(Clone, Debug, PartialEq)]
pub struct ManifoldPoint {
    coords: Vec<f64>,
}

impl ManifoldPoint {
    pub fn new(coords: Vec<f64>) -> Self {
        Self { coords }
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }
}

/// A tangent vector together with its base point.
#[derive(Clone, Debug, PartialEq)]
pub struct TangentVector {
    pub base: ManifoldPoint,
    pub comps: Vec<f64>,
}

impl TangentVector {
    pub fn new(base: ManifoldPoint, comps: Vec<f64>) -> Self {
        Self { base, comps }
    }

    pub fn zero(base: &ManifoldPoint) -> Self {
        Self {
            comps: vec![0.0; base.len()],
            base: base.clone(),
        }
    }

    pub fn comps(&self) -> &[f64] {
        &self.comps
    }
}

/// The operations every manifold provides.
///
/// Conventions: `x` is a tangent vector at `p = x.base`; `φ_p` is the
/// retraction at `p`; `u = φ_p(x)`.
pub trait Manifold: fmt::Debug + Send + Sync {
    /// Intrinsic dimension.
    fn dim(&self) -> usize;

    fn ambient_dim(&self) -> usize;

    /// Largest violation of the manifold constraint at `coords`.
    fn constraint_violation(&self, coords: &[f64]) -> f64;

    /// Nearest point on the manifold (normalisation for spheres).
    fn project_point(&self, coords: &[f64]) -> Result<ManifoldPoint>;

    /// Orthogonal projection of an ambient vector onto `T_pM`.
    fn project(&self, p: &ManifoldPoint, ambient: &[f64]) -> Result<TangentVector>;

    fn metric(&self, x: &TangentVector, y: &TangentVector) -> Result<f64>;

    fn retract(&self, x: &TangentVector) -> Result<ManifoldPoint>;

    /// `φ_p^{-1}(u)`; fails with [`Error::Domain`] outside the chart.
    fn inverse_retract(&self, p: &ManifoldPoint, u: &ManifoldPoint) -> Result<TangentVector>;

    /// `φ_p(x + dx) - φ_p(x)` in ambient coordinates, accurate relative to
    /// `dx` when `dx` is small.
    fn retract_increment(&self, x: &TangentVector, dx: &[f64]) -> Result<Vec<f64>> {
        let mut y = x.clone();
        crate::linalg::axpy(1.0, dx, &mut y.comps);
        let (a, b) = (self.retract(x)?, self.retract(&y)?);
        Ok(crate::linalg::sub(b.coords(), a.coords()))
    }

    /// `T_xφ_p v`, based at `φ_p(x)`.
    fn tangent_map(&self, x: &TangentVector, v: &TangentVector) -> Result<TangentVector>;

    /// `(T_xφ_p)ᵀ a` for `a` tangent at `φ_p(x)`; the result lives in `T_pM`.
    fn tangent_map_transpose(&self, x: &TangentVector, a: &TangentVector)
        -> Result<TangentVector>;

    /// `T_uφ_p^{-1} w` for `w` tangent at `u = w.base`; the result lives in `T_pM`.
    fn inverse_tangent_map(&self, p: &ManifoldPoint, w: &TangentVector) -> Result<TangentVector>;

    /// `(T_uφ_p^{-1})ᵀ a` for `a` tangent at `p`; the result lives in `T_uM`.
    fn inverse_tangent_map_transpose(
        &self,
        p: &ManifoldPoint,
        u: &ManifoldPoint,
        a: &TangentVector,
    ) -> Result<TangentVector>;

    /// Orthonormal basis of `T_pM`. Two calls with the same `p` return
    /// bit-identical vectors.
    fn orthonormal_basis(&self, p: &ManifoldPoint) -> Vec<TangentVector>;

    /// Symmetric center `c(u, v) = c(v, u)` with `c(u, u) = u`.
    fn chordal_midpoint(&self, u: &ManifoldPoint, v: &ManifoldPoint) -> Result<ManifoldPoint>;

    fn distance(&self, u: &ManifoldPoint, v: &ManifoldPoint) -> f64;

    /// Checked point constructor.
    fn point(&self, coords: Vec<f64>) -> Result<ManifoldPoint> {
        check_len(self.ambient_dim(), coords.len())?;
        let violation = self.constraint_violation(&coords);
        if violation > 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "point is off the manifold by {violation:e}"
            )));
        }
        Ok(ManifoldPoint::new(coords))
    }
}

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

/// Center function `c(u, v)` used to pick the tangent space of a step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CenterFunction {
    /// `c(u, v) = u`.
    Left,
    /// Normalised chord midpoint per sphere block; `(u + v)/2` in flat space.
    ChordalMidpoint,
}

impl CenterFunction {
    pub fn center(
        &self,
        m: &dyn Manifold,
        u: &ManifoldPoint,
        v: &ManifoldPoint,
    ) -> Result<ManifoldPoint> {
        match self {
            CenterFunction::Left => {
                check_len(u.len(), v.len())?;
                Ok(u.clone())
            }
            CenterFunction::ChordalMidpoint => m.chordal_midpoint(u, v),
        }
    }

    pub fn is_symmetric(&self) -> bool {
        matches!(self, CenterFunction::ChordalMidpoint)
    }
}
