//! Benchmark systems: the perturbed spinning top on S², the periodic
//! Heisenberg spin chain on (S²)^d and a flat harmonic oscillator.

use crate::error::{Error, Result};
use crate::geometry::{Euclidean, Manifold, ManifoldPoint, Spheres};
use crate::gradients::FirstIntegral;
use crate::linalg::{cross, dot, norm};

/// An ODE `u' = F(u) = Ω(u) grad H(u)` on a manifold with first integral `H`.
pub trait Problem: FirstIntegral + Send + Sync {
    fn manifold(&self) -> &dyn Manifold;

    /// Right-hand side in ambient coordinates. Must be defined on a
    /// neighbourhood of the manifold (the implicit midpoint rule evaluates it
    /// at chord midpoints).
    fn field(&self, u: &[f64]) -> Vec<f64>;

    /// Action of the skew operator `Ω(p)` on a vector `y` tangent at `p`.
    fn omega(&self, p: &ManifoldPoint, y: &[f64]) -> Vec<f64>;

    fn as_spin_chain(&self) -> Option<&SpinChain> {
        None
    }
}

/// `y ↦ s × y` on every 3-block.
fn block_hat(s: &[f64], y: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(y.len());
    for (sb, yb) in s.chunks_exact(3).zip(y.chunks_exact(3)) {
        out.extend_from_slice(&cross(sb, yb));
    }
    out
}

/// Nonlinearly perturbed rigid body, `H(s) = ½ (I⁻¹s)ᵀ(s + ⅔ s²)` with the
/// componentwise square `s²`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinningTop {
    inertia: [f64; 3],
    sphere: Spheres,
}

impl SpinningTop {
    pub fn new(inertia: [f64; 3]) -> Result<Self> {
        if inertia.iter().any(|&i| !(i > 0.0) || !i.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "inertia components must be positive, got {inertia:?}"
            )));
        }
        Ok(Self {
            inertia,
            sphere: Spheres::single(),
        })
    }

    pub fn inertia(&self) -> [f64; 3] {
        self.inertia
    }
}

impl FirstIntegral for SpinningTop {
    fn value(&self, s: &[f64]) -> f64 {
        0.5 * (0..3)
            .map(|i| (s[i] * s[i] + 2.0 / 3.0 * s[i] * s[i] * s[i]) / self.inertia[i])
            .sum::<f64>()
    }

    fn ambient_gradient(&self, s: &[f64]) -> Vec<f64> {
        (0..3)
            .map(|i| (s[i] + s[i] * s[i]) / self.inertia[i])
            .collect()
    }

    fn increment(&self, a: &[f64], d: &[f64]) -> f64 {
        (0..3)
            .map(|i| {
                let (x, y) = (a[i], d[i]);
                y * (x + 0.5 * y + x * x + x * y + y * y / 3.0) / self.inertia[i]
            })
            .sum()
    }
}

impl Problem for SpinningTop {
    fn manifold(&self) -> &dyn Manifold {
        &self.sphere
    }

    fn field(&self, s: &[f64]) -> Vec<f64> {
        cross(s, &self.ambient_gradient(s)).to_vec()
    }

    fn omega(&self, p: &ManifoldPoint, y: &[f64]) -> Vec<f64> {
        block_hat(p.coords(), y)
    }
}

/// Periodic Heisenberg chain, `H(s) = Σ_i s_iᵀ s_{i-1}` with `s_0 = s_d`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinChain {
    spins: usize,
    manifold: Spheres,
}

impl SpinChain {
    pub fn new(spins: usize) -> Result<Self> {
        if spins < 2 {
            return Err(Error::InvalidArgument(format!(
                "spin chain needs at least 2 spins, got {spins}"
            )));
        }
        Ok(Self {
            spins,
            manifold: Spheres::product(spins),
        })
    }

    pub fn spins(&self) -> usize {
        self.spins
    }

    pub(crate) fn prev(&self, i: usize) -> usize {
        (i + self.spins - 1) % self.spins
    }

    pub(crate) fn next(&self, i: usize) -> usize {
        (i + 1) % self.spins
    }
}

fn block(s: &[f64], i: usize) -> &[f64] {
    &s[3 * i..3 * i + 3]
}

impl FirstIntegral for SpinChain {
    fn value(&self, s: &[f64]) -> f64 {
        (0..self.spins)
            .map(|i| dot(block(s, i), block(s, self.prev(i))))
            .sum()
    }

    fn ambient_gradient(&self, s: &[f64]) -> Vec<f64> {
        let mut out = Vec::with_capacity(s.len());
        for i in 0..self.spins {
            let (a, b) = (block(s, self.prev(i)), block(s, self.next(i)));
            out.extend_from_slice(&[a[0] + b[0], a[1] + b[1], a[2] + b[2]]);
        }
        out
    }

    fn increment(&self, a: &[f64], d: &[f64]) -> f64 {
        (0..self.spins)
            .map(|i| {
                let j = self.prev(i);
                dot(block(d, i), block(a, j))
                    + dot(block(a, i), block(d, j))
                    + dot(block(d, i), block(d, j))
            })
            .sum()
    }
}

impl Problem for SpinChain {
    fn manifold(&self) -> &dyn Manifold {
        &self.manifold
    }

    fn field(&self, s: &[f64]) -> Vec<f64> {
        block_hat(s, &self.ambient_gradient(s))
    }

    fn omega(&self, p: &ManifoldPoint, y: &[f64]) -> Vec<f64> {
        block_hat(p.coords(), y)
    }

    fn as_spin_chain(&self) -> Option<&SpinChain> {
        Some(self)
    }
}

/// Travelling-wave solution of the spin chain:
/// `s_j(t) = (a cos θ_j + ã sin θ_j) cos φ + ā sin φ` with
/// `θ_j(t) = j p - 2(1 - cos p) sin(φ) t`, `j = 1..d`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactChainSolution {
    pub angle: f64,
    pub wavenumber: f64,
    pub a: [f64; 3],
    pub a_tilde: [f64; 3],
    pub a_bar: [f64; 3],
}

impl ExactChainSolution {
    /// Builds the solution from `a` and `ã`; `ā = a × ã`.
    pub fn new(angle: f64, wavenumber: f64, a: [f64; 3], a_tilde: [f64; 3]) -> Result<Self> {
        for (name, v) in [("a", &a), ("a_tilde", &a_tilde)] {
            if (norm(v) - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidArgument(format!("frame vector {name} is not unit")));
            }
        }
        if dot(&a, &a_tilde).abs() > 1e-12 {
            return Err(Error::InvalidArgument("frame vectors are not orthogonal".into()));
        }
        Ok(Self {
            angle,
            wavenumber,
            a,
            a_tilde,
            a_bar: cross(&a, &a_tilde),
        })
    }

    pub fn phase(&self, j: usize, t: f64) -> f64 {
        let p = self.wavenumber;
        j as f64 * p - 2.0 * (1.0 - p.cos()) * self.angle.sin() * t
    }

    pub fn state(&self, chain: &SpinChain, t: f64) -> ManifoldPoint {
        let (cphi, sphi) = (self.angle.cos(), self.angle.sin());
        let mut out = Vec::with_capacity(3 * chain.spins());
        for j in 1..=chain.spins() {
            let theta = self.phase(j, t);
            let (c, s) = (theta.cos(), theta.sin());
            for k in 0..3 {
                out.push((self.a[k] * c + self.a_tilde[k] * s) * cphi + self.a_bar[k] * sphi);
            }
        }
        ManifoldPoint::new(out)
    }
}

/// `H = ½‖u‖²` on R² with `F(u) = (-u₂, u₁)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Oscillator {
    plane: Euclidean,
}

impl Default for Oscillator {
    fn default() -> Self {
        Self {
            plane: Euclidean::new(2),
        }
    }
}

impl Oscillator {
    pub fn new() -> Self {
        Self::default()
    }

    /// Exact flow: rotation by angle `t`.
    pub fn exact(&self, u0: &[f64], t: f64) -> ManifoldPoint {
        let (c, s) = (t.cos(), t.sin());
        ManifoldPoint::new(vec![c * u0[0] - s * u0[1], s * u0[0] + c * u0[1]])
    }
}

impl FirstIntegral for Oscillator {
    fn value(&self, u: &[f64]) -> f64 {
        0.5 * dot(u, u)
    }

    fn ambient_gradient(&self, u: &[f64]) -> Vec<f64> {
        u.to_vec()
    }

    fn increment(&self, a: &[f64], d: &[f64]) -> f64 {
        d.iter().zip(a).map(|(y, x)| y * (x + 0.5 * y)).sum()
    }
}

impl Problem for Oscillator {
    fn manifold(&self) -> &dyn Manifold {
        &self.plane
    }

    fn field(&self, u: &[f64]) -> Vec<f64> {
        vec![-u[1], u[0]]
    }

    fn omega(&self, _p: &ManifoldPoint, y: &[f64]) -> Vec<f64> {
        vec![-y[1], y[0]]
    }
}

/// The spinning-top setup: `I = diag(1, 2, 4)`, `s⁰ = (-1, -1, 1)/√3`.
pub fn top_setup() -> (SpinningTop, ManifoldPoint) {
    let r = 1.0 / 3f64.sqrt();
    (
        SpinningTop::new([1.0, 2.0, 4.0]).expect("positive inertia"),
        ManifoldPoint::new(vec![-r, -r, r]),
    )
}

/// The spin-chain setup: `d = 5`, `φ = π/3`, `p = 2π/5`,
/// `a = (1, 2, -1)/√6`, `ã = (2, 1, 4)/√21`.
pub fn chain_setup() -> (SpinChain, ExactChainSolution) {
    let d = 5;
    let s6 = 6f64.sqrt();
    let s21 = 21f64.sqrt();
    let sol = ExactChainSolution::new(
        std::f64::consts::PI / 3.0,
        2.0 * std::f64::consts::PI / d as f64,
        [1.0 / s6, 2.0 / s6, -1.0 / s6],
        [2.0 / s21, 1.0 / s21, 4.0 / s21],
    )
    .expect("printed frame is orthonormal");
    (SpinChain::new(d).expect("d >= 2"), sol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn top_energy_values() {
        let top = SpinningTop::new([1.0, 2.0, 4.0]).unwrap();
        assert!((top.value(&[1.0, 0.0, 0.0]) - 5.0 / 6.0).abs() < 1e-15);
        let (_, s0) = top_setup();
        // reference value computed in extended precision
        assert!((top.value(s0.coords()) - 0.211_479_129_279_218_7).abs() < 1e-15);
    }

    #[test]
    fn top_axis_is_relative_equilibrium() {
        let top = SpinningTop::new([1.0, 2.0, 4.0]).unwrap();
        assert_eq!(top.ambient_gradient(&[1.0, 0.0, 0.0]), vec![2.0, 0.0, 0.0]);
        assert_eq!(top.field(&[1.0, 0.0, 0.0]), vec![0.0, 0.0, 0.0]);
        for axis in [[0.0, 1.0, 0.0], [0.0, 0.0, -1.0]] {
            assert_eq!(top.field(&axis), vec![0.0, 0.0, 0.0]);
        }
    }

    #[test]
    fn top_rejects_nonpositive_inertia() {
        assert!(SpinningTop::new([1.0, 0.0, 2.0]).is_err());
    }

    #[test]
    fn chain_energy_examples() {
        let c5 = SpinChain::new(5).unwrap();
        let up: Vec<f64> = [0.0, 0.0, 1.0].repeat(5);
        assert_eq!(c5.value(&up), 5.0);
        assert_eq!(c5.field(&up), vec![0.0; 15]);
        let c2 = SpinChain::new(2).unwrap();
        assert_eq!(c2.value(&[0.0, 0.0, 1.0, 0.0, 0.0, -1.0]), -2.0);
        assert!(SpinChain::new(1).is_err());
    }

    #[test]
    fn printed_frame_is_orthonormal() {
        let (_, sol) = chain_setup();
        // (1·2 + 2·1 - 1·4) = 0
        assert!(dot(&sol.a, &sol.a_tilde).abs() < 1e-16);
        assert!((norm(&sol.a_bar) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn exact_solution_at_zero() {
        let (chain, sol) = chain_setup();
        let s = sol.state(&chain, 0.0);
        let p = sol.wavenumber;
        let phi = sol.angle;
        for j in 1..=5 {
            let th = j as f64 * p;
            for k in 0..3 {
                let want =
                    (sol.a[k] * th.cos() + sol.a_tilde[k] * th.sin()) * phi.cos() + sol.a_bar[k] * phi.sin();
                assert!((s.coords()[3 * (j - 1) + k] - want).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn oscillator_values() {
        let o = Oscillator::new();
        assert_eq!(o.value(&[3.0, 4.0]), 12.5);
        let u = o.exact(&[3.0, 4.0], 1.3);
        assert!((o.value(u.coords()) - 12.5).abs() < 1e-13);
    }
}
