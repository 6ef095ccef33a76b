//! Gauss–Legendre rules on [0, 1] and Lagrange-based collocation tableaux.

use crate::error::{Error, Result};

/// Largest supported quadrature rule.
pub const MAX_QUADRATURE_NODES: usize = 64;

/// Gauss–Legendre nodes and weights on [0, 1], nodes ascending.
///
/// Roots of `P_n` are found by Newton's method from the Chebyshev-like
/// initial guesses and mapped from [-1, 1].
pub fn gauss_legendre(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if n == 0 || n > MAX_QUADRATURE_NODES {
        return Err(Error::InvalidArgument(format!(
            "quadrature order must be in 1..={MAX_QUADRATURE_NODES}, got {n}"
        )));
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..(n + 1) / 2 {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // x is the i-th largest root of P_n on [-1, 1]
        nodes[i] = 0.5 * (1.0 - x);
        nodes[n - 1 - i] = 0.5 * (1.0 + x);
        weights[i] = 0.5 * w;
        weights[n - 1 - i] = 0.5 * w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.5;
    }
    Ok((nodes, weights))
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let dp = if n == 0 {
        0.0
    } else {
        n as f64 * (x * p1 - p0) / (x * x - 1.0)
    };
    (p, dp)
}

/// Gauss collocation nodes: roots of the shifted Legendre polynomial of
/// degree `s` on [0, 1], ascending.
pub fn gauss_nodes(s: usize) -> Result<Vec<f64>> {
    if !(1..=8).contains(&s) {
        return Err(Error::Unsupported(format!(
            "collocation stage count must be in 1..=8, got {s}"
        )));
    }
    Ok(gauss_legendre(s)?.0)
}

/// Nodes `c_i`, weights `b_i = ∫₀¹ l_i` and integrated Lagrange
/// coefficients `∫₀^τ l_j` of a collocation method.
#[derive(Clone, Debug, PartialEq)]
pub struct CollocationTableau {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    /// `stage_coeffs[i][j] = ∫₀^{c_i} l_j`
    stage_coeffs: Vec<Vec<f64>>,
    // s-point Gauss rule; exact for the degree s-1 Lagrange basis
    rule: (Vec<f64>, Vec<f64>),
}

impl CollocationTableau {
    pub fn new(nodes: Vec<f64>) -> Result<Self> {
        let s = nodes.len();
        if s == 0 {
            return Err(Error::InvalidArgument("collocation needs at least one node".into()));
        }
        for i in 0..s {
            if !nodes[i].is_finite() {
                return Err(Error::InvalidArgument("collocation node is not finite".into()));
            }
            for j in 0..i {
                if (nodes[i] - nodes[j]).abs() < 1e-12 {
                    return Err(Error::InvalidArgument(format!(
                        "coincident collocation nodes {} and {}",
                        nodes[j], nodes[i]
                    )));
                }
            }
        }
        let rule = gauss_legendre(s)?;
        let mut tab = Self {
            nodes,
            weights: Vec::new(),
            stage_coeffs: Vec::new(),
            rule,
        };
        tab.weights = (0..s).map(|j| tab.integrated(j, 1.0)).collect();
        if let Some(j) = tab.weights.iter().position(|b| b.abs() < 1e-14) {
            return Err(Error::InvalidArgument(format!(
                "collocation weight b_{} vanishes",
                j + 1
            )));
        }
        let total: f64 = tab.weights.iter().sum();
        if (total - 1.0).abs() > 1e-14 {
            return Err(Error::InvalidArgument(format!(
                "collocation weights sum to {total}, not 1"
            )));
        }
        tab.stage_coeffs = tab
            .nodes
            .iter()
            .map(|&c| (0..s).map(|j| tab.integrated(j, c)).collect())
            .collect();
        Ok(tab)
    }

    /// Gauss–Legendre collocation with `s` stages (order 2s).
    pub fn gauss(s: usize) -> Result<Self> {
        Self::new(gauss_nodes(s)?)
    }

    pub fn stages(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn stage_coeffs(&self) -> &[Vec<f64>] {
        &self.stage_coeffs
    }

    /// Lagrange basis polynomial `l_j(ξ)`.
    pub fn lagrange(&self, j: usize, xi: f64) -> f64 {
        let cj = self.nodes[j];
        self.nodes
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != j)
            .map(|(_, &ck)| (xi - ck) / (cj - ck))
            .product()
    }

    /// `∫₀^τ l_j(ξ) dξ`.
    pub fn integrated(&self, j: usize, tau: f64) -> f64 {
        let (x, w) = &self.rule;
        tau * x
            .iter()
            .zip(w)
            .map(|(&xq, &wq)| wq * self.lagrange(j, tau * xq))
            .sum::<f64>()
    }
}
