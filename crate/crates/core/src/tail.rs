//! Discrete sums over the rescaled velocity variable w = v/(ε|k|) used by the anomalous schemes.

use crate::equilibrium::{Equilibrium, EquilibriumKind};
use crate::error::{Error, Result};
use crate::grid::VelocityGrid;

#[derive(Debug, Clone)]
pub struct TailQuadrature {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub m: f64,
    pub beta: f64,
    /// |w_i|^β, cached.
    pow_beta: Vec<f64>,
}

impl TailQuadrature {
    pub fn new(grid: &VelocityGrid, m: f64, beta: f64) -> Self {
        let pow_beta = grid.nodes.iter().map(|w| w.abs().powf(beta)).collect();
        Self { nodes: grid.nodes.clone(), weights: grid.weights.clone(), m, beta, pow_beta }
    }

    /// Uses the equilibrium's own grid and the normalization carried by its samples.
    pub fn from_equilibrium(eq: &Equilibrium) -> Result<Self> {
        Self::with_grid(eq, &eq.grid)
    }

    /// Dedicated w-grid, same normalization as the equilibrium samples.
    pub fn with_grid(eq: &Equilibrium, grid: &VelocityGrid) -> Result<Self> {
        match (eq.kind, eq.beta) {
            (EquilibriumKind::HeavyTail, Some(beta)) => Ok(Self::new(grid, eq.m_scheme, beta)),
            _ => Err(Error::NeedsHeavyTail("tail quadrature")),
        }
    }

    pub fn alpha(&self) -> f64 {
        self.beta - 1.0
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// m / (a^β + |w_i|^β).
    pub fn kernel(&self, a: f64, i: usize) -> f64 {
        self.m / (a.powf(self.beta) + self.pow_beta[i])
    }

    /// Θ(a) = Σ_i w_i m/(a^β+|w_i|^β) · w_i²/(1+w_i²).
    pub fn theta(&self, a: f64) -> f64 {
        let ab = a.powf(self.beta);
        self.sum(|i| {
            let w2 = self.nodes[i] * self.nodes[i];
            self.m / (ab + self.pow_beta[i]) * w2 / (1.0 + w2)
        })
    }

    /// S₀(a) = Σ_i w_i m/(a^β+|w_i|^β).
    pub fn s0(&self, a: f64) -> f64 {
        let ab = a.powf(self.beta);
        self.sum(|i| self.m / (ab + self.pow_beta[i]))
    }

    /// Discrete κ: Θ at a = 0.
    pub fn kappa_h(&self) -> f64 {
        self.theta(0.0)
    }

    fn sum<F: Fn(usize) -> f64>(&self, f: F) -> f64 {
        let n = self.len();
        (0..n / 2).map(|i| self.weights[i] * f(i) + self.weights[n - 1 - i] * f(n - 1 - i)).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::make_equilibrium;

    #[test]
    fn theta_decreases_and_kappa_h_positive() {
        let g = VelocityGrid::midpoint(50.0, 200).unwrap();
        let eq = make_equilibrium(EquilibriumKind::HeavyTail, 2.5, &g).unwrap();
        let t = TailQuadrature::from_equilibrium(&eq).unwrap();
        let k = t.kappa_h();
        assert!(k > 0.0);
        assert!(t.theta(1e-3) < k && t.theta(1.0) < t.theta(1e-3));
        // A fine w-grid brings the discrete κ near the continuous value.
        let fine = TailQuadrature::new(&VelocityGrid::midpoint(2000.0, 4_000_000).unwrap(), eq.m, 2.5);
        assert!((fine.kappa_h() - 1.6813).abs() < 0.02, "{}", fine.kappa_h());
    }

    #[test]
    fn gaussian_rejected() {
        let g = VelocityGrid::midpoint(10.0, 20).unwrap();
        let eq = make_equilibrium(EquilibriumKind::Gaussian, 2.0, &g).unwrap();
        assert!(TailQuadrature::from_equilibrium(&eq).is_err());
    }
}
