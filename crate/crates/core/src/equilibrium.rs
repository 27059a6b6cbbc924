//! Velocity equilibria sampled on a midpoint grid and renormalized to unit discrete mass.

use crate::error::{Error, Result};
use crate::grid::VelocityGrid;
use crate::quadrature::Integrator;

/// Spatial dimension used by the simulations.
pub const DIM: usize = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EquilibriumKind {
    Gaussian,
    HeavyTail,
}

impl std::str::FromStr for EquilibriumKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gaussian" => Ok(Self::Gaussian),
            "heavytail" | "heavy-tail" | "heavy_tail" => Ok(Self::HeavyTail),
            other => Err(Error::Config(format!("unknown equilibrium '{other}'"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Equilibrium {
    pub kind: EquilibriumKind,
    /// Tail exponent; `None` for the Gaussian.
    pub beta: Option<f64>,
    /// Continuous normalization constant.
    pub m: f64,
    /// Normalization actually carried by the renormalized samples, `m / raw_mass`.
    pub m_scheme: f64,
    /// Discrete mass Σ w_i M(v_i) before renormalization.
    pub raw_mass: f64,
    pub values: Vec<f64>,
    pub grid: VelocityGrid,
}

/// m such that m ∫_ℝ dv / (1 + |v|^β) = 1, for β in (1, 3).
pub fn heavy_tail_normalization(beta: f64) -> Result<f64> {
    check_beta(beta)?;
    let q = Integrator::new(1e-15, 1e-13);
    let inner = q.integrate(|v| 1.0 / (1.0 + v.powf(beta)), 0.0, 1.0)?.value;
    // v > 1 folded onto (0, 1] by v = t^{-1/(β-1)}, which leaves a bounded integrand.
    let p = beta / (beta - 1.0);
    let outer = q.integrate(|t| 1.0 / (1.0 + t.powf(p)), 0.0, 1.0)?.value / (beta - 1.0);
    Ok(1.0 / (2.0 * (inner + outer)))
}

fn check_beta(beta: f64) -> Result<()> {
    let (lo, hi) = (DIM as f64, DIM as f64 + 2.0);
    if !(beta > lo && beta < hi) {
        return Err(Error::InvalidBeta { beta, lo, hi });
    }
    Ok(())
}

pub fn make_equilibrium(kind: EquilibriumKind, beta: f64, grid: &VelocityGrid) -> Result<Equilibrium> {
    if !grid.is_symmetric() {
        return Err(Error::InvalidGrid("velocity grid is not symmetric".into()));
    }
    let (m, beta, profile): (f64, Option<f64>, Box<dyn Fn(f64) -> f64>) = match kind {
        EquilibriumKind::Gaussian => {
            let m = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
            (m, None, Box::new(move |v: f64| m * (-0.5 * v * v).exp()))
        }
        EquilibriumKind::HeavyTail => {
            let m = heavy_tail_normalization(beta)?;
            (m, Some(beta), Box::new(move |v: f64| m / (1.0 + v.abs().powf(beta))))
        }
    };
    let raw: Vec<f64> = grid.nodes.iter().map(|&v| profile(v)).collect();
    let raw_mass = grid.sum(|i| raw[i]);
    let values: Vec<f64> = raw.iter().map(|x| x / raw_mass).collect();
    Ok(Equilibrium { kind, beta, m, m_scheme: m / raw_mass, raw_mass, values, grid: grid.clone() })
}

impl Equilibrium {
    pub fn alpha(&self) -> Option<f64> {
        self.beta.map(|b| b - DIM as f64)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.grid.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.grid.weights
    }
}

/// Σ w_i v_i^p M_i.
pub fn discrete_moment(eq: &Equilibrium, p: u32) -> f64 {
    debug_assert!(p <= 4);
    let v = &eq.grid.nodes;
    eq.grid.sum(|i| v[i].powi(p as i32) * eq.values[i])
}
