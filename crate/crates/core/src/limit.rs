//! Implicit Euler solvers of the limit equations in Fourier, plus their exact single-mode solutions.

use crate::constants::compute_kappa;
use crate::equilibrium::{discrete_moment, Equilibrium};
use crate::error::{Error, Result};
use crate::grid::SpatialGrid;
use crate::spectral::SpectralDensity;
use crate::tail::TailQuadrature;
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LimitKind {
    /// Heat equation ∂t ρ = D ∂xx ρ.
    Ds { d: f64 },
    /// Fractional heat equation ∂t ρ̂ = -κ|k|^α ρ̂.
    Ads { kappa: f64, alpha: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitConfig {
    pub kind: LimitKind,
    pub dt: f64,
}

impl LimitConfig {
    /// DS with D_h the discrete second moment of the equilibrium.
    pub fn ds(eq: &Equilibrium, dt: f64) -> Self {
        Self { kind: LimitKind::Ds { d: discrete_moment(eq, 2) }, dt }
    }

    /// ADS with κ_h from the same rescaled w-sum the anomalous schemes use.
    pub fn ads(tail: &TailQuadrature, dt: f64) -> Self {
        Self { kind: LimitKind::Ads { kappa: tail.kappa_h(), alpha: tail.alpha() }, dt }
    }

    /// Continuous constants: D = 1 for the Gaussian, κ from quadrature for the heavy tail.
    pub fn ds_continuous(dt: f64) -> Self {
        Self { kind: LimitKind::Ds { d: 1.0 }, dt }
    }

    pub fn ads_continuous(eq: &Equilibrium, dt: f64) -> Result<Self> {
        let alpha = eq.alpha().ok_or(Error::NeedsHeavyTail("continuous ADS"))?;
        Ok(Self { kind: LimitKind::Ads { kappa: compute_kappa(alpha, 1, eq.m)?, alpha }, dt })
    }

    /// Decay rate σ(k).
    pub fn sigma(&self, k: f64) -> f64 {
        match self.kind {
            LimitKind::Ds { d } => d * k * k,
            LimitKind::Ads { kappa, alpha } => kappa * k.abs().powf(alpha),
        }
    }
}

fn step(rho: &mut SpectralDensity, sgrid: &SpatialGrid, cfg: &LimitConfig) {
    for (i, a) in rho.amps.iter_mut().enumerate() {
        *a /= 1.0 + cfg.dt * cfg.sigma(sgrid.wavenumber(i));
    }
}

pub fn ds_step(rho: &mut SpectralDensity, sgrid: &SpatialGrid, cfg: &LimitConfig) {
    debug_assert!(matches!(cfg.kind, LimitKind::Ds { .. }));
    step(rho, sgrid, cfg);
}

pub fn ads_step(rho: &mut SpectralDensity, sgrid: &SpatialGrid, cfg: &LimitConfig) {
    debug_assert!(matches!(cfg.kind, LimitKind::Ads { .. }));
    step(rho, sgrid, cfg);
}

pub fn limit_step(rho: &mut SpectralDensity, sgrid: &SpatialGrid, cfg: &LimitConfig) {
    step(rho, sgrid, cfg);
}

/// e^{-σ(k) t} ρ̂₀(k).
pub fn exact_limit_solution(t: f64, k: f64, rho0: C64, cfg: &LimitConfig) -> C64 {
    rho0 * (-cfg.sigma(k) * t).exp()
}

pub fn exact_limit_density(t: f64, rho0: &SpectralDensity, sgrid: &SpatialGrid, cfg: &LimitConfig) -> SpectralDensity {
    SpectralDensity {
        amps: rho0.amps.iter().enumerate().map(|(i, a)| exact_limit_solution(t, sgrid.wavenumber(i), *a, cfg)).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn ds_factors() {
        let g = SpatialGrid::new(1.0, 8).unwrap();
        let cfg = LimitConfig { kind: LimitKind::Ds { d: 1.0 }, dt: 1e-3 };
        let mut rho = SpectralDensity { amps: vec![C64::new(1.0, 0.0); 8] };
        ds_step(&mut rho, &g, &cfg);
        assert_eq!(rho.amps[0], C64::new(1.0, 0.0));
        assert!((rho.amps[1].re - 1.0 / (1.0 + 1e-3 * PI * PI)).abs() < 1e-15);
        assert!((rho.amps[1].re - 0.990233).abs() < 1e-5);
        for _ in 1..100 {
            ds_step(&mut rho, &g, &cfg);
        }
        assert!((rho.amps[1].re - (1.0 + 1e-3 * PI * PI).powi(-100)).abs() < 1e-14);
        assert!((rho.amps[1].re - 0.374564).abs() < 1e-4);
        let exact = exact_limit_solution(0.1, PI, C64::new(1.0, 0.0), &cfg).re;
        assert!((exact - 0.372708).abs() < 1e-6);
    }

    #[test]
    fn ads_factors() {
        let g = SpatialGrid::new(1.0, 8).unwrap();
        let cfg = LimitConfig { kind: LimitKind::Ads { kappa: 1.6813, alpha: 1.5 }, dt: 1e-3 };
        let mut rho = SpectralDensity { amps: vec![C64::new(0.0, 1.0); 8] };
        ads_step(&mut rho, &g, &cfg);
        assert!((rho.amps[1].im - 0.990730).abs() < 1e-5);
        assert_eq!(rho.amps[0], C64::new(0.0, 1.0));
        assert!((exact_limit_solution(0.1, PI, C64::new(1.0, 0.0), &cfg).re - 0.39215).abs() < 1e-4);
    }
}
