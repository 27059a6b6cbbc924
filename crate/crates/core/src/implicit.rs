//! Fully implicit Fourier-diagonal steppers.
//!
//! Both schemes solve the implicit Euler step of the kinetic equation exactly, mode by mode:
//! the new density comes from a scalar velocity reduction, then f̂ is reconstructed from it.
//! ISA replaces the reduction that carries the velocity tail by its rescaled form, so the
//! truncated velocity grid does not hide the tail in the small-ε limit.

use crate::equilibrium::Equilibrium;
use crate::error::{Error, Result};
use crate::grid::SpatialGrid;
use crate::spectral::{SpectralDensity, SpectralPhaseSpace};
use crate::tail::TailQuadrature;
use crate::C64;

#[derive(Debug, Clone)]
pub struct ImplicitState {
    pub f: SpectralPhaseSpace,
    pub rho: SpectralDensity,
    pub eps: f64,
    pub dt: f64,
    pub alpha: f64,
    pub lambda: f64,
    /// 1 - λ = ε^α/(ε^α+Δt), kept separately to avoid cancellation for tiny ε.
    pub one_minus_lambda: f64,
}

impl ImplicitState {
    pub fn new(f: SpectralPhaseSpace, weights: &[f64], eps: f64, dt: f64, alpha: f64) -> Result<Self> {
        if !(eps > 0.0 && dt > 0.0) {
            return Err(Error::InvalidParameter(format!("eps={eps}, dt={dt} must be positive")));
        }
        let ea = eps.powf(alpha);
        let rho = f.density(weights);
        Ok(Self { f, rho, eps, dt, alpha, lambda: dt / (ea + dt), one_minus_lambda: ea / (ea + dt) })
    }
}

fn implicit_step<T>(state: &mut ImplicitState, sgrid: &SpatialGrid, eq: &Equilibrium, tail_term: T)
where
    T: Fn(f64) -> Option<f64>,
{
    let (lam, oml) = (state.lambda, state.one_minus_lambda);
    let v = eq.nodes();
    let w = eq.weights();
    let nv = eq.len();
    let mut d = vec![C64::new(0.0, 0.0); nv];
    for kidx in 0..sgrid.nx {
        let a = lam * state.eps * sgrid.wavenumber(kidx);
        for i in 0..nv {
            d[i] = C64::new(1.0, a * v[i]);
        }
        let fk = state.f.mode(kidx);
        let mut num = C64::new(0.0, 0.0);
        let mut den = C64::new(0.0, 0.0);
        let mut den2 = C64::new(0.0, 0.0);
        for i in 0..nv {
            let inv = w[i] / d[i];
            num += fk[i] * inv;
            den += eq.values[i] * inv;
            den2 += C64::new(0.0, a * v[i]) * eq.values[i] * inv;
        }
        let denom = match tail_term(a.abs()) {
            Some(t) => den + t,
            None => den + den2 / oml,
        };
        let rho_new = num / denom;
        let fk = state.f.mode_mut(kidx);
        for i in 0..nv {
            fk[i] = (oml * fk[i] + lam * rho_new * eq.values[i]) / d[i];
        }
        state.rho.amps[kidx] = rho_new;
    }
}

/// Implicit step in the diffusive scaling (any equilibrium with a finite discrete second moment).
pub fn isd_step(state: &mut ImplicitState, sgrid: &SpatialGrid, eq: &Equilibrium) {
    implicit_step(state, sgrid, eq, |_| None);
}

/// Implicit step in the anomalous scaling; the tail reduction uses the rescaled w-sum.
pub fn isa_step(state: &mut ImplicitState, sgrid: &SpatialGrid, eq: &Equilibrium, tail: &TailQuadrature) {
    let (alpha, oml) = (state.alpha, state.one_minus_lambda);
    implicit_step(state, sgrid, eq, |a| {
        Some(if a == 0.0 { 0.0 } else { a.powf(alpha) * tail.theta(a) / oml })
    });
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::{discrete_moment, make_equilibrium, EquilibriumKind};
    use crate::grid::VelocityGrid;
    use crate::spectral::initial_condition;
    use std::f64::consts::PI;

    fn gaussian() -> (SpatialGrid, Equilibrium) {
        let g = SpatialGrid::new(1.0, 64).unwrap();
        let eq = make_equilibrium(EquilibriumKind::Gaussian, 2.0, &VelocityGrid::midpoint(10.0, 20).unwrap()).unwrap();
        (g, eq)
    }

    fn heavy() -> (SpatialGrid, Equilibrium) {
        let g = SpatialGrid::new(1.0, 64).unwrap();
        let eq = make_equilibrium(EquilibriumKind::HeavyTail, 2.5, &VelocityGrid::midpoint(50.0, 200).unwrap()).unwrap();
        (g, eq)
    }

    #[test]
    fn lambda_half() {
        let (g, eq) = gaussian();
        let s = ImplicitState::new(initial_condition(&g, &eq), eq.weights(), 1.0, 1.0, 2.0).unwrap();
        assert_eq!(s.lambda, 0.5);
        assert!(ImplicitState::new(initial_condition(&g, &eq), eq.weights(), 0.0, 1.0, 2.0).is_err());
    }

    #[test]
    fn isd_mass_mode_and_density_sync() {
        let (g, eq) = gaussian();
        let mut s = ImplicitState::new(initial_condition(&g, &eq), eq.weights(), 0.3, 1e-2, 2.0).unwrap();
        let m0 = s.rho.amps[0];
        for _ in 0..50 {
            isd_step(&mut s, &g, &eq);
            let red = s.f.density(eq.weights());
            for (a, b) in red.amps.iter().zip(&s.rho.amps) {
                assert!((a - b).norm() < 1e-12);
            }
        }
        assert!((s.rho.amps[0] - m0).norm() < 1e-14);
    }

    #[test]
    fn isd_small_eps_is_implicit_euler_heat() {
        let (g, eq) = gaussian();
        let dh = discrete_moment(&eq, 2);
        let mut s = ImplicitState::new(initial_condition(&g, &eq), eq.weights(), 1e-6, 1e-3, 2.0).unwrap();
        let a0 = s.rho.amps[1];
        for _ in 0..100 {
            isd_step(&mut s, &g, &eq);
        }
        let expected = a0 * (1.0 + 1e-3 * dh * PI * PI).powi(-100);
        assert!((s.rho.amps[1] - expected).norm() < 1e-6);
    }

    #[test]
    fn isa_small_eps_is_implicit_euler_fractional() {
        let (g, eq) = heavy();
        let tail = TailQuadrature::from_equilibrium(&eq).unwrap();
        let kh = tail.kappa_h();
        let mut s = ImplicitState::new(initial_condition(&g, &eq), eq.weights(), 1e-8, 1e-3, 1.5).unwrap();
        let a0 = s.rho.amps[1];
        isa_step(&mut s, &g, &eq, &tail);
        let expected = a0 / (1.0 + 1e-3 * kh * PI.powf(1.5));
        assert!((s.rho.amps[1] - expected).norm() < 1e-6);
        assert_eq!(s.rho.amps[0], a0 * 0.0 + C64::new(1.0, 0.0));
    }
}
