//! Physical <-> Fourier conversions on the periodic grid.
//!
//! Convention: ρ̂(k) = (1/Nx) Σ_j ρ(x_j) e^{-i k x_j}, stored in FFT slot order.
//! Because x_0 = -L, mode j picks up a factor (-1)^j relative to the plain DFT.

use crate::equilibrium::Equilibrium;
use crate::error::{Error, Result};
use crate::grid::SpatialGrid;
use num_complex::Complex64 as C64;
use rustfft::{Fft, FftPlanner};
use std::f64::consts::PI;
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDensity {
    pub amps: Vec<C64>,
}

impl SpectralDensity {
    pub fn zeros(nx: usize) -> Self {
        Self { amps: vec![C64::new(0.0, 0.0); nx] }
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    /// Largest |ρ̂(-k) - conj ρ̂(k)| over the modes that have a partner (the Nyquist slot is skipped).
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.amps.len();
        (1..n)
            .filter(|&i| i != n / 2)
            .map(|i| (self.amps[n - i] - self.amps[i].conj()).norm())
            .fold(self.amps[0].im.abs(), f64::max)
    }
}

/// f̂(k, v_i) stored mode-major: `amps[k * nv + i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralPhaseSpace {
    pub nx: usize,
    pub nv: usize,
    pub amps: Vec<C64>,
}

impl SpectralPhaseSpace {
    pub fn zeros(nx: usize, nv: usize) -> Self {
        Self { nx, nv, amps: vec![C64::new(0.0, 0.0); nx * nv] }
    }

    pub fn mode(&self, k: usize) -> &[C64] {
        &self.amps[k * self.nv..(k + 1) * self.nv]
    }

    pub fn mode_mut(&mut self, k: usize) -> &mut [C64] {
        &mut self.amps[k * self.nv..(k + 1) * self.nv]
    }

    /// Velocity reduction Σ_i w_i f̂(k, v_i).
    pub fn density(&self, weights: &[f64]) -> SpectralDensity {
        let amps = (0..self.nx)
            .map(|k| self.mode(k).iter().zip(weights).map(|(f, w)| f * w).sum())
            .collect();
        SpectralDensity { amps }
    }
}

/// Cached forward/inverse plans for one grid size.
#[derive(Clone)]
pub struct Transform {
    nx: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Transform {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Transform({})", self.nx)
    }
}

impl Transform {
    pub fn new(nx: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self { nx, fwd: planner.plan_fft_forward(nx), inv: planner.plan_fft_inverse(nx) }
    }

    pub fn forward_complex(&self, values: &[C64]) -> Result<SpectralDensity> {
        self.check(values.len())?;
        let mut buf = values.to_vec();
        self.fwd.process(&mut buf);
        let scale = 1.0 / self.nx as f64;
        for (m, a) in buf.iter_mut().enumerate() {
            *a *= if m % 2 == 0 { scale } else { -scale };
        }
        Ok(SpectralDensity { amps: buf })
    }

    pub fn forward(&self, values: &[f64]) -> Result<SpectralDensity> {
        let buf: Vec<C64> = values.iter().map(|&x| C64::new(x, 0.0)).collect();
        self.forward_complex(&buf)
    }

    pub fn inverse_complex(&self, rho: &SpectralDensity) -> Result<Vec<C64>> {
        self.check(rho.len())?;
        let mut buf: Vec<C64> =
            rho.amps.iter().enumerate().map(|(m, &a)| if m % 2 == 0 { a } else { -a }).collect();
        self.inv.process(&mut buf);
        Ok(buf)
    }

    /// Real part of the inverse transform.
    pub fn inverse(&self, rho: &SpectralDensity) -> Result<Vec<f64>> {
        Ok(self.inverse_complex(rho)?.into_iter().map(|z| z.re).collect())
    }

    fn check(&self, got: usize) -> Result<()> {
        if got != self.nx {
            return Err(Error::LengthMismatch { expected: self.nx, got });
        }
        Ok(())
    }
}

pub fn to_spectral(values: &[f64]) -> Result<SpectralDensity> {
    Transform::new(values.len()).forward(values)
}

pub fn from_spectral(rho: &SpectralDensity) -> Result<Vec<f64>> {
    Transform::new(rho.len()).inverse(rho)
}

/// 1 + sin(πx) on the spatial nodes.
pub fn initial_density(sgrid: &SpatialGrid) -> Vec<f64> {
    sgrid.nodes().iter().map(|x| 1.0 + (PI * x).sin()).collect()
}

/// f̂_0(k, v_i) = ρ̂_0(k) M_i for the data f_0 = (1 + sin πx) M(v).
pub fn initial_condition(sgrid: &SpatialGrid, eq: &Equilibrium) -> SpectralPhaseSpace {
    let rho0 = to_spectral(&initial_density(sgrid)).expect("grid length");
    let nv = eq.len();
    let mut f = SpectralPhaseSpace::zeros(sgrid.nx, nv);
    for k in 0..sgrid.nx {
        for (slot, m) in f.mode_mut(k).iter_mut().zip(&eq.values) {
            *slot = rho0.amps[k] * m;
        }
    }
    f
}
