//! Uniform periodic spatial grid and symmetric midpoint velocity grid.

use crate::error::{Error, Result};
use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq)]
pub struct SpatialGrid {
    pub half_width: f64,
    pub nx: usize,
}

impl SpatialGrid {
    pub fn new(half_width: f64, nx: usize) -> Result<Self> {
        if nx < 2 || nx % 2 != 0 {
            return Err(Error::InvalidGrid(format!("Nx={nx} must be even and >= 2")));
        }
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::InvalidGrid(format!("L={half_width} must be positive")));
        }
        Ok(Self { half_width, nx })
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.half_width / self.nx as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        -self.half_width + self.dx() * j as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.nx).map(|j| self.node(j)).collect()
    }

    /// Signed mode number of storage slot `idx` (FFT order). Slot Nx/2 holds mode -Nx/2.
    pub fn mode_number(&self, idx: usize) -> i64 {
        let n = self.nx as i64;
        let i = idx as i64;
        if i < n / 2 {
            i
        } else {
            i - n
        }
    }

    /// Storage slot of signed mode `j`, for j in [-Nx/2, Nx/2).
    pub fn slot(&self, j: i64) -> usize {
        let n = self.nx as i64;
        debug_assert!(j >= -n / 2 && j < n / 2);
        j.rem_euclid(n) as usize
    }

    pub fn wavenumber(&self, idx: usize) -> f64 {
        PI * self.mode_number(idx) as f64 / self.half_width
    }

    pub fn wavenumbers(&self) -> Vec<f64> {
        (0..self.nx).map(|i| self.wavenumber(i)).collect()
    }
}

/// Midpoint rule on [-vmax, vmax]: nodes at cell centres, all weights equal.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocityGrid {
    pub vmax: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl VelocityGrid {
    pub fn midpoint(vmax: f64, nv: usize) -> Result<Self> {
        if nv < 2 || nv % 2 != 0 {
            return Err(Error::InvalidGrid(format!("Nv={nv} must be even and >= 2")));
        }
        if !(vmax > 0.0 && vmax.is_finite()) {
            return Err(Error::InvalidGrid(format!("vmax={vmax} must be positive")));
        }
        let h = 2.0 * vmax / nv as f64;
        // Built from the positive half and mirrored so symmetry is exact in floating point.
        let half: Vec<f64> = (0..nv / 2).map(|i| (i as f64 + 0.5) * h).collect();
        let mut nodes: Vec<f64> = half.iter().rev().map(|v| -v).collect();
        nodes.extend(half.iter().copied());
        Ok(Self { vmax, nodes, weights: vec![h; nv] })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Node i and node len-1-i are mirror images with equal weights.
    pub fn is_symmetric(&self) -> bool {
        let n = self.len();
        (0..n).all(|i| self.nodes[i] == -self.nodes[n - 1 - i] && self.weights[i] == self.weights[n - 1 - i])
    }

    pub fn sum<F: Fn(usize) -> f64>(&self, f: F) -> f64 {
        // Pairwise over mirror nodes so odd integrands cancel exactly.
        let n = self.len();
        let mut acc = 0.0;
        for i in 0..n / 2 {
            let j = n - 1 - i;
            acc += self.weights[i] * f(i) + self.weights[j] * f(j);
        }
        acc
    }
}
