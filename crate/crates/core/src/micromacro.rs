//! Micro-macro steppers in physical space: f = ρM + g with ⟨g⟩ = 0.
//!
//! The fluctuation g is transported explicitly and relaxed implicitly. MMSD updates ρ with the
//! new g; MMSA solves the ρ update in Fourier so the fractional operator stays diagonal.

use crate::equilibrium::Equilibrium;
use crate::error::{Error, Result};
use crate::grid::SpatialGrid;
use crate::spectral::Transform;
use crate::tail::TailQuadrature;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stencil {
    Upwind1,
    Centered2,
}

impl std::str::FromStr for Stencil {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "upwind1" => Ok(Self::Upwind1),
            "centered2" => Ok(Self::Centered2),
            other => Err(Error::Config(format!("unknown stencil '{other}'"))),
        }
    }
}

/// Periodic first derivative. Upwinding follows the sign of the advecting velocity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivativeOperator {
    pub stencil: Stencil,
    pub dx: f64,
}

impl DerivativeOperator {
    pub fn apply(&self, u: &[f64], velocity: f64, out: &mut [f64]) {
        let n = u.len();
        let inv = 1.0 / self.dx;
        match self.stencil {
            Stencil::Centered2 => {
                for j in 0..n {
                    out[j] = 0.5 * inv * (u[(j + 1) % n] - u[(j + n - 1) % n]);
                }
            }
            Stencil::Upwind1 if velocity >= 0.0 => {
                for j in 0..n {
                    out[j] = inv * (u[j] - u[(j + n - 1) % n]);
                }
            }
            Stencil::Upwind1 => {
                for j in 0..n {
                    out[j] = inv * (u[(j + 1) % n] - u[j]);
                }
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct MicroMacroState {
    pub rho: Vec<f64>,
    /// Velocity-major: g[i * nx + j] = g(x_j, v_i).
    pub g: Vec<f64>,
    pub nx: usize,
    pub nv: usize,
    pub eps: f64,
    pub dt: f64,
    pub alpha: f64,
}

impl MicroMacroState {
    /// Equilibrium initial data: g = 0.
    pub fn new(rho: Vec<f64>, nv: usize, eps: f64, dt: f64, alpha: f64) -> Result<Self> {
        if !(eps > 0.0 && dt > 0.0) {
            return Err(Error::InvalidParameter(format!("eps={eps}, dt={dt} must be positive")));
        }
        let nx = rho.len();
        Ok(Self { rho, g: vec![0.0; nx * nv], nx, nv, eps, dt, alpha })
    }

    pub fn g_row(&self, i: usize) -> &[f64] {
        &self.g[i * self.nx..(i + 1) * self.nx]
    }

    /// max_j |Σ_i w_i g(x_j, v_i)|.
    pub fn max_g_mean(&self, weights: &[f64]) -> f64 {
        (0..self.nx)
            .map(|j| (0..self.nv).map(|i| weights[i] * self.g[i * self.nx + j]).sum::<f64>().abs())
            .fold(0.0, f64::max)
    }
}

/// Shared setup for both micro-macro schemes.
#[derive(Debug, Clone)]
pub struct MicroMacro {
    pub sgrid: SpatialGrid,
    pub eq: Equilibrium,
    pub transport: DerivativeOperator,
    pub source: DerivativeOperator,
    transform: Transform,
}

impl MicroMacro {
    pub fn new(sgrid: SpatialGrid, eq: Equilibrium, stencil: Stencil) -> Self {
        let dx = sgrid.dx();
        let transform = Transform::new(sgrid.nx);
        Self {
            sgrid,
            eq,
            transport: DerivativeOperator { stencil, dx },
            source: DerivativeOperator { stencil: Stencil::Centered2, dx },
            transform,
        }
    }

    /// ⟨v ∂x g⟩ at every node, with the transport stencil.
    fn flux(&self, g: &[f64], nx: usize, out: &mut [f64]) {
        let mut dg = vec![0.0; nx];
        out.iter_mut().for_each(|x| *x = 0.0);
        for (i, (&v, &w)) in self.eq.nodes().iter().zip(self.eq.weights()).enumerate() {
            self.transport.apply(&g[i * nx..(i + 1) * nx], v, &mut dg);
            for j in 0..nx {
                out[j] += w * v * dg[j];
            }
        }
    }

    /// g^{n+1} = [g^n - Δt ε^{1-α}(v∂ρ M + v∂g - ⟨v∂g⟩M)] / (1 + Δt/ε^α). Returns ⟨v∂x g^n⟩.
    fn update_g(&self, s: &mut MicroMacroState) -> Vec<f64> {
        let nx = s.nx;
        let ea = s.eps.powf(s.alpha);
        let c = s.dt * s.eps / ea;
        let relax = 1.0 + s.dt / ea;
        let mut drho = vec![0.0; nx];
        self.source.apply(&s.rho, 0.0, &mut drho);
        let mut mean_flux = vec![0.0; nx];
        self.flux(&s.g, nx, &mut mean_flux);
        let mut dg = vec![0.0; nx];
        let mut next = vec![0.0; s.g.len()];
        for (i, &v) in self.eq.nodes().iter().enumerate() {
            let mi = self.eq.values[i];
            let row = &s.g[i * nx..(i + 1) * nx];
            self.transport.apply(row, v, &mut dg);
            for j in 0..nx {
                let rhs = v * drho[j] * mi + v * dg[j] - mean_flux[j] * mi;
                next[i * nx + j] = (row[j] - c * rhs) / relax;
            }
        }
        s.g = next;
        mean_flux
    }
}

pub fn mmsd_step(s: &mut MicroMacroState, mm: &MicroMacro) {
    mm.update_g(s);
    let nx = s.nx;
    let mut fl = vec![0.0; nx];
    mm.flux(&s.g, nx, &mut fl);
    let c = s.dt * s.eps / s.eps.powf(s.alpha);
    for j in 0..nx {
        s.rho[j] -= c * fl[j];
    }
}

pub fn mmsa_step(s: &mut MicroMacroState, mm: &MicroMacro, tail: &TailQuadrature) {
    let old_flux = mm.update_g(s);
    let ea = s.eps.powf(s.alpha);
    let lambda = s.dt / (ea + s.dt);
    let coupling = s.dt * s.eps / (ea + s.dt);
    let rho_hat = mm.transform.forward(&s.rho).expect("grid length");
    let flux_hat = mm.transform.forward(&old_flux).expect("grid length");
    let mut next = rho_hat.clone();
    for kidx in 0..s.nx {
        let k = mm.sgrid.wavenumber(kidx).abs();
        let div = if k == 0.0 {
            1.0
        } else {
            1.0 + s.dt * lambda.powf(s.alpha) * k.powf(s.alpha) * tail.theta(s.eps * lambda * k)
        };
        next.amps[kidx] = (rho_hat.amps[kidx] - coupling * flux_hat.amps[kidx]) / div;
    }
    s.rho = mm.transform.inverse(&next).expect("grid length");
}

/// Largest stable Δt for the explicit transport of g with implicit relaxation, times 0.9.
///
/// Von Neumann on g alone: with ν = Δt ε^{1-α} v_max/Δx and μ = Δt/ε^α the worst upwind
/// mode needs ν ≤ 1 + μ/2, the centered one ν² ≤ μ² + 2μ. Returns infinity when the
/// relaxation dominates at every Δt.
pub fn cfl_max_dt(eps: f64, alpha: f64, dx: f64, vmax: f64, stencil: Stencil) -> f64 {
    const SAFETY: f64 = 0.9;
    let ea = eps.powf(alpha);
    let a = eps / ea * vmax / dx;
    let b = 1.0 / ea;
    match stencil {
        Stencil::Upwind1 => {
            let slope = a - 0.5 * b;
            if slope <= 0.0 {
                f64::INFINITY
            } else {
                SAFETY / slope
            }
        }
        Stencil::Centered2 => {
            // (a² - b²) Δt ≤ 2b
            let q = a * a - b * b;
            if q <= 0.0 {
                f64::INFINITY
            } else {
                SAFETY * 2.0 * b / q
            }
        }
    }
}
