//! Memory-term schemes built on the Duhamel form of the kinetic equation in Fourier:
//!
//! ρ̂(t) = Â₀(t) + ∫_0^{t/ε^α} ⟨e^{-s(1+iεkv)} M⟩ ρ̂(t - ε^α s) ds,
//!
//! with ρ̂ interpolated linearly on each step and the resulting kernels integrated exactly.
//! Write τ = Δt/ε^α, s_j = jτ. Each coefficient is a velocity average of
//! τ e^{-s_j z} φ(τz), where φ₂(u) = (1 - e^{-u}(1+u))/u² weighs the older end of the
//! interval (b_j) and φ₃(u) = (u - 1 + e^{-u})/u² the newer end (c_j).

use crate::equilibrium::Equilibrium;
use crate::error::{Error, Result};
use crate::grid::SpatialGrid;
use crate::spectral::{SpectralDensity, SpectralPhaseSpace};
use crate::tail::TailQuadrature;
use crate::C64;
use rayon::prelude::*;

/// Below this real part e^{z} is flushed to zero.
const EXP_FLOOR: f64 = -745.0;

fn cexp_neg(z: C64) -> C64 {
    // e^{-z}
    if -z.re <= EXP_FLOOR {
        C64::new(0.0, 0.0)
    } else {
        C64::from_polar((-z.re).exp(), -z.im)
    }
}

fn phi2(u: C64) -> C64 {
    if u.norm() < 0.5 {
        // Σ (-1)^n (n+1) u^n / (n+2)!
        let mut term = C64::new(1.0, 0.0);
        let mut fact = 2.0;
        let mut acc = C64::new(0.0, 0.0);
        for n in 0..24 {
            acc += term * ((n + 1) as f64 / fact);
            term *= -u;
            fact *= (n + 3) as f64;
        }
        acc
    } else {
        (C64::new(1.0, 0.0) - cexp_neg(u) * (1.0 + u)) / (u * u)
    }
}

fn phi1(u: C64) -> C64 {
    if u.norm() < 0.5 {
        // Σ (-1)^n u^n / (n+1)!
        let mut term = C64::new(1.0, 0.0);
        let mut fact = 1.0;
        let mut acc = C64::new(0.0, 0.0);
        for n in 0..24 {
            acc += term / fact;
            term *= -u;
            fact *= (n + 2) as f64;
        }
        acc
    } else {
        (C64::new(1.0, 0.0) - cexp_neg(u)) / u
    }
}

/// 1 - τφ₃(τz) = (z-1)/z + φ₁(τz)/z, free of cancellation when τφ₃ is close to 1.
fn one_minus_tau_phi3(z: C64, tau: f64) -> C64 {
    ((z - 1.0) + phi1(tau * z)) / z
}

fn phi3(u: C64) -> C64 {
    if u.norm() < 0.5 {
        // Σ (-1)^n u^n / (n+2)!
        let mut term = C64::new(1.0, 0.0);
        let mut fact = 2.0;
        let mut acc = C64::new(0.0, 0.0);
        for n in 0..24 {
            acc += term / fact;
            term *= -u;
            fact *= (n + 3) as f64;
        }
        acc
    } else {
        (u - 1.0 + cexp_neg(u)) / (u * u)
    }
}

/// Pure time factors (k = 0) of b_j and c_j.
fn time_factors(j: usize, tau: f64) -> (f64, f64) {
    let decay = if -(j as f64) * tau <= EXP_FLOOR { 0.0 } else { (-(j as f64) * tau).exp() };
    let u = C64::new(tau, 0.0);
    (decay * tau * phi2(u).re, decay * tau * phi3(u).re)
}

/// Velocity-side description of the memory kernel.
#[derive(Debug, Clone, Copy)]
pub enum Kernel<'a> {
    /// ⟨e^{-s(1+iεkv)} M⟩ on the equilibrium grid, with time scaled by ε^α (α = 2 normally).
    Diffusion(&'a Equilibrium, f64),
    /// Rescaled w-sum for the heavy tail.
    Anomalous(&'a TailQuadrature),
}

impl Kernel<'_> {
    pub fn alpha(&self) -> f64 {
        match self {
            Kernel::Diffusion(_, alpha) => *alpha,
            Kernel::Anomalous(t) => t.alpha(),
        }
    }
}

/// Per-velocity data reused across j for one mode.
struct ModeKernel {
    /// Quadrature weight times kernel value for each node.
    weight: Vec<f64>,
    z: Vec<C64>,
    phi2: Vec<C64>,
    phi3: Vec<C64>,
    /// Scalar prefactor on the pure time factors (1 for diffusion).
    time_scale: f64,
    /// Scalar prefactor on the velocity sum (1 for diffusion, ε^α|k|^α for the tail).
    sum_scale: f64,
}

fn mode_kernel(kernel: Kernel<'_>, k: f64, eps: f64, tau: f64) -> ModeKernel {
    match kernel {
        Kernel::Diffusion(eq, _) => {
            let z: Vec<C64> = eq.nodes().iter().map(|v| C64::new(1.0, eps * k * v)).collect();
            ModeKernel {
                weight: eq.weights().iter().zip(&eq.values).map(|(w, m)| w * m).collect(),
                phi2: z.iter().map(|z| phi2(tau * z)).collect(),
                phi3: z.iter().map(|z| phi3(tau * z)).collect(),
                z,
                time_scale: 0.0,
                sum_scale: 1.0,
            }
        }
        Kernel::Anomalous(tail) => {
            let a = eps * k.abs();
            if a == 0.0 {
                return ModeKernel {
                    weight: vec![],
                    z: vec![],
                    phi2: vec![],
                    phi3: vec![],
                    time_scale: 1.0,
                    sum_scale: 0.0,
                };
            }
            let scale = a.powf(tail.alpha());
            let z: Vec<C64> = tail.nodes.iter().map(|w| C64::new(1.0, *w)).collect();
            ModeKernel {
                weight: (0..tail.len()).map(|i| tail.weights[i] * tail.kernel(a, i)).collect(),
                phi2: z.iter().map(|z| phi2(tau * z)).collect(),
                phi3: z.iter().map(|z| phi3(tau * z)).collect(),
                z,
                time_scale: 1.0 - scale * tail.s0(a),
                sum_scale: scale,
            }
        }
    }
}

impl ModeKernel {
    fn coeffs(&self, j: usize, tau: f64) -> (C64, C64) {
        let s = j as f64 * tau;
        let (mut b, mut c) = (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
        if s < -EXP_FLOOR {
            // Pair mirror nodes so the odd parts cancel exactly.
            let n = self.z.len();
            for i in 0..n {
                let e = cexp_neg(s * self.z[i]) * (self.weight[i] * tau);
                b += e * self.phi2[i];
                c += e * self.phi3[i];
            }
        }
        let (pb, pc) = time_factors(j, tau);
        (pb * self.time_scale + b * self.sum_scale, pc * self.time_scale + c * self.sum_scale)
    }

    /// 1 - c_0, using that the kernel weights sum to 1 - time_scale.
    fn one_minus_c0(&self, tau: f64) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..self.z.len() {
            acc += one_minus_tau_phi3(self.z[i], tau) * self.weight[i];
        }
        one_minus_tau_phi3(C64::new(1.0, 0.0), tau) * self.time_scale + acc * self.sum_scale
    }
}

/// (b_j, c_j) for the diffusive kernel at wavenumber k.
pub fn coeffs_diffusion(j: usize, k: f64, eps: f64, dt: f64, eq: &Equilibrium) -> (C64, C64) {
    let tau = dt / (eps * eps);
    mode_kernel(Kernel::Diffusion(eq, 2.0), k, eps, tau).coeffs(j, tau)
}

/// (b_j, c_j) for the heavy-tail kernel at wavenumber k.
pub fn coeffs_anomalous(j: usize, k: f64, eps: f64, dt: f64, tail: &TailQuadrature) -> (C64, C64) {
    let tau = dt / eps.powf(tail.alpha());
    mode_kernel(Kernel::Anomalous(tail), k, eps, tau).coeffs(j, tau)
}

#[derive(Debug, Clone)]
pub struct CoefficientTable {
    pub eps: f64,
    pub dt: f64,
    pub alpha: f64,
    pub steps: usize,
    /// b[mode][j], c[mode][j] for j in 0..steps.
    pub b: Vec<Vec<C64>>,
    pub c: Vec<Vec<C64>>,
    /// 1 - c_0 per mode, evaluated without cancellation.
    pub one_minus_c0: Vec<C64>,
}

impl CoefficientTable {
    pub fn build(kernel: Kernel<'_>, sgrid: &SpatialGrid, eps: f64, dt: f64, steps: usize) -> Self {
        let alpha = kernel.alpha();
        let tau = dt / eps.powf(alpha);
        let per_mode: Vec<(Vec<C64>, Vec<C64>, C64)> = (0..sgrid.nx)
            .into_par_iter()
            .map(|kidx| {
                let mk = mode_kernel(kernel, sgrid.wavenumber(kidx), eps, tau);
                let (b, c) = (0..steps).map(|j| mk.coeffs(j, tau)).unzip();
                (b, c, mk.one_minus_c0(tau))
            })
            .collect();
        let mut b = Vec::with_capacity(sgrid.nx);
        let mut c = Vec::with_capacity(sgrid.nx);
        let mut one_minus_c0 = Vec::with_capacity(sgrid.nx);
        for (bk, ck, o) in per_mode {
            b.push(bk);
            c.push(ck);
            one_minus_c0.push(o);
        }
        Self { eps, dt, alpha, steps, b, c, one_minus_c0 }
    }

    pub fn tau(&self) -> f64 {
        self.dt / self.eps.powf(self.alpha)
    }

    /// max_n |Σ_{j≤n} (b_j + c_j) - (1 - e^{-s_{n+1}})| at mode slot 0.
    pub fn partition_residual(&self) -> f64 {
        let tau = self.tau();
        let mut acc = C64::new(0.0, 0.0);
        let mut worst = 0.0f64;
        for j in 0..self.steps {
            acc += self.b[0][j] + self.c[0][j];
            let target = -(-((j + 1) as f64) * tau).exp_m1();
            worst = worst.max((acc - target).norm());
        }
        worst
    }
}

#[derive(Debug, Clone)]
pub struct HistoryBuffer {
    /// ρ̂^n per stored step.
    pub rho: Vec<SpectralDensity>,
    /// Retained f̂₀(k, v_i) for the initial layer.
    pub f0: SpectralPhaseSpace,
}

impl HistoryBuffer {
    pub fn new(f0: SpectralPhaseSpace, weights: &[f64]) -> Self {
        let rho0 = f0.density(weights);
        Self { rho: vec![rho0], f0 }
    }

    pub fn len(&self) -> usize {
        self.rho.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rho.is_empty()
    }

    pub fn latest(&self) -> &SpectralDensity {
        self.rho.last().expect("history starts with ρ̂⁰")
    }
}

/// Â₀(t,k) = Σ_i w_i e^{-(t/ε^α)(1+iεkv_i)} f̂₀(k,v_i).
pub fn initial_layer(t: f64, k: f64, f0: &[C64], eq: &Equilibrium, eps: f64, alpha: f64) -> C64 {
    let s = t / eps.powf(alpha);
    eq.nodes()
        .iter()
        .zip(eq.weights())
        .zip(f0)
        .map(|((v, w), f)| cexp_neg(C64::new(s, s * eps * k * v)) * (w * f))
        .sum()
}

/// Optional history cut-off: terms with e^{-s_j} below 1e-16 are skipped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Truncation {
    #[default]
    Off,
    Below1e16,
}

fn memory_sum(history: &HistoryBuffer, table: &CoefficientTable, kidx: usize, n: usize, jmax: usize) -> C64 {
    let b = &table.b[kidx];
    let c = &table.c[kidx];
    let mut acc = b[0] * history.rho[n].amps[kidx];
    for j in 1..=n.min(jmax) {
        acc += c[j] * history.rho[n + 1 - j].amps[kidx] + b[j] * history.rho[n - j].amps[kidx];
    }
    acc
}

fn jmax(table: &CoefficientTable, trunc: Truncation) -> usize {
    match trunc {
        Truncation::Off => usize::MAX,
        Truncation::Below1e16 => (16.0 * std::f64::consts::LN_10 / table.tau()).ceil() as usize,
    }
}

/// Which relation the step solves for ρ̂^{n+1}.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Closure {
    Plain,
    CrankNicolson,
}

#[allow(clippy::too_many_arguments)]
fn step_impl(
    history: &mut HistoryBuffer,
    table: &CoefficientTable,
    n: usize,
    sgrid: &SpatialGrid,
    eq: &Equilibrium,
    trunc: Truncation,
    closure: Closure,
) -> Result<()> {
    if n + 1 != history.len() || n >= table.steps {
        return Err(Error::InvalidParameter(format!(
            "step {n} needs history of length {} and a table of at least {} steps",
            n + 1,
            n + 1
        )));
    }
    let t = (n + 1) as f64 * table.dt;
    let tau = table.tau();
    let jm = jmax(table, trunc);
    let mut next = SpectralDensity::zeros(sgrid.nx);
    for kidx in 0..sgrid.nx {
        let k = sgrid.wavenumber(kidx);
        let a0 = initial_layer(t, k, history.f0.mode(kidx), eq, table.eps, table.alpha);
        let rhs = a0 + memory_sum(history, table, kidx, n, jm);
        let omc = table.one_minus_c0[kidx];
        let (lhs, rhs) = match closure {
            Closure::Plain => (omc, rhs),
            Closure::CrankNicolson => {
                // The part of c_0 + b_0 beyond the k = 0 telescoping value is averaged over
                // both time levels.
                let d = table.b[kidx][0] + (-tau).exp() - omc;
                (omc + 0.5 * d, rhs + 0.5 * d * history.rho[n].amps[kidx])
            }
        };
        if lhs.norm() < 1e-14 {
            return Err(Error::Degenerate(lhs.norm(), kidx));
        }
        next.amps[kidx] = rhs / lhs;
    }
    history.rho.push(next);
    Ok(())
}

/// ρ̂^{n+1} from the Duhamel relation; appends to the history.
pub fn duhamel_step(
    history: &mut HistoryBuffer,
    table: &CoefficientTable,
    n: usize,
    sgrid: &SpatialGrid,
    eq: &Equilibrium,
    trunc: Truncation,
) -> Result<()> {
    step_impl(history, table, n, sgrid, eq, trunc, Closure::Plain)
}

/// Crank-Nicolson closure of the same relation.
pub fn cn_variant_step(
    history: &mut HistoryBuffer,
    table: &CoefficientTable,
    n: usize,
    sgrid: &SpatialGrid,
    eq: &Equilibrium,
    trunc: Truncation,
) -> Result<()> {
    step_impl(history, table, n, sgrid, eq, trunc, Closure::CrankNicolson)
}
