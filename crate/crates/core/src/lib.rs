//! Asymptotic-preserving time schemes for the scaled BGK equation
//! `ε^α ∂t f + ε v ∂x f = ρ M − f` on a periodic interval, with Gaussian or
//! heavy-tailed equilibria, together with the diffusion / fractional-diffusion
//! limit solvers and an experiment harness.

pub mod constants;
pub mod duhamel;
pub mod equilibrium;
pub mod error;
pub mod grid;
pub mod harness;
pub mod implicit;
pub mod limit;
pub mod micromacro;
pub mod quadrature;
pub mod spectral;
pub mod tail;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
