//! Constants of the fractional limit and the asymptotic identities behind it.
//!
//! Every quantity here is an improper integral with a power singularity at the origin and an
//! algebraic (possibly oscillatory) tail. The origin is handled by `power_substitution`, the
//! bulk by adaptive Gauss-Kronrod over half-periods, and the far tail by an asymptotic series.

use crate::equilibrium::{Equilibrium, EquilibriumKind};
use crate::error::{Error, Result};
use crate::quadrature::{gamma, gauss_laguerre, power_substitution, Integrator};
use crate::C64;
use std::f64::consts::PI;

/// Number of half-periods integrated explicitly before switching to the tail series.
const HALF_PERIODS: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FractionalConstants {
    pub alpha: f64,
    pub d: usize,
    pub beta: f64,
    pub m: f64,
    pub kappa: f64,
    /// A_{d,α} = ∫ (1 - cos w) / |w|^{d+α} dw.
    pub a_const: f64,
    /// The normalization printed in the source model; reported only.
    pub c_paper: f64,
    pub gamma_alpha_plus_1: f64,
}

impl FractionalConstants {
    pub fn new(alpha: f64, d: usize, m: f64) -> Result<Self> {
        Ok(Self {
            alpha,
            d,
            beta: alpha + d as f64,
            m,
            kappa: compute_kappa(alpha, d, m)?,
            a_const: compute_symbol_constant(alpha, d)?,
            c_paper: c_paper(alpha, d),
            gamma_alpha_plus_1: gamma(alpha + 1.0),
        })
    }

    /// |κ - mΓ(α+1)A| / κ.
    pub fn identity_residual(&self) -> f64 {
        (self.kappa - self.m * self.gamma_alpha_plus_1 * self.a_const).abs() / self.kappa
    }
}

fn check(alpha: f64, d: usize) -> Result<()> {
    if !(alpha > 0.0 && alpha < 2.0) {
        return Err(Error::InvalidAlpha(alpha));
    }
    if d != 1 {
        return Err(Error::InvalidParameter(format!("dimension d={d} not supported")));
    }
    Ok(())
}

fn integrator() -> Integrator {
    Integrator::new(1e-16, 1e-12)
}

/// κ = ∫ w²/(1+w²) · m/|w|^{α+d} dw.
pub fn compute_kappa(alpha: f64, d: usize, m: f64) -> Result<f64> {
    check(alpha, d)?;
    let q = integrator();
    let f = |w: f64| w.powf(1.0 - alpha) / (1.0 + w * w);
    let near = power_substitution(&q, f, 1.0 - alpha, 1.0)?.value;
    let cut = 10.0;
    let mid = q.integrate(f, 1.0, cut)?.value;
    // w^{-1-α}/(1+w^{-2}) expanded in w^{-2} and integrated termwise.
    let tail: f64 = (0..30)
        .map(|n| {
            let p = alpha + 2.0 * n as f64;
            (if n % 2 == 0 { 1.0 } else { -1.0 }) * cut.powf(-p) / p
        })
        .sum();
    Ok(2.0 * m * (near + mid + tail))
}

/// ∫_W^∞ cos(u) u^{-γ} du for W a multiple of 2π, by repeated integration by parts.
fn cos_tail(w: f64, gamma_exp: f64) -> f64 {
    // I(γ) = γ W^{-γ-1} - γ(γ+1) I(γ+2), unrolled.
    let mut acc = 0.0;
    let mut coeff = gamma_exp;
    let mut g = gamma_exp;
    for _ in 0..6 {
        acc += coeff * w.powf(-g - 1.0);
        coeff *= -(g + 1.0) * (g + 2.0);
        g += 2.0;
    }
    acc
}

/// ∫_0^∞ (1 - cos(s w)) w^{-γ} dw for γ in (1, 3), integrated in the w variable.
fn one_minus_cos_power(s: f64, gamma_exp: f64) -> Result<f64> {
    if s == 0.0 {
        return Ok(0.0);
    }
    let q = integrator();
    let half = PI / s;
    let f = |w: f64| {
        let h = (0.5 * s * w).sin();
        2.0 * h * h * w.powf(-gamma_exp)
    };
    let near = power_substitution(&q, f, 2.0 - gamma_exp, half)?.value;
    let points: Vec<f64> = (1..=HALF_PERIODS).map(|n| n as f64 * half).collect();
    let bulk = q.integrate_split(f, &points)?.value;
    let wcut = *points.last().expect("non-empty");
    let u = s * wcut;
    let tail = wcut.powf(1.0 - gamma_exp) / (gamma_exp - 1.0) - s.powf(gamma_exp - 1.0) * cos_tail(u, gamma_exp);
    Ok(near + bulk + tail)
}

/// A_{d,α} = ∫ (1 - cos w)/|w|^{d+α} dw.
pub fn compute_symbol_constant(alpha: f64, d: usize) -> Result<f64> {
    check(alpha, d)?;
    Ok(2.0 * one_minus_cos_power(1.0, 1.0 + alpha)?)
}

/// C(s) = ∫ (cos(s w) - 1) m/|w|^β dw.
pub fn c_of_s(s: f64, beta: f64, m: f64) -> Result<f64> {
    if s < 0.0 {
        return Err(Error::InvalidParameter(format!("s={s} must be >= 0")));
    }
    check(beta - 1.0, 1)?;
    Ok(-2.0 * m * one_minus_cos_power(s, beta)?)
}

/// ∫_0^∞ e^{-s} C(s) ds by n-point Gauss-Laguerre.
pub fn laplace_of_c(beta: f64, m: f64, n: usize) -> Result<f64> {
    let (x, w) = gauss_laguerre(n);
    let mut acc = 0.0;
    for (s, wt) in x.iter().zip(&w) {
        acc += wt * c_of_s(*s, beta, m)?;
    }
    Ok(acc)
}

/// c_{d,α} = α Γ((d+α)/2) / (2 π^{d/2+α} Γ(1-α/2)).
pub fn c_paper(alpha: f64, d: usize) -> f64 {
    let df = d as f64;
    alpha * gamma(0.5 * (df + alpha)) / (2.0 * PI.powf(0.5 * df + alpha) * gamma(1.0 - 0.5 * alpha))
}

/// Discrete ⟨(e^{-iεskv} - 1) M⟩ on the equilibrium's velocity grid.
pub fn heavy_tail_symbol(eps: f64, s: f64, k: f64, eq: &Equilibrium) -> Result<C64> {
    if eq.kind != EquilibriumKind::HeavyTail {
        return Err(Error::NeedsHeavyTail("heavy_tail_symbol"));
    }
    let b = eps * s * k;
    let v = &eq.grid.nodes;
    let re = eq.grid.sum(|i| {
        let h = (0.5 * b * v[i]).sin();
        -2.0 * h * h * eq.values[i]
    });
    let im = eq.grid.sum(|i| -(b * v[i]).sin() * eq.values[i]);
    Ok(C64::new(re, im))
}

/// Continuous ⟨(cos(εskv) - 1) m/(1+|v|^β)⟩ over ℝ by adaptive quadrature (the imaginary part vanishes).
pub fn heavy_tail_symbol_fine(eps: f64, s: f64, k: f64, beta: f64, m: f64) -> Result<f64> {
    let b = (eps * s * k).abs();
    if b == 0.0 {
        return Ok(0.0);
    }
    let q = integrator();
    let half = PI / b;
    let f = |v: f64| {
        let h = (0.5 * b * v).sin();
        2.0 * h * h / (1.0 + v.powf(beta))
    };
    let mut points = vec![0.0];
    if half > 1.0 {
        points.push(1.0);
    }
    points.extend((1..=HALF_PERIODS).map(|n| n as f64 * half));
    let bulk = q.integrate_split(f, &points)?.value;
    let vcut = *points.last().expect("non-empty");
    // Beyond the cut 1/(1+v^β) = v^{-β} - v^{-2β} + ..., the second term is below 1e-15 here.
    let tail = vcut.powf(1.0 - beta) / (beta - 1.0) - b.powf(beta - 1.0) * cos_tail(b * vcut, beta);
    Ok(-2.0 * m * (bulk + tail))
}

/// Relative residual |symbol - (ε|k|)^α C(s)| / (ε|k|)^α.
pub fn symbol_residual(symbol: f64, eps: f64, s: f64, k: f64, beta: f64, m: f64) -> Result<f64> {
    let scale = (eps * k.abs()).powf(beta - 1.0);
    Ok((symbol - scale * c_of_s(s, beta, m)?).abs() / scale)
}

/// a(ε,z) = m ∫_0^{t/ε^α} |z|^β (εs)^{β-1} / ((εs)^β + |z|^β) e^{-s} ds, d = 1.
pub fn a_eps_z(eps: f64, z: f64, t: f64, beta: f64, m: f64) -> Result<f64> {
    if z == 0.0 {
        return Err(Error::InvalidParameter("z must be nonzero".into()));
    }
    if !(t > 0.0 && eps > 0.0) {
        return Err(Error::InvalidParameter("t and eps must be positive".into()));
    }
    let alpha = beta - 1.0;
    let zb = z.abs().powf(beta);
    let f = |s: f64| {
        let es = eps * s;
        zb * es.powf(alpha) / (es.powf(beta) + zb) * (-s).exp()
    };
    let upper = t / eps.powf(alpha);
    let q = integrator();
    let first = upper.min(1.0);
    let mut total = power_substitution(&q, f, alpha, first)?.value;
    // e^{-s} s^α is below 1e-300 past s = 745.
    let stop = upper.min(745.0);
    if stop > first {
        let mut pts = vec![first];
        for b in [10.0, 60.0] {
            if b < stop && b > first {
                pts.push(b);
            }
        }
        pts.push(stop);
        total += q.integrate_split(f, &pts)?.value;
    }
    Ok(m * total)
}

/// a(ε,z) / (m ε^α Γ(α+1)); tends to 1 as ε → 0.
pub fn a_ratio(eps: f64, z: f64, t: f64, beta: f64, m: f64) -> Result<f64> {
    let alpha = beta - 1.0;
    Ok(a_eps_z(eps, z, t, beta, m)? / (m * eps.powf(alpha) * gamma(alpha + 1.0)))
}
