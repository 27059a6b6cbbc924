//! Numerical integration helpers used by the constants module and equilibrium normalization.
//!
//! `Integrator` is a globally adaptive 7-15 point Gauss-Kronrod rule: the interval with the
//! largest error estimate is bisected until the summed estimate meets the tolerance. Endpoint
//! singularities of power type are expected to be removed by a change of variables before the
//! call (see `power_substitution`).

use crate::error::{Error, Result};
use std::collections::BinaryHeap;

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct Integrator {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for Integrator {
    fn default() -> Self {
        Self { abs_tol: 1e-14, rel_tol: 1e-11, max_intervals: 4000 }
    }
}

struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, o: &Self) -> bool {
        self.error == o.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Piece {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&o.error)
    }
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

impl Integrator {
    pub fn new(abs_tol: f64, rel_tol: f64) -> Self {
        Self { abs_tol, rel_tol, ..Self::default() }
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> Result<QuadResult> {
        self.integrate_split(f, &[a, b])
    }

    /// Integrates over consecutive breakpoints, refining globally across all pieces.
    pub fn integrate_split<F: Fn(f64) -> f64>(&self, f: F, points: &[f64]) -> Result<QuadResult> {
        let mut heap = BinaryHeap::new();
        let (mut total, mut err) = (0.0, 0.0);
        for w in points.windows(2) {
            let (v, e) = gk15(&f, w[0], w[1]);
            total += v;
            err += e;
            heap.push(Piece { a: w[0], b: w[1], value: v, error: e });
        }
        while err > self.abs_tol.max(self.rel_tol * total.abs()) {
            if heap.len() >= self.max_intervals {
                return Err(Error::Quadrature { value: total, error: err });
            }
            let p = heap.pop().expect("non-empty");
            let m = 0.5 * (p.a + p.b);
            if m <= p.a || m >= p.b {
                // Interval is at floating-point resolution; accept what we have.
                heap.push(p);
                break;
            }
            let (v1, e1) = gk15(&f, p.a, m);
            let (v2, e2) = gk15(&f, m, p.b);
            total += v1 + v2 - p.value;
            err += e1 + e2 - p.error;
            heap.push(Piece { a: p.a, b: m, value: v1, error: e1 });
            heap.push(Piece { a: m, b: p.b, value: v2, error: e2 });
        }
        // Re-sum to shed drift from the running updates.
        let (value, error) = heap.iter().fold((0.0, 0.0), |(s, e), p| (s + p.value, e + p.error));
        Ok(QuadResult { value, error, intervals: heap.len() })
    }
}

/// Integrates `g(w) = w^p h(w)` on [0, 1] for p > -1 via w = u^(1/(1+p)),
/// turning the power singularity into a smooth integrand. `g` is the full integrand.
pub fn power_substitution<F: Fn(f64) -> f64>(
    integrator: &Integrator,
    g: F,
    p: f64,
    upper: f64,
) -> Result<QuadResult> {
    // Scale to [0, upper]: w = upper * u^q, dw = upper * q * u^(q-1) du.
    let q = 1.0 / (1.0 + p);
    integrator.integrate(
        |u| {
            if u <= 0.0 {
                return 0.0;
            }
            let w = upper * u.powf(q);
            g(w) * upper * q * u.powf(q - 1.0)
        },
        0.0,
        1.0,
    )
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Gamma function, Lanczos approximation with reflection below 1/2.
pub fn gamma(x: f64) -> f64 {
    if x < 0.5 {
        std::f64::consts::PI / ((std::f64::consts::PI * x).sin() * gamma(1.0 - x))
    } else {
        let x = x - 1.0;
        let mut a = LANCZOS[0];
        let t = x + LANCZOS_G + 0.5;
        for (i, c) in LANCZOS.iter().enumerate().skip(1) {
            a += c / (x + i as f64);
        }
        (2.0 * std::f64::consts::PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * a
    }
}

/// Nodes and weights of the n-point Gauss-Laguerre rule for ∫_0^∞ e^{-s} f(s) ds.
pub fn gauss_laguerre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    let mut z = 0.0;
    for i in 0..n {
        // Initial guesses from the usual asymptotic recipes, then Newton on L_n.
        z = match i {
            0 => 3.0 / (1.0 + 2.4 * nf),
            1 => z + 15.0 / (1.0 + 2.5 * nf),
            _ => {
                let ai = (i - 1) as f64;
                z + ((1.0 + 2.55 * ai) / (1.9 * ai)) * (z - nodes[i - 2])
            }
        };
        for _ in 0..100 {
            let (mut p1, mut p2) = (1.0, 0.0);
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = ((2.0 * jf + 1.0 - z) * p2 - jf * p3) / (jf + 1.0);
            }
            let pp = nf * (p1 - p2) / z;
            let dz = p1 / pp;
            z -= dz;
            if dz.abs() <= 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        // Recompute L_{n-1} at the converged node for the weight formula.
        let (mut p1, mut p2) = (1.0, 0.0);
        for j in 0..n {
            let p3 = p2;
            p2 = p1;
            let jf = j as f64;
            p1 = ((2.0 * jf + 1.0 - z) * p2 - jf * p3) / (jf + 1.0);
        }
        nodes[i] = z;
        weights[i] = z / ((nf + 1.0) * (nf + 1.0) * lag_next(n + 1, z, p1, p2).powi(2));
    }
    (nodes, weights)
}

// L_{n+1}(z) from L_n and L_{n-1} via the three-term recurrence.
fn lag_next(np1: usize, z: f64, ln: f64, lnm1: f64) -> f64 {
    let n = (np1 - 1) as f64;
    ((2.0 * n + 1.0 - z) * ln - n * lnm1) / (n + 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_matches_factorials() {
        let mut fact = 1.0;
        for n in 1..15 {
            assert!((gamma(n as f64) - fact).abs() <= 1e-13 * fact, "n={n}");
            fact *= n as f64;
        }
        let half = std::f64::consts::PI.sqrt();
        assert!((gamma(0.5) - half).abs() < 1e-14);
        // Γ(2.5) = 3/4 √π
        assert!((gamma(2.5) - 0.75 * half).abs() < 1e-14);
        assert!((gamma(1.25) - 0.906_402_477_055_477).abs() < 1e-13);
    }

    #[test]
    fn gk_polynomial_and_smooth() {
        let q = Integrator::default();
        let r = q.integrate(|x| x.powi(6), 0.0, 2.0).unwrap();
        assert!((r.value - 128.0 / 7.0).abs() < 1e-12);
        let r = q.integrate(|x| x.sin(), 0.0, std::f64::consts::PI).unwrap();
        assert!((r.value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn power_substitution_removes_sqrt_singularity() {
        let q = Integrator::default();
        // ∫_0^4 w^{-1/2} dw = 4
        let r = power_substitution(&q, |w| w.powf(-0.5), -0.5, 4.0).unwrap();
        assert!((r.value - 4.0).abs() < 1e-12);
    }

    #[test]
    fn laguerre_integrates_moments() {
        let (x, w) = gauss_laguerre(40);
        let s0: f64 = w.iter().sum();
        assert!((s0 - 1.0).abs() < 1e-12);
        for p in 1..8 {
            let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(p)).sum();
            let exact = gamma(p as f64 + 1.0);
            assert!((s - exact).abs() < 1e-10 * exact, "p={p}: {s} vs {exact}");
        }
    }
}
