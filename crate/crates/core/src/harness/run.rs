//! Single-run dispatch: build grids from a config, integrate the selected scheme to T.

use super::config::{CflPolicy, ExperimentConfig, Scheme};
use super::report::ReportRow;
use crate::duhamel::{cn_variant_step, duhamel_step, CoefficientTable, HistoryBuffer, Kernel, Truncation};
use crate::equilibrium::{make_equilibrium, Equilibrium};
use crate::error::{Error, Result};
use crate::grid::{SpatialGrid, VelocityGrid};
use crate::implicit::{isa_step, isd_step, ImplicitState};
use crate::limit::{exact_limit_density, limit_step, LimitConfig};
use crate::micromacro::{cfl_max_dt, mmsa_step, mmsd_step, MicroMacro, MicroMacroState};
use crate::spectral::{from_spectral, initial_condition, initial_density, to_spectral};
use crate::tail::TailQuadrature;
use std::time::Instant;

/// Grids and velocity data shared by every scheme of one config.
#[derive(Debug, Clone)]
pub struct Setup {
    pub sgrid: SpatialGrid,
    pub eq: Equilibrium,
    pub tail: Option<TailQuadrature>,
}

impl Setup {
    pub fn new(cfg: &ExperimentConfig) -> Result<Self> {
        let sgrid = SpatialGrid::new(cfg.half_width, cfg.nx())?;
        let vgrid = VelocityGrid::midpoint(cfg.vmax(), cfg.nv())?;
        let eq = make_equilibrium(cfg.equilibrium(), cfg.beta(), &vgrid)?;
        let tail = match (eq.beta, cfg.wgrid_vmax, cfg.wgrid_nv) {
            (None, ..) => None,
            (Some(_), None, None) => Some(TailQuadrature::from_equilibrium(&eq)?),
            (Some(_), wv, wn) => {
                let wgrid = VelocityGrid::midpoint(wv.unwrap_or(cfg.vmax()), wn.unwrap_or(cfg.nv()))?;
                Some(TailQuadrature::with_grid(&eq, &wgrid)?)
            }
        };
        Ok(Self { sgrid, eq, tail })
    }

    fn tail(&self, what: &'static str) -> Result<&TailQuadrature> {
        self.tail.as_ref().ok_or(Error::NeedsHeavyTail(what))
    }

    pub fn limit_config(&self, scheme: Scheme, dt: f64, continuous: bool) -> Result<LimitConfig> {
        Ok(match (scheme.limit(), continuous) {
            (Scheme::Ds, false) => LimitConfig::ds(&self.eq, dt),
            (Scheme::Ds, true) => LimitConfig::ds_continuous(dt),
            (_, false) => LimitConfig::ads(self.tail("ADS")?, dt),
            (_, true) => LimitConfig::ads_continuous(&self.eq, dt)?,
        })
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    /// ρ(T, x_j) in physical space.
    pub rho: Vec<f64>,
    pub row: ReportRow,
    pub warnings: Vec<String>,
}

/// Δt actually used, after the micro-macro stability check.
fn checked_dt(cfg: &ExperimentConfig, setup: &Setup, dt: f64, warnings: &mut Vec<String>) -> Result<f64> {
    if !cfg.scheme.is_micro_macro() {
        return Ok(dt);
    }
    let vmax = setup.eq.nodes().iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let bound = cfl_max_dt(cfg.eps, cfg.alpha(), setup.sgrid.dx(), vmax, cfg.stencil);
    if dt <= bound {
        return Ok(dt);
    }
    match cfg.cfl {
        CflPolicy::Warn => {
            warnings.push(format!("dt={dt} exceeds the stability bound {bound:.3e} at eps={}", cfg.eps));
            Ok(dt)
        }
        CflPolicy::Error => Err(Error::Cfl { dt, bound }),
        CflPolicy::Adapt => {
            let n = (cfg.tfinal / bound).ceil();
            let adapted = cfg.tfinal / n;
            warnings.push(format!("dt={dt} reduced to {adapted:.6e} (bound {bound:.3e})"));
            Ok(adapted)
        }
    }
}

/// Integrates `cfg.scheme` to `cfg.tfinal` with step `dt`.
pub fn integrate(cfg: &ExperimentConfig, setup: &Setup, dt: f64) -> Result<(Vec<f64>, f64, Vec<String>)> {
    let mut warnings = Vec::new();
    let dt = checked_dt(cfg, setup, dt, &mut warnings)?;
    let steps = cfg.steps(dt)?;
    let (sgrid, eq) = (&setup.sgrid, &setup.eq);
    let (eps, alpha) = (cfg.eps, cfg.alpha());
    let rho = match cfg.scheme {
        Scheme::Isd | Scheme::Isa => {
            let mut st = ImplicitState::new(initial_condition(sgrid, eq), eq.weights(), eps, dt, alpha)?;
            if cfg.scheme == Scheme::Isa {
                let tail = setup.tail("ISA")?;
                for _ in 0..steps {
                    isa_step(&mut st, sgrid, eq, tail);
                }
            } else {
                for _ in 0..steps {
                    isd_step(&mut st, sgrid, eq);
                }
            }
            from_spectral(&st.rho)?
        }
        Scheme::Mmsd | Scheme::Mmsa => {
            let mut st = MicroMacroState::new(initial_density(sgrid), eq.len(), eps, dt, alpha)?;
            let mm = MicroMacro::new(sgrid.clone(), eq.clone(), cfg.stencil);
            if cfg.scheme == Scheme::Mmsa {
                let tail = setup.tail("MMSA")?;
                for _ in 0..steps {
                    mmsa_step(&mut st, &mm, tail);
                }
            } else {
                for _ in 0..steps {
                    mmsd_step(&mut st, &mm);
                }
            }
            st.rho
        }
        Scheme::Dsd | Scheme::Dsa | Scheme::DsaCn => {
            let kernel = match cfg.scheme {
                Scheme::Dsd => Kernel::Diffusion(eq, alpha),
                _ => Kernel::Anomalous(setup.tail("DSA")?),
            };
            let table = CoefficientTable::build(kernel, sgrid, eps, dt, steps);
            let trunc = if cfg.truncate_history { Truncation::Below1e16 } else { Truncation::Off };
            let mut hist = HistoryBuffer::new(initial_condition(sgrid, eq), eq.weights());
            for n in 0..steps {
                if cfg.scheme == Scheme::DsaCn {
                    cn_variant_step(&mut hist, &table, n, sgrid, eq, trunc)?;
                } else {
                    duhamel_step(&mut hist, &table, n, sgrid, eq, trunc)?;
                }
            }
            from_spectral(hist.latest())?
        }
        Scheme::Ds | Scheme::Ads => {
            let lc = setup.limit_config(cfg.scheme, dt, cfg.use_continuous_constants)?;
            let mut rho = to_spectral(&initial_density(sgrid))?;
            for _ in 0..steps {
                limit_step(&mut rho, sgrid, &lc);
            }
            from_spectral(&rho)?
        }
    };
    Ok((rho, dt, warnings))
}

/// ‖ρ_ref − ρ_test‖₂ / ‖ρ_ref‖₂ over the spatial nodes.
pub fn relative_error(rho_ref: &[f64], rho_test: &[f64]) -> Result<f64> {
    if rho_ref.len() != rho_test.len() {
        return Err(Error::LengthMismatch { expected: rho_ref.len(), got: rho_test.len() });
    }
    let den: f64 = rho_ref.iter().map(|r| r * r).sum();
    if den == 0.0 {
        return Err(Error::ZeroReference);
    }
    let num: f64 = rho_ref.iter().zip(rho_test).map(|(r, t)| (r - t) * (r - t)).sum();
    Ok((num / den).sqrt())
}

/// Reference density for the error column of a single run.
///
/// Limit schemes without an explicit reference compare against the exact limit solution;
/// everything else against `cfg.reference` (default: the scheme's limit solver) at
/// `cfg.reference_dt` (default: the run's Δt).
pub fn reference_density(cfg: &ExperimentConfig, setup: &Setup, dt: f64) -> Result<Vec<f64>> {
    let rcfg = ExperimentConfig {
        scheme: cfg.reference.unwrap_or(cfg.scheme.limit()),
        ..cfg.resolved()
    };
    if cfg.reference.is_none() && cfg.scheme.is_limit() {
        let lc = setup.limit_config(cfg.scheme, dt, cfg.use_continuous_constants)?;
        let rho0 = to_spectral(&initial_density(&setup.sgrid))?;
        return from_spectral(&exact_limit_density(cfg.tfinal, &rho0, &setup.sgrid, &lc));
    }
    Ok(integrate(&rcfg, setup, cfg.reference_dt.unwrap_or(dt))?.0)
}

/// Runs the configured scheme once at `cfg.dt` and measures it against its reference.
pub fn run_scheme(cfg: &ExperimentConfig) -> Result<RunOutput> {
    cfg.validate()?;
    let cfg = cfg.resolved();
    let setup = Setup::new(&cfg)?;
    let start = Instant::now();
    let (rho, dt, warnings) = integrate(&cfg, &setup, cfg.dt)?;
    let walltime = start.elapsed().as_secs_f64();
    let reference = reference_density(&cfg, &setup, dt)?;
    let error = relative_error(&reference, &rho)?;
    Ok(RunOutput { rho, row: ReportRow::new(&cfg, cfg.eps, dt, error, f64::NAN, walltime), warnings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn relative_error_examples() {
        let x: Vec<f64> = (0..64).map(|j| -1.0 + j as f64 / 32.0).collect();
        let s: Vec<f64> = x.iter().map(|x| (PI * x).sin()).collect();
        let twice: Vec<f64> = s.iter().map(|v| 2.0 * v).collect();
        assert_eq!(relative_error(&s, &s).unwrap(), 0.0);
        assert!((relative_error(&s, &twice).unwrap() - 1.0).abs() < 1e-15);
        assert!((relative_error(&s, &vec![0.0; 64]).unwrap() - 1.0).abs() < 1e-15);
        assert!(matches!(relative_error(&vec![0.0; 64], &s), Err(Error::ZeroReference)));
        assert!(relative_error(&s, &s[..10]).is_err());
    }

    #[test]
    fn ads_matches_exact_solution_to_first_order() {
        let out = run_scheme(&ExperimentConfig::new(Scheme::Ads)).unwrap();
        assert!(out.row.error < 5e-3, "{}", out.row.error);
        assert!(out.row.error > 0.0);
    }

    #[test]
    fn isa_near_limit_matches_ads() {
        let cfg = ExperimentConfig { eps: 1e-6, ..ExperimentConfig::new(Scheme::Isa) };
        let out = run_scheme(&cfg).unwrap();
        assert!(out.row.error <= 1e-4, "{}", out.row.error);
    }

    #[test]
    fn every_scheme_keeps_unit_mean() {
        for scheme in Scheme::ALL {
            let cfg = ExperimentConfig { tfinal: 0.02, eps: 0.5, cfl: CflPolicy::Adapt, ..ExperimentConfig::new(scheme) };
            let out = run_scheme(&cfg).unwrap();
            let mean = out.rho.iter().sum::<f64>() / out.rho.len() as f64;
            assert!((mean - 1.0).abs() < 1e-12, "{scheme}: {mean}");
        }
    }

    #[test]
    fn runs_are_deterministic() {
        let cfg = ExperimentConfig { eps: 0.1, tfinal: 0.02, ..ExperimentConfig::new(Scheme::Dsa) };
        let a = run_scheme(&cfg).unwrap();
        let b = run_scheme(&cfg).unwrap();
        assert_eq!(a.rho, b.rho);
        assert_eq!(a.row.error.to_bits(), b.row.error.to_bits());
    }

    #[test]
    fn cfl_policies() {
        let base = ExperimentConfig { eps: 1.0, dt: 1e-2, ..ExperimentConfig::new(Scheme::Mmsd) };
        assert!(!run_scheme(&base).unwrap().warnings.is_empty());
        let strict = ExperimentConfig { cfl: CflPolicy::Error, ..base.clone() };
        assert!(matches!(run_scheme(&strict), Err(Error::Cfl { .. })));
        let adapt = ExperimentConfig { cfl: CflPolicy::Adapt, ..base };
        let out = run_scheme(&adapt).unwrap();
        assert!(out.row.dt < 1e-2);
        assert!(out.rho.iter().all(|r| r.is_finite() && r.abs() < 10.0));
    }
}
