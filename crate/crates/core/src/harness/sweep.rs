//! ε-sweeps, Δt-sweeps and the coupled Δt = ε^α uniformity study.

use super::config::ExperimentConfig;
use super::report::{fit_slope, local_slopes, ErrorReport, ReportRow};
use super::run::{integrate, relative_error, Setup};
use crate::error::{Error, Result};
use rayon::prelude::*;
use std::time::Instant;

/// Default coupled sequence for [`uniform_study`].
pub const UNIFORM_DT: [f64; 4] = [1e-1, 1e-2, 1e-3, 1e-4];
pub const UNIFORM_REFERENCE_DT: f64 = 1e-6;

struct Point {
    eps: f64,
    dt: f64,
    error: f64,
    walltime: f64,
    warnings: Vec<String>,
}

/// One test run against one reference run; `reference` gets the test run's effective Δt.
fn measure<R>(cfg: &ExperimentConfig, setup: &Setup, dt: f64, reference: R) -> Result<Point>
where
    R: Fn(f64) -> Result<Vec<f64>>,
{
    let start = Instant::now();
    let (rho, dt, warnings) = integrate(cfg, setup, dt)?;
    let walltime = start.elapsed().as_secs_f64();
    let error = relative_error(&reference(dt)?, &rho)?;
    if !error.is_finite() {
        return Err(Error::InvalidParameter(format!("non-finite error at eps={}, dt={dt}", cfg.eps)));
    }
    Ok(Point { eps: cfg.eps, dt, error, walltime, warnings })
}

fn assemble(cfg: &ExperimentConfig, points: Vec<Point>, abscissa: impl Fn(&Point) -> f64) -> ErrorReport {
    let xs: Vec<f64> = points.iter().map(&abscissa).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.error).collect();
    let slopes = local_slopes(&xs, &ys);
    let fit = fit_slope(&xs, &ys).ok();
    let mut warnings = Vec::new();
    let rows = points
        .into_iter()
        .zip(slopes)
        .map(|(p, s)| {
            warnings.extend(p.warnings);
            ReportRow::new(cfg, p.eps, p.dt, p.error, s, p.walltime)
        })
        .collect();
    ErrorReport { rows, fit, warnings }
}

fn prepare(cfg: &ExperimentConfig, list: &[f64], name: &str) -> Result<(ExperimentConfig, Setup)> {
    if list.is_empty() {
        return Err(Error::Config(format!("{name} is empty")));
    }
    cfg.validate()?;
    let cfg = cfg.resolved();
    let setup = Setup::new(&cfg)?;
    Ok((cfg, setup))
}

/// Errors against the limit solver (or `cfg.reference`) at the same Δt, one run per ε.
pub fn sweep_epsilon(cfg: &ExperimentConfig) -> Result<ErrorReport> {
    let (cfg, setup) = prepare(cfg, &cfg.eps_list, "eps_list")?;
    let rcfg = ExperimentConfig { scheme: cfg.reference.unwrap_or(cfg.scheme.limit()), ..cfg.clone() };
    let points = cfg
        .eps_list
        .par_iter()
        .map(|&eps| {
            let run = ExperimentConfig { eps, ..cfg.clone() };
            let rrun = ExperimentConfig { eps, ..rcfg.clone() };
            measure(&run, &setup, cfg.dt, |dt| Ok(integrate(&rrun, &setup, cfg.reference_dt.unwrap_or(dt))?.0))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(assemble(&cfg, points, |p| p.eps))
}

/// Observed time order against a self-reference at Δt_min/16 (or `cfg.reference_dt`).
pub fn sweep_dt(cfg: &ExperimentConfig) -> Result<ErrorReport> {
    let (cfg, setup) = prepare(cfg, &cfg.dt_list, "dt_list")?;
    let dt_min = cfg.dt_list.iter().cloned().fold(f64::INFINITY, f64::min);
    let rcfg = ExperimentConfig { scheme: cfg.reference.unwrap_or(cfg.scheme), ..cfg.clone() };
    let reference = integrate(&rcfg, &setup, cfg.reference_dt.unwrap_or(dt_min / 16.0))?.0;
    let points = cfg
        .dt_list
        .par_iter()
        .map(|&dt| measure(&cfg, &setup, dt, |_| Ok(reference.clone())))
        .collect::<Result<Vec<_>>>()?;
    Ok(assemble(&cfg, points, |p| p.dt))
}

/// Runs along Δt_i with ε_i = Δt_i^{1/α} (list from `cfg.dt_list`, default [`UNIFORM_DT`]),
/// each against the limit solver at a fine Δt.
pub fn uniform_study(cfg: &ExperimentConfig) -> Result<ErrorReport> {
    let list = if cfg.dt_list.is_empty() { UNIFORM_DT.to_vec() } else { cfg.dt_list.clone() };
    let cfg = ExperimentConfig { dt_list: list, ..cfg.clone() };
    let (cfg, setup) = prepare(&cfg, &cfg.dt_list, "dt_list")?;
    let alpha = cfg.alpha();
    let rscheme = cfg.reference.unwrap_or(cfg.scheme.limit());
    let rdt = cfg.reference_dt.unwrap_or(UNIFORM_REFERENCE_DT);
    let fixed = if rscheme.is_limit() {
        Some(integrate(&ExperimentConfig { scheme: rscheme, ..cfg.clone() }, &setup, rdt)?.0)
    } else {
        None
    };
    let points = cfg
        .dt_list
        .par_iter()
        .map(|&dt| {
            let eps = dt.powf(1.0 / alpha);
            let run = ExperimentConfig { eps, ..cfg.clone() };
            measure(&run, &setup, dt, |_| match &fixed {
                Some(r) => Ok(r.clone()),
                None => Ok(integrate(&ExperimentConfig { scheme: rscheme, ..run.clone() }, &setup, rdt)?.0),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(assemble(&cfg, points, |p| p.dt))
}
