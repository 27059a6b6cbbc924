//! Error reports, log-log slope fits and CSV output.

use super::config::{ExperimentConfig, Scheme};
use crate::error::{Error, Result};
use std::io::Write;
use std::path::Path;

pub const CSV_HEADER: &str = "scheme,alpha,eps,dt,nx,nv,vmax,error,slope_or_order,walltime_s";

/// Errors outside this window are treated as saturated and left out of slope fits.
pub const FIT_WINDOW: (f64, f64) = (1e-7, 1e-1);

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub scheme: Scheme,
    pub alpha: f64,
    pub eps: f64,
    pub dt: f64,
    pub nx: usize,
    pub nv: usize,
    pub vmax: f64,
    pub error: f64,
    /// Local slope or order against the previous row; NaN where undefined.
    pub slope_or_order: f64,
    pub walltime_s: f64,
}

impl ReportRow {
    pub fn new(cfg: &ExperimentConfig, eps: f64, dt: f64, error: f64, slope_or_order: f64, walltime_s: f64) -> Self {
        Self {
            scheme: cfg.scheme,
            alpha: cfg.alpha(),
            eps,
            dt,
            nx: cfg.nx(),
            nv: cfg.nv(),
            vmax: cfg.vmax(),
            error,
            slope_or_order,
            walltime_s,
        }
    }

    fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.scheme,
            self.alpha,
            self.eps,
            self.dt,
            self.nx,
            self.nv,
            self.vmax,
            self.error,
            self.slope_or_order,
            self.walltime_s
        )
    }
}

/// Least-squares line through (log x, log y).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual in log space.
    pub residual: f64,
    pub points: usize,
}

/// Fits log y = slope·log x + c over the points whose y lies in [`FIT_WINDOW`].
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> Result<SlopeFit> {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x > 0.0 && (FIT_WINDOW.0..=FIT_WINDOW.1).contains(*y))
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    let n = pts.len();
    if n < 3 {
        return Err(Error::TooFewPoints(n));
    }
    let nf = n as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / nf;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::TooFewPoints(1));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    Ok(SlopeFit { slope, intercept, residual: (ss / nf).sqrt(), points: n })
}

/// log(e_i/e_{i-1}) / log(x_i/x_{i-1}), NaN for the first point or non-positive errors.
pub fn local_slopes(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    (0..xs.len())
        .map(|i| {
            if i == 0 || ys[i] <= 0.0 || ys[i - 1] <= 0.0 {
                f64::NAN
            } else {
                (ys[i] / ys[i - 1]).ln() / (xs[i] / xs[i - 1]).ln()
            }
        })
        .collect()
}

#[derive(Debug, Clone, Default)]
pub struct ErrorReport {
    pub rows: Vec<ReportRow>,
    /// Global fit; None when there were too few points in the window.
    pub fit: Option<SlopeFit>,
    pub warnings: Vec<String>,
}

impl ErrorReport {
    pub fn errors(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.error).collect()
    }

    pub fn max_error(&self) -> f64 {
        self.rows.iter().map(|r| r.error).fold(0.0, f64::max)
    }

    pub fn final_error(&self) -> Option<f64> {
        self.rows.last().map(|r| r.error)
    }

    /// Whether the error decays along the sequence instead of levelling off:
    /// final error below half the largest one.
    pub fn is_uniform(&self) -> bool {
        self.final_error().is_some_and(|f| f < 0.5 * self.max_error())
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{CSV_HEADER}")?;
        for r in &self.rows {
            writeln!(out, "{}", r.csv_line())?;
        }
        Ok(())
    }
}

pub fn emit_csv(report: &ErrorReport, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path)?;
    let mut w = std::io::BufWriter::new(file);
    report.write_csv(&mut w)?;
    w.flush()?;
    Ok(())
}
