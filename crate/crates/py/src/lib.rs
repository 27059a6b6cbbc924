//! Python bindings: configs, single runs, sweeps, constants and the error metric.

use apkin_core::constants::FractionalConstants;
use apkin_core::equilibrium::{heavy_tail_normalization, make_equilibrium, EquilibriumKind};
use apkin_core::grid::VelocityGrid;
use apkin_core::harness::{self, CflPolicy, ErrorReport, ExperimentConfig, ReportRow, Scheme};
use apkin_core::micromacro::Stencil;
use pyo3::exceptions::{PyKeyError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn err(e: apkin_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse<T: std::str::FromStr<Err = apkin_core::Error>>(s: &str) -> PyResult<T> {
    s.parse().map_err(err)
}

/// Experiment configuration. Keyword arguments mirror the config file keys.
#[pyclass(name = "Config")]
#[derive(Clone)]
struct PyConfig {
    inner: ExperimentConfig,
}

impl PyConfig {
    fn set(&mut self, key: &str, value: &Bound<'_, PyAny>) -> PyResult<()> {
        let c = &mut self.inner;
        match key {
            "scheme" => c.scheme = parse(&value.extract::<String>()?)?,
            "alpha" => c.alpha = value.extract()?,
            "eps" => c.eps = value.extract()?,
            "eps_list" => c.eps_list = value.extract()?,
            "dt" => c.dt = value.extract()?,
            "dt_list" => c.dt_list = value.extract()?,
            "tfinal" => c.tfinal = value.extract()?,
            "half_width" => c.half_width = value.extract()?,
            "nx" => c.nx = value.extract()?,
            "nv" => c.nv = value.extract()?,
            "vmax" => c.vmax = value.extract()?,
            "equilibrium" => {
                c.equilibrium = value.extract::<Option<String>>()?.map(|s| parse::<EquilibriumKind>(&s)).transpose()?
            }
            "stencil" => c.stencil = parse::<Stencil>(&value.extract::<String>()?)?,
            "use_continuous_constants" => c.use_continuous_constants = value.extract()?,
            "reference" => c.reference = value.extract::<Option<String>>()?.map(|s| parse::<Scheme>(&s)).transpose()?,
            "reference_dt" => c.reference_dt = value.extract()?,
            "cfl" => {
                c.cfl = match value.extract::<String>()?.as_str() {
                    "warn" => CflPolicy::Warn,
                    "error" => CflPolicy::Error,
                    "adapt" => CflPolicy::Adapt,
                    other => return Err(PyValueError::new_err(format!("unknown cfl policy '{other}'"))),
                }
            }
            "truncate_history" => c.truncate_history = value.extract()?,
            "wgrid_vmax" => c.wgrid_vmax = value.extract()?,
            "wgrid_nv" => c.wgrid_nv = value.extract()?,
            _ => return Err(PyKeyError::new_err(key.to_string())),
        }
        Ok(())
    }
}

#[pymethods]
impl PyConfig {
    #[new]
    #[pyo3(signature = (scheme = "isa", **kwargs))]
    fn new(scheme: &str, kwargs: Option<&Bound<'_, PyDict>>) -> PyResult<Self> {
        let mut cfg = Self { inner: ExperimentConfig::new(parse(scheme)?) };
        if let Some(kw) = kwargs {
            for (k, v) in kw.iter() {
                cfg.set(&k.extract::<String>()?, &v)?;
            }
        }
        Ok(cfg)
    }

    #[staticmethod]
    fn from_toml(text: &str) -> PyResult<Self> {
        Ok(Self { inner: ExperimentConfig::from_toml(text).map_err(err)? })
    }

    fn to_toml(&self) -> String {
        self.inner.to_toml()
    }

    /// Copy with the given fields replaced.
    #[pyo3(signature = (**kwargs))]
    fn replace(&self, kwargs: Option<&Bound<'_, PyDict>>) -> PyResult<Self> {
        let mut c = self.clone();
        if let Some(kw) = kwargs {
            for (k, v) in kw.iter() {
                c.set(&k.extract::<String>()?, &v)?;
            }
        }
        Ok(c)
    }

    #[getter]
    fn scheme(&self) -> String {
        self.inner.scheme.to_string()
    }
    #[getter]
    fn alpha(&self) -> f64 {
        self.inner.alpha()
    }
    #[getter]
    fn eps(&self) -> f64 {
        self.inner.eps
    }
    #[getter]
    fn dt(&self) -> f64 {
        self.inner.dt
    }
    #[getter]
    fn tfinal(&self) -> f64 {
        self.inner.tfinal
    }
    #[getter]
    fn nx(&self) -> usize {
        self.inner.nx()
    }
    #[getter]
    fn nv(&self) -> usize {
        self.inner.nv()
    }
    #[getter]
    fn vmax(&self) -> f64 {
        self.inner.vmax()
    }

    fn __repr__(&self) -> String {
        format!("Config({:?})", self.inner)
    }
}

fn row_dict<'py>(py: Python<'py>, r: &ReportRow) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new_bound(py);
    d.set_item("scheme", r.scheme.to_string())?;
    d.set_item("alpha", r.alpha)?;
    d.set_item("eps", r.eps)?;
    d.set_item("dt", r.dt)?;
    d.set_item("nx", r.nx)?;
    d.set_item("nv", r.nv)?;
    d.set_item("vmax", r.vmax)?;
    d.set_item("error", r.error)?;
    d.set_item("slope_or_order", r.slope_or_order)?;
    d.set_item("walltime_s", r.walltime_s)?;
    Ok(d)
}

/// Rows of a sweep plus the global log-log fit.
#[pyclass(name = "Report")]
struct PyReport {
    inner: ErrorReport,
}

#[pymethods]
impl PyReport {
    #[getter]
    fn rows<'py>(&self, py: Python<'py>) -> PyResult<Vec<Bound<'py, PyDict>>> {
        self.inner.rows.iter().map(|r| row_dict(py, r)).collect()
    }
    #[getter]
    fn errors(&self) -> Vec<f64> {
        self.inner.errors()
    }
    /// Fitted slope, or None when fewer than 3 errors fell in the fit window.
    #[getter]
    fn slope(&self) -> Option<f64> {
        self.inner.fit.map(|f| f.slope)
    }
    #[getter]
    fn fit_residual(&self) -> Option<f64> {
        self.inner.fit.map(|f| f.residual)
    }
    #[getter]
    fn warnings(&self) -> Vec<String> {
        self.inner.warnings.clone()
    }
    fn is_uniform(&self) -> bool {
        self.inner.is_uniform()
    }
    fn to_csv(&self) -> PyResult<String> {
        let mut buf = Vec::new();
        self.inner.write_csv(&mut buf).map_err(err)?;
        Ok(String::from_utf8(buf).expect("ascii csv"))
    }
    fn __len__(&self) -> usize {
        self.inner.rows.len()
    }
}

/// Integrates the configured scheme; returns a dict with `rho`, `error`, `dt`, `warnings`, `row`.
#[pyfunction]
fn run<'py>(py: Python<'py>, config: &PyConfig) -> PyResult<Bound<'py, PyDict>> {
    let cfg = config.inner.clone();
    let out = py.allow_threads(|| harness::run_scheme(&cfg)).map_err(err)?;
    let d = PyDict::new_bound(py);
    d.set_item("rho", out.rho)?;
    d.set_item("error", out.row.error)?;
    d.set_item("dt", out.row.dt)?;
    d.set_item("warnings", out.warnings)?;
    d.set_item("row", row_dict(py, &out.row)?)?;
    Ok(d)
}

#[pyfunction]
fn sweep_eps(py: Python<'_>, config: &PyConfig) -> PyResult<PyReport> {
    let cfg = config.inner.clone();
    Ok(PyReport { inner: py.allow_threads(|| harness::sweep_epsilon(&cfg)).map_err(err)? })
}

#[pyfunction]
fn sweep_dt(py: Python<'_>, config: &PyConfig) -> PyResult<PyReport> {
    let cfg = config.inner.clone();
    Ok(PyReport { inner: py.allow_threads(|| harness::sweep_dt(&cfg)).map_err(err)? })
}

#[pyfunction]
fn uniform(py: Python<'_>, config: &PyConfig) -> PyResult<PyReport> {
    let cfg = config.inner.clone();
    Ok(PyReport { inner: py.allow_threads(|| harness::uniform_study(&cfg)).map_err(err)? })
}

/// ‖ref − test‖₂ / ‖ref‖₂ over the nodes.
#[pyfunction]
fn relative_error(rho_ref: Vec<f64>, rho_test: Vec<f64>) -> PyResult<f64> {
    harness::relative_error(&rho_ref, &rho_test).map_err(err)
}

/// κ, A, the printed normalization and the identity residual for one α (d = 1).
#[pyfunction]
fn constants<'py>(py: Python<'py>, alpha: f64) -> PyResult<Bound<'py, PyDict>> {
    let m = heavy_tail_normalization(alpha + 1.0).map_err(err)?;
    let c = FractionalConstants::new(alpha, 1, m).map_err(err)?;
    let d = PyDict::new_bound(py);
    d.set_item("alpha", alpha)?;
    d.set_item("m", m)?;
    d.set_item("kappa", c.kappa)?;
    d.set_item("a_const", c.a_const)?;
    d.set_item("c_paper", c.c_paper)?;
    d.set_item("identity_residual", c.identity_residual())?;
    Ok(d)
}

/// (nodes, weights, values) of a discrete equilibrium on the midpoint grid.
#[pyfunction]
#[pyo3(signature = (kind, vmax, nv, beta = 2.5))]
fn equilibrium(kind: &str, vmax: f64, nv: usize, beta: f64) -> PyResult<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let grid = VelocityGrid::midpoint(vmax, nv).map_err(err)?;
    let eq = make_equilibrium(parse(kind)?, beta, &grid).map_err(err)?;
    Ok((eq.grid.nodes.clone(), eq.grid.weights.clone(), eq.values))
}

#[pyfunction]
fn schemes() -> Vec<&'static str> {
    Scheme::ALL.iter().map(|s| s.name()).collect()
}

#[pymodule]
fn apkin(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyConfig>()?;
    m.add_class::<PyReport>()?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(sweep_eps, m)?)?;
    m.add_function(wrap_pyfunction!(sweep_dt, m)?)?;
    m.add_function(wrap_pyfunction!(uniform, m)?)?;
    m.add_function(wrap_pyfunction!(relative_error, m)?)?;
    m.add_function(wrap_pyfunction!(constants, m)?)?;
    m.add_function(wrap_pyfunction!(equilibrium, m)?)?;
    m.add_function(wrap_pyfunction!(schemes, m)?)?;
    Ok(())
}
