//! Python bindings.
//!
//! Spectral arrays cross the boundary as flat lists of `complex` in the
//! centred layout used by the core crate, x fastest.

use std::path::PathBuf;
use std::sync::Arc;

use fdkp::experiments::{self, ds_ground_state, run_eps_sweep};
use fdkp::minimizer::{
    gaussian_init, minimize_ground_state, newton_polish_fdkp, random_init, DescentOptions,
    NewtonOptions,
};
use fdkp::reduction::residual_report;
use fdkp::{symbols, Error, Field, Grid2D, Objective, PicardForm, Rep, C};
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

create_exception!(pyfdkp, FdkpError, PyException);
create_exception!(pyfdkp, SolverError, FdkpError);

fn py_err(e: Error) -> PyErr {
    match e {
        Error::InvalidConfig(_) | Error::GridMismatch(_) | Error::Support(_) => {
            PyValueError::new_err(e.to_string())
        }
        e if e.is_solver_failure() => SolverError::new_err(e.to_string()),
        e => FdkpError::new_err(e.to_string()),
    }
}

fn check_len(z: &[C], g: &Grid2D) -> PyResult<()> {
    if z.len() != g.len() {
        return Err(PyValueError::new_err(format!(
            "expected {} coefficients for a {}x{} grid, got {}",
            g.len(),
            g.nx,
            g.ny,
            z.len()
        )));
    }
    Ok(())
}

#[pyfunction]
fn find_min_speed(beta: f64) -> PyResult<(f64, f64)> {
    symbols::find_min_speed(beta).map_err(py_err)
}

#[pyfunction]
fn wave_speed(beta: f64, omega: f64) -> PyResult<f64> {
    symbols::wave_speed(beta, omega).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (beta, omega_max=6.0, samples=241))]
fn dispersion_csv(beta: f64, omega_max: f64, samples: usize) -> PyResult<String> {
    experiments::dispersion_csv(beta, omega_max, samples).map_err(py_err)
}

#[pyclass(name = "ModelParams", frozen)]
struct PyModelParams(fdkp::ModelParams);

#[pymethods]
impl PyModelParams {
    #[new]
    fn new(beta: f64) -> PyResult<Self> {
        fdkp::ModelParams::new(beta).map(Self).map_err(py_err)
    }
    #[getter]
    fn beta(&self) -> f64 {
        self.0.beta
    }
    #[getter]
    fn omega0(&self) -> f64 {
        self.0.omega0
    }
    #[getter]
    fn c0(&self) -> f64 {
        self.0.c0
    }
    #[getter]
    fn a1(&self) -> f64 {
        self.0.a1
    }
    #[getter]
    fn a2(&self) -> f64 {
        self.0.a2
    }
    #[getter]
    fn a3(&self) -> f64 {
        self.0.a3
    }
    #[getter]
    fn n2(&self) -> f64 {
        self.0.n2
    }
    fn __repr__(&self) -> String {
        format!(
            "ModelParams(beta={}, omega0={}, c0={})",
            self.0.beta, self.0.omega0, self.0.c0
        )
    }
}

/// Sweep and solver configuration.
#[pyclass(name = "Config", skip_from_py_object)]
#[derive(Clone)]
struct PyConfig(experiments::SweepConfig);

#[pymethods]
impl PyConfig {
    #[new]
    #[pyo3(signature = (beta=0.2, eps=None, n=None, lx=None, ly=None, ds_tol=None, teps_tol=None, max_iter=None, seed=0, literal=false))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        beta: f64,
        eps: Option<Vec<f64>>,
        n: Option<usize>,
        lx: Option<f64>,
        ly: Option<f64>,
        ds_tol: Option<f64>,
        teps_tol: Option<f64>,
        max_iter: Option<usize>,
        seed: u64,
        literal: bool,
    ) -> PyResult<Self> {
        let mut c = experiments::SweepConfig {
            beta,
            seed,
            ..Default::default()
        };
        if let Some(e) = eps {
            c.eps_list = e;
        }
        if let Some(n) = n {
            c.ds_nx = n;
            c.ds_ny = n;
        }
        if let Some(v) = lx {
            c.lx = v;
        }
        if let Some(v) = ly {
            c.ly = v;
        }
        if let Some(v) = ds_tol {
            c.ds_tol = v;
        }
        if let Some(v) = teps_tol {
            c.teps_tol = v;
        }
        if let Some(v) = max_iter {
            c.max_iter = v;
        }
        if literal {
            c.picard = PicardForm::Literal;
        }
        c.validate().map_err(py_err)?;
        Ok(Self(c))
    }
    #[getter]
    fn eps(&self) -> Vec<f64> {
        self.0.eps_list.clone()
    }
    fn describe(&self) -> String {
        self.0.describe()
    }
}

#[pyclass(name = "GroundState", frozen, get_all)]
struct PyGroundState {
    zeta: Vec<C>,
    q: f64,
    s: f64,
    t0: f64,
    t_eps: f64,
    lambda_star: f64,
    grad_norm: f64,
    iterations: usize,
    converged: bool,
    values: Vec<f64>,
}

impl From<fdkp::GroundStateReport> for PyGroundState {
    fn from(g: fdkp::GroundStateReport) -> Self {
        Self {
            zeta: g.zeta.values,
            q: g.report.q,
            s: g.report.s,
            t0: g.report.t0,
            t_eps: g.report.t_eps,
            lambda_star: g.lambda_star,
            grad_norm: g.grad_norm,
            iterations: g.iterations,
            converged: g.converged,
            values: g.values,
        }
    }
}

fn descent(tol: f64, max_iter: usize) -> DescentOptions {
    DescentOptions {
        tol,
        max_iter,
        ..DescentOptions::default()
    }
}

/// The DS limit functional on the commensurate envelope box.
#[pyclass(name = "DsProblem", frozen)]
struct PyDsProblem {
    inner: Arc<fdkp::DsProblem>,
    config: experiments::SweepConfig,
}

#[pymethods]
impl PyDsProblem {
    #[new]
    fn new(config: &PyConfig) -> PyResult<Self> {
        let ds = config.0.ds_problem().map_err(py_err)?;
        Ok(Self {
            inner: Arc::new(ds),
            config: config.0.clone(),
        })
    }
    #[getter]
    fn shape(&self) -> (usize, usize) {
        (self.inner.grid.nx, self.inner.grid.ny)
    }
    #[getter]
    fn lengths(&self) -> (f64, f64) {
        (self.inner.grid.lx, self.inner.grid.ly)
    }
    fn q(&self, z: Vec<C>) -> PyResult<f64> {
        check_len(&z, &self.inner.grid)?;
        Ok(self.inner.eval_q(&z))
    }
    fn s(&self, z: Vec<C>) -> PyResult<f64> {
        check_len(&z, &self.inner.grid)?;
        Ok(self.inner.eval_s(&z))
    }
    fn t0(&self, z: Vec<C>) -> PyResult<f64> {
        check_len(&z, &self.inner.grid)?;
        Ok(self.inner.eval_t0(&z))
    }
    fn grad_t0(&self, z: Vec<C>) -> PyResult<Vec<C>> {
        check_len(&z, &self.inner.grid)?;
        Ok(self.inner.grad_t0(&z))
    }
    /// `init` is `"gaussian"` or `"random"` (uses `seed`).
    #[pyo3(signature = (tol=1e-8, max_iter=3000, init="gaussian", seed=0))]
    fn ground_state(
        &self,
        py: Python<'_>,
        tol: f64,
        max_iter: usize,
        init: &str,
        seed: u64,
    ) -> PyResult<PyGroundState> {
        let ds = self.inner.clone();
        let start = match init {
            "gaussian" => None,
            "random" => Some(random_init(&ds, seed)),
            other => return Err(PyValueError::new_err(format!("unknown init {other:?}"))),
        };
        let gs = py
            .detach(move || match start {
                None => ds_ground_state(&ds, tol, max_iter),
                Some(z) => minimize_ground_state(&*ds, &z, &descent(tol, max_iter)),
            })
            .map_err(py_err)?;
        Ok(gs.into())
    }
    fn gaussian_init(&self) -> Vec<C> {
        gaussian_init(&self.inner)
    }
    fn random_init(&self, seed: u64) -> Vec<C> {
        random_init(&self.inner, seed)
    }
    /// FDKP problem at `eps` on the grid sized for this box.
    fn fdkp(&self, eps: f64) -> PyResult<PyFdkpProblem> {
        let p = self.config.fdkp_problem(&self.inner, eps).map_err(py_err)?;
        Ok(PyFdkpProblem(Arc::new(p)))
    }
}

#[pyclass(name = "Lift", frozen, get_all)]
struct PyLift {
    u: Vec<C>,
    u1: Vec<C>,
    uq: Vec<C>,
    uc: Vec<C>,
    u2: Vec<C>,
    iterations: usize,
    contraction_ratio: f64,
    fixed_point_defect: f64,
}

#[pyclass(name = "FdkpProblem", frozen)]
struct PyFdkpProblem(Arc<fdkp::FdkpProblem>);

#[pymethods]
impl PyFdkpProblem {
    #[getter]
    fn eps(&self) -> f64 {
        self.0.eps
    }
    #[getter]
    fn shape(&self) -> (usize, usize) {
        (self.0.grid().nx, self.0.grid().ny)
    }
    /// Restricts an envelope to the modes the scaling map keeps.
    fn project(&self, z: Vec<C>) -> Vec<C> {
        let mut z = z;
        self.0.map.project(&mut z);
        z
    }
    fn t_eps(&self, py: Python<'_>, z: Vec<C>) -> PyResult<f64> {
        let p = self.0.clone();
        py.detach(move || p.value(&z)).map_err(py_err)
    }
    fn lift(&self, py: Python<'_>, z: Vec<C>) -> PyResult<PyLift> {
        let p = self.0.clone();
        py.detach(move || {
            let st = p.lift(&z)?;
            let defect = p.fixed_point_defect(&st)?;
            Ok(PyLift {
                u: st.u,
                u1: st.u1,
                uq: st.uq,
                uc: st.uc,
                u2: st.u2,
                iterations: st.iterations,
                contraction_ratio: st.contraction_ratio,
                fixed_point_defect: defect,
            })
        })
        .map_err(py_err)
    }
    /// Returns the polished field and the residual history.
    #[pyo3(signature = (u, tol=1e-10))]
    fn polish(&self, py: Python<'_>, u: Vec<C>, tol: f64) -> PyResult<(Vec<C>, Vec<f64>)> {
        let p = self.0.clone();
        let opts = NewtonOptions {
            tol,
            ..NewtonOptions::default()
        };
        py.detach(move || newton_polish_fdkp(&p, &u, &opts))
            .map_err(py_err)
    }
    /// `(total, on the bi-disc, off the bi-disc)` relative residuals.
    fn residual(&self, u: Vec<C>) -> PyResult<(f64, f64, f64)> {
        check_len(&u, self.0.grid())?;
        let r = residual_report(&self.0, &u);
        Ok((r.total, r.z1, r.z2))
    }
    #[pyo3(signature = (z, tol=1e-8, max_iter=3000))]
    fn minimize(&self, py: Python<'_>, z: Vec<C>, tol: f64, max_iter: usize) -> PyResult<PyGroundState> {
        let p = self.0.clone();
        let gs = py
            .detach(move || {
                let mut z = z;
                p.project(&mut z);
                minimize_ground_state(&*p, &z, &descent(tol, max_iter))
            })
            .map_err(py_err)?;
        Ok(gs.into())
    }
}

/// Runs the eps sweep; returns `(csv_text, failures)` with failures as
/// `(eps, stage, message)`.
#[pyfunction]
#[pyo3(signature = (config, out=None))]
fn run_sweep(
    py: Python<'_>,
    config: &PyConfig,
    out: Option<PathBuf>,
) -> PyResult<(String, Vec<(f64, String, String)>)> {
    let cfg = config.0.clone();
    let outcome = py.detach(move || run_eps_sweep(&cfg)).map_err(py_err)?;
    if let Some(dir) = out {
        experiments::export_outcome(&outcome, &dir).map_err(py_err)?;
    }
    let failures = outcome
        .failures
        .iter()
        .map(|f| (f.eps, f.stage.to_string(), f.message.clone()))
        .collect();
    Ok((experiments::sweep_csv(&outcome.rows), failures))
}

/// Reads an FDKP1 file into a dict.
#[pyfunction]
fn read_field<'py>(py: Python<'py>, path: PathBuf) -> PyResult<Bound<'py, PyDict>> {
    let f = fdkp::io::read_field(&path, None).map_err(py_err)?;
    let d = PyDict::new(py);
    d.set_item("shape", (f.grid.nx, f.grid.ny))?;
    d.set_item("lengths", (f.grid.lx, f.grid.ly))?;
    d.set_item("spectral", f.rep == Rep::Spectral)?;
    d.set_item("real", f.real)?;
    d.set_item("values", f.values)?;
    Ok(d)
}

#[pyfunction]
#[pyo3(signature = (path, shape, lengths, values, spectral=true, real=false))]
fn write_field(
    path: PathBuf,
    shape: (usize, usize),
    lengths: (f64, f64),
    values: Vec<C>,
    spectral: bool,
    real: bool,
) -> PyResult<()> {
    let grid = Grid2D::new(shape.0, shape.1, lengths.0, lengths.1).map_err(py_err)?;
    check_len(&values, &grid)?;
    let f = Field {
        grid,
        values,
        rep: if spectral { Rep::Spectral } else { Rep::Physical },
        real,
    };
    fdkp::io::write_field(&path, &f).map_err(py_err)
}

/// `(name, passed, detail)` for every property check.
#[pyfunction]
fn run_checks(py: Python<'_>) -> Vec<(String, bool, String)> {
    py.detach(fdkp::checks::run_all)
        .into_iter()
        .map(|r| (r.name.to_string(), r.pass, r.detail))
        .collect()
}

#[pymodule]
fn pyfdkp(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("FdkpError", m.py().get_type::<FdkpError>())?;
    m.add("SolverError", m.py().get_type::<SolverError>())?;
    m.add("SWEEP_HEADER", experiments::SWEEP_HEADER)?;
    m.add_class::<PyModelParams>()?;
    m.add_class::<PyConfig>()?;
    m.add_class::<PyDsProblem>()?;
    m.add_class::<PyFdkpProblem>()?;
    m.add_class::<PyGroundState>()?;
    m.add_class::<PyLift>()?;
    m.add_function(wrap_pyfunction!(find_min_speed, m)?)?;
    m.add_function(wrap_pyfunction!(wave_speed, m)?)?;
    m.add_function(wrap_pyfunction!(dispersion_csv, m)?)?;
    m.add_function(wrap_pyfunction!(run_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(read_field, m)?)?;
    m.add_function(wrap_pyfunction!(write_field, m)?)?;
    m.add_function(wrap_pyfunction!(run_checks, m)?)?;
    Ok(())
}
