//! Python bindings: configuration, equilibrium search, transient runs,
//! pressure snapshots and the critical-angle bisection.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use sealsim::reynolds::{solve_film, FilmSnapshot};
use sealsim::scenario::{parse_config_str, ConfigFile};
use sealsim::{
    classify_contact, critical_angle, find_equilibrium, run_transient, AnnulusMesh, BearingConfig,
    RotorMotion,
};

fn motion_from(kind: &str, eps: f64) -> PyResult<RotorMotion> {
    match kind {
        "stationary" => Ok(RotorMotion::Stationary),
        "sinusoidal" => Ok(RotorMotion::Sinusoidal { eps }),
        "bump" => Ok(RotorMotion::Bump { eps }),
        other => Err(PyValueError::new_err(format!(
            "motion must be stationary|sinusoidal|bump, got {other:?}"
        ))),
    }
}

/// Nondimensional parameters and numerical controls for one simulation.
#[pyclass(name = "BearingConfig", from_py_object)]
#[derive(Clone)]
struct PyBearingConfig {
    inner: BearingConfig,
}

#[pymethods]
impl PyBearingConfig {
    #[getter]
    fn a(&self) -> f64 {
        self.inner.a
    }

    #[getter]
    fn beta(&self) -> f64 {
        self.inner.beta
    }

    #[getter]
    fn eps(&self) -> f64 {
        self.inner.eps
    }

    #[getter]
    fn sigma_t(&self) -> f64 {
        self.inner.sigma_t
    }

    #[getter]
    fn re_star(&self) -> f64 {
        self.inner.re_star
    }

    #[getter]
    fn alpha(&self) -> f64 {
        self.inner.alpha
    }

    #[getter]
    fn d_a(&self) -> f64 {
        self.inner.d_a
    }

    #[getter]
    fn k_z(&self) -> f64 {
        self.inner.k_z
    }

    #[getter]
    fn p_inner(&self) -> f64 {
        self.inner.p_inner
    }

    #[getter]
    fn p_outer(&self) -> f64 {
        self.inner.p_outer
    }

    #[getter]
    fn p_ambient(&self) -> f64 {
        self.inner.p_ambient
    }

    #[getter]
    fn face_tol(&self) -> f64 {
        self.inner.face_tol
    }

    #[getter]
    fn source_phase(&self) -> f64 {
        self.inner.source_phase
    }

    #[getter]
    fn solver_tol(&self) -> f64 {
        self.inner.solver_tol
    }

    /// BearingConfig(**overrides): defaults with keyword overrides, e.g.
    /// BearingConfig(beta=0.25, eps=1.2).
    #[new]
    #[pyo3(signature = (**kwargs))]
    fn new(kwargs: Option<&Bound<'_, PyDict>>) -> PyResult<Self> {
        let mut cfg = BearingConfig::default();
        if let Some(kwargs) = kwargs {
            for (key, value) in kwargs.iter() {
                let key: String = key.extract()?;
                match key.as_str() {
                    "a" => cfg.a = value.extract()?,
                    "beta" => cfg.beta = value.extract()?,
                    "eps" => cfg.eps = value.extract()?,
                    "sigma_t" => cfg.sigma_t = value.extract()?,
                    "re_star" => cfg.re_star = value.extract()?,
                    "alpha" => cfg.alpha = value.extract()?,
                    "d_a" => cfg.d_a = value.extract()?,
                    "k_z" => cfg.k_z = value.extract()?,
                    "p_inner" => cfg.p_inner = value.extract()?,
                    "p_outer" => cfg.p_outer = value.extract()?,
                    "p_ambient" => cfg.p_ambient = value.extract()?,
                    "face_tol" => cfg.face_tol = value.extract()?,
                    "source_phase" => cfg.source_phase = value.extract()?,
                    "n_r" => cfg.n_r = value.extract()?,
                    "n_theta" => cfg.n_theta = value.extract()?,
                    "solver_tol" => cfg.solver_tol = value.extract()?,
                    "dt_base" => cfg.stepping.dt_base = value.extract()?,
                    "dt_min" => cfg.stepping.dt_min = value.extract()?,
                    "g_ref" => cfg.stepping.g_ref = value.extract()?,
                    "theta_max" => cfg.adaptivity.theta_max = value.extract()?,
                    "theta_min" => cfg.adaptivity.theta_min = value.extract()?,
                    "refine_interval" => cfg.adaptivity.refine_interval = value.extract()?,
                    "g_trigger" => cfg.adaptivity.g_trigger = value.extract()?,
                    "max_refine_level" => cfg.adaptivity.max_refine_level = value.extract()?,
                    other => {
                        return Err(PyValueError::new_err(format!(
                            "unknown config field {other:?}"
                        )))
                    }
                }
            }
        }
        cfg.validate()
            .map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(PyBearingConfig { inner: cfg })
    }

    /// Parse a TOML scenario/sweep config and return its BearingConfig.
    #[staticmethod]
    fn from_toml(text: &str) -> PyResult<Self> {
        let file: ConfigFile =
            parse_config_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(PyBearingConfig {
            inner: file.config().clone(),
        })
    }

    #[getter]
    fn n_r(&self) -> usize {
        self.inner.n_r
    }

    #[getter]
    fn n_theta(&self) -> usize {
        self.inner.n_theta
    }

    fn __repr__(&self) -> String {
        format!(
            "BearingConfig(a={}, beta={}, eps={}, alpha={}, d_a={}, k_z={})",
            self.inner.a,
            self.inner.beta,
            self.inner.eps,
            self.inner.alpha,
            self.inner.d_a,
            self.inner.k_z
        )
    }
}

/// Rotor height h_R(t) for a motion law.
#[pyfunction]
fn rotor_height(kind: &str, eps: f64, t: f64) -> PyResult<f64> {
    Ok(motion_from(kind, eps)?.height(t))
}

/// Film thickness h(r, theta) for the given stator/rotor heights and tilt.
#[pyfunction]
#[pyo3(signature = (r, theta, h_s, h_rotor, beta, source_phase = 0.0))]
fn gap(r: f64, theta: f64, h_s: f64, h_rotor: f64, beta: f64, source_phase: f64) -> f64 {
    sealsim::gap(r, theta, h_s, h_rotor, beta, source_phase)
}

/// Minimum face clearance g = h_s - h_R - |beta|.
#[pyfunction]
fn min_clearance(h_s: f64, h_rotor: f64, beta: f64) -> f64 {
    sealsim::min_clearance(h_s, h_rotor, beta)
}

/// Stationary-rotor equilibrium: returns (h_s_eq, residual, force).
#[pyfunction]
fn equilibrium(cfg: &PyBearingConfig) -> PyResult<(f64, f64, f64)> {
    let eq = find_equilibrium(&cfg.inner).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    Ok((eq.h_s, eq.residual, eq.force))
}

/// Integrate a disturbance scenario from equilibrium. Returns a dict of
/// per-step columns plus contact info (or None).
#[pyfunction]
#[pyo3(signature = (cfg, motion, t_end))]
fn transient<'py>(
    py: Python<'py>,
    cfg: &PyBearingConfig,
    motion: &str,
    t_end: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let motion = motion_from(motion, cfg.inner.eps)?;
    let result = run_transient(&cfg.inner, motion, t_end, &mut ())
        .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    let dict = PyDict::new(py);
    let col = |f: fn(&sealsim::TimeSeriesRecord) -> f64| -> Vec<f64> {
        result.records.iter().map(f).collect()
    };
    dict.set_item("t", col(|r| r.t))?;
    dict.set_item("h_s", col(|r| r.h_s))?;
    dict.set_item("dh_s_dt", col(|r| r.dh_s_dt))?;
    dict.set_item("F", col(|r| r.force))?;
    dict.set_item("g", col(|r| r.g))?;
    dict.set_item("dt", col(|r| r.dt))?;
    dict.set_item(
        "n_cells",
        result.records.iter().map(|r| r.n_cells).collect::<Vec<_>>(),
    )?;
    dict.set_item("h_s_eq", result.h_s_eq)?;
    match result.contact {
        Some(c) => {
            dict.set_item("contact_t", c.t_contact)?;
            dict.set_item("g_min", c.g_min)?;
        }
        None => dict.set_item("contact_t", py.None())?,
    }
    Ok(dict)
}

/// Solve one quasistatic pressure field on a uniformly refined mesh.
/// Returns (force, x, y, p) with nodal coordinates and pressures.
#[pyfunction]
#[pyo3(signature = (cfg, h_s, h_rotor = 0.0, dh_dt = 0.0, refinements = 0))]
fn pressure_snapshot(
    cfg: &PyBearingConfig,
    h_s: f64,
    h_rotor: f64,
    dh_dt: f64,
    refinements: usize,
) -> PyResult<(f64, Vec<f64>, Vec<f64>, Vec<f64>)> {
    let cfg = &cfg.inner;
    let mut mesh = AnnulusMesh::build_coarse_annulus(cfg.a, cfg.n_r, cfg.n_theta)
        .map_err(|e| PyValueError::new_err(e.to_string()))?;
    mesh.set_max_level(cfg.adaptivity.max_refine_level.max(refinements as u32));
    mesh.refine_uniform(refinements);
    let snap = FilmSnapshot::from_config(cfg, h_s, h_rotor, dh_dt);
    let (field, force) =
        solve_film(&mesh, &snap, cfg).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut ps = Vec::new();
    for &v in mesh.active_nodes() {
        let p = mesh.vertex(v);
        xs.push(p[0]);
        ys.push(p[1]);
        ps.push(field.values[v]);
    }
    Ok((force, xs, ys, ps))
}

/// Classify one (eps, beta) pair as contact/safe over n_periods.
#[pyfunction]
fn classify(cfg: &PyBearingConfig, eps: f64, beta: f64, n_periods: usize) -> PyResult<bool> {
    let probe = classify_contact(&cfg.inner, eps, beta, n_periods)
        .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    Ok(probe.contact)
}

/// Bisect the critical misalignment angle. Returns (beta_crit, audit) where
/// audit is a list of (beta, contact) probes.
#[pyfunction]
#[pyo3(signature = (cfg, eps, n_periods = 5, lo = 0.0, hi = 0.4))]
fn critical_beta(
    cfg: &PyBearingConfig,
    eps: f64,
    n_periods: usize,
    lo: f64,
    hi: f64,
) -> PyResult<(f64, Vec<(f64, bool)>)> {
    let result = critical_angle(&cfg.inner, eps, n_periods, (lo, hi))
        .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    let audit = result.audit.iter().map(|p| (p.beta, p.contact)).collect();
    Ok((result.beta_crit, audit))
}

#[pymodule]
fn sealsim_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyBearingConfig>()?;
    m.add_function(wrap_pyfunction!(rotor_height, m)?)?;
    m.add_function(wrap_pyfunction!(gap, m)?)?;
    m.add_function(wrap_pyfunction!(min_clearance, m)?)?;
    m.add_function(wrap_pyfunction!(equilibrium, m)?)?;
    m.add_function(wrap_pyfunction!(transient, m)?)?;
    m.add_function(wrap_pyfunction!(pressure_snapshot, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(critical_beta, m)?)?;
    Ok(())
}
