//! Key-value (TOML) configuration files for the experiment drivers, with
//! strict key checking, documented defaults, and a stable resolved echo for
//! provenance.

use std::path::Path;

use crate::config::BearingConfig;
use crate::error::ConfigError;
use crate::model::RotorMotion;

/// A single transient scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSpec {
    pub name: String,
    pub config: BearingConfig,
    pub motion: RotorMotion,
    pub t_end: f64,
    /// Keep every n-th record when writing the time series.
    pub record_stride: usize,
    /// Times at which pressure snapshots are written.
    pub snapshot_times: Vec<f64>,
}

/// A critical-angle sweep over forcing amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub name: String,
    pub config: BearingConfig,
    pub eps_values: Vec<f64>,
    /// One (safe, contact) bracket per amplitude.
    pub brackets: Vec<(f64, f64)>,
    pub n_periods: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConfigFile {
    Scenario(ScenarioSpec),
    Sweep(SweepSpec),
}

impl ConfigFile {
    pub fn name(&self) -> &str {
        match self {
            ConfigFile::Scenario(s) => &s.name,
            ConfigFile::Sweep(s) => &s.name,
        }
    }

    pub fn config(&self) -> &BearingConfig {
        match self {
            ConfigFile::Scenario(s) => &s.config,
            ConfigFile::Sweep(s) => &s.config,
        }
    }
}

/// In-repo scenario presets mirroring the paper's experiments with the
/// declared default dynamic parameters.
pub fn preset(name: &str) -> Option<&'static str> {
    match name {
        "example1" => Some(include_str!("../presets/example1.toml")),
        "example2" => Some(include_str!("../presets/example2.toml")),
        "safety-sweep" => Some(include_str!("../presets/safety-sweep.toml")),
        _ => None,
    }
}

pub const PRESET_NAMES: [&str; 3] = ["example1", "example2", "safety-sweep"];

pub fn parse_config(path: &Path) -> Result<ConfigFile, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_config_str(&text)
}

fn as_float(key: &str, v: &toml::Value) -> Result<f64, ConfigError> {
    match v {
        toml::Value::Float(f) => Ok(*f),
        toml::Value::Integer(i) => Ok(*i as f64),
        _ => Err(ConfigError::BadType {
            key: key.into(),
            expected: "a number",
        }),
    }
}

fn as_usize(key: &str, v: &toml::Value) -> Result<usize, ConfigError> {
    match v {
        toml::Value::Integer(i) if *i >= 0 => Ok(*i as usize),
        _ => Err(ConfigError::BadType {
            key: key.into(),
            expected: "a non-negative integer",
        }),
    }
}

fn as_string(key: &str, v: &toml::Value) -> Result<String, ConfigError> {
    match v {
        toml::Value::String(s) => Ok(s.clone()),
        _ => Err(ConfigError::BadType {
            key: key.into(),
            expected: "a string",
        }),
    }
}

fn as_float_array(key: &str, v: &toml::Value) -> Result<Vec<f64>, ConfigError> {
    match v {
        toml::Value::Array(items) => items
            .iter()
            .enumerate()
            .map(|(i, item)| as_float(&format!("{key}[{i}]"), item))
            .collect(),
        _ => Err(ConfigError::BadType {
            key: key.into(),
            expected: "an array of numbers",
        }),
    }
}

fn as_bracket(key: &str, v: &toml::Value) -> Result<(f64, f64), ConfigError> {
    let vals = as_float_array(key, v)?;
    if vals.len() != 2 || vals[0] >= vals[1] {
        return Err(ConfigError::Invalid(format!(
            "{key} must be [lo, hi] with lo < hi"
        )));
    }
    Ok((vals[0], vals[1]))
}

pub fn parse_config_str(text: &str) -> Result<ConfigFile, ConfigError> {
    let table: toml::Table = text
        .parse()
        .map_err(|e: toml::de::Error| ConfigError::Toml(e.to_string()))?;

    let mut cfg = BearingConfig::default();
    let mut name = String::from("scenario");
    let mut motion_kind: Option<String> = None;
    let mut t_end: Option<f64> = None;
    let mut n_periods_scenario: Option<usize> = None;
    let mut record_stride = 1usize;
    let mut snapshot_times: Vec<f64> = Vec::new();
    let mut sweep_table: Option<&toml::Table> = None;

    for (key, value) in &table {
        match key.as_str() {
            "a" => cfg.a = as_float(key, value)?,
            "beta" => cfg.beta = as_float(key, value)?,
            "eps" => cfg.eps = as_float(key, value)?,
            "sigma_t" => cfg.sigma_t = as_float(key, value)?,
            "re_star" => cfg.re_star = as_float(key, value)?,
            "alpha" => cfg.alpha = as_float(key, value)?,
            "d_a" => cfg.d_a = as_float(key, value)?,
            "k_z" => cfg.k_z = as_float(key, value)?,
            "p_inner" => cfg.p_inner = as_float(key, value)?,
            "p_outer" => cfg.p_outer = as_float(key, value)?,
            "p_ambient" => cfg.p_ambient = as_float(key, value)?,
            "face_tol" => cfg.face_tol = as_float(key, value)?,
            "source_phase" => cfg.source_phase = as_float(key, value)?,
            "n_r" => cfg.n_r = as_usize(key, value)?,
            "n_theta" => cfg.n_theta = as_usize(key, value)?,
            "solver_tol" => cfg.solver_tol = as_float(key, value)?,
            "dt_base" => cfg.stepping.dt_base = as_float(key, value)?,
            "dt_min" => cfg.stepping.dt_min = as_float(key, value)?,
            "g_ref" => cfg.stepping.g_ref = as_float(key, value)?,
            "theta_max" => cfg.adaptivity.theta_max = as_float(key, value)?,
            "theta_min" => cfg.adaptivity.theta_min = as_float(key, value)?,
            "refine_interval" => cfg.adaptivity.refine_interval = as_usize(key, value)?,
            "g_trigger" => cfg.adaptivity.g_trigger = as_float(key, value)?,
            "max_refine_level" => cfg.adaptivity.max_refine_level = as_usize(key, value)? as u32,
            "name" => name = as_string(key, value)?,
            "motion" => motion_kind = Some(as_string(key, value)?),
            "t_end" => t_end = Some(as_float(key, value)?),
            "n_periods" => n_periods_scenario = Some(as_usize(key, value)?),
            "record_stride" => record_stride = as_usize(key, value)?.max(1),
            "snapshot_times" => snapshot_times = as_float_array(key, value)?,
            "sweep" => match value {
                toml::Value::Table(t) => sweep_table = Some(t),
                _ => {
                    return Err(ConfigError::BadType {
                        key: key.clone(),
                        expected: "a table",
                    })
                }
            },
            _ => return Err(ConfigError::UnknownKey(key.clone())),
        }
    }

    cfg.validate()?;

    if let Some(sweep) = sweep_table {
        for bad in ["motion", "t_end", "snapshot_times"] {
            if table.contains_key(bad) {
                return Err(ConfigError::Invalid(format!(
                    "key `{bad}` is not allowed in a sweep config"
                )));
            }
        }
        let mut eps_values: Option<Vec<f64>> = None;
        let mut bracket = (0.0, 0.4);
        let mut brackets_override: Option<Vec<(f64, f64)>> = None;
        let mut n_periods = 5usize;
        for (key, value) in sweep {
            let path = format!("sweep.{key}");
            match key.as_str() {
                "eps" => eps_values = Some(as_float_array(&path, value)?),
                "beta_bracket" => bracket = as_bracket(&path, value)?,
                "beta_brackets" => match value {
                    toml::Value::Array(items) => {
                        let mut out = Vec::new();
                        for (i, item) in items.iter().enumerate() {
                            out.push(as_bracket(&format!("{path}[{i}]"), item)?);
                        }
                        brackets_override = Some(out);
                    }
                    _ => {
                        return Err(ConfigError::BadType {
                            key: path,
                            expected: "an array of [lo, hi] pairs",
                        })
                    }
                },
                "n_periods" => n_periods = as_usize(&path, value)?,
                _ => return Err(ConfigError::UnknownKey(path)),
            }
        }
        let eps_values = eps_values
            .ok_or_else(|| ConfigError::Invalid("sweep.eps is required".into()))?;
        if eps_values.is_empty() {
            return Err(ConfigError::Invalid("sweep.eps must not be empty".into()));
        }
        if !eps_values.windows(2).all(|w| w[0] < w[1]) || eps_values[0] <= 0.0 {
            return Err(ConfigError::Invalid(
                "sweep.eps values must be positive and strictly increasing".into(),
            ));
        }
        if n_periods < 1 {
            return Err(ConfigError::Invalid("sweep.n_periods must be >= 1".into()));
        }
        let brackets = match brackets_override {
            Some(b) => {
                if b.len() != eps_values.len() {
                    return Err(ConfigError::Invalid(format!(
                        "sweep.beta_brackets has {} entries for {} amplitudes",
                        b.len(),
                        eps_values.len()
                    )));
                }
                b
            }
            None => vec![bracket; eps_values.len()],
        };
        return Ok(ConfigFile::Sweep(SweepSpec {
            name,
            config: cfg,
            eps_values,
            brackets,
            n_periods,
        }));
    }

    let t_end = match (t_end, n_periods_scenario) {
        (Some(t), _) => t,
        (None, Some(n)) => n as f64 * std::f64::consts::TAU,
        (None, None) => 5.0 * std::f64::consts::TAU,
    };
    if !(t_end > 0.0) {
        return Err(ConfigError::Invalid(format!(
            "t_end must be positive, got {t_end}"
        )));
    }
    for &s in &snapshot_times {
        if !(0.0..=t_end).contains(&s) {
            return Err(ConfigError::Invalid(format!(
                "snapshot time {s} lies outside [0, {t_end}]"
            )));
        }
    }
    let motion = match motion_kind.as_deref().unwrap_or("stationary") {
        "stationary" => RotorMotion::Stationary,
        "sinusoidal" => RotorMotion::Sinusoidal { eps: cfg.eps },
        "bump" => RotorMotion::Bump { eps: cfg.eps },
        other => {
            return Err(ConfigError::Invalid(format!(
                "motion must be one of stationary|sinusoidal|bump, got `{other}`"
            )))
        }
    };

    Ok(ConfigFile::Scenario(ScenarioSpec {
        name,
        config: cfg,
        motion,
        t_end,
        record_stride,
        snapshot_times,
    }))
}

/// Stable TOML echo of a resolved configuration, written next to the outputs
/// for provenance.
pub fn resolved_toml(file: &ConfigFile) -> String {
    fn kv(out: &mut String, k: &str, v: String) {
        out.push_str(k);
        out.push_str(" = ");
        out.push_str(&v);
        out.push('\n');
    }
    let cfg = file.config();
    let mut out = String::new();
    let mut push = |k: &str, v: String| kv(&mut out, k, v);
    push("name", format!("{:?}", file.name()));
    push("a", fmt_f(cfg.a));
    push("beta", fmt_f(cfg.beta));
    push("eps", fmt_f(cfg.eps));
    push("sigma_t", fmt_f(cfg.sigma_t));
    push("re_star", fmt_f(cfg.re_star));
    push("alpha", fmt_f(cfg.alpha));
    push("d_a", fmt_f(cfg.d_a));
    push("k_z", fmt_f(cfg.k_z));
    push("p_inner", fmt_f(cfg.p_inner));
    push("p_outer", fmt_f(cfg.p_outer));
    push("p_ambient", fmt_f(cfg.p_ambient));
    push("face_tol", fmt_f(cfg.face_tol));
    push("source_phase", fmt_f(cfg.source_phase));
    push("n_r", cfg.n_r.to_string());
    push("n_theta", cfg.n_theta.to_string());
    push("solver_tol", fmt_f(cfg.solver_tol));
    push("dt_base", fmt_f(cfg.stepping.dt_base));
    push("dt_min", fmt_f(cfg.stepping.dt_min));
    push("g_ref", fmt_f(cfg.stepping.g_ref));
    push("theta_max", fmt_f(cfg.adaptivity.theta_max));
    push("theta_min", fmt_f(cfg.adaptivity.theta_min));
    push("refine_interval", cfg.adaptivity.refine_interval.to_string());
    push("g_trigger", fmt_f(cfg.adaptivity.g_trigger));
    push(
        "max_refine_level",
        cfg.adaptivity.max_refine_level.to_string(),
    );
    drop(push);
    match file {
        ConfigFile::Scenario(s) => {
            let kind = match s.motion {
                RotorMotion::Stationary => "stationary",
                RotorMotion::Sinusoidal { .. } => "sinusoidal",
                RotorMotion::Bump { .. } => "bump",
            };
            kv(&mut out, "motion", format!("{kind:?}"));
            kv(&mut out, "t_end", fmt_f(s.t_end));
            kv(&mut out, "record_stride", s.record_stride.to_string());
            let times: Vec<String> = s.snapshot_times.iter().map(|&t| fmt_f(t)).collect();
            kv(&mut out, "snapshot_times", format!("[{}]", times.join(", ")));
        }
        ConfigFile::Sweep(s) => {
            out.push_str("\n[sweep]\n");
            let eps: Vec<String> = s.eps_values.iter().map(|&e| fmt_f(e)).collect();
            kv(&mut out, "eps", format!("[{}]", eps.join(", ")));
            let brackets: Vec<String> = s
                .brackets
                .iter()
                .map(|&(lo, hi)| format!("[{}, {}]", fmt_f(lo), fmt_f(hi)))
                .collect();
            kv(&mut out, "beta_brackets", format!("[{}]", brackets.join(", ")));
            kv(&mut out, "n_periods", s.n_periods.to_string());
        }
    }
    out
}

fn fmt_f(v: f64) -> String {
    if v == v.trunc() && v.abs() < 1e15 {
        format!("{v:.1}")
    } else {
        format!("{v}")
    }
}
