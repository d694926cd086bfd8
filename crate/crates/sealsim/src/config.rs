//! Nondimensional parameters and numerical controls for one simulation.

use crate::error::ConfigError;

/// Clearance threshold below which mesh adaptivity activates.
pub const G_TRIGGER_DEFAULT: f64 = 2.0e-2;

/// Step-size controller: shrinks the time step linearly with the minimum
/// face clearance and clamps it to `[dt_min, dt_base]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepController {
    pub dt_base: f64,
    pub dt_min: f64,
    /// Clearance scale below which the step starts shrinking.
    pub g_ref: f64,
}

impl Default for StepController {
    fn default() -> Self {
        let dt_base = std::f64::consts::TAU / 200.0;
        StepController {
            dt_base,
            dt_min: dt_base / 256.0,
            g_ref: G_TRIGGER_DEFAULT,
        }
    }
}

impl StepController {
    /// dt = clamp(dt_base * min(1, g/g_ref), dt_min, dt_base); monotone
    /// non-decreasing in g.
    pub fn choose_dt(&self, g: f64) -> f64 {
        let scale = (g / self.g_ref).min(1.0);
        (self.dt_base * scale).clamp(self.dt_min, self.dt_base)
    }

    fn validate(&self) -> Result<(), ConfigError> {
        if !(self.dt_base > 0.0) {
            return Err(ConfigError::Invalid(format!(
                "dt_base must be positive, got {}",
                self.dt_base
            )));
        }
        if !(self.dt_min > 0.0 && self.dt_min <= self.dt_base) {
            return Err(ConfigError::Invalid(format!(
                "dt_min must satisfy 0 < dt_min <= dt_base, got dt_min = {}, dt_base = {}",
                self.dt_min, self.dt_base
            )));
        }
        if !(self.g_ref > 0.0) {
            return Err(ConfigError::Invalid(format!(
                "g_ref must be positive, got {}",
                self.g_ref
            )));
        }
        Ok(())
    }
}

/// Controls for the dynamic mesh refinement loop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptivityConfig {
    /// Refine cells with eta > theta_max * max eta.
    pub theta_max: f64,
    /// Coarsen cells with eta < theta_min * max eta.
    pub theta_min: f64,
    /// Steps between adapt decisions.
    pub refine_interval: usize,
    /// Clearance below which adaptivity activates.
    pub g_trigger: f64,
    /// Maximum refinement level above the coarse mesh.
    pub max_refine_level: u32,
}

impl Default for AdaptivityConfig {
    fn default() -> Self {
        AdaptivityConfig {
            theta_max: 0.3,
            theta_min: 0.03,
            refine_interval: 5,
            g_trigger: G_TRIGGER_DEFAULT,
            max_refine_level: 6,
        }
    }
}

impl AdaptivityConfig {
    fn validate(&self) -> Result<(), ConfigError> {
        if !(self.theta_min > 0.0 && self.theta_min < self.theta_max && self.theta_max <= 1.0) {
            return Err(ConfigError::Invalid(format!(
                "marking fractions must satisfy 0 < theta_min < theta_max <= 1, got theta_min = {}, theta_max = {}",
                self.theta_min, self.theta_max
            )));
        }
        if self.refine_interval < 1 {
            return Err(ConfigError::Invalid(
                "refine_interval must be >= 1".into(),
            ));
        }
        if !(self.g_trigger > 0.0) {
            return Err(ConfigError::Invalid(format!(
                "g_trigger must be positive, got {}",
                self.g_trigger
            )));
        }
        Ok(())
    }
}

/// All nondimensional parameters, tolerances, and numerical controls for one
/// simulation of the misaligned face seal.
#[derive(Debug, Clone, PartialEq)]
pub struct BearingConfig {
    /// Inner radius of the annulus, in (0, 1).
    pub a: f64,
    /// Misalignment angle (nondimensional, small-angle scaled).
    pub beta: f64,
    /// Forcing amplitude of the prescribed rotor motion.
    pub eps: f64,
    /// Scaled squeeze number weighting the dh/dt term.
    pub sigma_t: f64,
    /// Reynolds-number ratio scaling multiplying the wedge source.
    pub re_star: f64,
    /// Force coupling coefficient in the stator equation.
    pub alpha: f64,
    /// External damping coefficient.
    pub d_a: f64,
    /// Restoring stiffness.
    pub k_z: f64,
    /// Pressure on the inner boundary ring.
    pub p_inner: f64,
    /// Pressure on the outer boundary ring.
    pub p_outer: f64,
    /// Ambient pressure subtracted in the force integral.
    pub p_ambient: f64,
    /// Clearance below which rotor-stator contact is declared.
    pub face_tol: f64,
    /// Azimuthal phase of the wedge source term and gap formula.
    pub source_phase: f64,
    /// Radial cell count of the coarse mesh.
    pub n_r: usize,
    /// Azimuthal cell count of the coarse mesh.
    pub n_theta: usize,
    /// Relative residual tolerance for the pressure solves.
    pub solver_tol: f64,
    pub stepping: StepController,
    pub adaptivity: AdaptivityConfig,
}

impl Default for BearingConfig {
    fn default() -> Self {
        BearingConfig {
            a: 0.2,
            beta: 0.0,
            eps: 1.2,
            sigma_t: 1.0,
            re_star: 1.0,
            alpha: 1.0,
            d_a: 0.5,
            k_z: 5.0,
            p_inner: 1.0,
            p_outer: 2.0,
            p_ambient: 1.0,
            face_tol: 1.0e-4,
            source_phase: 0.0,
            n_r: 8,
            n_theta: 40,
            solver_tol: 1.0e-10,
            stepping: StepController::default(),
            adaptivity: AdaptivityConfig::default(),
        }
    }
}

impl BearingConfig {
    /// Checks every invariant, returning the first violation with the
    /// constraint spelled out.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.a > 0.0 && self.a < 1.0) {
            return Err(ConfigError::Invalid(format!(
                "a must lie in (0, 1), got {}",
                self.a
            )));
        }
        if !(self.sigma_t > 0.0) {
            return Err(ConfigError::Invalid(format!(
                "sigma_t must be positive, got {}",
                self.sigma_t
            )));
        }
        if !(self.face_tol > 0.0) {
            return Err(ConfigError::Invalid(format!(
                "face_tol must be positive, got {}",
                self.face_tol
            )));
        }
        if !(self.k_z > 0.0) {
            return Err(ConfigError::Invalid(format!(
                "k_z must be positive, got {}",
                self.k_z
            )));
        }
        if !(self.d_a >= 0.0) {
            return Err(ConfigError::Invalid(format!(
                "d_a must be non-negative, got {}",
                self.d_a
            )));
        }
        if !(self.eps >= 0.0) {
            return Err(ConfigError::Invalid(format!(
                "eps must be non-negative, got {}",
                self.eps
            )));
        }
        if self.n_r < 1 || self.n_theta < 4 {
            return Err(ConfigError::Invalid(format!(
                "coarse grid needs n_r >= 1 and n_theta >= 4, got {} x {}",
                self.n_r, self.n_theta
            )));
        }
        if !(self.solver_tol > 0.0) {
            return Err(ConfigError::Invalid(format!(
                "solver_tol must be positive, got {}",
                self.solver_tol
            )));
        }
        self.stepping.validate()?;
        self.adaptivity.validate()?;
        Ok(())
    }
}
