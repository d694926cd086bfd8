//! Time integration of the stator equation quasistatically coupled to the
//! pressure solve: classical RK4 with a clearance-scheduled step size,
//! equilibrium search, contact detection, and the critical-misalignment-angle
//! bisection.

use crate::adaptivity::adapt_step;
use crate::config::BearingConfig;
use crate::error::{DynamicsError, SolverError};
use crate::mesh::AnnulusMesh;
use crate::model::{min_clearance, RotorMotion, StatorState};
use crate::reynolds::{solve_film, FilmSnapshot, PressureField};

/// Upper end of the stator-height bracket scanned for an equilibrium.
const EQUILIBRIUM_H_MAX: f64 = 8.0;
/// Residual target for the equilibrium force balance.
const EQUILIBRIUM_RESIDUAL_TOL: f64 = 1e-10;
/// Clearance floor for the lower bracket end of the equilibrium scan; caps
/// face_tol there so that oversized contact tolerances (which themselves
/// imply contact at t = 0) cannot push the bracket past the root.
const EQUILIBRIUM_GAP_FLOOR: f64 = 1e-3;

/// Per-step scalar outputs of a transient run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeSeriesRecord {
    pub t: f64,
    pub h_s: f64,
    pub dh_s_dt: f64,
    pub force: f64,
    pub g: f64,
    pub dt: f64,
    pub n_cells: usize,
    pub n_dofs: usize,
}

/// First clearance violation of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContactEvent {
    pub t_contact: f64,
    /// Minimum clearance observed over the whole run.
    pub g_min: f64,
}

#[derive(Debug, Clone)]
pub struct TransientResult {
    pub records: Vec<TimeSeriesRecord>,
    pub contact: Option<ContactEvent>,
    pub h_s_eq: f64,
}

/// Equilibrium of the stationary-rotor force balance
/// K_z (h_s - 1) = alpha * F(h_s).
#[derive(Debug, Clone, Copy)]
pub struct EquilibriumReport {
    pub h_s: f64,
    pub residual: f64,
    /// Static pressure force at the equilibrium height.
    pub force: f64,
    pub iterations: usize,
}

/// Observer invoked once per accepted step with the record and the pressure
/// field the recorded force was computed from.
pub trait StepObserver {
    fn on_step(&mut self, record: &TimeSeriesRecord, mesh: &AnnulusMesh, field: &PressureField);
}

/// No-op observer.
impl StepObserver for () {
    fn on_step(&mut self, _: &TimeSeriesRecord, _: &AnnulusMesh, _: &PressureField) {}
}

/// One classical RK4 step of the first-order system (x1, x2) with nodes
/// c = (0, 1/2, 1/2, 1) and weights b = (1/6, 1/3, 1/3, 1/6). The right-hand
/// side is evaluated as rhs(t, x1, x2) -> (dx1, dx2); the k1 stage may be
/// supplied by the caller to avoid a duplicate evaluation.
pub fn rk4_step<E>(
    state: StatorState,
    dt: f64,
    k1: Option<(f64, f64)>,
    mut rhs: impl FnMut(f64, f64, f64) -> Result<(f64, f64), E>,
) -> Result<StatorState, E> {
    let StatorState { x1, x2, t } = state;
    let k1 = match k1 {
        Some(k) => k,
        None => rhs(t, x1, x2)?,
    };
    let half = 0.5 * dt;
    let k2 = rhs(t + half, x1 + half * k1.0, x2 + half * k1.1)?;
    let k3 = rhs(t + half, x1 + half * k2.0, x2 + half * k2.1)?;
    let k4 = rhs(t + dt, x1 + dt * k3.0, x2 + dt * k3.1)?;
    Ok(StatorState {
        x1: x1 + dt / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0),
        x2: x2 + dt / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1),
        t: t + dt,
    })
}

/// Coupled simulation state: the mesh evolves with the run.
pub struct Simulator<'a> {
    pub mesh: AnnulusMesh,
    cfg: &'a BearingConfig,
    motion: RotorMotion,
}

impl<'a> Simulator<'a> {
    pub fn new(cfg: &'a BearingConfig, motion: RotorMotion) -> Result<Self, DynamicsError> {
        let mut mesh = AnnulusMesh::build_coarse_annulus(cfg.a, cfg.n_r, cfg.n_theta)?;
        mesh.set_max_level(cfg.adaptivity.max_refine_level);
        Ok(Simulator { mesh, cfg, motion })
    }

    pub fn motion(&self) -> RotorMotion {
        self.motion
    }

    /// Pressure solve at the given ODE state; returns the force and field.
    fn force_at(&self, t: f64, x1: f64, x2: f64) -> Result<(f64, PressureField), SolverError> {
        let h_rotor = self.motion.height(t);
        let dh_dt = x2 - self.motion.height_rate(t);
        let snap = FilmSnapshot::from_config(self.cfg, x1, h_rotor, dh_dt);
        let (field, force) = solve_film(&self.mesh, &snap, self.cfg)?;
        Ok((force, field))
    }

    /// Right-hand side of the stator system:
    /// dx1 = x2, dx2 = alpha F - D_a x2 - K_z (x1 - 1).
    pub fn ode_rhs(&self, t: f64, x1: f64, x2: f64) -> Result<(f64, f64), SolverError> {
        let (force, _) = self.force_at(t, x1, x2)?;
        Ok(self.accel(force, x1, x2))
    }

    fn accel(&self, force: f64, x1: f64, x2: f64) -> (f64, f64) {
        let cfg = self.cfg;
        (
            x2,
            cfg.alpha * force - cfg.d_a * x2 - cfg.k_z * (x1 - 1.0),
        )
    }
}

/// Finds the stationary-rotor equilibrium height by bracketing and bisecting
/// the force balance K_z (h_s - 1) = alpha * F(h_s, 0, 0) on the coarse mesh.
pub fn find_equilibrium(cfg: &BearingConfig) -> Result<EquilibriumReport, DynamicsError> {
    let sim = Simulator::new(cfg, RotorMotion::Stationary)?;
    let residual_of = |h: f64| -> Result<(f64, f64), SolverError> {
        let snap = FilmSnapshot::from_config(cfg, h, 0.0, 0.0);
        let (_, force) = solve_film(&sim.mesh, &snap, cfg)?;
        Ok((cfg.alpha * force - cfg.k_z * (h - 1.0), force))
    };

    let lo0 = cfg.beta.abs() + cfg.face_tol.min(EQUILIBRIUM_GAP_FLOOR);
    let hi0 = EQUILIBRIUM_H_MAX;
    let (res_lo, _) = residual_of(lo0).map_err(DynamicsError::Solver)?;
    let (res_hi, _) = residual_of(hi0).map_err(DynamicsError::Solver)?;
    if res_lo.signum() == res_hi.signum() {
        return Err(DynamicsError::NoBracket { lo: lo0, hi: hi0 });
    }
    let (mut lo, mut hi) = (lo0, hi0);
    let mut iterations = 0;
    loop {
        let mid = 0.5 * (lo + hi);
        let (res, force) = residual_of(mid).map_err(DynamicsError::Solver)?;
        iterations += 1;
        if res.abs() <= EQUILIBRIUM_RESIDUAL_TOL || hi - lo <= 1e-13 * mid.max(1.0) {
            return Ok(EquilibriumReport {
                h_s: mid,
                residual: res,
                force,
                iterations,
            });
        }
        if res.signum() == res_lo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
        if iterations >= 200 {
            return Ok(EquilibriumReport {
                h_s: mid,
                residual: res,
                force,
                iterations,
            });
        }
    }
}

/// Integrates the coupled system from equilibrium until `t_end`, or earlier
/// on contact. Records one row per step plus the final state.
pub fn run_transient(
    cfg: &BearingConfig,
    motion: RotorMotion,
    t_end: f64,
    observer: &mut dyn StepObserver,
) -> Result<TransientResult, DynamicsError> {
    let eq = find_equilibrium(cfg)?;
    let initial = StatorState::new(eq.h_s, 0.0, 0.0);
    let mut result = run_transient_from(cfg, motion, initial, t_end, observer)?;
    result.h_s_eq = eq.h_s;
    Ok(result)
}

/// Integrates the coupled system from an arbitrary initial state.
pub fn run_transient_from(
    cfg: &BearingConfig,
    motion: RotorMotion,
    initial: StatorState,
    t_end: f64,
    observer: &mut dyn StepObserver,
) -> Result<TransientResult, DynamicsError> {
    assert!(t_end > initial.t, "t_end must exceed the initial time");
    let mut sim = Simulator::new(cfg, motion)?;
    let mut state = initial;
    let mut records = Vec::new();
    let mut g_min = f64::INFINITY;
    let mut step_index = 0usize;

    loop {
        let g = min_clearance(state.x1, motion.height(state.t), cfg.beta);
        g_min = g_min.min(g);
        if g < cfg.face_tol {
            return Ok(TransientResult {
                records,
                contact: Some(ContactEvent {
                    t_contact: state.t,
                    g_min,
                }),
                h_s_eq: initial.x1,
            });
        }

        // Adapt on the field solved at the current state, then re-solve on
        // the (possibly) new mesh for the k1 stage.
        if step_index % cfg.adaptivity.refine_interval == 0 {
            let (_, field) = sim
                .force_at(state.t, state.x1, state.x2)
                .map_err(DynamicsError::Solver)?;
            adapt_step(&mut sim.mesh, &field, g, step_index, &cfg.adaptivity);
        }

        let (force, field) = sim
            .force_at(state.t, state.x1, state.x2)
            .map_err(DynamicsError::Solver)?;
        let k1 = sim.accel(force, state.x1, state.x2);

        let done = state.t >= t_end - 1e-12;
        let dt = if done {
            0.0
        } else {
            cfg.stepping.choose_dt(g).min(t_end - state.t)
        };
        let record = TimeSeriesRecord {
            t: state.t,
            h_s: state.x1,
            dh_s_dt: state.x2,
            force,
            g,
            dt,
            n_cells: sim.mesh.n_active(),
            n_dofs: sim.mesh.active_nodes().len(),
        };
        records.push(record);
        observer.on_step(&record, &sim.mesh, &field);
        if done {
            return Ok(TransientResult {
                records,
                contact: None,
                h_s_eq: initial.x1,
            });
        }

        // A stage landing on a non-positive gap is retried once at dt/4; a
        // second failure is contact at the current time.
        let attempt = rk4_step(state, dt, Some(k1), |t, x1, x2| sim.ode_rhs(t, x1, x2));
        state = match attempt {
            Ok(next) => next,
            Err(SolverError::NonPositiveGap { .. }) => {
                let retry = rk4_step(state, dt / 4.0, Some(k1), |t, x1, x2| {
                    sim.ode_rhs(t, x1, x2)
                });
                match retry {
                    Ok(next) => next,
                    Err(SolverError::NonPositiveGap { value, .. }) => {
                        return Ok(TransientResult {
                            records,
                            contact: Some(ContactEvent {
                                t_contact: state.t,
                                g_min: g_min.min(value),
                            }),
                            h_s_eq: initial.x1,
                        });
                    }
                    Err(e) => return Err(DynamicsError::Solver(e)),
                }
            }
            Err(e) => return Err(DynamicsError::Solver(e)),
        };
        step_index += 1;
    }
}

/// Outcome of one contact-classification probe.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeRecord {
    pub beta: f64,
    pub contact: bool,
    pub t_contact: Option<f64>,
    pub g_min: f64,
}

#[derive(Debug, Clone)]
pub struct CriticalAngleResult {
    /// Largest misalignment angle classified safe, resolved to 1e-4.
    pub beta_crit: f64,
    pub audit: Vec<ProbeRecord>,
}

/// Classifies one transient over `n_periods` forcing periods as contact or
/// safe.
pub fn classify_contact(
    cfg: &BearingConfig,
    eps: f64,
    beta: f64,
    n_periods: usize,
) -> Result<ProbeRecord, DynamicsError> {
    let mut probe_cfg = cfg.clone();
    probe_cfg.beta = beta;
    probe_cfg.eps = eps;
    let t_end = n_periods as f64 * std::f64::consts::TAU;
    let result = run_transient(&probe_cfg, RotorMotion::Sinusoidal { eps }, t_end, &mut ())?;
    let g_min = result
        .records
        .iter()
        .map(|r| r.g)
        .fold(f64::INFINITY, f64::min);
    Ok(ProbeRecord {
        beta,
        contact: result.contact.is_some(),
        t_contact: result.contact.map(|c| c.t_contact),
        g_min: result.contact.map(|c| c.g_min).unwrap_or(g_min),
    })
}

/// Bisects the misalignment angle between a safe and a contacting bracket
/// end until the bracket is narrower than 1e-4, returning the largest safe
/// angle. The probe trace is kept for post-hoc monotonicity audits.
pub fn critical_angle(
    cfg: &BearingConfig,
    eps: f64,
    n_periods: usize,
    bracket: (f64, f64),
) -> Result<CriticalAngleResult, DynamicsError> {
    const RESOLUTION: f64 = 1e-4;
    let mut audit = Vec::new();
    let (mut lo, mut hi) = bracket;
    let lo_probe = classify_contact(cfg, eps, lo, n_periods)?;
    audit.push(lo_probe);
    if lo_probe.contact {
        return Err(DynamicsError::BadBracket {
            beta: lo,
            end: "safe",
            observed: "contact",
        });
    }
    let hi_probe = classify_contact(cfg, eps, hi, n_periods)?;
    audit.push(hi_probe);
    if !hi_probe.contact {
        return Err(DynamicsError::BadBracket {
            beta: hi,
            end: "contact",
            observed: "safe",
        });
    }
    while hi - lo > RESOLUTION {
        let mid = 0.5 * (lo + hi);
        let probe = classify_contact(cfg, eps, mid, n_periods)?;
        audit.push(probe);
        if probe.contact {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(CriticalAngleResult {
        beta_crit: lo,
        audit,
    })
}
