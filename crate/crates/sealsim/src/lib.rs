//! Simulator for the coupled dynamics of a misaligned non-contacting
//! mechanical face seal: an adaptive finite-element solver for the modified
//! Reynolds lubrication equation on an annulus, quasistatically coupled to a
//! spring-mass-damper stator integrated in time, with experiment drivers for
//! disturbance scenarios and critical-misalignment-angle searches.

pub mod adaptivity;
pub mod config;
pub mod diagnostics;
pub mod dynamics;
pub mod error;
pub mod mesh;
pub mod model;
pub mod output;
pub mod reynolds;
pub mod scenario;
pub mod sparse;

pub use config::{AdaptivityConfig, BearingConfig, StepController};
pub use dynamics::{
    classify_contact, critical_angle, find_equilibrium, rk4_step, run_transient,
    run_transient_from, ContactEvent, CriticalAngleResult, EquilibriumReport, ProbeRecord,
    Simulator, StepObserver, TimeSeriesRecord, TransientResult,
};
pub use error::{ConfigError, DynamicsError, MeshError, SolverError};
pub use mesh::{AnnulusMesh, BoundaryTag, ConstraintSet, EdgeSide, HangingConstraint, Mark};
pub use model::{gap, min_clearance, min_clearance_rate, RotorMotion, StatorState};
pub use reynolds::{
    assemble, assemble_with, kelly_indicator, pressure_force, solve_film, solve_pressure,
    source_term, velocity_profile, FilmSnapshot, LinearSystem, PressureField,
};
pub use scenario::{parse_config, parse_config_str, ConfigFile, ScenarioSpec, SweepSpec};
