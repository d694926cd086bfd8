//! Error types shared across the simulator.

use thiserror::Error;

/// Errors raised while constructing or mutating a mesh.
#[derive(Debug, Error)]
pub enum MeshError {
    #[error("inner radius must lie in (0, 1), got {0}")]
    InvalidInnerRadius(f64),
    #[error("coarse grid needs n_r >= 1 and n_theta >= 4, got {n_r} x {n_theta}")]
    InvalidCoarseGrid { n_r: usize, n_theta: usize },
    #[error("cell {cell} has a non-positive bilinear map (det J = {det:.3e})")]
    InvertedCell { cell: usize, det: f64 },
}

/// Errors raised by the Reynolds solver.
#[derive(Debug, Error)]
pub enum SolverError {
    /// The film thickness was non-positive at a quadrature point. Signals
    /// imminent rotor-stator contact to the caller.
    #[error("non-positive gap h = {value:.6e} at (r, theta) = ({r:.4}, {theta:.4})")]
    NonPositiveGap { r: f64, theta: f64, value: f64 },
    #[error("iterative solver did not reach tolerance {tol:.1e} in {iterations} iterations (residual {residual:.3e})")]
    Diverged {
        iterations: usize,
        residual: f64,
        tol: f64,
    },
    #[error("query point z = {z:.4} lies outside the film [{h_rotor:.4}, {h_stator:.4}]")]
    OutOfFilm { z: f64, h_rotor: f64, h_stator: f64 },
    #[error("point ({x:.4}, {y:.4}) is not inside any active cell")]
    PointNotFound { x: f64, y: f64 },
}

/// Errors raised by the time integrator and root finders.
#[derive(Debug, Error)]
pub enum DynamicsError {
    #[error("equilibrium force balance has no sign change in [{lo:.4}, {hi:.4}]")]
    NoBracket { lo: f64, hi: f64 },
    #[error("critical-angle bracket invalid: beta = {beta:.4} at the {end} end classified as {observed}")]
    BadBracket {
        beta: f64,
        end: &'static str,
        observed: &'static str,
    },
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Mesh(#[from] MeshError),
}

/// Errors raised while reading or validating configuration files.
#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{0}")]
    Invalid(String),
    #[error("failed to parse config: {0}")]
    Toml(String),
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("key `{key}`: expected {expected}")]
    BadType { key: String, expected: &'static str },
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}
