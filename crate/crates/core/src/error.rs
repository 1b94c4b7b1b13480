use thiserror::Error;

use crate::system::Domain;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("system has no vortices")]
    EmptySystem,

    #[error("{strengths} strengths but {positions} positions")]
    LengthMismatch { strengths: usize, positions: usize },

    #[error("vortex {index} at ({x}, {y}) lies outside the {domain:?} domain")]
    DomainViolation {
        index: usize,
        x: f64,
        y: f64,
        domain: Domain,
    },

    #[error("vortices {i} and {j} coincide (separation {distance:e})")]
    CoincidentVortices { i: usize, j: usize, distance: f64 },

    #[error("vortex {index} has zero strength but is not flagged as a passive tracer")]
    ZeroStrength { index: usize },

    #[error("expected {expected} vortices or rings, found {found}")]
    WrongArity { expected: usize, found: usize },

    #[error("implied vortex height {height} is not positive")]
    NonPositiveBase { height: f64 },

    #[error("dipole orbit denominator 4y0^2 - nu^2 vanishes")]
    SingularDenominator,

    #[error("nu = 0: the symmetric dipole reduces to the quadrant problem")]
    ZeroNu,

    #[error("point ({x}, {y}) coincides with a co-rotating vortex")]
    SingularPoint { x: f64, y: f64 },

    #[error("rings {i} and {j} coincide")]
    CoincidentRings { i: usize, j: usize },

    #[error("ring {index}: {reason}")]
    InvalidRing { index: usize, reason: String },

    #[error("invalid membrane state: {0}")]
    InvalidMembrane(String),

    #[error("t = {t} is beyond the collapse time {collapse_time}")]
    BeyondCollapse { t: f64, collapse_time: f64 },

    #[error("pair has strengths of opposite sign")]
    MixedSigns,

    #[error("orbit escaped radius {radius} at t = {t}")]
    OrbitEscaped { t: f64, radius: f64 },

    #[error("orbit entered the singular neighbourhood of a vortex at t = {t}")]
    SingularApproach { t: f64 },

    #[error("invalid integrator settings: {0}")]
    InvalidSettings(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("step size {h:e} fell below the minimum at t = {t}")]
    StepUnderflow { t: f64, h: f64 },

    #[error("terminal {kind} event at t = {t}")]
    EventStop { t: f64, kind: String },

    #[error("schema error at line {line}, column {column}: {message}")]
    Schema {
        message: String,
        line: usize,
        column: usize,
    },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
