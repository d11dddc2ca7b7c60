//! Crate-wide error type.
//!
//! Data-dependent failures (singular systems, divergence, bad user input)
//! are reported through [`Error`]. Violations of internal contracts such as
//! out-of-range node indices panic instead; they indicate caller bugs, not
//! runtime conditions.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("local coordinate {eta} lies outside the reference element [0, 1]")]
    CoordinateOutOfRange { eta: f64 },

    #[error("unsupported derivative order {order}: only orders 1 and 2 exist for cubic shapes")]
    UnsupportedDerivativeOrder { order: u32 },

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("point x = {x} lies outside the mesh interval [{a}, {b}]")]
    PointOutsideMesh { x: f64, a: f64, b: f64 },

    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("matrix is singular: pivot below tolerance in row {row}")]
    SingularMatrix { row: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid time grid: {0}")]
    InvalidTimeGrid(String),

    #[error("time step starting at t = {t} failed: {source}")]
    StepFailed {
        t: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("solution diverged: non-finite coefficients at t = {t}")]
    Diverged { t: f64 },

    #[error("degenerate Fourier mode: a + ib = 0, growth factor undefined")]
    DegenerateMode,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("failed to write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
