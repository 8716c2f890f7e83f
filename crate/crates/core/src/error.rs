use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("point at signed distance {distance:e} is outside the projection strip of width {strip_width}")]
    OutsideStrip { distance: f64, strip_width: f64 },

    #[error("closest point is not unique at signed distance {distance:e}")]
    ProjectionNotUnique { distance: f64 },

    #[error("point at signed distance {distance:e} is not on the boundary")]
    OffBoundary { distance: f64 },

    #[error("cell {cell} is inverted or degenerate (det = {det:e})")]
    InvertedCell { cell: usize, det: f64 },

    #[error("boundary face {face} of cell {cell} is degenerate (measure = {measure:e})")]
    DegenerateFace {
        cell: usize,
        face: usize,
        measure: f64,
    },

    #[error("mesh check failed: {0}")]
    InvalidMesh(String),

    #[error("no quadrature rule of dimension {dim} with exactness degree {degree}")]
    UnsupportedQuadrature { dim: usize, degree: usize },

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("inadmissible parameters: {0}")]
    InadmissibleParameters(String),

    #[error("conjugate gradients did not converge in {iterations} iterations (relative residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("matrix is not positive definite: curvature {curvature:e} at iteration {iteration}")]
    Indefinite { iteration: usize, curvature: f64 },

    #[error("non-finite entries in the {0}")]
    NonFinite(&'static str),

    #[error("negative quadratic form {0:e}")]
    NegativeQuadraticForm(f64),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("configuration field `{field}`: {message}")]
    Config { field: String, message: String },

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    /// Errors caused by the requested configuration or its inputs rather than
    /// by a numerical failure.
    pub fn is_configuration(&self) -> bool {
        matches!(
            self,
            Error::InvalidInput(_)
                | Error::InadmissibleParameters(_)
                | Error::Parse { .. }
                | Error::Config { .. }
                | Error::Io(_)
        )
    }
}
