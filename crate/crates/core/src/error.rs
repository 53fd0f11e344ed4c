use thiserror::Error;

/// Errors raised by mesh construction, assembly and the solvers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid mesh size: {0}")]
    InvalidSize(String),

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("boundary partition has no Dirichlet (Gamma0) faces")]
    EmptyDirichletBoundary,

    #[error("unsupported polynomial degree {0} (supported: 0, 1, 2)")]
    UnsupportedDegree(usize),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("point ({x}, {y}) lies outside {entity} {index}")]
    OutsideEntity {
        entity: &'static str,
        index: usize,
        x: f64,
        y: f64,
    },

    #[error("degenerate element {element} (area {area:e})")]
    DegenerateElement { element: usize, area: f64 },

    #[error("coefficient is not symmetric positive definite at ({x}, {y}) in element {element}")]
    NotElliptic { element: usize, x: f64, y: f64 },

    #[error("singular local block in element {element}")]
    SingularElement { element: usize },

    #[error("singular matrix: pivot {pivot:e} at index {index}")]
    Singular { index: usize, pivot: f64 },

    #[error("conjugate gradient breakdown at iteration {iteration}: matrix is not positive definite")]
    CgBreakdown { iteration: usize },

    #[error("Jacobi preconditioner needs a positive diagonal; entry {index} is not")]
    NonPositiveDiagonal { index: usize },

    #[error("conjugate gradient did not converge: {iterations} iterations, relative residual {residual:e}")]
    CgNotConverged { iterations: usize, residual: f64 },

    #[error("non-finite integrand value at ({x}, {y}) in element {element}")]
    NonFinite { element: usize, x: f64, y: f64 },

    #[error("line search failed at iteration {iteration}: no decrease down to step {step:e}")]
    LineSearch { iteration: usize, step: f64 },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
