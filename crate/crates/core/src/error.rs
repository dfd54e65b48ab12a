use thiserror::Error;

/// Errors raised while building, assembling or solving a plate structure.
#[derive(Debug, Error)]
pub enum PlateError {
    #[error("invalid geometry: {0}")]
    Geometry(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("mesh topology: {0}")]
    Topology(String),

    #[error("trace degree mismatch: {0} vs {1}")]
    DegreeMismatch(u32, u32),

    #[error("unsupported quadrature order {0} (supported: 2, 4)")]
    UnsupportedQuadrature(usize),

    #[error("matrix is not positive definite: pivot {pivot} (global dof {dof}) has value {value:e}")]
    NotPositiveDefinite { pivot: usize, dof: usize, value: f64 },

    #[error("conjugate gradient stalled after {iterations} iterations (relative residual {:e})", residual_history.last().copied().unwrap_or(f64::NAN))]
    CgNotConverged {
        iterations: usize,
        residual_history: Vec<f64>,
    },

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl PlateError {
    /// True for failures of the numerical solve, as opposed to bad user input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            PlateError::NotPositiveDefinite { .. } | PlateError::CgNotConverged { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, PlateError>;
