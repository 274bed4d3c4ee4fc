use thiserror::Error;

/// Errors produced by the simulation library.
#[derive(Debug, Error)]
pub enum Error {
    /// A physical configuration or numeric option violates its invariants.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid basis: {0}")]
    InvalidBasis(String),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    /// Quantum numbers or windows that fall outside the truncated basis.
    #[error("out of range: {0}")]
    OutOfRange(String),

    /// The requested displacement does not fit inside the truncated Fock space.
    #[error("truncation too small: |nu|^2 = {nu_sq:.4} exceeds {limit:.4} (n_max = {n_max})")]
    Truncation { nu_sq: f64, limit: f64, n_max: usize },

    #[error("invalid path: {0}")]
    InvalidPath(String),

    /// Grid too coarse or too small for the requested states.
    #[error("grid inadequate: {0}")]
    Grid(String),

    /// An iterative refinement failed to reach its tolerance.
    #[error("convergence failure: {0}")]
    Convergence(String),

    #[error("config parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True for failures of a numerical refinement rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Convergence(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
