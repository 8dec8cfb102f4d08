use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A precondition on a numerical domain was violated.
    #[error("domain error: {0}")]
    Domain(String),

    /// A truncation target could not be met within the configured cutoffs.
    #[error("truncation failure: {0}")]
    Truncation(String),

    /// Adaptive quadrature did not converge within the depth limit.
    /// Carries the best estimate achieved so far.
    #[error("quadrature did not converge (best estimate {estimate}, error {error})")]
    Quadrature { estimate: f64, error: f64 },

    /// A superposition with vanishing norm cannot be normalized.
    #[error("degenerate state: {0}")]
    DegenerateState(String),

    /// A closed-form bound was requested outside its validity regime.
    #[error("validity error: {0}")]
    Validity(String),

    /// Two wavefunctions live on incompatible grids.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;
