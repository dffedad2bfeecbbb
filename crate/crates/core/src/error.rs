use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// The radius function is non-positive somewhere.
    #[error("degenerate shape: r(θ) = {radius:.3e} at θ = {theta:.6}")]
    DegenerateShape { theta: f64, radius: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("samples are not star-shaped about the center: {0}")]
    NotStarShaped(String),
    #[error("flow left the star-shaped class at step {step}: {reason}")]
    FlowDegenerate { step: usize, reason: String },
    #[error("line search stalled at step {step} after {halvings} halvings (dt = {dt:.3e})")]
    Stall { step: usize, halvings: usize, dt: f64 },
}
