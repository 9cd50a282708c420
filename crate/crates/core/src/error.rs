//! Error type shared by all modules of the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// The tail integral `[u]_{s,p}` diverges for the declared growth class.
    #[error("tail integral diverges: {0}")]
    TailDivergent(String),

    /// Principal value need not exist at a declared non-smooth point when
    /// `s*p/(p-1) >= 1`.
    #[error("principal value may not exist at ({x}, {y}): s*p/(p-1) = {index:.4} >= 1")]
    SingularPoint { x: f64, y: f64, index: f64 },

    #[error(
        "quadrature did not converge after {levels} refinements \
         (value {value:.6e}, error estimate {error_estimate:.3e})"
    )]
    QuadratureNotConverged {
        value: f64,
        error_estimate: f64,
        levels: usize,
    },

    #[error("evaluation point is {dist:.3e} from the perturbation support, below {min:.3e}")]
    SupportTooClose { dist: f64, min: f64 },

    #[error("invalid barrier exponent: {0}")]
    InvalidBeta(String),

    #[error("grid function disagrees with the exterior datum on collar node {node}")]
    CollarMismatch { node: usize },

    #[error("coefficient positive at node {node} (c = {value:.3e}); energy is not convex")]
    NonConvex { node: usize, value: f64 },

    #[error("solver did not converge: {iterations} iterations, gradient norm {grad_norm:.3e}")]
    NotConverged { iterations: usize, grad_norm: f64 },

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("ray sample left the grid at ({x}, {y})")]
    RayExitsGrid { x: f64, y: f64 },

    #[error("barrier amplitude search failed after {doublings} doublings")]
    AlphaSearchFailed { doublings: usize },

    #[error("insufficient points for the fit: found {found}, need {needed}")]
    InsufficientPoints { found: usize, needed: usize },

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}
