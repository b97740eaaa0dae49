use thiserror::Error;

/// Errors produced by the simulator.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// An input lies outside the physical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A structural precondition (ordering, horizon, bracketing, ...) was violated.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Adaptive quadrature exhausted its refinement budget before reaching
    /// the requested tolerance. Carries the achieved error estimate.
    #[error(
        "quadrature did not converge: achieved error {achieved:.3e}, \
         required {required:.3e} after {refinements} refinements"
    )]
    Convergence {
        achieved: f64,
        required: f64,
        refinements: usize,
    },

    /// The Fock-space truncation cannot hold the requested thermal state.
    #[error("Fock truncation insufficient: thermal tail {tail:.3e} exceeds {limit:.3e}")]
    Truncation { tail: f64, limit: f64 },

    /// A state-space or memory budget would be exceeded.
    #[error("resource budget exceeded: {0}")]
    Resource(String),
}

pub type Result<T> = std::result::Result<T, Error>;
