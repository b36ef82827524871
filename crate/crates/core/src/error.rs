//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// An input violated a precondition (negative rate, nonpositive frequency, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// An iterative solver failed to reach its tolerance.
    #[error("no convergence after {iterations} iterations (residual {residual:.3e})")]
    Convergence { iterations: usize, residual: f64 },

    /// The classical fixed-point equations admit more than one mechanical
    /// amplitude and no branch policy was selected.
    #[error("ambiguous fixed point: {} admissible mechanical amplitudes {roots:?}", roots.len())]
    BranchAmbiguity { roots: Vec<f64> },

    /// The linearized dynamics are unstable; no steady-state covariance exists.
    #[error("linearized dynamics unstable (eigenvalue margin {margin:.3e})")]
    Unstable { margin: f64 },

    /// A linear-algebra routine failed (singular factorization, NaN spectrum, ...).
    #[error("numerical failure: {0}")]
    Numeric(String),

    /// A requested Fock-space problem exceeds the configured memory budget.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    /// The configuration file or overrides could not be parsed.
    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
