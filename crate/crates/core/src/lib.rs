//! Steady-state mechanical squeezing in a driven optomechanical cavity
//! with a Duffing (or cubic) mechanical nonlinearity.
//!
//! The crate solves the classical fixed point of the driven cavity–
//! mechanics system, linearizes around it, applies the Bogoliubov
//! squeezing transformation, checks dynamical stability, and computes the
//! steady-state quadrature covariance from the Lyapunov equation. A
//! truncated Fock-space Liouvillian solver provides the brute-force
//! cross-check, and closed-form cooling-limit and strong-coupling-limit
//! expressions serve as analytic oracles in their regimes.
//!
//! Modules mirror the processing chain:
//!
//! - [`model`]: parameter types, unit conversions, config parsing
//! - [`steadystate`]: classical fixed point and linearized coefficients
//! - [`transform`]: squeezing parameter, transformed frequency/coupling/bath
//! - [`stability`]: drift-matrix eigenvalues and closed-form criteria
//! - [`gaussian`]: quadrature drift/diffusion, Lyapunov solve, variances
//! - [`analytic`]: cooling-limit and strong-coupling-limit formulas
//! - [`fock`]: sparse Liouvillian steady states on truncated Fock spaces
//! - [`nonlin_gen`]: qubit-induced Duffing amplitude (ancilla calculator)
//! - [`pipeline`]: one-call full solve of a parameter point
//! - [`exec`]: data-parallel sweep helpers (rayon behind the `parallel`
//!   feature, sequential fallback otherwise)

// `!(x > 0.0)` guards are deliberate: they reject NaN along with the
// out-of-domain values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod error;
pub mod exec;
pub mod fock;
pub mod gaussian;
pub mod model;
pub mod nonlin_gen;
pub mod pipeline;
pub mod stability;
pub mod steadystate;
pub mod transform;

pub use error::{Error, Result};
