//! Effective Duffing amplitude induced by a dispersively coupled ancilla
//! qubit, with validity checks on the dispersive and backaction conditions.

use crate::error::{Error, Result};

/// How a quoted qubit coupling value is to be read: already divided by 2π
/// (like the qubit splitting) or as a bare angular rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrequencyConvention {
    DividedBy2Pi,
    Angular,
}

/// Dispersive ancilla qubit: splitting and coupling as angular rates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitAncilla {
    pub delta_q: f64,
    pub lambda_q: f64,
}

impl QubitAncilla {
    pub fn new(delta_q: f64, lambda_q: f64) -> Result<Self> {
        if !(delta_q > 0.0) {
            return Err(Error::Domain(format!("qubit splitting must be positive, got {delta_q}")));
        }
        if !(lambda_q >= 0.0) {
            return Err(Error::Domain(format!("qubit coupling must be nonnegative, got {lambda_q}")));
        }
        Ok(QubitAncilla { delta_q, lambda_q })
    }

    /// Builds from quoted values: the splitting as Δ_q/2π in Hz, the
    /// coupling under either 2π convention (hardware quotes rarely say
    /// which).
    pub fn from_quoted(
        delta_q_over_2pi_hz: f64,
        lambda_q_hz: f64,
        convention: FrequencyConvention,
    ) -> Result<Self> {
        let tau = std::f64::consts::TAU;
        let lambda = match convention {
            FrequencyConvention::DividedBy2Pi => tau * lambda_q_hz,
            FrequencyConvention::Angular => lambda_q_hz,
        };
        QubitAncilla::new(tau * delta_q_over_2pi_hz, lambda)
    }

    /// λ_q/Δ_q, the dispersive expansion parameter.
    pub fn dispersive_ratio(&self) -> f64 {
        self.lambda_q / self.delta_q
    }

    /// True when the dispersive ratio is above the comfort level 0.05
    /// (still valid below 0.1, but higher orders start to matter).
    pub fn dispersive_marginal(&self) -> bool {
        self.dispersive_ratio() > 0.05
    }
}

/// Duffing amplitude induced by the qubit, in the (η/2)(b + b†)⁴
/// convention: η = 3·Δ_q·(λ_q/Δ_q)⁴.
///
/// The qubit's quartic correction is 6·Δ_q·(λ_q/Δ_q)⁴·X⁴ with
/// X = (b + b†)/√2; substituting X⁴ = (b + b†)⁴/4 fixes the prefactor 3.
/// Returned in the same angular units as the inputs.
pub fn duffing_from_qubit(q: &QubitAncilla) -> Result<f64> {
    let ratio = q.dispersive_ratio();
    if ratio >= 0.1 {
        return Err(Error::Domain(format!(
            "dispersive condition violated: lambda_q/Delta_q = {ratio:.3} >= 0.1"
        )));
    }
    Ok(3.0 * q.delta_q * ratio.powi(4))
}

/// Mechanical backaction on the qubit relative to its splitting:
/// λ_q·X_ss/Δ_q, acceptable (passive qubit) below 0.2.
pub fn backaction_check(q: &QubitAncilla, x_ss: f64) -> (f64, bool) {
    let ratio = q.lambda_q * x_ss / q.delta_q;
    (ratio, ratio < 0.2)
}
