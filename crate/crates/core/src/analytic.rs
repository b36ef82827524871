//! Closed-form limiting solutions: cooling-limit rates and occupation, and
//! the strong-coupling variance. These serve as oracles against the
//! covariance engine inside their regimes of validity.

use crate::error::{Error, Result};

/// Sideband cooling and heating rates of the transformed mechanical mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoolingRates {
    pub gamma_minus: f64,
    pub gamma_plus: f64,
    /// Net cooling rate Γ = Γ₋ − Γ₊.
    pub net: f64,
}

/// Γ∓ = κ·G′² / (κ²/4 + (ω'_m ∓ Δ_a)²).
pub fn cooling_rates(g_prime: f64, kappa: f64, omega_m_prime: f64, delta_a: f64) -> CoolingRates {
    let num = kappa * g_prime * g_prime;
    let gamma_minus = num / (kappa * kappa / 4.0 + (omega_m_prime - delta_a).powi(2));
    let gamma_plus = num / (kappa * kappa / 4.0 + (omega_m_prime + delta_a).powi(2));
    CoolingRates { gamma_minus, gamma_plus, net: gamma_minus - gamma_plus }
}

/// Steady phonon number of the cooled transformed mode,
/// n̄'_eff = (γ·n̄'_th + Γ₊) / (γ + Γ).
pub fn effective_occupation(gamma: f64, n_th_prime: f64, rates: &CoolingRates) -> Result<f64> {
    let denom = gamma + rates.net;
    if !(denom > 0.0) {
        return Err(Error::Domain(format!(
            "effective occupation undefined: gamma + net cooling rate = {denom:.3e} <= 0"
        )));
    }
    Ok((gamma * n_th_prime + rates.gamma_plus) / denom)
}

/// Cooling-limit variance ⟨δX²⟩ = (n̄'_eff + 1/2)·e^{−2r}.
pub fn variance_cooling_limit(n_eff_prime: f64, r: f64) -> f64 {
    (n_eff_prime + 0.5) * (-2.0 * r).exp()
}

/// Strong-coupling cooling rate Γ_sc = 4G′²κ / (κ² + κγ + 4G′²).
pub fn strong_coupling_rate(g_prime: f64, kappa: f64, gamma: f64) -> f64 {
    let g2 = 4.0 * g_prime * g_prime;
    g2 * kappa / (kappa * kappa + kappa * gamma + g2)
}

/// Strong-coupling variance at the optimal detuning,
/// ⟨δX²⟩ = (2γn̄_th + γ + 2Γ_sc·e^{−2r}) / (4(γ + Γ_sc)).
pub fn variance_strong_coupling(gamma: f64, n_th: f64, g_prime: f64, kappa: f64, r: f64) -> f64 {
    let rate = strong_coupling_rate(g_prime, kappa, gamma);
    (2.0 * gamma * n_th + gamma + 2.0 * rate * (-2.0 * r).exp()) / (4.0 * (gamma + rate))
}

/// Ultimate squeezing floor γ / (γ + 4Γ_sc) at zero temperature and
/// vanishing e^{−2r}.
pub fn ultimate_variance(gamma: f64, gamma_sc: f64) -> Result<f64> {
    let denom = gamma + 4.0 * gamma_sc;
    if !(denom > 0.0) {
        return Err(Error::Domain(format!(
            "ultimate variance undefined: gamma + 4*Gamma_sc = {denom:.3e} <= 0"
        )));
    }
    Ok(gamma / denom)
}

/// Whether the cooling-limit hierarchy G′ ≪ κ ≪ ω'_m holds (at the factors
/// the comparisons are validated for).
pub fn cooling_limit_applicable(g_prime: f64, kappa: f64, omega_m_prime: f64) -> bool {
    g_prime <= kappa / 10.0 && kappa <= omega_m_prime / 10.0
}

/// Whether the strong-coupling hierarchy κ ≪ G′ ≪ ω'_m holds.
pub fn strong_coupling_applicable(kappa: f64, g_prime: f64, omega_m_prime: f64) -> bool {
    kappa <= g_prime / 5.0 && g_prime <= omega_m_prime / 10.0
}
