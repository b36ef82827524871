//! Squeezing transformation of the mechanical quadratic form and the
//! transformed thermal occupation.
//!
//! Everything here is a function of the single ratio 4Λ/ω_m, which is
//! computed once so the exact identities between r, ω'_m, and G' survive
//! rounding.

use crate::error::{Error, Result};
use crate::steadystate::LinearizedModel;

/// Outcome of diagonalizing the mechanical quadratic form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformedModel {
    /// Squeezing parameter r = (1/4)·ln(1 + 4Λ/ω_m).
    pub r: f64,
    /// Transformed mechanical frequency ω'_m = ω_m·e^{2r}.
    pub omega_m_prime: f64,
    /// Transformed coupling G' = G·e^{−r}.
    pub g_prime: f64,
    /// Transformed bath occupation n̄'_th.
    pub n_th_prime: f64,
    /// Cavity detuning, carried through unchanged.
    pub delta_a: f64,
}

/// r = (1/4)·ln(1 + 4Λ/ω_m).
pub fn squeezing_parameter(lambda: f64, omega_m: f64) -> Result<f64> {
    if !(omega_m > 0.0) {
        return Err(Error::Domain(format!("omega_m must be positive, got {omega_m}")));
    }
    let x = 1.0 + 4.0 * lambda / omega_m;
    if x <= 0.0 {
        return Err(Error::Domain(format!(
            "squeezing parameter undefined: 1 + 4*Lambda/omega_m = {x} <= 0"
        )));
    }
    Ok(0.25 * x.ln())
}

/// n̄'_th = n̄_th·cosh(2r) + sinh²(r).
pub fn transformed_occupation(n_th: f64, r: f64) -> f64 {
    n_th * (2.0 * r).cosh() + r.sinh().powi(2)
}

/// Applies the squeezing transformation to a linearized model.
pub fn transformed_model(lin: &LinearizedModel) -> Result<TransformedModel> {
    let x = 1.0 + 4.0 * lin.lambda / lin.omega_m;
    if x <= 0.0 {
        return Err(Error::Domain(format!(
            "transform undefined: 1 + 4*Lambda/omega_m = {x} <= 0"
        )));
    }
    let r = 0.25 * x.ln();
    Ok(TransformedModel {
        r,
        omega_m_prime: lin.omega_m * x.sqrt(),
        g_prime: lin.g * x.powf(-0.25),
        n_th_prime: transformed_occupation(lin.n_th, r),
        delta_a: lin.delta_a,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(lambda: f64, g: f64, n_th: f64) -> LinearizedModel {
        LinearizedModel::from_coefficients(2.0, lambda, g, 0.1, 1.0e-6, n_th)
    }

    #[test]
    fn zero_lambda_is_identity() {
        assert_eq!(squeezing_parameter(0.0, 1.0).unwrap(), 0.0);
        let t = transformed_model(&model(0.0, 0.3, 2.0)).unwrap();
        assert_eq!(t.r, 0.0);
        assert_eq!(t.omega_m_prime, 1.0);
        assert_eq!(t.g_prime, 0.3);
        assert_eq!(t.n_th_prime, 2.0);
    }

    #[test]
    fn closed_form_values() {
        // Lambda = 2 omega_m: r = ln(9)/4, omega' = 3 omega_m, G' = G/sqrt(3).
        let r = squeezing_parameter(2.0, 1.0).unwrap();
        assert!((r - 9.0f64.ln() / 4.0).abs() < 1e-16);
        assert!((r - 0.5493061443).abs() < 1e-9);
        let t = transformed_model(&model(2.0, 1.0, 0.0)).unwrap();
        assert!((t.omega_m_prime - 3.0).abs() < 1e-14);
        assert!((t.g_prime - 1.0 / 3.0f64.sqrt()).abs() < 1e-14);

        // Lambda = 1.92 omega_m reproduces the omega' ~ 3 omega_m regime.
        let t = transformed_model(&model(1.92, 1.0, 0.0)).unwrap();
        assert!((t.omega_m_prime - 2.9462).abs() < 1e-3, "{}", t.omega_m_prime);
        assert!(t.omega_m_prime > 2.7 && t.omega_m_prime < 3.3);
        assert!(t.g_prime / 1.0 > 0.55 && t.g_prime < 0.65);
    }

    #[test]
    fn occupation_closed_forms() {
        assert_eq!(transformed_occupation(5.0, 0.0), 5.0);
        // r = ln(9)/4: cosh(2r) = 5/3 and sinh^2(r) = 1/3 exactly.
        let r = 9.0f64.ln() / 4.0;
        assert!((transformed_occupation(0.0, r) - 1.0 / 3.0).abs() < 1e-14);
        assert!((transformed_occupation(100.0, r) - 167.0).abs() < 1e-11);
    }

    #[test]
    fn occupation_never_below_input() {
        for &(n, r) in &[(0.0, 0.3), (2.0, 1.0), (50.0, 0.05), (1e4, 2.0), (3.0, 0.0)] {
            let n_prime = transformed_occupation(n, r);
            if r == 0.0 {
                assert_eq!(n_prime, n);
            } else {
                assert!(n_prime > n);
            }
        }
    }

    #[test]
    fn bogoliubov_identities() {
        for k in 0..50 {
            let lambda = 0.1 * k as f64;
            let lin = model(lambda, 0.7, 3.0);
            let t = transformed_model(&lin).unwrap();
            // e^{2r} = sqrt(1 + 4 Lambda / omega_m)
            assert!(((2.0 * t.r).exp() - (1.0 + 4.0 * lambda).sqrt()).abs() < 1e-13);
            // omega' / omega = (G / G')^2
            let lhs = t.omega_m_prime / lin.omega_m;
            let rhs = (lin.g / t.g_prime).powi(2);
            assert!((lhs - rhs).abs() <= 1e-13 * lhs);
            // omega'^2 = omega_tilde^2 - 4 Lambda^2
            let consistency = lin.omega_m_tilde.powi(2) - 4.0 * lambda * lambda;
            assert!((t.omega_m_prime.powi(2) - consistency).abs() <= 1e-12 * consistency.max(1.0));
            // ordering
            assert!(t.omega_m_prime >= lin.omega_m && t.g_prime <= lin.g);
            // round trip through the inverse transform
            let back_omega = t.omega_m_prime * (-2.0 * t.r).exp();
            let back_g = t.g_prime * t.r.exp();
            assert!((back_omega - lin.omega_m).abs() <= 1e-13);
            assert!((back_g - lin.g).abs() <= 1e-13 * lin.g);
        }
    }

    #[test]
    fn invalid_inputs_rejected() {
        assert!(squeezing_parameter(0.0, 0.0).is_err());
        assert!(squeezing_parameter(-0.5, 1.0).is_err());
    }
}
