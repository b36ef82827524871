//! Dynamical stability of the linearized system: eigenvalues of the drift
//! matrix (ground truth) and the closed-form Routh–Hurwitz inequalities
//! (cross-check; they drop γ-dependent terms).

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::steadystate::LinearizedModel;

/// Drift matrix of the Langevin system over the ordered operator basis
/// (a†, a, b†, b).
#[derive(Debug, Clone, PartialEq)]
pub struct DriftMatrixC {
    pub entries: DMatrix<Complex64>,
}

/// Builds the 4×4 complex drift matrix from the linearized coefficients.
pub fn drift_matrix(lin: &LinearizedModel) -> DriftMatrixC {
    let i = Complex64::i();
    let z = Complex64::new(0.0, 0.0);
    let da = lin.delta_a;
    let wt = lin.omega_m_tilde;
    let g = lin.g;
    let l = lin.lambda;
    let kh = lin.kappa / 2.0;
    let gh = lin.gamma / 2.0;
    let entries = DMatrix::from_row_slice(
        4,
        4,
        &[
            i * da - kh, z, -i * g, -i * g,
            z, -i * da - kh, i * g, i * g,
            -i * g, -i * g, i * wt - gh, 2.0 * i * l,
            i * g, i * g, -2.0 * i * l, -i * wt - gh,
        ],
    );
    DriftMatrixC { entries }
}

/// The Bogoliubov similarity transform that removes the anomalous
/// mechanical entries; block-diagonal with identity on the cavity pair.
pub fn squeezing_similarity(r: f64) -> DMatrix<Complex64> {
    let c = Complex64::new(r.cosh(), 0.0);
    let s = Complex64::new(r.sinh(), 0.0);
    let one = Complex64::new(1.0, 0.0);
    let z = Complex64::new(0.0, 0.0);
    DMatrix::from_row_slice(
        4,
        4,
        &[
            one, z, z, z,
            z, one, z, z,
            z, z, c, -s,
            z, z, -s, c,
        ],
    )
}

/// Drift matrix written directly in the transformed parameters (ω'_m, G',
/// no anomalous entries). Equals V⁻¹·A·V; the similarity-invariance tests
/// compare the two spectra.
pub fn transformed_drift_matrix(lin: &LinearizedModel) -> Result<DriftMatrixC> {
    let t = crate::transform::transformed_model(lin)?;
    let i = Complex64::i();
    let z = Complex64::new(0.0, 0.0);
    let da = lin.delta_a;
    let wp = t.omega_m_prime;
    let gp = t.g_prime;
    let kh = lin.kappa / 2.0;
    let gh = lin.gamma / 2.0;
    let entries = DMatrix::from_row_slice(
        4,
        4,
        &[
            i * da - kh, z, -i * gp, -i * gp,
            z, -i * da - kh, i * gp, i * gp,
            -i * gp, -i * gp, i * wp - gh, z,
            i * gp, i * gp, z, -i * wp - gh,
        ],
    );
    Ok(DriftMatrixC { entries })
}

/// Eigenvalues of a general complex matrix.
pub fn complex_eigenvalues(m: &DMatrix<Complex64>) -> Result<Vec<Complex64>> {
    let mat = faer::Mat::<Complex64>::from_fn(m.nrows(), m.ncols(), |r, c| m[(r, c)]);
    let out = mat
        .eigenvalues()
        .map_err(|e| Error::Numeric(format!("eigendecomposition failed: {e:?}")))?;
    if out.iter().any(|e: &Complex64| !e.re.is_finite() || !e.im.is_finite()) {
        return Err(Error::Numeric("eigensolver returned non-finite values".into()));
    }
    Ok(out)
}

/// Eigenvalues of a general real matrix.
pub fn real_matrix_eigenvalues(m: &DMatrix<f64>) -> Result<Vec<Complex64>> {
    let mat = faer::Mat::<f64>::from_fn(m.nrows(), m.ncols(), |r, c| m[(r, c)]);
    let out: Vec<Complex64> = mat
        .eigenvalues()
        .map_err(|e| Error::Numeric(format!("eigendecomposition failed: {e:?}")))?;
    if out.iter().any(|e| !e.re.is_finite() || !e.im.is_finite()) {
        return Err(Error::Numeric("eigensolver returned non-finite values".into()));
    }
    Ok(out)
}

/// Eigenvalue stability verdict with the margin −max Re λ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityVerdict {
    pub stable: bool,
    /// Positive when stable; distance of the slowest eigenvalue from the
    /// imaginary axis.
    pub margin: f64,
}

/// Ground-truth stability test: all drift eigenvalues in the open left
/// half-plane.
pub fn is_stable_eigen(m: &DriftMatrixC) -> Result<StabilityVerdict> {
    let eigs = complex_eigenvalues(&m.entries)?;
    let max_re = eigs.iter().map(|e| e.re).fold(f64::NEG_INFINITY, f64::max);
    Ok(StabilityVerdict { stable: max_re < 0.0, margin: -max_re })
}

/// Closed-form verdict; `NotApplicable` outside the red-detuned regime.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CriterionVerdict {
    Stable,
    Unstable,
    NotApplicable,
}

/// Routh–Hurwitz inequality with γ-dependent terms dropped:
/// 16G² < (ω_m + 4Λ)(4Δ_a + κ²/Δ_a), valid for Δ_a > 0.
pub fn is_stable_criterion(lin: &LinearizedModel) -> CriterionVerdict {
    if lin.delta_a <= 0.0 {
        return CriterionVerdict::NotApplicable;
    }
    let lhs = 16.0 * lin.g * lin.g;
    let rhs = (lin.omega_m + 4.0 * lin.lambda)
        * (4.0 * lin.delta_a + lin.kappa * lin.kappa / lin.delta_a);
    if lhs < rhs {
        CriterionVerdict::Stable
    } else {
        CriterionVerdict::Unstable
    }
}

/// γ-retaining form of the same condition:
/// 4ω'_m G'² Δ_a − (ω'_m² + γ²/4)(Δ_a² + κ²/4) < 0.
pub fn is_stable_criterion_damped(lin: &LinearizedModel) -> Result<CriterionVerdict> {
    if lin.delta_a <= 0.0 {
        return Ok(CriterionVerdict::NotApplicable);
    }
    let t = crate::transform::transformed_model(lin)?;
    let lhs = 4.0 * t.omega_m_prime * t.g_prime * t.g_prime * lin.delta_a
        - (t.omega_m_prime * t.omega_m_prime + lin.gamma * lin.gamma / 4.0)
            * (lin.delta_a * lin.delta_a + lin.kappa * lin.kappa / 4.0);
    Ok(if lhs < 0.0 { CriterionVerdict::Stable } else { CriterionVerdict::Unstable })
}

/// Coupling G on the closed-form stability boundary at the given
/// coefficients; used to measure distance from the boundary.
pub fn criterion_boundary_g(lin: &LinearizedModel) -> Option<f64> {
    if lin.delta_a <= 0.0 {
        return None;
    }
    let rhs = (lin.omega_m + 4.0 * lin.lambda)
        * (4.0 * lin.delta_a + lin.kappa * lin.kappa / lin.delta_a);
    Some((rhs / 16.0).sqrt())
}

/// Power-independent single-photon-coupling threshold at the optimal
/// detuning point: g₀ must stay below √(27·ω_m·η).
pub fn optimal_point_threshold(omega_m: f64, eta: f64) -> f64 {
    (27.0 * omega_m * eta).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(delta_a: f64, lambda: f64, g: f64, kappa: f64, gamma: f64) -> LinearizedModel {
        let mut lin = LinearizedModel::from_coefficients(delta_a, lambda, g, kappa, gamma, 0.0);
        lin.omega_m_tilde = 1.0 + 2.0 * lambda;
        lin
    }

    #[test]
    fn decoupled_modes_block_diagonal() {
        let lin = model(2.0, 0.0, 0.0, 0.1, 1e-3);
        let a = drift_matrix(&lin);
        // off-diagonal blocks vanish
        for r in 0..2 {
            for c in 2..4 {
                assert_eq!(a.entries[(r, c)], Complex64::new(0.0, 0.0));
                assert_eq!(a.entries[(c, r)], Complex64::new(0.0, 0.0));
            }
        }
        let eigs = complex_eigenvalues(&a.entries).unwrap();
        let expected = [
            Complex64::new(-0.05, 2.0),
            Complex64::new(-0.05, -2.0),
            Complex64::new(-5e-4, 1.0),
            Complex64::new(-5e-4, -1.0),
        ];
        for e in expected {
            let hits = eigs.iter().filter(|x| (*x - e).norm() < 1e-10).count();
            assert_eq!(hits, 1, "missing eigenvalue {e} in {eigs:?}");
        }
        let verdict = is_stable_eigen(&a).unwrap();
        assert!(verdict.stable);
        assert!((verdict.margin - 5e-4).abs() < 1e-12);
    }

    #[test]
    fn transformed_matrix_kills_anomalous_entries() {
        let lin = model(2.5, 1.3, 0.4, 0.1, 1e-6);
        let at = transformed_drift_matrix(&lin).unwrap();
        assert_eq!(at.entries[(2, 3)], Complex64::new(0.0, 0.0));
        assert_eq!(at.entries[(3, 2)], Complex64::new(0.0, 0.0));
        let t = crate::transform::transformed_model(&lin).unwrap();
        assert!((at.entries[(0, 2)] - Complex64::new(0.0, -t.g_prime)).norm() < 1e-15);

        // V^{-1} A V equals the directly built transformed matrix.
        let a = drift_matrix(&lin);
        let v = squeezing_similarity(t.r);
        let v_inv = v.clone().try_inverse().unwrap();
        let prod = &v_inv * &a.entries * &v;
        assert!((&prod - &at.entries).norm() < 1e-12, "{:e}", (&prod - &at.entries).norm());
    }

    #[test]
    fn similarity_preserves_spectrum_on_random_models() {
        // Deterministic pseudo-random sample of valid models.
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..200 {
            let lin = model(
                0.2 + 4.0 * next(),
                3.0 * next(),
                1.5 * next(),
                0.02 + 0.4 * next(),
                1e-6 + 1e-3 * next(),
            );
            let a = complex_eigenvalues(&drift_matrix(&lin).entries).unwrap();
            let mut b =
                complex_eigenvalues(&transformed_drift_matrix(&lin).unwrap().entries).unwrap();
            let norm = a.iter().map(|e| e.norm()).fold(0.0f64, f64::max).max(1.0);
            // greedy multiset matching
            for x in &a {
                let (idx, dist) = b
                    .iter()
                    .enumerate()
                    .map(|(i, y)| (i, (x - y).norm()))
                    .min_by(|p, q| p.1.partial_cmp(&q.1).unwrap())
                    .unwrap();
                assert!(dist < 1e-10 * norm, "{x} unmatched (closest {dist:.3e})");
                b.swap_remove(idx);
            }
        }
    }

    #[test]
    fn criterion_trivial_cases() {
        assert_eq!(is_stable_criterion(&model(2.0, 0.5, 0.0, 0.1, 0.0)), CriterionVerdict::Stable);
        assert_eq!(
            is_stable_criterion(&model(-1.0, 0.5, 0.1, 0.1, 0.0)),
            CriterionVerdict::NotApplicable
        );
    }

    #[test]
    fn eigen_flip_sits_on_criterion_boundary() {
        // gamma = 0: sweep G across the closed-form boundary and bisect the
        // eigenvalue zero crossing; the two must agree to ~1e-3.
        let base = model(2.0, 0.8, 0.0, 0.15, 0.0);
        let g_boundary = criterion_boundary_g(&base).unwrap();
        let margin_at = |g: f64| {
            let mut lin = base.clone();
            lin.g = g;
            is_stable_eigen(&drift_matrix(&lin)).unwrap().margin
        };
        assert!(margin_at(0.9 * g_boundary) > 0.0);
        assert!(margin_at(1.1 * g_boundary) < 0.0);
        let (mut lo, mut hi) = (0.9 * g_boundary, 1.1 * g_boundary);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if margin_at(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let flip = 0.5 * (lo + hi);
        assert!((flip - g_boundary).abs() < 1e-3, "flip {flip} vs boundary {g_boundary}");

        // A point 10% above the boundary is unstable by the eigen test.
        let mut hot = base.clone();
        hot.g = 1.1 * g_boundary;
        assert!(!is_stable_eigen(&drift_matrix(&hot)).unwrap().stable);
        assert_eq!(is_stable_criterion(&hot), CriterionVerdict::Unstable);
    }

    #[test]
    fn damped_criterion_matches_simplified_at_small_gamma() {
        let lin = model(2.0, 0.8, 0.3, 0.15, 1e-8);
        assert_eq!(is_stable_criterion(&lin), CriterionVerdict::Stable);
        assert_eq!(is_stable_criterion_damped(&lin).unwrap(), CriterionVerdict::Stable);
    }

    #[test]
    fn threshold_closed_form() {
        let g_max = optimal_point_threshold(1.0, 1.0e-4);
        assert!((g_max - 0.051961524).abs() < 1e-8);
        assert!(1.0e-4 < g_max);
        // quartic scaling: eta -> 4 eta doubles the threshold
        assert!((optimal_point_threshold(1.0, 4.0e-4) - 2.0 * g_max).abs() < 1e-12);
        assert_eq!(optimal_point_threshold(1.0, 0.0), 0.0);
    }
}
