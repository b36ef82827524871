//! Quadrature-basis drift/diffusion matrices, the steady-state Lyapunov
//! solve, and variance/squeezing reporting. This is the main numerical
//! engine; the Fock solver cross-validates it.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::steadystate::LinearizedModel;

/// Linear diffusion in the quadrature basis (x_a, p_a, x_b, p_b[, x_s, p_s]):
/// drift `a` and symmetric diffusion `d`, both 2N×2N real.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureSystem {
    pub a: DMatrix<f64>,
    pub d: DMatrix<f64>,
}

/// Steady-state covariance with the symmetrized convention
/// V_ij = ⟨{δR_i, δR_j}⟩/2; vacuum diagonal = 1/2.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceState {
    pub v: DMatrix<f64>,
}

/// Builds the quadrature drift and diffusion matrices of a linearized
/// model; three modes when the detection branch is present.
///
/// The mechanical rows use ω̃_m ∓ 2Λ, which reduce exactly to ω_m and
/// ω_m + 4Λ. Diffusion is vacuum optical input and thermal mechanical
/// input, fixed by requiring the decoupled steady states be exact.
pub fn build_quadrature_system(lin: &LinearizedModel) -> QuadratureSystem {
    let n = if lin.detection.is_some() { 6 } else { 4 };
    let mut a = DMatrix::<f64>::zeros(n, n);
    let kh = lin.kappa / 2.0;
    let gh = lin.gamma / 2.0;

    // cavity quadratures
    a[(0, 0)] = -kh;
    a[(0, 1)] = lin.delta_a;
    a[(1, 0)] = -lin.delta_a;
    a[(1, 1)] = -kh;
    a[(1, 2)] = 2.0 * lin.g;
    // mechanical quadratures
    a[(2, 2)] = -gh;
    a[(2, 3)] = lin.omega_m_tilde - 2.0 * lin.lambda;
    a[(3, 0)] = 2.0 * lin.g;
    a[(3, 2)] = -(lin.omega_m_tilde + 2.0 * lin.lambda);
    a[(3, 3)] = -gh;

    let mut d = DMatrix::<f64>::zeros(n, n);
    d[(0, 0)] = lin.kappa / 2.0;
    d[(1, 1)] = lin.kappa / 2.0;
    let mech_noise = lin.gamma * (2.0 * lin.n_th + 1.0) / 2.0;
    d[(2, 2)] = mech_noise;
    d[(3, 3)] = mech_noise;

    if let Some(det) = &lin.detection {
        let ksh = det.kappa_s / 2.0;
        a[(4, 4)] = -ksh;
        a[(4, 5)] = det.delta_s;
        a[(5, 4)] = -det.delta_s;
        a[(5, 5)] = -ksh;
        a[(5, 2)] = 2.0 * det.g_s;
        a[(3, 4)] = 2.0 * det.g_s;
        d[(4, 4)] = det.kappa_s / 2.0;
        d[(5, 5)] = det.kappa_s / 2.0;
    }
    QuadratureSystem { a, d }
}

/// Margin of the drift matrix: −max Re λ.
pub fn drift_margin(a: &DMatrix<f64>) -> Result<f64> {
    let eigs = crate::stability::real_matrix_eigenvalues(a)?;
    let max_re = eigs.iter().map(|e| e.re).fold(f64::NEG_INFINITY, f64::max);
    Ok(-max_re)
}

/// Frobenius norm of A·V + V·Aᵀ + D.
pub fn lyapunov_residual(sys: &QuadratureSystem, v: &DMatrix<f64>) -> f64 {
    (&sys.a * v + v * sys.a.transpose() + &sys.d).norm()
}

/// Solves A·V + V·Aᵀ + D = 0 for the steady-state covariance.
///
/// Direct dense solve of the Kronecker-vectorized system (the matrices are
/// at most 6×6), followed by iterative refinement until the residual is
/// below 10⁻¹⁰‖D‖_F. Fails with [`Error::Unstable`] when the drift has a
/// non-negative eigenvalue.
pub fn solve_lyapunov(sys: &QuadratureSystem) -> Result<CovarianceState> {
    let n = sys.a.nrows();
    let margin = drift_margin(&sys.a)?;
    if margin <= 0.0 {
        return Err(Error::Unstable { margin });
    }

    // M = I ⊗ A + A ⊗ I acting on column-major vec(V).
    let mut m = DMatrix::<f64>::zeros(n * n, n * n);
    for col_blk in 0..n {
        for r in 0..n {
            for c in 0..n {
                m[(col_blk * n + r, col_blk * n + c)] += sys.a[(r, c)];
            }
        }
    }
    for r_blk in 0..n {
        for c_blk in 0..n {
            let coeff = sys.a[(r_blk, c_blk)];
            if coeff != 0.0 {
                for k in 0..n {
                    m[(r_blk * n + k, c_blk * n + k)] += coeff;
                }
            }
        }
    }
    let lu = m.lu();

    let vec_of = |mat: &DMatrix<f64>| {
        nalgebra::DVector::<f64>::from_iterator(n * n, mat.iter().copied())
    };
    let mat_of = |v: &nalgebra::DVector<f64>| {
        DMatrix::<f64>::from_iterator(n, n, v.iter().copied())
    };

    let rhs = -vec_of(&sys.d);
    let sol = lu
        .solve(&rhs)
        .ok_or_else(|| Error::Numeric("singular Lyapunov system".into()))?;
    let mut v = mat_of(&sol);
    v = (&v + &v.transpose()) * 0.5;

    let d_norm = sys.d.norm().max(f64::MIN_POSITIVE);
    let tol = 1e-10 * d_norm;
    for _ in 0..5 {
        let residual = &sys.a * &v + &v * sys.a.transpose() + &sys.d;
        if residual.norm() < tol {
            break;
        }
        let correction = lu
            .solve(&(-vec_of(&residual)))
            .ok_or_else(|| Error::Numeric("singular Lyapunov refinement".into()))?;
        let dv = mat_of(&correction);
        v += (&dv + &dv.transpose()) * 0.5;
    }
    let final_residual = lyapunov_residual(sys, &v);
    if final_residual >= tol {
        return Err(Error::Numeric(format!(
            "Lyapunov residual {final_residual:.3e} above tolerance {tol:.3e}"
        )));
    }
    Ok(CovarianceState { v })
}

/// Steady-state variance of the mechanical displacement quadrature
/// X = (b + b†)/√2: the (x_b, x_b) entry.
pub fn position_variance(state: &CovarianceState) -> f64 {
    state.v[(2, 2)]
}

/// Squeezing in dB relative to the vacuum variance 1/2; positive values
/// mean noise reduction below the standard quantum limit.
pub fn squeezing_db(variance: f64) -> Result<f64> {
    if !(variance > 0.0) {
        return Err(Error::Domain(format!("variance must be positive, got {variance}")));
    }
    Ok(-10.0 * (variance / 0.5).log10())
}

/// Readout cooling rate Γ_s = 4·G_s²/κ_s of the ancilla mode.
pub fn detection_cooling_rate(g_s: f64, kappa_s: f64) -> Result<f64> {
    if !(kappa_s > 0.0) {
        return Err(Error::Domain(format!("kappa_s must be positive, got {kappa_s}")));
    }
    Ok(4.0 * g_s * g_s / kappa_s)
}

/// Symplectic eigenvalues of a 2N×2N covariance matrix: the N positive
/// imaginary parts of eig(Ω·V). The uncertainty principle demands every
/// value be ≥ 1/2.
pub fn symplectic_eigenvalues(state: &CovarianceState) -> Result<Vec<f64>> {
    let n2 = state.v.nrows();
    let mut omega = DMatrix::<f64>::zeros(n2, n2);
    for k in 0..n2 / 2 {
        omega[(2 * k, 2 * k + 1)] = 1.0;
        omega[(2 * k + 1, 2 * k)] = -1.0;
    }
    let eigs = crate::stability::real_matrix_eigenvalues(&(omega * &state.v))?;
    let mut mags: Vec<f64> = eigs.iter().map(|e| e.im.abs()).collect();
    mags.sort_by(|a, b| a.partial_cmp(b).unwrap());
    // values come in +-i pairs; keep one per pair
    Ok(mags.chunks(2).map(|pair| 0.5 * (pair[0] + pair[1])).collect())
}
