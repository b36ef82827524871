//! End-to-end single-point solve shared by the CLI, the sweeps, and the
//! acceptance suite: fixed point → linearization → transform → stability →
//! covariance → variance, with the analytic limits evaluated alongside.

use crate::analytic;
use crate::error::{Error, Result};
use crate::gaussian::{self, CovarianceState};
use crate::model::{DetuningMode, SystemParams};
use crate::stability::{self, CriterionVerdict, StabilityVerdict};
use crate::steadystate::{
    self, ClassicalFixedPoint, LinearizedModel, SolveOptions,
};
use crate::transform::{self, TransformedModel};

/// Closed-form limit values evaluated at the solved point, with their
/// regime-applicability flags.
#[derive(Debug, Clone, Copy)]
pub struct AnalyticComparison {
    pub cooling_applicable: bool,
    pub cooling_variance: Option<f64>,
    pub strong_coupling_applicable: bool,
    pub strong_coupling_variance: f64,
    pub ultimate_floor: f64,
}

/// Everything a single parameter point yields.
#[derive(Debug, Clone)]
pub struct PointSolution {
    /// Input parameters with the detuning resolved.
    pub params: SystemParams,
    pub fixed_point: ClassicalFixedPoint,
    pub linearized: LinearizedModel,
    pub transformed: TransformedModel,
    pub eigen: StabilityVerdict,
    pub criterion: CriterionVerdict,
    /// Steady-state covariance; `None` when the point is unstable.
    pub covariance: Option<CovarianceState>,
    pub variance_x: Option<f64>,
    pub squeezing_db: Option<f64>,
    pub analytic: AnalyticComparison,
    /// Readout cooling rate Γ_s when detection is on.
    pub detection_rate: Option<f64>,
}

pub fn solve_point(params: &SystemParams, mode: DetuningMode) -> Result<PointSolution> {
    solve_point_with(params, mode, &SolveOptions::default_for(params.nonlinearity))
}

pub fn solve_point_with(
    params: &SystemParams,
    mode: DetuningMode,
    options: &SolveOptions,
) -> Result<PointSolution> {
    let (resolved, fixed_point, linearized) = match mode {
        DetuningMode::Optimal => steadystate::solve_at_optimal_detuning_with(params, options)?,
        DetuningMode::Fixed => {
            let fp = steadystate::solve_classical_fixed_point_with(params, options)?;
            let lin = steadystate::linearize(params, &fp);
            (params.clone(), fp, lin)
        }
    };
    let transformed = transform::transformed_model(&linearized)?;
    let eigen = stability::is_stable_eigen(&stability::drift_matrix(&linearized))?;
    let criterion = stability::is_stable_criterion(&linearized);

    let (covariance, variance_x, squeezing_db) = if eigen.stable {
        let sys = gaussian::build_quadrature_system(&linearized);
        match gaussian::solve_lyapunov(&sys) {
            Ok(cov) => {
                let v = gaussian::position_variance(&cov);
                let db = gaussian::squeezing_db(v)?;
                (Some(cov), Some(v), Some(db))
            }
            Err(Error::Unstable { .. }) => (None, None, None),
            Err(e) => return Err(e),
        }
    } else {
        (None, None, None)
    };

    let rates = analytic::cooling_rates(
        transformed.g_prime,
        linearized.kappa,
        transformed.omega_m_prime,
        linearized.delta_a,
    );
    let cooling_variance = analytic::effective_occupation(
        linearized.gamma,
        transformed.n_th_prime,
        &rates,
    )
    .ok()
    .map(|n_eff| analytic::variance_cooling_limit(n_eff, transformed.r));
    let analytic = AnalyticComparison {
        cooling_applicable: analytic::cooling_limit_applicable(
            transformed.g_prime,
            linearized.kappa,
            transformed.omega_m_prime,
        ),
        cooling_variance,
        strong_coupling_applicable: analytic::strong_coupling_applicable(
            linearized.kappa,
            transformed.g_prime,
            transformed.omega_m_prime,
        ),
        strong_coupling_variance: analytic::variance_strong_coupling(
            linearized.gamma,
            linearized.n_th,
            transformed.g_prime,
            linearized.kappa,
            transformed.r,
        ),
        ultimate_floor: analytic::ultimate_variance(
            linearized.gamma,
            analytic::strong_coupling_rate(
                transformed.g_prime,
                linearized.kappa,
                linearized.gamma,
            ),
        )?,
    };

    let detection_rate = linearized
        .detection
        .as_ref()
        .map(|det| gaussian::detection_cooling_rate(det.g_s, det.kappa_s))
        .transpose()?;

    Ok(PointSolution {
        params: resolved,
        fixed_point,
        linearized,
        transformed,
        eigen,
        criterion,
        covariance,
        variance_x,
        squeezing_db,
        analytic,
        detection_rate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{reference_si_input, to_internal};

    #[test]
    fn reference_point_is_squeezed_below_sql() {
        let params = to_internal(&reference_si_input(1.0e-4, false)).unwrap();
        let point = solve_point(&params, DetuningMode::Optimal).unwrap();
        assert!(point.eigen.stable);
        assert_eq!(point.criterion, CriterionVerdict::Stable);
        let v = point.variance_x.unwrap();
        assert!(v < 0.25, "variance {v} not beyond 3 dB");
        assert!(point.squeezing_db.unwrap() > 3.0);
        assert!(point.transformed.omega_m_prime > 1.5);
    }

    #[test]
    fn zero_nonlinearity_gives_no_squeezing() {
        let mut params = to_internal(&reference_si_input(1.0e-6, false)).unwrap();
        params.eta = 0.0;
        let point = solve_point(&params, DetuningMode::Optimal).unwrap();
        assert_eq!(point.transformed.r, 0.0);
        let db = point.squeezing_db.unwrap();
        assert!(db.abs() < 0.05, "db = {db}");
    }

    #[test]
    fn detection_point_reports_readout_rate() {
        let params = to_internal(&reference_si_input(1.0e-4, true)).unwrap();
        let point = solve_point(&params, DetuningMode::Optimal).unwrap();
        let rate = point.detection_rate.unwrap();
        assert!(rate > 0.0 && rate < 0.01, "Gamma_s = {rate}");
        let det = point.linearized.detection.unwrap();
        assert!(det.g_s < det.kappa_s, "readout must stay weakly coupled");
    }

    #[test]
    fn instability_reported_not_solved() {
        use crate::steadystate::{BranchPolicy, SolveOptions};
        // Strong-coupling point whose radiation-pressure pull drags the
        // effective detuning negative: dynamically unstable.
        let mut params = to_internal(&reference_si_input(1.0e-4, false)).unwrap();
        params.eta = 1.0e-6;
        params.g0 = 2.0e-3;
        params.delta_a = 0.5;
        params.drive_amplitude = 400.0;
        let options =
            SolveOptions { branch_policy: BranchPolicy::Continuation, ..Default::default() };
        let point = solve_point_with(&params, DetuningMode::Fixed, &options).unwrap();
        assert!(!point.eigen.stable);
        assert_eq!(point.criterion, CriterionVerdict::NotApplicable);
        assert!(point.variance_x.is_none());
        assert!(point.covariance.is_none());
    }

    #[test]
    fn stable_branch_terminates_above_coupling_threshold() {
        use crate::stability::optimal_point_threshold;
        use crate::steadystate::{BranchPolicy, SolveOptions};
        // Above g0 = sqrt(27 omega eta) the stable low branch no longer
        // reaches the optimal detuning point: the solve reports it.
        let mut params = to_internal(&reference_si_input(1.0e-4, false)).unwrap();
        params.g0 = 1.1 * optimal_point_threshold(1.0, params.eta);
        params.drive_amplitude = 5000.0;
        let options =
            SolveOptions { branch_policy: BranchPolicy::Continuation, ..Default::default() };
        let err = solve_point_with(&params, DetuningMode::Optimal, &options).unwrap_err();
        assert!(matches!(err, Error::Convergence { .. }), "{err:?}");
    }
}
