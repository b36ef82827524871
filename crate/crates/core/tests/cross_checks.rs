//! Cross-module consistency checks that tie the solver chain to the
//! figure-level behaviors.

use optosqueeze::gaussian::{build_quadrature_system, position_variance, solve_lyapunov, squeezing_db};
use optosqueeze::model::{reference_si_input, to_internal, DetuningMode};
use optosqueeze::pipeline::solve_point_with;
use optosqueeze::steadystate::{BranchPolicy, LinearizedModel, SolveOptions};

fn continuation() -> SolveOptions {
    SolveOptions { branch_policy: BranchPolicy::Continuation, ..Default::default() }
}

fn variance_at_power(power_w: f64, n_th: f64) -> f64 {
    let mut params = to_internal(&reference_si_input(power_w, false)).unwrap();
    params.n_th = n_th;
    solve_point_with(&params, DetuningMode::Optimal, &continuation())
        .unwrap()
        .variance_x
        .unwrap()
}

// A threshold power exists where the variance crosses the 3 dB value from
// above; locate it by bisection at fixed occupation.
#[test]
fn power_threshold_for_three_db() {
    let n_th = 100.0;
    let (mut lo, mut hi) = (1.0e-6, 1.0e-2);
    assert!(variance_at_power(lo, n_th) > 0.25);
    assert!(variance_at_power(hi, n_th) < 0.25);
    for _ in 0..40 {
        let mid = (lo * hi).sqrt();
        if variance_at_power(mid, n_th) > 0.25 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let threshold = (lo * hi).sqrt();
    let v = variance_at_power(threshold, n_th);
    assert!((v - 0.25).abs() < 0.01 * 0.25, "bisection landed at {v}");
    assert!(threshold > 1.0e-6 && threshold < 1.0e-2);
}

// Variance is nonincreasing in drive power at the optimal detuning.
#[test]
fn monotone_improvement_with_power() {
    let mut prev = f64::INFINITY;
    for k in 0..12 {
        let p = 1.0e-6 * 10f64.powf(3.0 * k as f64 / 11.0);
        let v = variance_at_power(p, 100.0);
        assert!(v <= prev * (1.0 + 1e-12), "variance rose at P = {p}: {v} > {prev}");
        prev = v;
    }
}

// Without a parametric term, cavity cooling alone cannot squeeze below the
// standard quantum limit.
#[test]
fn no_parametric_term_no_squeezing() {
    let mut best_db = f64::NEG_INFINITY;
    for k in 0..120 {
        let delta = 0.4 + 3.6 * k as f64 / 119.0;
        let lin = LinearizedModel::from_coefficients(delta, 0.0, 0.05, 0.1, 1e-6, 0.0);
        let v = position_variance(&solve_lyapunov(&build_quadrature_system(&lin)).unwrap());
        best_db = best_db.max(squeezing_db(v).unwrap());
    }
    assert!(best_db <= 0.02, "cooling alone produced {best_db} dB");
}

// Undriven point: amplitudes vanish and the residual vacuum shift leaves
// omega_m' = sqrt(1 + 12 eta).
#[test]
fn undriven_row_reference_values() {
    let params = to_internal(&reference_si_input(0.0, false)).unwrap();
    let pt = solve_point_with(&params, DetuningMode::Fixed, &continuation()).unwrap();
    assert_eq!(pt.fixed_point.alpha.norm(), 0.0);
    assert_eq!(pt.fixed_point.beta, 0.0);
    let expected = (1.0 + 12.0 * params.eta).sqrt();
    assert!((pt.transformed.omega_m_prime - expected).abs() < 1e-15);
    assert!((pt.transformed.omega_m_prime - 1.0).abs() < 1e-3);
}

// The Fock diagnostics dump carries the mode-resolved populations.
#[test]
fn fock_diagnostics_dump() {
    use optosqueeze::fock::{build_liouvillian, steady_state, FockConfig};
    use optosqueeze::model::{NonlinearityKind, SystemParams};
    use optosqueeze::steadystate::ClassicalFixedPoint;

    let lin = LinearizedModel::from_coefficients(1.5, 0.2, 0.1, 0.4, 0.02, 0.2);
    let params = SystemParams {
        omega_m: 1.0,
        delta_a: 1.5,
        g0: 0.0,
        eta: 0.0,
        kappa: 0.4,
        gamma: 0.02,
        n_th: 0.2,
        drive_amplitude: 0.0,
        nonlinearity: NonlinearityKind::Duffing,
        detection: None,
    };
    let fp = ClassicalFixedPoint {
        alpha: num_complex::Complex64::new(0.0, 0.0),
        beta: 0.0,
        alpha_s: None,
        iterations: 0,
        residual: 0.0,
    };
    let cfg = FockConfig { n_cav: 4, n_mech: 6, ..Default::default() };
    let state = steady_state(&build_liouvillian(&lin, &params, &fp, &cfg).unwrap()).unwrap();
    let csv = state.diagnostics_csv();
    assert!(csv.starts_with("# variance_x"));
    assert_eq!(csv.lines().count(), 2 + 4 * 6);
    let total: f64 = csv
        .lines()
        .skip(2)
        .map(|l| l.rsplit(',').next().unwrap().parse::<f64>().unwrap())
        .sum();
    assert!((total - 1.0).abs() < 1e-8, "populations sum to {total}");
}
