//! Classical fixed point of the driven system and the linearized-model
//! coefficients, for the Duffing, cubic, and detection-extended variants.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{NonlinearityKind, SystemParams};

/// Steady-state displacement amplitudes of the driven modes.
///
/// `residual` is the largest equation residual normalized by the equation
/// scale (`max(1, Omega_d, g0|alpha|^2)`), so the convergence tolerance is
/// meaningful from desk-scale drives up to the strongest sweeps.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalFixedPoint {
    /// Cavity amplitude α.
    pub alpha: Complex64,
    /// Mechanical amplitude β (real).
    pub beta: f64,
    /// Ancilla amplitude α_s when detection is on.
    pub alpha_s: Option<Complex64>,
    pub iterations: usize,
    pub residual: f64,
}

/// Detection-branch coefficients of the linearized model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearizedDetection {
    /// Effective ancilla detuning Δ_s = δ_s − 2 g_s β.
    pub delta_s: f64,
    /// Linearized ancilla coupling G_s = g_s |α_s|.
    pub g_s: f64,
    pub kappa_s: f64,
}

/// Coefficients of the quadratic (linearized) model around the fixed point.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearizedModel {
    /// Effective cavity detuning Δ_a = δ_a − 2 g₀ β.
    pub delta_a: f64,
    /// Shifted mechanical frequency ω̃_m = ω_m + 2Λ.
    pub omega_m_tilde: f64,
    /// Parametric amplitude Λ.
    pub lambda: f64,
    /// Linearized optomechanical coupling G = g₀ |α|.
    pub g: f64,
    pub detection: Option<LinearizedDetection>,
    pub kappa: f64,
    pub gamma: f64,
    pub n_th: f64,
    pub omega_m: f64,
}

impl LinearizedModel {
    /// Builds a model directly from its coefficients (ω_m = 1), bypassing a
    /// fixed-point solve. `omega_m_tilde` is derived from Λ.
    pub fn from_coefficients(
        delta_a: f64,
        lambda: f64,
        g: f64,
        kappa: f64,
        gamma: f64,
        n_th: f64,
    ) -> Self {
        LinearizedModel {
            delta_a,
            omega_m_tilde: 1.0 + 2.0 * lambda,
            lambda,
            g,
            detection: None,
            kappa,
            gamma,
            n_th,
            omega_m: 1.0,
        }
    }

    pub fn with_detection(mut self, delta_s: f64, g_s: f64, kappa_s: f64) -> Self {
        self.detection = Some(LinearizedDetection { delta_s, g_s, kappa_s });
        self
    }
}

/// What to do when the fixed-point equations admit several mechanical
/// amplitudes (optomechanical bistability).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchPolicy {
    /// Report a [`Error::BranchAmbiguity`] listing all admissible roots.
    Strict,
    /// Follow the branch continuously connected to the undriven solution
    /// (the lowest admissible root).
    Continuation,
}

#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    /// Scale-normalized residual tolerance.
    pub tolerance: f64,
    pub max_iterations: usize,
    pub branch_policy: BranchPolicy,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tolerance: 1.0e-12,
            max_iterations: 500,
            branch_policy: BranchPolicy::Strict,
        }
    }
}

impl SolveOptions {
    /// The cubic-nonlinearity variant always follows the continuation
    /// branch; its amplitude equation is quadratic, so two formal roots
    /// exist at every drive.
    pub fn default_for(kind: NonlinearityKind) -> Self {
        let branch_policy = match kind {
            NonlinearityKind::Duffing => BranchPolicy::Strict,
            NonlinearityKind::Cubic => BranchPolicy::Continuation,
        };
        SolveOptions { branch_policy, ..Default::default() }
    }
}

fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().fold(0.0, |acc, &c| acc * x + c)
}

/// All real roots of c₃x³ + c₂x² + c₁x + c₀ = 0, sorted ascending.
///
/// Each root is polished with Newton iterations on the original polynomial
/// and verified against |p(x)| < 10⁻¹⁰ · max|cᵢ|. A polynomial with
/// c₃ = c₂ = c₁ = 0 has no roots to report and is a domain error.
pub fn real_cubic_roots(c3: f64, c2: f64, c1: f64, c0: f64) -> Result<Vec<f64>> {
    if c3 == 0.0 && c2 == 0.0 && c1 == 0.0 {
        return Err(Error::Domain("degenerate polynomial: all of c3, c2, c1 are zero".into()));
    }
    let coeffs = [c3, c2, c1, c0];
    let scale = coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));

    let mut roots: Vec<f64> = if c3 == 0.0 {
        if c2 == 0.0 {
            vec![-c0 / c1]
        } else {
            // Numerically stable quadratic formula.
            let disc = c1 * c1 - 4.0 * c2 * c0;
            if disc < 0.0 {
                Vec::new()
            } else if disc == 0.0 {
                vec![-c1 / (2.0 * c2)]
            } else {
                let q = -0.5 * (c1 + c1.signum() * disc.sqrt());
                let q = if q == 0.0 { -0.5 * disc.sqrt() } else { q };
                vec![q / c2, c0 / q]
            }
        }
    } else {
        // Depressed cubic t^3 + p t + q with x = t - a/3.
        let a = c2 / c3;
        let b = c1 / c3;
        let c = c0 / c3;
        let p = b - a * a / 3.0;
        let q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
        let shift = -a / 3.0;
        let eps = 1e-14 * (1.0 + a.abs().powi(3) + b.abs() + c.abs());
        if p.abs() < eps && q.abs() < eps {
            vec![shift]
        } else {
            let disc = 0.25 * q * q + p * p * p / 27.0;
            if disc > 0.0 {
                // One real root (Cardano).
                let s = disc.sqrt();
                let u = (-0.5 * q + s).cbrt();
                let v = (-0.5 * q - s).cbrt();
                vec![u + v + shift]
            } else {
                // Three real roots (trigonometric form); p < 0 here.
                let m = 2.0 * (-p / 3.0).sqrt();
                let arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
                let theta = arg.acos() / 3.0;
                (0..3)
                    .map(|k| {
                        m * (theta - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos() + shift
                    })
                    .collect()
            }
        }
    };

    // Newton polish on the original coefficients.
    let deriv = [3.0 * c3, 2.0 * c2, c1];
    for r in roots.iter_mut() {
        for _ in 0..40 {
            let f = horner(&coeffs, *r);
            let df = horner(&deriv, *r);
            if df == 0.0 {
                break;
            }
            let step = f / df;
            *r -= step;
            if step.abs() <= 1e-16 * (1.0 + r.abs()) {
                break;
            }
        }
    }
    roots.sort_by(|x, y| x.partial_cmp(y).unwrap());
    roots.dedup_by(|x, y| (*x - *y).abs() <= 1e-9 * (1.0 + x.abs().max(y.abs())));

    for &r in &roots {
        if !r.is_finite() || horner(&coeffs, r).abs() >= 1e-10 * scale.max(1e-300) {
            return Err(Error::Numeric(format!(
                "cubic root verification failed at x = {r}: |p(x)| = {:.3e}",
                horner(&coeffs, r).abs()
            )));
        }
    }
    Ok(roots)
}

/// Mechanical amplitude satisfying the cubic/quadratic amplitude equation
/// for a given optical source term `c` (= g₀|α|² plus the detection term).
fn beta_update(params: &SystemParams, c: f64) -> Result<f64> {
    let w = params.omega_m;
    let eta = params.eta;
    match params.nonlinearity {
        NonlinearityKind::Duffing => {
            // 16 η β³ + (12 η + ω_m) β − c = 0 is strictly increasing in β,
            // so exactly one real root exists.
            let roots = real_cubic_roots(16.0 * eta, 0.0, 12.0 * eta + w, -c)?;
            debug_assert_eq!(roots.len(), 1);
            Ok(roots[0])
        }
        NonlinearityKind::Cubic => {
            if eta == 0.0 {
                return Ok(c / w);
            }
            // 12 η β² + ω_m β + (3η − c) = 0; the branch connected to the
            // undriven solution is the larger root.
            let disc = w * w - 48.0 * eta * (3.0 * eta - c);
            if disc < 0.0 {
                return Err(Error::Numeric(format!(
                    "cubic-nonlinearity amplitude equation has no real root (disc = {disc:.3e})"
                )));
            }
            Ok((-w + disc.sqrt()) / (24.0 * eta))
        }
    }
}

/// Lowest admissible β for the branch scan: 0 for Duffing; the zero-drive
/// continuation root (≈ −3η/ω_m) for the cubic variant.
fn beta_branch_floor(params: &SystemParams) -> f64 {
    match params.nonlinearity {
        NonlinearityKind::Duffing => 0.0,
        NonlinearityKind::Cubic => beta_update(params, 0.0).unwrap_or(0.0) - 1e-9,
    }
}

fn cavity_amplitude(delta: f64, kappa: f64, drive: f64) -> Complex64 {
    Complex64::new(0.0, drive) / Complex64::new(-kappa / 2.0, -delta)
}

/// Optical source term g₀|α(β)|² (+ g_s|α_s(β)|²) with the cavity amplitudes
/// eliminated in closed form.
fn source_term(params: &SystemParams, beta: f64) -> f64 {
    let delta = params.delta_a - 2.0 * params.g0 * beta;
    let alpha_sq = params.drive_amplitude * params.drive_amplitude
        / (delta * delta + params.kappa * params.kappa / 4.0);
    let mut c = params.g0 * alpha_sq;
    if let Some(det) = &params.detection {
        let delta_s = det.delta_s - 2.0 * det.g_s * beta;
        let alpha_s_sq = det.drive_amplitude_s * det.drive_amplitude_s
            / (delta_s * delta_s + det.kappa_s * det.kappa_s / 4.0);
        c += det.g_s * alpha_s_sq;
    }
    c
}

/// Scalar residual of the fully reduced fixed-point system: the mechanical
/// amplitude equation with α(β) substituted.
fn scalar_residual(params: &SystemParams, beta: f64) -> f64 {
    let c = source_term(params, beta);
    let w = params.omega_m;
    let eta = params.eta;
    match params.nonlinearity {
        NonlinearityKind::Duffing => 16.0 * eta * beta.powi(3) + (12.0 * eta + w) * beta - c,
        NonlinearityKind::Cubic => 12.0 * eta * beta * beta + w * beta + 3.0 * eta - c,
    }
}

/// Scale-normalized residuals of the coupled equations at (α, β, α_s).
fn residuals(params: &SystemParams, alpha: Complex64, beta: f64, alpha_s: Option<Complex64>) -> f64 {
    let delta = params.delta_a - 2.0 * params.g0 * beta;
    let lhs = Complex64::new(-params.kappa / 2.0, -delta) * alpha
        - Complex64::new(0.0, params.drive_amplitude);
    let scale_a = params.drive_amplitude.abs().max(1.0);
    let mut res = lhs.norm() / scale_a;

    let mut c = params.g0 * alpha.norm_sqr();
    if let (Some(det), Some(a_s)) = (&params.detection, alpha_s) {
        let delta_s = det.delta_s - 2.0 * det.g_s * beta;
        let lhs_s = Complex64::new(-det.kappa_s / 2.0, -delta_s) * a_s
            - Complex64::new(0.0, det.drive_amplitude_s);
        let scale_s = det.drive_amplitude_s.abs().max(1.0);
        res = res.max(lhs_s.norm() / scale_s);
        c += det.g_s * a_s.norm_sqr();
    }
    let w = params.omega_m;
    let eta = params.eta;
    let mech = match params.nonlinearity {
        NonlinearityKind::Duffing => 16.0 * eta * beta.powi(3) + (12.0 * eta + w) * beta - c,
        NonlinearityKind::Cubic => 12.0 * eta * beta * beta + w * beta + 3.0 * eta - c,
    };
    res.max(mech.abs() / c.abs().max(1.0))
}

/// Upper bound on β from the largest possible source term (cavity driven
/// exactly on resonance).
fn beta_upper_bound(params: &SystemParams) -> Result<f64> {
    let mut c_max = params.g0 * params.drive_amplitude * params.drive_amplitude
        / (params.kappa * params.kappa / 4.0);
    if let Some(det) = &params.detection {
        c_max += det.g_s * det.drive_amplitude_s * det.drive_amplitude_s
            / (det.kappa_s * det.kappa_s / 4.0);
    }
    Ok(beta_update(params, c_max)? + 1.0)
}

/// Finds every root of the scalar residual on the admissible branch range,
/// by sign-change scan plus bisection refinement. Extra crossings can only
/// appear where a cavity Lorentzian peaks, so the uniform grid is
/// supplemented with fine grids around each resonance.
fn scan_all_roots(params: &SystemParams, lo: f64, hi: f64) -> Vec<f64> {
    const STEPS: usize = 800;
    let mut grid: Vec<f64> = (0..=STEPS).map(|k| lo + (hi - lo) * k as f64 / STEPS as f64).collect();
    let mut add_resonance = |center: f64, width: f64| {
        if center > lo && center < hi && width > 0.0 {
            for k in -100i32..=100 {
                let x = center + width * 10.0 * k as f64 / 100.0;
                if x > lo && x < hi {
                    grid.push(x);
                }
            }
        }
    };
    if params.g0 > 0.0 {
        add_resonance(params.delta_a / (2.0 * params.g0), params.kappa / (2.0 * params.g0));
    }
    if let Some(det) = &params.detection {
        if det.g_s > 0.0 {
            add_resonance(det.delta_s / (2.0 * det.g_s), det.kappa_s / (2.0 * det.g_s));
        }
    }
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
    grid.dedup();

    let mut roots = Vec::new();
    let mut prev_x = grid[0];
    let mut prev_f = scalar_residual(params, prev_x);
    for &x in &grid[1..] {
        let f = scalar_residual(params, x);
        if prev_f == 0.0 {
            roots.push(prev_x);
        } else if prev_f * f < 0.0 {
            let (mut a, mut b, mut fa) = (prev_x, x, prev_f);
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                let fm = scalar_residual(params, m);
                if fa * fm <= 0.0 {
                    b = m;
                } else {
                    a = m;
                    fa = fm;
                }
                if (b - a).abs() <= 1e-15 * (1.0 + a.abs()) {
                    break;
                }
            }
            roots.push(0.5 * (a + b));
        }
        prev_x = x;
        prev_f = f;
    }
    roots.dedup_by(|x, y| (*x - *y).abs() <= 1e-7 * (1.0 + x.abs().max(y.abs())));
    roots
}

/// Solves Eqs. of the classical steady state with default options for the
/// configured nonlinearity.
pub fn solve_classical_fixed_point(params: &SystemParams) -> Result<ClassicalFixedPoint> {
    solve_classical_fixed_point_with(params, &SolveOptions::default_for(params.nonlinearity))
}

/// Alternates the closed-form cavity update with the mechanical amplitude
/// root until Cauchy convergence of the scale-normalized residual, then
/// applies safeguarded Newton on the reduced scalar equation if needed.
/// A sign-change scan detects coexisting branches.
pub fn solve_classical_fixed_point_with(
    params: &SystemParams,
    options: &SolveOptions,
) -> Result<ClassicalFixedPoint> {
    params.validate()?;
    let drive_off = params.drive_amplitude == 0.0
        && params.detection.as_ref().is_none_or(|d| d.drive_amplitude_s == 0.0);

    let assemble = |beta: f64, iterations: usize| -> ClassicalFixedPoint {
        let delta = params.delta_a - 2.0 * params.g0 * beta;
        let alpha = cavity_amplitude(delta, params.kappa, params.drive_amplitude);
        let alpha_s = params.detection.as_ref().map(|det| {
            let delta_s = det.delta_s - 2.0 * det.g_s * beta;
            cavity_amplitude(delta_s, det.kappa_s, det.drive_amplitude_s)
        });
        let residual = residuals(params, alpha, beta, alpha_s);
        ClassicalFixedPoint { alpha, beta, alpha_s, iterations, residual }
    };

    if drive_off && params.nonlinearity == NonlinearityKind::Duffing {
        return Ok(assemble(0.0, 0));
    }

    // Stage 1: alternation.
    let mut beta = beta_branch_floor(params).max(0.0);
    let mut converged = false;
    let mut iterations = 0;
    for it in 1..=options.max_iterations {
        iterations = it;
        let c = source_term(params, beta);
        let beta_new = beta_update(params, c)?;
        let moved = (beta_new - beta).abs();
        beta = beta_new;
        if moved <= 1e-15 * (1.0 + beta.abs()) {
            converged = true;
            break;
        }
    }

    // Stage 2: safeguarded Newton/bisection on the scalar reduction when
    // alternation stalls or overshoots (near-resonant feedback).
    if !converged || assemble(beta, iterations).residual > options.tolerance {
        let lo = beta_branch_floor(params);
        let hi = beta_upper_bound(params)?;
        let roots = scan_all_roots(params, lo, hi);
        if roots.is_empty() {
            let state = assemble(beta, iterations);
            return Err(Error::Convergence {
                iterations: options.max_iterations,
                residual: state.residual,
            });
        }
        beta = roots[0];
    }

    let state = assemble(beta, iterations);
    if state.residual > options.tolerance {
        return Err(Error::Convergence { iterations, residual: state.residual });
    }

    // Branch multiplicity check.
    let lo = beta_branch_floor(params);
    let hi = beta_upper_bound(params)?;
    let roots = scan_all_roots(params, lo, hi);
    if roots.len() > 1 {
        match options.branch_policy {
            BranchPolicy::Strict => return Err(Error::BranchAmbiguity { roots }),
            BranchPolicy::Continuation => {
                let state = assemble(roots[0], iterations);
                if state.residual > options.tolerance {
                    return Err(Error::Convergence { iterations, residual: state.residual });
                }
                return Ok(state);
            }
        }
    }
    Ok(state)
}

/// Linearized-model coefficients around a converged fixed point.
pub fn linearize(params: &SystemParams, fp: &ClassicalFixedPoint) -> LinearizedModel {
    let beta = fp.beta;
    let lambda = match params.nonlinearity {
        NonlinearityKind::Duffing => 3.0 * params.eta * (4.0 * beta * beta + 1.0),
        NonlinearityKind::Cubic => 6.0 * params.eta * beta,
    };
    let detection = match (&params.detection, fp.alpha_s) {
        (Some(det), Some(alpha_s)) => Some(LinearizedDetection {
            delta_s: det.delta_s - 2.0 * det.g_s * beta,
            g_s: det.g_s * alpha_s.norm(),
            kappa_s: det.kappa_s,
        }),
        _ => None,
    };
    LinearizedModel {
        delta_a: params.delta_a - 2.0 * params.g0 * beta,
        omega_m_tilde: params.omega_m + 2.0 * lambda,
        lambda,
        g: params.g0 * fp.alpha.norm(),
        detection,
        kappa: params.kappa,
        gamma: params.gamma,
        n_th: params.n_th,
        omega_m: params.omega_m,
    }
}

/// Transformed mechanical frequency ω'_m implied by a linearized model.
fn omega_m_prime_of(lin: &LinearizedModel) -> f64 {
    lin.omega_m * (1.0 + 4.0 * lin.lambda / lin.omega_m).sqrt()
}

/// Residual of the optimal-detuning condition at a bare detuning δ_a. The
/// exploration always follows the continuation branch: the bisection path
/// may cross bistable regions even when the end point is single-valued.
fn detuning_mismatch(params: &SystemParams, delta_a: f64, options: &SolveOptions) -> Result<f64> {
    let mut p = params.clone();
    p.delta_a = delta_a;
    let explore = SolveOptions { branch_policy: BranchPolicy::Continuation, ..*options };
    let fp = solve_classical_fixed_point_with(&p, &explore)?;
    let lin = linearize(&p, &fp);
    Ok(lin.delta_a - omega_m_prime_of(&lin))
}

/// Finds the bare detuning δ_a at which the effective detuning equals the
/// transformed mechanical frequency, Δ_a = ω'_m, self-consistently.
///
/// The mismatch F(δ_a) = Δ_a − ω'_m is strictly increasing (raising δ_a
/// weakens the drive response, lowering both β and ω'_m), so a bracketed
/// bisection converges unconditionally; the bracket is expanded upward from
/// F(0) < 0.
pub fn solve_at_optimal_detuning(
    params: &SystemParams,
) -> Result<(SystemParams, ClassicalFixedPoint, LinearizedModel)> {
    solve_at_optimal_detuning_with(params, &SolveOptions::default_for(params.nonlinearity))
}

pub fn solve_at_optimal_detuning_with(
    params: &SystemParams,
    options: &SolveOptions,
) -> Result<(SystemParams, ClassicalFixedPoint, LinearizedModel)> {
    const TOL: f64 = 1.0e-8;
    let mut lo = 0.0;
    let mut f_lo = detuning_mismatch(params, lo, options)?;
    if f_lo > 0.0 {
        return Err(Error::Numeric(format!(
            "optimal-detuning bracket failed: mismatch at delta_a = 0 is {f_lo:.3e} > 0"
        )));
    }
    let mut hi = params.omega_m.max(1.0);
    let mut f_hi = detuning_mismatch(params, hi, options)?;
    let mut grow = 0;
    while f_hi < 0.0 {
        lo = hi;
        f_lo = f_hi;
        hi *= 2.0;
        f_hi = detuning_mismatch(params, hi, options)?;
        grow += 1;
        if grow > 200 {
            return Err(Error::Convergence { iterations: grow, residual: f_hi.abs() });
        }
    }

    let mut mid = 0.5 * (lo + hi);
    let mut f_mid = detuning_mismatch(params, mid, options)?;
    for _ in 0..300 {
        if f_mid.abs() < TOL {
            break;
        }
        if f_lo * f_mid <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
            f_lo = f_mid;
        }
        if hi - lo <= f64::EPSILON * hi.abs() {
            break;
        }
        mid = 0.5 * (lo + hi);
        f_mid = detuning_mismatch(params, mid, options)?;
    }
    if f_mid.abs() >= TOL {
        return Err(Error::Convergence { iterations: 300, residual: f_mid.abs() });
    }

    let mut resolved = params.clone();
    resolved.delta_a = mid;
    let fp = solve_classical_fixed_point_with(&resolved, options)?;
    let lin = linearize(&resolved, &fp);
    Ok((resolved, fp, lin))
}
