//! Truncated Fock-space Liouvillian steady states: the brute-force oracle
//! that validates the covariance engine, the squeezing-frame treatment,
//! and the linearization (with and without the residual nonlinear terms).
//!
//! States live on the product space cavity ⊗ mechanics (⊗ ancilla). The
//! master equation is vectorized column-major and solved directly as a
//! sparse linear system with one row replaced by the trace functional.

use faer::prelude::*;
use faer::sparse::{SparseColMat, Triplet};
use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{NonlinearityKind, SystemParams};
use crate::steadystate::{ClassicalFixedPoint, LinearizedModel};

type CMat = DMatrix<Complex64>;

/// Which displaced frame the master equation is written in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Frame {
    /// Fluctuations around (α, β); quadratic Hamiltonian plus optional
    /// residual nonlinear terms.
    Shifted,
    /// Additionally Bogoliubov-rotated so the mechanical quadratic form is
    /// diagonal; the mechanical dissipators pick up squeezing factors.
    ShiftedAndSqueezed,
}

#[derive(Debug, Clone, Copy)]
pub struct FockConfig {
    /// Cavity cutoff (levels retained; ≥ 2).
    pub n_cav: usize,
    /// Mechanical cutoff (≥ 2).
    pub n_mech: usize,
    /// Keep the residual nonlinear Hamiltonian terms.
    pub include_nl: bool,
    pub frame: Frame,
    /// Add the ancilla readout mode (third mode, cutoff `n_cav`).
    pub include_detection: bool,
    /// Keep the non-rotating-wave cross terms of the transformed
    /// mechanical dissipator (squeezed frame only). On by default so the
    /// two frames agree exactly.
    pub dissipator_cross_terms: bool,
    /// Refusal threshold for the estimated factorization footprint.
    pub memory_budget_bytes: usize,
}

impl Default for FockConfig {
    fn default() -> Self {
        FockConfig {
            n_cav: 6,
            n_mech: 10,
            include_nl: false,
            frame: Frame::Shifted,
            include_detection: false,
            dissipator_cross_terms: true,
            memory_budget_bytes: 4 << 30,
        }
    }
}

/// Steady state of the truncated master equation.
#[derive(Debug, Clone)]
pub struct FockSteadyState {
    /// Hermitized density operator on the truncated product space.
    pub rho: CMat,
    /// |Tr ρ − 1|.
    pub trace_error: f64,
    /// Set when the top retained level of every mode holds < 10⁻⁶
    /// population (cutoff sweeps additionally require a variance plateau).
    pub cutoff_converged: bool,
    /// ⟨δX²⟩ of the mechanical displacement quadrature in the original
    /// (shifted, untransformed) frame.
    pub variance_x: f64,
    /// ⟨δX²⟩ evaluated in the state's own frame.
    pub in_frame_variance_x: f64,
    /// Most negative eigenvalue of ρ (≥ −10⁻⁸ for a trustworthy solve).
    pub min_eigenvalue: f64,
    pub top_population_cav: f64,
    pub top_population_mech: f64,
    pub n_cav: usize,
    pub n_mech: usize,
    pub n_det: usize,
    pub frame: Frame,
    /// Squeezing parameter of the frame (0 in the shifted frame).
    pub r: f64,
}

/// Sparse generator of the vectorized master equation with the trace row
/// substituted, ready for a direct solve.
pub struct Liouvillian {
    mat: SparseColMat<usize, Complex64>,
    dim: usize,
    n_cav: usize,
    n_mech: usize,
    n_det: usize,
    frame: Frame,
    r: f64,
    mech_x: CMat,
}

fn destroy(n: usize) -> CMat {
    CMat::from_fn(n, n, |r, c| {
        if c == r + 1 {
            Complex64::new((c as f64).sqrt(), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

fn nonzeros(m: &CMat) -> Vec<(usize, usize, Complex64)> {
    let mut out = Vec::new();
    for c in 0..m.ncols() {
        for r in 0..m.nrows() {
            let v = m[(r, c)];
            if v.norm_sqr() > 0.0 {
                out.push((r, c, v));
            }
        }
    }
    out
}

/// Accumulates the superoperator of ρ ↦ A·ρ·B into the triplet list:
/// L[(r + N·c), (r' + N·c')] += scale · A[r, r'] · B[c', c].
fn add_sandwich(
    trips: &mut Vec<(usize, usize, Complex64)>,
    a: &CMat,
    b: &CMat,
    scale: Complex64,
) {
    let n = a.nrows();
    let a_nz = nonzeros(a);
    let b_nz = nonzeros(b);
    for &(ar, ac, av) in &a_nz {
        for &(br, bc, bv) in &b_nz {
            trips.push((ar + n * bc, ac + n * br, scale * av * bv));
        }
    }
}

/// −i[H, ρ].
fn add_hamiltonian(trips: &mut Vec<(usize, usize, Complex64)>, h: &CMat, eye: &CMat) {
    add_sandwich(trips, h, eye, -Complex64::i());
    add_sandwich(trips, eye, h, Complex64::i());
}

/// rate · D[c]ρ = rate · (cρc† − {c†c, ρ}/2).
fn add_dissipator(trips: &mut Vec<(usize, usize, Complex64)>, c: &CMat, eye: &CMat, rate: f64) {
    if rate == 0.0 {
        return;
    }
    let scale = Complex64::new(rate, 0.0);
    let c_dag = c.adjoint();
    let c_dag_c = &c_dag * c;
    add_sandwich(trips, c, &c_dag, scale);
    add_sandwich(trips, &c_dag_c, eye, -0.5 * scale);
    add_sandwich(trips, eye, &c_dag_c, -0.5 * scale);
}

/// rate · G[o]ρ = rate · (oρo − {o², ρ}/2), the non-rotating-wave cross
/// term of a squeezed-frame dissipator.
fn add_cross_term(trips: &mut Vec<(usize, usize, Complex64)>, o: &CMat, eye: &CMat, rate: f64) {
    if rate == 0.0 {
        return;
    }
    let scale = Complex64::new(rate, 0.0);
    let o_sq = o * o;
    add_sandwich(trips, o, o, scale);
    add_sandwich(trips, &o_sq, eye, -0.5 * scale);
    add_sandwich(trips, eye, &o_sq, -0.5 * scale);
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Refuses configurations whose factorization footprint would exceed the
/// budget. Rough estimate: ~60·dim² triplets at 32 B plus a fill factor of
/// ~4 on the factorization.
pub fn check_capacity(cfg: &FockConfig) -> Result<()> {
    let n_det = if cfg.include_detection { cfg.n_cav } else { 1 };
    let dim = cfg.n_cav * cfg.n_mech * n_det;
    let l_dim = dim * dim;
    let est_bytes = (60 * l_dim) as u128 * 32 * 41 / 10;
    if est_bytes > cfg.memory_budget_bytes as u128 {
        return Err(Error::Capacity(format!(
            "estimated Liouvillian footprint {:.2} GiB exceeds budget {:.2} GiB \
             (Hilbert dimension {dim})",
            est_bytes as f64 / (1u64 << 30) as f64,
            cfg.memory_budget_bytes as f64 / (1u64 << 30) as f64,
        )));
    }
    Ok(())
}

/// Builds the shifted-frame (optionally squeezed) Liouvillian for the
/// linearized model, with the residual nonlinear terms when requested.
pub fn build_liouvillian(
    lin: &LinearizedModel,
    params: &SystemParams,
    fp: &ClassicalFixedPoint,
    cfg: &FockConfig,
) -> Result<Liouvillian> {
    if cfg.n_cav < 2 || cfg.n_mech < 2 {
        return Err(Error::Domain(format!(
            "Fock cutoffs must be at least 2, got ({}, {})",
            cfg.n_cav, cfg.n_mech
        )));
    }
    if cfg.include_nl && cfg.frame == Frame::ShiftedAndSqueezed {
        return Err(Error::Domain(
            "residual nonlinear terms are only supported in the shifted frame".into(),
        ));
    }
    if cfg.include_detection && lin.detection.is_none() {
        return Err(Error::Domain(
            "include_detection requires a linearized model with a detection branch".into(),
        ));
    }
    check_capacity(cfg)?;
    let n_det = if cfg.include_detection { cfg.n_cav } else { 1 };
    let dim = cfg.n_cav * cfg.n_mech * n_det;
    let l_dim = dim * dim;

    // Full-space operators; layout cavity ⊗ mechanics ⊗ ancilla.
    let a_1 = destroy(cfg.n_cav);
    let b_1 = destroy(cfg.n_mech);
    let eye_cav = identity(cfg.n_cav);
    let eye_mech = identity(cfg.n_mech);
    let eye_det = identity(n_det);
    let a_op = a_1.kronecker(&eye_mech).kronecker(&eye_det);
    let b_op = eye_cav.kronecker(&b_1).kronecker(&eye_det);
    let s_op = eye_cav.kronecker(&eye_mech).kronecker(&destroy(n_det));
    let eye = identity(dim);

    let a_dag = a_op.adjoint();
    let b_dag = b_op.adjoint();
    let x_pos = &a_op + &a_dag;
    let y_pos = &b_op + &b_dag;

    let transformed = crate::transform::transformed_model(lin)?;
    let r = match cfg.frame {
        Frame::Shifted => 0.0,
        Frame::ShiftedAndSqueezed => transformed.r,
    };

    let mut h = match cfg.frame {
        Frame::Shifted => {
            let mut h = &a_dag * &a_op * real(lin.delta_a)
                + &b_dag * &b_op * real(lin.omega_m_tilde)
                + (&b_op * &b_op + &b_dag * &b_dag) * real(lin.lambda)
                - &x_pos * &y_pos * real(lin.g);
            if cfg.include_nl {
                h += nonlinear_hamiltonian(params, fp, &a_op, &b_op)?;
            }
            h
        }
        Frame::ShiftedAndSqueezed => {
            &a_dag * &a_op * real(lin.delta_a)
                + &b_dag * &b_op * real(transformed.omega_m_prime)
                - &x_pos * &y_pos * real(transformed.g_prime)
        }
    };
    if cfg.include_detection {
        let det = lin.detection.as_ref().unwrap();
        let s_dag = s_op.adjoint();
        // in the squeezed frame the readout coupling picks up e^{−r}
        let g_s = det.g_s * (-r).exp();
        h += &s_dag * &s_op * real(det.delta_s) - (&s_op + &s_dag) * &y_pos * real(g_s);
    }

    let mut trips: Vec<(usize, usize, Complex64)> = Vec::new();
    add_hamiltonian(&mut trips, &h, &eye);
    add_dissipator(&mut trips, &a_op, &eye, lin.kappa);
    if cfg.include_detection {
        add_dissipator(&mut trips, &s_op, &eye, lin.detection.as_ref().unwrap().kappa_s);
    }
    match cfg.frame {
        Frame::Shifted => {
            add_dissipator(&mut trips, &b_op, &eye, lin.gamma * (lin.n_th + 1.0));
            add_dissipator(&mut trips, &b_dag, &eye, lin.gamma * lin.n_th);
        }
        Frame::ShiftedAndSqueezed => {
            let n_prime = transformed.n_th_prime;
            add_dissipator(&mut trips, &b_op, &eye, lin.gamma * (n_prime + 1.0));
            add_dissipator(&mut trips, &b_dag, &eye, lin.gamma * n_prime);
            if cfg.dissipator_cross_terms {
                let rate = -lin.gamma * (2.0 * lin.n_th + 1.0) * r.cosh() * r.sinh();
                add_cross_term(&mut trips, &b_op, &eye, rate);
                add_cross_term(&mut trips, &b_dag, &eye, rate);
            }
        }
    }

    // Replace the first row with the trace functional: Σ_i vec(ρ)[i(dim+1)] = 1.
    trips.retain(|&(row, _, _)| row != 0);
    for i in 0..dim {
        trips.push((0, i * (dim + 1), Complex64::new(1.0, 0.0)));
    }

    let triplets: Vec<Triplet<usize, usize, Complex64>> =
        trips.into_iter().map(|(r, c, v)| Triplet::new(r, c, v)).collect();
    let mat = SparseColMat::try_new_from_triplets(l_dim, l_dim, &triplets)
        .map_err(|e| Error::Numeric(format!("sparse assembly failed: {e:?}")))?;

    let mech_x = y_pos * real(std::f64::consts::FRAC_1_SQRT_2);
    Ok(Liouvillian {
        mat,
        dim,
        n_cav: cfg.n_cav,
        n_mech: cfg.n_mech,
        n_det,
        frame: cfg.frame,
        r,
        mech_x,
    })
}

/// Residual nonlinear terms left over after the linearization: the
/// radiation-pressure remainder and the cubic/quartic mechanical terms
/// weighted by the classical amplitude.
fn nonlinear_hamiltonian(
    params: &SystemParams,
    fp: &ClassicalFixedPoint,
    a_op: &CMat,
    b_op: &CMat,
) -> Result<CMat> {
    let beta = fp.beta;
    let eta = params.eta;
    let b_dag = b_op.adjoint();
    let a_dag = a_op.adjoint();
    let y_pos = b_op + &b_dag;
    let radiation = -(&a_dag * a_op * &y_pos) * real(params.g0);
    let b2 = b_op * b_op;
    let b3 = &b2 * b_op;
    let mech = match params.nonlinearity {
        NonlinearityKind::Duffing => {
            let b4 = &b3 * b_op;
            let bd2 = b2.adjoint();
            let bd3 = b3.adjoint();
            let bd4 = b4.adjoint();
            (&bd4 + &b4) * real(eta / 2.0)
                + (&bd3 * b_op + &b_dag * &b3) * real(2.0 * eta)
                + (&bd2 * &b2) * real(3.0 * eta)
                + (&bd3 + &b3) * real(4.0 * eta * beta)
                + (&bd2 * b_op + &b_dag * &b2) * real(12.0 * eta * beta)
        }
        NonlinearityKind::Cubic => {
            let bd2 = b2.adjoint();
            let bd3 = b3.adjoint();
            (&bd2 * b_op + b_dag * &b2) * real(3.0 * eta) + (&bd3 + &b3) * real(eta)
        }
    };
    Ok(radiation + mech)
}

impl Liouvillian {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Direct sparse solve of Lρ = 0 with the unit-trace row.
    pub fn steady_state(&self) -> Result<FockSteadyState> {
        steady_state(self)
    }
}

/// Solves for the kernel of the trace-constrained Liouvillian and reports
/// the state together with its physicality diagnostics.
pub fn steady_state(liouvillian: &Liouvillian) -> Result<FockSteadyState> {
    let dim = liouvillian.dim;
    let l_dim = dim * dim;
    let lu = liouvillian.mat.sp_lu().map_err(|e| {
        Error::Numeric(format!(
            "sparse factorization failed ({e:?}); consider larger cutoffs or the \
             time-integration fallback"
        ))
    })?;
    let mut rhs = Mat::<Complex64>::zeros(l_dim, 1);
    rhs[(0, 0)] = Complex64::new(1.0, 0.0);
    let sol = lu.solve(&rhs);

    let mut rho = CMat::from_fn(dim, dim, |r, c| sol[(r + dim * c, 0)]);
    rho = (&rho + &rho.adjoint()) * real(0.5);
    let trace: Complex64 = rho.trace();
    let trace_error = (trace - Complex64::new(1.0, 0.0)).norm();
    if !trace_error.is_finite() || trace_error > 1e-6 {
        return Err(Error::Numeric(format!(
            "steady-state trace defect {trace_error:.3e}; the solve is ill-conditioned \
             (try larger cutoffs)"
        )));
    }

    let min_eigenvalue = rho.clone().symmetric_eigen().eigenvalues.min();

    let (mut pop_cav, mut pop_mech) = (0.0f64, 0.0f64);
    for i in 0..dim {
        let i_det = i % liouvillian.n_det;
        let i_mech = (i / liouvillian.n_det) % liouvillian.n_mech;
        let i_cav = i / (liouvillian.n_det * liouvillian.n_mech);
        let p = rho[(i, i)].re;
        let top_optical = i_cav == liouvillian.n_cav - 1
            || (liouvillian.n_det > 1 && i_det == liouvillian.n_det - 1);
        if top_optical {
            pop_cav += p;
        }
        if i_mech == liouvillian.n_mech - 1 {
            pop_mech += p;
        }
    }

    let x = &liouvillian.mech_x;
    let m1 = (x * &rho).trace().re;
    let m2 = (&(x * x) * &rho).trace().re;
    let in_frame = m2 - m1 * m1;
    let variance_x = match liouvillian.frame {
        Frame::Shifted => in_frame,
        Frame::ShiftedAndSqueezed => (-2.0 * liouvillian.r).exp() * in_frame,
    };

    let cutoff_converged = pop_cav < 1e-6 && pop_mech < 1e-6;
    Ok(FockSteadyState {
        rho,
        trace_error,
        cutoff_converged,
        variance_x,
        in_frame_variance_x: in_frame,
        min_eigenvalue,
        top_population_cav: pop_cav,
        top_population_mech: pop_mech,
        n_cav: liouvillian.n_cav,
        n_mech: liouvillian.n_mech,
        n_det: liouvillian.n_det,
        frame: liouvillian.frame,
        r: liouvillian.r,
    })
}

/// ⟨δX²⟩ in the original frame from a squeezed-frame state: the frame
/// rotation acts on the quadrature as S†(r)·X·S(r) = e^{−r}·X, so both
/// moments pick up powers of e^{−r}.
pub fn variance_in_original_frame(state: &FockSteadyState, r: f64) -> f64 {
    (-2.0 * r).exp() * state.in_frame_variance_x
}

impl FockSteadyState {
    /// Diagonal of ρ with decoded mode indices plus the variance summary,
    /// as CSV text for offline inspection.
    pub fn diagnostics_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "# variance_x = {:e}, in_frame_variance_x = {:e}, r = {:e}, trace_error = {:e}\n",
            self.variance_x, self.in_frame_variance_x, self.r, self.trace_error
        ));
        out.push_str("i_cav,i_mech,i_det,population\n");
        let dim = self.rho.nrows();
        for i in 0..dim {
            let i_det = i % self.n_det;
            let i_mech = (i / self.n_det) % self.n_mech;
            let i_cav = i / (self.n_det * self.n_mech);
            out.push_str(&format!("{i_cav},{i_mech},{i_det},{:e}\n", self.rho[(i, i)].re));
        }
        out
    }
}

#[derive(Debug, Clone, Copy)]
pub struct CutoffPoint {
    pub n_cav: usize,
    pub n_mech: usize,
    pub variance_x: f64,
    pub top_population: f64,
}

#[derive(Debug, Clone)]
pub struct CutoffReport {
    pub points: Vec<CutoffPoint>,
    pub converged: bool,
}

/// Runs the steady state over an ascending cutoff schedule; converged when
/// the variance moves by less than 0.1% between the final two entries and
/// the top levels are unpopulated.
pub fn cutoff_sweep(
    lin: &LinearizedModel,
    params: &SystemParams,
    fp: &ClassicalFixedPoint,
    base: &FockConfig,
    schedule: &[(usize, usize)],
) -> Result<CutoffReport> {
    if schedule.len() < 2 {
        return Err(Error::Domain("cutoff schedule needs at least two entries".into()));
    }
    for pair in schedule.windows(2) {
        let grew = pair[1].0 >= pair[0].0 && pair[1].1 >= pair[0].1 && pair[1] != pair[0];
        if !grew {
            return Err(Error::Domain(format!(
                "cutoff schedule must ascend, got {:?} after {:?}",
                pair[1], pair[0]
            )));
        }
    }
    let mut points = Vec::with_capacity(schedule.len());
    let mut pop_ok = false;
    for &(n_cav, n_mech) in schedule {
        let cfg = FockConfig { n_cav, n_mech, ..*base };
        let state = steady_state(&build_liouvillian(lin, params, fp, &cfg)?)?;
        pop_ok = state.top_population_cav < 1e-6 && state.top_population_mech < 1e-6;
        points.push(CutoffPoint {
            n_cav,
            n_mech,
            variance_x: state.variance_x,
            top_population: state.top_population_cav.max(state.top_population_mech),
        });
    }
    let last = points[points.len() - 1].variance_x;
    let prev = points[points.len() - 2].variance_x;
    let converged = pop_ok && (last - prev).abs() <= 1e-3 * prev.abs().max(f64::MIN_POSITIVE);
    Ok(CutoffReport { points, converged })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::{build_quadrature_system, position_variance, solve_lyapunov};
    use crate::model::DetectionParams;

    fn dummy_params(eta: f64, g0: f64, n_th: f64) -> SystemParams {
        SystemParams {
            omega_m: 1.0,
            delta_a: 2.0,
            g0,
            eta,
            kappa: 0.3,
            gamma: 0.02,
            n_th,
            drive_amplitude: 0.0,
            nonlinearity: NonlinearityKind::Duffing,
            detection: None,
        }
    }

    fn origin_fp() -> ClassicalFixedPoint {
        ClassicalFixedPoint {
            alpha: Complex64::new(0.0, 0.0),
            beta: 0.0,
            alpha_s: None,
            iterations: 0,
            residual: 0.0,
        }
    }

    fn linear_model(delta_a: f64, lambda: f64, g: f64, kappa: f64, gamma: f64, n_th: f64) -> LinearizedModel {
        LinearizedModel::from_coefficients(delta_a, lambda, g, kappa, gamma, n_th)
    }

    #[test]
    fn uncoupled_vacuum_steady_state() {
        let lin = linear_model(2.0, 0.0, 0.0, 0.3, 0.05, 0.0);
        let cfg = FockConfig { n_cav: 4, n_mech: 4, ..Default::default() };
        let state =
            steady_state(&build_liouvillian(&lin, &dummy_params(0.0, 0.0, 0.0), &origin_fp(), &cfg).unwrap())
                .unwrap();
        // rho = |0><0|
        assert!((state.rho[(0, 0)].re - 1.0).abs() < 1e-10);
        assert!(state.trace_error < 1e-10);
        assert!((state.variance_x - 0.5).abs() < 1e-10);
        assert!(state.min_eigenvalue > -1e-10);
        assert!(state.cutoff_converged);
    }

    #[test]
    fn thermal_mode_geometric_populations() {
        let n_th = 0.5;
        let lin = linear_model(2.0, 0.0, 0.0, 0.3, 0.05, n_th);
        let cfg = FockConfig { n_cav: 2, n_mech: 30, ..Default::default() };
        let state =
            steady_state(&build_liouvillian(&lin, &dummy_params(0.0, 0.0, n_th), &origin_fp(), &cfg).unwrap())
                .unwrap();
        // occupation and geometric ratio p_{n+1}/p_n = n_th/(n_th+1) = 1/3
        let mut occupation = 0.0;
        for i in 0..30 {
            occupation += i as f64 * state.rho[(i, i)].re;
        }
        assert!((occupation - n_th).abs() < 1e-9, "{occupation}");
        for n in 0..6 {
            let ratio = state.rho[(n + 1, n + 1)].re / state.rho[(n, n)].re;
            assert!((ratio - 1.0 / 3.0).abs() < 1e-9, "level {n}: {ratio}");
        }
        assert!((state.variance_x - (n_th + 0.5)).abs() < 1e-9);
    }

    #[test]
    fn linear_dynamics_match_covariance_engine() {
        let lin = linear_model(1.3416, 0.2, 0.15, 0.4, 0.02, 0.3);
        let sys = build_quadrature_system(&lin);
        let expected = position_variance(&solve_lyapunov(&sys).unwrap());
        let cfg = FockConfig { n_cav: 8, n_mech: 10, ..Default::default() };
        let state =
            steady_state(&build_liouvillian(&lin, &dummy_params(0.0, 0.0, 0.3), &origin_fp(), &cfg).unwrap())
                .unwrap();
        assert!(state.cutoff_converged, "top pops {} {}", state.top_population_cav, state.top_population_mech);
        let rel = (state.variance_x - expected).abs() / expected;
        assert!(rel < 1e-3, "fock {} vs lyapunov {}", state.variance_x, expected);
    }

    #[test]
    fn frames_agree_without_rwa() {
        let lin = linear_model(1.5, 0.3, 0.12, 0.35, 0.03, 0.4);
        let params = dummy_params(0.0, 0.0, 0.4);
        let fp = origin_fp();
        let shifted = FockConfig { n_cav: 8, n_mech: 18, ..Default::default() };
        let squeezed = FockConfig { frame: Frame::ShiftedAndSqueezed, ..shifted };
        let v1 = steady_state(&build_liouvillian(&lin, &params, &fp, &shifted).unwrap())
            .unwrap()
            .variance_x;
        let v2 = steady_state(&build_liouvillian(&lin, &params, &fp, &squeezed).unwrap())
            .unwrap()
            .variance_x;
        assert!((v1 - v2).abs() <= 1e-6 * v1.abs(), "{v1} vs {v2}");
    }

    #[test]
    fn rwa_cross_terms_negligible_in_regime() {
        // Delta_a, omega' >= 10 max(G', gamma(n'+1))
        let lin = linear_model(2.0, 0.75, 0.1, 0.3, 5e-3, 0.2);
        let params = dummy_params(0.0, 0.0, 0.2);
        let fp = origin_fp();
        let full = FockConfig {
            n_cav: 6,
            n_mech: 10,
            frame: Frame::ShiftedAndSqueezed,
            ..Default::default()
        };
        let rwa = FockConfig { dissipator_cross_terms: false, ..full };
        let v_full = steady_state(&build_liouvillian(&lin, &params, &fp, &full).unwrap())
            .unwrap()
            .variance_x;
        let v_rwa = steady_state(&build_liouvillian(&lin, &params, &fp, &rwa).unwrap())
            .unwrap()
            .variance_x;
        let rel = (v_full - v_rwa).abs() / v_full;
        assert!(rel < 0.01, "RWA shift {rel}");
    }

    #[test]
    fn original_frame_variance_closed_forms() {
        // thermal squeezed-frame state: variance (n + 1/2) e^{-2r}
        let n_th = 0.8f64;
        let r = 0.37;
        let n = 25usize;
        let mut rho = CMat::zeros(n, n);
        let x: f64 = n_th / (n_th + 1.0);
        let norm: f64 = (0..n).map(|k| x.powi(k as i32)).sum();
        for k in 0..n {
            rho[(k, k)] = Complex64::new(x.powi(k as i32) / norm, 0.0);
        }
        let b = destroy(n);
        let xq = (&b + &b.adjoint()) * real(std::f64::consts::FRAC_1_SQRT_2);
        let m1 = (&xq * &rho).trace().re;
        let m2 = (&(&xq * &xq) * &rho).trace().re;
        let state = FockSteadyState {
            rho,
            trace_error: 0.0,
            cutoff_converged: true,
            variance_x: 0.0,
            in_frame_variance_x: m2 - m1 * m1,
            min_eigenvalue: 0.0,
            top_population_cav: 0.0,
            top_population_mech: 0.0,
            n_cav: 1,
            n_mech: n,
            n_det: 1,
            frame: Frame::ShiftedAndSqueezed,
            r,
        };
        // r = 0 reduces to the in-frame value
        assert_eq!(variance_in_original_frame(&state, 0.0), state.in_frame_variance_x);
        let got = variance_in_original_frame(&state, r);
        let expected = (n_th + 0.5) * (-2.0 * r).exp();
        assert!((got - expected).abs() < 1e-6, "{got} vs {expected}");
        // vacuum: e^{-2r}/2
        let vac = FockSteadyState { in_frame_variance_x: 0.5, ..state };
        assert!((variance_in_original_frame(&vac, r) - 0.5 * (-2.0 * r).exp()).abs() < 1e-12);
    }

    #[test]
    fn cutoff_sweep_reaches_plateau() {
        let lin = linear_model(1.3416, 0.2, 0.15, 0.4, 0.02, 0.3);
        let report = cutoff_sweep(
            &lin,
            &dummy_params(0.0, 0.0, 0.3),
            &origin_fp(),
            &FockConfig::default(),
            &[(4, 6), (6, 8), (8, 10)],
        )
        .unwrap();
        assert!(report.converged, "{:?}", report.points);
        // schedule validation
        assert!(cutoff_sweep(
            &lin,
            &dummy_params(0.0, 0.0, 0.3),
            &origin_fp(),
            &FockConfig::default(),
            &[(6, 8), (4, 6)],
        )
        .is_err());
    }

    #[test]
    fn capacity_and_cutoff_guards() {
        let lin = linear_model(2.0, 0.1, 0.1, 0.3, 0.02, 0.0);
        let params = dummy_params(0.0, 0.0, 0.0);
        let tiny = FockConfig { n_cav: 1, n_mech: 4, ..Default::default() };
        assert!(matches!(
            build_liouvillian(&lin, &params, &origin_fp(), &tiny),
            Err(Error::Domain(_))
        ));
        let huge = FockConfig { n_cav: 40, n_mech: 40, ..Default::default() };
        assert!(matches!(
            build_liouvillian(&lin, &params, &origin_fp(), &huge),
            Err(Error::Capacity(_))
        ));
        let squeezed_nl = FockConfig {
            include_nl: true,
            frame: Frame::ShiftedAndSqueezed,
            ..Default::default()
        };
        assert!(matches!(
            build_liouvillian(&lin, &params, &origin_fp(), &squeezed_nl),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn detection_mode_with_zero_coupling_matches_two_mode() {
        let lin = linear_model(1.3416, 0.2, 0.15, 0.4, 0.02, 0.2);
        let with_det = lin.clone().with_detection(1.0, 0.0, 0.3);
        let mut params = dummy_params(0.0, 0.0, 0.2);
        params.detection = Some(DetectionParams {
            delta_s: 1.0,
            g_s: 0.0,
            kappa_s: 0.3,
            drive_amplitude_s: 0.0,
        });
        let two = FockConfig { n_cav: 5, n_mech: 8, ..Default::default() };
        let three = FockConfig { n_cav: 5, n_mech: 8, include_detection: true, ..Default::default() };
        let v2 = steady_state(&build_liouvillian(&lin, &params, &origin_fp(), &two).unwrap())
            .unwrap()
            .variance_x;
        let v3 = steady_state(&build_liouvillian(&with_det, &params, &origin_fp(), &three).unwrap())
            .unwrap()
            .variance_x;
        assert!((v2 - v3).abs() < 1e-8, "{v2} vs {v3}");
    }
}
