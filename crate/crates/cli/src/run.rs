//! Subcommand implementations.

// `!(x > 0.0)` guards reject NaN along with the out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::collections::BTreeMap;
use std::path::PathBuf;

use optosqueeze::error::Error;
use optosqueeze::exec;
use optosqueeze::fock::{self, FockConfig};
use optosqueeze::gaussian::{build_quadrature_system, position_variance, solve_lyapunov, squeezing_db};
use optosqueeze::model::{
    config_from_pairs, parse_pairs, reference_pairs, Config, DetuningMode,
};
use optosqueeze::nonlin_gen::{backaction_check, duffing_from_qubit, FrequencyConvention, QubitAncilla};
use optosqueeze::pipeline::{solve_point_with, PointSolution};
use optosqueeze::stability::{optimal_point_threshold, CriterionVerdict};
use optosqueeze::steadystate::{BranchPolicy, LinearizedModel, SolveOptions};

use crate::args::{ConfigOverrides, OutputArgs, QubitConvention, SweepVariable};
use crate::output::{cell, flag, fmt_float, CsvDoc};

pub type RunResult = Result<(), Error>;

/// Sweeps follow the branch continuously connected to the undriven state;
/// the strict branch policy is a diagnostic for single points.
fn sweep_options() -> SolveOptions {
    SolveOptions { branch_policy: BranchPolicy::Continuation, ..Default::default() }
}

pub fn resolve_config(overrides: &ConfigOverrides) -> Result<Config, Error> {
    resolve_config_with_defaults(overrides, reference_pairs())
}

pub fn resolve_config_with_defaults(
    overrides: &ConfigOverrides,
    mut pairs: BTreeMap<String, String>,
) -> Result<Config, Error> {
    if let Some(path) = &overrides.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        for (k, v) in parse_pairs(&text)? {
            pairs.insert(k, v);
        }
    }
    let mut set = |key: &str, value: Option<String>| {
        if let Some(v) = value {
            pairs.insert(key.to_string(), v);
        }
    };
    set("omega_m_hz", overrides.omega_m_hz.map(|v| v.to_string()));
    set("omega_a_hz", overrides.omega_a_hz.map(|v| v.to_string()));
    set("omega_s_hz", overrides.omega_s_hz.map(|v| v.to_string()));
    set("g0_ratio", overrides.g0_ratio.map(|v| v.to_string()));
    set("eta_ratio", overrides.eta_ratio.map(|v| v.to_string()));
    set("kappa_ratio", overrides.kappa_ratio.map(|v| v.to_string()));
    set("gamma_ratio", overrides.gamma_ratio.map(|v| v.to_string()));
    set("n_th", overrides.n_th.map(|v| v.to_string()));
    set("power_w", overrides.power_w.map(|v| v.to_string()));
    set("power_s_w", overrides.power_s_w.map(|v| v.to_string()));
    set("delta_a_ratio", overrides.delta_a_ratio.clone());
    set("delta_s_ratio", overrides.delta_s_ratio.map(|v| v.to_string()));
    set("nonlinearity", overrides.nonlinearity.clone());
    set("detection", overrides.detection.clone());
    config_from_pairs(&pairs)
}

fn geometric_grid(start: f64, stop: f64, points: usize, log: bool) -> Result<Vec<f64>, Error> {
    if points < 2 {
        return Err(Error::Config(format!("need at least 2 points, got {points}")));
    }
    if !(start < stop) {
        return Err(Error::Config(format!("need start < stop, got {start} .. {stop}")));
    }
    if log && !(start > 0.0) {
        return Err(Error::Config("log scale requires start > 0".into()));
    }
    let n = points - 1;
    Ok((0..points)
        .map(|k| {
            let t = k as f64 / n as f64;
            if log {
                start * (stop / start).powf(t)
            } else {
                start + (stop - start) * t
            }
        })
        .collect())
}

fn solve_config_point(
    config: &Config,
    power_w: Option<f64>,
    n_th: Option<f64>,
) -> Result<PointSolution, Error> {
    let mut cfg = config.clone();
    if let Some(p) = power_w {
        cfg.si.power_w = p;
    }
    if let Some(n) = n_th {
        cfg.si.n_th = n;
    }
    let (params, mode) = cfg.resolve()?;
    solve_point_with(&params, mode, &sweep_options())
}

// ---------------------------------------------------------------- point --

pub fn run_point(
    config: &ConfigOverrides,
    output: &OutputArgs,
    qubit_delta_q_ghz: Option<f64>,
    qubit_lambda_q_mhz: Option<f64>,
    qubit_convention: QubitConvention,
) -> RunResult {
    let cfg = resolve_config(config)?;
    let (params, mode) = cfg.resolve()?;
    let warnings = params.validate()?;
    let point = solve_point_with(&params, mode, &sweep_options())?;

    let mut lines = Vec::new();
    lines.push("=== optosqueeze point report ===".to_string());
    for entry in cfg.echo_lines() {
        lines.push(format!("config   {entry}"));
    }
    lines.push(format!(
        "drive    Omega_d = {} omega_m{}",
        fmt_float(point.params.drive_amplitude),
        match mode {
            DetuningMode::Optimal => ", detuning solved for Delta_a = omega_m'",
            DetuningMode::Fixed => "",
        }
    ));
    let fp = &point.fixed_point;
    lines.push(format!(
        "fixed point   |alpha| = {}  beta = {}  residual = {:.2e}  iterations = {}",
        fmt_float(fp.alpha.norm()),
        fmt_float(fp.beta),
        fp.residual,
        fp.iterations
    ));
    if let Some(alpha_s) = fp.alpha_s {
        lines.push(format!("              |alpha_s| = {}", fmt_float(alpha_s.norm())));
    }
    let lin = &point.linearized;
    lines.push(format!(
        "linearized    Delta_a = {}  Lambda = {}  omega_m_tilde = {}  G = {}",
        fmt_float(lin.delta_a),
        fmt_float(lin.lambda),
        fmt_float(lin.omega_m_tilde),
        fmt_float(lin.g)
    ));
    let t = &point.transformed;
    lines.push(format!(
        "transformed   r = {}  omega_m' = {}  G' = {}  n_th' = {}",
        fmt_float(t.r),
        fmt_float(t.omega_m_prime),
        fmt_float(t.g_prime),
        fmt_float(t.n_th_prime)
    ));
    lines.push(format!(
        "stability     eigen: {} (margin {})   closed form: {:?}",
        if point.eigen.stable { "stable" } else { "UNSTABLE" },
        fmt_float(point.eigen.margin),
        point.criterion
    ));
    match (point.variance_x, point.squeezing_db) {
        (Some(v), Some(db)) => {
            lines.push(format!(
                "steady state  <dX^2> = {}  squeezing = {} dB{}",
                fmt_float(v),
                fmt_float(db),
                if v < 0.25 { "  (beyond 3 dB)" } else { "" }
            ));
        }
        _ => lines.push("steady state  no covariance (unstable point)".to_string()),
    }
    let a = &point.analytic;
    lines.push(format!(
        "analytic      cooling-limit v = {} (in regime: {})",
        cell(a.cooling_variance),
        a.cooling_applicable
    ));
    lines.push(format!(
        "              strong-coupling v = {} (in regime: {})  ultimate floor = {}",
        fmt_float(a.strong_coupling_variance),
        a.strong_coupling_applicable,
        fmt_float(a.ultimate_floor)
    ));
    if let (Some(rate), Some(det)) = (point.detection_rate, &point.linearized.detection) {
        lines.push(format!(
            "detection     Delta_s = {}  G_s = {}  Gamma_s = {}",
            fmt_float(det.delta_s),
            fmt_float(det.g_s),
            fmt_float(rate)
        ));
    }
    if let (Some(dq), Some(lq)) = (qubit_delta_q_ghz, qubit_lambda_q_mhz) {
        let convention = match qubit_convention {
            QubitConvention::Angular => FrequencyConvention::Angular,
            _ => FrequencyConvention::DividedBy2Pi,
        };
        let qubit = QubitAncilla::from_quoted(dq * 1.0e9, lq * 1.0e6, convention)?;
        let eta = duffing_from_qubit(&qubit)?;
        let eta_2pi = eta / std::f64::consts::TAU;
        let omega_m_rad = std::f64::consts::TAU * cfg.si.omega_m_hz;
        let x_ss = std::f64::consts::SQRT_2 * fp.beta;
        let (ratio, passive) = backaction_check(&qubit, x_ss);
        lines.push(format!(
            "qubit         eta/2pi = {} Hz  eta/omega_m = {}  backaction ratio = {} (passive: {passive})",
            fmt_float(eta_2pi),
            fmt_float(eta / omega_m_rad),
            fmt_float(ratio)
        ));
    }
    for w in warnings {
        lines.push(format!("warning       {w}"));
    }
    emit_text(&lines, output.out.as_ref())
}

fn emit_text(lines: &[String], out: Option<&PathBuf>) -> RunResult {
    let body = lines.join("\n") + "\n";
    match out {
        Some(path) => std::fs::write(path, body)
            .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

// ----------------------------------------------------------------- fig2 --

pub fn run_fig2(
    config: &ConfigOverrides,
    output: &OutputArgs,
    p_min: f64,
    p_max: f64,
    points: usize,
) -> RunResult {
    let cfg = resolve_config(config)?;
    exec::configure_jobs(output.jobs);
    let powers = geometric_grid(p_min, p_max, points, true)?;
    let detection = cfg.si.detection;

    let base_off = {
        let mut c = cfg.clone();
        c.si.detection = false;
        c
    };
    let rows = exec::map_ordered(powers, |p| {
        let main = solve_config_point(&base_off, Some(p), None);
        let det = if detection { Some(solve_config_point(&cfg, Some(p), None)) } else { None };
        (p, main, det)
    });

    let mut doc = CsvDoc::new("fig2", &cfg.echo_lines());
    let mut columns = vec![
        "P_w",
        "alpha_abs",
        "beta",
        "omega_m_prime_ratio",
        "G_prime_over_G",
        "stable",
    ];
    if detection {
        columns.extend_from_slice(&["alpha_abs_det", "beta_det", "alpha_s_abs"]);
    }
    columns.push("error");
    doc.header(&columns);
    for (p, main, det) in rows {
        let mut fields = vec![fmt_float(p)];
        let mut error = String::new();
        match &main {
            Ok(pt) => {
                fields.push(fmt_float(pt.fixed_point.alpha.norm()));
                fields.push(fmt_float(pt.fixed_point.beta));
                fields.push(fmt_float(pt.transformed.omega_m_prime / pt.params.omega_m));
                fields.push(fmt_float((-pt.transformed.r).exp()));
                fields.push(flag(pt.eigen.stable));
            }
            Err(e) => {
                fields.extend(std::iter::repeat_n(String::new(), 5));
                error = e.to_string();
            }
        }
        if detection {
            match det.as_ref().unwrap() {
                Ok(pt) => {
                    fields.push(fmt_float(pt.fixed_point.alpha.norm()));
                    fields.push(fmt_float(pt.fixed_point.beta));
                    fields.push(fmt_float(
                        pt.fixed_point.alpha_s.map(|a| a.norm()).unwrap_or(0.0),
                    ));
                }
                Err(e) => {
                    fields.extend(std::iter::repeat_n(String::new(), 3));
                    if error.is_empty() {
                        error = e.to_string();
                    }
                }
            }
        }
        fields.push(error);
        doc.row(&fields);
    }
    write_doc(doc, output)
}

// ----------------------------------------------------------------- fig3 --

struct GridCell {
    lambda: f64,
    delta_a: f64,
    variance: Option<f64>,
    stable: bool,
}

fn fig3_cell(lin: &LinearizedModel) -> GridCell {
    let sys = build_quadrature_system(lin);
    match solve_lyapunov(&sys) {
        Ok(cov) => GridCell {
            lambda: lin.lambda,
            delta_a: lin.delta_a,
            variance: Some(position_variance(&cov)),
            stable: true,
        },
        Err(_) => GridCell {
            lambda: lin.lambda,
            delta_a: lin.delta_a,
            variance: None,
            stable: false,
        },
    }
}

#[allow(clippy::too_many_arguments)]
pub fn run_fig3(
    config: &ConfigOverrides,
    output: &OutputArgs,
    delta_min: f64,
    delta_max: f64,
    lambda_min: f64,
    lambda_max: f64,
    grid: usize,
    coupling_g: f64,
) -> RunResult {
    let cfg = resolve_config(config)?;
    exec::configure_jobs(output.jobs);
    let kappa = cfg.si.kappa_ratio;
    let gamma = cfg.si.gamma_ratio;
    let n_th = cfg.si.n_th;
    let deltas = geometric_grid(delta_min, delta_max, grid, false)?;
    let lambdas = geometric_grid(lambda_min, lambda_max, grid, false)?;

    let model_at = move |delta_a: f64, lambda: f64| {
        LinearizedModel::from_coefficients(delta_a, lambda, coupling_g, kappa, gamma, n_th)
    };

    let mut tasks = Vec::with_capacity(grid * grid);
    for &l in &lambdas {
        for &d in &deltas {
            tasks.push((d, l));
        }
    }
    let cells = exec::map_ordered(tasks, move |(d, l)| fig3_cell(&model_at(d, l)));

    let mut doc = CsvDoc::new("fig3", &cfg.echo_lines());
    doc.comment(&format!(
        "grid: delta_a in [{delta_min}, {delta_max}], lambda in [{lambda_min}, {lambda_max}], {grid} points per axis, G = {coupling_g}"
    ));
    doc.header(&["series", "lambda", "delta_a", "variance", "squeezing_db", "stable"]);
    for cell_data in &cells {
        let db = cell_data.variance.and_then(|v| squeezing_db(v).ok());
        doc.row(&[
            "grid".into(),
            fmt_float(cell_data.lambda),
            fmt_float(cell_data.delta_a),
            cell(cell_data.variance),
            cell(db),
            flag(cell_data.stable),
        ]);
    }

    // optimal-detuning locus: Delta_a = omega_m'(Lambda)
    let locus = exec::map_ordered(lambdas.clone(), move |l| {
        let omega_prime = (1.0 + 4.0 * l).sqrt();
        fig3_cell(&model_at(omega_prime, l))
    });
    for cell_data in &locus {
        let db = cell_data.variance.and_then(|v| squeezing_db(v).ok());
        doc.row(&[
            "locus".into(),
            fmt_float(cell_data.lambda),
            fmt_float(cell_data.delta_a),
            cell(cell_data.variance),
            cell(db),
            flag(cell_data.stable),
        ]);
    }

    // 3 dB contour: bisect variance = 1/4 crossings along delta at fixed lambda
    let deltas_for_contour = deltas.clone();
    let contour_rows = exec::map_ordered(lambdas, move |l| {
        let variance_at = |d: f64| {
            solve_lyapunov(&build_quadrature_system(&model_at(d, l)))
                .map(|c| position_variance(&c))
        };
        let mut found = Vec::new();
        let mut prev: Option<(f64, f64)> = None;
        for &d in &deltas_for_contour {
            if let Ok(v) = variance_at(d) {
                if let Some((d0, v0)) = prev {
                    if (v0 - 0.25) * (v - 0.25) < 0.0 {
                        let (mut a, mut b) = (d0, d);
                        let mut fa = v0 - 0.25;
                        for _ in 0..80 {
                            let m = 0.5 * (a + b);
                            match variance_at(m) {
                                Ok(vm) => {
                                    if fa * (vm - 0.25) <= 0.0 {
                                        b = m;
                                    } else {
                                        a = m;
                                        fa = vm - 0.25;
                                    }
                                }
                                Err(_) => break,
                            }
                        }
                        let d_star = 0.5 * (a + b);
                        if let Ok(v_star) = variance_at(d_star) {
                            if (v_star - 0.25).abs() <= 0.01 * 0.25 {
                                found.push((l, d_star, v_star));
                            }
                        }
                    }
                }
                prev = Some((d, v));
            } else {
                prev = None;
            }
        }
        found
    });
    for row in contour_rows.into_iter().flatten() {
        let (l, d, v) = row;
        doc.row(&[
            "contour3db".into(),
            fmt_float(l),
            fmt_float(d),
            fmt_float(v),
            fmt_float(squeezing_db(v)?),
            flag(true),
        ]);
    }
    write_doc(doc, output)
}

// ----------------------------------------------------------------- fig4 --

#[allow(clippy::too_many_arguments)]
pub fn run_fig4(
    config: &ConfigOverrides,
    output: &OutputArgs,
    powers: &[f64],
    n_th_max: f64,
    n_th_points: usize,
    n_th_values: &[f64],
    p_min: f64,
    p_max: f64,
    p_points: usize,
    analytic_overlay: bool,
) -> RunResult {
    let cfg = resolve_config(config)?;
    exec::configure_jobs(output.jobs);
    let n_grid = geometric_grid(0.0, n_th_max, n_th_points, false)?;
    let p_grid = geometric_grid(p_min, p_max, p_points, true)?;

    let mut tasks: Vec<(&str, f64, f64)> = Vec::new();
    for &p in powers {
        for &n in &n_grid {
            tasks.push(("a", p, n));
        }
    }
    for &n in n_th_values {
        for &p in &p_grid {
            tasks.push(("b", p, n));
        }
    }
    let cfg_for_rows = cfg.clone();
    let rows = exec::map_ordered(tasks, move |(series, p, n)| {
        (series, p, n, solve_config_point(&cfg_for_rows, Some(p), Some(n)))
    });

    let mut doc = CsvDoc::new("fig4", &cfg.echo_lines());
    doc.header(&[
        "series",
        "P_w",
        "n_th",
        "variance",
        "squeezing_db",
        "variance_analytic",
        "analytic_in_regime",
        "stable",
        "error",
    ]);
    for (series, p, n, solved) in rows {
        match solved {
            Ok(pt) => {
                let overlay = analytic_overlay && pt.analytic.strong_coupling_applicable;
                doc.row(&[
                    series.into(),
                    fmt_float(p),
                    fmt_float(n),
                    cell(pt.variance_x),
                    cell(pt.squeezing_db),
                    if overlay { fmt_float(pt.analytic.strong_coupling_variance) } else { String::new() },
                    flag(pt.analytic.strong_coupling_applicable),
                    flag(pt.eigen.stable),
                    String::new(),
                ]);
            }
            Err(e) => {
                doc.row(&[
                    series.into(),
                    fmt_float(p),
                    fmt_float(n),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                    e.to_string(),
                ]);
            }
        }
    }
    write_doc(doc, output)
}

// ----------------------------------------------------------------- fig5 --

/// Desk-scale defaults: every rate two to four orders larger than the
/// reference set so the Fock solve converges at small cutoffs while the
/// hierarchy g0, eta*beta << Lambda, G is preserved.
pub fn desk_pairs() -> BTreeMap<String, String> {
    let mut pairs = reference_pairs();
    for (k, v) in [
        ("g0_ratio", "0.01"),
        ("eta_ratio", "0.01"),
        ("kappa_ratio", "0.3"),
        ("gamma_ratio", "0.01"),
        ("n_th", "0.2"),
    ] {
        pairs.insert(k.into(), v.into());
    }
    pairs
}

#[allow(clippy::too_many_arguments)]
pub fn run_fig5(
    config: &ConfigOverrides,
    output: &OutputArgs,
    drive_min: f64,
    drive_max: f64,
    points: usize,
    n_cav: usize,
    n_mech: usize,
) -> RunResult {
    let cfg = resolve_config_with_defaults(config, desk_pairs())?;
    exec::configure_jobs(output.jobs);
    let drives = geometric_grid(drive_min, drive_max, points, false)?;
    let (base, _) = cfg.resolve()?;
    fock::check_capacity(&FockConfig { n_cav, n_mech, include_nl: true, ..Default::default() })?;

    let rows = exec::map_ordered(drives, |drive| {
        let mut params = base.clone();
        params.detection = None;
        params.drive_amplitude = drive;
        let solved = solve_point_with(&params, DetuningMode::Optimal, &sweep_options());
        let result = solved.and_then(|pt| {
            if !pt.eigen.stable {
                return Err(Error::Unstable { margin: pt.eigen.margin });
            }
            let fock_cfg = FockConfig { n_cav, n_mech, include_nl: true, ..Default::default() };
            let liouvillian =
                fock::build_liouvillian(&pt.linearized, &pt.params, &pt.fixed_point, &fock_cfg)?;
            let nl = fock::steady_state(&liouvillian)?;
            // detection-extended covariance at Delta_s = omega_m
            let lin_det = pt.linearized.clone().with_detection(
                params.omega_m,
                0.05,
                params.kappa,
            );
            let v_det = position_variance(&solve_lyapunov(&build_quadrature_system(&lin_det))?);
            Ok((pt, nl.variance_x, v_det))
        });
        (drive, result)
    });

    let mut doc = CsvDoc::new("fig5", &cfg.echo_lines());
    doc.comment(&format!(
        "desk-scale run: drive amplitude in omega_m units (power proportional to drive^2), \
         Fock cutoffs ({n_cav}, {n_mech}), detection block G_s = 0.05 at Delta_s = omega_m"
    ));
    doc.header(&[
        "drive_amplitude",
        "variance_linear",
        "variance_nl",
        "variance_detection",
        "stable",
        "error",
    ]);
    for (drive, result) in rows {
        match result {
            Ok((pt, v_nl, v_det)) => doc.row(&[
                fmt_float(drive),
                cell(pt.variance_x),
                fmt_float(v_nl),
                fmt_float(v_det),
                flag(pt.eigen.stable),
                String::new(),
            ]),
            Err(e) => doc.row(&[
                fmt_float(drive),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                e.to_string(),
            ]),
        }
    }
    write_doc(doc, output)
}

// ---------------------------------------------------------------- sweep --

#[allow(clippy::too_many_arguments)]
pub fn run_sweep(
    config: &ConfigOverrides,
    output: &OutputArgs,
    variable: SweepVariable,
    start: f64,
    stop: f64,
    points: usize,
    log: bool,
    optimal_detuning: bool,
    analytic_overlay: bool,
) -> RunResult {
    if variable == SweepVariable::LambdaGrid {
        return run_fig3(config, output, start.max(0.05), stop, 0.02, 2.4, points, 0.05);
    }
    let cfg = resolve_config(config)?;
    exec::configure_jobs(output.jobs);
    let grid = geometric_grid(start, stop, points, log)?;

    let x_name = match variable {
        SweepVariable::Power => "P_w",
        SweepVariable::Detuning => "delta_a_ratio",
        SweepVariable::NTh => "n_th",
        SweepVariable::LambdaGrid => unreachable!(),
    };
    let cfg_rows = cfg.clone();
    let rows = exec::map_ordered(grid, move |x| {
        let mut c = cfg_rows.clone();
        match variable {
            SweepVariable::Power => c.si.power_w = x,
            SweepVariable::Detuning => {
                c.si.delta_a_ratio = x;
                c.detuning_mode = DetuningMode::Fixed;
            }
            SweepVariable::NTh => c.si.n_th = x,
            SweepVariable::LambdaGrid => unreachable!(),
        }
        if optimal_detuning && variable != SweepVariable::Detuning {
            c.detuning_mode = DetuningMode::Optimal;
        }
        let solved = c
            .resolve()
            .and_then(|(params, mode)| solve_point_with(&params, mode, &sweep_options()));
        (x, solved)
    });

    let mut doc = CsvDoc::new("sweep", &cfg.echo_lines());
    doc.comment(&format!("variable = {x_name}, {points} points in [{start}, {stop}], log = {log}"));
    doc.header(&[
        x_name,
        "alpha_abs",
        "beta",
        "omega_m_prime_ratio",
        "G_prime_over_G",
        "variance",
        "squeezing_db",
        "variance_analytic",
        "analytic_in_regime",
        "stable",
        "error",
    ]);
    for (x, solved) in rows {
        match solved {
            Ok(pt) => {
                let overlay = analytic_overlay && pt.analytic.strong_coupling_applicable;
                doc.row(&[
                    fmt_float(x),
                    fmt_float(pt.fixed_point.alpha.norm()),
                    fmt_float(pt.fixed_point.beta),
                    fmt_float(pt.transformed.omega_m_prime / pt.params.omega_m),
                    fmt_float((-pt.transformed.r).exp()),
                    cell(pt.variance_x),
                    cell(pt.squeezing_db),
                    if overlay { fmt_float(pt.analytic.strong_coupling_variance) } else { String::new() },
                    flag(pt.analytic.strong_coupling_applicable),
                    flag(pt.eigen.stable),
                    String::new(),
                ]);
            }
            Err(e) => {
                let mut fields = vec![fmt_float(x)];
                fields.extend(std::iter::repeat_n(String::new(), 9));
                fields.push(e.to_string());
                doc.row(&fields);
            }
        }
    }
    write_doc(doc, output)
}

// -------------------------------------------------------- eta-from-qubit --

pub fn run_eta_from_qubit(
    output: &OutputArgs,
    delta_q_ghz: f64,
    lambda_q_mhz: f64,
    convention: QubitConvention,
    omega_m_hz: f64,
) -> RunResult {
    let mut lines = vec!["=== qubit-induced Duffing amplitude ===".to_string()];
    let omega_m_rad = std::f64::consts::TAU * omega_m_hz;
    let mut report = |name: &str, conv: FrequencyConvention| -> RunResult {
        let qubit = QubitAncilla::from_quoted(delta_q_ghz * 1.0e9, lambda_q_mhz * 1.0e6, conv)?;
        let eta = duffing_from_qubit(&qubit)?;
        lines.push(format!(
            "{name}: eta/2pi = {} Hz   eta/omega_m = {}   lambda_q/Delta_q = {}{}",
            fmt_float(eta / std::f64::consts::TAU),
            fmt_float(eta / omega_m_rad),
            fmt_float(qubit.dispersive_ratio()),
            if qubit.dispersive_marginal() { "  (marginally dispersive)" } else { "" }
        ));
        Ok(())
    };
    match convention {
        QubitConvention::TwoPi => report("lambda/2pi reading", FrequencyConvention::DividedBy2Pi)?,
        QubitConvention::Angular => report("angular reading", FrequencyConvention::Angular)?,
        QubitConvention::Both => {
            report("lambda/2pi reading", FrequencyConvention::DividedBy2Pi)?;
            report("angular reading", FrequencyConvention::Angular)?;
        }
    }
    emit_text(&lines, output.out.as_ref())
}

// -------------------------------------------------------- stability-scan --

pub fn run_stability_scan(
    config: &ConfigOverrides,
    output: &OutputArgs,
    g0_min: f64,
    g0_max: f64,
    points: usize,
    drive_amplitude: f64,
) -> RunResult {
    let cfg = resolve_config(config)?;
    exec::configure_jobs(output.jobs);
    let (mut base, _) = cfg.resolve()?;
    base.drive_amplitude = drive_amplitude;
    let grid = geometric_grid(g0_min, g0_max, points, false)?;
    let threshold = optimal_point_threshold(base.omega_m, base.eta);

    let base_rows = base.clone();
    let rows = exec::map_ordered(grid, move |g0| {
        let mut params = base_rows.clone();
        params.g0 = g0;
        (g0, solve_point_with(&params, DetuningMode::Optimal, &sweep_options()))
    });

    // first scan point where the stable branch fails or goes unstable
    let mut flip: Option<f64> = None;
    for (g0, solved) in &rows {
        let broken = match solved {
            Ok(pt) => !pt.eigen.stable,
            Err(_) => true,
        };
        if broken {
            flip = Some(*g0);
            break;
        }
    }

    let mut doc = CsvDoc::new("stability-scan", &cfg.echo_lines());
    doc.comment(&format!("drive_amplitude = {drive_amplitude} omega_m"));
    doc.comment(&format!("power-independent threshold sqrt(27*omega_m*eta) = {}", fmt_float(threshold)));
    match flip {
        Some(g0) => doc.comment(&format!("stable branch breaks at g0 = {} ({}x threshold)",
            fmt_float(g0), fmt_float(g0 / threshold))),
        None => doc.comment("stable branch held across the whole scan"),
    }
    doc.header(&[
        "g0",
        "g0_over_threshold",
        "beta",
        "delta_a_eff",
        "omega_m_prime",
        "coupling_G",
        "eigen_margin",
        "stable",
        "criterion",
        "error",
    ]);
    for (g0, solved) in rows {
        match solved {
            Ok(pt) => doc.row(&[
                fmt_float(g0),
                fmt_float(g0 / threshold),
                fmt_float(pt.fixed_point.beta),
                fmt_float(pt.linearized.delta_a),
                fmt_float(pt.transformed.omega_m_prime),
                fmt_float(pt.linearized.g),
                fmt_float(pt.eigen.margin),
                flag(pt.eigen.stable),
                match pt.criterion {
                    CriterionVerdict::Stable => "stable".into(),
                    CriterionVerdict::Unstable => "unstable".into(),
                    CriterionVerdict::NotApplicable => "not-applicable".into(),
                },
                String::new(),
            ]),
            Err(e) => {
                let mut fields = vec![fmt_float(g0), fmt_float(g0 / threshold)];
                fields.extend(std::iter::repeat_n(String::new(), 7));
                fields.push(e.to_string());
                doc.row(&fields);
            }
        }
    }
    write_doc(doc, output)
}

fn write_doc(doc: CsvDoc, output: &OutputArgs) -> RunResult {
    doc.write_to(output.out.as_deref())
        .map_err(|e| Error::Config(format!("cannot write output: {e}")))
}
