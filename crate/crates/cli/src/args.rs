//! Command-line interface: subcommands mirror the reproducible outputs
//! (single-point report, the four figure sweeps, generic sweeps, the
//! qubit-nonlinearity calculator, and a stability scan).

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(
    name = "optosqueeze",
    about = "Steady-state mechanical squeezing in a driven optomechanical cavity \
             with Duffing or cubic mechanical nonlinearity",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Flags mirroring the config-file keys; any flag overrides the file.
#[derive(Args, Debug, Clone)]
pub struct ConfigOverrides {
    /// Config file (`key = value` lines, `#` comments). Defaults are the
    /// reference parameter set when omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub omega_m_hz: Option<f64>,
    #[arg(long)]
    pub omega_a_hz: Option<f64>,
    #[arg(long)]
    pub omega_s_hz: Option<f64>,
    #[arg(long)]
    pub g0_ratio: Option<f64>,
    #[arg(long)]
    pub eta_ratio: Option<f64>,
    #[arg(long)]
    pub kappa_ratio: Option<f64>,
    #[arg(long)]
    pub gamma_ratio: Option<f64>,
    #[arg(long)]
    pub n_th: Option<f64>,
    #[arg(long)]
    pub power_w: Option<f64>,
    #[arg(long)]
    pub power_s_w: Option<f64>,
    /// A number (units of omega_m) or the token `optimal`.
    #[arg(long)]
    pub delta_a_ratio: Option<String>,
    #[arg(long)]
    pub delta_s_ratio: Option<f64>,
    /// `duffing` or `cubic`.
    #[arg(long)]
    pub nonlinearity: Option<String>,
    /// `on` or `off`.
    #[arg(long)]
    pub detection: Option<String>,
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    /// Write CSV here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads for sweep rows (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Full report for a single parameter point.
    Point {
        #[command(flatten)]
        config: ConfigOverrides,
        #[command(flatten)]
        output: OutputArgs,
        /// Qubit splitting for the induced-nonlinearity block (GHz, /2pi).
        #[arg(long)]
        qubit_delta_q_ghz: Option<f64>,
        /// Qubit-resonator coupling (MHz; see --qubit-convention).
        #[arg(long)]
        qubit_lambda_q_mhz: Option<f64>,
        #[arg(long, value_enum, default_value_t = QubitConvention::TwoPi)]
        qubit_convention: QubitConvention,
    },
    /// Steady-state amplitudes and transformed coefficients vs drive power.
    Fig2 {
        #[command(flatten)]
        config: ConfigOverrides,
        #[command(flatten)]
        output: OutputArgs,
        #[arg(long, default_value_t = 1.0e-7)]
        p_min: f64,
        #[arg(long, default_value_t = 2.0e-4)]
        p_max: f64,
        #[arg(long, default_value_t = 60)]
        points: usize,
    },
    /// Squeezing map over (detuning, parametric amplitude) with the
    /// optimal-detuning locus and the 3 dB contour.
    Fig3 {
        #[command(flatten)]
        config: ConfigOverrides,
        #[command(flatten)]
        output: OutputArgs,
        #[arg(long, default_value_t = 0.2)]
        delta_min: f64,
        #[arg(long, default_value_t = 4.0)]
        delta_max: f64,
        #[arg(long, default_value_t = 0.02)]
        lambda_min: f64,
        #[arg(long, default_value_t = 2.4)]
        lambda_max: f64,
        /// Grid points per axis.
        #[arg(long, default_value_t = 100)]
        grid: usize,
        /// Linearized coupling G used across the map.
        #[arg(long, default_value_t = 0.05)]
        coupling_g: f64,
    },
    /// Variance vs thermal occupation and vs drive power at the optimal
    /// detuning, with the strong-coupling analytic overlay.
    Fig4 {
        #[command(flatten)]
        config: ConfigOverrides,
        #[command(flatten)]
        output: OutputArgs,
        /// Fixed powers (W) for the variance-vs-n_th series.
        #[arg(long, value_delimiter = ',', default_values_t = vec![2.0e-5, 1.0e-4, 5.0e-4])]
        powers: Vec<f64>,
        #[arg(long, default_value_t = 1.0e4)]
        n_th_max: f64,
        #[arg(long, default_value_t = 21)]
        n_th_points: usize,
        /// Fixed occupations for the variance-vs-power series.
        #[arg(long, value_delimiter = ',', default_values_t = vec![0.0, 1.0e2, 1.0e4])]
        n_th_values: Vec<f64>,
        #[arg(long, default_value_t = 1.0e-6)]
        p_min: f64,
        #[arg(long, default_value_t = 1.0e-3)]
        p_max: f64,
        #[arg(long, default_value_t = 40)]
        p_points: usize,
        /// Add the strong-coupling analytic value where its regime holds.
        #[arg(long, default_value_t = true)]
        analytic_overlay: bool,
    },
    /// Linearization-validity comparison at desk scale: covariance result
    /// vs Fock solve with the residual nonlinear terms vs detection-
    /// extended covariance.
    Fig5 {
        #[command(flatten)]
        config: ConfigOverrides,
        #[command(flatten)]
        output: OutputArgs,
        #[arg(long, default_value_t = 6.0)]
        drive_min: f64,
        #[arg(long, default_value_t = 18.0)]
        drive_max: f64,
        #[arg(long, default_value_t = 7)]
        points: usize,
        #[arg(long, default_value_t = 6)]
        n_cav: usize,
        #[arg(long, default_value_t = 12)]
        n_mech: usize,
    },
    /// Generic one-variable sweep.
    Sweep {
        #[command(flatten)]
        config: ConfigOverrides,
        #[command(flatten)]
        output: OutputArgs,
        #[arg(long, value_enum)]
        variable: SweepVariable,
        #[arg(long)]
        start: f64,
        #[arg(long)]
        stop: f64,
        #[arg(long, default_value_t = 40)]
        points: usize,
        /// Log-spaced grid (requires start > 0).
        #[arg(long, default_value_t = false)]
        log: bool,
        /// Re-solve the optimal detuning at every point.
        #[arg(long, default_value_t = false)]
        optimal_detuning: bool,
        /// Overlay the analytic limits with regime flags.
        #[arg(long, default_value_t = false)]
        analytic_overlay: bool,
    },
    /// Duffing amplitude induced by a dispersively coupled qubit.
    EtaFromQubit {
        #[command(flatten)]
        output: OutputArgs,
        /// Qubit splitting Delta_q/2pi in GHz.
        #[arg(long)]
        delta_q_ghz: f64,
        /// Coupling lambda_q in MHz (interpretation set by --convention).
        #[arg(long)]
        lambda_q_mhz: f64,
        #[arg(long, value_enum, default_value_t = QubitConvention::Both)]
        convention: QubitConvention,
        /// Mechanical frequency for the eta/omega_m ratio (Hz).
        #[arg(long, default_value_t = 2.0e6)]
        omega_m_hz: f64,
    },
    /// Eigenvalue and closed-form stability verdicts over a g0 scan at the
    /// optimal detuning, against the power-independent threshold.
    StabilityScan {
        #[command(flatten)]
        config: ConfigOverrides,
        #[command(flatten)]
        output: OutputArgs,
        #[arg(long, default_value_t = 0.02)]
        g0_min: f64,
        #[arg(long, default_value_t = 0.07)]
        g0_max: f64,
        #[arg(long, default_value_t = 51)]
        points: usize,
        /// Drive amplitude in units of omega_m (overrides the power key).
        #[arg(long, default_value_t = 5000.0)]
        drive_amplitude: f64,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepVariable {
    Power,
    Detuning,
    NTh,
    LambdaGrid,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum QubitConvention {
    /// Quoted value is lambda_q/2pi.
    TwoPi,
    /// Quoted value is the bare angular rate.
    Angular,
    /// Report both readings.
    Both,
}
