//! Domain types, the internal unit system, and conversion from laboratory
//! (SI) inputs.
//!
//! Internally the mechanical angular frequency sets the unit: `omega_m = 1`,
//! and every other rate, detuning, and drive amplitude is expressed as a
//! multiple of it. All "omega" quantities are angular; laboratory inputs
//! quoted as ordinary frequencies (Hz) are converted with an explicit 2π.

use crate::error::{Error, Result};

/// Reduced Planck constant in J·s, used to turn a drive power in watts into
/// an amplitude in angular-rate units.
pub const HBAR: f64 = 1.054_571_817e-34;

/// Form of the mechanical nonlinearity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NonlinearityKind {
    /// Quartic term (η/2)(b + b†)⁴ in the mechanical potential.
    Duffing,
    /// Cubic term η(b + b†)³.
    Cubic,
}

/// Ancilla-cavity readout parameters, all in units of `omega_m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionParams {
    /// Ancilla drive detuning δ_s.
    pub delta_s: f64,
    /// Ancilla single-photon optomechanical coupling g_s.
    pub g_s: f64,
    /// Ancilla damping rate κ_s (must be positive).
    pub kappa_s: f64,
    /// Ancilla pump amplitude Ω_p.
    pub drive_amplitude_s: f64,
}

impl DetectionParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.kappa_s > 0.0) {
            return Err(Error::Domain(format!(
                "ancilla damping kappa_s must be positive, got {}",
                self.kappa_s
            )));
        }
        Ok(())
    }
}

/// All physical constants of the model in internal units (`omega_m = 1`
/// when produced by [`to_internal`], though any positive value is accepted).
#[derive(Debug, Clone, PartialEq)]
pub struct SystemParams {
    /// Mechanical angular frequency (the internal unit).
    pub omega_m: f64,
    /// Cavity drive detuning δ_a in units of `omega_m`.
    pub delta_a: f64,
    /// Single-photon optomechanical coupling g₀.
    pub g0: f64,
    /// Nonlinearity amplitude η (≥ 0).
    pub eta: f64,
    /// Cavity damping rate κ.
    pub kappa: f64,
    /// Mechanical damping rate γ.
    pub gamma: f64,
    /// Thermal phonon occupation of the mechanical bath (≥ 0).
    pub n_th: f64,
    /// Drive amplitude Ω_d.
    pub drive_amplitude: f64,
    pub nonlinearity: NonlinearityKind,
    pub detection: Option<DetectionParams>,
}

impl SystemParams {
    /// Checks hard invariants and returns soft warnings (currently only the
    /// `gamma ≪ kappa` assumption behind the analytic limits).
    pub fn validate(&self) -> Result<Vec<String>> {
        if !(self.omega_m > 0.0) {
            return Err(Error::Domain("omega_m must be positive".into()));
        }
        if !(self.kappa > 0.0) {
            return Err(Error::Domain("kappa must be positive".into()));
        }
        if !(self.gamma > 0.0) {
            return Err(Error::Domain("gamma must be positive".into()));
        }
        if !(self.eta >= 0.0) {
            return Err(Error::Domain("eta must be nonnegative".into()));
        }
        if !(self.n_th >= 0.0) {
            return Err(Error::Domain("n_th must be nonnegative".into()));
        }
        if let Some(det) = &self.detection {
            det.validate()?;
        }
        let mut warnings = Vec::new();
        if self.gamma > self.kappa / 10.0 {
            warnings.push(format!(
                "gamma = {:.3e} exceeds kappa/10 = {:.3e}; the gamma << kappa \
                 assumption behind the analytic limits is weak here",
                self.gamma,
                self.kappa / 10.0
            ));
        }
        Ok(warnings)
    }
}

/// Laboratory-frame inputs: frequencies as ordinary frequencies (Hz, not
/// angular), powers in watts, and the dimensionless ratios of the internal
/// parameter set.
#[derive(Debug, Clone, PartialEq)]
pub struct SIInput {
    pub omega_m_hz: f64,
    pub omega_a_hz: f64,
    pub omega_s_hz: Option<f64>,
    pub power_w: f64,
    pub power_s_w: Option<f64>,
    pub g0_ratio: f64,
    pub eta_ratio: f64,
    pub kappa_ratio: f64,
    pub gamma_ratio: f64,
    pub n_th: f64,
    /// Bare cavity detuning δ_a / ω_m for the fixed-detuning mode. The
    /// `optimal` config token is resolved at the [`crate::pipeline`] level.
    pub delta_a_ratio: f64,
    pub delta_s_ratio: Option<f64>,
    pub nonlinearity: NonlinearityKind,
    pub detection: bool,
}

impl SIInput {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("omega_m_hz", self.omega_m_hz),
            ("omega_a_hz", self.omega_a_hz),
            ("power_w", self.power_w),
        ] {
            if !(v >= 0.0) {
                return Err(Error::Domain(format!("{name} must be nonnegative, got {v}")));
            }
        }
        if let Some(f) = self.omega_s_hz {
            if !(f >= 0.0) {
                return Err(Error::Domain(format!("omega_s_hz must be nonnegative, got {f}")));
            }
        }
        if let Some(p) = self.power_s_w {
            if !(p >= 0.0) {
                return Err(Error::Domain(format!("power_s_w must be nonnegative, got {p}")));
            }
        }
        Ok(())
    }
}

/// Drive amplitude Ω = √(2·P·κ / (ħ·ω_carrier)) in SI angular-rate units.
///
/// `kappa` and `omega_carrier` are angular rates in rad/s and `power_w` is in
/// watts; ħ makes the ħ = 1 bookkeeping dimensionally correct. Divide by the
/// mechanical angular frequency to obtain internal units.
pub fn drive_amplitude_from_power(power_w: f64, kappa: f64, omega_carrier: f64) -> Result<f64> {
    if !(power_w >= 0.0) || !(kappa >= 0.0) || !(omega_carrier >= 0.0) {
        return Err(Error::Domain(format!(
            "drive_amplitude_from_power requires nonnegative inputs, got \
             P = {power_w}, kappa = {kappa}, omega = {omega_carrier}"
        )));
    }
    if power_w == 0.0 {
        return Ok(0.0);
    }
    if omega_carrier == 0.0 {
        return Err(Error::Domain(
            "carrier frequency must be positive for a nonzero drive power".into(),
        ));
    }
    Ok((2.0 * power_w * kappa / (HBAR * omega_carrier)).sqrt())
}

/// Converts laboratory inputs to internal units (`omega_m = 1`).
pub fn to_internal(si: &SIInput) -> Result<SystemParams> {
    si.validate()?;
    if si.omega_m_hz == 0.0 {
        return Err(Error::Domain("omega_m_hz must be positive".into()));
    }
    let omega_m_rad = std::f64::consts::TAU * si.omega_m_hz;
    let kappa_si = si.kappa_ratio * omega_m_rad;
    let drive = drive_amplitude_from_power(
        si.power_w,
        kappa_si,
        std::f64::consts::TAU * si.omega_a_hz,
    )? / omega_m_rad;

    let detection = if si.detection {
        let omega_s_hz = si
            .omega_s_hz
            .ok_or_else(|| Error::Config("detection is on but omega_s_hz is missing".into()))?;
        let power_s_w = si
            .power_s_w
            .ok_or_else(|| Error::Config("detection is on but power_s_w is missing".into()))?;
        let delta_s = si
            .delta_s_ratio
            .ok_or_else(|| Error::Config("detection is on but delta_s_ratio is missing".into()))?;
        // The ancilla shares the main cavity's damping ratio and coupling
        // ratio; the config format does not carry independent values.
        let kappa_s_si = si.kappa_ratio * omega_m_rad;
        let drive_s = drive_amplitude_from_power(
            power_s_w,
            kappa_s_si,
            std::f64::consts::TAU * omega_s_hz,
        )? / omega_m_rad;
        Some(DetectionParams {
            delta_s,
            g_s: si.g0_ratio,
            kappa_s: si.kappa_ratio,
            drive_amplitude_s: drive_s,
        })
    } else {
        None
    };

    let params = SystemParams {
        omega_m: 1.0,
        delta_a: si.delta_a_ratio,
        g0: si.g0_ratio,
        eta: si.eta_ratio,
        kappa: si.kappa_ratio,
        gamma: si.gamma_ratio,
        n_th: si.n_th,
        drive_amplitude: drive,
        nonlinearity: si.nonlinearity,
        detection,
    };
    params.validate()?;
    Ok(params)
}

/// How the cavity detuning is chosen when solving a point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DetuningMode {
    /// Use `delta_a` exactly as given.
    Fixed,
    /// Solve for the δ_a at which Δ_a = ω'_m self-consistently.
    Optimal,
}

/// A fully parsed configuration file: laboratory inputs plus the detuning
/// mode token.
#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub si: SIInput,
    pub detuning_mode: DetuningMode,
}

impl Config {
    /// Resolves the configuration into internal-unit system parameters.
    ///
    /// In `Optimal` mode the returned `delta_a` is a placeholder equal to
    /// `omega_m`; the caller runs the optimal-detuning solver.
    pub fn resolve(&self) -> Result<(SystemParams, DetuningMode)> {
        let params = to_internal(&self.si)?;
        Ok((params, self.detuning_mode))
    }

    /// Renders the resolved configuration as sorted `key = value` lines,
    /// used by the CLI to echo the exact inputs into the CSV header.
    pub fn echo_lines(&self) -> Vec<String> {
        let mut lines = vec![
            format!("delta_a_ratio = {}", match self.detuning_mode {
                DetuningMode::Optimal => "optimal".to_string(),
                DetuningMode::Fixed => format!("{:e}", self.si.delta_a_ratio),
            }),
            format!("detection = {}", if self.si.detection { "on" } else { "off" }),
            format!("eta_ratio = {:e}", self.si.eta_ratio),
            format!("g0_ratio = {:e}", self.si.g0_ratio),
            format!("gamma_ratio = {:e}", self.si.gamma_ratio),
            format!("kappa_ratio = {:e}", self.si.kappa_ratio),
            format!("n_th = {:e}", self.si.n_th),
            format!(
                "nonlinearity = {}",
                match self.si.nonlinearity {
                    NonlinearityKind::Duffing => "duffing",
                    NonlinearityKind::Cubic => "cubic",
                }
            ),
            format!("omega_a_hz = {:e}", self.si.omega_a_hz),
            format!("omega_m_hz = {:e}", self.si.omega_m_hz),
            format!("power_w = {:e}", self.si.power_w),
        ];
        if let Some(f) = self.si.omega_s_hz {
            lines.push(format!("omega_s_hz = {f:e}"));
        }
        if let Some(p) = self.si.power_s_w {
            lines.push(format!("power_s_w = {p:e}"));
        }
        if let Some(d) = self.si.delta_s_ratio {
            lines.push(format!("delta_s_ratio = {d:e}"));
        }
        lines.sort();
        lines
    }
}

/// Splits the flat `key = value` config text (`#` starts a comment) into
/// pairs without interpreting them; duplicate keys are rejected.
pub fn parse_pairs(text: &str) -> Result<std::collections::BTreeMap<String, String>> {
    let mut map = std::collections::BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(idx) => &raw[..idx],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::Config(format!("line {}: expected `key = value`, got {raw:?}", lineno + 1))
        })?;
        let key = key.trim();
        let value = value.trim();
        if value.is_empty() {
            return Err(Error::Config(format!("line {}: empty value for {key}", lineno + 1)));
        }
        if map.insert(key.to_string(), value.to_string()).is_some() {
            return Err(Error::Config(format!("duplicate key {key}")));
        }
    }
    Ok(map)
}

/// Parses the flat `key = value` config format.
///
/// Recognized keys: `omega_m_hz`, `omega_a_hz`, `omega_s_hz`, `g0_ratio`,
/// `eta_ratio`, `kappa_ratio`, `gamma_ratio`, `n_th`, `power_w`, `power_s_w`,
/// `delta_a_ratio` (a number or the token `optimal`), `delta_s_ratio`,
/// `nonlinearity` (`duffing`|`cubic`), `detection` (`on`|`off`).
pub fn parse_config(text: &str) -> Result<Config> {
    config_from_pairs(&parse_pairs(text)?)
}

/// The reference parameter set as config pairs; the CLI's defaults.
pub fn reference_pairs() -> std::collections::BTreeMap<String, String> {
    [
        ("omega_m_hz", "2e6"),
        ("omega_a_hz", "500e12"),
        ("omega_s_hz", "1000e12"),
        ("g0_ratio", "1e-4"),
        ("eta_ratio", "1e-4"),
        ("kappa_ratio", "0.1"),
        ("gamma_ratio", "1e-6"),
        ("n_th", "0"),
        ("power_w", "1e-4"),
        ("power_s_w", "1e-7"),
        ("delta_a_ratio", "optimal"),
        ("delta_s_ratio", "1.0"),
        ("nonlinearity", "duffing"),
        ("detection", "off"),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v.to_string()))
    .collect()
}

/// Builds a [`Config`] from already-split key/value pairs (shared by the
/// file parser and the CLI flag overrides).
pub fn config_from_pairs(map: &std::collections::BTreeMap<String, String>) -> Result<Config> {
    const KNOWN: &[&str] = &[
        "omega_m_hz",
        "omega_a_hz",
        "omega_s_hz",
        "g0_ratio",
        "eta_ratio",
        "kappa_ratio",
        "gamma_ratio",
        "n_th",
        "power_w",
        "power_s_w",
        "delta_a_ratio",
        "delta_s_ratio",
        "nonlinearity",
        "detection",
    ];
    for key in map.keys() {
        if !KNOWN.contains(&key.as_str()) {
            return Err(Error::Config(format!("unknown config key {key}")));
        }
    }
    let get = |key: &str| -> Result<&str> {
        map.get(key)
            .map(String::as_str)
            .ok_or_else(|| Error::Config(format!("missing required key {key}")))
    };
    let parse_f64 = |key: &str, value: &str| -> Result<f64> {
        value
            .parse::<f64>()
            .map_err(|_| Error::Config(format!("{key}: cannot parse {value:?} as a number")))
    };
    let req_f64 = |key: &str| -> Result<f64> { parse_f64(key, get(key)?) };
    let opt_f64 = |key: &str| -> Result<Option<f64>> {
        map.get(key).map(|v| parse_f64(key, v)).transpose()
    };

    let (delta_a_ratio, detuning_mode) = match get("delta_a_ratio")? {
        "optimal" => (1.0, DetuningMode::Optimal),
        other => (parse_f64("delta_a_ratio", other)?, DetuningMode::Fixed),
    };
    let nonlinearity = match get("nonlinearity")? {
        "duffing" => NonlinearityKind::Duffing,
        "cubic" => NonlinearityKind::Cubic,
        other => {
            return Err(Error::Config(format!(
                "nonlinearity must be `duffing` or `cubic`, got {other:?}"
            )))
        }
    };
    let detection = match get("detection")? {
        "on" => true,
        "off" => false,
        other => {
            return Err(Error::Config(format!("detection must be `on` or `off`, got {other:?}")))
        }
    };

    let si = SIInput {
        omega_m_hz: req_f64("omega_m_hz")?,
        omega_a_hz: req_f64("omega_a_hz")?,
        omega_s_hz: opt_f64("omega_s_hz")?,
        power_w: req_f64("power_w")?,
        power_s_w: opt_f64("power_s_w")?,
        g0_ratio: req_f64("g0_ratio")?,
        eta_ratio: req_f64("eta_ratio")?,
        kappa_ratio: req_f64("kappa_ratio")?,
        gamma_ratio: req_f64("gamma_ratio")?,
        n_th: req_f64("n_th")?,
        delta_a_ratio,
        delta_s_ratio: opt_f64("delta_s_ratio")?,
        nonlinearity,
        detection,
    };
    Ok(Config { si, detuning_mode })
}

/// The parameter set used throughout the figures: g₀ = η = 10⁻⁴ ω_m,
/// κ = 0.1 ω_m, γ = 10⁻⁶ ω_m, ω_m/2π = 2 MHz, ω_a/2π = 500 THz, and an
/// ancilla at ω_s/2π = 1000 THz pumped with 0.1 μW.
pub fn reference_si_input(power_w: f64, detection: bool) -> SIInput {
    SIInput {
        omega_m_hz: 2.0e6,
        omega_a_hz: 500.0e12,
        omega_s_hz: Some(1000.0e12),
        power_w,
        power_s_w: Some(0.1e-6),
        g0_ratio: 1.0e-4,
        eta_ratio: 1.0e-4,
        kappa_ratio: 0.1,
        gamma_ratio: 1.0e-6,
        n_th: 0.0,
        delta_a_ratio: 1.0,
        delta_s_ratio: Some(1.0),
        nonlinearity: NonlinearityKind::Duffing,
        detection,
    }
}
