//! Experiment files and command-line overrides.

use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use quatsync_core::lion::{lambda_critical_for, SweepGrid};
use quatsync_core::ode::{IntegratorConfig, Method};
use quatsync_core::sync::SyncThresholds;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// All `4N` quaternion components.
    Full,
    /// Planar `(w, v)` reduction of two oscillators.
    Reduced2,
    /// Planar flow on the arithmetic-progression manifold, `N >= 3`.
    Lion,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Full => "full",
            Mode::Reduced2 => "reduced2",
            Mode::Lion => "lion",
        })
    }
}

/// One frequency for the planar modes, one per oscillator for `full`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Omega {
    Scalar(f64),
    Vector(Vec<f64>),
}

/// A coupling value, or `"critical"` for the lion threshold.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LambdaSpec {
    Value(f64),
    Named(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialState {
    pub w: Vec<f64>,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub z: Vec<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorSection {
    pub method: Option<Method>,
    pub dt: Option<f64>,
    pub rtol: Option<f64>,
    pub atol: Option<f64>,
    pub t_end: Option<f64>,
    pub max_steps: Option<usize>,
    pub max_dt: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LambdaRange {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl LambdaRange {
    /// Grid points `start + k*step` up to `stop` inclusive (within half a step of round-off).
    pub fn values(&self) -> Vec<f64> {
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        (0..=n).map(|k| self.start + k as f64 * self.step).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldGrid {
    pub nw: usize,
    pub nv: usize,
    pub v_max: f64,
}

impl Default for FieldGrid {
    fn default() -> Self {
        Self { nw: 64, nv: 32, v_max: 3.0 }
    }
}

/// Raw experiment file. Every field is optional here; the accessors check
/// that the current mode has what it needs and name the missing field.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub mode: Option<Mode>,
    pub omega: Option<Omega>,
    pub lambda: Option<LambdaSpec>,
    pub n_osc: Option<usize>,
    pub initial: Option<InitialState>,
    /// Starting height on the section `w = pi/2` for orbits.
    pub v0: Option<f64>,
    /// Imaginary part of `q1 - q2`; its norm is used when `v0` is absent.
    pub initial_imag: Option<[f64; 3]>,
    /// Planar starting point for `simulate` in the reduced modes.
    pub initial_planar: Option<[f64; 2]>,
    #[serde(default)]
    pub integrator: IntegratorSection,
    pub thresholds: Option<SyncThresholds>,
    /// Subtract the mean natural frequency before integrating.
    #[serde(default)]
    pub rotating_frame: bool,
    /// Spacing of rows in trajectory CSV files; `0` writes every step.
    pub output_dt: Option<f64>,
    pub out: Option<PathBuf>,
    pub nested: Option<usize>,
    pub lambda_range: Option<LambdaRange>,
    pub grid: Option<SweepGrid>,
    pub field: Option<FieldGrid>,
    /// Use the grid sweep for three oscillators as well.
    #[serde(default)]
    pub force_sweep: bool,
}

/// Flags shared by every subcommand; each one overrides the file.
#[derive(Clone, Debug, Default, Args)]
pub struct Overrides {
    /// Experiment file (JSON).
    #[arg(long, short)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub mode: Option<Mode>,
    /// Coupling strength, or `critical` in lion mode.
    #[arg(long)]
    pub lambda: Option<String>,
    /// Comma-separated natural frequencies (a single value for planar modes).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub omega: Option<Vec<f64>>,
    #[arg(long)]
    pub n_osc: Option<usize>,
    #[arg(long)]
    pub t_end: Option<f64>,
    #[arg(long)]
    pub rtol: Option<f64>,
    #[arg(long)]
    pub atol: Option<f64>,
    #[arg(long)]
    pub v0: Option<f64>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str, origin: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::config(format!("{origin}: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text, &path.display().to_string())
    }

    /// Reads the file named by `--config` (if any) and applies the flags.
    pub fn from_overrides(o: &Overrides) -> Result<Self, CliError> {
        let mut c = match &o.config {
            Some(p) => Self::load(p)?,
            None => Self::default(),
        };
        c.apply(o);
        Ok(c)
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(m) = o.mode {
            self.mode = Some(m);
        }
        if let Some(l) = &o.lambda {
            self.lambda = Some(match l.parse::<f64>() {
                Ok(v) => LambdaSpec::Value(v),
                Err(_) => LambdaSpec::Named(l.clone()),
            });
        }
        if let Some(om) = &o.omega {
            self.omega = Some(match om.as_slice() {
                [single] if self.mode != Some(Mode::Full) => Omega::Scalar(*single),
                _ => Omega::Vector(om.clone()),
            });
        }
        if o.n_osc.is_some() {
            self.n_osc = o.n_osc;
        }
        if o.t_end.is_some() {
            self.integrator.t_end = o.t_end;
        }
        if o.rtol.is_some() {
            self.integrator.rtol = o.rtol;
        }
        if o.atol.is_some() {
            self.integrator.atol = o.atol;
        }
        if o.v0.is_some() {
            self.v0 = o.v0;
        }
        if o.out.is_some() {
            self.out = o.out.clone();
        }
    }

    pub fn require_mode(&self, allowed: &[Mode]) -> Result<Mode, CliError> {
        let m = self.mode.ok_or_else(|| CliError::missing("mode", "every experiment"))?;
        if !allowed.contains(&m) {
            let names: Vec<String> = allowed.iter().map(|a| a.to_string()).collect();
            return Err(CliError::config(format!(
                "field `mode`: `{m}` is not accepted here (expected {})",
                names.join(" or ")
            )));
        }
        Ok(m)
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("out"))
    }

    pub fn thresholds(&self) -> SyncThresholds {
        self.thresholds.unwrap_or_default()
    }

    pub fn output_dt(&self) -> Result<f64, CliError> {
        let dt = self.output_dt.unwrap_or(0.01);
        if !(dt >= 0.0 && dt.is_finite()) {
            return Err(CliError::config("field `output_dt`: must be finite and non-negative"));
        }
        Ok(dt)
    }

    /// Integrator settings with `base` filling the fields the file leaves out.
    pub fn integrator(&self, base: IntegratorConfig) -> Result<IntegratorConfig, CliError> {
        let s = &self.integrator;
        let cfg = IntegratorConfig {
            method: s.method.unwrap_or(base.method),
            dt: s.dt.unwrap_or(base.dt),
            rtol: s.rtol.unwrap_or(base.rtol),
            atol: s.atol.unwrap_or(base.atol),
            t_end: s.t_end.unwrap_or(base.t_end),
            max_steps: s.max_steps.unwrap_or(base.max_steps),
            max_dt: s.max_dt.or(base.max_dt),
        };
        cfg.validate().map_err(|e| CliError::config(format!("field `integrator`: {e}")))?;
        Ok(cfg)
    }

    pub fn omega_vector(&self) -> Result<Vec<f64>, CliError> {
        match &self.omega {
            Some(Omega::Vector(v)) => Ok(v.clone()),
            Some(Omega::Scalar(_)) => Err(CliError::config(
                "field `omega`: full mode needs one natural frequency per oscillator",
            )),
            None => Err(CliError::missing("omega", "mode full")),
        }
    }

    pub fn omega_scalar(&self, mode: Mode) -> Result<f64, CliError> {
        let w = match &self.omega {
            Some(Omega::Scalar(w)) => *w,
            Some(Omega::Vector(v)) if v.len() == 1 => v[0],
            Some(Omega::Vector(_)) => {
                return Err(CliError::config(format!("field `omega`: mode {mode} takes a single frequency gap")))
            }
            None => return Err(CliError::missing("omega", &format!("mode {mode}"))),
        };
        if !(w > 0.0 && w.is_finite()) {
            return Err(CliError::config("field `omega`: must be positive"));
        }
        Ok(w)
    }

    /// Coupling for the full and `reduced2` modes; `"critical"` is not meaningful there.
    pub fn lambda_value(&self, mode: Mode) -> Result<f64, CliError> {
        match &self.lambda {
            Some(LambdaSpec::Value(l)) if *l >= 0.0 && l.is_finite() => Ok(*l),
            Some(LambdaSpec::Value(_)) => Err(CliError::config("field `lambda`: must be finite and non-negative")),
            Some(LambdaSpec::Named(s)) => {
                Err(CliError::config(format!("field `lambda`: `{s}` is not a number")))
            }
            None => Err(CliError::missing("lambda", &format!("mode {mode}"))),
        }
    }

    pub fn n_osc_lion(&self) -> Result<usize, CliError> {
        match self.n_osc {
            Some(n) if n >= 3 => Ok(n),
            Some(_) => Err(CliError::config("field `n_osc`: lion mode needs at least 3 oscillators")),
            None => Err(CliError::missing("n_osc", "mode lion")),
        }
    }

    /// Coupling for lion mode, resolving `"critical"` to the threshold for `(omega, n)`.
    pub fn lambda_lion(&self, omega: f64, n: usize) -> Result<f64, CliError> {
        match &self.lambda {
            Some(LambdaSpec::Named(s)) if s == "critical" => Ok(lambda_critical_for(omega, n)),
            Some(LambdaSpec::Value(l)) if *l > 0.0 && l.is_finite() => Ok(*l),
            Some(LambdaSpec::Value(_)) => Err(CliError::config("field `lambda`: lion mode needs a positive coupling")),
            Some(LambdaSpec::Named(s)) => Err(CliError::config(format!(
                "field `lambda`: `{s}` is neither a number nor `critical`"
            ))),
            None => Err(CliError::missing("lambda", "mode lion")),
        }
    }

    /// Orbit start height: `v0`, else the norm of `initial_imag`.
    pub fn v0(&self) -> Result<f64, CliError> {
        let v = match (self.v0, self.initial_imag) {
            (Some(v), _) => v,
            (None, Some([x, y, z])) => (x * x + y * y + z * z).sqrt(),
            (None, None) => return Err(CliError::missing("v0", "mode reduced2 (or give `initial_imag`)")),
        };
        if !(v >= 0.0 && v.is_finite()) {
            return Err(CliError::config("field `v0`: must be finite and non-negative"));
        }
        Ok(v)
    }
}
