//! Run configuration: a TOML file, optionally layered over a figure preset.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use toml::Table;

use nmcoh::{BathSpec, GaussianInit, TimeGrid};

use crate::error::CliError;
use crate::presets;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Evolve,
    Steady,
    Sweep,
    Verify,
}

/// How the `alpha` and `r` lists combine into panels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Combine {
    /// `alpha[i]` with `r[i]`.
    Zip,
    /// Every `alpha` with every `r`.
    Product,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BathConfig {
    pub s: f64,
    #[serde(default = "default_omega_c")]
    pub omega_c: f64,
    #[serde(default = "default_temperature")]
    pub temperature: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    /// Coupling in units of the critical coupling.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta_rel: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StateConfig {
    /// Displacement magnitudes |α|.
    pub alpha: Vec<f64>,
    /// Phase of α in radians, shared by every state.
    pub alpha_phase: f64,
    pub r: Vec<f64>,
    pub n_bar: Vec<f64>,
    pub combine: Combine,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub t_max: f64,
    pub dt: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: PathBuf,
    /// Write every `stride`-th grid point (the last point is always written).
    pub stride: usize,
    pub plot_script: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SteadyConfig {
    /// Defaults to the bath temperature when empty.
    pub temperatures: Vec<f64>,
    pub n_bar: Vec<f64>,
    pub alpha_max: f64,
    pub alpha_points: usize,
    pub r_max: f64,
    pub r_points: usize,
}

/// Bath parameters swept in `sweep` mode; an empty list keeps the bath value.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub s: Vec<f64>,
    pub eta_rel: Vec<f64>,
    pub temperature: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Corners {
    /// s ∈ {1/2, 1, 3} × η ∈ {0.01, 2} η_c × T ∈ {1, 20} at ω_c = 5.
    Default,
    /// The bath and grid of this configuration.
    Config,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifyConfig {
    pub oracle_modes: usize,
    /// `config` when a `[bath]` section is given, else `default`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub corners: Option<Corners>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bath: Option<BathConfig>,
    #[serde(default)]
    pub state: StateConfig,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub steady: SteadyConfig,
    #[serde(default)]
    pub sweep: SweepConfig,
    #[serde(default)]
    pub verify: VerifyConfig,
}

fn default_omega_c() -> f64 {
    5.0
}

fn default_temperature() -> f64 {
    1.0
}

impl Default for StateConfig {
    fn default() -> Self {
        Self {
            alpha: vec![0.0, 1.0, 2.0],
            alpha_phase: 0.0,
            r: vec![0.0, 0.5, 1.0],
            n_bar: vec![0.1, 1.0, 10.0],
            combine: Combine::Zip,
        }
    }
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { t_max: 50.0, dt: 0.01 }
    }
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: PathBuf::from("out"), stride: 10, plot_script: true }
    }
}

impl Default for SteadyConfig {
    fn default() -> Self {
        Self { temperatures: Vec::new(), n_bar: vec![0.1, 2.0], alpha_max: 2.0, alpha_points: 21, r_max: 1.0, r_points: 21 }
    }
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self { oracle_modes: 2000, corners: None }
    }
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

/// Merges `over` into `base`; tables merge recursively, everything else is
/// replaced. Giving either coupling key drops both from `base`.
fn merge(base: &mut Table, over: Table) {
    for (key, value) in over {
        match (base.get_mut(&key), value) {
            (Some(toml::Value::Table(b)), toml::Value::Table(o)) => {
                if key == "bath" && (o.contains_key("eta") || o.contains_key("eta_rel")) {
                    b.remove("eta");
                    b.remove("eta_rel");
                }
                merge(b, o);
            }
            (_, v) => {
                base.insert(key, v);
            }
        }
    }
}

impl BathConfig {
    pub fn spec(&self) -> Result<BathSpec, CliError> {
        self.spec_at(self.temperature)
    }

    pub fn spec_at(&self, temperature: f64) -> Result<BathSpec, CliError> {
        let spec = match (self.eta, self.eta_rel) {
            (Some(eta), None) => BathSpec::new(eta, self.s, self.omega_c, temperature),
            (None, Some(rel)) => BathSpec::with_relative_coupling(rel, self.s, self.omega_c, temperature),
            (Some(_), Some(_)) => return Err(config_err("bath: give exactly one of `eta` and `eta_rel`, not both")),
            (None, None) => return Err(config_err("bath: one of `eta` or `eta_rel` is required")),
        };
        spec.map_err(|e| config_err(format!("bath: {e}")))
    }
}

impl StateConfig {
    /// `(alpha, r)` panels in output order.
    pub fn panels(&self) -> Result<Vec<(f64, f64)>, CliError> {
        match self.combine {
            Combine::Zip => {
                if self.alpha.len() != self.r.len() {
                    return Err(config_err(format!(
                        "state: `alpha` and `r` have {} and {} entries; `combine = \"zip\"` needs equal lengths",
                        self.alpha.len(),
                        self.r.len()
                    )));
                }
                Ok(self.alpha.iter().copied().zip(self.r.iter().copied()).collect())
            }
            Combine::Product => Ok(self.alpha.iter().flat_map(|&a| self.r.iter().map(move |&r| (a, r))).collect()),
        }
    }

    /// Every initial state, panels outermost and `n_bar` innermost.
    pub fn states(&self) -> Result<Vec<GaussianInit>, CliError> {
        if !(self.alpha.iter().all(|&a| a >= 0.0) && self.alpha_phase.is_finite()) {
            return Err(config_err("state: `alpha` entries are magnitudes and must be >= 0; `alpha_phase` must be finite"));
        }
        let mut out = Vec::new();
        for (a, r) in self.panels()? {
            let alpha = Complex64::from_polar(a, self.alpha_phase);
            for &n in &self.n_bar {
                out.push(GaussianInit::new(alpha, r, n).map_err(|e| config_err(format!("state: {e}")))?);
            }
        }
        if out.is_empty() {
            return Err(config_err("state: `alpha`, `r` and `n_bar` must be non-empty"));
        }
        Ok(out)
    }
}

impl GridConfig {
    pub fn time_grid(&self) -> Result<TimeGrid, CliError> {
        TimeGrid::new(self.t_max, self.dt).map_err(|e| config_err(format!("grid: {e}")))
    }
}

impl SteadyConfig {
    fn axis(max: f64, points: usize) -> Vec<f64> {
        if points == 1 {
            return vec![0.0];
        }
        (0..points).map(|i| max * i as f64 / (points - 1) as f64).collect()
    }

    pub fn alphas(&self) -> Vec<f64> {
        Self::axis(self.alpha_max, self.alpha_points)
    }

    pub fn rs(&self) -> Vec<f64> {
        Self::axis(self.r_max, self.r_points)
    }
}

impl RunConfig {
    /// Parses `text`, layers it over the named preset (the `--preset` flag
    /// wins over a `preset` key in the file), and validates the result for
    /// `mode`.
    pub fn resolve(text: &str, mode: Mode, preset: Option<&str>, out_dir: Option<&Path>) -> Result<Self, CliError> {
        let file: Table = text.parse().map_err(|e| config_err(format!("TOML parse error: {e}")))?;
        let preset_name = match preset {
            Some(p) => Some(p.to_string()),
            None => match file.get("preset") {
                None => None,
                Some(toml::Value::String(p)) => Some(p.clone()),
                Some(_) => return Err(config_err("preset: expected a string such as \"fig1\"")),
            },
        };

        let mut merged = match &preset_name {
            Some(name) => presets::preset(name)?.to_table(),
            None => Table::new(),
        };
        merge(&mut merged, file);
        if let Some(name) = &preset_name {
            merged.insert("preset".into(), toml::Value::String(name.clone()));
        }

        let mut cfg: RunConfig = toml::Value::Table(merged)
            .try_into()
            .map_err(|e: toml::de::Error| config_err(format!("invalid field: {}", e.message())))?;
        if let Some(m) = cfg.mode {
            if m != mode {
                return Err(config_err(format!("mode: config says {m:?} but the {mode:?} subcommand was used")));
            }
        }
        cfg.mode = Some(mode);
        if let Some(dir) = out_dir {
            cfg.output.dir = dir.to_path_buf();
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn mode(&self) -> Mode {
        self.mode.unwrap_or(Mode::Evolve)
    }

    pub fn bath(&self) -> Result<&BathConfig, CliError> {
        self.bath.as_ref().ok_or_else(|| config_err("bath: section `[bath]` is required for this mode"))
    }

    pub fn corners(&self) -> Corners {
        self.verify.corners.unwrap_or(if self.bath.is_some() { Corners::Config } else { Corners::Default })
    }

    fn validate(&self) -> Result<(), CliError> {
        if self.output.stride == 0 {
            return Err(config_err("output.stride: must be at least 1"));
        }
        let needs_bath = self.mode() != Mode::Verify || self.corners() == Corners::Config;
        if needs_bath {
            self.bath()?.spec()?;
        } else if let Some(b) = &self.bath {
            b.spec()?;
        }
        self.grid.time_grid()?;
        self.state.states()?;
        match self.mode() {
            Mode::Steady => {
                if self.steady.alpha_points == 0 || self.steady.r_points == 0 {
                    return Err(config_err("steady: `alpha_points` and `r_points` must be at least 1"));
                }
                if self.steady.n_bar.is_empty() {
                    return Err(config_err("steady.n_bar: must be non-empty"));
                }
                for &t in &self.steady.temperatures {
                    self.bath()?.spec_at(t)?;
                }
            }
            Mode::Sweep => {
                let b = self.bath()?;
                for &s in &self.sweep.s {
                    BathConfig { s, ..b.clone() }.spec()?;
                }
                for &t in &self.sweep.temperature {
                    b.spec_at(t)?;
                }
                for &k in &self.sweep.eta_rel {
                    BathConfig { eta: None, eta_rel: Some(k), ..b.clone() }.spec()?;
                }
            }
            Mode::Verify => {
                if self.verify.oracle_modes < 2 {
                    return Err(config_err("verify.oracle_modes: must be at least 2"));
                }
            }
            Mode::Evolve => {}
        }
        Ok(())
    }

    /// The resolved configuration as TOML.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("RunConfig serializes")
    }
}
