//! Named parameter sets `fig1` .. `fig15`.
//!
//! `fig1`-`fig12` are transient runs: three Ohmicities, weak (0.01 η_c) and
//! strong (2 η_c) coupling, at T_s = 1 and T_s = 20, each with curves for
//! n̄ ∈ {0.1, 1, 10}. `fig13`-`fig15` are steady-state surfaces at 2 η_c over
//! T_s ∈ {0.1, 20} and n̄ ∈ {0.1, 2}. The cutoff is ω_c = 5 throughout.
//! Presets leave the (α, r) panels at the default state grid.

use toml::{Table, Value};

use crate::error::CliError;

const OMEGA_C: f64 = 5.0;
const WEAK: f64 = 0.01;
const STRONG: f64 = 2.0;
const EVOLVE_N_BAR: [f64; 3] = [0.1, 1.0, 10.0];
const STEADY_N_BAR: [f64; 2] = [0.1, 2.0];
const STEADY_TEMPERATURES: [f64; 2] = [0.1, 20.0];

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PresetKind {
    /// Transient run at one temperature.
    Evolve { temperature: f64 },
    /// Long-time surfaces.
    Steady,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    pub s: f64,
    pub eta_rel: f64,
    pub kind: PresetKind,
}

const fn evolve(name: &'static str, s: f64, eta_rel: f64, temperature: f64) -> Preset {
    Preset { name, s, eta_rel, kind: PresetKind::Evolve { temperature } }
}

const fn steady(name: &'static str, s: f64) -> Preset {
    Preset { name, s, eta_rel: STRONG, kind: PresetKind::Steady }
}

pub const PRESETS: [Preset; 15] = [
    evolve("fig1", 1.0, WEAK, 1.0),
    evolve("fig2", 1.0, WEAK, 20.0),
    evolve("fig3", 1.0, STRONG, 1.0),
    evolve("fig4", 1.0, STRONG, 20.0),
    evolve("fig5", 0.5, WEAK, 1.0),
    evolve("fig6", 0.5, WEAK, 20.0),
    evolve("fig7", 0.5, STRONG, 1.0),
    evolve("fig8", 0.5, STRONG, 20.0),
    evolve("fig9", 3.0, WEAK, 1.0),
    evolve("fig10", 3.0, WEAK, 20.0),
    evolve("fig11", 3.0, STRONG, 1.0),
    evolve("fig12", 3.0, STRONG, 20.0),
    steady("fig13", 1.0),
    steady("fig14", 0.5),
    steady("fig15", 3.0),
];

pub fn preset(name: &str) -> Result<&'static Preset, CliError> {
    PRESETS.iter().find(|p| p.name == name).ok_or_else(|| {
        let names: Vec<&str> = PRESETS.iter().map(|p| p.name).collect();
        CliError::Config(format!("preset: unknown preset `{name}` (expected one of {})", names.join(", ")))
    })
}

fn floats(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| Value::Float(x)).collect())
}

impl Preset {
    /// The preset as a configuration table a user file is layered over.
    pub fn to_table(&self) -> Table {
        let mut bath = Table::new();
        bath.insert("s".into(), Value::Float(self.s));
        bath.insert("omega_c".into(), Value::Float(OMEGA_C));
        bath.insert("eta_rel".into(), Value::Float(self.eta_rel));

        let mut root = Table::new();
        match self.kind {
            PresetKind::Evolve { temperature } => {
                bath.insert("temperature".into(), Value::Float(temperature));
                let mut state = Table::new();
                state.insert("n_bar".into(), floats(&EVOLVE_N_BAR));
                root.insert("state".into(), Value::Table(state));
            }
            PresetKind::Steady => {
                bath.insert("temperature".into(), Value::Float(STEADY_TEMPERATURES[0]));
                let mut steady = Table::new();
                steady.insert("temperatures".into(), floats(&STEADY_TEMPERATURES));
                steady.insert("n_bar".into(), floats(&STEADY_N_BAR));
                root.insert("steady".into(), Value::Table(steady));
            }
        }
        root.insert("bath".into(), Value::Table(bath));
        root
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{Mode, RunConfig};

    /// (preset, s, η/η_c, T_s) for the transient presets.
    const EXPECTED: [(&str, f64, f64, f64); 12] = [
        ("fig1", 1.0, 0.01, 1.0),
        ("fig2", 1.0, 0.01, 20.0),
        ("fig3", 1.0, 2.0, 1.0),
        ("fig4", 1.0, 2.0, 20.0),
        ("fig5", 0.5, 0.01, 1.0),
        ("fig6", 0.5, 0.01, 20.0),
        ("fig7", 0.5, 2.0, 1.0),
        ("fig8", 0.5, 2.0, 20.0),
        ("fig9", 3.0, 0.01, 1.0),
        ("fig10", 3.0, 0.01, 20.0),
        ("fig11", 3.0, 2.0, 1.0),
        ("fig12", 3.0, 2.0, 20.0),
    ];

    #[test]
    fn transient_presets_parameters() {
        for (name, s, k, temp) in EXPECTED {
            let cfg = RunConfig::resolve("", Mode::Evolve, Some(name), None).unwrap();
            let bath = cfg.bath().unwrap();
            assert_eq!((bath.s, bath.eta_rel, bath.eta, bath.temperature, bath.omega_c), (s, Some(k), None, temp, 5.0), "{name}");
            assert_eq!(cfg.state.n_bar, vec![0.1, 1.0, 10.0], "{name}");
            assert_eq!(cfg.state.states().unwrap().len(), 9, "{name}");
        }
    }

    #[test]
    fn steady_presets_parameters() {
        for (name, s) in [("fig13", 1.0), ("fig14", 0.5), ("fig15", 3.0)] {
            let cfg = RunConfig::resolve("", Mode::Steady, Some(name), None).unwrap();
            let bath = cfg.bath().unwrap();
            assert_eq!((bath.s, bath.eta_rel, bath.omega_c), (s, Some(2.0), 5.0), "{name}");
            assert_eq!(cfg.steady.temperatures, vec![0.1, 20.0]);
            assert_eq!(cfg.steady.n_bar, vec![0.1, 2.0]);
        }
    }

    #[test]
    fn unknown_preset_rejected() {
        assert!(matches!(preset("fig16"), Err(CliError::Config(_))));
        assert_eq!(PRESETS.len(), 15);
    }
}
