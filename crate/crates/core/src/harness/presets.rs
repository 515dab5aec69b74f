//! Named sweep scenarios for each rate figure (`fig2a` ... `fig6b`).

use serde_json::{json, Value};

use super::config::{FlatConfig, DEFAULT_AFC_ROUNDS, DEFAULT_SPIN_ROUNDS};
use crate::error::{Error, Result};

pub const PRESET_NAMES: &[&str] = &[
    "fig2a", "fig2b", "fig2c", "fig5a", "fig5b", "fig5c", "fig5d", "fig6a", "fig6b", "custom",
];

/// Node separations 5, 10, ..., 50 km.
pub fn sweep_distances() -> Vec<f64> {
    (1..=10).map(|i| 5.0 * i as f64).collect()
}

pub const SWEEP_P_M: [f64; 3] = [1.0, 0.5, 0.02];

pub fn describe(name: &str) -> Option<&'static str> {
    Some(match name {
        "fig2a" => "MM, trapped ion (p_memory 0.05, t_clock 1 us), N = 3",
        "fig2b" => "MM, NV center (p_memory 0.25, t_clock 100 ns), N = 3",
        "fig2c" => "MM, quantum dot (p_memory 0.45, t_clock 10 ns), N = 3",
        "fig5a" => "AFC-MM, N_AFC = 100, p_AFC = 0.53, t'_clock = 10 ns",
        "fig5b" => "AFC-MS, N_AFC = 100, p_AFC = 0.53, p_pass = 0.9, t'_clock = 10 ns",
        "fig5c" => "AFC-MM, N_AFC = 1, with QD MM N = 1 baseline",
        "fig5d" => "AFC-MS, N_AFC = 1, with QD MS N = 1 baseline",
        "fig6a" => "AFC-MM optimistic, N_AFC = 1060, p_AFC = 1",
        "fig6b" => "AFC-MS optimistic, N_AFC = 1060, p_AFC = 1, p_pass = 0.9",
        "custom" => "empty base; every required key comes from the config",
        _ => return None,
    })
}

fn sweep_base() -> FlatConfig {
    FlatConfig::new()
        .with("L_km", Value::from(sweep_distances()))
        .with("p_m", json!(SWEEP_P_M))
}

fn spin(kind: &str) -> FlatConfig {
    sweep_base()
        .with("scheme", "MM")
        .with("memory.kind", kind)
        .with("memory.N", 3)
        .with("rounds", DEFAULT_SPIN_ROUNDS)
}

fn afc(scheme: &str, afc_preset: &str) -> FlatConfig {
    sweep_base()
        .with("scheme", scheme)
        .with("afc.preset", afc_preset)
        .with("rounds", DEFAULT_AFC_ROUNDS)
}

/// Flat document of a preset.
pub fn preset(name: &str) -> Result<FlatConfig> {
    Ok(match name {
        "fig2a" => spin("ion"),
        "fig2b" => spin("NV"),
        "fig2c" => spin("QD"),
        "fig5a" => afc("AFC-MM", "realistic"),
        "fig5b" => afc("AFC-MS", "realistic"),
        "fig5c" => afc("AFC-MM", "realistic")
            .with("afc.N_AFC", 1)
            .with("baseline.scheme", "MM")
            .with("baseline.memory.kind", "QD")
            .with("baseline.memory.N", 1),
        "fig5d" => afc("AFC-MS", "realistic")
            .with("afc.N_AFC", 1)
            .with("baseline.scheme", "MS")
            .with("baseline.memory.kind", "QD")
            .with("baseline.memory.N", 1),
        "fig6a" => afc("AFC-MM", "optimistic"),
        "fig6b" => afc("AFC-MS", "optimistic"),
        "custom" => FlatConfig::new(),
        other => return Err(Error::UnknownPreset(other.to_string())),
    })
}
