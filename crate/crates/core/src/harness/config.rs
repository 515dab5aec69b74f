//! Flat key-value scenario documents.
//!
//! A scenario is described by a flat JSON object whose keys mirror the
//! parameter names (`L_km`, `memory.kind`, `afc.N_AFC`, ...). Presets are
//! such documents; a config file may name a preset under `"preset"` and
//! override any of its keys, and `--set key=value` overrides are applied last.

use std::collections::BTreeMap;
use std::path::Path;

use serde_json::Value;

use crate::analytic::{MsSyncFactor, SchemeConfig, SchemeKind};
use crate::error::{Error, Result};
use crate::montecarlo::{McControls, Sampling};
use crate::params::{AfcSpec, LinkParams, Memory, MemoryKind, MemorySpec};
use crate::rng::DEFAULT_SEED;

/// Every key accepted in a config document or override.
pub const KNOWN_KEYS: &[&str] = &[
    "preset",
    "scheme",
    "L_km",
    "p_m",
    "L_att_km",
    "n",
    "c_km_per_s",
    "p_d",
    "memory.kind",
    "memory.N",
    "memory.t_clock_s",
    "memory.emission_fraction",
    "memory.collection_efficiency",
    "N_A",
    "afc.preset",
    "afc.N_AFC",
    "afc.t_rephase_s",
    "afc.t_spin_coherence_s",
    "afc.p_AFC",
    "afc.p_pass",
    "afc.t_clock_s",
    "ms_sync_factor",
    "rounds",
    "seed",
    "sampling",
    "baseline.scheme",
    "baseline.memory.kind",
    "baseline.memory.N",
];

pub const DEFAULT_SPIN_ROUNDS: u64 = 100_000;
pub const DEFAULT_AFC_ROUNDS: u64 = 500_000;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct FlatConfig {
    entries: BTreeMap<String, Value>,
}

impl FlatConfig {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, key: &str, value: Value) -> Result<()> {
        if !KNOWN_KEYS.contains(&key) {
            return Err(Error::Config(format!("unknown key `{key}`")));
        }
        self.entries.insert(key.to_string(), value);
        Ok(())
    }

    pub fn with(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.set(key, value.into()).expect("known key");
        self
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.entries.get(key)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    /// Applies `other` on top of `self`.
    pub fn merge(&mut self, other: &FlatConfig) {
        for (k, v) in &other.entries {
            self.entries.insert(k.clone(), v.clone());
        }
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text)
            .map_err(|e| Error::Config(format!("malformed config: {e}")))?;
        let Value::Object(map) = value else {
            return Err(Error::Config("config must be a JSON object".into()));
        };
        let mut cfg = FlatConfig::new();
        for (k, v) in map {
            cfg.set(&k, v)?;
        }
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json_str(&text)
    }

    /// Applies a `key=value` override. The value is read as JSON when it
    /// parses, as a list of numbers when comma separated, else as a string.
    pub fn apply_override(&mut self, assignment: &str) -> Result<()> {
        let (key, raw) = assignment
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("override `{assignment}` is not key=value")))?;
        let raw = raw.trim();
        let value = serde_json::from_str::<Value>(raw).or_else(|_| {
            if raw.contains(',') {
                raw.split(',')
                    .map(|s| {
                        s.trim().parse::<f64>().map(Value::from).map_err(|_| {
                            Error::Config(format!("bad list element `{s}` for `{key}`"))
                        })
                    })
                    .collect::<Result<Vec<_>>>()
                    .map(Value::Array)
            } else {
                Ok(Value::String(raw.to_string()))
            }
        })?;
        self.set(key.trim(), value)
    }

    fn f64(&self, key: &str) -> Result<Option<f64>> {
        match self.get(key) {
            None => Ok(None),
            Some(v) => as_f64(key, v).map(Some),
        }
    }

    fn u64(&self, key: &str) -> Result<Option<u64>> {
        match self.get(key) {
            None => Ok(None),
            Some(v) => {
                let x = as_f64(key, v)?;
                if x < 0.0 || x.fract() != 0.0 || x > u64::MAX as f64 {
                    return Err(Error::Config(format!(
                        "`{key}` must be a non-negative integer"
                    )));
                }
                Ok(Some(x as u64))
            }
        }
    }

    fn u32(&self, key: &str) -> Result<Option<u32>> {
        match self.u64(key)? {
            None => Ok(None),
            Some(x) => u32::try_from(x)
                .map(Some)
                .map_err(|_| Error::Config(format!("`{key}` is out of range"))),
        }
    }

    fn str(&self, key: &str) -> Result<Option<&str>> {
        match self.get(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s)),
            Some(other) => Err(Error::Config(format!(
                "`{key}` must be a string, got {other}"
            ))),
        }
    }

    fn list(&self, key: &str) -> Result<Option<Vec<f64>>> {
        match self.get(key) {
            None => Ok(None),
            Some(Value::Array(items)) => {
                let xs = items
                    .iter()
                    .map(|v| as_f64(key, v))
                    .collect::<Result<Vec<_>>>()?;
                if xs.is_empty() {
                    return Err(Error::Config(format!("`{key}` must not be empty")));
                }
                Ok(Some(xs))
            }
            Some(v) => Ok(Some(vec![as_f64(key, v)?])),
        }
    }

    fn require<T>(&self, key: &str, v: Option<T>) -> Result<T> {
        v.ok_or_else(|| Error::Config(format!("missing required key `{key}`")))
    }
}

fn as_f64(key: &str, v: &Value) -> Result<f64> {
    match v {
        Value::Number(n) => n.as_f64(),
        Value::String(s) => s.trim().parse().ok(),
        _ => None,
    }
    .ok_or_else(|| Error::Config(format!("`{key}` must be a number, got {v}")))
}

fn parse_scheme(key: &str, s: &str) -> Result<SchemeKind> {
    SchemeKind::parse(s).ok_or_else(|| Error::Config(format!("`{key}`: unknown scheme `{s}`")))
}

fn parse_memory_kind(key: &str, s: &str) -> Result<MemoryKind> {
    MemoryKind::parse(s).ok_or_else(|| Error::Config(format!("`{key}`: unknown memory kind `{s}`")))
}

/// A scenario resolved into concrete sweep inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedScenario {
    /// One template per plotted series, ordered by scheme.
    pub series: Vec<SchemeConfig>,
    pub distances_km: Vec<f64>,
    pub p_m_values: Vec<f64>,
    pub mc: McControls,
}

impl FlatConfig {
    pub fn resolve(&self) -> Result<ResolvedScenario> {
        let scheme_str = self.require("scheme", self.str("scheme")?)?;
        let kind = parse_scheme("scheme", scheme_str)?;
        let distances_km = self.require("L_km", self.list("L_km")?)?;
        let p_m_values = self.require("p_m", self.list("p_m")?)?;

        let mut link = LinkParams::with_distance(distances_km[0]);
        if let Some(v) = self.f64("L_att_km")? {
            link.attenuation_length_km = v;
        }
        if let Some(v) = self.f64("n")? {
            link.refractive_index = v;
        }
        if let Some(v) = self.f64("c_km_per_s")? {
            link.light_speed_km_per_s = v;
        }
        if let Some(v) = self.f64("p_d")? {
            link.detector_efficiency = v;
        }

        let memory = if kind.is_afc() {
            Memory::Afc(self.afc_spec()?)
        } else {
            Memory::SpinPhoton(self.spin_spec("memory.kind", "memory.N", true)?)
        };
        let sync = match self.u32("ms_sync_factor")? {
            None => MsSyncFactor::default(),
            Some(v) => MsSyncFactor::from_value(v)
                .ok_or_else(|| Error::Config("`ms_sync_factor` must be 1 or 2".into()))?,
        };

        let mut primary =
            SchemeConfig::new(kind, link, memory, p_m_values[0]).with_ms_sync_factor(sync);
        if let Some(n_a) = self.u32("N_A")? {
            if kind != SchemeKind::Sr {
                return Err(Error::Config("`N_A` only applies to the SR scheme".into()));
            }
            primary = primary.with_sender_memories(n_a);
        }
        let mut series = vec![primary];

        if let Some(s) = self.str("baseline.scheme")? {
            let bkind = parse_scheme("baseline.scheme", s)?;
            if bkind.is_afc() {
                return Err(Error::Config(
                    "`baseline.scheme` must be a spin-photon scheme".into(),
                ));
            }
            let mem = self.spin_spec("baseline.memory.kind", "baseline.memory.N", false)?;
            let baseline =
                SchemeConfig::spin(bkind, link, mem, p_m_values[0]).with_ms_sync_factor(sync);
            series.push(baseline);
        }
        for cfg in &series {
            cfg.validate()?;
        }
        series.sort_by_key(|c| c.kind);

        let default_rounds = if kind.is_afc() {
            DEFAULT_AFC_ROUNDS
        } else {
            DEFAULT_SPIN_ROUNDS
        };
        let sampling = match self.str("sampling")? {
            None => Sampling::default(),
            Some(s) => Sampling::parse(s)
                .ok_or_else(|| Error::Config(format!("`sampling`: unknown mode `{s}`")))?,
        };
        let mc = McControls {
            rounds: self.u64("rounds")?.unwrap_or(default_rounds),
            seed: self.u64("seed")?.unwrap_or(DEFAULT_SEED),
            sampling,
        };
        mc.validate()?;

        Ok(ResolvedScenario {
            series,
            distances_km,
            p_m_values,
            mc,
        })
    }

    fn spin_spec(
        &self,
        kind_key: &str,
        count_key: &str,
        field_overrides: bool,
    ) -> Result<MemorySpec> {
        let kind_str = self.require(kind_key, self.str(kind_key)?)?;
        let kind = parse_memory_kind(kind_key, kind_str)?;
        let mut mem = MemorySpec::preset(kind, self.u32(count_key)?.unwrap_or(3));
        if field_overrides {
            if let Some(v) = self.f64("memory.t_clock_s")? {
                mem.t_clock = v;
            }
            if let Some(v) = self.f64("memory.emission_fraction")? {
                mem.emission_fraction = v;
            }
            if let Some(v) = self.f64("memory.collection_efficiency")? {
                mem.collection_efficiency = v;
            }
        }
        Ok(mem)
    }

    fn afc_spec(&self) -> Result<AfcSpec> {
        let mut afc = match self.str("afc.preset")? {
            None | Some("realistic") => AfcSpec::realistic(),
            Some("optimistic") => AfcSpec::optimistic(),
            Some(other) => {
                return Err(Error::Config(format!(
                    "`afc.preset`: unknown preset `{other}`"
                )))
            }
        };
        if let Some(v) = self.u32("afc.N_AFC")? {
            afc.modes = v;
        }
        if let Some(v) = self.f64("afc.t_rephase_s")? {
            afc.t_rephase = v;
        }
        if let Some(v) = self.f64("afc.t_spin_coherence_s")? {
            afc.t_spin_coherence = v;
        }
        if let Some(v) = self.f64("afc.p_AFC")? {
            afc.p_afc = v;
        }
        if let Some(v) = self.f64("afc.p_pass")? {
            afc.p_pass = v;
        }
        if let Some(v) = self.f64("afc.t_clock_s")? {
            afc.t_clock = v;
        }
        Ok(afc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_is_rejected() {
        let err = FlatConfig::new().resolve().unwrap_err();
        assert_eq!(err, Error::Config("missing required key `scheme`".into()));
        assert!(err.is_config_error());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(FlatConfig::from_json_str(r#"{"Lkm": 3}"#).is_err());
        let mut cfg = FlatConfig::new();
        assert!(cfg.apply_override("bogus=1").is_err());
        assert!(cfg.apply_override("no_equals_sign").is_err());
    }

    #[test]
    fn overrides_parse_lists_and_strings() {
        let mut cfg = FlatConfig::new();
        cfg.apply_override("L_km=5,10,15").unwrap();
        cfg.apply_override("p_m=[1, 0.5]").unwrap();
        cfg.apply_override("scheme=AFC-MS").unwrap();
        cfg.apply_override("afc.N_AFC=7").unwrap();
        let r = cfg.resolve().unwrap();
        assert_eq!(r.distances_km, vec![5.0, 10.0, 15.0]);
        assert_eq!(r.p_m_values, vec![1.0, 0.5]);
        assert_eq!(r.series[0].kind, SchemeKind::AfcMs);
        assert_eq!(r.mc.rounds, DEFAULT_AFC_ROUNDS);
        match r.series[0].memory {
            Memory::Afc(a) => assert_eq!(a.modes, 7),
            _ => panic!(),
        }
    }

    #[test]
    fn malformed_values() {
        let cfg = FlatConfig::new()
            .with("scheme", "MM")
            .with("L_km", "ten")
            .with("p_m", 1.0)
            .with("memory.kind", "QD");
        assert!(matches!(cfg.resolve(), Err(Error::Config(_))));
        assert!(FlatConfig::from_json_str("[1, 2]").is_err());
        assert!(FlatConfig::from_json_str("{").is_err());

        let bad_p = FlatConfig::new()
            .with("scheme", "MM")
            .with("L_km", 10.0)
            .with("p_m", 1.0)
            .with("p_d", 1.5)
            .with("memory.kind", "QD");
        assert!(matches!(
            bad_p.resolve(),
            Err(Error::InvalidParameter { field: "p_d", .. })
        ));
    }
}
