//! Scenario presets, config loading, sweep execution and result emission.

pub mod config;
pub mod presets;

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{analytic_rate, round_time, trials_per_round, SchemeConfig, SchemeKind};
use crate::error::{Error, Result};
use crate::montecarlo::{run_point, McControls};
use crate::rng::sub_seed;

pub use config::{FlatConfig, ResolvedScenario};

pub const CSV_HEADER: &str =
    "scheme,L_km,p_m,analytic_rate,mc_rate,mc_stderr,K,t_round_s,feasible,seed";

/// One sweep point as emitted to CSV/JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub scheme: SchemeKind,
    #[serde(rename = "L_km")]
    pub distance_km: f64,
    pub p_m: f64,
    pub analytic_rate: f64,
    /// Empty for infeasible points and analytic-only runs.
    pub mc_rate: Option<f64>,
    pub mc_stderr: Option<f64>,
    #[serde(rename = "K")]
    pub trials: u64,
    pub t_round_s: f64,
    pub feasible: bool,
    pub seed: u64,
}

/// A named scenario with its resolved sweep inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub resolved: ResolvedScenario,
}

impl Scenario {
    /// Resolves a preset name or a path to a JSON config, then applies
    /// `key=value` overrides.
    pub fn load(name_or_path: &str, overrides: &[String]) -> Result<Self> {
        let (name, mut flat) = if presets::describe(name_or_path).is_some() {
            (name_or_path.to_string(), presets::preset(name_or_path)?)
        } else if name_or_path.ends_with(".json") || Path::new(name_or_path).is_file() {
            let file = FlatConfig::from_path(Path::new(name_or_path))?;
            let mut base = match file.get("preset") {
                None => presets::preset("custom")?,
                Some(serde_json::Value::String(p)) => presets::preset(p)?,
                Some(other) => {
                    return Err(Error::Config(format!(
                        "`preset` must be a string, got {other}"
                    )))
                }
            };
            base.merge(&file);
            (name_or_path.to_string(), base)
        } else {
            return Err(Error::UnknownPreset(name_or_path.to_string()));
        };
        for o in overrides {
            flat.apply_override(o)?;
        }
        Ok(Self {
            name,
            resolved: flat.resolve()?,
        })
    }

    /// Sweep points in row order: scheme, then distance, then p_m.
    pub fn points(&self) -> Vec<SchemeConfig> {
        let r = &self.resolved;
        r.series
            .iter()
            .flat_map(|tpl| {
                r.distances_km.iter().flat_map(move |&l| {
                    r.p_m_values
                        .iter()
                        .map(move |&p_m| tpl.with_distance(l).with_p_m(p_m))
                })
            })
            .collect()
    }

    pub fn mc(&self) -> McControls {
        self.resolved.mc
    }
}

fn base_row(cfg: &SchemeConfig, seed: u64, feasible: bool) -> Result<ResultRow> {
    Ok(ResultRow {
        scheme: cfg.kind,
        distance_km: cfg.link.distance_km,
        p_m: cfg.p_m,
        analytic_rate: analytic_rate(cfg)?,
        mc_rate: None,
        mc_stderr: None,
        trials: trials_per_round(cfg)?,
        t_round_s: round_time(cfg)?,
        feasible,
        seed,
    })
}

/// Runs the closed forms and the Monte Carlo estimate at every point. Point
/// `i` is simulated with `sub_seed(seed, i)`; infeasible AFC points are kept
/// with `feasible = false` and no Monte Carlo fields.
pub fn run(scenario: &Scenario) -> Result<Vec<ResultRow>> {
    let mc = scenario.mc();
    scenario
        .points()
        .into_par_iter()
        .enumerate()
        .map(|(i, cfg)| {
            let point = run_point(i, cfg, &mc)?;
            let mut row = base_row(&cfg, point.seed, point.feasible)?;
            if let Some(est) = point.estimate {
                row.mc_rate = Some(est.rate);
                row.mc_stderr = Some(est.stderr);
            }
            Ok(row)
        })
        .collect()
}

/// Closed forms only.
pub fn run_analytic(scenario: &Scenario) -> Result<Vec<ResultRow>> {
    let mc = scenario.mc();
    scenario
        .points()
        .iter()
        .enumerate()
        .map(|(i, cfg)| {
            let feasible = if cfg.kind.is_afc() {
                crate::analytic::feasibility_check(cfg)?.is_feasible()
            } else {
                true
            };
            base_row(cfg, sub_seed(mc.seed, i as u64), feasible)
        })
        .collect()
}

pub fn run_scenario(name_or_path: &str, overrides: &[String]) -> Result<Vec<ResultRow>> {
    run(&Scenario::load(name_or_path, overrides)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Some(Format::Csv),
            "json" => Some(Format::Json),
            _ => None,
        }
    }
}

/// Writes rows as CSV (fixed header, LF endings, shortest round-trip floats)
/// or as a JSON array of objects with the same keys.
pub fn write_rows<W: Write>(rows: &[ResultRow], format: Format, out: W) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::Config("no rows to emit".into()));
    }
    match format {
        Format::Csv => {
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(out);
            for row in rows {
                w.serialize(row).map_err(|e| Error::Io(e.to_string()))?;
            }
            w.flush()?;
        }
        Format::Json => {
            let mut out = out;
            serde_json::to_writer_pretty(&mut out, rows).map_err(|e| Error::Io(e.to_string()))?;
            out.write_all(b"\n")?;
        }
    }
    Ok(())
}

/// Emits to `destination`, or stdout when `None`.
pub fn emit(rows: &[ResultRow], format: Format, destination: Option<&Path>) -> Result<()> {
    match destination {
        Some(path) => {
            let file = std::fs::File::create(path)
                .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            let mut buf = std::io::BufWriter::new(file);
            write_rows(rows, format, &mut buf)?;
            buf.flush()?;
            Ok(())
        }
        None => write_rows(rows, format, std::io::stdout().lock()),
    }
}

/// Parses CSV written by [`write_rows`].
pub fn read_csv<R: std::io::Read>(input: R) -> Result<Vec<ResultRow>> {
    csv::Reader::from_reader(input)
        .deserialize()
        .collect::<std::result::Result<Vec<ResultRow>, _>>()
        .map_err(|e| Error::Io(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::Memory;

    #[test]
    fn fig2c_has_thirty_qd_rows() {
        let s = Scenario::load("fig2c", &[]).unwrap();
        let pts = s.points();
        assert_eq!(pts.len(), 30);
        assert!(pts.iter().all(|c| c.kind == SchemeKind::Mm));
        assert_eq!(s.mc().rounds, 100_000);
    }

    #[test]
    fn fig5c_carries_its_baseline() {
        let s = Scenario::load("fig5c", &[]).unwrap();
        let pts = s.points();
        assert_eq!(pts.len(), 60);
        assert_eq!(pts[0].kind, SchemeKind::Mm);
        assert_eq!(pts[59].kind, SchemeKind::AfcMm);
        match pts[0].memory {
            Memory::SpinPhoton(m) => assert_eq!(m.count, 1),
            _ => panic!(),
        }
    }

    #[test]
    fn unknown_preset() {
        assert_eq!(
            Scenario::load("fig9", &[]).unwrap_err(),
            Error::UnknownPreset("fig9".into())
        );
        assert!(Scenario::load("custom", &[]).unwrap_err().is_config_error());
    }

    #[test]
    fn empty_rows_are_not_emitted() {
        assert!(write_rows(&[], Format::Csv, Vec::new()).is_err());
    }
}
