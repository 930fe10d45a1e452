//! Flat `key = value` scenario files.
//!
//! ```text
//! # alignment first, then cancel the precession
//! name = combined
//! omega0 = 1e-5, 10, 0
//! plan = 20:alignment; 40:precession
//! t_end = 40
//! ```
//!
//! Keys: `name`, `omega0`, `t_end`, `dt`, `mr2`, `radius`, `inertia0`,
//! `attitude0`, `plan`, `gain`, `deadband`, `clamp_l`, `guard`, `sampling`,
//! `open_loop`. Missing keys keep the base scenario's values; the base is the
//! built-in scenario named by `name` when there is one.

use std::collections::HashMap;
use std::path::PathBuf;

use nalgebra::{Matrix3, Vector3};

use crate::dynamics::{DiskParams, InertiaState};
use crate::error::{Error, Result};
use crate::objectives::{ControlLawConfig, ObjectiveKind, SchedulePlan};
use crate::simulation::{builtin, ControlSampling, Scenario};

const KEYS: [&str; 15] = [
    "name",
    "omega0",
    "t_end",
    "dt",
    "mr2",
    "radius",
    "inertia0",
    "attitude0",
    "plan",
    "gain",
    "deadband",
    "clamp_l",
    "guard",
    "sampling",
    "open_loop",
];

/// Base for files whose `name` is not a built-in scenario.
pub fn default_scenario() -> Scenario {
    Scenario::new(
        "custom",
        Vector3::new(10.0, 4.0, 1.0),
        SchedulePlan::single(40.0, ObjectiveKind::Precession),
        40.0,
    )
}

/// Parses a scenario file.
pub fn parse_config(source: &str) -> Result<Scenario> {
    let entries = read_entries(source)?;
    let base = entries
        .get("name")
        .and_then(|(_, v)| builtin(v))
        .unwrap_or_else(default_scenario);
    apply_entries(base, &entries)
}

/// Parses `source` as overrides on top of `base`.
pub fn parse_config_onto(source: &str, base: Scenario) -> Result<Scenario> {
    let entries = read_entries(source)?;
    apply_entries(base, &entries)
}

type Entries = HashMap<String, (usize, String)>;

fn read_entries(source: &str) -> Result<Entries> {
    let mut entries = Entries::new();
    for (idx, raw) in source.lines().enumerate() {
        let line = idx + 1;
        let text = raw.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let (key, value) = text.split_once('=').ok_or_else(|| Error::ConfigLine {
            line,
            message: format!("expected key = value, got '{text}'"),
        })?;
        let key = key.trim().to_string();
        if !KEYS.contains(&key.as_str()) {
            return Err(Error::ConfigLine {
                line,
                message: format!("unknown key '{key}'"),
            });
        }
        if let Some((first, _)) = entries.get(&key) {
            return Err(Error::ConfigLine {
                line,
                message: format!("duplicate key '{key}' (first set on line {first})"),
            });
        }
        entries.insert(key, (line, value.trim().to_string()));
    }
    Ok(entries)
}

fn apply_entries(mut s: Scenario, entries: &Entries) -> Result<Scenario> {
    let at = |line: usize| {
        move |e: Error| Error::ConfigLine {
            line,
            message: strip(e),
        }
    };

    if let Some((_, v)) = entries.get("name") {
        s.name = v.clone();
    }
    if let Some((line, v)) = entries.get("omega0") {
        let w = numbers::<3>(v).map_err(at(*line))?;
        s.omega0 = Vector3::from(w);
    }
    if let Some((line, v)) = entries.get("dt") {
        s.dt = positive(v, "dt").map_err(at(*line))?;
    }
    if let Some((line, v)) = entries.get("t_end") {
        s.t_end = positive(v, "t_end").map_err(at(*line))?;
    }
    if let Some((line, v)) = entries.get("radius") {
        let r = positive(v, "radius").map_err(at(*line))?;
        s.params = DiskParams::with_mr2(s.params.mr2(), r).map_err(at(*line))?;
    }
    if let Some((line, v)) = entries.get("mr2") {
        let mr2 = positive(v, "mr2").map_err(at(*line))?;
        let rescaled = DiskParams::with_mr2(mr2, s.params.radius()).map_err(at(*line))?;
        // inertia left at the old rest value follows the new rest value
        if s.inertia0 == s.params.nominal_inertia() && !entries.contains_key("inertia0") {
            s.inertia0 = rescaled.nominal_inertia();
        }
        s.params = rescaled;
    }
    if let Some((line, v)) = entries.get("inertia0") {
        let [i2, i3] = numbers::<2>(v).map_err(at(*line))?;
        s.inertia0 = InertiaState::new(i2, i3).map_err(at(*line))?;
    }
    if let Some((line, v)) = entries.get("attitude0") {
        let m = numbers::<9>(v).map_err(at(*line))?;
        s.attitude0 = Matrix3::from_row_slice(&m);
    }
    if let Some((line, v)) = entries.get("plan") {
        s.plan = parse_plan(v).map_err(at(*line))?;
    }
    let mut gain = s.control.gain();
    let mut deadband = s.control.deadband_eps();
    if let Some((line, v)) = entries.get("gain") {
        gain = positive(v, "gain").map_err(at(*line))?;
    }
    if let Some((line, v)) = entries.get("deadband") {
        deadband = positive(v, "deadband").map_err(at(*line))?;
    }
    s.control = ControlLawConfig::new(deadband, gain)?;
    if let Some((line, v)) = entries.get("clamp_l") {
        s.clamp_l_to_radius = flag(v).map_err(at(*line))?;
    }
    if let Some((line, v)) = entries.get("guard") {
        s.descent_guard = flag(v).map_err(at(*line))?;
    }
    if let Some((line, v)) = entries.get("open_loop") {
        s.open_loop = flag(v).map_err(at(*line))?;
    }
    if let Some((line, v)) = entries.get("sampling") {
        s.sampling = v.parse::<ControlSampling>().map_err(at(*line))?;
    }

    if let Err(e) = s.validate() {
        // attribute cross-field errors to the most specific key present
        let line = ["t_end", "dt", "omega0", "attitude0"]
            .iter()
            .find_map(|k| entries.get(*k).map(|(l, _)| *l));
        return Err(match line {
            Some(line) => Error::ConfigLine {
                line,
                message: strip(e),
            },
            None => e,
        });
    }
    Ok(s)
}

fn strip(e: Error) -> String {
    match e {
        Error::Config(m) | Error::Domain(m) => m,
        other => other.to_string(),
    }
}

fn number(text: &str) -> Result<f64> {
    let t = text.trim();
    match t.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(Error::Config(format!("malformed number '{t}'"))),
    }
}

fn positive(text: &str, what: &str) -> Result<f64> {
    let v = number(text)?;
    if v > 0.0 {
        Ok(v)
    } else {
        Err(Error::Config(format!("{what} must be positive, got {v}")))
    }
}

fn numbers<const N: usize>(text: &str) -> Result<[f64; N]> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != N {
        return Err(Error::Config(format!(
            "expected {N} comma-separated numbers, got {}",
            parts.len()
        )));
    }
    let mut out = [0.0; N];
    for (slot, part) in out.iter_mut().zip(parts) {
        *slot = number(part)?;
    }
    Ok(out)
}

fn flag(text: &str) -> Result<bool> {
    match text.trim() {
        "true" | "1" | "yes" | "on" => Ok(true),
        "false" | "0" | "no" | "off" => Ok(false),
        other => Err(Error::Config(format!(
            "expected true or false, got '{other}'"
        ))),
    }
}

/// Parses `20:alignment;40:precession`.
pub fn parse_plan(text: &str) -> Result<SchedulePlan> {
    let mut segments = Vec::new();
    for part in text.split(';').map(str::trim).filter(|p| !p.is_empty()) {
        let (end, kind) = part
            .split_once(':')
            .ok_or_else(|| Error::Config(format!("plan segment '{part}' is not time:kind")))?;
        let end = number(end)?;
        if end <= 0.0 {
            return Err(Error::Config(format!(
                "segment end time must be positive, got {end}"
            )));
        }
        segments.push((end, kind.parse::<ObjectiveKind>()?));
    }
    SchedulePlan::new(segments)
}

fn join(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// Writes every field of `s` so that [`parse_config`] rebuilds it.
pub fn serialize_config(s: &Scenario) -> String {
    let plan = s
        .plan
        .segments()
        .iter()
        .map(|(end, kind)| format!("{end}:{kind}"))
        .collect::<Vec<_>>()
        .join(";");
    let attitude: Vec<f64> = s.attitude0.transpose().iter().copied().collect();
    let mut out = String::new();
    let mut put = |k: &str, v: String| {
        out.push_str(k);
        out.push_str(" = ");
        out.push_str(&v);
        out.push('\n');
    };
    put("name", s.name.clone());
    put("omega0", join(s.omega0.as_slice()));
    put("t_end", s.t_end.to_string());
    put("dt", s.dt.to_string());
    put("radius", s.params.radius().to_string());
    put("mr2", s.params.mr2().to_string());
    put("inertia0", join(&[s.inertia0.i2(), s.inertia0.i3()]));
    put("attitude0", join(&attitude));
    put("plan", plan);
    put("gain", s.control.gain().to_string());
    put("deadband", s.control.deadband_eps().to_string());
    put("clamp_l", s.clamp_l_to_radius.to_string());
    put("guard", s.descent_guard.to_string());
    put("sampling", s.sampling.name().to_string());
    put("open_loop", s.open_loop.to_string());
    out
}

/// Resolved command-line request for one or more runs.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunConfig {
    /// Built-in names or paths to scenario files; `all` expands to every
    /// built-in scenario.
    pub selectors: Vec<String>,
    /// Extra `key = value` lines applied after the selected scenario.
    pub overrides: Vec<(String, String)>,
    pub out_dir: PathBuf,
    pub plots: bool,
    pub include_attitude: bool,
}

impl RunConfig {
    /// Loads and validates every selected scenario with the overrides
    /// applied.
    pub fn scenarios(&self) -> Result<Vec<Scenario>> {
        let mut names = Vec::new();
        for sel in &self.selectors {
            if sel == "all" {
                names.extend(
                    crate::simulation::BUILTIN_NAMES
                        .iter()
                        .map(|n| n.to_string()),
                );
            } else {
                names.push(sel.clone());
            }
        }
        if names.is_empty() {
            return Err(Error::Config("no scenario selected".into()));
        }
        let overrides: String = self
            .overrides
            .iter()
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect();
        names
            .iter()
            .map(|sel| {
                let base = match builtin(sel) {
                    Some(s) => s,
                    None => {
                        let text = std::fs::read_to_string(sel).map_err(|e| {
                            Error::Config(format!(
                                "'{sel}' is neither a built-in scenario nor a readable file: {e}"
                            ))
                        })?;
                        parse_config(&text)?
                    }
                };
                parse_config_onto(&overrides, base).map_err(|e| match e {
                    Error::ConfigLine { message, .. } => {
                        Error::Config(format!("override: {message}"))
                    }
                    other => other,
                })
            })
            .collect()
    }
}
