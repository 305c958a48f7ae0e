use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::HarnessError;
use crate::freqlock::{AtomArray, ClockModel, LockConfig};
use crate::pairspace::BobTarget;
use crate::qdyn::{PulseSwitch, TimeReversalPlan, SIGMA_WARN};
use crate::teleport::{Mode, ProtocolConfig, QuadratureShift};

pub const SCHEMA_VERSION: u32 = 1;

/// Full run configuration. Every field has a default, so `{}` is valid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub schema_version: u32,
    pub master_seed: u64,
    pub bso_scan: BsoScanConfig,
    pub ladder: LadderConfig,
    pub reversal: ReversalConfig,
    pub teleport: TeleportConfig,
    pub lock: LockSection,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            master_seed: 1,
            bso_scan: BsoScanConfig::default(),
            ladder: LadderConfig::default(),
            reversal: ReversalConfig::default(),
            teleport: TeleportConfig::default(),
            lock: LockSection::default(),
        }
    }
}

/// pi/2 pulses ending at a swept time `tau`, for several field phases.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BsoScanConfig {
    pub g0: f64,
    pub omega: f64,
    pub phases: Vec<f64>,
    /// Pulse start times per phase, spread over `periods` optical periods.
    pub tau_points: usize,
    pub periods: f64,
    pub switch: PulseSwitch,
}

impl Default for BsoScanConfig {
    fn default() -> Self {
        Self {
            g0: 0.05,
            omega: 1.0,
            phases: vec![0.0, PI / 8.0, PI / 4.0],
            tau_points: 64,
            periods: 1.0,
            switch: PulseSwitch::Adiabatic,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LadderConfig {
    pub g0: f64,
    pub omega: f64,
    pub phase: f64,
    pub t_end: f64,
    /// Largest truncation order in the table; rows run from 0.
    pub n_max: i64,
    pub switch: PulseSwitch,
}

impl Default for LadderConfig {
    fn default() -> Self {
        Self {
            g0: 0.2,
            omega: 1.0,
            phase: 0.0,
            t_end: 20.0,
            n_max: 5,
            switch: PulseSwitch::Sudden,
        }
    }
}

/// Forward/backward evolution for durations around `m pi / omega`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReversalConfig {
    pub m: u32,
    pub omega: f64,
    /// Optional explicit field strength; must equal `omega / (2m)`.
    pub g0: Option<f64>,
    pub phase: f64,
    pub t_points: usize,
    /// Sweep half-width in units of `pi / omega`.
    pub window: f64,
}

impl Default for ReversalConfig {
    fn default() -> Self {
        Self {
            m: 10,
            omega: 1.0,
            g0: None,
            phase: 0.0,
            t_points: 21,
            window: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TeleportConfig {
    pub pairs_x: u64,
    pub sigma: f64,
    pub phi: f64,
    pub chi: f64,
    pub omega: f64,
    pub m: u32,
    pub mode: Mode,
    pub quadrature_shift: QuadratureShift,
}

impl Default for TeleportConfig {
    fn default() -> Self {
        let p = ProtocolConfig::default();
        Self {
            pairs_x: p.pairs_x,
            sigma: p.sigma,
            phi: p.phi,
            chi: p.chi,
            omega: p.omega,
            m: p.m,
            mode: p.mode,
            quadrature_shift: QuadratureShift::default(),
        }
    }
}

impl TeleportConfig {
    pub fn protocol(&self, master_seed: u64) -> ProtocolConfig {
        ProtocolConfig {
            pairs_x: self.pairs_x,
            sigma: self.sigma,
            phi: self.phi,
            chi: self.chi,
            omega: self.omega,
            m: self.m,
            mode: self.mode,
            master_seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LockSection {
    /// Uniformly spaced atoms; ignored when `positions` is given.
    pub n_atoms: usize,
    pub positions: Option<Vec<f64>>,
    pub omega_a: f64,
    pub omega_b: f64,
    pub phase_offset_a: f64,
    pub phase_offset_b: f64,
    pub sigma: f64,
    pub scan_points: usize,
    pub trials_per_point: u64,
    pub gain: f64,
    pub rel_tol: f64,
    pub max_rounds: u32,
    pub target: BobTarget,
}

impl Default for LockSection {
    fn default() -> Self {
        let c = LockConfig::default();
        Self {
            n_atoms: c.array.len(),
            positions: None,
            omega_a: c.clock_a.omega,
            omega_b: c.clock_b.omega,
            phase_offset_a: c.clock_a.phase_offset,
            phase_offset_b: c.clock_b.phase_offset,
            sigma: c.sigma,
            scan_points: c.scan_points,
            trials_per_point: c.trials_per_point,
            gain: c.gain,
            rel_tol: c.rel_tol,
            max_rounds: c.max_rounds,
            target: c.target,
        }
    }
}

impl LockSection {
    pub fn lock_config(&self, master_seed: u64) -> crate::Result<LockConfig> {
        let array = match &self.positions {
            Some(p) => AtomArray::new(p.clone())?,
            None => AtomArray::uniform(self.n_atoms)?,
        };
        Ok(LockConfig {
            array,
            clock_a: ClockModel {
                omega: self.omega_a,
                phase_offset: self.phase_offset_a,
            },
            clock_b: ClockModel {
                omega: self.omega_b,
                phase_offset: self.phase_offset_b,
            },
            sigma: self.sigma,
            scan_points: self.scan_points,
            trials_per_point: self.trials_per_point,
            gain: self.gain,
            rel_tol: self.rel_tol,
            max_rounds: self.max_rounds,
            target: self.target,
            master_seed,
        })
    }
}

fn bad(key: &str, reason: impl Into<String>) -> HarnessError {
    HarnessError::Config {
        key: key.to_string(),
        reason: reason.into(),
    }
}

fn positive(key: &str, x: f64) -> Result<(), HarnessError> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(bad(key, format!("must be a finite number > 0, got {x}")))
    }
}

fn perturbative(key: &str, sigma: f64) -> Result<(), HarnessError> {
    if sigma.is_finite() && (0.0..SIGMA_WARN).contains(&sigma) {
        Ok(())
    } else {
        Err(bad(
            key,
            format!("sigma = g0/(4 omega) = {sigma} violates the perturbative bound sigma < 1/16"),
        ))
    }
}

/// Module-level error on a named key.
fn from_module(key: &str, e: crate::Error) -> HarnessError {
    match e {
        crate::Error::InvalidParameter { name, reason } => bad(&format!("{key}.{name}"), reason),
        other => bad(key, other.to_string()),
    }
}

impl Config {
    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(bad(
                "schema_version",
                format!(
                    "unsupported version {}, expected {SCHEMA_VERSION}",
                    self.schema_version
                ),
            ));
        }

        let s = &self.bso_scan;
        positive("bso_scan.omega", s.omega)?;
        positive("bso_scan.g0", s.g0)?;
        perturbative("bso_scan.g0", s.g0 / (4.0 * s.omega))?;
        positive("bso_scan.periods", s.periods)?;
        if s.tau_points == 0 {
            return Err(bad("bso_scan.tau_points", "must be at least 1"));
        }
        if s.phases.is_empty() || s.phases.iter().any(|p| !p.is_finite()) {
            return Err(bad("bso_scan.phases", "need at least one finite phase"));
        }

        let l = &self.ladder;
        positive("ladder.omega", l.omega)?;
        positive("ladder.g0", l.g0)?;
        perturbative("ladder.g0", l.g0 / (4.0 * l.omega))?;
        if !(l.t_end.is_finite() && l.t_end >= 0.0) {
            return Err(bad("ladder.t_end", "must be finite and >= 0"));
        }
        if l.n_max < 0 {
            return Err(bad("ladder.n_max", "must be >= 0"));
        }
        if !l.phase.is_finite() {
            return Err(bad("ladder.phase", "must be finite"));
        }

        let r = &self.reversal;
        let plan = TimeReversalPlan::new(r.m, r.omega).map_err(|e| from_module("reversal", e))?;
        if let Some(g0) = r.g0 {
            if (g0 - plan.g0).abs() > 1e-12 * plan.g0 {
                return Err(bad(
                    "reversal.g0",
                    format!(
                        "must equal omega/(2m) = {} for m = {}, got {g0}",
                        plan.g0, r.m
                    ),
                ));
            }
        }
        if r.t_points == 0 {
            return Err(bad("reversal.t_points", "must be at least 1"));
        }
        if !(r.window.is_finite() && r.window >= 0.0 && r.window < r.m as f64) {
            return Err(bad("reversal.window", "must satisfy 0 <= window < m"));
        }

        let t = &self.teleport;
        perturbative("teleport.sigma", t.sigma)?;
        t.protocol(self.master_seed)
            .validate()
            .map_err(|e| from_module("teleport", e))?;

        let k = &self.lock;
        perturbative("lock.sigma", k.sigma)?;
        k.lock_config(self.master_seed)
            .and_then(|c| c.validate())
            .map_err(|e| from_module("lock", e))?;
        Ok(())
    }
}

/// Sets `root[a][b]... = value` for a dotted key, creating objects on the way.
fn set_dotted(root: &mut Value, key: &str, value: Value) -> Result<(), HarnessError> {
    let parts: Vec<&str> = key.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(bad(key, "malformed key"));
    }
    let mut cur = root;
    for p in &parts[..parts.len() - 1] {
        let obj = cur
            .as_object_mut()
            .ok_or_else(|| bad(key, format!("`{p}` is not inside an object")))?;
        cur = obj
            .entry(p.to_string())
            .or_insert_with(|| Value::Object(Default::default()));
    }
    let obj = cur
        .as_object_mut()
        .ok_or_else(|| bad(key, "parent is not an object"))?;
    obj.insert(parts[parts.len() - 1].to_string(), value);
    Ok(())
}

/// Applies `key=value` overrides. Values parse as JSON, falling back to a plain string.
pub fn apply_overrides(root: &mut Value, overrides: &[String]) -> Result<(), HarnessError> {
    for item in overrides {
        let (key, raw) = item
            .split_once('=')
            .ok_or_else(|| bad(item, "override must look like key=value"))?;
        let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
        set_dotted(root, key.trim(), value)?;
    }
    Ok(())
}

/// Resolves a config from JSON text plus overrides.
///
/// A run manifest is accepted too; its `resolved_config` is used.
pub fn parse_config_str(
    text: &str,
    overrides: &[String],
    seed: Option<u64>,
) -> Result<Config, HarnessError> {
    let mut root: Value =
        serde_json::from_str(text).map_err(|e| bad("<document>", format!("invalid JSON: {e}")))?;
    if let Some(inner) = root.get("resolved_config") {
        root = inner.clone();
    }
    if !root.is_object() {
        return Err(bad("<document>", "top level must be a JSON object"));
    }
    apply_overrides(&mut root, overrides)?;
    if let Some(seed) = seed {
        set_dotted(&mut root, "master_seed", Value::from(seed))?;
    }
    let config: Config =
        serde_json::from_value(root).map_err(|e| bad("<document>", e.to_string()))?;
    config.validate()?;
    Ok(config)
}

pub fn parse_config(
    path: &Path,
    overrides: &[String],
    seed: Option<u64>,
) -> Result<Config, HarnessError> {
    let text = std::fs::read_to_string(path).map_err(|e| HarnessError::ConfigIo {
        path: path.to_path_buf(),
        source: e,
    })?;
    parse_config_str(&text, overrides, seed)
}
