//! JSON config files.
//!
//! ```json
//! {
//!   "system": { "queues": [
//!     { "arrival_rate": 0.8,
//!       "service": { "type": "exponential", "rate": 1.0 },
//!       "visit":   { "type": "exponential", "rate": 1.0 },
//!       "switch":  { "type": "deterministic", "value": 0.25 } },
//!     ...
//!   ] },
//!   "sim":      { "measured_cycles": 100000, "master_seed": 7 },
//!   "sweep":    { "queue": 2, "target": "visit_mean", "grid": { "from": 0.1, "to": 4, "points": 40 } },
//!   "optimize": { "n": [3, 0], "mode": "serial", "objective": "max" },
//!   "analyze":  { "s_grid": [0.1, 0.5, 1, 2] }
//! }
//! ```
//!
//! Only `system` is required. Unknown keys are rejected everywhere.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optimizer::{Objective, TourMode, TourState};
use crate::simulator::SimConfig;
use crate::sweep::SweepConfig;
use crate::system::SystemSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub system: SystemSpec,
    #[serde(default)]
    pub sim: SimConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optimize: Option<OptimizeConfig>,
    #[serde(default)]
    pub analyze: AnalyzeConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizeConfig {
    /// Customers present at the start of the cycle, one entry per queue.
    pub n: Vec<u64>,
    #[serde(default)]
    pub mode: TourMode,
    #[serde(default)]
    pub objective: Objective,
}

impl OptimizeConfig {
    pub fn state(&self) -> TourState {
        TourState {
            n: self.n.clone(),
            mode: self.mode,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalyzeConfig {
    /// Points at which sojourn transforms are reported.
    pub s_grid: Vec<f64>,
}

impl Default for AnalyzeConfig {
    fn default() -> Self {
        Self {
            s_grid: vec![0.1, 0.5, 1.0, 2.0],
        }
    }
}

impl ConfigFile {
    pub fn new(system: SystemSpec) -> Self {
        Self {
            system,
            sim: SimConfig::default(),
            sweep: None,
            optimize: None,
            analyze: AnalyzeConfig::default(),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            Error::Config(format!(
                "{}{} (line {}, column {})",
                describe(&path),
                inner_message(&inner),
                inner.line(),
                inner.column()
            ))
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

fn inner_message(e: &serde_json::Error) -> String {
    // serde_json appends its own position; we print ours.
    let msg = e.to_string();
    match msg.rfind(" at line ") {
        Some(k) => msg[..k].to_string(),
        None => msg,
    }
}

/// `system.queues[1].service.type` becomes "queue 2, field service.type: ".
fn describe(path: &str) -> String {
    if path.is_empty() || path == "." {
        return String::new();
    }
    if let Some(rest) = path.strip_prefix("system.queues[") {
        if let Some((index, field)) = rest.split_once(']') {
            if let Ok(k) = index.parse::<usize>() {
                let field = field.trim_start_matches('.');
                return if field.is_empty() {
                    format!("queue {}: ", k + 1)
                } else {
                    format!("queue {}, field {field}: ", k + 1)
                };
            }
        }
    }
    format!("field {path}: ")
}
