//! Flat `key = value` configuration files.
//!
//! One setting per line, SI units, `#` starts a comment. Unknown keys are
//! errors so that typos do not silently fall back to defaults.

use std::fs;
use std::path::Path;

use ctnoma_core::model::dbm_per_hz_to_w;
use thiserror::Error;

use crate::sweep::{Protocol, SweepSpec, SweepVariable};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("line {line}: {reason}")]
    Syntax { line: usize, reason: String },
    #[error("line {line}: `{key}`: {reason}")]
    Value {
        line: usize,
        key: String,
        reason: String,
    },
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConfigFile {
    /// `(line, key, value)` in file order.
    pub entries: Vec<(usize, String, String)>,
}

pub fn parse_config(text: &str) -> Result<ConfigFile, ConfigError> {
    let mut entries = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| ConfigError::Syntax {
            line,
            reason: format!("expected `key = value`, got `{content}`"),
        })?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() || value.is_empty() {
            return Err(ConfigError::Syntax {
                line,
                reason: "empty key or value".into(),
            });
        }
        entries.push((line, key.to_string(), value.to_string()));
    }
    Ok(ConfigFile { entries })
}

pub fn read_config(path: &Path) -> Result<ConfigFile, ConfigError> {
    let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_config(&text)
}

pub fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>, String>
where
    T::Err: std::fmt::Display,
{
    s.split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(|x| x.parse::<T>().map_err(|e| format!("`{x}`: {e}")))
        .collect()
}

impl ConfigFile {
    fn value_of(&self, key: &str) -> Option<&(usize, String, String)> {
        self.entries.iter().rev().find(|(_, k, _)| k == key)
    }

    /// The `sweep` entry, if present.
    pub fn sweep_variable(&self) -> Result<Option<SweepVariable>, ConfigError> {
        self.value_of("sweep")
            .map(|(line, key, v)| {
                v.parse().map_err(|reason| ConfigError::Value {
                    line: *line,
                    key: key.clone(),
                    reason,
                })
            })
            .transpose()
    }

    /// Applies every entry except `sweep` to `spec`.
    pub fn apply(&self, spec: &mut SweepSpec) -> Result<(), ConfigError> {
        for (line, key, value) in &self.entries {
            let err = |reason: String| ConfigError::Value {
                line: *line,
                key: key.clone(),
                reason,
            };
            let real = || value.parse::<f64>().map_err(|e| err(e.to_string()));
            let b = &mut spec.base;
            match key.as_str() {
                "sweep" => {}
                "values" => spec.values = parse_list(value).map_err(err)?,
                "trials" => spec.trials = value.parse().map_err(|e: std::num::ParseIntError| err(e.to_string()))?,
                "seed" => spec.seed = value.parse().map_err(|e: std::num::ParseIntError| err(e.to_string()))?,
                "protocols" => spec.protocols = parse_list::<Protocol>(value).map_err(err)?,
                "tol_s" | "tol" => spec.tol_s = real()?,
                "num_users" => b.num_users = value.parse().map_err(|e: std::num::ParseIntError| err(e.to_string()))?,
                "bandwidth_hz" => b.bandwidth_hz = real()?,
                "noise_psd_w_per_hz" => b.noise_psd_w_per_hz = real()?,
                "noise_psd_dbm_per_hz" => b.noise_psd_w_per_hz = dbm_per_hz_to_w(real()?),
                "payload_bits" => b.payload_bits = real()?,
                "max_energy_j" => b.max_energy_j = real()?,
                "hardware_coeff" => b.hardware_coeff = real()?,
                "data_samples" => b.data_samples = real()?,
                "max_cpu_hz" => b.max_cpu_hz = real()?,
                "cycles_min" => b.cycles_min = real()?,
                "cycles_max" => b.cycles_max = real()?,
                "distance_min_m" => b.distance_min_m = real()?,
                "distance_max_m" => b.distance_max_m = real()?,
                _ => return Err(err("unknown key".into())),
            }
        }
        let b = &spec.base;
        if !(b.cycles_min <= b.cycles_max) || !(b.distance_min_m <= b.distance_max_m) {
            return Err(ConfigError::Syntax {
                line: 0,
                reason: "range minimum exceeds maximum".into(),
            });
        }
        Ok(())
    }
}
