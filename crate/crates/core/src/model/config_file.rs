//! `key = value` configuration files.
//!
//! Blank lines and lines starting with `#` are ignored. Keys absent from
//! the file keep the reference values; unknown or repeated keys are errors.

use std::path::{Path, PathBuf};

use super::{PhysicalParams, SimulationConfig};
use crate::{Error, Result};

pub const CONFIG_KEYS: [&str; 19] = [
    "rho",
    "alpha",
    "lambda",
    "mu",
    "rho1",
    "K",
    "gamma",
    "beta",
    "b",
    "rho3",
    "delta",
    "kappa",
    "L",
    "M",
    "dt",
    "T",
    "probes",
    "snapshot_stride",
    "output_dir",
];

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConfigFile {
    pub params: PhysicalParams,
    pub config: SimulationConfig,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        parse_config(&text)
    }

    /// Applies one `key = value` assignment.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        if let Some(slot) = self.params.field_mut(key) {
            *slot = parse_f64(key, value)?;
            return Ok(());
        }
        match key {
            "M" => self.config.elements = parse_usize(key, value)?,
            "dt" => self.config.dt = parse_f64(key, value)?,
            "T" => self.config.final_time = parse_f64(key, value)?,
            "probes" => {
                self.config.probes = if value.is_empty() {
                    Vec::new()
                } else {
                    value
                        .split(',')
                        .map(|p| parse_f64(key, p.trim()))
                        .collect::<Result<_>>()?
                }
            }
            "snapshot_stride" => self.config.snapshot_stride = parse_usize(key, value)?,
            "output_dir" => self.config.output_dir = PathBuf::from(value),
            _ => return Err(Error::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }
}

pub fn parse_config(text: &str) -> Result<ConfigFile> {
    let mut out = ConfigFile::default();
    let mut seen = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::Config(format!("line {}: expected `key = value`", lineno + 1))
        })?;
        let key = key.trim();
        if seen.contains(&key) {
            return Err(Error::Config(format!(
                "line {}: duplicate key `{key}`",
                lineno + 1
            )));
        }
        out.set(key, value)
            .map_err(|e| Error::Config(format!("line {}: {}", lineno + 1, strip(e))))?;
        seen.push(key);
    }
    Ok(out)
}

fn strip(e: Error) -> String {
    match e {
        Error::Config(msg) => msg,
        other => other.to_string(),
    }
}

fn parse_f64(key: &str, value: &str) -> Result<f64> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("`{key}`: cannot parse `{value}` as a number")))
}

fn parse_usize(key: &str, value: &str) -> Result<usize> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("`{key}`: cannot parse `{value}` as an integer")))
}
