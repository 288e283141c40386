//! Flat `key=value` run configuration.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use conductor_core::plancherel::Truncation;
use conductor_core::{ArchNormalization, ConductorConvention, NumberFieldSpec};

use crate::output::num;
use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub field: NumberFieldSpec,
    pub ramified: Option<u64>,
    pub convention: ConductorConvention,
    pub arch: ArchNormalization,
    pub truncation: Truncation,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            field: NumberFieldSpec::rationals(),
            ramified: None,
            convention: ConductorConvention::default(),
            arch: ArchNormalization::default(),
            truncation: Truncation::default(),
            format: Format::Csv,
            out: None,
            threads: None,
        }
    }
}

pub const KEYS: [&str; 14] = [
    "field", "ramified", "convention", "c_even", "c_odd", "c_ds", "pmax", "rmax", "nmax", "qtol", "cutoff", "format",
    "out", "threads",
];

fn positive_int(key: &str, value: &str) -> Result<u64, String> {
    let parsed = match value.parse::<u64>() {
        Ok(v) => v,
        Err(_) => {
            let f: f64 = value.parse().map_err(|_| format!("{key}: expected an integer, got {value:?}"))?;
            if f.fract() != 0.0 || !(0.0..=9.0e15).contains(&f) {
                return Err(format!("{key}: expected an integer, got {value:?}"));
            }
            f as u64
        }
    };
    if parsed == 0 {
        return Err(format!("{key}: must be positive, got {value}"));
    }
    Ok(parsed)
}

fn positive_real(key: &str, value: &str) -> Result<f64, String> {
    let v: f64 = value.parse().map_err(|_| format!("{key}: expected a number, got {value:?}"))?;
    if !(v.is_finite() && v > 0.0) {
        return Err(format!("{key}: must be positive, got {value}"));
    }
    Ok(v)
}

fn scale(key: &str, value: &str) -> Result<f64, String> {
    let v: f64 = value.parse().map_err(|_| format!("{key}: expected a number, got {value:?}"))?;
    if !(v.is_finite() && v >= 0.0) {
        return Err(format!("{key}: must be non-negative, got {value}"));
    }
    Ok(v)
}

impl RunConfig {
    /// Applies one setting. Errors name the key and the violated rule.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let value = value.trim();
        match key {
            "field" => self.field = value.parse().map_err(|e| format!("field: {e}"))?,
            "ramified" => self.ramified = Some(positive_int(key, value)?),
            "convention" => self.convention = value.parse().map_err(|e| format!("convention: {e}"))?,
            "c_even" => self.arch.c_even = scale(key, value)?,
            "c_odd" => self.arch.c_odd = scale(key, value)?,
            "c_ds" => self.arch.c_ds = scale(key, value)?,
            "pmax" => self.truncation.p_max = positive_int(key, value)?,
            "rmax" => self.truncation.r_max = positive_int(key, value)?,
            "nmax" => self.truncation.n_max = positive_int(key, value)?,
            "qtol" => self.truncation.quad_tolerance = positive_real(key, value)?,
            "cutoff" => self.truncation.cutoff = positive_real(key, value)?,
            "format" => {
                self.format = match value {
                    "csv" => Format::Csv,
                    "json" => Format::Json,
                    _ => return Err(format!("format: expected csv or json, got {value:?}")),
                }
            }
            "out" => self.out = Some(PathBuf::from(value)),
            "threads" => self.threads = Some(positive_int(key, value)? as usize),
            _ => return Err(format!("unknown key {key:?} (expected one of {})", KEYS.join(", "))),
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        let mut config = RunConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) =
                line.split_once('=').ok_or_else(|| format!("line {}: expected key=value, got {line:?}", i + 1))?;
            config.set(key.trim(), value).map_err(|e| format!("line {}: {e}", i + 1))?;
        }
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))?;
        RunConfig::parse(&text).map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))
    }

    /// Every parameter that can influence values, for output headers.
    /// The thread hint is left out because it never changes results.
    pub fn params(&self) -> BTreeMap<String, String> {
        let t = &self.truncation;
        let mut p = BTreeMap::new();
        p.insert("field".into(), self.field.to_string());
        p.insert("ramified".into(), self.ramified.map_or("none".into(), |q| q.to_string()));
        p.insert("convention".into(), self.convention.to_string());
        p.insert("c_even".into(), num(self.arch.c_even).to_string());
        p.insert("c_odd".into(), num(self.arch.c_odd).to_string());
        p.insert("c_ds".into(), num(self.arch.c_ds).to_string());
        p.insert("pmax".into(), t.p_max.to_string());
        p.insert("rmax".into(), t.r_max.to_string());
        p.insert("nmax".into(), t.n_max.to_string());
        p.insert("qtol".into(), num(t.quad_tolerance).to_string());
        p.insert("cutoff".into(), num(t.cutoff).to_string());
        p
    }
}
