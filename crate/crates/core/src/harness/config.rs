use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{sasakian_coeffs, ConnectionKind, FormCoefficients, Tolerance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Markdown,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "json" => Ok(OutputFormat::Json),
            "markdown" | "md" => Ok(OutputFormat::Markdown),
            other => Err(format!("unknown format `{other}` (json or markdown)")),
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputFormat::Json => "json",
            OutputFormat::Markdown => "markdown",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key=value`, found `{text}`")]
    Malformed { line: usize, text: String },

    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },

    #[error("invalid value for `{key}`: {reason}")]
    InvalidValue { key: String, reason: String },

    #[error("cannot read {path}: {reason}")]
    Io { path: String, reason: String },
}

fn invalid(key: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::InvalidValue {
        key: key.to_string(),
        reason: reason.into(),
    }
}

/// Everything a batch run needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    /// Half-dimensions `n`; the ambient space has dimension `2n + 1`.
    pub dims: Vec<usize>,
    pub seeds: Vec<u64>,
    pub samples: usize,
    pub tol: f64,
    pub kinds: Vec<ConnectionKind>,
    pub coefficient_sets: Vec<FormCoefficients>,
    pub budget: usize,
    pub cross_check_samples: usize,
    pub format: OutputFormat,
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

/// Generic, `f1 = f3`, three Sasakian cases, and one boundary set for each
/// of the two quadratic hypotheses.
pub fn default_coefficient_sets() -> Vec<FormCoefficients> {
    vec![
        FormCoefficients::new(1.0, 0.5, 0.25),
        FormCoefficients::new(1.0, 0.5, 1.0),
        sasakian_coeffs(-3.0),
        sasakian_coeffs(1.0),
        sasakian_coeffs(5.0),
        FormCoefficients::new(2.0, -1.0 / 3.0, 1.0),
        FormCoefficients::new(2.0, -1.0, 1.0),
    ]
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            dims: vec![2, 3, 4],
            seeds: vec![1, 2, 3],
            samples: 200,
            tol: Tolerance::DEFAULT.rel,
            kinds: ConnectionKind::ALL.to_vec(),
            coefficient_sets: default_coefficient_sets(),
            budget: crate::submanifold::DEFAULT_BUDGET,
            cross_check_samples: 1000,
            format: OutputFormat::Json,
            out: None,
        }
    }
}

fn list<T>(key: &str, value: &str, item: impl Fn(&str) -> Result<T, String>) -> Result<Vec<T>, ConfigError> {
    let out = value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| item(s).map_err(|r| invalid(key, r)))
        .collect::<Result<Vec<_>, _>>()?;
    if out.is_empty() {
        return Err(invalid(key, "empty list"));
    }
    Ok(out)
}

fn number<T: FromStr>(s: &str) -> Result<T, String> {
    s.parse().map_err(|_| format!("`{s}` is not a number"))
}

/// Real number, allowing a `p/q` fraction.
fn real(s: &str) -> Result<f64, String> {
    let v = match s.split_once('/') {
        Some((p, q)) => number::<f64>(p.trim())? / number::<f64>(q.trim())?,
        None => number::<f64>(s)?,
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{s}` is not finite"))
    }
}

/// `a,b,c;a,b,c;...`
fn coefficient_sets(key: &str, value: &str) -> Result<Vec<FormCoefficients>, ConfigError> {
    let mut out = Vec::new();
    for group in value.split(';').map(str::trim).filter(|g| !g.is_empty()) {
        let parts = list(key, group, real)?;
        if parts.len() != 3 {
            return Err(invalid(key, format!("`{group}` needs three entries f1,f2,f3")));
        }
        out.push(FormCoefficients::new(parts[0], parts[1], parts[2]));
    }
    if out.is_empty() {
        return Err(invalid(key, "empty list"));
    }
    Ok(out)
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.dims.is_empty() {
            return Err(invalid("dims", "empty list"));
        }
        if let Some(n) = self.dims.iter().find(|n| **n < 2) {
            return Err(invalid("dims", format!("n = {n} is below 2")));
        }
        if self.seeds.is_empty() {
            return Err(invalid("seeds", "empty list"));
        }
        if self.samples == 0 {
            return Err(invalid("samples", "must be at least 1"));
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(invalid("tol", "must be a positive real"));
        }
        if self.kinds.is_empty() {
            return Err(invalid("kinds", "empty list"));
        }
        if self.coefficient_sets.is_empty() {
            return Err(invalid("coeffs", "empty list"));
        }
        if self.cross_check_samples == 0 {
            return Err(invalid("cross_check_samples", "must be at least 1"));
        }
        Ok(())
    }

    pub fn tolerance(&self) -> Tolerance {
        Tolerance::new(self.tol)
    }

    /// Seeds `1..=count`.
    pub fn seed_battery(count: u64) -> Vec<u64> {
        (1..=count).collect()
    }

    /// Applies one `key=value` assignment; shared by the file parser and
    /// command-line overrides.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let value = value.trim();
        match key {
            "dims" => self.dims = list(key, value, number)?,
            "seeds" => self.seeds = list(key, value, number)?,
            "seed_battery" => {
                self.seeds = Self::seed_battery(number(value).map_err(|r| invalid(key, r))?)
            }
            "samples" => self.samples = number(value).map_err(|r| invalid(key, r))?,
            "tol" | "tolerance" => self.tol = real(value).map_err(|r| invalid(key, r))?,
            "kinds" => {
                self.kinds = if value == "all" {
                    ConnectionKind::ALL.to_vec()
                } else {
                    list(key, value, |s| s.parse::<ConnectionKind>().map_err(|e| e.to_string()))?
                }
            }
            "coeffs" => self.coefficient_sets = coefficient_sets(key, value)?,
            "sasakian" => {
                self.coefficient_sets = list(key, value, real)?
                    .into_iter()
                    .map(sasakian_coeffs)
                    .collect()
            }
            "budget" => self.budget = number(value).map_err(|r| invalid(key, r))?,
            "cross_check_samples" => {
                self.cross_check_samples = number(value).map_err(|r| invalid(key, r))?
            }
            "format" => self.format = value.parse().map_err(|r: String| invalid(key, r))?,
            "out" => self.out = Some(PathBuf::from(value)),
            _ => {
                return Err(ConfigError::UnknownKey {
                    line: 0,
                    key: key.to_string(),
                })
            }
        }
        Ok(())
    }
}

/// Parses a flat `key=value` document. Blank lines and `#` comments are
/// ignored; absent keys keep their defaults. `coeffs` and `sasakian` both
/// present append the Sasakian sets to the explicit ones.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut cfg = RunConfig::default();
    let mut explicit: Option<Vec<FormCoefficients>> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let Some((key, value)) = body.split_once('=') else {
            return Err(ConfigError::Malformed {
                line,
                text: raw.to_string(),
            });
        };
        let key = key.trim();
        if key.is_empty() {
            return Err(ConfigError::Malformed {
                line,
                text: raw.to_string(),
            });
        }
        cfg.set(key, value).map_err(|e| match e {
            ConfigError::UnknownKey { key, .. } => ConfigError::UnknownKey { line, key },
            other => other,
        })?;
        if key == "coeffs" || key == "sasakian" {
            let sets = explicit.get_or_insert_with(Vec::new);
            sets.extend(cfg.coefficient_sets.iter().copied());
        }
    }
    if let Some(sets) = explicit {
        cfg.coefficient_sets = sets;
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: &std::path::Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
        path: path.display().to_string(),
        reason: e.to_string(),
    })?;
    parse_config(&text)
}
