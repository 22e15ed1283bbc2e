//! Flat `key=value` configuration files.
//!
//! Blank lines and `#` comments are ignored; a `#` after a value starts a
//! trailing comment. Missing keys keep their defaults, unknown keys are errors.

use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

use crate::error::ModelError;
use crate::penalty_solver::PenaltyConfig;
use crate::system_model::{SigmoidFit, SystemParams};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {reason}")]
    Syntax { line: usize, reason: String },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: key `{key}` given twice")]
    Duplicate { line: usize, key: String },
    #[error(transparent)]
    Invalid(#[from] ModelError),
}

/// Everything a run needs.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Config {
    pub system: SystemParams,
    pub fit: SigmoidFit,
    pub solver: PenaltyConfig,
}

pub const KEYS: [&str; 24] = [
    "D",
    "H",
    "rho0_db",
    "beta",
    "P_b",
    "P_r",
    "N0_dbm_hz",
    "W",
    "mu",
    "K",
    "a1",
    "a2",
    "c1",
    "c2",
    "eps_bar",
    "lambda0",
    "c",
    "nu",
    "eps1",
    "inner_tol",
    "max_inner",
    "max_outer",
    "alpha_floor",
    "lambda_floor",
];

impl Config {
    pub fn validate(&self) -> Result<(), ModelError> {
        self.system.validate()?;
        self.fit.validate()?;
        self.solver.validate()
    }

    fn get(&self, key: &str) -> f64 {
        let (s, f, c) = (&self.system, &self.fit, &self.solver);
        match key {
            "D" => s.distance,
            "H" => s.altitude,
            "rho0_db" => s.rho0_db,
            "beta" => s.path_loss_exp,
            "P_b" => s.bs_power,
            "P_r" => s.relay_power,
            "N0_dbm_hz" => s.noise_dbm_hz,
            "W" => s.bandwidth,
            "mu" => s.bits_per_word,
            "K" => f.symbols_per_word,
            "a1" => f.a1,
            "a2" => f.a2,
            "c1" => f.c1,
            "c2" => f.c2,
            "eps_bar" => f.min_similarity,
            "lambda0" => c.lambda0,
            "c" => c.shrink,
            "nu" => c.nu,
            "eps1" => c.eps1,
            "inner_tol" => c.inner_tol,
            "max_inner" => c.max_inner as f64,
            "max_outer" => c.max_outer as f64,
            "alpha_floor" => c.alpha_floor,
            "lambda_floor" => c.lambda_floor,
            _ => unreachable!("key list out of sync"),
        }
    }

    /// Sets `key`; `false` when the key is unknown.
    fn set(&mut self, key: &str, v: f64) -> Result<bool, String> {
        let count = |v: f64| -> Result<usize, String> {
            if v.fract() == 0.0 && v >= 0.0 && v <= u32::MAX as f64 {
                Ok(v as usize)
            } else {
                Err(format!("`{key}` must be a non-negative integer, got {v}"))
            }
        };
        let (s, f, c) = (&mut self.system, &mut self.fit, &mut self.solver);
        match key {
            "D" => s.distance = v,
            "H" => s.altitude = v,
            "rho0_db" => s.rho0_db = v,
            "beta" => s.path_loss_exp = v,
            "P_b" => s.bs_power = v,
            "P_r" => s.relay_power = v,
            "N0_dbm_hz" => s.noise_dbm_hz = v,
            "W" => s.bandwidth = v,
            "mu" => s.bits_per_word = v,
            "K" => f.symbols_per_word = v,
            "a1" => f.a1 = v,
            "a2" => f.a2 = v,
            "c1" => f.c1 = v,
            "c2" => f.c2 = v,
            "eps_bar" => f.min_similarity = v,
            "lambda0" => c.lambda0 = v,
            "c" => c.shrink = v,
            "nu" => c.nu = v,
            "eps1" => c.eps1 = v,
            "inner_tol" => c.inner_tol = v,
            "max_inner" => c.max_inner = count(v)?,
            "max_outer" => c.max_outer = count(v)?,
            "alpha_floor" => c.alpha_floor = v,
            "lambda_floor" => c.lambda_floor = v,
            _ => return Ok(false),
        }
        Ok(true)
    }

    /// Writes every key, one per line, in a form [`parse_config`] reads back exactly.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for key in KEYS {
            // `{:?}` prints the shortest string that parses back to the same f64
            let _ = writeln!(out, "{key}={:?}", self.get(key));
        }
        out
    }
}

pub fn parse_config(text: &str) -> Result<Config, ConfigError> {
    let mut cfg = Config::default();
    let mut seen: Vec<&str> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let Some((key, value)) = body.split_once('=') else {
            return Err(ConfigError::Syntax {
                line,
                reason: format!("expected key=value, got `{body}`"),
            });
        };
        let (key, value) = (key.trim(), value.trim());
        let v: f64 = value.parse().map_err(|_| ConfigError::Syntax {
            line,
            reason: format!("`{value}` is not a number"),
        })?;
        if seen.contains(&key) {
            return Err(ConfigError::Duplicate {
                line,
                key: key.to_string(),
            });
        }
        match cfg.set(key, v) {
            Ok(true) => seen.push(key),
            Ok(false) => {
                return Err(ConfigError::UnknownKey {
                    line,
                    key: key.to_string(),
                })
            }
            Err(reason) => return Err(ConfigError::Syntax { line, reason }),
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<Config, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_config(&text)
}
