//! Flat `key = value` run configuration. Section headers and `#`/`;`
//! comments are ignored.

use std::collections::BTreeMap;
use std::path::Path;

use lgweak_core::{AnglesPi, ExperimentConfig};
use serde::{Deserialize, Serialize};

use crate::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub alpha: f64,
    pub gamma: f64,
    pub delta: f64,
    pub photons: u64,
    pub g_over_sigma: f64,
    pub pixels: usize,
    pub pitch_over_sigma: f64,
    pub dark_rate: f64,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            alpha: 0.233,
            gamma: 0.1,
            delta: 0.867,
            photons: 1_000_000,
            g_over_sigma: 0.1,
            pixels: 32,
            pitch_over_sigma: 12.0 / 32.0,
            dark_rate: 0.0,
            seed: 7,
        }
    }
}

const KEYS: [&str; 9] = [
    "alpha",
    "gamma",
    "delta",
    "photons",
    "g_over_sigma",
    "pixels",
    "pitch_over_sigma",
    "dark_rate",
    "seed",
];

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| CliError::Config(format!("cannot parse {key} = {value:?}")))
}

impl RunConfig {
    pub fn angles(&self) -> AnglesPi {
        AnglesPi {
            alpha: self.alpha,
            gamma: self.gamma,
            delta: self.delta,
        }
    }

    pub fn experiment(&self) -> ExperimentConfig {
        ExperimentConfig {
            angles: self.angles(),
            photons: self.photons,
            g_over_sigma: self.g_over_sigma,
            pixels: self.pixels,
            pitch_over_sigma: self.pitch_over_sigma,
            dark_rate: self.dark_rate,
            seed: self.seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.experiment()
            .validate()
            .map_err(|e| CliError::Config(e.to_string()))
    }

    /// Applies `key = value` pairs on top of `self`.
    pub fn apply_ini(mut self, text: &str) -> Result<Self> {
        let mut seen = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty()
                || line.starts_with('#')
                || line.starts_with(';')
                || line.starts_with('[')
            {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Config(format!("line {}: expected key = value", lineno + 1))
            })?;
            let (key, value) = (key.trim().replace('-', "_"), value.trim());
            if seen.insert(key.clone(), lineno).is_some() {
                return Err(CliError::Config(format!("duplicate key {key}")));
            }
            match key.as_str() {
                "alpha" => self.alpha = parse(&key, value)?,
                "gamma" => self.gamma = parse(&key, value)?,
                "delta" => self.delta = parse(&key, value)?,
                "photons" => self.photons = parse(&key, value)?,
                "g_over_sigma" => self.g_over_sigma = parse(&key, value)?,
                "pixels" => self.pixels = parse(&key, value)?,
                "pitch_over_sigma" => self.pitch_over_sigma = parse(&key, value)?,
                "dark_rate" => self.dark_rate = parse(&key, value)?,
                "seed" => self.seed = parse(&key, value)?,
                other => {
                    return Err(CliError::Config(format!(
                        "unknown key {other:?} (expected one of {})",
                        KEYS.join(", ")
                    )))
                }
            }
        }
        Ok(self)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::default().apply_ini(&text)
    }

    pub fn to_ini(&self) -> String {
        format!(
            "alpha = {}\ngamma = {}\ndelta = {}\nphotons = {}\ng_over_sigma = {}\npixels = {}\npitch_over_sigma = {}\ndark_rate = {}\nseed = {}\n",
            self.alpha,
            self.gamma,
            self.delta,
            self.photons,
            self.g_over_sigma,
            self.pixels,
            self.pitch_over_sigma,
            self.dark_rate,
            self.seed
        )
    }
}
