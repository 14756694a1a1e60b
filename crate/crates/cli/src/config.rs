//! Run configuration: one flat set of keys shared by all subcommands.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use magicforge::ideal_map::{DEFAULT_MAX_ROUNDS, DEFAULT_RADIUS_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ThresholdMode {
    OnAxis,
    OffAxis,
    Noisy,
}

/// Every tunable parameter. Unset keys in a config file take these defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Cartesian input state; takes precedence over plane coordinates.
    pub x: Option<f64>,
    pub y: Option<f64>,
    pub z: Option<f64>,
    /// Plane coordinates of the input state, or the plane of a basin/gain grid.
    pub fidelity: Option<f64>,
    pub r: f64,
    pub theta: f64,
    pub rounds: usize,
    pub radius_tol: f64,
    /// Input states up to this far outside the ball are projected onto it.
    pub input_tol: f64,
    /// Average gate errors for `iterate` and noisy thresholds.
    pub e1: f64,
    pub e2: f64,
    pub nr: usize,
    pub ntheta: usize,
    /// Largest grid radius; the in-ball maximum of the plane when unset.
    pub r_max: Option<f64>,
    pub mode: ThresholdMode,
    /// Noise settings of the fidelity curves, paired by index.
    pub curve_e1: Vec<f64>,
    pub curve_e2: Vec<f64>,
    pub curve_f_min: f64,
    pub curve_f_max: f64,
    pub curve_f_step: f64,
    /// Gate error E = E₁ = E₂ of the faulty cost branch.
    pub cost_e: f64,
    pub target: f64,
    pub ft_overhead: f64,
    pub include_one_qubit: bool,
    pub cost_f_min: f64,
    pub cost_f_max: f64,
    pub cost_f_step: f64,
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            x: None,
            y: None,
            z: None,
            fidelity: None,
            r: 0.0,
            theta: 0.0,
            rounds: DEFAULT_MAX_ROUNDS,
            radius_tol: DEFAULT_RADIUS_TOL,
            input_tol: 1e-3,
            e1: 0.0,
            e2: 0.0,
            nr: 101,
            ntheta: 180,
            r_max: None,
            mode: ThresholdMode::OnAxis,
            curve_e1: vec![1.3e-4, 1.3e-4, 4.7e-3],
            curve_e2: vec![4.7e-3, 1.3e-4, 4.7e-3],
            curve_f_min: 0.75,
            curve_f_max: 1.0,
            curve_f_step: 0.0025,
            cost_e: 0.001,
            target: 0.99,
            ft_overhead: 100.0,
            include_one_qubit: false,
            cost_f_min: 0.85,
            cost_f_max: 0.99,
            cost_f_step: 0.001,
            out: None,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("invalid config {path}: {source}")]
    Parse {
        path: PathBuf,
        source: toml::de::Error,
    },
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_owned(),
            source,
        })?;
        Self::from_toml(&text).map_err(|source| ConfigError::Parse {
            path: path.to_owned(),
            source,
        })
    }

    pub fn from_toml(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

/// Inclusive grid `min, min + step, …` up to `max` (within half a step).
pub fn linear_grid(min: f64, max: f64, step: f64) -> Option<Vec<f64>> {
    if !(step > 0.0 && min.is_finite() && max.is_finite() && max >= min) {
        return None;
    }
    let n = ((max - min) / step + 0.5).floor() as usize;
    Some((0..=n).map(|i| min + i as f64 * step).collect())
}
