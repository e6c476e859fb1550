//! Experiment configuration files.
//!
//! One TOML file describes one experiment. An optional `[grid]` table maps
//! dotted field paths to value lists; the file then expands to one experiment
//! per cell of the cartesian product, in key order with the last key varying
//! fastest.
//!
//! ```toml
//! id = "gng-base"
//! seed = 7
//! output_dir = "out"
//!
//! [dataset]
//! interpolation_rounds = 0
//! [dataset.synthetic]
//! n_trajectories = 15
//! n_samples = 50
//!
//! [model]
//! kind = "gng"
//! runs = 4
//!
//! [reduction]
//! threshold = 10.0
//!
//! [[plans]]
//! start = [0.0, -90.0, 90.0, -90.0, -90.0, 0.0]
//! goal = [30.0, -60.0, 60.0, -90.0, -90.0, 0.0]
//!
//! [grid]
//! "model.blocked_steps" = [0, 2]
//! ```

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use sonn_core::dataset::{PresentationOrder, SyntheticSpec};
use sonn_core::models::{ModelError, ModelSpec};
use sonn_core::network::EdgeFilter;
use sonn_core::JointConfig;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("`{path}`: {message}")]
    Field { path: String, message: String },
}

impl ConfigError {
    fn field(path: impl Into<String>, message: impl fmt::Display) -> Self {
        Self::Field { path: path.into(), message: message.to_string() }
    }

    /// Dotted path of the offending field, if the error is tied to one.
    pub fn path(&self) -> Option<&str> {
        match self {
            Self::Field { path, .. } => Some(path),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub id: String,
    pub seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    pub dataset: DatasetConfig,
    pub model: ModelSpec,
    #[serde(default)]
    pub reduction: ReductionConfig,
    #[serde(default)]
    pub metrics: MetricsConfig,
    #[serde(default)]
    pub plans: Vec<PlanQuery>,
    #[serde(default)]
    pub plot: PlotConfig,
    /// Directory relative paths are resolved against; the config file's directory.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("results")
}

/// Exactly one of `synthetic` and `path` must be given.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub synthetic: Option<SyntheticSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    /// Generator seed; defaults to the experiment seed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default)]
    pub interpolation_rounds: u32,
    #[serde(default)]
    pub order: PresentationOrder,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReductionConfig {
    pub enabled: bool,
    /// Chebyshev length limit in degrees.
    pub threshold: f64,
}

impl Default for ReductionConfig {
    fn default() -> Self {
        Self { enabled: true, threshold: 10.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MetricsConfig {
    /// Neuron pairs sampled for the C-measure; all pairs are used when there are fewer.
    pub cm_pairs: usize,
    pub coverage_radius: f64,
}

impl Default for MetricsConfig {
    fn default() -> Self {
        Self { cm_pairs: 100_000, coverage_radius: 10.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanQuery {
    pub start: JointConfig,
    pub goal: JointConfig,
    #[serde(default)]
    pub filter: EdgeFilter,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlotConfig {
    pub enabled: bool,
    pub joints: [usize; 3],
}

impl Default for PlotConfig {
    fn default() -> Self {
        Self { enabled: true, joints: [0, 1, 2] }
    }
}

impl ExperimentConfig {
    /// Checks everything serde cannot; errors name the offending field.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.id.is_empty() || !self.id.chars().all(|c| c.is_ascii_alphanumeric() || "-_.".contains(c)) {
            return Err(ConfigError::field("id", "must be non-empty and use only [A-Za-z0-9._-]"));
        }
        match (&self.dataset.synthetic, &self.dataset.path) {
            (Some(_), Some(_)) | (None, None) => {
                return Err(ConfigError::field("dataset", "give exactly one of `synthetic` and `path`"));
            }
            (None, Some(p)) => {
                let full = self.resolve(p);
                if !full.is_file() {
                    return Err(ConfigError::field("dataset.path", format!("{} is not a file", full.display())));
                }
            }
            (Some(_), None) => {}
        }
        if self.dataset.interpolation_rounds > 8 {
            return Err(ConfigError::field("dataset.interpolation_rounds", "at most 8 rounds"));
        }
        self.model.validate().map_err(|e| match e {
            ModelError::InvalidParam { field, reason } => ConfigError::field(format!("model.{field}"), reason),
            other => ConfigError::field("model", other),
        })?;
        if !(self.reduction.threshold.is_finite() && self.reduction.threshold > 0.0) {
            return Err(ConfigError::field("reduction.threshold", "must be positive"));
        }
        if self.metrics.cm_pairs == 0 {
            return Err(ConfigError::field("metrics.cm_pairs", "must be positive"));
        }
        if !(self.metrics.coverage_radius.is_finite() && self.metrics.coverage_radius >= 0.0) {
            return Err(ConfigError::field("metrics.coverage_radius", "must be non-negative"));
        }
        for (i, q) in self.plans.iter().enumerate() {
            if !q.start.is_finite() {
                return Err(ConfigError::field(format!("plans[{i}].start"), "angles must be finite"));
            }
            if !q.goal.is_finite() {
                return Err(ConfigError::field(format!("plans[{i}].goal"), "angles must be finite"));
            }
        }
        crate::export::check_joints(self.plot.joints).map_err(|e| ConfigError::field("plot.joints", e))?;
        Ok(())
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    /// Directory this experiment writes into.
    pub fn experiment_dir(&self) -> PathBuf {
        self.resolve(&self.output_dir).join(&self.id)
    }

    /// SHA-256 over the canonical JSON form, ignoring where outputs go.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.output_dir = PathBuf::new();
        let text = serde_json::to_string(&c).expect("config serializes");
        hex::encode(Sha256::digest(text.as_bytes()))
    }
}

/// Reads a config file and expands its grid.
pub fn load_experiments(path: impl AsRef<Path>) -> Result<Vec<ExperimentConfig>, ConfigError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    parse_experiments(&text, &base)
}

pub fn parse_experiments(text: &str, base_dir: &Path) -> Result<Vec<ExperimentConfig>, ConfigError> {
    let mut table: toml::Table = text.parse().map_err(|e: toml::de::Error| ConfigError::Syntax(e.to_string()))?;
    let grid = match table.remove("grid") {
        None => Vec::new(),
        Some(toml::Value::Table(g)) => g
            .into_iter()
            .map(|(key, values)| match values {
                toml::Value::Array(v) if !v.is_empty() => Ok((key, v)),
                _ => Err(ConfigError::field(format!("grid.{key}"), "must be a non-empty array")),
            })
            .collect::<Result<Vec<_>, _>>()?,
        Some(_) => return Err(ConfigError::field("grid", "must be a table")),
    };

    let cells: usize = grid.iter().map(|(_, v)| v.len()).product();
    let mut out = Vec::with_capacity(cells);
    for cell in 0..cells {
        let mut t = table.clone();
        let mut rest = cell;
        let mut picks = vec![0; grid.len()];
        for (k, (_, values)) in grid.iter().enumerate().rev() {
            picks[k] = rest % values.len();
            rest /= values.len();
        }
        for ((key, values), &pick) in grid.iter().zip(&picks) {
            set_path(&mut t, key, values[pick].clone())?;
        }
        let mut config = from_table(t)?;
        if !grid.is_empty() {
            config.id = format!("{}-{cell:02}", config.id);
        }
        config.base_dir = base_dir.to_path_buf();
        config.validate()?;
        out.push(config);
    }
    Ok(out)
}

fn from_table(t: toml::Table) -> Result<ExperimentConfig, ConfigError> {
    serde_path_to_error::deserialize(toml::Value::Table(t)).map_err(|e| {
        let path = e.path().to_string();
        ConfigError::field(if path == "." { String::new() } else { path }, e.into_inner())
    })
}

fn set_path(t: &mut toml::Table, key: &str, value: toml::Value) -> Result<(), ConfigError> {
    let parts: Vec<&str> = key.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) || parts[0] == "grid" {
        return Err(ConfigError::field(format!("grid.{key}"), "not a valid field path"));
    }
    let mut at = t;
    for part in &parts[..parts.len() - 1] {
        let next = at.entry(part.to_string()).or_insert_with(|| toml::Value::Table(toml::Table::new()));
        at = match next {
            toml::Value::Table(inner) => inner,
            _ => return Err(ConfigError::field(format!("grid.{key}"), format!("`{part}` is not a table"))),
        };
    }
    at.insert(parts[parts.len() - 1].to_string(), value);
    Ok(())
}
