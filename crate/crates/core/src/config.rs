//! The JSON run configuration read by `pwyw simulate` and `pwyw sweep`.
//!
//! ```json
//! {
//!   "population": { "size": 1000, "seed": 42, "v": {"kind": "uniform", "lo": 5, "hi": 15} },
//!   "strategies": [ { "cost_type": "sunk", "cost": 4, "provide_erp": true, "erp_level": 8 } ],
//!   "mode": { "kind": "literal", "literal_gain_fraction": 0.4 },
//!   "sweep": { "parameter": "erp_level", "grid": [4, 6, 8, 10], "strategy": 0 },
//!   "output": { "path": "results.csv", "format": "csv", "precision": 9 }
//! }
//! ```
//!
//! Everything except `population.size`, `population.seed` and the cells'
//! `cost_type` / `cost` has a default.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::experiments::{StrategyCell, SweepParameter};
use crate::game::BehaviorMode;
use crate::population::PopulationSpec;
use crate::report::DEFAULT_PRECISION;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub population: PopulationSpec,
    pub strategies: Vec<StrategyCell>,
    #[serde(default)]
    pub mode: BehaviorMode,
    #[serde(default)]
    pub sweep: Option<SweepConfig>,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub parameter: SweepParameter,
    pub grid: Vec<f64>,
    /// Index into `strategies` of the cell used as the template.
    #[serde(default)]
    pub strategy: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub path: PathBuf,
    pub format: OutputFormat,
    /// Significant decimal digits, 1 to 17.
    pub precision: u32,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            path: PathBuf::from("results.csv"),
            format: OutputFormat::Csv,
            precision: DEFAULT_PRECISION,
        }
    }
}

/// Why a configuration could not be used.
#[derive(Debug)]
pub enum ConfigError {
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    /// `path` is the JSON path of the offending field.
    Invalid {
        path: String,
        message: String,
    },
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Io { path, source } => write!(f, "cannot read {}: {source}", path.display()),
            ConfigError::Invalid { path, message } => write!(f, "invalid config at {path}: {message}"),
        }
    }
}

impl std::error::Error for ConfigError {}

fn invalid(path: impl Into<String>, message: impl fmt::Display) -> ConfigError {
    ConfigError::Invalid {
        path: path.into(),
        message: message.to_string(),
    }
}

/// Attaches the failing field name from a model error to `prefix`.
fn at(prefix: &str, err: ModelError) -> ConfigError {
    match &err {
        ModelError::Invalid { field, .. } => invalid(format!("{prefix}.{field}"), &err),
        _ => invalid(prefix, &err),
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let config: RunConfig = serde_path_to_error::deserialize(de).map_err(|err| {
            let path = err.path().to_string();
            let path = if path == "." {
                "$".to_string()
            } else {
                format!("$.{path}")
            };
            invalid(path, err.inner())
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.population.validate().map_err(|e| at("$.population", e))?;
        if self.strategies.is_empty() {
            return Err(invalid("$.strategies", ModelError::NoStrategies));
        }
        for (i, cell) in self.strategies.iter().enumerate() {
            cell.validate().map_err(|e| at(&format!("$.strategies[{i}]"), e))?;
        }
        self.mode.validate().map_err(|e| at("$.mode", e))?;
        if let Some(sweep) = &self.sweep {
            if sweep.grid.is_empty() {
                return Err(invalid("$.sweep.grid", ModelError::EmptyGrid));
            }
            for (j, &x) in sweep.grid.iter().enumerate() {
                sweep
                    .parameter
                    .validate_value(x)
                    .map_err(|e| invalid(format!("$.sweep.grid[{j}]"), e))?;
            }
            if sweep.strategy >= self.strategies.len() {
                return Err(invalid(
                    "$.sweep.strategy",
                    format!("index {} but only {} strategies", sweep.strategy, self.strategies.len()),
                ));
            }
        }
        if !(1..=17).contains(&self.output.precision) {
            return Err(invalid(
                "$.output.precision",
                format!("{} is outside [1, 17]", self.output.precision),
            ));
        }
        Ok(())
    }

    /// Behavior mode with the population's belief rule applied.
    pub fn effective_mode(&self) -> BehaviorMode {
        match self.mode {
            BehaviorMode::FsModel(mut settings) => {
                settings.believed_cost = self.population.believed_cost_rule;
                BehaviorMode::FsModel(settings)
            }
            literal => literal,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{BelievedCost, FsSettings};
    use crate::optimizer::Representative;

    const MINIMAL: &str = r#"{
        "population": {"size": 10, "seed": 1},
        "strategies": [{"cost_type": "recoverable", "cost": 4}]
    }"#;

    fn error_path(text: &str) -> String {
        match RunConfig::from_json(text).unwrap_err() {
            ConfigError::Invalid { path, .. } => path,
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn minimal_config_gets_defaults() {
        let config = RunConfig::from_json(MINIMAL).unwrap();
        assert_eq!(config.output, OutputConfig::default());
        assert_eq!(config.mode, BehaviorMode::default());
        assert_eq!(config.population.free_rider_share, 0.0);
        assert!(config.sweep.is_none());
    }

    #[test]
    fn seed_is_required() {
        let text = r#"{"population": {"size": 10}, "strategies": [{"cost_type": "sunk", "cost": 4}]}"#;
        assert_eq!(error_path(text), "$.population");
    }

    #[test]
    fn errors_name_the_offending_field() {
        let text = MINIMAL.replace(r#""cost": 4"#, r#""cost": -4"#);
        assert_eq!(error_path(&text), "$.strategies[0].cost");
        let text = MINIMAL.replace(
            r#""seed": 1"#,
            r#""seed": 1, "beta": {"kind": "constant", "value": 1.5}"#,
        );
        assert_eq!(error_path(&text), "$.population.beta");
        let text = MINIMAL.replace(r#""cost_type": "recoverable""#, r#""cost_type": "maybe""#);
        assert_eq!(error_path(&text), "$.strategies[0].cost_type");
        let text = MINIMAL.replace("}]", r#"}], "output": {"precision": 0}"#);
        assert_eq!(error_path(&text), "$.output.precision");
        let text = MINIMAL.replace("}]", r#"}], "sweep": {"parameter": "lambda", "grid": []}"#);
        assert_eq!(error_path(&text), "$.sweep.grid");
        let text = MINIMAL.replace("}]", r#"}], "sweep": {"parameter": "lambda", "grid": [0.5, 2]}"#);
        assert_eq!(error_path(&text), "$.sweep.grid[1]");
        let text = MINIMAL.replace(
            r#""strategies": [{"cost_type": "recoverable", "cost": 4}]"#,
            r#""strategies": []"#,
        );
        assert_eq!(error_path(&text), "$.strategies");
    }

    #[test]
    fn fs_mode_takes_belief_from_population() {
        let text = MINIMAL.replace(
            r#""seed": 1}"#,
            r#""seed": 1, "believed_cost_rule": {"kind": "fixed", "value": 2.5}}, "mode": {"kind": "fs_model", "representative": "lower"}"#,
        );
        let config = RunConfig::from_json(&text).unwrap();
        assert_eq!(
            config.effective_mode(),
            BehaviorMode::FsModel(FsSettings {
                believed_cost: BelievedCost::Fixed(2.5),
                representative: Representative::Lower,
                ..FsSettings::default()
            })
        );
        let bare = MINIMAL.replace("}]", r#"}], "mode": {"kind": "fs_model"}"#);
        assert!(matches!(
            RunConfig::from_json(&bare).unwrap().mode,
            BehaviorMode::FsModel(_)
        ));
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let text = MINIMAL.replace(r#""seed": 1"#, r#""seed": 1, "sise": 3"#);
        assert_eq!(error_path(&text), "$.population.sise");
    }
}
