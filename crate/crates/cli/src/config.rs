//! Pipeline configuration: defaults, optional TOML file, CLI overrides.
//!
//! Precedence is flags > file > defaults. `train-global` persists the
//! resolved configuration as `pipeline.json` in the workdir; later commands
//! read that file so every stage derives identical datasets.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use gridcast_core::model::ModelConfig;
use gridcast_core::training::{Schedule, TrainConfig};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default)]
pub struct ModelSection {
    pub width: usize,
    pub blocks: usize,
    pub layers: usize,
    pub lags: usize,
    pub horizon: usize,
}

impl Default for ModelSection {
    fn default() -> Self {
        ModelSection {
            width: 512,
            blocks: 3,
            layers: 3,
            lags: 336,
            horizon: 48,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default)]
pub struct SplitSection {
    pub train_weeks: usize,
    pub val_weeks: usize,
    pub test_weeks: usize,
}

impl Default for SplitSection {
    fn default() -> Self {
        SplitSection {
            train_weeks: 52,
            val_weeks: 12,
            test_weeks: 12,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default)]
pub struct TrainSection {
    pub lr: f64,
    pub lambda: f64,
    pub batch_size: usize,
    pub max_epochs: usize,
    pub patience: usize,
    pub min_delta: f64,
    pub seed: u64,
    pub subsample: usize,
}

impl Default for TrainSection {
    fn default() -> Self {
        TrainSection {
            lr: 1e-3,
            lambda: 1e-4,
            batch_size: 512,
            max_epochs: 100,
            patience: 5,
            min_delta: 1e-4,
            seed: 0,
            subsample: 1,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default)]
pub struct FineTuneSection {
    pub lr: f64,
    pub max_epochs: usize,
    pub patience: usize,
    pub min_delta: f64,
}

impl Default for FineTuneSection {
    fn default() -> Self {
        FineTuneSection {
            lr: 1e-4,
            max_epochs: 60,
            patience: 5,
            min_delta: 1e-4,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default)]
pub struct ClusterSection {
    pub clusters: usize,
    pub epsilon: f64,
    pub seed: u64,
}

impl Default for ClusterSection {
    fn default() -> Self {
        ClusterSection {
            clusters: 20,
            epsilon: 0.05,
            seed: 0,
        }
    }
}

/// Full pipeline configuration.
#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
#[serde(default)]
pub struct PipelineConfig {
    pub model: ModelSection,
    pub split: SplitSection,
    pub train: TrainSection,
    pub finetune: FineTuneSection,
    pub cluster: ClusterSection,
}

impl PipelineConfig {
    /// Defaults, optionally overlaid with a TOML file.
    pub fn load(config_file: Option<&Path>) -> Result<PipelineConfig> {
        match config_file {
            None => Ok(PipelineConfig::default()),
            Some(path) => {
                let text = fs::read_to_string(path)
                    .with_context(|| format!("reading config file {}", path.display()))?;
                toml::from_str(&text)
                    .with_context(|| format!("parsing config file {}", path.display()))
            }
        }
    }

    /// Reads the resolved configuration persisted by `train-global`.
    pub fn load_pinned(workdir: &Path) -> Result<PipelineConfig> {
        let path = crate::layout::pipeline_config(workdir);
        let text = fs::read_to_string(&path).with_context(|| {
            format!(
                "reading {} (run `gridcast train-global` first)",
                path.display()
            )
        })?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    /// Persists the resolved configuration into the workdir.
    pub fn store(&self, workdir: &Path) -> Result<()> {
        let path = crate::layout::pipeline_config(workdir);
        crate::artifacts::write_json(&path, self)
    }

    pub fn model_config(&self) -> ModelConfig {
        ModelConfig {
            n_blocks: self.model.blocks,
            n_fc_layers: self.model.layers,
            width: self.model.width,
            k: self.model.lags,
            h: self.model.horizon,
            cat_dim: gridcast_core::data::CALENDAR_DIM,
            share_weights: false,
        }
    }

    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            lambda: self.train.lambda,
            lr0: self.train.lr,
            schedule: Schedule::PlateauDecay,
            batch_size: self.train.batch_size,
            max_epochs: self.train.max_epochs,
            patience: self.train.patience,
            min_delta: self.train.min_delta,
            seed: self.train.seed,
        }
    }

    pub fn finetune_config(&self) -> TrainConfig {
        TrainConfig {
            lambda: self.train.lambda,
            lr0: self.finetune.lr,
            schedule: Schedule::StepDecay,
            batch_size: self.train.batch_size,
            max_epochs: self.finetune.max_epochs,
            patience: self.finetune.patience,
            min_delta: self.finetune.min_delta,
            seed: self.train.seed,
        }
    }
}
