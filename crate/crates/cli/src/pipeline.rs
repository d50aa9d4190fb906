//! Shared dataset assembly used by every command after `generate`.

use std::path::Path;

use anyhow::{ensure, Context, Result};
use gridcast_core::data::{split_by_time_subsampled, DatasetSplit, SeriesSet, WEEK_STEPS};
use gridcast_core::features::{extract_features, FEATURE_DIM};
use ndarray::Array2;

use crate::config::PipelineConfig;
use crate::dataio::load_csv;

/// Dataset plus the derived split for one pipeline configuration.
pub struct Prepared {
    pub set: SeriesSet,
    pub split: DatasetSplit,
}

/// Loads the CSV and derives the train/validation/test datasets exactly as
/// `train-global` did (including the training subsample factor).
pub fn prepare(data: &Path, cfg: &PipelineConfig) -> Result<Prepared> {
    let set = load_csv(data)?;
    let split = split_by_time_subsampled(
        &set,
        cfg.split.train_weeks,
        cfg.split.val_weeks,
        cfg.split.test_weeks,
        cfg.model.lags,
        cfg.model.horizon,
        cfg.train.subsample,
    )
    .with_context(|| format!("splitting {}", data.display()))?;
    Ok(Prepared { set, split })
}

/// Raw training segment length in grid steps.
pub fn train_segment_len(cfg: &PipelineConfig) -> usize {
    cfg.split.train_weeks * WEEK_STEPS
}

/// Feature matrix over the training segment of every series.
pub fn feature_matrix(set: &SeriesSet, train_len: usize) -> Result<Array2<f64>> {
    let mut flat = Vec::with_capacity(set.len() * FEATURE_DIM);
    for series in set.series() {
        let fv = extract_features(series, train_len)
            .with_context(|| format!("extracting features of series {}", series.id))?;
        flat.extend_from_slice(&fv.as_array());
    }
    Ok(Array2::from_shape_vec((set.len(), FEATURE_DIM), flat).expect("shape matches"))
}

/// Checks that the artifact was built over the same series pool.
pub fn check_series_ids(set: &SeriesSet, recorded: &[String], artifact: &str) -> Result<()> {
    let current: Vec<&str> = set.series().iter().map(|s| s.id.as_str()).collect();
    ensure!(
        current.len() == recorded.len() && current.iter().zip(recorded).all(|(a, b)| a == b),
        "{artifact} was built over a different series pool; rerun the pipeline"
    );
    Ok(())
}
