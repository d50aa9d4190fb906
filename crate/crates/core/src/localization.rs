//! Per-cluster fine-tuning of the global model across the hierarchy.
//!
//! Every (level, cluster) job starts from a fresh copy of the original
//! global parameters and fine-tunes on the rows of its cluster's series
//! only. Jobs are mutually independent, so the store contents never depend
//! on execution order.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use ndarray::Array2;

use crate::clustering::ClusterHierarchy;
use crate::data::{DatasetSplit, WindowedDataset};
use crate::derive_seed;
use crate::model::{predict, ModelParams};
use crate::training::{fine_tune, TrainConfig, TrainReport};
use crate::{Error, Result};

/// The global model plus one fine-tuned model per (level, cluster).
#[derive(Debug, Clone)]
pub struct LocalizedModelStore {
    pub global: ModelParams,
    pub hierarchy: ClusterHierarchy,
    models: BTreeMap<(usize, usize), ModelParams>,
}

impl LocalizedModelStore {
    /// Assembles a store from independently computed parts, checking that
    /// every (level, cluster) slot of the hierarchy is filled with a
    /// config-compatible model.
    pub fn from_parts(
        global: ModelParams,
        hierarchy: ClusterHierarchy,
        models: BTreeMap<(usize, usize), ModelParams>,
    ) -> Result<LocalizedModelStore> {
        let mut expected = 0;
        for l in 1..=hierarchy.n_levels() {
            expected += l + 1;
            for i in 0..=l {
                match models.get(&(l, i)) {
                    None => return Err(Error::EmptyCluster { level: l, cluster: i }),
                    Some(m) if m.config != global.config => {
                        return Err(Error::Config("localized model config differs from global"))
                    }
                    _ => {}
                }
            }
        }
        if models.len() != expected {
            return Err(Error::Config("store holds models outside the hierarchy"));
        }
        Ok(LocalizedModelStore {
            global,
            hierarchy,
            models,
        })
    }

    /// Model used for cluster `i` at level `l`; level 0 is the global model.
    pub fn model(&self, level: usize, cluster: usize) -> Option<&ModelParams> {
        if level == 0 {
            (cluster == 0).then_some(&self.global)
        } else {
            self.models.get(&(level, cluster))
        }
    }

    pub fn models(&self) -> &BTreeMap<(usize, usize), ModelParams> {
        &self.models
    }

    /// Number of stored fine-tuned models (the global one excluded).
    pub fn n_localized(&self) -> usize {
        self.models.len()
    }

    /// Candidate forecast levels: 0 (global) through `C - 1`.
    pub fn n_candidate_levels(&self) -> usize {
        self.hierarchy.n_levels() + 1
    }
}

/// All (level, cluster) fine-tune jobs of a hierarchy, in deterministic
/// order.
pub fn localization_jobs(hierarchy: &ClusterHierarchy) -> Vec<(usize, usize)> {
    let mut jobs = Vec::new();
    for l in 1..=hierarchy.n_levels() {
        for i in 0..=l {
            jobs.push((l, i));
        }
    }
    jobs
}

/// Per-job training config: the base seed is re-derived per (level, cluster)
/// so results do not depend on job execution order.
pub fn job_config(tc: &TrainConfig, level: usize, cluster: usize) -> TrainConfig {
    TrainConfig {
        seed: derive_seed(tc.seed, 0x1000_0000 + (level as u64) * 4096 + cluster as u64),
        ..*tc
    }
}

/// Runs the single fine-tune job for cluster `cluster` at level `level`.
pub fn localize_one(
    global: &ModelParams,
    hierarchy: &ClusterHierarchy,
    data: &DatasetSplit,
    tc: &TrainConfig,
    level: usize,
    cluster: usize,
) -> Result<(ModelParams, TrainReport)> {
    let lvl = hierarchy
        .level(level)
        .ok_or(Error::Config("level outside the hierarchy"))?;
    check_series_coverage(hierarchy, data)?;
    let keep = |s: usize| lvl.assignments[s] == cluster;
    let sub = DatasetSplit {
        train: data.train.restrict_to_series(keep),
        validation: data.validation.restrict_to_series(keep),
        test: data.test.restrict_to_series(keep),
    };
    if sub.train.is_empty() {
        return Err(Error::EmptyCluster { level, cluster });
    }
    fine_tune(global, &sub, &job_config(tc, level, cluster))
}

fn check_series_coverage(hierarchy: &ClusterHierarchy, data: &DatasetSplit) -> Result<()> {
    let n = hierarchy.n_series();
    for d in [&data.train, &data.validation, &data.test] {
        if let Some(max) = d.max_series_index() {
            if max >= n {
                return Err(Error::UnknownSeries { index: max });
            }
        }
    }
    Ok(())
}

/// Fine-tunes the global model once per (level, cluster) of the hierarchy.
pub fn localize_hierarchy(
    global: &ModelParams,
    hierarchy: &ClusterHierarchy,
    data: &DatasetSplit,
    tc: &TrainConfig,
) -> Result<LocalizedModelStore> {
    let mut models = BTreeMap::new();
    for (l, i) in localization_jobs(hierarchy) {
        let (params, _) = localize_one(global, hierarchy, data, tc, l, i)?;
        models.insert((l, i), params);
    }
    LocalizedModelStore::from_parts(global.clone(), hierarchy.clone(), models)
}

/// Forecasts every row of `d` with the level-`level` model of the row's own
/// cluster (the gate selects exactly one model per row); level 0 uses the
/// global model.
pub fn localized_predict(
    store: &LocalizedModelStore,
    level: usize,
    d: &WindowedDataset,
) -> Result<Array2<f64>> {
    if level == 0 {
        return predict(&store.global, d);
    }
    let lvl = store
        .hierarchy
        .level(level)
        .ok_or(Error::Config("level outside the hierarchy"))?;
    let n = store.hierarchy.n_series();
    let mut out = Array2::zeros((d.len(), d.h()));
    for cluster in 0..lvl.n_clusters() {
        let rows: Vec<usize> = (0..d.len())
            .filter(|&r| {
                let s = d.series_index[r];
                s < n && lvl.assignments[s] == cluster
            })
            .collect();
        if rows.is_empty() {
            continue;
        }
        let model = store
            .model(level, cluster)
            .ok_or(Error::EmptyCluster { level, cluster })?;
        let sub = d.select_rows(&rows);
        let forecast = predict(model, &sub)?;
        for (local, &row) in rows.iter().enumerate() {
            out.row_mut(row).assign(&forecast.row(local));
        }
    }
    if let Some(bad) = d.series_index.iter().find(|&&s| s >= n) {
        return Err(Error::UnknownSeries { index: *bad });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clustering::build_hierarchy;
    use crate::data::split_by_time;
    use crate::features::extract_features;
    use crate::model::ModelConfig;
    use crate::synth::generate_synthetic;
    use crate::training::{train_global, validation_loss};
    use ndarray::Array2;

    fn setup(c: usize) -> (crate::data::SeriesSet, DatasetSplit, ClusterHierarchy, ModelParams) {
        let set = generate_synthetic(21, 2, 6);
        let split = split_by_time(&set, 4, 1, 1, 336, 48).unwrap();
        let features = Array2::from_shape_vec(
            (set.len(), crate::features::FEATURE_DIM),
            set.series()
                .iter()
                .flat_map(|s| extract_features(s, 4 * 336).unwrap().as_array())
                .collect(),
        )
        .unwrap();
        let hierarchy = build_hierarchy(&features, c, 1, 0.05).unwrap();
        let cfg = ModelConfig {
            n_blocks: 2,
            n_fc_layers: 2,
            width: 8,
            ..ModelConfig::default()
        };
        let tc = TrainConfig {
            max_epochs: 2,
            batch_size: 512,
            seed: 5,
            ..TrainConfig::global()
        };
        let (global, _) = train_global(&split, &cfg, &tc).unwrap();
        (set, split, hierarchy, global)
    }

    #[test]
    fn store_counts_follow_the_double_loop() {
        let (_, split, hierarchy, global) = setup(4);
        let tc = TrainConfig {
            max_epochs: 0,
            ..TrainConfig::fine_tune()
        };
        let store = localize_hierarchy(&global, &hierarchy, &split, &tc).unwrap();
        // 2 + 3 + 4 models for C = 4.
        assert_eq!(store.n_localized(), 9);
        assert_eq!(store.n_candidate_levels(), 4);

        // Frozen fine-tunes are bit-identical to the global model, and the
        // gated forecast at any level equals the global forecast.
        for params in store.models().values() {
            assert_eq!(params, &global);
        }
        let via_global = localized_predict(&store, 0, &split.validation).unwrap();
        assert_eq!(via_global, predict(&global, &split.validation).unwrap());
        for level in 1..=hierarchy.n_levels() {
            let gated = localized_predict(&store, level, &split.validation).unwrap();
            assert_eq!(gated, via_global);
        }
    }

    #[test]
    fn c_equals_two_stores_two_models() {
        let (_, split, hierarchy, global) = setup(2);
        let tc = TrainConfig {
            max_epochs: 0,
            ..TrainConfig::fine_tune()
        };
        let store = localize_hierarchy(&global, &hierarchy, &split, &tc).unwrap();
        assert_eq!(store.n_localized(), 2);
    }

    #[test]
    fn rows_use_their_own_clusters_model_exactly() {
        let (_, split, hierarchy, global) = setup(3);
        let tc = TrainConfig {
            max_epochs: 1,
            seed: 7,
            ..TrainConfig::fine_tune()
        };
        let store = localize_hierarchy(&global, &hierarchy, &split, &tc).unwrap();
        let level = 2;
        let gated = localized_predict(&store, level, &split.test).unwrap();
        let lvl = store.hierarchy.level(level).unwrap();
        for cluster in 0..lvl.n_clusters() {
            let rows = split
                .test
                .restrict_to_series(|s| lvl.assignments[s] == cluster);
            if rows.is_empty() {
                continue;
            }
            let direct = predict(store.model(level, cluster).unwrap(), &rows).unwrap();
            let mut direct_iter = direct.rows().into_iter();
            for r in 0..split.test.len() {
                if lvl.assignments[split.test.series_index[r]] == cluster {
                    assert_eq!(gated.row(r), direct_iter.next().unwrap());
                }
            }
        }
    }

    #[test]
    fn fine_tuned_models_never_regress_on_their_cluster() {
        let (_, split, hierarchy, global) = setup(3);
        let tc = TrainConfig {
            max_epochs: 2,
            seed: 13,
            ..TrainConfig::fine_tune()
        };
        let store = localize_hierarchy(&global, &hierarchy, &split, &tc).unwrap();
        for (&(l, i), params) in store.models() {
            let lvl = store.hierarchy.level(l).unwrap();
            let val = split
                .validation
                .restrict_to_series(|s| lvl.assignments[s] == i);
            let tuned = validation_loss(params, &val).unwrap();
            let base = validation_loss(&global, &val).unwrap();
            assert!(tuned <= base, "(l={l}, i={i}): {tuned} > {base}");
        }
    }

    #[test]
    fn unknown_series_is_rejected() {
        let (_, split, hierarchy, global) = setup(2);
        let tc = TrainConfig {
            max_epochs: 0,
            ..TrainConfig::fine_tune()
        };
        let store = localize_hierarchy(&global, &hierarchy, &split, &tc).unwrap();
        let mut bad = split.validation.clone();
        for s in bad.series_index.iter_mut() {
            *s += 100;
        }
        assert!(matches!(
            localized_predict(&store, 1, &bad),
            Err(Error::UnknownSeries { .. })
        ));
    }
}
