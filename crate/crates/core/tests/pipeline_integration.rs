//! End-to-end in-memory run of the full modeling chain on a small synthetic
//! pool: train, cluster, localize, ensemble, evaluate.

use gridcast_core::clustering::build_hierarchy;
use gridcast_core::data::{split_by_time, subsample, AggregateType};
use gridcast_core::ensemble::{
    build_ensemble, collect_candidates, ensemble_forecast, rank_candidates, select_level_all,
    select_levels_best,
};
use gridcast_core::features::{extract_features, FEATURE_DIM};
use gridcast_core::localization::{localize_hierarchy, localized_predict};
use gridcast_core::metrics::{evaluate, SEASON};
use gridcast_core::model::{predict, ModelConfig};
use gridcast_core::synth::generate_synthetic;
use gridcast_core::training::{train_global, TrainConfig};
use ndarray::Array2;

#[test]
fn full_chain_preserves_the_dominance_ordering() {
    let set = generate_synthetic(31, 2, 7);
    let split = split_by_time(&set, 5, 1, 1, 336, 48).unwrap();
    let split = gridcast_core::data::DatasetSplit {
        train: subsample(&split.train, 6),
        ..split
    };

    let cfg = ModelConfig {
        n_blocks: 2,
        n_fc_layers: 2,
        width: 12,
        ..ModelConfig::default()
    };
    let tc = TrainConfig {
        max_epochs: 4,
        seed: 1,
        ..TrainConfig::global()
    };
    let (global, report) = train_global(&split, &cfg, &tc).unwrap();
    assert_eq!(report.epochs.len(), 4);

    let features = Array2::from_shape_vec(
        (set.len(), FEATURE_DIM),
        set.series()
            .iter()
            .flat_map(|s| extract_features(s, 5 * 336).unwrap().as_array())
            .collect(),
    )
    .unwrap();
    let hierarchy = build_hierarchy(&features, 4, 3, 0.05).unwrap();

    let ft = TrainConfig {
        max_epochs: 2,
        seed: 5,
        ..TrainConfig::fine_tune()
    };
    let store = localize_hierarchy(&global, &hierarchy, &split, &ft).unwrap();
    assert_eq!(store.n_localized(), 2 + 3 + 4);

    let candidates = collect_candidates(&store, &split.validation, &set, SEASON).unwrap();
    assert_eq!(candidates.len(), set.len());
    let level_all = select_level_all(&candidates).unwrap();
    let best = select_levels_best(&candidates);
    let selections: Vec<_> = candidates
        .iter()
        .map(|c| build_ensemble(c).unwrap())
        .collect();

    // Per-series validation errors obey ENS <= BEST <= ALL and
    // ENS <= global-only for every series.
    for ((c, &b), sel) in candidates.iter().zip(&best).zip(&selections) {
        let ens = sel.val_mase;
        let best_mase = c.levels[b].mase;
        let all_mase = c.levels[level_all].mase;
        let global_mase = c.levels[0].mase;
        assert!(ens <= best_mase + 1e-15, "{}: ens > best", c.id);
        assert!(best_mase <= all_mase, "{}: best > all", c.id);
        assert!(ens <= global_mase + 1e-15, "{}: ens > global", c.id);
        // The selection is a non-empty prefix of the ranking.
        let ranked = rank_candidates(c);
        assert_eq!(sel.levels[..], ranked[..sel.levels.len()]);
    }

    // Evaluating the ensemble forecasts on the test windows works and the
    // report covers every aggregate type.
    let f_ens = ensemble_forecast(&selections, &store, &split.test).unwrap();
    let r_ens = evaluate(&f_ens.view(), &split.test, &set, SEASON).unwrap();
    assert_eq!(r_ens.per_series.len(), set.len());
    assert_eq!(r_ens.group_mase.len(), 4);
    assert!(r_ens.overall_mase.is_finite());
    assert!(r_ens
        .group_mase
        .contains_key(&AggregateType::LargeTs));

    // Gated prediction at level 0 is exactly the global model's forecast.
    let via_store = localized_predict(&store, 0, &split.test).unwrap();
    assert_eq!(via_store, predict(&global, &split.test).unwrap());
}
