use anyhow::Result;
use gridcast_core::ensemble::{build_ensemble, collect_candidates};
use gridcast_core::metrics::SEASON;

use super::{data_path, EnsembleArgs};
use crate::artifacts::{load_store, write_candidates_csv, write_json, SelectionsFile};
use crate::config::PipelineConfig;
use crate::layout;
use crate::pipeline::{check_series_ids, prepare};

pub fn cmd_ensemble(args: &EnsembleArgs) -> Result<()> {
    let cfg = PipelineConfig::load_pinned(&args.workdir)?;
    let data = data_path(&args.data, &args.workdir);
    let prepared = prepare(&data, &cfg)?;
    let (store, series_ids) = load_store(&args.workdir)?;
    check_series_ids(&prepared.set, &series_ids, "hierarchy")?;

    let candidates = collect_candidates(&store, &prepared.split.validation, &prepared.set, SEASON)?;
    let selections = candidates
        .iter()
        .map(build_ensemble)
        .collect::<gridcast_core::Result<Vec<_>>>()?;

    write_candidates_csv(
        &layout::reports_dir(&args.workdir).join("val_candidates.csv"),
        &prepared.set,
        &candidates,
    )?;
    write_json(
        &layout::selections(&args.workdir),
        &SelectionsFile {
            selections: selections.clone(),
        },
    )?;

    let sizes: Vec<usize> = selections.iter().map(|s| s.levels.len()).collect();
    let mean_size = sizes.iter().sum::<usize>() as f64 / sizes.len() as f64;
    println!(
        "built {} ensembles (mean size {:.2}) -> {}",
        selections.len(),
        mean_size,
        layout::selections(&args.workdir).display()
    );
    Ok(())
}
