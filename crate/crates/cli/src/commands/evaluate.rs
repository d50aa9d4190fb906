use std::collections::BTreeMap;

use anyhow::{Context, Result};
use gridcast_core::data::WindowedDataset;
use gridcast_core::ensemble::{
    collect_candidates, ensemble_forecast, forecast_with_levels, rank_candidates, select_level_all,
};
use gridcast_core::localization::localized_predict;
use gridcast_core::metrics::{evaluate, naive_seasonal, EvalResult, SEASON};
use gridcast_core::model::predict;
use ndarray::Array2;

use super::{data_path, EvaluateArgs};
use crate::artifacts::{
    load_store, write_eval_csv, write_improvement_csv, write_per_horizon_csv, write_summary_csv,
    write_val_per_series_csv, read_json, SelectionsFile,
};
use crate::config::PipelineConfig;
use crate::layout;
use crate::pipeline::{check_series_ids, prepare};

/// Seasonal naive forecasts for every row of `d`.
pub(crate) fn naive_forecasts(
    d: &WindowedDataset,
    set: &gridcast_core::data::SeriesSet,
) -> Result<Array2<f64>> {
    let mut out = Array2::zeros((d.len(), d.h()));
    for row in 0..d.len() {
        let series = &set.series()[d.series_index[row]];
        let origin = series
            .index_of(d.target_start[row])
            .context("window origin off the series grid")?;
        let forecast = naive_seasonal(series, origin, d.h(), SEASON)?;
        for (j, v) in forecast.into_iter().enumerate() {
            out[[row, j]] = v;
        }
    }
    Ok(out)
}

pub fn cmd_evaluate(args: &EvaluateArgs) -> Result<()> {
    let cfg = PipelineConfig::load_pinned(&args.workdir)?;
    let data = data_path(&args.data, &args.workdir);
    let prepared = prepare(&data, &cfg)?;
    let (store, series_ids) = load_store(&args.workdir)?;
    check_series_ids(&prepared.set, &series_ids, "hierarchy")?;
    let selections: SelectionsFile = read_json(&layout::selections(&args.workdir))
        .context("run `gridcast ensemble` before `evaluate`")?;

    let set = &prepared.set;
    let d_val = &prepared.split.validation;
    let d_test = &prepared.split.test;

    // Validation-side candidate table drives the ALL/BEST level choices and
    // the per-series validation report.
    let candidates = collect_candidates(&store, d_val, set, SEASON)?;
    let level_all = select_level_all(&candidates)?;
    let best_levels: BTreeMap<usize, usize> = candidates
        .iter()
        .map(|c| (c.series_index, rank_candidates(c)[0]))
        .collect();

    let mut val_rows = Vec::new();
    for c in &candidates {
        let sel = selections
            .selections
            .iter()
            .find(|s| s.series_index == c.series_index)
            .with_context(|| format!("series {} missing from selections.json", c.id))?;
        let ens_mase = c.mean_mase(&sel.levels)?;
        val_rows.push((
            c.id.clone(),
            set.series()[c.series_index].aggregate_type.as_str(),
            c.levels[0].mase,
            c.levels[level_all].mase,
            c.levels[rank_candidates(c)[0]].mase,
            ens_mase,
        ));
    }
    write_val_per_series_csv(
        &layout::reports_dir(&args.workdir).join("val_per_series.csv"),
        &val_rows,
    )?;

    // Test-side forecasts per strategy.
    let f_global = predict(&store.global, d_test)?;
    let f_all = localized_predict(&store, level_all, d_test)?;
    let f_best = forecast_with_levels(&store, d_test, &best_levels)?;
    let f_ens = ensemble_forecast(&selections.selections, &store, d_test)?;
    let f_naive = naive_forecasts(d_test, set)?;

    let r_global = evaluate(&f_global.view(), d_test, set, SEASON)?;
    let r_all = evaluate(&f_all.view(), d_test, set, SEASON)?;
    let r_best = evaluate(&f_best.view(), d_test, set, SEASON)?;
    let r_ens = evaluate(&f_ens.view(), d_test, set, SEASON)?;
    let r_naive = evaluate(&f_naive.view(), d_test, set, SEASON)?;

    let reports = layout::reports_dir(&args.workdir);
    let strategies: [(&str, &EvalResult); 5] = [
        ("naive", &r_naive),
        ("global", &r_global),
        ("all", &r_all),
        ("best", &r_best),
        ("ens", &r_ens),
    ];
    for (name, result) in &strategies {
        write_eval_csv(&reports.join(format!("eval_{name}.csv")), result)?;
    }
    write_summary_csv(&reports.join("summary.csv"), &strategies)?;
    write_per_horizon_csv(&reports.join("per_horizon.csv"), &strategies)?;
    for (name, result) in [("all", &r_all), ("best", &r_best), ("ens", &r_ens)] {
        write_improvement_csv(
            &reports.join(format!("improvement_global_vs_{name}.csv")),
            "global",
            &r_global,
            name,
            result,
        )?;
    }

    println!("test MASE by strategy (ALL column is the overall mean):");
    for (name, result) in &strategies {
        println!(
            "  {:<7} single {:.4}  sTS {:.4}  mTS {:.4}  lTS {:.4}  all {:.4}",
            name,
            result.group_mase[&gridcast_core::data::AggregateType::Single],
            result.group_mase[&gridcast_core::data::AggregateType::SmallTs],
            result.group_mase[&gridcast_core::data::AggregateType::MediumTs],
            result.group_mase[&gridcast_core::data::AggregateType::LargeTs],
            result.overall_mase
        );
    }
    println!("reports -> {}", reports.display());
    Ok(())
}
