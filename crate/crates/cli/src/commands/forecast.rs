use std::collections::BTreeMap;

use anyhow::{Context, Result};
use gridcast_core::ensemble::{
    collect_candidates, ensemble_forecast, forecast_with_levels, rank_candidates, select_level_all,
};
use gridcast_core::localization::localized_predict;
use gridcast_core::metrics::SEASON;
use gridcast_core::model::predict;

use super::{data_path, ForecastArgs, SplitPart, Strategy};
use crate::artifacts::{load_store, read_json, SelectionsFile};
use crate::config::PipelineConfig;
use crate::layout;
use crate::model_io::read_model;
use crate::pipeline::prepare;

pub fn cmd_forecast(args: &ForecastArgs) -> Result<()> {
    let cfg = PipelineConfig::load_pinned(&args.workdir)?;
    let data = data_path(&args.data, &args.workdir);
    let prepared = prepare(&data, &cfg)?;
    let d = match args.split {
        SplitPart::Validation => &prepared.split.validation,
        SplitPart::Test => &prepared.split.test,
    };
    let set = &prepared.set;

    let forecasts = match args.strategy {
        Strategy::Naive => super::evaluate::naive_forecasts(d, set)?,
        Strategy::Global => {
            let global = read_model(&layout::global_model(&args.workdir))?;
            predict(&global, d)?
        }
        Strategy::All | Strategy::Best | Strategy::Ens => {
            let (store, _) = load_store(&args.workdir)?;
            match args.strategy {
                Strategy::Ens => {
                    let selections: SelectionsFile = read_json(&layout::selections(&args.workdir))
                        .context("run `gridcast ensemble` before forecasting with ens")?;
                    ensemble_forecast(&selections.selections, &store, d)?
                }
                Strategy::All => {
                    let candidates =
                        collect_candidates(&store, &prepared.split.validation, set, SEASON)?;
                    let level = select_level_all(&candidates)?;
                    localized_predict(&store, level, d)?
                }
                _ => {
                    let candidates =
                        collect_candidates(&store, &prepared.split.validation, set, SEASON)?;
                    let levels: BTreeMap<usize, usize> = candidates
                        .iter()
                        .map(|c| (c.series_index, rank_candidates(c)[0]))
                        .collect();
                    forecast_with_levels(&store, d, &levels)?
                }
            }
        }
    };

    let out = args.out.clone().unwrap_or_else(|| {
        let split = match args.split {
            SplitPart::Validation => "validation",
            SplitPart::Test => "test",
        };
        let strategy = match args.strategy {
            Strategy::Global => "global",
            Strategy::All => "all",
            Strategy::Best => "best",
            Strategy::Ens => "ens",
            Strategy::Naive => "naive",
        };
        layout::reports_dir(&args.workdir).join(format!("forecast_{strategy}_{split}.csv"))
    });
    crate::artifacts::write_forecast_csv(&out, d, set, &forecasts)?;
    println!("{} forecast rows -> {}", d.len() * d.h(), out.display());
    Ok(())
}
