//! JSON artifacts (hierarchy, selections, manifests) and report CSVs.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use gridcast_core::clustering::ClusterHierarchy;
use gridcast_core::ensemble::EnsembleSelection;
use gridcast_core::localization::{localization_jobs, LocalizedModelStore};
use gridcast_core::metrics::EvalResult;
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::layout;
use crate::model_io::read_model;

/// Pretty-printed JSON with a trailing newline; creates parent directories.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let file = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

/// Hierarchy JSON paired with the series ids it was built over, so later
/// stages can verify they operate on the same pool.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct HierarchyFile {
    pub series_ids: Vec<String>,
    pub hierarchy: ClusterHierarchy,
}

/// Selections JSON: one entry per series, ordered by series index.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct SelectionsFile {
    pub selections: Vec<EnsembleSelection>,
}

/// Loads the full localized store (global model, hierarchy, one model per
/// level/cluster) from the workdir.
pub fn load_store(workdir: &Path) -> Result<(LocalizedModelStore, Vec<String>)> {
    let global = read_model(&layout::global_model(workdir))?;
    let hierarchy_file: HierarchyFile = read_json(&layout::hierarchy(workdir))?;
    let mut models = BTreeMap::new();
    for (l, i) in localization_jobs(&hierarchy_file.hierarchy) {
        let path = layout::localized_model(workdir, l, i);
        models.insert((l, i), read_model(&path)?);
    }
    let store = LocalizedModelStore::from_parts(global, hierarchy_file.hierarchy, models)?;
    Ok((store, hierarchy_file.series_ids))
}

fn create_report(path: &Path) -> Result<BufWriter<fs::File>> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    Ok(BufWriter::new(
        fs::File::create(path).with_context(|| format!("creating {}", path.display()))?,
    ))
}

/// Per-series evaluation rows: `id,agg_type,mase,mape,nmae,windows,degenerate_windows`.
/// MAPE/NMAE cells are empty when undefined for that series.
pub fn write_eval_csv(path: &Path, result: &EvalResult) -> Result<()> {
    let mut w = create_report(path)?;
    writeln!(w, "id,agg_type,mase,mape,nmae,windows,degenerate_windows")?;
    for s in &result.per_series {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            s.id,
            s.aggregate_type.as_str(),
            s.mase,
            s.mape.map(|v| v.to_string()).unwrap_or_default(),
            s.nmae.map(|v| v.to_string()).unwrap_or_default(),
            s.n_windows,
            s.degenerate_windows
        )?;
    }
    w.flush()?;
    Ok(())
}

/// Per-horizon-step MASE per strategy: `h,<strategy...>` with 1-based steps.
/// Per-step absolute errors are scaled by each window's full naive MAE.
pub fn write_per_horizon_csv(path: &Path, strategies: &[(&str, &EvalResult)]) -> Result<()> {
    let mut w = create_report(path)?;
    let names: Vec<&str> = strategies.iter().map(|(n, _)| *n).collect();
    writeln!(w, "h,{}", names.join(","))?;
    let h = strategies[0].1.per_horizon_mase.len();
    for j in 0..h {
        let cells: Vec<String> = strategies
            .iter()
            .map(|(_, r)| r.per_horizon_mase[j].to_string())
            .collect();
        writeln!(w, "{},{}", j + 1, cells.join(","))?;
    }
    w.flush()?;
    Ok(())
}

/// Table-style summary: one row per strategy, per-type and overall MASE.
pub fn write_summary_csv(path: &Path, strategies: &[(&str, &EvalResult)]) -> Result<()> {
    let mut w = create_report(path)?;
    writeln!(w, "strategy,single,sTS,mTS,lTS,all")?;
    for (name, result) in strategies {
        let cell = |agg| {
            result
                .group_mase
                .get(&agg)
                .map(|v| v.to_string())
                .unwrap_or_default()
        };
        use gridcast_core::data::AggregateType::*;
        writeln!(
            w,
            "{},{},{},{},{},{}",
            name,
            cell(Single),
            cell(SmallTs),
            cell(MediumTs),
            cell(LargeTs),
            result.overall_mase
        )?;
    }
    w.flush()?;
    Ok(())
}

/// ECDF-ready per-series improvement of `b` over `a`:
/// `id,agg_type,mase_<a>,mase_<b>,improvement_pct` where
/// `improvement_pct = (mase_a - mase_b) * 100`.
pub fn write_improvement_csv(
    path: &Path,
    name_a: &str,
    a: &EvalResult,
    name_b: &str,
    b: &EvalResult,
) -> Result<()> {
    let mut w = create_report(path)?;
    writeln!(w, "id,agg_type,mase_{name_a},mase_{name_b},improvement_pct")?;
    for sa in &a.per_series {
        let sb = b
            .series_by_id(&sa.id)
            .with_context(|| format!("series {} missing from {name_b} evaluation", sa.id))?;
        writeln!(
            w,
            "{},{},{},{},{}",
            sa.id,
            sa.aggregate_type.as_str(),
            sa.mase,
            sb.mase,
            gridcast_core::metrics::improvement_pct(sa.mase, sb.mase)
        )?;
    }
    w.flush()?;
    Ok(())
}

/// Per-series validation MASE per strategy:
/// `id,agg_type,global,all,best,ens`.
pub fn write_val_per_series_csv(
    path: &Path,
    rows: &[(String, &'static str, f64, f64, f64, f64)],
) -> Result<()> {
    let mut w = create_report(path)?;
    writeln!(w, "id,agg_type,global,all,best,ens")?;
    for (id, agg, global, all, best, ens) in rows {
        writeln!(w, "{id},{agg},{global},{all},{best},{ens}")?;
    }
    w.flush()?;
    Ok(())
}

/// Training history CSV: `epoch,train_loss,val_loss,lr`.
pub fn write_train_report_csv(path: &Path, report: &gridcast_core::training::TrainReport) -> Result<()> {
    let mut w = create_report(path)?;
    writeln!(w, "epoch,train_loss,val_loss,lr")?;
    for e in &report.epochs {
        writeln!(w, "{},{},{},{}", e.epoch, e.train_loss, e.val_loss, e.lr)?;
    }
    w.flush()?;
    Ok(())
}

/// Forecast CSV: `id,origin,h,forecast,actual`.
pub fn write_forecast_csv(
    path: &Path,
    d: &gridcast_core::data::WindowedDataset,
    set: &gridcast_core::data::SeriesSet,
    forecasts: &ndarray::Array2<f64>,
) -> Result<()> {
    let mut w = create_report(path)?;
    writeln!(w, "id,origin,h,forecast,actual")?;
    for row in 0..d.len() {
        let id = &set.series()[d.series_index[row]].id;
        let origin = crate::dataio::fmt_timestamp(d.target_start[row]);
        for j in 0..d.h() {
            writeln!(
                w,
                "{},{},{},{},{}",
                id,
                origin,
                j + 1,
                crate::dataio::fmt_data(forecasts[[row, j]]),
                crate::dataio::fmt_data(d.y[[row, j]])
            )?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Candidate validation errors: `id,agg_type,level,mase`.
pub fn write_candidates_csv(
    path: &Path,
    set: &gridcast_core::data::SeriesSet,
    candidates: &[gridcast_core::ensemble::CandidateForecasts],
) -> Result<()> {
    let mut w = create_report(path)?;
    writeln!(w, "id,agg_type,level,mase")?;
    for c in candidates {
        let agg = set.series()[c.series_index].aggregate_type.as_str();
        for level in &c.levels {
            writeln!(w, "{},{},{},{}", c.id, agg, level.level, level.mase)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Manifest of a localization run.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct LocalizeManifest {
    pub clusters: usize,
    pub epsilon: f64,
    pub cluster_seed: u64,
    pub finetune: crate::config::FineTuneSection,
    pub base_seed: u64,
    pub jobs_completed: usize,
}
