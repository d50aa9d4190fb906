//! Per-series forecast ensembles over the candidate hierarchy levels.
//!
//! Each series has `C` candidate forecasters: the global model (level 0) and
//! its gated localizations at levels `1..C-1`. Candidates are ranked by
//! validation MASE; the ensemble greedily extends the best candidate with the
//! next-ranked ones, keeping an addition only while the unweighted mean
//! forecast strictly improves validation error. The fixed-level ALL strategy
//! and the per-series BEST strategy come from the same candidate table.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use ndarray::Array2;

use crate::data::{SeriesSet, WindowedDataset};
use crate::fmath;
use crate::localization::{localized_predict, LocalizedModelStore};
use crate::metrics::naive_mae;
use crate::{Error, Result};

/// Candidate forecasts of one model level for one series.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelCandidate {
    pub level: usize,
    /// Window-by-horizon forecasts for the series' validation rows.
    pub forecasts: Array2<f64>,
    /// Validation MASE of this level (degenerate windows excluded).
    pub mase: f64,
}

/// All candidate forecasts of one series, with everything needed to score
/// arbitrary averages of them.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateForecasts {
    pub series_index: usize,
    pub id: String,
    pub actuals: Array2<f64>,
    /// Seasonal-naive MAE of every window (the MASE denominator).
    pub naive_mae: Vec<f64>,
    /// One candidate per level, ordered by level.
    pub levels: Vec<LevelCandidate>,
    pub degenerate_windows: usize,
}

/// Mean MASE over windows with a non-zero naive denominator.
fn window_mase_mean(forecasts: &Array2<f64>, actuals: &Array2<f64>, naive: &[f64]) -> Result<f64> {
    let h = actuals.ncols();
    let mut sum = 0.0;
    let mut n = 0usize;
    for (w, &denom) in naive.iter().enumerate() {
        if denom == 0.0 {
            continue;
        }
        let mae: f64 = (0..h)
            .map(|j| fmath::abs(actuals[[w, j]] - forecasts[[w, j]]))
            .sum::<f64>()
            / h as f64;
        sum += mae / denom;
        n += 1;
    }
    if n == 0 {
        return Err(Error::DegenerateWindow);
    }
    Ok(sum / n as f64)
}

impl CandidateForecasts {
    /// Builds the candidate table from raw per-level forecasts, computing
    /// each level's validation MASE.
    pub fn new(
        series_index: usize,
        id: String,
        actuals: Array2<f64>,
        naive_mae: Vec<f64>,
        forecasts_by_level: Vec<Array2<f64>>,
    ) -> Result<CandidateForecasts> {
        if forecasts_by_level.is_empty() {
            return Err(Error::EmptyInput("candidate forecasts"));
        }
        let degenerate_windows = naive_mae.iter().filter(|&&d| d == 0.0).count();
        let levels = forecasts_by_level
            .into_iter()
            .enumerate()
            .map(|(level, forecasts)| {
                let mase = window_mase_mean(&forecasts, &actuals, &naive_mae)?;
                Ok(LevelCandidate {
                    level,
                    forecasts,
                    mase,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CandidateForecasts {
            series_index,
            id,
            actuals,
            naive_mae,
            levels,
            degenerate_windows,
        })
    }

    /// Unweighted mean forecast of the given levels, summed in ascending
    /// level order so the result is independent of list order.
    pub fn mean_forecast(&self, levels: &[usize]) -> Array2<f64> {
        let mut sorted: Vec<usize> = levels.to_vec();
        sorted.sort_unstable();
        let mut sum = Array2::zeros(self.actuals.raw_dim());
        for &l in &sorted {
            sum += &self.levels[l].forecasts;
        }
        sum / levels.len() as f64
    }

    /// Validation MASE of the unweighted mean over `levels`.
    pub fn mean_mase(&self, levels: &[usize]) -> Result<f64> {
        window_mase_mean(&self.mean_forecast(levels), &self.actuals, &self.naive_mae)
    }
}

/// Candidate tables for every series appearing in `d` (ordered by series
/// index), from validation forecasts of all `C` levels.
pub fn collect_candidates(
    store: &LocalizedModelStore,
    d: &WindowedDataset,
    set: &SeriesSet,
    season: usize,
) -> Result<Vec<CandidateForecasts>> {
    if d.is_empty() {
        return Err(Error::EmptyInput("validation dataset"));
    }
    let n_levels = store.n_candidate_levels();
    let per_level: Vec<Array2<f64>> = (0..n_levels)
        .map(|l| localized_predict(store, l, d))
        .collect::<Result<Vec<_>>>()?;

    let mut out = Vec::new();
    for (index, series) in set.series().iter().enumerate() {
        let rows = d.rows_of_series(index);
        if rows.is_empty() {
            continue;
        }
        let actuals = d.y.select(ndarray::Axis(0), &rows);
        let mut naive = Vec::with_capacity(rows.len());
        for &row in &rows {
            let origin = series.index_of(d.target_start[row]).ok_or(Error::OffGrid {
                timestamp: d.target_start[row],
            })?;
            let actual = d.y.row(row);
            naive.push(naive_mae(
                actual.as_slice().expect("contiguous"),
                &series.values[..origin],
                season,
            )?);
        }
        let forecasts_by_level: Vec<Array2<f64>> = per_level
            .iter()
            .map(|full| full.select(ndarray::Axis(0), &rows))
            .collect();
        out.push(CandidateForecasts::new(
            index,
            series.id.clone(),
            actuals,
            naive,
            forecasts_by_level,
        )?);
    }
    Ok(out)
}

/// Levels sorted by ascending validation MASE; ties prefer the lower (more
/// global) level.
pub fn rank_candidates(c: &CandidateForecasts) -> Vec<usize> {
    let mut order: Vec<usize> = (0..c.levels.len()).collect();
    order.sort_by(|&a, &b| {
        c.levels[a]
            .mase
            .partial_cmp(&c.levels[b].mase)
            .expect("MASE values are finite")
            .then(a.cmp(&b))
    });
    order
}

/// The greedy per-series model selection.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct EnsembleSelection {
    pub series_index: usize,
    pub id: String,
    /// Selected levels, a prefix of the validation ranking.
    pub levels: Vec<usize>,
    /// Validation MASE of the averaged selection.
    pub val_mase: f64,
}

/// Greedy forward selection: start from the best-ranked level and keep
/// appending the next-ranked one while the averaged forecast strictly
/// improves validation MASE.
pub fn build_ensemble(c: &CandidateForecasts) -> Result<EnsembleSelection> {
    let ranked = rank_candidates(c);
    let mut selected = alloc::vec![ranked[0]];
    let mut delta = c.mean_mase(&selected)?;
    for &next in &ranked[1..] {
        let mut trial = selected.clone();
        trial.push(next);
        let delta_new = c.mean_mase(&trial)?;
        if delta_new >= delta {
            break;
        }
        selected = trial;
        delta = delta_new;
    }
    Ok(EnsembleSelection {
        series_index: c.series_index,
        id: c.id.clone(),
        levels: selected,
        val_mase: delta,
    })
}

/// Fixed level minimizing the unweighted mean validation MASE over all
/// series (ties prefer the lower level).
pub fn select_level_all(candidates: &[CandidateForecasts]) -> Result<usize> {
    let first = candidates.first().ok_or(Error::EmptyInput("candidates"))?;
    let n_levels = first.levels.len();
    let mut best = 0;
    let mut best_score = f64::INFINITY;
    for level in 0..n_levels {
        let score = candidates.iter().map(|c| c.levels[level].mase).sum::<f64>()
            / candidates.len() as f64;
        if score < best_score {
            best_score = score;
            best = level;
        }
    }
    Ok(best)
}

/// Per-series validation-optimal level (ties prefer the lower level),
/// aligned with `candidates`.
pub fn select_levels_best(candidates: &[CandidateForecasts]) -> Vec<usize> {
    candidates.iter().map(|c| rank_candidates(c)[0]).collect()
}

/// Test forecasts where every row uses a fixed per-series level.
pub fn forecast_with_levels(
    store: &LocalizedModelStore,
    d: &WindowedDataset,
    level_by_series: &BTreeMap<usize, usize>,
) -> Result<Array2<f64>> {
    let mut needed: Vec<usize> = level_by_series.values().copied().collect();
    needed.sort_unstable();
    needed.dedup();
    let mut per_level = BTreeMap::new();
    for &l in &needed {
        per_level.insert(l, localized_predict(store, l, d)?);
    }
    let mut out = Array2::zeros((d.len(), d.h()));
    for row in 0..d.len() {
        let series = d.series_index[row];
        let level = level_by_series
            .get(&series)
            .ok_or(Error::UnknownSeries { index: series })?;
        out.row_mut(row).assign(&per_level[level].row(row));
    }
    Ok(out)
}

/// ALL strategy: one shared level, chosen on validation, applied to test.
pub fn strategy_all(
    store: &LocalizedModelStore,
    d_val: &WindowedDataset,
    d_test: &WindowedDataset,
    set: &SeriesSet,
    season: usize,
) -> Result<(usize, Array2<f64>)> {
    let candidates = collect_candidates(store, d_val, set, season)?;
    let level = select_level_all(&candidates)?;
    Ok((level, localized_predict(store, level, d_test)?))
}

/// BEST strategy: each series forecasts the test set at its own
/// validation-optimal level.
pub fn strategy_best(
    store: &LocalizedModelStore,
    d_val: &WindowedDataset,
    d_test: &WindowedDataset,
    set: &SeriesSet,
    season: usize,
) -> Result<(BTreeMap<usize, usize>, Array2<f64>)> {
    let candidates = collect_candidates(store, d_val, set, season)?;
    let levels = select_levels_best(&candidates);
    let map: BTreeMap<usize, usize> = candidates
        .iter()
        .zip(&levels)
        .map(|(c, &l)| (c.series_index, l))
        .collect();
    Ok((map.clone(), forecast_with_levels(store, d_test, &map)?))
}

/// Forecasts every row of `d` as the unweighted mean of its series'
/// selected levels (summed in ascending level order, so the stored list
/// order never matters).
pub fn ensemble_forecast(
    selections: &[EnsembleSelection],
    store: &LocalizedModelStore,
    d: &WindowedDataset,
) -> Result<Array2<f64>> {
    let by_series: BTreeMap<usize, &EnsembleSelection> =
        selections.iter().map(|s| (s.series_index, s)).collect();
    let mut needed: Vec<usize> = selections.iter().flat_map(|s| s.levels.iter().copied()).collect();
    needed.sort_unstable();
    needed.dedup();
    let mut per_level = BTreeMap::new();
    for &l in &needed {
        per_level.insert(l, localized_predict(store, l, d)?);
    }
    let mut out = Array2::zeros((d.len(), d.h()));
    for row in 0..d.len() {
        let series = d.series_index[row];
        let sel = by_series
            .get(&series)
            .ok_or(Error::UnknownSeries { index: series })?;
        let mut levels = sel.levels.clone();
        levels.sort_unstable();
        for &l in &levels {
            let src = &per_level[&l];
            for j in 0..d.h() {
                out[[row, j]] += src[[row, j]];
            }
        }
        let inv = 1.0 / sel.levels.len() as f64;
        for j in 0..d.h() {
            out[[row, j]] *= inv;
        }
    }
    Ok(out)
}
