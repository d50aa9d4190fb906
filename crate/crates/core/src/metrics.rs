//! Forecast-accuracy metrics and the seasonal naive baseline.
//!
//! MASE divides the forecast MAE by the MAE of the seasonal naive model
//! (repeat the value observed one week earlier) over the same window, so
//! scores below 1 beat the naive baseline. Windows where the naive MAE is
//! exactly zero are excluded from aggregation and counted instead of
//! contaminating the means.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use ndarray::ArrayView2;

use crate::data::{AggregateType, Series, SeriesSet, WindowedDataset, WEEK_STEPS};
use crate::fmath;
use crate::{Error, Result};

/// Seasonal period of the naive model: one week of half-hours.
pub const SEASON: usize = WEEK_STEPS;

/// Seasonal naive forecast from `origin` (index of the first target step):
/// step `j` predicts `values[origin + j - season]`.
pub fn naive_seasonal(s: &Series, origin: usize, h: usize, season: usize) -> Result<Vec<f64>> {
    if origin < season {
        return Err(Error::InsufficientData {
            needed: season,
            got: origin,
        });
    }
    if origin - season + h > s.len() {
        return Err(Error::InsufficientData {
            needed: origin - season + h,
            got: s.len(),
        });
    }
    Ok(s.values[origin - season..origin - season + h].to_vec())
}

fn mae(actual: &[f64], forecast: &[f64]) -> f64 {
    debug_assert_eq!(actual.len(), forecast.len());
    actual
        .iter()
        .zip(forecast)
        .map(|(&a, &f)| fmath::abs(a - f))
        .sum::<f64>()
        / actual.len() as f64
}

/// Naive-model MAE over one window whose first target sits at index
/// `history.len()`; `history` must hold at least `season` values. Target
/// steps beyond the season boundary fall back to the actuals themselves.
pub fn naive_mae(actual: &[f64], history: &[f64], season: usize) -> Result<f64> {
    if history.len() < season {
        return Err(Error::InsufficientData {
            needed: season,
            got: history.len(),
        });
    }
    let h = actual.len();
    let total: f64 = (0..h)
        .map(|j| {
            let source = if j < season {
                history[history.len() - season + j]
            } else {
                actual[j - season]
            };
            fmath::abs(actual[j] - source)
        })
        .sum();
    Ok(total / h as f64)
}

/// Mean absolute scaled error of one window.
///
/// `history` is the series up to (excluding) the first target step. A window
/// whose naive MAE is zero yields [`Error::DegenerateWindow`].
pub fn mase(actual: &[f64], forecast: &[f64], history: &[f64], season: usize) -> Result<f64> {
    let denom = naive_mae(actual, history, season)?;
    if denom == 0.0 {
        return Err(Error::DegenerateWindow);
    }
    Ok(mae(actual, forecast) / denom)
}

/// Mean absolute percentage error (in percent). Undefined when any actual is
/// zero, which is why individual consumers are usually not reported under
/// MAPE.
pub fn mape(actual: &[f64], forecast: &[f64]) -> Result<f64> {
    if actual.iter().any(|&a| a == 0.0) {
        return Err(Error::ZeroActual);
    }
    let total: f64 = actual
        .iter()
        .zip(forecast)
        .map(|(&a, &f)| fmath::abs(a - f) / fmath::abs(a))
        .sum();
    Ok(total / actual.len() as f64 * 100.0)
}

/// MAE normalized by the mean actual load of the window.
pub fn nmae(actual: &[f64], forecast: &[f64]) -> Result<f64> {
    let mean = actual.iter().sum::<f64>() / actual.len() as f64;
    if mean <= 0.0 {
        return Err(Error::Normalization);
    }
    Ok(mae(actual, forecast) / mean)
}

/// Evaluation of one series over its test windows.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesEval {
    pub index: usize,
    pub id: String,
    pub aggregate_type: AggregateType,
    /// Mean window MASE (degenerate windows excluded).
    pub mase: f64,
    /// Mean window MAPE; `None` when any window contains a zero actual.
    pub mape: Option<f64>,
    /// Mean window NMAE; `None` when any window has non-positive mean load.
    pub nmae: Option<f64>,
    /// Per-horizon-step MASE: per-step absolute error scaled by the full
    /// window's naive MAE, averaged over windows.
    pub per_horizon_mase: Vec<f64>,
    pub n_windows: usize,
    pub degenerate_windows: usize,
}

/// Dataset-wide evaluation: per-series rows plus unweighted per-type and
/// overall means.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalResult {
    pub per_series: Vec<SeriesEval>,
    /// Unweighted mean of the per-series per-horizon MASE curves.
    pub per_horizon_mase: Vec<f64>,
    pub group_mase: BTreeMap<AggregateType, f64>,
    pub overall_mase: f64,
    /// Mean over series where MAPE is defined.
    pub overall_mape: Option<f64>,
    pub overall_nmae: Option<f64>,
    pub degenerate_windows: usize,
}

impl EvalResult {
    pub fn series_by_id(&self, id: &str) -> Option<&SeriesEval> {
        self.per_series.iter().find(|s| s.id == id)
    }
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Evaluates `forecasts` (row-aligned with `d`) against the test windows.
///
/// Per-series scores are means over that series' windows; group and overall
/// scores are unweighted means over series, regardless of per-series window
/// counts.
pub fn evaluate(
    forecasts: &ArrayView2<f64>,
    d: &WindowedDataset,
    set: &SeriesSet,
    season: usize,
) -> Result<EvalResult> {
    if forecasts.nrows() != d.len() || forecasts.ncols() != d.h() {
        return Err(Error::Shape(alloc::format!(
            "forecast matrix {}x{} does not match dataset {}x{}",
            forecasts.nrows(),
            forecasts.ncols(),
            d.len(),
            d.h()
        )));
    }
    if d.is_empty() {
        return Err(Error::EmptyInput("evaluation dataset"));
    }
    let h = d.h();
    let mut per_series = Vec::new();
    let mut total_degenerate = 0;

    for (index, series) in set.series().iter().enumerate() {
        let rows = d.rows_of_series(index);
        if rows.is_empty() {
            continue;
        }
        let mut mase_sum = 0.0;
        let mut mase_n = 0usize;
        let mut degenerate = 0usize;
        let mut per_h = alloc::vec![0.0; h];
        let mut mape_sum = Some(0.0);
        let mut nmae_sum = Some(0.0);
        for &row in &rows {
            let actual = d.y.row(row);
            let actual = actual.as_slice().expect("targets are standard layout");
            let forecast = forecasts.row(row).to_vec();
            let forecast = forecast.as_slice();
            let origin = series
                .index_of(d.target_start[row])
                .ok_or(Error::OffGrid {
                    timestamp: d.target_start[row],
                })?;
            let denom = naive_mae(actual, &series.values[..origin], season)?;
            if denom == 0.0 {
                degenerate += 1;
            } else {
                mase_sum += mae(actual, forecast) / denom;
                for j in 0..h {
                    per_h[j] += fmath::abs(actual[j] - forecast[j]) / denom;
                }
                mase_n += 1;
            }
            mape_sum = match (mape_sum, mape(actual, forecast)) {
                (Some(acc), Ok(v)) => Some(acc + v),
                _ => None,
            };
            nmae_sum = match (nmae_sum, nmae(actual, forecast)) {
                (Some(acc), Ok(v)) => Some(acc + v),
                _ => None,
            };
        }
        if mase_n == 0 {
            return Err(Error::DegenerateSeries {
                id: series.id.clone(),
            });
        }
        let inv = 1.0 / mase_n as f64;
        total_degenerate += degenerate;
        per_series.push(SeriesEval {
            index,
            id: series.id.clone(),
            aggregate_type: series.aggregate_type,
            mase: mase_sum * inv,
            mape: mape_sum.map(|s| s / rows.len() as f64),
            nmae: nmae_sum.map(|s| s / rows.len() as f64),
            per_horizon_mase: per_h.into_iter().map(|v| v * inv).collect(),
            n_windows: rows.len(),
            degenerate_windows: degenerate,
        });
    }
    if per_series.is_empty() {
        return Err(Error::EmptyInput("no series with evaluation windows"));
    }

    let overall_mase = mean(&per_series.iter().map(|s| s.mase).collect::<Vec<_>>());
    let mut per_horizon_mase = alloc::vec![0.0; h];
    for s in &per_series {
        for j in 0..h {
            per_horizon_mase[j] += s.per_horizon_mase[j];
        }
    }
    for v in per_horizon_mase.iter_mut() {
        *v /= per_series.len() as f64;
    }

    let mut group_mase = BTreeMap::new();
    for agg in AggregateType::ALL {
        let scores: Vec<f64> = per_series
            .iter()
            .filter(|s| s.aggregate_type == agg)
            .map(|s| s.mase)
            .collect();
        if !scores.is_empty() {
            group_mase.insert(agg, mean(&scores));
        }
    }

    let defined =
        |values: Vec<Option<f64>>| -> Option<f64> {
            let known: Vec<f64> = values.into_iter().flatten().collect();
            (!known.is_empty()).then(|| mean(&known))
        };
    let overall_mape = defined(per_series.iter().map(|s| s.mape).collect());
    let overall_nmae = defined(per_series.iter().map(|s| s.nmae).collect());

    Ok(EvalResult {
        per_series,
        per_horizon_mase,
        group_mase,
        overall_mase,
        overall_mape,
        overall_nmae,
        degenerate_windows: total_degenerate,
    })
}

/// Per-series improvement of forecast `b` over forecast `a` in MASE points
/// times 100 (positive means `b` is better).
pub fn improvement_pct(mase_a: f64, mase_b: f64) -> f64 {
    (mase_a - mase_b) * 100.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{split_by_time, AggregateType, STEP_SECONDS};
    use crate::synth::generate_synthetic;
    use alloc::string::ToString;
    use ndarray::Array2;

    fn series_of(values: Vec<f64>) -> Series {
        Series {
            id: "m".to_string(),
            aggregate_type: AggregateType::Single,
            start: 0,
            step_seconds: STEP_SECONDS,
            values,
        }
    }

    #[test]
    fn naive_seasonal_repeats_the_previous_week() {
        let s = series_of((0..3 * WEEK_STEPS).map(|t| t as f64).collect());
        let f = naive_seasonal(&s, WEEK_STEPS, 48, WEEK_STEPS).unwrap();
        assert_eq!(f, (0..48).map(|t| t as f64).collect::<Vec<_>>());

        // Weekly-periodic series: naive forecast equals the actuals.
        let p = series_of((0..3 * WEEK_STEPS).map(|t| ((t % WEEK_STEPS) as f64).sin()).collect());
        let f = naive_seasonal(&p, 2 * WEEK_STEPS, 48, WEEK_STEPS).unwrap();
        assert_eq!(f, p.values[2 * WEEK_STEPS..2 * WEEK_STEPS + 48].to_vec());

        assert!(matches!(
            naive_seasonal(&s, WEEK_STEPS - 1, 48, WEEK_STEPS),
            Err(Error::InsufficientData { .. })
        ));
    }

    #[test]
    fn naive_seasonal_short_season() {
        let s = series_of(alloc::vec![1.0, 2.0, 3.0]);
        assert_eq!(naive_seasonal(&s, 3, 1, 1).unwrap(), alloc::vec![3.0]);
    }

    #[test]
    fn mase_identities_and_hand_case() {
        let history = alloc::vec![8.0, 8.0];
        let actual = [10.0, 12.0];
        // forecast = naive source -> MASE = 1.
        assert_eq!(mase(&actual, &[8.0, 8.0], &history, 2).unwrap(), 1.0);
        // perfect forecast -> MASE = 0.
        assert_eq!(mase(&actual, &actual, &history, 2).unwrap(), 0.0);
        // MAE_test = 1, MAE_naive = 3.
        let got = mase(&actual, &[9.0, 13.0], &history, 2).unwrap();
        assert!((got - 1.0 / 3.0).abs() < 1e-15);
        // Flat week -> degenerate.
        assert!(matches!(
            mase(&[8.0, 8.0], &[9.0, 9.0], &history, 2),
            Err(Error::DegenerateWindow)
        ));
    }

    #[test]
    fn mase_is_scale_invariant() {
        let history: Vec<f64> = (0..WEEK_STEPS).map(|t| 1.0 + (t as f64 * 0.1).sin()).collect();
        let actual: Vec<f64> = (0..4).map(|t| 2.0 + t as f64).collect();
        let forecast: Vec<f64> = (0..4).map(|t| 2.5 + t as f64).collect();
        let base = mase(&actual, &forecast, &history, WEEK_STEPS).unwrap();
        let scale = 7.3;
        let scaled = mase(
            &actual.iter().map(|v| v * scale).collect::<Vec<_>>(),
            &forecast.iter().map(|v| v * scale).collect::<Vec<_>>(),
            &history.iter().map(|v| v * scale).collect::<Vec<_>>(),
            WEEK_STEPS,
        )
        .unwrap();
        assert!((base - scaled).abs() < 1e-12);
    }

    #[test]
    fn mape_and_nmae_hand_cases() {
        assert_eq!(mape(&[100.0], &[100.0]).unwrap(), 0.0);
        assert_eq!(mape(&[100.0], &[90.0]).unwrap(), 10.0);
        assert_eq!(mape(&[50.0, 200.0], &[55.0, 180.0]).unwrap(), 10.0);
        assert!(matches!(mape(&[1.0, 0.0], &[1.0, 1.0]), Err(Error::ZeroActual)));

        assert_eq!(nmae(&[10.0, 10.0], &[10.0, 10.0]).unwrap(), 0.0);
        assert_eq!(nmae(&[10.0, 10.0], &[9.0, 11.0]).unwrap(), 0.1);
        let scaled = nmae(&[70.0, 70.0], &[63.0, 77.0]).unwrap();
        assert!((scaled - 0.1).abs() < 1e-15);
        assert!(matches!(nmae(&[0.0, 0.0], &[1.0, 1.0]), Err(Error::Normalization)));
    }

    #[test]
    fn all_metrics_vanish_only_at_perfection() {
        let actual = [3.0, 4.0, 5.0];
        let forecast = [3.0, 4.0, 5.0];
        let history: Vec<f64> = (0..WEEK_STEPS).map(|t| (t as f64 * 0.01).cos() + 2.0).collect();
        assert_eq!(mase(&actual, &forecast, &history, WEEK_STEPS).unwrap(), 0.0);
        assert_eq!(mape(&actual, &forecast).unwrap(), 0.0);
        assert_eq!(nmae(&actual, &forecast).unwrap(), 0.0);
        let off = [3.0, 4.0, 5.1];
        assert!(mase(&actual, &off, &history, WEEK_STEPS).unwrap() > 0.0);
        assert!(mape(&actual, &off).unwrap() > 0.0);
        assert!(nmae(&actual, &off).unwrap() > 0.0);
    }

    #[test]
    fn evaluate_gives_exactly_one_for_naive_forecasts() {
        let set = generate_synthetic(3, 1, 5);
        let split = split_by_time(&set, 3, 1, 1, 336, 48).unwrap();
        let d = &split.test;
        let mut forecasts = Array2::zeros((d.len(), d.h()));
        for row in 0..d.len() {
            let series = set.get(d.series_index[row]).unwrap();
            let origin = series.index_of(d.target_start[row]).unwrap();
            let naive = naive_seasonal(series, origin, d.h(), SEASON).unwrap();
            for (j, v) in naive.into_iter().enumerate() {
                forecasts[[row, j]] = v;
            }
        }
        let result = evaluate(&forecasts.view(), d, &set, SEASON).unwrap();
        assert_eq!(result.overall_mase, 1.0);
        assert_eq!(result.degenerate_windows, 0);
        for v in &result.per_horizon_mase {
            assert!(v.is_finite());
        }

        // Perfect forecasts score zero everywhere.
        let perfect = d.y.clone();
        let result = evaluate(&perfect.view(), d, &set, SEASON).unwrap();
        assert_eq!(result.overall_mase, 0.0);
        assert_eq!(result.overall_mape, Some(0.0));
        assert_eq!(result.overall_nmae, Some(0.0));
    }

    #[test]
    fn overall_mean_is_unweighted_over_series() {
        // Two series with different window counts still average their
        // per-series scores 1:1; check with a hand-built mini-eval.
        let set = generate_synthetic(4, 1, 5);
        let split = split_by_time(&set, 3, 1, 1, 336, 48).unwrap();
        let d = &split.test;
        let forecasts = d.y.clone();
        let result = evaluate(&forecasts.view(), d, &set, SEASON).unwrap();
        let by_hand = mean(&result.per_series.iter().map(|s| s.mase).collect::<Vec<_>>());
        assert_eq!(result.overall_mase, by_hand);
        assert_eq!(result.per_series.len(), set.len());
        // Group means partition the series.
        assert_eq!(result.group_mase.len(), 4);
    }

    #[test]
    fn improvement_is_mase_difference_in_points() {
        assert!((improvement_pct(0.8, 0.7) - 10.0).abs() < 1e-12);
        assert!((improvement_pct(0.7, 0.8) + 10.0).abs() < 1e-12);
    }
}
