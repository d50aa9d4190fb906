//! Series containers and rolling-window dataset assembly.
//!
//! All series live on a uniform 30-minute UTC grid. A supervised sample pairs
//! `K` lag values with the `H`-step target block that follows them; the
//! exogenous part is a one-hot calendar encoding of the first target step.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use chrono::{DateTime, Datelike, Timelike};
use ndarray::{Array2, Axis};

use crate::{Error, Result};

/// Seconds per grid step (30 minutes).
pub const STEP_SECONDS: i64 = 1800;
/// Grid steps per day.
pub const DAY_STEPS: usize = 48;
/// Grid steps per week; also the seasonal period of the naive model.
pub const WEEK_STEPS: usize = 336;
/// One-hot calendar dimensionality: 12 months + 7 weekdays + 48 half-hours.
pub const CALENDAR_DIM: usize = 67;
/// Default lag-window length: one week of half-hours.
pub const DEFAULT_LAGS: usize = 336;
/// Default forecast horizon: one day of half-hours.
pub const DEFAULT_HORIZON: usize = 48;

/// Aggregation level of a load series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize)]
pub enum AggregateType {
    /// An individual consumer.
    Single,
    /// Small transformer station (50 consumers).
    SmallTs,
    /// Medium transformer station (100 consumers).
    MediumTs,
    /// Large transformer station (200 consumers).
    LargeTs,
}

impl AggregateType {
    pub const ALL: [AggregateType; 4] = [
        AggregateType::Single,
        AggregateType::SmallTs,
        AggregateType::MediumTs,
        AggregateType::LargeTs,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            AggregateType::Single => "single",
            AggregateType::SmallTs => "sTS",
            AggregateType::MediumTs => "mTS",
            AggregateType::LargeTs => "lTS",
        }
    }

    /// Parses the CSV token, case-insensitively.
    pub fn parse(token: &str) -> Option<AggregateType> {
        let t = token.trim();
        AggregateType::ALL
            .into_iter()
            .find(|a| a.as_str().eq_ignore_ascii_case(t))
    }

    /// Consumers summed into one aggregate of this type.
    pub fn group_size(self) -> usize {
        match self {
            AggregateType::Single => 1,
            AggregateType::SmallTs => 50,
            AggregateType::MediumTs => 100,
            AggregateType::LargeTs => 200,
        }
    }
}

/// A univariate load series on the uniform 30-minute grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub id: String,
    pub aggregate_type: AggregateType,
    /// Unix timestamp (seconds) of the first observation.
    pub start: i64,
    pub step_seconds: i64,
    pub values: Vec<f64>,
}

impl Series {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn timestamp_at(&self, index: usize) -> i64 {
        self.start + index as i64 * self.step_seconds
    }

    /// Grid index of `timestamp`, if it falls on this series' grid.
    pub fn index_of(&self, timestamp: i64) -> Option<usize> {
        let delta = timestamp - self.start;
        if delta < 0 || delta % self.step_seconds != 0 {
            return None;
        }
        let idx = (delta / self.step_seconds) as usize;
        (idx < self.values.len()).then_some(idx)
    }
}

/// An aligned pool of load series.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesSet {
    series: Vec<Series>,
}

impl SeriesSet {
    /// Builds a set, enforcing unique ids and shared start/step/length.
    pub fn new(series: Vec<Series>) -> Result<SeriesSet> {
        if series.is_empty() {
            return Err(Error::EmptyInput("series set"));
        }
        let (start, step, len) = (series[0].start, series[0].step_seconds, series[0].len());
        for s in &series {
            if s.start != start || s.step_seconds != step || s.len() != len {
                return Err(Error::Shape(format!(
                    "series `{}` is not aligned with the rest of the set",
                    s.id
                )));
            }
            for (i, v) in s.values.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::NonFiniteValue {
                        id: s.id.clone(),
                        timestamp: s.timestamp_at(i),
                    });
                }
            }
        }
        for (i, a) in series.iter().enumerate() {
            for b in &series[i + 1..] {
                if a.id == b.id {
                    return Err(Error::Duplicate {
                        id: a.id.clone(),
                        timestamp: a.start,
                    });
                }
            }
        }
        Ok(SeriesSet { series })
    }

    /// Assembles a set from raw `(timestamp, id, value, aggregate)` records.
    ///
    /// Records may arrive in any order; they are grouped by id (first
    /// appearance fixes the series order) and sorted by time. Gaps,
    /// duplicates, off-grid timestamps and non-finite values are rejected.
    pub fn from_records(records: Vec<(i64, String, f64, Option<AggregateType>)>) -> Result<SeriesSet> {
        if records.is_empty() {
            return Err(Error::EmptyInput("no data rows"));
        }
        let mut order: Vec<String> = Vec::new();
        let mut rows: alloc::collections::BTreeMap<String, Vec<(i64, f64)>> =
            alloc::collections::BTreeMap::new();
        let mut aggs: alloc::collections::BTreeMap<String, AggregateType> =
            alloc::collections::BTreeMap::new();
        for (ts, id, value, agg) in records {
            if ts % STEP_SECONDS != 0 {
                return Err(Error::OffGrid { timestamp: ts });
            }
            if !value.is_finite() {
                return Err(Error::NonFiniteValue { id, timestamp: ts });
            }
            if !rows.contains_key(&id) {
                order.push(id.clone());
            }
            if let Some(a) = agg {
                aggs.entry(id.clone()).or_insert(a);
            }
            rows.entry(id).or_default().push((ts, value));
        }
        let mut series = Vec::with_capacity(order.len());
        for id in order {
            let mut obs = rows.remove(&id).expect("grouped above");
            obs.sort_by_key(|&(ts, _)| ts);
            for pair in obs.windows(2) {
                let (prev, next) = (pair[0].0, pair[1].0);
                if next == prev {
                    return Err(Error::Duplicate { id, timestamp: prev });
                }
                if next != prev + STEP_SECONDS {
                    return Err(Error::Gap {
                        id,
                        timestamp: prev + STEP_SECONDS,
                    });
                }
            }
            let aggregate_type = aggs.get(&id).copied().unwrap_or(AggregateType::Single);
            series.push(Series {
                id,
                aggregate_type,
                start: obs[0].0,
                step_seconds: STEP_SECONDS,
                values: obs.into_iter().map(|(_, v)| v).collect(),
            });
        }
        SeriesSet::new(series)
    }

    pub fn series(&self) -> &[Series] {
        &self.series
    }

    pub fn len(&self) -> usize {
        self.series.len()
    }

    pub fn is_empty(&self) -> bool {
        self.series.is_empty()
    }

    pub fn get(&self, index: usize) -> Option<&Series> {
        self.series.get(index)
    }

    /// Shared length of every series in the set.
    pub fn series_len(&self) -> usize {
        self.series[0].len()
    }

    pub fn start(&self) -> i64 {
        self.series[0].start
    }
}

/// The three hot indices of the calendar encoding for `timestamp`:
/// month (0..12), 12 + weekday (Monday = 0), 19 + half-hour slot (0..48).
pub fn calendar_indices(timestamp: i64) -> Result<[usize; 3]> {
    if timestamp % STEP_SECONDS != 0 {
        return Err(Error::OffGrid { timestamp });
    }
    let dt = DateTime::from_timestamp(timestamp, 0).ok_or(Error::OffGrid { timestamp })?;
    let month = dt.month0() as usize;
    let weekday = dt.weekday().num_days_from_monday() as usize;
    let slot = (dt.hour() * 2 + dt.minute() / 30) as usize;
    Ok([month, 12 + weekday, 12 + 7 + slot])
}

/// One-hot calendar vector (length [`CALENDAR_DIM`]) for `timestamp`.
pub fn encode_calendar(timestamp: i64) -> Result<[f64; CALENDAR_DIM]> {
    let mut v = [0.0; CALENDAR_DIM];
    for idx in calendar_indices(timestamp)? {
        v[idx] = 1.0;
    }
    Ok(v)
}

/// A stacked supervised dataset of rolling-window samples.
///
/// Row `r` pairs `x_lags[r]` (the `K` values preceding the forecast origin)
/// with the target block `y[r]` and the calendar encoding of the first
/// target step. `series_index[r]` and `target_start[r]` identify where the
/// sample came from.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowedDataset {
    pub x_lags: Array2<f64>,
    pub x_exog: Array2<f64>,
    pub y: Array2<f64>,
    pub series_index: Vec<usize>,
    pub target_start: Vec<i64>,
}

impl WindowedDataset {
    /// An empty dataset with the given window geometry.
    pub fn empty(k: usize, h: usize) -> WindowedDataset {
        WindowedDataset {
            x_lags: Array2::zeros((0, k)),
            x_exog: Array2::zeros((0, CALENDAR_DIM)),
            y: Array2::zeros((0, h)),
            series_index: Vec::new(),
            target_start: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.x_lags.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn k(&self) -> usize {
        self.x_lags.ncols()
    }

    pub fn h(&self) -> usize {
        self.y.ncols()
    }

    /// New dataset containing `rows` (in the given order).
    pub fn select_rows(&self, rows: &[usize]) -> WindowedDataset {
        WindowedDataset {
            x_lags: self.x_lags.select(Axis(0), rows),
            x_exog: self.x_exog.select(Axis(0), rows),
            y: self.y.select(Axis(0), rows),
            series_index: rows.iter().map(|&r| self.series_index[r]).collect(),
            target_start: rows.iter().map(|&r| self.target_start[r]).collect(),
        }
    }

    /// Rows whose series index satisfies `keep`, preserving order.
    pub fn restrict_to_series(&self, keep: impl Fn(usize) -> bool) -> WindowedDataset {
        let rows: Vec<usize> = (0..self.len()).filter(|&r| keep(self.series_index[r])).collect();
        self.select_rows(&rows)
    }

    /// Row positions belonging to series `index`, in dataset order.
    pub fn rows_of_series(&self, index: usize) -> Vec<usize> {
        (0..self.len()).filter(|&r| self.series_index[r] == index).collect()
    }

    /// Largest series index referenced, if any rows exist.
    pub fn max_series_index(&self) -> Option<usize> {
        self.series_index.iter().copied().max()
    }
}

/// Windows of `s` whose first target index runs over `origins`.
fn collect_windows(
    s: &Series,
    series_index: usize,
    k: usize,
    h: usize,
    origins: impl ExactSizeIterator<Item = usize>,
) -> Result<WindowedDataset> {
    let m = origins.len();
    let mut x_lags = Array2::zeros((m, k));
    let mut x_exog = Array2::zeros((m, CALENDAR_DIM));
    let mut y = Array2::zeros((m, h));
    let mut target_start = Vec::with_capacity(m);
    for (row, origin) in origins.enumerate() {
        debug_assert!(origin >= k && origin + h <= s.len());
        let ts = s.timestamp_at(origin);
        x_lags
            .row_mut(row)
            .as_slice_mut()
            .expect("row is contiguous")
            .copy_from_slice(&s.values[origin - k..origin]);
        y.row_mut(row)
            .as_slice_mut()
            .expect("row is contiguous")
            .copy_from_slice(&s.values[origin..origin + h]);
        for idx in calendar_indices(ts)? {
            x_exog[[row, idx]] = 1.0;
        }
        target_start.push(ts);
    }
    Ok(WindowedDataset {
        x_lags,
        x_exog,
        y,
        series_index: alloc::vec![series_index; m],
        target_start,
    })
}

/// Rolling-window samples over the whole series.
///
/// Sample `j` uses lags `values[j*stride .. j*stride+k)` and targets
/// `values[j*stride+k .. j*stride+k+h)`; there are
/// `(len - k - h) / stride + 1` samples.
pub fn make_windows(s: &Series, k: usize, h: usize, stride: usize) -> Result<WindowedDataset> {
    assert!(stride >= 1, "stride must be at least 1");
    assert!(k >= 1 && h >= 1, "k and h must be at least 1");
    if s.len() < k + h {
        return Err(Error::InsufficientData {
            needed: k + h,
            got: s.len(),
        });
    }
    let m = (s.len() - k - h) / stride + 1;
    collect_windows(s, 0, k, h, (0..m).map(|j| j * stride + k))
}

/// Row-concatenates datasets sharing the same window geometry.
pub fn stack(sets: &[WindowedDataset]) -> Result<WindowedDataset> {
    let first = sets.first().ok_or(Error::EmptyInput("no datasets to stack"))?;
    let (k, h) = (first.k(), first.h());
    for d in sets {
        if d.k() != k || d.h() != h {
            return Err(Error::Shape(format!(
                "cannot stack windows of geometry ({}, {}) with ({}, {})",
                d.k(),
                d.h(),
                k,
                h
            )));
        }
    }
    let x_lags = ndarray::concatenate(Axis(0), &sets.iter().map(|d| d.x_lags.view()).collect::<Vec<_>>())
        .expect("geometry checked");
    let x_exog = ndarray::concatenate(Axis(0), &sets.iter().map(|d| d.x_exog.view()).collect::<Vec<_>>())
        .expect("geometry checked");
    let y = ndarray::concatenate(Axis(0), &sets.iter().map(|d| d.y.view()).collect::<Vec<_>>())
        .expect("geometry checked");
    let mut series_index = Vec::new();
    let mut target_start = Vec::new();
    for d in sets {
        series_index.extend_from_slice(&d.series_index);
        target_start.extend_from_slice(&d.target_start);
    }
    Ok(WindowedDataset {
        x_lags,
        x_exog,
        y,
        series_index,
        target_start,
    })
}

/// Time-ordered train/validation/test datasets.
///
/// Target timestamps are strictly disjoint across the three parts; lag
/// windows of validation/test samples may reach back into the preceding
/// segment.
#[derive(Debug, Clone)]
pub struct DatasetSplit {
    pub train: WindowedDataset,
    pub validation: WindowedDataset,
    pub test: WindowedDataset,
}

/// Splits every series of `set` into consecutive train/validation/test
/// segments of whole weeks and windows each segment.
///
/// The segments partition the raw data: the training segment spans the first
/// `train_weeks` weeks and its first `k` steps serve only as lag history, so
/// training targets start at step `k`. Validation and test windows cover
/// exactly `val_weeks * 336` resp. `test_weeks * 336` target timestamps.
pub fn split_by_time(
    set: &SeriesSet,
    train_weeks: usize,
    val_weeks: usize,
    test_weeks: usize,
    k: usize,
    h: usize,
) -> Result<DatasetSplit> {
    split_by_time_subsampled(set, train_weeks, val_weeks, test_weeks, k, h, 1)
}

/// [`split_by_time`] with interleaved subsampling (see [`subsample`]) fused
/// into the training-set assembly, avoiding materializing the full set.
pub fn split_by_time_subsampled(
    set: &SeriesSet,
    train_weeks: usize,
    val_weeks: usize,
    test_weeks: usize,
    k: usize,
    h: usize,
    train_subsample: usize,
) -> Result<DatasetSplit> {
    assert!(train_subsample >= 1, "subsample factor must be at least 1");
    let n_tr = train_weeks * WEEK_STEPS;
    let n_v = val_weeks * WEEK_STEPS;
    let n_te = test_weeks * WEEK_STEPS;
    let needed = n_tr + n_v + n_te;
    let len = set.series_len();
    if len < needed {
        return Err(Error::InsufficientData { needed, got: len });
    }
    if n_tr < k + h {
        return Err(Error::InsufficientData {
            needed: k + h,
            got: n_tr,
        });
    }

    let segment = |lo: usize, hi: usize| -> core::ops::Range<usize> {
        // Origins whose whole target block [o, o+h) lies within [lo, hi).
        if hi - lo >= h {
            lo..hi - h + 1
        } else {
            lo..lo
        }
    };
    let train_origins = k..n_tr - h + 1;
    let val_origins = segment(n_tr, n_tr + n_v);
    let test_origins = segment(n_tr + n_v, n_tr + n_v + n_te);

    let mut train_parts = Vec::with_capacity(set.len());
    let mut val_parts = Vec::with_capacity(set.len());
    let mut test_parts = Vec::with_capacity(set.len());
    for (i, s) in set.series().iter().enumerate() {
        let mut tr = collect_windows(s, i, k, h, train_origins.clone())?;
        if train_subsample > 1 {
            tr = keep_interleaved(&tr, train_subsample);
        }
        train_parts.push(tr);
        val_parts.push(collect_windows(s, i, k, h, val_origins.clone())?);
        test_parts.push(collect_windows(s, i, k, h, test_origins.clone())?);
    }
    Ok(DatasetSplit {
        train: stack(&train_parts)?,
        validation: stack(&val_parts)?,
        test: stack(&test_parts)?,
    })
}

fn keep_interleaved(d: &WindowedDataset, factor: usize) -> WindowedDataset {
    subsample_with(d, factor, |series| series)
}

/// Deterministic interleaved subsampling.
///
/// Keeps rows whose within-series rank `r` satisfies
/// `r % factor == series_index % factor`, so different series sample
/// different phases of the week.
pub fn subsample(d: &WindowedDataset, factor: usize) -> WindowedDataset {
    subsample_with(d, factor, |series| series)
}

/// [`subsample`] with a custom per-series offset rule; a row is kept when
/// its within-series rank is congruent to `offset_fn(series) % factor`.
pub fn subsample_with(
    d: &WindowedDataset,
    factor: usize,
    offset_fn: impl Fn(usize) -> usize,
) -> WindowedDataset {
    assert!(factor >= 1, "subsample factor must be at least 1");
    if factor == 1 {
        return d.clone();
    }
    let mut rank: alloc::collections::BTreeMap<usize, usize> = alloc::collections::BTreeMap::new();
    let mut keep = Vec::new();
    for (row, &series) in d.series_index.iter().enumerate() {
        let r = rank.entry(series).or_insert(0);
        if *r % factor == offset_fn(series) % factor {
            keep.push(row);
        }
        *r += 1;
    }
    d.select_rows(&keep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    fn series(len: usize, start: i64) -> Series {
        Series {
            id: "s".to_string(),
            aggregate_type: AggregateType::Single,
            start,
            step_seconds: STEP_SECONDS,
            values: (0..len).map(|i| i as f64).collect(),
        }
    }

    // 2021-01-04 was a Monday.
    const MONDAY_JAN_4: i64 = 1609718400;

    #[test]
    fn calendar_monday_january_midnight() {
        assert_eq!(calendar_indices(MONDAY_JAN_4).unwrap(), [0, 12, 19]);
        let v = encode_calendar(MONDAY_JAN_4).unwrap();
        assert_eq!(v[0], 1.0);
        assert_eq!(v[12], 1.0);
        assert_eq!(v[19], 1.0);
        assert_eq!(v.iter().sum::<f64>(), 3.0);
    }

    #[test]
    fn calendar_sunday_july_last_slot() {
        // 2021-07-11 23:30 UTC, a Sunday.
        let ts = 1626046200;
        assert_eq!(calendar_indices(ts).unwrap(), [6, 18, 66]);
    }

    #[test]
    fn calendar_always_sums_to_three() {
        for step in (0..5000).step_by(137) {
            let ts = MONDAY_JAN_4 + step * STEP_SECONDS;
            let v = encode_calendar(ts).unwrap();
            assert_eq!(v.iter().sum::<f64>(), 3.0);
            assert_eq!(v.iter().filter(|&&x| x == 1.0).count(), 3);
        }
    }

    #[test]
    fn calendar_rejects_off_grid() {
        assert!(matches!(
            encode_calendar(MONDAY_JAN_4 + 60),
            Err(Error::OffGrid { .. })
        ));
    }

    #[test]
    fn window_counts_match_formula() {
        let s = series(400, MONDAY_JAN_4);
        assert_eq!(make_windows(&s, 336, 48, 1).unwrap().len(), 17);
        assert_eq!(make_windows(&series(384, 0), 336, 48, 1).unwrap().len(), 1);
        assert_eq!(make_windows(&s, 336, 48, 12).unwrap().len(), 2);
    }

    #[test]
    fn window_contents_are_aligned() {
        let s = series(400, MONDAY_JAN_4);
        let d = make_windows(&s, 336, 48, 1).unwrap();
        // Row 3: lags [3, 339), targets [339, 387).
        assert_eq!(d.x_lags[[3, 0]], 3.0);
        assert_eq!(d.x_lags[[3, 335]], 338.0);
        assert_eq!(d.y[[3, 0]], 339.0);
        assert_eq!(d.target_start[3], s.timestamp_at(339));
        let hot = calendar_indices(d.target_start[3]).unwrap();
        for idx in hot {
            assert_eq!(d.x_exog[[3, idx]], 1.0);
        }
    }

    #[test]
    fn windows_too_short() {
        assert!(matches!(
            make_windows(&series(300, 0), 336, 48, 1),
            Err(Error::InsufficientData { .. })
        ));
    }

    #[test]
    fn stack_concatenates_and_checks_geometry() {
        let s = series(400, MONDAY_JAN_4);
        let a = make_windows(&s, 336, 48, 1).unwrap();
        let b = make_windows(&s, 336, 48, 1).unwrap();
        let ab = stack(&[a.clone(), b.clone()]).unwrap();
        assert_eq!(ab.len(), 34);
        assert_eq!(stack(&[a.clone()]).unwrap(), a);
        assert!(matches!(stack(&[]), Err(Error::EmptyInput(_))));
        let c = make_windows(&s, 300, 48, 1).unwrap();
        assert!(matches!(stack(&[a, c]), Err(Error::Shape(_))));
    }

    fn toy_set(n: usize, weeks: usize) -> SeriesSet {
        let len = weeks * WEEK_STEPS;
        SeriesSet::new(
            (0..n)
                .map(|i| Series {
                    id: format!("s{i}"),
                    aggregate_type: AggregateType::Single,
                    start: MONDAY_JAN_4,
                    step_seconds: STEP_SECONDS,
                    values: (0..len).map(|t| (t + i) as f64).collect(),
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn split_targets_are_disjoint_and_counted() {
        let set = toy_set(2, 8);
        let split = split_by_time(&set, 4, 2, 2, 336, 48).unwrap();
        // Validation covers exactly 2*336 target timestamps.
        let n_v = 2 * WEEK_STEPS;
        assert_eq!(split.validation.len(), 2 * (n_v - 48 + 1));
        assert_eq!(split.test.len(), 2 * (n_v - 48 + 1));
        assert_eq!(split.train.len(), 2 * (4 * WEEK_STEPS - 336 - 48 + 1));
        let max_train = split.train.target_start.iter().max().unwrap() + 47 * STEP_SECONDS;
        let min_val = *split.validation.target_start.iter().min().unwrap();
        let max_val = split.validation.target_start.iter().max().unwrap() + 47 * STEP_SECONDS;
        let min_test = *split.test.target_start.iter().min().unwrap();
        assert!(max_train < min_val);
        assert!(max_val < min_test);
    }

    #[test]
    fn split_requires_enough_data() {
        // 8 weeks of data cannot host a 5/2/2 split.
        let set = toy_set(1, 8);
        assert!(matches!(
            split_by_time(&set, 5, 2, 2, 336, 48),
            Err(Error::InsufficientData { .. })
        ));
        // The training segment must leave room for one window after the
        // first k steps of lag history.
        assert!(matches!(
            split_by_time(&set, 1, 2, 2, 336, 48),
            Err(Error::InsufficientData { .. })
        ));
    }

    #[test]
    fn subsample_identity_and_counts() {
        let s = series(400 + 7 * 12, MONDAY_JAN_4);
        let d = make_windows(&s, 336, 48, 1).unwrap();
        assert_eq!(subsample(&d, 1), d);
        let kept = subsample(&d, 12);
        // 101 rows of series 0: ranks 0, 12, 24, ... are kept.
        assert_eq!(d.len(), 101);
        assert_eq!(kept.len(), 9);
        assert_eq!(kept.x_lags.row(1), d.x_lags.row(12));
    }

    #[test]
    fn subsample_offsets_partition_the_rows() {
        let set = toy_set(3, 8);
        let split = split_by_time(&set, 4, 2, 2, 336, 48).unwrap();
        let d = &split.train;
        let total: usize = (0..5)
            .map(|off| subsample_with(d, 5, |_| off).len())
            .sum();
        assert_eq!(total, d.len());
        // Per-series kept counts stay within one row of m/factor.
        let kept = subsample(d, 5);
        for series in 0..3 {
            let m = d.rows_of_series(series).len() as f64;
            let got = kept.rows_of_series(series).len() as f64;
            assert!((got - m / 5.0).abs() <= 1.0);
        }
    }

    #[test]
    fn fused_subsample_matches_post_hoc() {
        let set = toy_set(3, 8);
        let plain = split_by_time(&set, 4, 2, 2, 336, 48).unwrap();
        let fused = split_by_time_subsampled(&set, 4, 2, 2, 336, 48, 12).unwrap();
        assert_eq!(fused.train, subsample(&plain.train, 12));
        assert_eq!(fused.validation, plain.validation);
    }

    #[test]
    fn records_are_grouped_sorted_and_validated() {
        let mut records = Vec::new();
        for i in (0..480).rev() {
            records.push((MONDAY_JAN_4 + i * STEP_SECONDS, "a".to_string(), 1.0, None));
            records.push((
                MONDAY_JAN_4 + i * STEP_SECONDS,
                "b".to_string(),
                2.0,
                Some(AggregateType::SmallTs),
            ));
        }
        let set = SeriesSet::from_records(records).unwrap();
        assert_eq!(set.len(), 2);
        assert_eq!(set.series()[0].id, "a");
        assert_eq!(set.series()[1].aggregate_type, AggregateType::SmallTs);
        assert_eq!(set.series_len(), 480);
    }

    #[test]
    fn records_detect_gap_duplicate_and_empty() {
        let base: Vec<_> = (0..10)
            .filter(|&i| i != 4)
            .map(|i| (i as i64 * STEP_SECONDS, "a".to_string(), 1.0, None))
            .collect();
        assert!(matches!(
            SeriesSet::from_records(base),
            Err(Error::Gap { timestamp, .. }) if timestamp == 4 * STEP_SECONDS
        ));

        let mut dup: Vec<_> = (0..10)
            .map(|i| (i as i64 * STEP_SECONDS, "a".to_string(), 1.0, None))
            .collect();
        dup.push((3 * STEP_SECONDS, "a".to_string(), 9.0, None));
        assert!(matches!(SeriesSet::from_records(dup), Err(Error::Duplicate { .. })));

        assert!(matches!(
            SeriesSet::from_records(Vec::new()),
            Err(Error::EmptyInput(_))
        ));

        let bad = vec![(0, "a".to_string(), f64::NAN, None)];
        assert!(matches!(
            SeriesSet::from_records(bad),
            Err(Error::NonFiniteValue { .. })
        ));
    }
}
