//! CSV dataset files and the generation manifest.
//!
//! Schema: `timestamp,id,value[,agg]` with RFC 3339 UTC timestamps on the
//! 30-minute grid. Values are written in scientific notation with 17
//! significant digits so a round trip is bit-exact.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use chrono::{DateTime, Utc};
use gridcast_core::data::{AggregateType, SeriesSet};
use serde::{Deserialize, Serialize};

/// Formats a float for data files: decimal scientific with 17 significant
/// digits, enough for an exact f64 round trip.
pub fn fmt_data(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn fmt_timestamp(ts: i64) -> String {
    DateTime::<Utc>::from_timestamp(ts, 0)
        .expect("grid timestamps are representable")
        .format("%Y-%m-%dT%H:%M:%SZ")
        .to_string()
}

/// Writes `set` in the canonical CSV schema (series-major, time-ordered).
pub fn write_csv(path: &Path, set: &SeriesSet) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let file = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = BufWriter::new(file);
    writeln!(w, "timestamp,id,value,agg")?;
    for series in set.series() {
        let agg = series.aggregate_type.as_str();
        for (i, &value) in series.values.iter().enumerate() {
            writeln!(
                w,
                "{},{},{},{}",
                fmt_timestamp(series.timestamp_at(i)),
                series.id,
                fmt_data(value),
                agg
            )?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Loads a dataset CSV into an aligned series set.
///
/// Rows may arrive in any order. The `agg` column is optional and defaults
/// to `single`. Grid gaps, duplicates and non-finite values are rejected.
pub fn load_csv(path: &Path) -> Result<SeriesSet> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_path(path)
        .with_context(|| format!("opening {}", path.display()))?;
    let headers = reader.headers()?.clone();
    let col = |name: &str| headers.iter().position(|h| h.trim() == name);
    let (ts_col, id_col, value_col) = match (col("timestamp"), col("id"), col("value")) {
        (Some(t), Some(i), Some(v)) => (t, i, v),
        _ => bail!(
            "{}: header must contain `timestamp,id,value` (optional `agg`)",
            path.display()
        ),
    };
    let agg_col = col("agg");

    let mut records = Vec::new();
    for (line, row) in reader.records().enumerate() {
        let row = row.with_context(|| format!("{}: reading row {}", path.display(), line + 2))?;
        let ts_text = row.get(ts_col).unwrap_or_default();
        let ts = DateTime::parse_from_rfc3339(ts_text)
            .with_context(|| format!("{}: bad timestamp `{ts_text}` on row {}", path.display(), line + 2))?
            .with_timezone(&Utc)
            .timestamp();
        let id = row.get(id_col).unwrap_or_default().to_string();
        let value: f64 = row
            .get(value_col)
            .unwrap_or_default()
            .trim()
            .parse()
            .with_context(|| format!("{}: bad value on row {}", path.display(), line + 2))?;
        let agg = match agg_col.and_then(|c| row.get(c)) {
            None | Some("") => None,
            Some(token) => Some(
                AggregateType::parse(token)
                    .with_context(|| format!("{}: bad agg `{token}` on row {}", path.display(), line + 2))?,
            ),
        };
        records.push((ts, id, value, agg));
    }
    Ok(SeriesSet::from_records(records)?)
}

/// Provenance record written next to a generated dataset.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct DataManifest {
    pub seed: u64,
    pub per_type: usize,
    pub weeks: usize,
    pub n_series: usize,
    pub start_timestamp: i64,
    pub step_seconds: i64,
}
