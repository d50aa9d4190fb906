//! Descriptive per-series features used for clustering.
//!
//! Eight features, always computed on the training segment only: mean,
//! variance, lag-1 autocorrelation, trend, linearity, seasonal strength at
//! the daily and weekly periods, and the coefficient of variation. A series
//! with (numerically) zero variance reports 0 for every variance-dependent
//! feature instead of NaN.

use alloc::vec::Vec;
use ndarray::Array2;

use crate::data::{Series, DAY_STEPS, WEEK_STEPS};
use crate::fmath;
use crate::{Error, Result};

/// Number of features per series.
pub const FEATURE_DIM: usize = 8;

/// The fixed feature list for one series.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct FeatureVector {
    pub mean: f64,
    pub variance: f64,
    /// Lag-1 sample autocorrelation.
    pub acf1: f64,
    /// R-squared of a linear fit on time.
    pub trend: f64,
    /// Coefficient of the linear term when the standardized series is
    /// regressed on an orthonormal quadratic polynomial basis in time.
    pub linearity: f64,
    /// Seasonal strength at the daily period (48 steps), in [0, 1].
    pub seasonal_daily: f64,
    /// Seasonal strength at the weekly period (336 steps), in [0, 1].
    pub seasonal_weekly: f64,
    /// Coefficient of variation.
    pub cov: f64,
}

impl FeatureVector {
    pub fn as_array(&self) -> [f64; FEATURE_DIM] {
        [
            self.mean,
            self.variance,
            self.acf1,
            self.trend,
            self.linearity,
            self.seasonal_daily,
            self.seasonal_weekly,
            self.cov,
        ]
    }
}

/// Treats variance below this (relative) floor as exactly zero.
fn is_degenerate(variance: f64, mean: f64) -> bool {
    variance <= 1e-18 * (1.0 + mean * mean)
}

/// Seasonal strength of the centered series at period `p`:
/// `1 - sum(residual^2) / sum(centered^2)` under a seasonal-means
/// decomposition, clipped to [0, 1].
fn seasonal_strength(centered: &[f64], p: usize) -> f64 {
    let mut phase_sum = alloc::vec![0.0; p];
    let mut phase_n = alloc::vec![0usize; p];
    for (t, &d) in centered.iter().enumerate() {
        phase_sum[t % p] += d;
        phase_n[t % p] += 1;
    }
    let mut ss_res = 0.0;
    let mut ss_tot = 0.0;
    for (t, &d) in centered.iter().enumerate() {
        let seasonal = phase_sum[t % p] / phase_n[t % p] as f64;
        let r = d - seasonal;
        ss_res += r * r;
        ss_tot += d * d;
    }
    if ss_tot <= 0.0 {
        return 0.0;
    }
    (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
}

/// Extracts the feature vector of `s` from its first `train_len` values.
///
/// Requires at least two full weeks so the weekly seasonal strength is
/// defined.
pub fn extract_features(s: &Series, train_len: usize) -> Result<FeatureVector> {
    if train_len < 2 * WEEK_STEPS || train_len > s.len() {
        return Err(Error::InsufficientData {
            needed: 2 * WEEK_STEPS,
            got: train_len.min(s.len()),
        });
    }
    let y = &s.values[..train_len];
    let n = y.len() as f64;
    let mean = y.iter().sum::<f64>() / n;
    let centered: Vec<f64> = y.iter().map(|&v| v - mean).collect();
    let ss: f64 = centered.iter().map(|&d| d * d).sum();
    let variance = ss / n;

    if is_degenerate(variance, mean) {
        return Ok(FeatureVector {
            mean,
            variance,
            acf1: 0.0,
            trend: 0.0,
            linearity: 0.0,
            seasonal_daily: 0.0,
            seasonal_weekly: 0.0,
            cov: 0.0,
        });
    }

    let acf1 = centered
        .windows(2)
        .map(|w| w[0] * w[1])
        .sum::<f64>()
        / ss;

    // Trend: squared correlation between the series and time.
    let t_mean = (train_len as f64 - 1.0) / 2.0;
    let mut st2 = 0.0;
    let mut sty = 0.0;
    for (t, &d) in centered.iter().enumerate() {
        let dt = t as f64 - t_mean;
        st2 += dt * dt;
        sty += dt * d;
    }
    let trend = (sty * sty) / (st2 * ss);

    // Linearity: <z, p1> for the orthonormal linear basis vector p1 and the
    // z-scored series.
    let sigma = fmath::sqrt(variance);
    let p1_norm = fmath::sqrt(st2);
    let linearity = sty / (p1_norm * sigma);

    let seasonal_daily = seasonal_strength(&centered, DAY_STEPS);
    let seasonal_weekly = seasonal_strength(&centered, WEEK_STEPS);
    let cov = if mean == 0.0 { 0.0 } else { sigma / fmath::abs(mean) };

    let fv = FeatureVector {
        mean,
        variance,
        acf1,
        trend,
        linearity,
        seasonal_daily,
        seasonal_weekly,
        cov,
    };
    if fv.as_array().iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric("feature extraction"));
    }
    Ok(fv)
}

/// Per-column z-scoring parameters.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct StandardizeParams {
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
}

impl StandardizeParams {
    /// Applies the stored transform to one feature vector.
    pub fn apply(&self, features: &[f64]) -> Vec<f64> {
        features
            .iter()
            .zip(self.means.iter().zip(&self.stds))
            .map(|(&x, (&m, &s))| if s > 0.0 { (x - m) / s } else { 0.0 })
            .collect()
    }
}

/// Z-scores each column with its population statistics; a (numerically)
/// constant column maps to all zeros and records `std = 0`.
pub fn standardize(features: &Array2<f64>) -> Result<(Array2<f64>, StandardizeParams)> {
    let n = features.nrows();
    if n < 2 {
        return Err(Error::InsufficientData { needed: 2, got: n });
    }
    let mut means = Vec::with_capacity(features.ncols());
    let mut stds = Vec::with_capacity(features.ncols());
    let mut out = features.clone();
    for (c, col) in features.columns().into_iter().enumerate() {
        let mean = col.sum() / n as f64;
        let var = col.iter().map(|&x| (x - mean) * (x - mean)).sum::<f64>() / n as f64;
        let std = fmath::sqrt(var);
        let degenerate = std <= 1e-9 * (1.0 + fmath::abs(mean));
        let std = if degenerate { 0.0 } else { std };
        for r in 0..n {
            out[[r, c]] = if degenerate { 0.0 } else { (features[[r, c]] - mean) / std };
        }
        means.push(mean);
        stds.push(std);
    }
    Ok((out, StandardizeParams { means, stds }))
}
