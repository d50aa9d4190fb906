//! Seeded synthetic load-series generator.
//!
//! Consumer series follow a shared seasonal profile (daily and weekly
//! sinusoids on a constant floor, damped on weekends) scaled per consumer and
//! perturbed by i.i.d. multiplicative noise. A pool-wide persistent factor
//! (an AR(1) log-level, like temperature) moves all series together from
//! step to step: it decorrelates over a week but stays predictable hours
//! ahead, so aggregation smooths the idiosyncratic noise but not the common
//! component, the same way summing real meters does. Transformer-station
//! series are exact elementwise sums of freshly drawn hidden consumers.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal, Normal};

use crate::data::{AggregateType, Series, SeriesSet, DAY_STEPS, STEP_SECONDS, WEEK_STEPS};
use crate::fmath;

/// 2009-07-06 00:00:00 UTC, a Monday; synthetic series start on a clean week.
pub const SYNTH_START: i64 = 1_246_838_400;

const TAU: f64 = core::f64::consts::TAU;
/// Spread of the per-consumer lognormal scale.
const SCALE_SIGMA: f64 = 0.4;
/// Spread of the per-step multiplicative lognormal noise.
const NOISE_SIGMA: f64 = 0.3;
/// Per-step persistence of the common log-level factor: correlation ~0.62
/// over a day and ~0.03 over a week.
const WEATHER_RHO: f64 = 0.99;
/// Stationary standard deviation of the common log-level factor.
const WEATHER_SIGMA: f64 = 0.1;

/// Shared deterministic profile at grid step `t` (step 0 is Monday 00:00).
fn profile(t: usize) -> f64 {
    let daily = fmath::sin(TAU * (t % DAY_STEPS) as f64 / DAY_STEPS as f64 + 3.9);
    let weekly = fmath::sin(TAU * (t % WEEK_STEPS) as f64 / WEEK_STEPS as f64 + 1.3);
    let base = 1.0 + 0.5 * daily + 0.25 * weekly;
    let weekend = (t / DAY_STEPS) % 7 >= 5;
    base * if weekend { 0.8 } else { 1.0 }
}

/// Pool-wide multiplicative per-step factors: `exp` of a stationary AR(1).
fn draw_common_factors(rng: &mut ChaCha8Rng, n_steps: usize) -> Vec<f64> {
    let innovation = Normal::new(0.0, WEATHER_SIGMA * fmath::sqrt(1.0 - WEATHER_RHO * WEATHER_RHO))
        .expect("valid sigma");
    let start = Normal::new(0.0, WEATHER_SIGMA).expect("valid sigma");
    let mut w: f64 = start.sample(rng);
    (0..n_steps)
        .map(|t| {
            if t > 0 {
                w = WEATHER_RHO * w + innovation.sample(rng);
            }
            libm::exp(w)
        })
        .collect()
}

/// Draws one consumer series of `n_steps` values under the shared common
/// factors.
fn draw_consumer(rng: &mut ChaCha8Rng, common: &[f64], n_steps: usize) -> Vec<f64> {
    let scale_dist = LogNormal::new(0.0, SCALE_SIGMA).expect("valid sigma");
    let noise_dist = LogNormal::new(0.0, NOISE_SIGMA).expect("valid sigma");
    let scale: f64 = scale_dist.sample(rng);
    (0..n_steps)
        .map(|t| {
            let noise: f64 = noise_dist.sample(rng);
            (profile(t) * common[t] * scale * noise).max(0.0)
        })
        .collect()
}

/// Draws `n_consumers` hidden constituents and their exact elementwise sum
/// (summed left to right in draw order).
pub fn draw_aggregate(
    rng: &mut ChaCha8Rng,
    common: &[f64],
    n_consumers: usize,
    n_steps: usize,
) -> (Vec<Vec<f64>>, Vec<f64>) {
    let constituents: Vec<Vec<f64>> = (0..n_consumers)
        .map(|_| draw_consumer(rng, common, n_steps))
        .collect();
    let mut sum = alloc::vec![0.0; n_steps];
    for c in &constituents {
        for (acc, v) in sum.iter_mut().zip(c) {
            *acc += v;
        }
    }
    (constituents, sum)
}

/// Generates `n_per_type` series per aggregate type over `n_weeks` weeks.
///
/// Deterministic for a fixed seed: two calls with identical arguments yield
/// bit-identical sets. Requires `n_per_type >= 1` and `n_weeks >= 3`.
pub fn generate_synthetic(seed: u64, n_per_type: usize, n_weeks: usize) -> SeriesSet {
    assert!(n_per_type >= 1, "need at least one series per type");
    assert!(n_weeks >= 3, "need at least three weeks of data");
    let n_steps = n_weeks * WEEK_STEPS;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let common = draw_common_factors(&mut rng, n_steps);
    let mut series = Vec::with_capacity(4 * n_per_type);
    for agg in AggregateType::ALL {
        for i in 0..n_per_type {
            let values = if agg == AggregateType::Single {
                draw_consumer(&mut rng, &common, n_steps)
            } else {
                draw_aggregate(&mut rng, &common, agg.group_size(), n_steps).1
            };
            series.push(Series {
                id: format!("{}_{i:03}", agg.as_str()),
                aggregate_type: agg,
                start: SYNTH_START,
                step_seconds: STEP_SECONDS,
                values,
            });
        }
    }
    SeriesSet::new(series).expect("generated series are aligned and finite")
}

/// Helper for naming synthetic series; exposed for manifest round-trips.
pub fn synthetic_id(agg: AggregateType, index: usize) -> String {
    format!("{}_{index:03}", agg.as_str())
}
