//! Core algorithms for global short-term load forecasting.
//!
//! The crate covers the full modeling pipeline for pools of electricity
//! demand series sampled on a half-hourly grid:
//!
//! * [`data`] — series containers, calendar encoding, rolling-window dataset
//!   assembly, time-based splits and deterministic subsampling;
//! * [`synth`] — a seeded generator for consumer and transformer-station
//!   surrogate load series;
//! * [`model`] — a residual-block MLP forecaster with exogenous calendar
//!   inputs, analytic gradients and exact parameter accounting;
//! * [`training`] — mini-batch Adam training with plateau/step learning-rate
//!   schedules and best-epoch selection;
//! * [`features`] / [`clustering`] — descriptive series features and a
//!   deterministic split-based cluster hierarchy;
//! * [`localization`] — per-cluster fine-tuning of the global model and gated
//!   per-series prediction;
//! * [`ensemble`] — per-series greedy forecast ensembles plus the fixed-level
//!   selection strategies;
//! * [`metrics`] — MASE/MAPE/NMAE evaluation against a seasonal naive
//!   baseline.
//!
//! Everything here is deterministic given explicit seeds and runs without
//! `std` (IO, file formats and the CLI live in the companion crate).

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod clustering;
pub mod data;
pub mod ensemble;
mod error;
pub mod features;
mod fmath;
pub mod localization;
pub mod metrics;
pub mod model;
pub mod synth;
pub mod training;

pub use error::Error;

/// Crate-wide result type.
pub type Result<T> = core::result::Result<T, Error>;

/// Splits one base seed into independent per-purpose seeds.
///
/// SplitMix64 finalizer; the mapping is bijective per stream so distinct
/// streams never collide for a fixed base.
pub fn derive_seed(base: u64, stream: u64) -> u64 {
    let mut z = base ^ stream.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
