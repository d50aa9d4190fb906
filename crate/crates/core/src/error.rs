use alloc::string::String;

/// Errors produced by the forecasting pipeline.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A series is missing one or more half-hour steps.
    #[error("series `{id}`: gap in the 30-minute grid at timestamp {timestamp}")]
    Gap { id: String, timestamp: i64 },

    /// The same (id, timestamp) pair occurs more than once.
    #[error("series `{id}`: duplicate observation at timestamp {timestamp}")]
    Duplicate { id: String, timestamp: i64 },

    /// A load value is NaN or infinite.
    #[error("series `{id}`: non-finite value at timestamp {timestamp}")]
    NonFiniteValue { id: String, timestamp: i64 },

    /// No input rows / series / datasets where at least one is required.
    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    /// A timestamp does not fall on the 30-minute grid.
    #[error("timestamp {timestamp} is not on the 30-minute grid")]
    OffGrid { timestamp: i64 },

    /// Series too short for the requested windows/splits.
    #[error("insufficient data: need at least {needed} steps, have {got}")]
    InsufficientData { needed: usize, got: usize },

    /// Matrix dimensions disagree with the expected shape.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// A non-finite value appeared during numeric computation.
    #[error("non-finite value encountered in {0}")]
    Numeric(&'static str),

    /// Invalid model or training configuration.
    #[error("invalid configuration: {0}")]
    Config(&'static str),

    /// Requested more clusters than there are series.
    #[error("cannot build {requested} clusters from {available} series")]
    Cardinality { requested: usize, available: usize },

    /// A sample references a series the hierarchy/selection does not know.
    #[error("unknown series index {index}")]
    UnknownSeries { index: usize },

    /// A cluster fine-tune job received no training rows.
    #[error("cluster (level {level}, cluster {cluster}) has no training rows")]
    EmptyCluster { level: usize, cluster: usize },

    /// The seasonal naive baseline has zero error on this window, so MASE
    /// is undefined for it.
    #[error("degenerate window: seasonal naive MAE is zero")]
    DegenerateWindow,

    /// Every window of a series was degenerate; no MASE can be reported.
    #[error("series `{id}`: all evaluation windows are degenerate")]
    DegenerateSeries { id: String },

    /// MAPE is undefined when an actual value is zero.
    #[error("zero actual value; MAPE is undefined")]
    ZeroActual,

    /// NMAE is undefined for a window with non-positive mean load.
    #[error("non-positive mean actual value; NMAE is undefined")]
    Normalization,
}
