use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("{quantity} must be non-negative, got {value}")]
    Domain { quantity: &'static str, value: f64 },

    /// Stroke does not exceed the elastic elongation of the tendon.
    #[error("joint not engaged: stroke is {slack_mm} mm short of the tendon elongation")]
    NotEngaged { slack_mm: f64 },

    #[error("tendon radius {tendon_mm} mm does not fit inner radius {lumen_mm} mm")]
    TendonDoesNotFit { tendon_mm: f64, lumen_mm: f64 },

    #[error("trial data row {row}: {message}")]
    TrialRow { row: u64, message: String },

    #[error("no cycles found: stroke range {range_mm} mm never exceeds the hysteresis band {band_mm} mm")]
    NoCycles { range_mm: f64, band_mm: f64 },

    #[error("insufficient engagement: deflection never sustains {threshold_deg} deg")]
    InsufficientEngagement { threshold_deg: f64 },

    #[error("series length mismatch: {model} model vs {measured} measured samples")]
    LengthMismatch { model: usize, measured: usize },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("tendon modulus is not identifiable: {0}")]
    NonIdentifiable(String),

    #[error("golden-section search did not converge after {iterations} iterations, bracket [{lower}, {upper}] MPa")]
    NotConverged {
        iterations: usize,
        lower: f64,
        upper: f64,
    },

    #[error("{feature}: {message}")]
    Toolpath { feature: String, message: String },

    #[error("feature overlap: hole [{hole_start}, {hole_end}] mm intersects notch {notch} [{notch_start}, {notch_end}] mm")]
    Overlap {
        notch: usize,
        hole_start: f64,
        hole_end: f64,
        notch_start: f64,
        notch_end: f64,
    },

    #[error("invalid recipe: {0}")]
    InvalidRecipe(String),

    #[error("{stage} stage failed: {source}")]
    Stage {
        stage: &'static str,
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Whether the error comes from I/O or from parsing an input document,
    /// as opposed to a domain or validation failure.
    pub fn is_input_error(&self) -> bool {
        if let Error::Stage { source, .. } = self {
            return source.is_input_error();
        }
        matches!(
            self,
            Error::Io(_) | Error::Json(_) | Error::Csv(_) | Error::TrialRow { .. }
        )
    }
}
