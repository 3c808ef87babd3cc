use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong while building a study, ingesting data or
/// running inference.
///
/// Row positions in diagnostics are 1-based data rows (the header is not
/// counted).
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid model `{model}`: {reason}")]
    InvalidModel { model: String, reason: String },
    #[error("a study needs at least one model")]
    EmptySpec,
    #[error("model weights sum to {sum}, expected 1")]
    WeightSum { sum: f64 },
    #[error("duplicate model name `{0}`")]
    DuplicateModelName(String),

    #[error("row {row} (`{row_id}`): stage {value} for model `{model}` is outside 0..={max}")]
    OutOfRangeStage {
        row: usize,
        row_id: String,
        model: String,
        value: i64,
        max: u32,
    },
    #[error("row {row} (`{row_id}`): expected {expected} stage values, found {found}")]
    RowArityMismatch {
        row: usize,
        row_id: String,
        expected: usize,
        found: usize,
    },
    #[error("too few rows: n = {n} but the study needs n > k = {k}")]
    TooFewRows { n: usize, k: usize },
    #[error("row {row}: duplicate row id `{row_id}`")]
    DuplicateRowId { row: usize, row_id: String },

    #[error("invalid pmf: {0}")]
    InvalidPmf(String),
    #[error("latent correlation matrix is not positive semi-definite (smallest eigenvalue {min_eigenvalue})")]
    NotPositiveSemiDefinite { min_eigenvalue: f64 },

    #[error("index {index} out of range for {len} models")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("need at least 2 rows to estimate moments, found {n}")]
    InsufficientRows { n: usize },

    #[error("score {score} outside [0, {m}]")]
    ScoreOutOfRange { score: f64, m: u32 },
    #[error("spec mismatch: {0}")]
    SpecMismatch(String),
    #[error("score {score} for model `{model}` is on the boundary of (0, {m}); the delta-method derivative does not exist there")]
    BoundaryScore { model: String, score: f64, m: u32 },
    #[error("surface grids need exactly 2 models, the study has {k}")]
    UnsupportedArity { k: usize },
    #[error("grid resolution must be at least 2, got {0}")]
    InvalidResolution(usize),
    #[error("unknown shape preset `{0}` (expected linear, concave, convex or s-shaped)")]
    UnknownPreset(String),

    #[error("sample variance of model `{model}` is zero")]
    DegenerateVariance { model: String },
    #[error("row id `{0}` not found")]
    RowNotFound(String),
    #[error("insufficient degrees of freedom ({df})")]
    InsufficientDf { df: i64 },
    #[error(
        "variance estimate is negative ({0}); the covariance matrix is not positive semi-definite"
    )]
    NegativeVariance(f64),
    #[error("both variances are zero")]
    BothVariancesZero,
    #[error("sample size {n} must exceed k = {k}")]
    InsufficientSample { n: usize, k: usize },
    #[error("degrees of freedom must be positive and finite, got {0}")]
    InvalidDf(f64),
    #[error("confidence level must lie in (0, 1), got {0}")]
    InvalidLevel(f64),
    #[error("significance level must lie in (0, 1), got {0}")]
    InvalidSignificance(f64),

    #[error("invalid simulation plan: {0}")]
    InvalidPlan(String),
}

impl Error {
    /// True for refusals that come from the statistics (zero variance,
    /// undefined gradient, no degrees of freedom) rather than from bad input.
    pub fn is_statistical_refusal(&self) -> bool {
        matches!(
            self,
            Error::DegenerateVariance { .. }
                | Error::BoundaryScore { .. }
                | Error::InsufficientDf { .. }
                | Error::BothVariancesZero
        )
    }
}
