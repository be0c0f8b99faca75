use thiserror::Error;

/// Errors raised by the grid, extension, smoothing and embedding routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate grid: {0}")]
    DegenerateGrid(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("anchors not τ-extendable: |{vi} - {vj}| > {tau} * {dist}")]
    NotExtendable { vi: f64, vj: f64, tau: f64, dist: f64 },

    #[error("lacunarity violated: {0}")]
    LacunarityViolated(String),

    #[error("not a local section at scale {a}: {reason}")]
    NotLocalSection { a: f64, reason: String },

    #[error("genericity sampling failed after {retries} retries; last failing condition ({condition})")]
    RetriesExhausted { retries: usize, condition: u8 },

    #[error("anchor Lipschitz budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("overlapping marker cubes at {0:?} and {1:?}")]
    OverlappingMarkers(Vec<f64>, Vec<f64>),

    #[error("malformed CSV: {0}")]
    Format(String),

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
