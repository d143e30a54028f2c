use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix of size {rows}x{cols} exceeds the supported limit {max}")]
    DimensionLimit { rows: usize, cols: usize, max: usize },
    #[error("matrix is not Hermitian (defect {0:.3e})")]
    NotHermitian(f64),
    #[error("matrix is not positive semidefinite (eigenvalue {0:.3e})")]
    NotPositive(f64),
    #[error("symbol is not contractive (boundary norm {0:.6})")]
    NotContractive(f64),
    #[error("point outside the closed unit disk: |z| = {0}")]
    OutsideDisk(f64),
    #[error("incompatible windows: {0}")]
    WindowMismatch(String),
    #[error("operator is not isometric on the interior (defect {0:.3e})")]
    NotIsometric(f64),
    #[error("truncation too small: {0}")]
    TruncationTooSmall(String),
    #[error("empty kernel: {0}")]
    EmptyKernel(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("set is aperiodic")]
    Aperiodic,
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
