use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Error, Debug)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    /// Probability weight would leak past the top Fock level.
    #[error("truncation error: {what} leaves {weight:e} weight at or beyond the top level (tolerance {tail_tol:e}); try dim >= {required_dim}")]
    Truncation {
        what: String,
        weight: f64,
        tail_tol: f64,
        required_dim: usize,
    },

    #[error("herald outcome {outcome:?} is impossible (conditional norm {norm:e})")]
    HeraldImpossible { outcome: (usize, usize), norm: f64 },

    #[error("input is an eigenstate of the orthogonalizing operator (output norm {norm:e})")]
    Eigenstate { norm: f64 },

    #[error("supplied mean value {supplied} differs from the measured expectation {measured}")]
    MeanMismatch {
        supplied: num_complex::Complex64,
        measured: num_complex::Complex64,
    },

    #[error("degenerate denominator: |<C2>| = {0:e}")]
    DegenerateDenominator(f64),

    #[error("singular configuration: {0}")]
    SingularConfiguration(String),

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("data error at sample {index} (phase {phase}, x {x}): {reason}")]
    Data {
        index: usize,
        phase: f64,
        x: f64,
        reason: String,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
