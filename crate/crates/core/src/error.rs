use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("column has zero variance in coordinate {coordinate}")]
    DegenerateColumn { coordinate: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("sample length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("gram matrix is already centered")]
    AlreadyCentered,

    #[error("{routine} did not converge within {iterations} iterations")]
    NonConvergence { routine: &'static str, iterations: usize },

    #[error("insufficient sample: need at least {needed}, found {found}")]
    InsufficientSample { needed: usize, found: usize },

    #[error("insufficient resamples: need at least {needed}, found {found}")]
    InsufficientResamples { needed: usize, found: usize },

    #[error("bandwidth grid is empty")]
    EmptyGrid,

    #[error("estimates sum to zero")]
    ZeroSum,

    #[error("null variance estimate is not positive ({0})")]
    NonPositiveVariance(f64),

    #[error("alpha {0} outside the admissible range")]
    AlphaOutOfRange(f64),

    #[error("eigenvalue {0} is negative beyond the clamping tolerance")]
    NegativeEigenvalue(f64),

    #[error("measure {0} does not support vector-valued columns")]
    UnsupportedMeasure(&'static str),

    #[error("predictor {0} has zero norm")]
    DegeneratePredictor(usize),

    #[error("all model weights are zero")]
    ZeroModel,

    #[error("invalid column: {0}")]
    InvalidColumn(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("internal consistency check failed: {0}")]
    InternalConsistency(String),
}
