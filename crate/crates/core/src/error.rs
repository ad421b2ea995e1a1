use thiserror::Error;

use crate::kernels::CoefficientKind;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("ties present in column {column}")]
    TiesPresent { column: usize },
    #[error("operation not supported for coefficient {0}")]
    UnsupportedKind(CoefficientKind),
    #[error("reference enumeration limited to n <= {limit} for {kind} (got n = {n})")]
    TooLargeForReference {
        kind: CoefficientKind,
        n: usize,
        limit: usize,
    },
    #[error("not a permutation of 1..{n}")]
    BadPermutation { n: usize },
    #[error("column has zero variance")]
    DegenerateColumn,
    #[error("brute-force enumeration infeasible: n = {n} exceeds {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("omega coefficient unavailable for {kind} r = {r} b = {b}")]
    MissingOmega {
        kind: CoefficientKind,
        r: usize,
        b: usize,
    },
    #[error("enumeration infeasible (about {work:.3e} kernel evaluations); {hint}")]
    Infeasible { work: f64, hint: String },
    #[error("calibration unavailable: {0}")]
    CalibrationUnavailable(String),
    #[error("Monte Carlo size B = {0} is below the minimum of 10000")]
    InfeasibleB(usize),
    #[error("calibration schema mismatch: {0}")]
    SchemaMismatch(String),
    #[error("corrupt or unreadable file: {0}")]
    CorruptFile(String),
    #[error("calibration does not match statistic: {0}")]
    CalibrationMismatch(String),
    #[error("dimension p = {0} too small for the maximum statistic (need p >= 3)")]
    DimensionTooSmall(usize),
    #[error("spectral constants missing from calibration")]
    MissingSpectral,
    #[error("bad Cauchy weights: {0}")]
    BadWeights(String),
    #[error("latent correlation block not positive definite after {0} attempts")]
    NotPositiveDefinite(usize),
    #[error("ragged rows: row {row} has {found} fields, expected {expected}")]
    RaggedRows {
        row: usize,
        found: usize,
        expected: usize,
    },
    #[error("non-numeric cell at row {row}, column {col}")]
    NonNumericCell { row: usize, col: usize },
    #[error("empty input file")]
    EmptyFile,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
