use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("permutation degree {0} is outside the supported range 1..={max}", max = crate::perm::MAX_DEGREE)]
    DegreeOutOfRange(usize),

    #[error("degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: usize, right: usize },

    #[error("mapping {0:?} is not a bijection on 0..n")]
    NotABijection(Vec<usize>),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("index {index} out of range 1..={len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("rank {rank} out of range for a space of size {size}")]
    RankOutOfRange { rank: u64, size: u64 },

    #[error("multilinearity M = {0} must be even here")]
    OddMultilinearity(usize),

    #[error("multilinearity M = {0} must be odd and at least 3 for the embedding")]
    NotEmbeddable(usize),

    #[error("dense dimension (N!)^M = {dim} exceeds the limit {limit}")]
    DenseGuard { dim: u64, limit: u64 },

    #[error("matrix is not Hermitian: asymmetry {asymmetry:e} exceeds tolerance {tolerance:e}")]
    NotHermitian { asymmetry: f64, tolerance: f64 },

    #[error("{what} mismatch at ({row}, {col}): expected {expected}, found {found}")]
    StructuralMismatch {
        what: &'static str,
        row: usize,
        col: usize,
        expected: String,
        found: String,
    },

    #[error("all-ones vector is not an eigenvector: residual {residual:e} exceeds {tolerance:e}")]
    OnesResidual { residual: f64, tolerance: f64 },

    #[error("positive semi-definiteness of {0} was not verified")]
    PsdUnverified(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("quadrature under-resolved: {nodes} nodes per axis, at least {required} required")]
    UnderResolved { nodes: usize, required: usize },

    #[error("evaluation grid under-resolved: spacing {spacing:e} exceeds {limit:e}")]
    GridUnderResolved { spacing: f64, limit: f64 },

    #[error("vector has norm {0}, expected a unit vector")]
    NonUnitVector(f64),

    #[error("{count} vectors cannot span a wedge in dimension {dim}")]
    TooManyVectors { count: usize, dim: usize },

    #[error("finite-difference step {0:e} underflows")]
    StepUnderflow(f64),

    #[error("field is empty")]
    EmptyField,

    #[error("input function has quadrature norm {0}, expected 1")]
    NotNormalized(f64),

    #[error("distinct-point loop satisfied every cone relation with k*eps_tilde = {budget} <= c/2 = {half_wedge}")]
    LoopCollapseViolation { budget: f64, half_wedge: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: u64,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
