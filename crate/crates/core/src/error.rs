use crate::sat::Clause;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("clause ({0}, {1}, {2}) must have three pairwise distinct 1-based indices")]
    InvalidClause(usize, usize, usize),

    #[error("clause {clause} refers to a qubit beyond n = {n_qubits}")]
    ClauseOutOfRange { clause: Clause, n_qubits: usize },

    #[error("duplicate clause {0}")]
    DuplicateClause(Clause),

    #[error("instance needs at least one qubit")]
    NoQubits,

    #[error("bit values must be +1 or -1, found {0}")]
    InvalidBit(i64),

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("basis index {index} does not fit in {n_qubits} qubits")]
    BasisIndexOutOfRange { index: usize, n_qubits: usize },

    #[error("exhaustive search over {n_qubits} qubits exceeds the cap of {cap} (raise the exhaustive cap to allow it)")]
    ExhaustiveCapExceeded { n_qubits: usize, cap: usize },

    #[error("invalid generator parameters: {0}")]
    InvalidGenerator(String),

    #[error("no instance with the requested solution count after {attempts} attempts")]
    GenerationFailed { attempts: usize },

    #[error("no operator assigned to clause {0}")]
    MissingClauseOperator(Clause),

    #[error("pair operator map is not symmetric at ({0}, {1})")]
    AsymmetricPairMap(Clause, Clause),

    #[error("operator is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dimension {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("matrix dimension {dim} exceeds the diagonalization cap of {cap} (raise it with --dim-cap)")]
    DimensionCapExceeded { dim: usize, cap: usize },

    #[error("invalid cut: {0}")]
    InvalidCut(String),

    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("gap-ratio window holds {0} eigenvalues, need at least 3")]
    WindowTooShort(usize),

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("eigendecomposition failed: {0}")]
    Eigen(String),

    #[error("at s = {s}: {source}")]
    AtSchedulePoint { s: f64, source: Box<Error> },

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
