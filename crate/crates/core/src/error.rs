use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("operator is not Hermitian: max |A - A^H| = {deviation:e} exceeds tolerance {tolerance:e}")]
    NotHermitian { deviation: f64, tolerance: f64 },

    #[error("operator has a non-finite entry at ({row}, {col})")]
    NonFiniteEntry { row: usize, col: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("{n_qubits} qubits exceeds the dimension cap of {cap} qubits")]
    DimensionCap { n_qubits: usize, cap: usize },

    #[error("Pauli string touches site {site} more than once")]
    DuplicateSite { site: usize },

    #[error("Pauli string site {site} out of range for {n_qubits} qubits")]
    SiteOutOfRange { site: usize, n_qubits: usize },

    #[error("invalid Pauli string {0:?}")]
    PauliSyntax(String),

    #[error("eigensolver failed to converge for a {dim}x{dim} operator")]
    EigenNonConvergence { dim: usize },

    #[error("singular value decomposition failed for a {dim}x{dim} matrix")]
    SvdNonConvergence { dim: usize },

    #[error("inverse temperature must be finite and nonnegative, got {0}")]
    InvalidBeta(f64),

    #[error("dimension must be at least 2, got {0}")]
    DimensionTooSmall(usize),

    #[error("duplicate parameter label {0:?}")]
    DuplicateLabel(String),

    #[error("unknown parameter label {0:?}")]
    UnknownLabel(String),

    #[error("parameter index {index} out of range for {count} parameters")]
    ParameterIndex { index: usize, count: usize },

    #[error("non-finite value in {context} at eigenpair ({j}, {k})")]
    NonFinitePair { context: &'static str, j: usize, k: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("measurement basis is not unitary: max |B^H B - I| = {0:e}")]
    NonUnitaryBasis(f64),

    #[error("fidelity {0} exceeds 1 beyond numerical tolerance")]
    FidelityAboveOne(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parameter {label:?} has zero thermal variance and cannot be estimated from this bound")]
    NotEstimable { label: String },

    #[error("charge {label:?} does not commute with the fixed Hamiltonian (relative commutator norm {norm:e})")]
    ChargeNotConserved { label: String, norm: f64 },

    #[error("quantum Fisher information matrix is singular")]
    SingularQfi,
}

pub type Result<T> = std::result::Result<T, Error>;
