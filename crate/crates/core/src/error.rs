use thiserror::Error;

pub type Result<T, E = IcqtError> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IcqtError {
    #[error("kind mismatch: cannot take the tensor product of a {left} and a {right}")]
    KindMismatch {
        left: &'static str,
        right: &'static str,
    },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("dimension {dim} does not factor as {left} x {right}")]
    NonFactorizable {
        dim: usize,
        left: usize,
        right: usize,
    },

    #[error("state is not normalized (squared norm {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },

    #[error("operator is not Hermitian (max |H - H^dag| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("operator is not unitary (max |U^dag U - I| = {deviation:e})")]
    NotUnitary { deviation: f64 },

    #[error("matrix is not square ({rows} x {cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension must be positive")]
    ZeroDimension,

    #[error("pointer needs at least {system} positions, apparatus has {apparatus}")]
    PointerCapacity { system: usize, apparatus: usize },

    #[error("program needs {expected} branches, got {actual}")]
    ProgramArity { expected: usize, actual: usize },

    #[error("{condition} condition violated (commutator norm {norm:e}); factorized evolution unavailable")]
    FactorizationPrecondition { condition: &'static str, norm: f64 },

    #[error("branch {branch} carries weight {weight:e}; no outcome statistics")]
    EmptyBranch { branch: usize, weight: f64 },

    #[error("state of dimension {required} exceeds the capacity cap {max}")]
    Capacity { required: usize, max: usize },

    #[error("qubit {register}{index} out of range (register has {size} qubits)")]
    QubitOutOfRange {
        register: char,
        index: usize,
        size: usize,
    },

    #[error("invalid gate: {0}")]
    InvalidGate(String),

    #[error("register sizes violate n_A = n, n_P = 2n (n = {system}, n_A = {apparatus}, n_P = {programming})")]
    RegisterLaw {
        system: usize,
        apparatus: usize,
        programming: usize,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}
