use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("grid bounds must be finite with a < b, got a = {a}, b = {b}")]
    InvalidBounds { a: f64, b: f64 },

    #[error("at least {min} vertices required, got {n}")]
    TooFewVertices { n: usize, min: usize },

    #[error("vertex measure must be positive, mu[{index}] = {value}")]
    NonPositiveMeasure { index: usize, value: f64 },

    #[error("edge conductance must be nonnegative, w({i},{j}) = {value}")]
    NegativeConductance { i: usize, j: usize, value: f64 },

    #[error("edge length must be positive, len({i},{j}) = {value}")]
    NonPositiveLength { i: usize, j: usize, value: f64 },

    #[error("self-loop at vertex {0} is not allowed")]
    SelfLoop(usize),

    #[error("duplicate edge between vertices {i} and {j}")]
    DuplicateEdge { i: usize, j: usize },

    #[error("vertex index {index} out of range for space with {n} vertices")]
    VertexOutOfRange { index: usize, n: usize },

    #[error("vertices {p} and {q} are not connected; geodesic distance undefined")]
    DisconnectedPair { p: usize, q: usize },

    #[error("operation requires a connected state space")]
    DisconnectedSpace,

    #[error("function has length {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is {rows}x{cols}, expected {n}x{n}")]
    NotSquare { rows: usize, cols: usize, n: usize },

    #[error("operator is not positive: smallest eigenvalue {min_eigenvalue}")]
    NotPositive { min_eigenvalue: f64 },

    #[error("operator is not self-adjoint in the weighted inner product, asymmetry {residual}")]
    NotSelfAdjoint { residual: f64 },

    #[error("form matrix is not positive semidefinite, witness energy {energy}")]
    NotPositiveSemidefinite { energy: f64 },

    #[error("symmetric eigensolver failed to converge")]
    EigenFailed,

    #[error("linear solve failed; the system is numerically singular")]
    SingularSystem,

    #[error("time must be nonnegative, got {0}")]
    NegativeTime(f64),

    #[error("resolvent parameter must be positive, got alpha = {0}")]
    NonPositiveAlpha(f64),

    #[error("horizon must be positive, got {0}")]
    NonPositiveHorizon(f64),

    #[error("function must be nonzero")]
    ZeroFunction,

    #[error("wave-function vanishes at vertex {0}; the weighted space is degenerate")]
    DegenerateWaveFunction(usize),

    #[error("state space carries no vertex coordinates")]
    MissingCoordinates,

    #[error("not a Markov generator: positive off-diagonal entry H[{row},{col}] = {value}")]
    NotMarkovGenerator { row: usize, col: usize, value: f64 },

    #[error("chain has no stationary law: {reason}")]
    NoStationaryLaw { reason: String },

    #[error("at least one trial required")]
    NoTrials,

    #[error("time list must be nonempty")]
    EmptyTimes,

    #[error("at least one path required")]
    NoPaths,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
