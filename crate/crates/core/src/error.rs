use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid quantum numbers: {0}")]
    InvalidQuantumNumbers(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("quadrature needs at least {required} nodes, got {given}")]
    InsufficientNodes { required: usize, given: usize },

    #[error("quadrature not converged: {coarse} ({coarse_nodes} nodes) vs {fine} ({fine_nodes} nodes)")]
    NotConverged {
        coarse: f64,
        fine: f64,
        coarse_nodes: usize,
        fine_nodes: usize,
    },

    #[error("eigen-solver did not converge: {0}")]
    EigenNotConverged(String),

    #[error("singular multipole system for J = {j}: {detail}")]
    SingularSystem { j: i32, detail: String },

    #[error("non-positive weight c_{index} = {value} for J = {j}")]
    NonPositiveWeight { j: i32, index: usize, value: f64 },

    #[error("measurement closure violated: outcome probabilities sum to {sum}")]
    ClosureViolation { sum: f64 },

    #[error("invalid direction set: {0}")]
    InvalidDirectionSet(String),

    #[error("unknown platonic set {0:?} (expected tetrahedron or octahedron)")]
    UnknownPlatonic(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
