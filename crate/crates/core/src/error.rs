use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("malformed config: field `{field}`: {reason}")]
    MalformedConfig { field: String, reason: String },

    #[error("{a} is not invertible modulo {modulus} (gcd {gcd})")]
    NotInvertible { a: u64, modulus: u64, gcd: u64 },

    #[error("{what} = {value} exceeds the cap of {cap}")]
    SizeLimit { what: &'static str, value: u64, cap: u64 },

    #[error("square ({x}, {y}) already holds a queen of the base configuration")]
    Occupied { x: usize, y: usize },

    #[error("internal consistency failure: {0}")]
    Internal(String),

    #[error("greedy selection found only {achieved} of {requested} disjoint flips")]
    FlipsExhausted { requested: usize, achieved: usize },

    #[error("flips share a queen: {0}")]
    NotDisjoint(String),

    #[error("config is not the base configuration for any k")]
    NotBase,

    #[error("cannot reconstruct flips: queen at ({x}, {y}) {reason}")]
    Reconstruction { x: usize, y: usize, reason: String },

    #[error("count overflowed 64 bits")]
    Overflow,

    #[error("invalid Latin square: {0}")]
    InvalidLatinSquare(String),

    #[error("invalid hypergraph: {0}")]
    InvalidHypergraph(String),

    #[error("hypergraph is not regular and uniform; the matching bound does not apply")]
    Irregular,

    #[error("search budget of {budget} nodes exceeded after {visited} nodes")]
    BudgetExceeded { budget: u64, visited: u64 },

    #[error("quadrature did not reach tolerance {tolerance:e} within {evaluations} evaluations")]
    Quadrature { tolerance: f64, evaluations: usize },

    #[error("config is not a valid classical solution")]
    NotASolution,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Stable machine-readable code used by the CLI error envelope.
    pub fn code(&self) -> &'static str {
        match self {
            Error::MalformedConfig { .. } => "malformed_config",
            Error::NotInvertible { .. } => "not_invertible",
            Error::SizeLimit { .. } => "size_limit",
            Error::Occupied { .. } => "occupied",
            Error::Internal(_) => "internal",
            Error::FlipsExhausted { .. } => "flips_exhausted",
            Error::NotDisjoint(_) => "not_disjoint",
            Error::NotBase => "not_base",
            Error::Reconstruction { .. } => "reconstruction",
            Error::Overflow => "overflow",
            Error::InvalidLatinSquare(_) => "invalid_latin_square",
            Error::InvalidHypergraph(_) => "invalid_hypergraph",
            Error::Irregular => "irregular",
            Error::BudgetExceeded { .. } => "budget_exceeded",
            Error::Quadrature { .. } => "quadrature",
            Error::NotASolution => "not_a_solution",
            Error::InvalidArgument(_) => "invalid_argument",
        }
    }
}
