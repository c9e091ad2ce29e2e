use thiserror::Error;

/// Errors produced while building, editing, or composing designs.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("cell ({row}, {col}) is already occupied")]
    OccupiedCell { row: usize, col: usize },

    #[error("cell ({row}, {col}) is outside a {side}x{side} array")]
    OutOfBounds { row: usize, col: usize, side: usize },

    #[error("block has {found} edges, array expects {expected}")]
    WrongBlockSize { expected: usize, found: usize },

    #[error("edges do not form a matching: point {0} is repeated")]
    NotAMatching(u32),

    #[error("degenerate edge on point {0}")]
    LoopEdge(u32),

    #[error("point {point} is outside the point set of size {n}")]
    PointOutOfRange { point: u32, n: usize },

    #[error("{0} map is not an injection into the target")]
    MapNotInjective(&'static str),

    #[error("a 1-factorization of K_{0} needs an even order")]
    OddOrder(usize),

    #[error("construction needs k > 1, got k = {0}")]
    KTooSmall(usize),

    #[error("invalid starter-adder: {0}")]
    InvalidStarter(String),

    #[error("invalid search parameter: {0}")]
    InvalidParameter(String),

    #[error("no OMD({n}, {k}) exists: {reason}")]
    NonExistent { n: usize, k: usize, reason: String },

    #[error("search budget of {budget} nodes exhausted while {task}")]
    SearchExhausted { task: String, budget: u64 },

    #[error("incoherent ingredients: {0}")]
    IncoherentIngredients(String),

    #[error("embedding collision at ({row}, {col})")]
    EmbeddingCollision { row: usize, col: usize },

    #[error("constructed design failed verification: {0}")]
    VerificationFailed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
