use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("variable spaces do not match: {0} vs {1}")]
    SpaceMismatch(String, String),

    #[error("coordinate {coord} is not valid in space {space}")]
    InvalidCoordinate { coord: usize, space: String },

    #[error("invalid chart index {chart} for ambient dimension {n}")]
    InvalidChart { chart: usize, n: usize },

    #[error("invalid sequence: {0}")]
    InvalidSequence(String),

    #[error("staircase condition violated in block {block}: entry {entry} < required {bound}")]
    StaircaseViolation {
        block: usize,
        entry: usize,
        bound: usize,
    },

    #[error("word symbol {symbol} out of range 0..={max}")]
    SymbolOutOfRange { symbol: usize, max: usize },

    #[error("maximum entry {max_entry} exceeds bound {bound} for word length {length}")]
    EntryExceedsLength {
        max_entry: usize,
        bound: usize,
        length: usize,
    },

    #[error("zero polynomial has no smallest monomial")]
    ZeroPolynomial,

    #[error("matrix diagonal entry ({row},{row}) is zero")]
    ZeroDiagonal { row: usize },

    #[error(
        "diagonal dominance fails: entry ({row},{col}) is not larger than entry ({drow},{dcol})"
    )]
    DominanceViolation {
        row: usize,
        col: usize,
        drow: usize,
        dcol: usize,
    },

    #[error("pole order {pole} exceeds twist {twist}")]
    PoleExceedsTwist { pole: usize, twist: usize },

    #[error("dehomogenization identity failed in chart {chart}: residual {residual}")]
    IdentityFailure { chart: usize, residual: String },

    #[error("duplicate tuple in input: {0}")]
    DuplicateInput(String),

    #[error("polynomial is not homogeneous of degree {expected}")]
    NotHomogeneous { expected: usize },

    #[error("jet order bound {k} is below the required {required}")]
    JetOrderTooSmall { k: usize, required: usize },

    #[error("verification failed: {0}")]
    VerificationFailed(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
