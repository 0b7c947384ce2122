//! Error type shared by every module in the crate.

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong while loading data or running an analysis.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("failed to read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed header: {0}")]
    MalformedHeader(String),

    #[error("line {line}: expected {expected} fields, found {found}")]
    RaggedRow {
        line: usize,
        expected: usize,
        found: usize,
    },

    #[error("line {line}, column {column} (model {model:?}): cell must be 0 or 1, found {value:?}")]
    CellParse {
        line: usize,
        column: usize,
        model: String,
        value: String,
    },

    #[error("duplicate model name {0:?}")]
    DuplicateModel(String),

    #[error("matrix has no {0}")]
    EmptyMatrix(&'static str),

    #[error("model index {index} out of range (matrix has {len} models)")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("unknown model name {0:?}")]
    UnknownModel(String),

    #[error("the two matrices share no model names")]
    EmptyModelIntersection,

    #[error("triplet indices must be pairwise distinct")]
    NonDistinctIndices,

    #[error("degenerate line: the outer points share the same first-distribution accuracy")]
    DegenerateLine,

    #[error("triplet residual denominator is zero (no accuracy span between the outer models)")]
    ZeroDenominator,

    #[error("empty point stream")]
    EmptyPointStream,

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("infeasible: {0}")]
    Infeasible(String),
}

impl Error {
    /// True when the failure describes an analysis that cannot proceed on
    /// otherwise well-formed input (empty search region, degenerate data),
    /// as opposed to malformed input or I/O trouble.
    pub fn is_infeasibility(&self) -> bool {
        matches!(
            self,
            Error::Infeasible(_)
                | Error::DegenerateFit(_)
                | Error::DegenerateLine
                | Error::ZeroDenominator
        )
    }
}
