use thiserror::Error;

/// Every failure the engine can report.
///
/// Resource and size caps are kept apart from logical outcomes: a tableau
/// that runs out of budget never answers "unsatisfiable".
#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("empty input")]
    EmptyInput,

    #[error("tableau node budget of {budget} exceeded")]
    NodeBudget { budget: u64 },

    #[error("size cap of {limit} {what} exceeded")]
    SizeCap { what: &'static str, limit: usize },

    #[error("oracle enumeration budget of {budget} exceeded")]
    OracleBudget { budget: usize },

    #[error("not a clause: {0}")]
    NotAClause(String),

    #[error("not a term: {0}")]
    NotATerm(String),

    #[error("term has complementary propositional literals: {0}")]
    InconsistentTerm(String),

    #[error("theory must be propositional, got {0}")]
    NotPropositional(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("world {world} does not exist (model has {worlds} worlds)")]
    UnknownWorld { world: usize, worlds: usize },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("unsupported compilation schema {found}, expected {expected}")]
    Schema { found: u64, expected: u64 },

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for the budget/cap family, which the CLI maps to its own exit code.
    pub fn is_resource_cap(&self) -> bool {
        matches!(
            self,
            Error::NodeBudget { .. } | Error::SizeCap { .. } | Error::OracleBudget { .. }
        )
    }

    /// Shifts the line of a syntax error; used when a formula comes from one
    /// line of a larger file.
    pub(crate) fn at_line(self, line: usize) -> Error {
        match self {
            Error::Syntax {
                column, message, ..
            } => Error::Syntax {
                line,
                column,
                message,
            },
            Error::EmptyInput => Error::Syntax {
                line,
                column: 1,
                message: "empty formula".into(),
            },
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
