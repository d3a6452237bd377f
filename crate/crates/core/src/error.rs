use thiserror::Error;

/// Errors produced by parsing, recognition, synthesis and aggregator checks.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("line {line}: variable {var} appears more than once in a clause")]
    RepeatedVariable { line: usize, var: u32 },

    #[error("variable {var} out of range (formula has {n} variables)")]
    VariableOutOfRange { var: u64, n: usize },

    #[error("header declares {declared} clauses but {found} were read")]
    ClauseCountMismatch { declared: usize, found: usize },

    #[error("arity mismatch: expected {expected}, found {found}")]
    ArityMismatch { expected: usize, found: usize },

    #[error("{what}: {requested} exceeds the cap of {limit}")]
    CapExceeded {
        what: &'static str,
        requested: u128,
        limit: u128,
    },

    #[error("domain is empty")]
    EmptyDomain,

    #[error("line {line}: row has length {found}, expected {expected}")]
    RaggedRow {
        line: usize,
        expected: usize,
        found: usize,
    },

    #[error("line {line}, column {column}: expected '0' or '1'")]
    NonBinary { line: usize, column: usize },

    #[error("line {line}: duplicate row {row}")]
    DuplicateRow { line: usize, row: String },

    #[error("domain is degenerate on coordinates {}", fmt_fixed(.fixed))]
    DegenerateDomain { fixed: Vec<(usize, bool)> },

    #[error("index {index} out of range 1..={n}")]
    BadIndex { index: usize, n: usize },

    #[error("invalid clause: {0}")]
    InvalidClause(String),

    #[error("unknown function `{name}` for arity {arity}")]
    UnknownFunction { name: String, arity: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("component {component} is not unanimous")]
    NonUnanimous { component: usize },

    #[error("domain has {size} members; at least {needed} required")]
    TooFewMembers { size: usize, needed: usize },

    #[error("invalid variable partition: {0}")]
    BadPartition(String),

    #[error("internal verification failed: {0}")]
    Internal(String),
}

impl Error {
    /// True for errors caused by a size cap rather than by malformed input.
    pub fn is_cap(&self) -> bool {
        matches!(self, Error::CapExceeded { .. })
    }

    pub(crate) fn syntax(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Syntax {
            line,
            column,
            message: message.into(),
        }
    }
}

fn fmt_fixed(fixed: &[(usize, bool)]) -> String {
    fixed
        .iter()
        .map(|(j, b)| format!("x{j}={}", u8::from(*b)))
        .collect::<Vec<_>>()
        .join(", ")
}

pub type Result<T> = std::result::Result<T, Error>;
