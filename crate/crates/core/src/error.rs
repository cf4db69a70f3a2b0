use std::fmt;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Which side of a formal context a name belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElementKind {
    Object,
    Attribute,
}

impl fmt::Display for ElementKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ElementKind::Object => f.write_str("object"),
            ElementKind::Attribute => f.write_str("attribute"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("{kind} `{name}` is not in the context")]
    NotInContext { kind: ElementKind, name: String },

    #[error("duplicate {kind} `{name}`")]
    DuplicateElement { kind: ElementKind, name: String },

    #[error("invalid attribute token `{0}`")]
    InvalidToken(String),

    #[error("concept oracle refuses contexts with {objects} objects (limit {limit})")]
    OracleScaleExceeded { objects: usize, limit: usize },

    #[error("context is not purified: {kind} `{first}` and `{second}` are indistinguishable")]
    NotPurified {
        kind: ElementKind,
        first: String,
        second: String,
    },

    #[error("object lists differ between apposed contexts")]
    ObjectSetMismatch,

    #[error("attribute `{0}` appears in both apposed contexts")]
    AttributeCollision(String),

    #[error("order violation: {0}")]
    OrderViolation(String),

    #[error("concept index {index} out of range (lattice has {len} concepts)")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("concept {0} has an empty extent")]
    EmptyExtent(usize),

    #[error("concept {0} has an empty intent")]
    EmptyIntent(usize),

    #[error("threshold {0} outside (0, 1]")]
    ThresholdOutOfRange(f64),

    #[error("{line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("{line}:{column}: undeclared name `{name}`")]
    Undeclared { line: usize, column: usize, name: String },

    #[error("{line}:{column}: duplicate declaration of `{name}`")]
    DuplicateDeclaration { line: usize, column: usize, name: String },

    #[error("successor relation contains a cycle through concept {0}")]
    CyclicOrder(usize),

    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("scale `{tag}`: cannot compare value `{value}`")]
    ScaleValue { tag: String, value: String },

    #[error("invalid scale definition: {0}")]
    ScaleDefinition(String),

    #[error("link graph: {0}")]
    GraphIntegrity(String),

    #[error("operation requires {expected} scope")]
    WrongScope { expected: &'static str },

    #[error("session mode is fixed to {current}")]
    WrongMode { current: &'static str },

    #[error("concept {0} has no name and cannot be displayed")]
    NotDisplayable(usize),

    #[error("browsing protocol violation: {0}")]
    ProtocolViolation(String),

    #[error("unknown label `{0}`")]
    UnknownLabel(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn syntax(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Syntax {
            line,
            column,
            message: message.into(),
        }
    }
}
