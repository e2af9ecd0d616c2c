use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("not a group: {0}")]
    NotAGroup(String),
    #[error("subset is not closed under inversion and conjugation")]
    NotClosed,
    #[error("element index {index} out of range (order {bound})")]
    IndexOutOfRange { index: usize, bound: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("syntax error at {line}:{col}: expected {expected}")]
    Syntax { line: usize, col: usize, expected: String },
    #[error("invalid diagram: {0}")]
    Validation(String),
    #[error("unknown catalog name `{0}`")]
    UnknownName(String),
    #[error("invalid coloring: {0}")]
    Coloring(String),
    #[error("resource bound exceeded: {0}")]
    ResourceBound(String),
    #[error("invalid move: {0}")]
    InvalidMove(String),
    #[error("color mismatch: {0}")]
    ColorMismatch(String),
    #[error("loop {0} is not innermost")]
    NotInnermost(usize),
    #[error("loop {loop_id} has degree {degree}, expected at most 3")]
    BadDegree { loop_id: usize, degree: usize },
    #[error("no admissible reduction: {0}")]
    NoProgress(String),
    #[error("no rewrite pattern matches: {0}")]
    UnmatchedPattern(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("{0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
