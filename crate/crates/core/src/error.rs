use thiserror::Error;

use crate::marked_graph::ValidationReport;

/// How an error should be reported by a front end.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// The input could not be read at all.
    Malformed,
    /// The input was well formed but violates a precondition.
    Domain,
    /// An invariant the library maintains itself was broken.
    Internal,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("letter {letter} is outside rank {rank}")]
    RankExceeded { letter: char, rank: usize },
    #[error("rank mismatch: expected {expected}, found {found}")]
    RankMismatch { expected: usize, found: usize },
    #[error("not an automorphism: {0}")]
    NotAnAutomorphism(String),
    #[error("invalid marked graph: {0}")]
    Invalid(ValidationReport),
    #[error("edge set contains a cycle")]
    NotAForest,
    #[error("unknown edge id {0:?}")]
    UnknownEdge(String),
    #[error("unknown vertex id {0:?}")]
    UnknownVertex(String),
    #[error("the identity word has no stretch")]
    IdentityWord,
    #[error("schedule must be strictly decreasing inside (0,1)")]
    ScheduleNotDecreasing,
    #[error("invalid face: {0}")]
    InvalidFace(String),
    #[error("subgraph is not the image of a candidate loop")]
    NotACandidateImage,
    #[error("edge set is not a spanning tree")]
    NotASpanningTree,
    #[error("window exhausted before the first certificate")]
    WindowExhausted,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("internal invariant failed: {0}")]
    Internal(String),
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Parse(_) | Error::Json(_) | Error::RankExceeded { .. } => ErrorClass::Malformed,
            Error::Internal(_) => ErrorClass::Internal,
            _ => ErrorClass::Domain,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
