use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum CvError {
    #[error("invalid fold count: k = {k} with n = {n} points (need 2 <= k <= n)")]
    InvalidFoldCount { k: usize, n: usize },

    #[error("invalid chunk: {0}")]
    InvalidChunk(String),

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("{learner} requires {expected} outcomes")]
    LabelRequired {
        learner: &'static str,
        expected: &'static str,
    },

    #[error("loss {loss} cannot score prediction {prediction} against outcome {outcome}")]
    LossMismatch {
        loss: &'static str,
        prediction: &'static str,
        outcome: &'static str,
    },

    #[error("model is untrained: {0}")]
    UntrainedModel(&'static str),

    #[error("saved state does not match learner configuration: {0}")]
    StateMismatch(String),

    #[error("model state unrecoverable: {0}")]
    InconsistentState(String),

    #[error("feeding order for fold {fold} is not a permutation of the training points: {reason}")]
    InvalidOrder { fold: usize, reason: String },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("degenerate range: {0}")]
    DegenerateRange(String),

    #[error("invalid size: {0}")]
    InvalidSize(String),

    #[error("line {line}: {kind}")]
    Parse { line: usize, kind: ParseErrorKind },

    #[error("at recursion range ({s}, {e}): {source}")]
    AtNode {
        s: usize,
        e: usize,
        #[source]
        source: Box<CvError>,
    },
}

/// Specific failure inside one line of sparse text input.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseErrorKind {
    #[error("unparsable label {0:?}")]
    Label(String),
    #[error("token {0:?} is not an index:value pair")]
    MissingColon(String),
    #[error("unparsable feature index {0:?}")]
    Index(String),
    #[error("feature index must be >= 1, got 0")]
    ZeroIndex,
    #[error("feature index {index} does not increase (previous {previous})")]
    NonMonotoneIndex { previous: usize, index: usize },
    #[error("unparsable feature value {0:?}")]
    Value(String),
    #[error("non-finite value {0:?}")]
    NonFinite(String),
    #[error("feature index {index} exceeds expected dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("read failure: {0}")]
    Io(String),
}

impl CvError {
    pub(crate) fn at_node(self, s: usize, e: usize) -> Self {
        match self {
            // innermost range is the informative one
            err @ CvError::AtNode { .. } => err,
            other => CvError::AtNode {
                s,
                e,
                source: Box::new(other),
            },
        }
    }
}

pub type Result<T, E = CvError> = std::result::Result<T, E>;
