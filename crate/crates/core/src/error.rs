use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("unknown edge `{0}`")]
    UnknownEdge(String),
    #[error("duplicate edge id `{0}`")]
    DuplicateEdgeId(String),
    #[error("duplicate vertex `{0}`")]
    DuplicateVertex(String),
    #[error("edges do not form a walk")]
    NotAWalk,
    #[error("line {line}: {source}")]
    AtLine {
        line: usize,
        #[source]
        source: Box<GraphError>,
    },
}

impl GraphError {
    pub(crate) fn at_line(self, line: usize) -> Self {
        GraphError::AtLine {
            line,
            source: Box::new(self),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AutomatonError {
    #[error("regex syntax error at {position}: {reason}")]
    RegexSyntax { position: usize, reason: String },
    #[error("NFA file line {line}: {reason}")]
    NfaParse { line: usize, reason: String },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum QueryError {
    #[error("no walk from source to target matches the query")]
    NoMatchingWalk,
    #[error("automaton has epsilon-transitions; use the epsilon-aware variant")]
    EpsilonTransitions,
    #[error("edge `{0}` has no cost")]
    MissingCost(String),
    #[error("edge `{0}` has a non-positive cost")]
    NonPositiveCost(String),
    #[error("cost vector has {got} entries, expected {expected}")]
    CostLength { got: usize, expected: usize },
    #[error("invalid previous answer: {0}")]
    InvalidPrevious(String),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("instance too large for exhaustive search (more than {0} walks)")]
    InstanceTooLarge(usize),
}
