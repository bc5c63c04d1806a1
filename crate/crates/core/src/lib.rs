//! Enumeration of all shortest walks matching a regular path query over a
//! multi-labeled graph database, with output-linear preprocessing and a delay
//! that depends only on the answer length and the automaton.

pub mod annotate;
pub mod automaton;
pub mod bench;
pub mod enumerate;
pub mod error;
pub mod fixtures;
pub mod graph;
pub mod oracle;
pub mod query;
pub mod trim;

pub use annotate::{
    annotate, annotate_cheapest, annotate_eps, annotate_multi, Annotation, AnnotationResult, BackMap,
    CostModel, LengthMap, MultiTargetAnnotation, PreprocessingSteps,
};
pub use automaton::{
    compile_regex, parse_nfa, parse_regex, thompson, Automaton, AutomatonBuilder, Regex, StateId,
};
pub use enumerate::{enumerate, next_output, CallRecord, Enumerator, MemorylessEnumerator, OutputWalk};
pub use error::{AutomatonError, GraphError, OracleError, QueryError};
pub use graph::{
    load_database, parse_walk, Alphabet, Database, DatabaseBuilder, Edge, EdgeId, Label, VertexId, Walk,
    WalkFormat,
};
pub use query::{
    enumerate_with_multiplicity, run_query, run_query_cheapest, MemorylessQuery, MultiTargetQuery,
    QueryAnswers, QueryStatus,
};
pub use trim::{resumable_trim, trim, RestartableQueue, ResumableIndex, ResumableSlot, TrimmedIndex};
