//! End-to-end query evaluation: annotate, trim, enumerate.

use crate::annotate::{
    annotate, annotate_cheapest, annotate_eps, annotate_multi, Annotation, AnnotationResult, CostModel,
    MultiTargetAnnotation, PreprocessingSteps,
};
use crate::automaton::Automaton;
use crate::enumerate::{Enumerator, MemorylessEnumerator, OutputWalk};
use crate::error::QueryError;
use crate::graph::{Database, VertexId, Walk};
use crate::trim::{resumable_trim, trim, ResumableIndex, TrimmedIndex};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QueryStatus {
    Answered,
    NoMatchingWalk,
}

/// Lazy stream of answers in canonical order.
pub struct QueryAnswers<'db> {
    db: &'db Database,
    status: QueryStatus,
    lambda: Option<u64>,
    preprocessing: PreprocessingSteps,
    enumerator: Option<Enumerator<'db, TrimmedIndex>>,
    counter: Option<Automaton>,
}

impl<'db> QueryAnswers<'db> {
    fn from_result(db: &'db Database, aut: &Automaton, result: Result<AnnotationResult, QueryError>) -> Self {
        match result {
            Ok(r) => {
                let mut index = trim(db, &r.annotation.back);
                let mut preprocessing = r.annotation.steps;
                preprocessing.trim = index.steps;
                index.steps = 0;
                let root = r.root_certificate(aut);
                let en = Enumerator::new(
                    db,
                    index,
                    r.annotation.cost.clone(),
                    r.annotation.source,
                    r.target,
                    r.lambda,
                    root,
                );
                QueryAnswers {
                    db,
                    status: QueryStatus::Answered,
                    lambda: Some(r.lambda),
                    preprocessing,
                    enumerator: Some(en),
                    counter: None,
                }
            }
            Err(_) => QueryAnswers {
                db,
                status: QueryStatus::NoMatchingWalk,
                lambda: None,
                preprocessing: PreprocessingSteps::default(),
                enumerator: None,
                counter: None,
            },
        }
    }

    pub fn status(&self) -> QueryStatus {
        self.status
    }

    /// Length (or cost) shared by all answers.
    pub fn lambda(&self) -> Option<u64> {
        self.lambda
    }

    pub fn preprocessing_steps(&self) -> PreprocessingSteps {
        self.preprocessing
    }

    /// Enumeration steps spent so far.
    pub fn enumeration_steps(&self) -> u64 {
        self.enumerator.as_ref().map_or(0, Enumerator::steps)
    }

    /// Keeps per-answer step counts; see [`Enumerator::record_delays`].
    pub fn record_delays(mut self) -> Self {
        self.enumerator = self.enumerator.take().map(Enumerator::record_delays);
        self
    }

    /// Steps spent before each answer emitted so far, if recorded.
    pub fn per_output_steps(&self) -> &[u64] {
        self.enumerator.as_ref().map_or(&[], Enumerator::per_output_steps)
    }

    /// Steps spent on the most recent answer.
    pub fn last_output_steps(&self) -> u64 {
        self.enumerator.as_ref().map_or(0, Enumerator::last_output_steps)
    }

    pub fn max_output_steps(&self) -> u64 {
        self.enumerator.as_ref().map_or(0, Enumerator::max_output_steps)
    }

    /// Attaches the number of accepting runs of `aut` to every answer.
    pub fn with_multiplicity(mut self, aut: &Automaton) -> Self {
        self.counter = Some(aut.rebind(self.db.alphabet()).eliminate_eps());
        self
    }
}

impl Iterator for QueryAnswers<'_> {
    type Item = OutputWalk;

    fn next(&mut self) -> Option<OutputWalk> {
        let walk = self.enumerator.as_mut()?.next_walk()?;
        let multiplicity = self.counter.as_ref().map(|a| a.count_runs(self.db, &walk));
        Some(OutputWalk { walk, multiplicity })
    }
}

/// All shortest walks from `s` to `t` matching `aut`. ε-transitions are
/// handled by the ε-aware traversal; labels missing from the database are
/// fine and simply never match.
pub fn run_query<'db>(db: &'db Database, aut: &Automaton, s: VertexId, t: VertexId) -> QueryAnswers<'db> {
    let aut = aut.rebind(db.alphabet());
    let result = if aut.has_epsilon() {
        annotate_eps(db, &aut, s, t)
    } else {
        annotate(db, &aut, s, t)
    };
    QueryAnswers::from_result(db, &aut, result)
}

/// [`run_query`] where every answer carries its multiplicity.
pub fn enumerate_with_multiplicity<'db>(
    db: &'db Database,
    aut: &Automaton,
    s: VertexId,
    t: VertexId,
) -> QueryAnswers<'db> {
    run_query(db, aut, s, t).with_multiplicity(aut)
}

/// All cheapest matching walks under strictly positive edge costs.
pub fn run_query_cheapest<'db>(
    db: &'db Database,
    aut: &Automaton,
    s: VertexId,
    t: VertexId,
    costs: &[u64],
) -> Result<QueryAnswers<'db>, QueryError> {
    let aut = aut.rebind(db.alphabet()).eliminate_eps();
    match annotate_cheapest(db, &aut, s, t, costs) {
        Err(QueryError::NoMatchingWalk) => Ok(QueryAnswers::from_result(
            db,
            &aut,
            Err(QueryError::NoMatchingWalk),
        )),
        Err(e) => Err(e),
        ok => Ok(QueryAnswers::from_result(db, &aut, ok)),
    }
}

/// One exhaustive traversal from `s` serving several targets. The trimmed
/// index is shared; each target gets its own enumeration over it.
pub struct MultiTargetQuery<'db> {
    db: &'db Database,
    aut: Automaton,
    annotation: MultiTargetAnnotation,
    index: TrimmedIndex,
}

impl<'db> MultiTargetQuery<'db> {
    pub fn new(db: &'db Database, aut: &Automaton, s: VertexId, targets: &[VertexId]) -> Self {
        let aut = aut.rebind(db.alphabet());
        let annotation = annotate_multi(db, &aut, s, targets);
        let index = trim(db, &annotation.annotation.back);
        MultiTargetQuery {
            db,
            aut,
            annotation,
            index,
        }
    }

    pub fn targets(&self) -> impl Iterator<Item = (VertexId, Option<u64>)> + '_ {
        self.annotation.lambdas.iter().copied()
    }

    pub fn lambda(&self, t: VertexId) -> Option<u64> {
        self.annotation.annotation.lambda_for(&self.aut, t)
    }

    pub fn annotation(&self) -> &Annotation {
        &self.annotation.annotation
    }

    /// Answers for `t` in canonical order; empty when nothing matches.
    pub fn answers(&mut self, t: VertexId) -> Enumerator<'_, &mut TrimmedIndex> {
        let a = &self.annotation.annotation;
        let (lambda, root) = match a.lambda_for(&self.aut, t) {
            Some(l) => (l, a.root_certificate(&self.aut, t, l)),
            None => (0, Vec::new()),
        };
        Enumerator::new(
            self.db,
            &mut self.index,
            CostModel::Unit,
            a.source,
            t,
            lambda,
            root,
        )
    }
}

/// Preprocessed state for memoryless enumeration: the annotation and the
/// immutable [`ResumableIndex`].
pub struct MemorylessQuery<'db> {
    db: &'db Database,
    aut: Automaton,
    annotation: Annotation,
    index: ResumableIndex,
    target: VertexId,
}

impl<'db> MemorylessQuery<'db> {
    pub fn new(db: &'db Database, aut: &Automaton, s: VertexId, t: VertexId) -> Result<Self, QueryError> {
        let aut = aut.rebind(db.alphabet());
        let r = if aut.has_epsilon() {
            annotate_eps(db, &aut, s, t)?
        } else {
            annotate(db, &aut, s, t)?
        };
        Ok(Self::from_annotation(db, aut, r))
    }

    pub fn cheapest(
        db: &'db Database,
        aut: &Automaton,
        s: VertexId,
        t: VertexId,
        costs: &[u64],
    ) -> Result<Self, QueryError> {
        let aut = aut.rebind(db.alphabet()).eliminate_eps();
        let r = annotate_cheapest(db, &aut, s, t, costs)?;
        Ok(Self::from_annotation(db, aut, r))
    }

    fn from_annotation(db: &'db Database, aut: Automaton, r: AnnotationResult) -> Self {
        let index = resumable_trim(db, &r.annotation.back);
        MemorylessQuery {
            db,
            aut,
            annotation: r.annotation,
            index,
            target: r.target,
        }
    }

    pub fn index(&self) -> &ResumableIndex {
        &self.index
    }

    pub fn annotation(&self) -> &Annotation {
        &self.annotation
    }

    pub fn enumerator(&self) -> MemorylessEnumerator<'_> {
        MemorylessEnumerator::new(self.db, &self.aut, &self.index, &self.annotation, self.target)
            .expect("a target reached by the traversal")
    }

    pub fn first(&self) -> Option<Walk> {
        self.enumerator().first()
    }

    pub fn next_output(&self, previous: &Walk) -> Result<Option<Walk>, QueryError> {
        self.enumerator().next_output(previous)
    }
}
