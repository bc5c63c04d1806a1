//! Preprocessing traversal of the product of the database and the automaton.
//!
//! For every vertex `u` and state `p` the traversal records
//!
//! * `L_u[p]`: the length (or cost) of a shortest walk from the source to `u`
//!   whose label can reach `p`, and
//! * `B_u[p][i]`: the predecessor states `q` such that such a shortest walk
//!   ends with the `i`-th incoming edge of `u` and `p ∈ Δ(q, a)` for a label
//!   `a` of that edge.
//!
//! `B` lists are appended once per `(q, edge, label)` witness, so a list may
//! repeat a state; its length stays within `Σ_a |Δ⁻¹(a, p)|`.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fmt::Write as _;
use std::sync::Arc;

use crate::automaton::{Automaton, StateId};
use crate::error::QueryError;
use crate::graph::{Database, EdgeId, VertexId};

/// Immutable, cheaply shared list of states.
pub type StateList = Arc<[StateId]>;

const UNDEFINED: u64 = u64::MAX;

/// Partial maps `L_u : Q → ℕ`, one per vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LengthMap {
    n_states: usize,
    values: Vec<u64>,
}

impl LengthMap {
    fn new(n_vertices: usize, n_states: usize) -> Self {
        LengthMap {
            n_states,
            values: vec![UNDEFINED; n_vertices * n_states],
        }
    }

    #[inline]
    pub fn get(&self, u: VertexId, p: StateId) -> Option<u64> {
        let v = self.values[u.index() * self.n_states + p.index()];
        (v != UNDEFINED).then_some(v)
    }

    pub fn num_states(&self) -> usize {
        self.n_states
    }
}

/// Maps `B_u : Q × {0..indeg(u)-1} → list of states`, stored flat.
#[derive(Clone, Debug)]
pub struct BackMap {
    n_states: usize,
    in_start: Vec<usize>,
    slots: Vec<StateList>,
}

impl BackMap {
    #[inline]
    fn index(in_start: &[usize], n_states: usize, u: VertexId, p: StateId, i: usize) -> usize {
        let start = in_start[u.index()];
        let indeg = in_start[u.index() + 1] - start;
        start * n_states + p.index() * indeg + i
    }

    #[inline]
    pub fn get(&self, u: VertexId, p: StateId, i: usize) -> &[StateId] {
        &self.slots[Self::index(&self.in_start, self.n_states, u, p, i)]
    }

    #[inline]
    pub fn list(&self, u: VertexId, p: StateId, i: usize) -> &StateList {
        &self.slots[Self::index(&self.in_start, self.n_states, u, p, i)]
    }

    pub fn indeg(&self, u: VertexId) -> usize {
        self.in_start[u.index() + 1] - self.in_start[u.index()]
    }

    pub fn num_states(&self) -> usize {
        self.n_states
    }

    pub fn num_vertices(&self) -> usize {
        self.in_start.len() - 1
    }

    /// Total number of state entries over all lists.
    pub fn total_entries(&self) -> usize {
        self.slots.iter().map(|s| s.len()).sum()
    }
}

/// Edge weights used by the traversal and the enumeration.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub enum CostModel {
    /// Every edge counts 1: shortest walks.
    #[default]
    Unit,
    /// Positive per-edge costs: cheapest walks.
    Costs(Arc<[u64]>),
}

impl CostModel {
    #[inline]
    pub fn weight(&self, e: EdgeId) -> u64 {
        match self {
            CostModel::Unit => 1,
            CostModel::Costs(c) => c[e.index()],
        }
    }
}

/// Abstract operation counts of the preprocessing phase.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PreprocessingSteps {
    /// Map allocation: `|V|·|Q|` for `L` plus `|E|·|Q|` for `B`.
    pub init: u64,
    /// Expanded `(vertex, state)` pairs and scanned outgoing edges.
    pub expansions: u64,
    /// Executions of the innermost loop body, one per `(q, e, a, p)`.
    pub inner: u64,
    /// Slots scanned by trimming.
    pub trim: u64,
}

impl PreprocessingSteps {
    pub fn total(&self) -> u64 {
        self.init + self.expansions + self.inner + self.trim
    }
}

/// Result of the traversal shared by all variants.
#[derive(Clone, Debug)]
pub struct Annotation {
    pub source: VertexId,
    pub lengths: LengthMap,
    pub back: BackMap,
    pub cost: CostModel,
    pub steps: PreprocessingSteps,
}

impl Annotation {
    pub fn num_states(&self) -> usize {
        self.lengths.n_states
    }

    /// `{q ∈ F | L_t[q] = λ}`.
    pub fn root_certificate(&self, aut: &Automaton, target: VertexId, lambda: u64) -> Vec<StateId> {
        aut.finals()
            .iter()
            .copied()
            .filter(|&q| self.lengths.get(target, q) == Some(lambda))
            .collect()
    }

    /// Smallest `L_t[f]` over final states `f`, if any.
    pub fn lambda_for(&self, aut: &Automaton, target: VertexId) -> Option<u64> {
        aut.finals()
            .iter()
            .filter_map(|&f| self.lengths.get(target, f))
            .min()
    }

    /// Text dump of `L` and `B` per vertex. State lists are printed sorted.
    pub fn dump(&self, db: &Database) -> String {
        let mut out = String::new();
        let n = self.num_states();
        for u in db.vertices() {
            let _ = writeln!(out, "vertex {}", db.vertex_name(u));
            out.push_str("  L");
            for p in 0..n as u32 {
                match self.lengths.get(u, StateId(p)) {
                    Some(l) => {
                        let _ = write!(out, " {p}={l}");
                    }
                    None => {
                        let _ = write!(out, " {p}=_");
                    }
                }
            }
            out.push('\n');
            for p in 0..n as u32 {
                for i in 0..db.indeg(u) {
                    let mut list: Vec<u32> = self.back.get(u, StateId(p), i).iter().map(|q| q.0).collect();
                    list.sort_unstable();
                    let list: Vec<String> = list.iter().map(u32::to_string).collect();
                    let _ = writeln!(
                        out,
                        "  B {p} {i} {} [{}]",
                        db.edge_name(db.incoming(u)[i]),
                        list.join(",")
                    );
                }
            }
        }
        out
    }
}

/// Single-target annotation together with `λ`.
#[derive(Clone, Debug)]
pub struct AnnotationResult {
    pub annotation: Annotation,
    pub target: VertexId,
    pub lambda: u64,
}

impl AnnotationResult {
    pub fn root_certificate(&self, aut: &Automaton) -> Vec<StateId> {
        self.annotation.root_certificate(aut, self.target, self.lambda)
    }
}

/// Annotation from a traversal run to exhaustion, serving several targets.
#[derive(Clone, Debug)]
pub struct MultiTargetAnnotation {
    pub annotation: Annotation,
    /// `(t, λ_t)` in request order; `None` when no walk to `t` matches.
    pub lambdas: Vec<(VertexId, Option<u64>)>,
}

impl MultiTargetAnnotation {
    pub fn lambda(&self, t: VertexId) -> Option<u64> {
        self.lambdas.iter().find(|(v, _)| *v == t).and_then(|(_, l)| *l)
    }
}

struct Traversal<'a> {
    db: &'a Database,
    aut: &'a Automaton,
    n_states: usize,
    in_start: Vec<usize>,
    lengths: LengthMap,
    slots: Vec<Vec<StateId>>,
    next: Vec<(VertexId, StateId)>,
    level: u64,
    stop_target: Option<VertexId>,
    stop: bool,
    use_eps: bool,
    stamp: Vec<u64>,
    generation: u64,
    stack: Vec<StateId>,
    steps: PreprocessingSteps,
}

impl<'a> Traversal<'a> {
    fn new(db: &'a Database, aut: &'a Automaton, stop_target: Option<VertexId>) -> Self {
        let n_states = aut.num_states();
        let mut in_start = Vec::with_capacity(db.num_vertices() + 1);
        in_start.push(0);
        for v in db.vertices() {
            in_start.push(in_start.last().unwrap() + db.indeg(v));
        }
        let init = (db.num_vertices() * n_states + db.num_edges() * n_states) as u64;
        Traversal {
            db,
            aut,
            n_states,
            lengths: LengthMap::new(db.num_vertices(), n_states),
            slots: vec![Vec::new(); db.num_edges() * n_states],
            in_start,
            next: Vec::new(),
            level: 0,
            stop_target,
            stop: false,
            use_eps: aut.has_epsilon(),
            stamp: vec![0; n_states],
            generation: 0,
            stack: Vec::new(),
            steps: PreprocessingSteps {
                init,
                ..Default::default()
            },
        }
    }

    fn initial_states(&self) -> Vec<StateId> {
        if self.use_eps {
            self.aut.epsilon_closure(self.aut.initial())
        } else {
            self.aut.initial().to_vec()
        }
    }

    /// The body of the innermost loop for one state. Returns true when `p`
    /// sits at the current level at `u` (first reached or reached again).
    #[inline]
    fn visit_one(&mut self, u: VertexId, p: StateId, slot: usize, q: StateId) -> bool {
        let idx = u.index() * self.n_states + p.index();
        let current = self.lengths.values[idx];
        if current == UNDEFINED {
            self.lengths.values[idx] = self.level;
            self.next.push((u, p));
            if self.stop_target == Some(u) && self.aut.is_final(p) {
                self.stop = true;
            }
        } else if current != self.level {
            return false;
        }
        let b = BackMap::index(&self.in_start, self.n_states, u, p, slot);
        self.slots[b].push(q);
        true
    }

    /// Visits `p` at `u`, then every state ε-reachable from it. Each state is
    /// handled once per call.
    fn visit(&mut self, u: VertexId, p: StateId, slot: usize, q: StateId) {
        if !self.use_eps {
            self.visit_one(u, p, slot, q);
            return;
        }
        self.generation += 1;
        let aut = self.aut;
        self.stack.push(p);
        while let Some(r) = self.stack.pop() {
            if self.stamp[r.index()] == self.generation {
                continue;
            }
            self.stamp[r.index()] = self.generation;
            if self.visit_one(u, r, slot, q) {
                self.stack.extend_from_slice(aut.eps(r));
            }
        }
    }

    fn seed(&mut self, source: VertexId) -> Vec<StateId> {
        let initial = self.initial_states();
        for &p in &initial {
            self.lengths.values[source.index() * self.n_states + p.index()] = 0;
            self.next.push((source, p));
        }
        initial
    }

    fn run(&mut self, mut trace: Option<&mut Vec<Frontier>>) {
        let db = self.db;
        let aut = self.aut;
        while !self.next.is_empty() && !self.stop {
            self.level += 1;
            let current = std::mem::take(&mut self.next);
            if let Some(t) = trace.as_deref_mut() {
                t.push(current.clone());
            }
            for &(v, q) in &current {
                self.steps.expansions += 1;
                for &e in db.outgoing(v) {
                    self.steps.expansions += 1;
                    let u = db.tgt(e);
                    let slot = db.tgtidx(e) as usize;
                    for &a in db.labels(e) {
                        for &p in aut.delta(q, a) {
                            self.steps.inner += 1;
                            self.visit(u, p, slot, q);
                        }
                    }
                }
            }
        }
    }

    fn finish(self, source: VertexId, cost: CostModel) -> Annotation {
        let empty: StateList = Arc::from(Vec::new());
        let slots = self
            .slots
            .into_iter()
            .map(|s| if s.is_empty() { empty.clone() } else { Arc::from(s) })
            .collect();
        Annotation {
            source,
            lengths: self.lengths,
            back: BackMap {
                n_states: self.n_states,
                in_start: self.in_start,
                slots,
            },
            cost,
            steps: self.steps,
        }
    }
}

fn single_target(
    db: &Database,
    aut: &Automaton,
    s: VertexId,
    t: VertexId,
    trace: Option<&mut Vec<Frontier>>,
) -> Result<AnnotationResult, QueryError> {
    let mut tr = Traversal::new(db, aut, Some(t));
    let initial = tr.seed(s);
    if s == t && initial.iter().any(|&q| aut.is_final(q)) {
        return Ok(AnnotationResult {
            annotation: tr.finish(s, CostModel::Unit),
            target: t,
            lambda: 0,
        });
    }
    tr.run(trace);
    if !tr.stop {
        return Err(QueryError::NoMatchingWalk);
    }
    let lambda = tr.level;
    Ok(AnnotationResult {
        annotation: tr.finish(s, CostModel::Unit),
        target: t,
        lambda,
    })
}

/// Level-synchronous breadth-first traversal for an ε-free automaton.
/// Stops at the end of the first level where `t` is reached in a final
/// state.
pub fn annotate(
    db: &Database,
    aut: &Automaton,
    s: VertexId,
    t: VertexId,
) -> Result<AnnotationResult, QueryError> {
    if aut.has_epsilon() {
        return Err(QueryError::EpsilonTransitions);
    }
    single_target(db, aut, s, t, None)
}

/// The `(vertex, state)` pairs first reached at one level.
pub type Frontier = Vec<(VertexId, StateId)>;

/// [`annotate`] that also returns the frontier of each level.
pub fn annotate_traced(
    db: &Database,
    aut: &Automaton,
    s: VertexId,
    t: VertexId,
) -> (Result<AnnotationResult, QueryError>, Vec<Frontier>) {
    let mut trace = Vec::new();
    let result = single_target(db, aut, s, t, Some(&mut trace));
    (result, trace)
}

/// Traversal that follows ε-transitions on the fly: whenever a state is
/// recorded at a vertex, every state ε-reachable from it is recorded at the
/// same level with the same incoming edge and predecessor.
pub fn annotate_eps(
    db: &Database,
    aut: &Automaton,
    s: VertexId,
    t: VertexId,
) -> Result<AnnotationResult, QueryError> {
    single_target(db, aut, s, t, None)
}

/// Runs the traversal until no new `(vertex, state)` pair can be discovered
/// and reports `λ_t` for each requested target.
pub fn annotate_multi(
    db: &Database,
    aut: &Automaton,
    s: VertexId,
    targets: &[VertexId],
) -> MultiTargetAnnotation {
    let mut tr = Traversal::new(db, aut, None);
    tr.seed(s);
    tr.run(None);
    let annotation = tr.finish(s, CostModel::Unit);
    let lambdas = targets
        .iter()
        .map(|&t| (t, annotation.lambda_for(aut, t)))
        .collect();
    MultiTargetAnnotation { annotation, lambdas }
}

/// Cheapest-first traversal for strictly positive edge costs. `L` holds
/// minimal costs and `B` collects every predecessor achieving them. Ties in
/// the priority queue are broken by `(vertex id, state id)`.
pub fn annotate_cheapest(
    db: &Database,
    aut: &Automaton,
    s: VertexId,
    t: VertexId,
    costs: &[u64],
) -> Result<AnnotationResult, QueryError> {
    if aut.has_epsilon() {
        return Err(QueryError::EpsilonTransitions);
    }
    if costs.len() != db.num_edges() {
        return Err(QueryError::CostLength {
            got: costs.len(),
            expected: db.num_edges(),
        });
    }
    if let Some(e) = costs.iter().position(|&c| c == 0) {
        return Err(QueryError::NonPositiveCost(
            db.edge_name(EdgeId(e as u32)).to_owned(),
        ));
    }
    let cost = CostModel::Costs(Arc::from(costs));
    let n = aut.num_states();
    let mut tr = Traversal::new(db, aut, Some(t));
    let key = |u: VertexId, p: StateId| u.index() * n + p.index();
    let mut dist = vec![UNDEFINED; db.num_vertices() * n];
    let mut settled = vec![false; db.num_vertices() * n];
    let mut pending: Vec<Vec<(usize, StateId)>> = vec![Vec::new(); db.num_vertices() * n];
    let mut heap = BinaryHeap::new();
    for &p in aut.initial() {
        dist[key(s, p)] = 0;
        heap.push(Reverse((0u64, s.0, p.0)));
    }
    if s == t && aut.initial().iter().any(|&q| aut.is_final(q)) {
        for &p in aut.initial() {
            tr.lengths.values[key(s, p)] = 0;
        }
        return Ok(AnnotationResult {
            annotation: tr.finish(s, cost),
            target: t,
            lambda: 0,
        });
    }
    let mut lambda = None;
    while let Some(Reverse((d, v, q))) = heap.pop() {
        let (v, q) = (VertexId(v), StateId(q));
        let k = key(v, q);
        if settled[k] || d != dist[k] {
            continue;
        }
        if lambda.is_some_and(|l| d > l) {
            break;
        }
        settled[k] = true;
        tr.lengths.values[k] = d;
        tr.steps.expansions += 1;
        for (slot, pred) in std::mem::take(&mut pending[k]) {
            let b = BackMap::index(&tr.in_start, n, v, q, slot);
            tr.slots[b].push(pred);
        }
        if v == t && aut.is_final(q) && lambda.is_none() {
            lambda = Some(d);
        }
        for &e in db.outgoing(v) {
            tr.steps.expansions += 1;
            let u = db.tgt(e);
            let slot = db.tgtidx(e) as usize;
            let nd = d + cost.weight(e);
            for &a in db.labels(e) {
                for &p in aut.delta(q, a) {
                    tr.steps.inner += 1;
                    let kp = key(u, p);
                    if settled[kp] {
                        continue;
                    }
                    if nd < dist[kp] {
                        dist[kp] = nd;
                        pending[kp].clear();
                        pending[kp].push((slot, q));
                        heap.push(Reverse((nd, u.0, p.0)));
                    } else if nd == dist[kp] {
                        pending[kp].push((slot, q));
                    }
                }
            }
        }
    }
    let lambda = lambda.ok_or(QueryError::NoMatchingWalk)?;
    Ok(AnnotationResult {
        annotation: tr.finish(s, cost),
        target: t,
        lambda,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::parse_nfa;
    use crate::fixtures::{BANK_GRAPH, BANK_NFA};
    use crate::graph::load_database;

    fn bank() -> (Database, Automaton) {
        let db = load_database(BANK_GRAPH).unwrap();
        let a = parse_nfa(BANK_NFA, db.alphabet()).unwrap();
        (db, a)
    }

    fn sorted(list: &[StateId]) -> Vec<u32> {
        let mut v: Vec<u32> = list.iter().map(|q| q.0).collect();
        v.sort_unstable();
        v
    }

    #[test]
    fn bank_lengths_and_back_maps() {
        let (db, a) = bank();
        let v = |n| db.vertex_by_name(n).unwrap();
        let r = annotate(&db, &a, v("Alix"), v("Bob")).unwrap();
        assert_eq!(r.lambda, 3);
        let l = &r.annotation.lengths;
        let q = |i| StateId(i);
        assert_eq!((l.get(v("Bob"), q(0)), l.get(v("Bob"), q(1))), (Some(2), Some(3)));
        assert_eq!(
            (l.get(v("Cassie"), q(0)), l.get(v("Cassie"), q(1))),
            (Some(1), Some(2))
        );
        assert_eq!((l.get(v("Dan"), q(0)), l.get(v("Dan"), q(1))), (Some(1), Some(1)));
        assert_eq!((l.get(v("Eve"), q(0)), l.get(v("Eve"), q(1))), (Some(2), Some(2)));
        assert_eq!((l.get(v("Alix"), q(0)), l.get(v("Alix"), q(1))), (Some(0), None));

        let b = |n, p, i| sorted(r.annotation.back.get(v(n), q(p), i));
        assert_eq!(b("Bob", 1, 0), vec![0, 1, 1]);
        assert_eq!(b("Bob", 1, 1), vec![1]);
        assert_eq!(b("Bob", 0, 1), vec![0]);
        assert_eq!(b("Bob", 0, 0), Vec::<u32>::new());
        assert_eq!(b("Eve", 0, 0), vec![0]);
        assert_eq!(b("Eve", 0, 1), vec![0]);
        assert_eq!(b("Eve", 0, 2), Vec::<u32>::new());
        assert_eq!(b("Eve", 1, 0), vec![1]);
        assert_eq!(b("Eve", 1, 1), Vec::<u32>::new());
        assert_eq!(b("Eve", 1, 2), vec![0]);
        assert_eq!(b("Dan", 0, 0), vec![0]);
        assert_eq!(b("Dan", 1, 0), vec![0]);
        assert_eq!(b("Cassie", 0, 0), Vec::<u32>::new());
        assert_eq!(b("Cassie", 0, 1), vec![0]);
        assert_eq!(b("Cassie", 1, 0), vec![0, 1]);
        assert_eq!(b("Cassie", 1, 1), Vec::<u32>::new());
    }

    #[test]
    fn epsilon_free_required() {
        let (db, _) = bank();
        let t = crate::automaton::compile_regex("h s", db.alphabet()).unwrap();
        assert_eq!(
            annotate(&db, &t, VertexId(0), VertexId(1)).unwrap_err(),
            QueryError::EpsilonTransitions
        );
    }

    #[test]
    fn zero_length_answer() {
        let (db, _) = bank();
        let star = crate::automaton::compile_regex("h*", db.alphabet())
            .unwrap()
            .eliminate_eps();
        let r = annotate(&db, &star, VertexId(0), VertexId(0)).unwrap();
        assert_eq!(r.lambda, 0);
        assert_eq!(r.annotation.back.total_entries(), 0);
        let r = annotate_eps(
            &db,
            &crate::automaton::compile_regex("eps", db.alphabet()).unwrap(),
            VertexId(2),
            VertexId(2),
        )
        .unwrap();
        assert_eq!(r.lambda, 0);
    }

    #[test]
    fn no_matching_walk() {
        let (db, a) = bank();
        let v = |n| db.vertex_by_name(n).unwrap();
        // Nothing reaches Alix.
        assert_eq!(
            annotate(&db, &a, v("Bob"), v("Alix")).unwrap_err(),
            QueryError::NoMatchingWalk
        );
    }

    #[test]
    fn epsilon_free_input_gives_identical_annotation() {
        let (db, a) = bank();
        let v = |n| db.vertex_by_name(n).unwrap();
        let x = annotate(&db, &a, v("Alix"), v("Bob")).unwrap();
        let y = annotate_eps(&db, &a, v("Alix"), v("Bob")).unwrap();
        assert_eq!(x.annotation.dump(&db), y.annotation.dump(&db));
        assert_eq!(x.lambda, y.lambda);
    }

    #[test]
    fn thompson_bank_lambda() {
        let (db, _) = bank();
        let v = |n| db.vertex_by_name(n).unwrap();
        let t = crate::automaton::compile_regex("h* s (h|s)*", db.alphabet()).unwrap();
        assert_eq!(annotate_eps(&db, &t, v("Alix"), v("Bob")).unwrap().lambda, 3);
    }

    #[test]
    fn multi_target_bank() {
        let (db, a) = bank();
        let v = |n| db.vertex_by_name(n).unwrap();
        let m = annotate_multi(&db, &a, v("Alix"), &[v("Bob"), v("Eve"), v("Alix")]);
        assert_eq!(m.lambda(v("Bob")), Some(3));
        assert_eq!(m.lambda(v("Eve")), Some(2));
        assert_eq!(m.lambda(v("Alix")), None);
    }

    #[test]
    fn cheapest_with_unit_costs_matches_lengths() {
        let (db, a) = bank();
        let v = |n| db.vertex_by_name(n).unwrap();
        let x = annotate(&db, &a, v("Alix"), v("Bob")).unwrap();
        let y = annotate_cheapest(&db, &a, v("Alix"), v("Bob"), &vec![1; db.num_edges()]).unwrap();
        assert_eq!(x.lambda, y.lambda);
        assert_eq!(y.root_certificate(&a), vec![StateId(1)]);
        let err = annotate_cheapest(&db, &a, v("Alix"), v("Bob"), &vec![0; db.num_edges()]);
        assert!(matches!(err, Err(QueryError::NonPositiveCost(_))));
    }

    #[test]
    fn inner_loop_bounded_by_edges_times_transitions() {
        let (db, a) = bank();
        let m = annotate_multi(&db, &a, VertexId(0), &[]);
        assert!(m.annotation.steps.inner <= (db.num_edges() * a.num_transitions()) as u64);
    }
}
