//! Depth-first reconstruction of the backward-search tree of answers.
//!
//! A node of the tree is a suffix `w` of some answer together with its
//! certificate `S(w)`: the states that can sit at the front of `w` along an
//! accepting run of some answer ending with `w`. The children of `w` are
//! found by reading the heads of the queues `C_u[p]` for `p ∈ S(w)`, which
//! are sorted by target index, so each child costs `O(|Δ|)` to build no
//! matter how large the in-degree of `u` is.
//!
//! Answers come out in canonical order: lexicographic on target indices read
//! from the last edge to the first.

use std::borrow::BorrowMut;

use crate::annotate::{Annotation, CostModel};
use crate::automaton::{Automaton, StateId};
use crate::error::QueryError;
use crate::graph::{Database, EdgeId, VertexId, Walk};
use crate::trim::{ResumableIndex, TrimmedIndex};

/// An answer, optionally with its number of accepting runs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OutputWalk {
    pub walk: Walk,
    pub multiplicity: Option<u128>,
}

/// Arguments of one node visit, reported to an observer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CallRecord {
    /// The suffix `w`, in walk order.
    pub suffix: Vec<EdgeId>,
    /// Remaining length (or cost) to the leaves.
    pub remaining: u64,
    /// The certificate, sorted.
    pub states: Vec<StateId>,
}

struct Frame {
    vertex: VertexId,
    remaining: u64,
    states: Vec<StateId>,
    via: Option<EdgeId>,
}

type Observer<'a> = Box<dyn FnMut(&CallRecord) + 'a>;

/// Lazy depth-first enumeration over a [`TrimmedIndex`].
///
/// The index cursors are advanced during the traversal and restored when a
/// node is finished; dropping the enumerator early also restores them.
pub struct Enumerator<'a, I: BorrowMut<TrimmedIndex> = TrimmedIndex> {
    db: &'a Database,
    index: Option<I>,
    cost: CostModel,
    source: VertexId,
    stack: Vec<Frame>,
    marks: Vec<bool>,
    steps: u64,
    since_last: u64,
    last_output: u64,
    max_output: u64,
    record: bool,
    per_output: Vec<u64>,
    observer: Option<Observer<'a>>,
    pending_root: bool,
}

impl<'a, I: BorrowMut<TrimmedIndex>> Enumerator<'a, I> {
    /// Starts at the root `⟨target⟩` with `remaining = lambda` and the given
    /// root certificate `{q ∈ F | L_t[q] = λ}`.
    pub fn new(
        db: &'a Database,
        index: I,
        cost: CostModel,
        source: VertexId,
        target: VertexId,
        lambda: u64,
        root: Vec<StateId>,
    ) -> Self {
        let n_states = index.borrow().num_states();
        let mut stack = Vec::with_capacity(lambda as usize + 1);
        if !root.is_empty() {
            stack.push(Frame {
                vertex: target,
                remaining: lambda,
                states: root,
                via: None,
            });
        }
        Enumerator {
            db,
            index: Some(index),
            cost,
            source,
            stack,
            marks: vec![false; n_states],
            steps: 0,
            since_last: 0,
            last_output: 0,
            max_output: 0,
            record: false,
            per_output: Vec::new(),
            observer: None,
            pending_root: true,
        }
    }

    /// Calls `f` on entry to every node of the tree.
    pub fn with_observer(mut self, f: impl FnMut(&CallRecord) + 'a) -> Self {
        self.observer = Some(Box::new(f));
        self
    }

    /// Total abstract steps: queue operations plus state-list elements
    /// touched.
    pub fn steps(&self) -> u64 {
        self.steps
    }

    /// Keeps the step count of every answer, for
    /// [`per_output_steps`](Self::per_output_steps). Off by default since
    /// the record grows with the number of answers.
    pub fn record_delays(mut self) -> Self {
        self.record = true;
        self
    }

    /// Steps spent before each emitted answer, since the previous one.
    /// Empty unless [`record_delays`](Self::record_delays) was called.
    pub fn per_output_steps(&self) -> &[u64] {
        &self.per_output
    }

    /// Steps spent on the most recent answer.
    pub fn last_output_steps(&self) -> u64 {
        self.last_output
    }

    /// Largest per-answer step count so far.
    pub fn max_output_steps(&self) -> u64 {
        self.max_output
    }

    /// Gives the index back with every cursor at its start.
    pub fn into_index(mut self) -> I {
        self.restart_open_frames();
        self.index.take().expect("index present until drop")
    }

    fn restart_open_frames(&mut self) {
        if let Some(index) = self.index.as_mut() {
            let index = index.borrow_mut();
            for f in &self.stack {
                for &p in &f.states {
                    index.queue_mut(f.vertex, p).restart();
                }
            }
        }
    }

    fn notify(&mut self) {
        if let Some(obs) = self.observer.as_mut() {
            let mut suffix: Vec<EdgeId> = self.stack.iter().rev().filter_map(|f| f.via).collect();
            suffix.shrink_to_fit();
            let top = self.stack.last().unwrap();
            let mut states = top.states.clone();
            states.sort_unstable();
            obs(&CallRecord {
                suffix,
                remaining: top.remaining,
                states,
            });
        }
    }

    fn materialize(&self) -> Walk {
        let edges: Vec<EdgeId> = self.stack.iter().rev().filter_map(|f| f.via).collect();
        Walk::from_edges(self.db, self.source, edges).expect("tree nodes are walks")
    }

    /// Advances the traversal to the next leaf.
    pub fn next_walk(&mut self) -> Option<Walk> {
        if self.pending_root {
            self.pending_root = false;
            if !self.stack.is_empty() {
                self.notify();
            }
        }
        let db = self.db;
        loop {
            let top = self.stack.last()?;
            if top.remaining == 0 {
                let walk = self.materialize();
                self.stack.pop();
                self.last_output = self.since_last;
                self.max_output = self.max_output.max(self.since_last);
                if self.record {
                    self.per_output.push(self.since_last);
                }
                self.since_last = 0;
                return Some(walk);
            }
            let index = self.index.as_mut().unwrap().borrow_mut();
            let u = top.vertex;
            let mut steps = 0u64;

            let mut e_min: Option<EdgeId> = None;
            for &p in &top.states {
                steps += 1;
                if let Some(&(e, _)) = index.queue(u, p).peek() {
                    if e_min.is_none_or(|m| db.tgtidx(e) < db.tgtidx(m)) {
                        e_min = Some(e);
                    }
                }
            }

            let Some(e_min) = e_min else {
                for &p in &top.states {
                    steps += 1;
                    index.queue_mut(u, p).restart();
                }
                self.stack.pop();
                self.steps += steps;
                self.since_last += steps;
                continue;
            };

            let mut next_states = Vec::new();
            for &p in &top.states {
                steps += 1;
                let queue = index.queue_mut(u, p);
                if let Some((e, xs)) = queue.peek() {
                    if *e == e_min {
                        for &x in xs.iter() {
                            steps += 1;
                            if !self.marks[x.index()] {
                                self.marks[x.index()] = true;
                                next_states.push(x);
                            }
                        }
                        steps += 1;
                        queue.advance();
                    }
                }
            }
            for &x in &next_states {
                steps += 1;
                self.marks[x.index()] = false;
            }
            let remaining = top
                .remaining
                .checked_sub(self.cost.weight(e_min))
                .expect("back-map entries are tight");
            self.steps += steps;
            self.since_last += steps;
            self.stack.push(Frame {
                vertex: db.src(e_min),
                remaining,
                states: next_states,
                via: Some(e_min),
            });
            self.notify();
        }
    }
}

impl<I: BorrowMut<TrimmedIndex>> Iterator for Enumerator<'_, I> {
    type Item = Walk;

    fn next(&mut self) -> Option<Walk> {
        self.next_walk()
    }
}

impl<I: BorrowMut<TrimmedIndex>> Drop for Enumerator<'_, I> {
    fn drop(&mut self) {
        self.restart_open_frames();
    }
}

/// Runs the whole enumeration, passing every answer to `sink`. The index
/// cursors are back at their start when this returns.
#[allow(clippy::too_many_arguments)]
pub fn enumerate(
    db: &Database,
    index: &mut TrimmedIndex,
    cost: &CostModel,
    source: VertexId,
    target: VertexId,
    lambda: u64,
    root: &[StateId],
    mut sink: impl FnMut(Walk),
) {
    let mut en = Enumerator::new(db, index, cost.clone(), source, target, lambda, root.to_vec());
    while let Some(w) = en.next_walk() {
        sink(w);
    }
}

struct ResumeFrame {
    vertex: VertexId,
    remaining: u64,
    states: Vec<StateId>,
    cursors: Vec<Option<u32>>,
    via: Option<EdgeId>,
}

/// Read-only view used by the memoryless successor function. All cursor
/// state lives in the call.
struct Resumer<'a> {
    db: &'a Database,
    index: &'a ResumableIndex,
    cost: &'a CostModel,
    source: VertexId,
    marks: Vec<bool>,
    steps: u64,
}

impl Resumer<'_> {
    fn frame(
        &mut self,
        vertex: VertexId,
        remaining: u64,
        states: Vec<StateId>,
        via: Option<EdgeId>,
    ) -> ResumeFrame {
        let cursors = states
            .iter()
            .map(|&p| {
                self.steps += 1;
                self.index.first(vertex, p)
            })
            .collect();
        ResumeFrame {
            vertex,
            remaining,
            states,
            cursors,
            via,
        }
    }

    /// Certificate of the child through slot `slot`, moving every cursor of
    /// `frame` past it.
    fn take_slot(&mut self, frame: &mut ResumeFrame, slot: u32) -> Vec<StateId> {
        let mut next_states = Vec::new();
        for (k, &p) in frame.states.iter().enumerate() {
            self.steps += 1;
            let s = self.index.slot(frame.vertex, p, slot);
            for &x in s.states.iter() {
                self.steps += 1;
                if !self.marks[x.index()] {
                    self.marks[x.index()] = true;
                    next_states.push(x);
                }
            }
            frame.cursors[k] = s.next;
        }
        for &x in &next_states {
            self.marks[x.index()] = false;
        }
        next_states
    }

    fn run(&mut self, stack: &mut Vec<ResumeFrame>) -> Option<Walk> {
        loop {
            let top = stack.last_mut()?;
            if top.remaining == 0 {
                let edges: Vec<EdgeId> = stack.iter().rev().filter_map(|f| f.via).collect();
                stack.pop();
                return Some(Walk::from_edges(self.db, self.source, edges).expect("walk"));
            }
            let mut min: Option<u32> = None;
            for c in &top.cursors {
                self.steps += 1;
                if let Some(i) = *c {
                    if min.is_none_or(|m| i < m) {
                        min = Some(i);
                    }
                }
            }
            let Some(slot) = min else {
                stack.pop();
                continue;
            };
            let u = top.vertex;
            let mut next_states = Vec::new();
            for k in 0..top.states.len() {
                self.steps += 1;
                if top.cursors[k] == Some(slot) {
                    let p = top.states[k];
                    let s = self.index.slot(u, p, slot);
                    for &x in s.states.iter() {
                        self.steps += 1;
                        if !self.marks[x.index()] {
                            self.marks[x.index()] = true;
                            next_states.push(x);
                        }
                    }
                    top.cursors[k] = s.next;
                }
            }
            for &x in &next_states {
                self.marks[x.index()] = false;
            }
            let e = self.db.incoming(u)[slot as usize];
            let remaining = top.remaining - self.cost.weight(e);
            let child = self.frame(self.db.src(e), remaining, next_states, Some(e));
            stack.push(child);
        }
    }
}

/// Memoryless enumeration: every answer is computed from the previous one
/// and the immutable [`ResumableIndex`] alone.
pub struct MemorylessEnumerator<'a> {
    db: &'a Database,
    index: &'a ResumableIndex,
    cost: CostModel,
    source: VertexId,
    target: VertexId,
    lambda: u64,
    root: Vec<StateId>,
}

impl<'a> MemorylessEnumerator<'a> {
    /// Derives `λ` and the root certificate from `L`.
    pub fn new(
        db: &'a Database,
        aut: &Automaton,
        index: &'a ResumableIndex,
        annotation: &Annotation,
        target: VertexId,
    ) -> Result<Self, QueryError> {
        let lambda = annotation
            .lambda_for(aut, target)
            .ok_or(QueryError::NoMatchingWalk)?;
        Ok(MemorylessEnumerator {
            db,
            index,
            cost: annotation.cost.clone(),
            source: annotation.source,
            target,
            lambda,
            root: annotation.root_certificate(aut, target, lambda),
        })
    }

    pub fn lambda(&self) -> u64 {
        self.lambda
    }

    fn resumer(&self) -> Resumer<'_> {
        Resumer {
            db: self.db,
            index: self.index,
            cost: &self.cost,
            source: self.source,
            marks: vec![false; self.index.num_states()],
            steps: 0,
        }
    }

    /// The first answer in canonical order.
    pub fn first(&self) -> Option<Walk> {
        self.first_counted().0
    }

    pub fn first_counted(&self) -> (Option<Walk>, u64) {
        let mut r = self.resumer();
        let root = r.frame(self.target, self.lambda, self.root.clone(), None);
        let mut stack = vec![root];
        let w = r.run(&mut stack);
        (w, r.steps)
    }

    /// The answer following `previous`, or `None` after the last one.
    pub fn next_output(&self, previous: &Walk) -> Result<Option<Walk>, QueryError> {
        self.next_output_counted(previous).map(|(w, _)| w)
    }

    /// [`next_output`](Self::next_output) plus the number of steps spent.
    pub fn next_output_counted(&self, previous: &Walk) -> Result<(Option<Walk>, u64), QueryError> {
        let invalid = |why: &str| Err(QueryError::InvalidPrevious(why.to_owned()));
        if previous.source() != self.source || previous.target() != self.target {
            return invalid("endpoints differ from the query");
        }
        let mut r = self.resumer();
        let root = r.frame(self.target, self.lambda, self.root.clone(), None);
        let mut stack = vec![root];
        for &e in previous.edges().iter().rev() {
            let top = stack.last_mut().unwrap();
            let w = self.cost.weight(e);
            if self.db.tgt(e) != top.vertex || top.remaining < w {
                return invalid("walk leaves the answer tree");
            }
            let states = r.take_slot(top, self.db.tgtidx(e));
            if states.is_empty() {
                return invalid("walk leaves the answer tree");
            }
            let remaining = top.remaining - w;
            let child = r.frame(self.db.src(e), remaining, states, Some(e));
            stack.push(child);
        }
        if stack.last().unwrap().remaining != 0 {
            return invalid("walk is shorter than the answers");
        }
        stack.pop();
        let w = r.run(&mut stack);
        Ok((w, r.steps))
    }
}

/// Free-function form of [`MemorylessEnumerator::next_output`].
pub fn next_output(
    db: &Database,
    aut: &Automaton,
    index: &ResumableIndex,
    annotation: &Annotation,
    target: VertexId,
    previous: &Walk,
) -> Result<Option<Walk>, QueryError> {
    MemorylessEnumerator::new(db, aut, index, annotation, target)?.next_output(previous)
}
