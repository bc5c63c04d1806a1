//! Back-maps turned into per-`(vertex, state)` queues of non-empty slots,
//! sorted by target index.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use crate::annotate::{BackMap, StateList};
use crate::automaton::StateId;
use crate::graph::{Database, EdgeId, VertexId};

/// Queue with a movable cursor: enqueue, peek, advance and restart are all
/// constant time.
#[derive(Clone, Debug, Default)]
pub struct RestartableQueue {
    entries: Vec<(EdgeId, StateList)>,
    cursor: usize,
}

impl RestartableQueue {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn enqueue(&mut self, edge: EdgeId, states: StateList) {
        self.entries.push((edge, states));
    }

    /// Entry under the cursor, `None` once the cursor has passed the end.
    #[inline]
    pub fn peek(&self) -> Option<&(EdgeId, StateList)> {
        self.entries.get(self.cursor)
    }

    #[inline]
    pub fn advance(&mut self) {
        if self.cursor < self.entries.len() {
            self.cursor += 1;
        }
    }

    #[inline]
    pub fn restart(&mut self) {
        self.cursor = 0;
    }

    /// True when the cursor has passed every entry.
    #[inline]
    pub fn is_exhausted(&self) -> bool {
        self.cursor >= self.entries.len()
    }

    pub fn is_at_start(&self) -> bool {
        self.cursor == 0
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(EdgeId, StateList)] {
        &self.entries
    }
}

/// `C_u[p]` for every vertex `u` and state `p`.
///
/// Holds mutable cursors: one enumeration at a time.
#[derive(Clone, Debug)]
pub struct TrimmedIndex {
    n_states: usize,
    queues: Vec<RestartableQueue>,
    pub steps: u64,
}

impl TrimmedIndex {
    #[inline]
    pub fn queue(&self, u: VertexId, p: StateId) -> &RestartableQueue {
        &self.queues[u.index() * self.n_states + p.index()]
    }

    #[inline]
    pub fn queue_mut(&mut self, u: VertexId, p: StateId) -> &mut RestartableQueue {
        &mut self.queues[u.index() * self.n_states + p.index()]
    }

    pub fn num_states(&self) -> usize {
        self.n_states
    }

    pub fn num_vertices(&self) -> usize {
        self.queues.len() / self.n_states.max(1)
    }

    pub fn restart_all(&mut self) {
        for q in &mut self.queues {
            q.restart();
        }
    }

    pub fn all_at_start(&self) -> bool {
        self.queues.iter().all(RestartableQueue::is_at_start)
    }

    /// Queue contents for one vertex, rendered as
    /// `p: (edge,[states]) ...` lines. Used to compare indexes.
    pub fn dump_vertex(&self, db: &Database, u: VertexId) -> String {
        let mut out = String::new();
        for p in 0..self.n_states as u32 {
            let q = self.queue(u, StateId(p));
            out.push_str(&format!("{p}:"));
            for (e, xs) in q.entries() {
                let xs: Vec<String> = xs.iter().map(|s| s.0.to_string()).collect();
                out.push_str(&format!(" ({},[{}])", db.edge_name(*e), xs.join(",")));
            }
            out.push('\n');
        }
        out
    }
}

/// Scans `incoming(u)` in target-index order for every `(u, p)` and enqueues
/// the non-empty slots of `B_u[p]`.
pub fn trim(db: &Database, back: &BackMap) -> TrimmedIndex {
    let n_states = back.num_states();
    let mut queues = vec![RestartableQueue::new(); db.num_vertices() * n_states];
    let mut steps = queues.len() as u64;
    for u in db.vertices() {
        for p in 0..n_states as u32 {
            let p = StateId(p);
            let queue = &mut queues[u.index() * n_states + p.index()];
            for (i, &e) in db.incoming(u).iter().enumerate() {
                steps += 1;
                let list = back.list(u, p, i);
                if !list.is_empty() {
                    queue.enqueue(e, list.clone());
                }
            }
        }
    }
    TrimmedIndex {
        n_states,
        queues,
        steps,
    }
}

/// One slot of [`ResumableIndex`]: the back-map list plus the index of the
/// next non-empty slot after this one.
#[derive(Clone, Debug)]
pub struct ResumableSlot {
    pub states: StateList,
    pub next: Option<u32>,
}

/// Copy of the back-maps where every slot links to the next non-empty slot.
/// Immutable; any number of memoryless enumerations may read it at once.
#[derive(Clone, Debug)]
pub struct ResumableIndex {
    n_states: usize,
    in_start: Vec<usize>,
    slots: Vec<ResumableSlot>,
}

impl ResumableIndex {
    #[inline]
    fn base(&self, u: VertexId, p: StateId) -> (usize, usize) {
        let start = self.in_start[u.index()];
        let indeg = self.in_start[u.index() + 1] - start;
        (start * self.n_states + p.index() * indeg, indeg)
    }

    #[inline]
    pub fn slot(&self, u: VertexId, p: StateId, i: u32) -> &ResumableSlot {
        let (base, _) = self.base(u, p);
        &self.slots[base + i as usize]
    }

    /// First non-empty slot of `C_u[p]`.
    #[inline]
    pub fn first(&self, u: VertexId, p: StateId) -> Option<u32> {
        let (base, indeg) = self.base(u, p);
        if indeg == 0 {
            return None;
        }
        let s = &self.slots[base];
        if s.states.is_empty() {
            s.next
        } else {
            Some(0)
        }
    }

    /// First non-empty slot strictly after `i`.
    #[inline]
    pub fn next_after(&self, u: VertexId, p: StateId, i: u32) -> Option<u32> {
        self.slot(u, p, i).next
    }

    pub fn num_states(&self) -> usize {
        self.n_states
    }

    /// Sequence of `(slot, states)` obtained by following the links.
    pub fn walk_links(&self, u: VertexId, p: StateId) -> Vec<(u32, StateList)> {
        let mut out = Vec::new();
        let mut cur = self.first(u, p);
        while let Some(i) = cur {
            out.push((i, self.slot(u, p, i).states.clone()));
            cur = self.next_after(u, p, i);
        }
        out
    }

    /// Content hash, for checking that enumeration leaves the index alone.
    pub fn checksum(&self) -> u64 {
        let mut h = DefaultHasher::new();
        self.n_states.hash(&mut h);
        self.in_start.hash(&mut h);
        for s in &self.slots {
            s.states.hash(&mut h);
            s.next.hash(&mut h);
        }
        h.finish()
    }
}

/// Builds [`ResumableIndex`] by scanning every `B_u[p]` in reverse slot
/// order.
pub fn resumable_trim(db: &Database, back: &BackMap) -> ResumableIndex {
    let n_states = back.num_states();
    let mut in_start = Vec::with_capacity(db.num_vertices() + 1);
    in_start.push(0);
    for v in db.vertices() {
        in_start.push(in_start.last().unwrap() + db.indeg(v));
    }
    let mut slots = Vec::with_capacity(db.num_edges() * n_states);
    for u in db.vertices() {
        let indeg = db.indeg(u);
        for p in 0..n_states as u32 {
            let p = StateId(p);
            let row_start = slots.len();
            let mut next = None;
            let mut row = Vec::with_capacity(indeg);
            for i in (0..indeg).rev() {
                let list = back.list(u, p, i).clone();
                let empty = list.is_empty();
                row.push(ResumableSlot { states: list, next });
                if !empty {
                    next = Some(i as u32);
                }
            }
            row.reverse();
            slots.extend(row);
            debug_assert_eq!(slots.len() - row_start, indeg);
        }
    }
    ResumableIndex {
        n_states,
        in_start,
        slots,
    }
}
