//! Brute-force reference implementations and seeded instance generators.
//!
//! Nothing here calls into the traversal, trimming or enumeration code. The
//! only shared pieces are the [`Database`] and [`Automaton`] types and
//! [`Automaton::matches_walk`].

use std::collections::{BTreeMap, BTreeSet, HashSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::automaton::{thompson, Automaton, AutomatonBuilder, Regex, StateId};
use crate::error::OracleError;
use crate::graph::{Alphabet, Database, DatabaseBuilder, EdgeId, Label, VertexId, Walk};

/// Upper bound on the number of partial walks any oracle may generate.
pub const WALK_GUARD: usize = 1_000_000;

const INF: u64 = u64::MAX;

/// How the query automaton of a generated instance is built.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QueryKind {
    /// Random ε-free NFA.
    Nfa,
    /// Random NFA that may contain ε-transitions.
    NfaWithEps,
    /// Thompson automaton of a random regex.
    Regex,
    /// Coin flip between `NfaWithEps` and `Regex`.
    Mixed,
}

#[derive(Clone, Debug)]
pub struct InstanceSpec {
    pub max_vertices: usize,
    pub max_edges: usize,
    pub max_labels: usize,
    /// Bound on NFA states. Thompson automata are bounded by regex depth
    /// instead.
    pub max_states: usize,
    /// Probability of each `(p, a, q)` transition.
    pub transition_density: f64,
    /// Probability that an edge copies the endpoints of the previous one.
    pub parallel_prob: f64,
    /// Probability that an edge gets more than one label.
    pub multi_label_prob: f64,
    pub eps_prob: f64,
    pub regex_depth: u32,
    pub deterministic: bool,
    pub query: QueryKind,
    pub seed: u64,
}

impl Default for InstanceSpec {
    fn default() -> Self {
        InstanceSpec {
            max_vertices: 8,
            max_edges: 20,
            max_labels: 3,
            max_states: 4,
            transition_density: 0.35,
            parallel_prob: 0.15,
            multi_label_prob: 0.3,
            eps_prob: 0.15,
            regex_depth: 3,
            deterministic: false,
            query: QueryKind::Mixed,
            seed: 0,
        }
    }
}

impl InstanceSpec {
    pub fn with_seed(seed: u64) -> Self {
        InstanceSpec {
            seed,
            ..Self::default()
        }
    }
}

#[derive(Clone, Debug)]
pub struct Instance {
    pub db: Database,
    pub aut: Automaton,
    pub source: VertexId,
    pub target: VertexId,
    /// Set when the automaton came from a regex.
    pub regex: Option<Regex>,
}

const LABEL_NAMES: [&str; 8] = ["a", "b", "c", "d", "f", "g", "h", "k"];

fn random_regex(rng: &mut ChaCha8Rng, labels: usize, depth: u32) -> Regex {
    if depth == 0 || rng.gen_bool(0.3) {
        return if rng.gen_bool(0.1) {
            Regex::Epsilon
        } else {
            Regex::label(LABEL_NAMES[rng.gen_range(0..labels)])
        };
    }
    let arity = rng.gen_range(2..=3);
    match rng.gen_range(0..5) {
        0 => Regex::Concat((0..arity).map(|_| random_regex(rng, labels, depth - 1)).collect()),
        1 => Regex::Alt((0..arity).map(|_| random_regex(rng, labels, depth - 1)).collect()),
        2 => Regex::Star(Box::new(random_regex(rng, labels, depth - 1))),
        3 => Regex::Plus(Box::new(random_regex(rng, labels, depth - 1))),
        _ => Regex::Optional(Box::new(random_regex(rng, labels, depth - 1))),
    }
}

fn random_nfa(rng: &mut ChaCha8Rng, spec: &InstanceSpec, alphabet: &Alphabet, with_eps: bool) -> Automaton {
    let n = rng.gen_range(1..=spec.max_states.max(1));
    let mut b = AutomatonBuilder::new(alphabet.clone());
    b.add_states(n);
    for p in 0..n as u32 {
        for a in alphabet.labels() {
            if spec.deterministic {
                if rng.gen_bool(spec.transition_density.max(0.5)) {
                    b.add_transition(StateId(p), a, StateId(rng.gen_range(0..n as u32)));
                }
                continue;
            }
            for q in 0..n as u32 {
                if rng.gen_bool(spec.transition_density) {
                    b.add_transition(StateId(p), a, StateId(q));
                }
            }
        }
        if with_eps && !spec.deterministic {
            for q in 0..n as u32 {
                if q != p && rng.gen_bool(spec.eps_prob) {
                    b.add_eps(StateId(p), StateId(q));
                }
            }
        }
    }
    b.add_initial(StateId(0));
    if !spec.deterministic && n > 1 && rng.gen_bool(0.2) {
        b.add_initial(StateId(rng.gen_range(1..n as u32)));
    }
    let mut any_final = false;
    for q in 0..n as u32 {
        if rng.gen_bool(0.4) {
            b.add_final(StateId(q));
            any_final = true;
        }
    }
    if !any_final {
        b.add_final(StateId(rng.gen_range(0..n as u32)));
    }
    b.build()
}

/// Builds a random instance. The same spec always yields the same instance.
pub fn generate_instance(spec: &InstanceSpec) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n_vertices = rng.gen_range(1..=spec.max_vertices.max(1));
    let n_edges = rng.gen_range(1..=spec.max_edges.max(1));
    let n_labels = rng.gen_range(1..=spec.max_labels.clamp(1, LABEL_NAMES.len()));

    let mut alphabet = Alphabet::new();
    let labels: Vec<Label> = LABEL_NAMES[..n_labels]
        .iter()
        .map(|l| alphabet.intern(l))
        .collect();
    let mut b = DatabaseBuilder::with_alphabet(alphabet.clone());
    let vertices: Vec<VertexId> = (0..n_vertices)
        .map(|i| b.add_vertex(&format!("v{i}")).expect("fresh names"))
        .collect();
    let mut prev: Option<(VertexId, VertexId)> = None;
    for _ in 0..n_edges {
        let (src, tgt) = match prev {
            Some(p) if rng.gen_bool(spec.parallel_prob) => p,
            _ => (
                *vertices.choose(&mut rng).unwrap(),
                *vertices.choose(&mut rng).unwrap(),
            ),
        };
        let mut edge_labels = vec![*labels.choose(&mut rng).unwrap()];
        if n_labels > 1 && rng.gen_bool(spec.multi_label_prob) {
            let k = rng.gen_range(2..=n_labels);
            edge_labels = labels.choose_multiple(&mut rng, k).copied().collect();
        }
        b.add_anonymous_edge(src, tgt, &edge_labels);
        prev = Some((src, tgt));
    }
    let db = b.build();

    let kind = match spec.query {
        QueryKind::Mixed if rng.gen_bool(0.5) => QueryKind::Regex,
        QueryKind::Mixed => QueryKind::NfaWithEps,
        k => k,
    };
    let (aut, regex) = match kind {
        QueryKind::Regex => {
            let r = random_regex(&mut rng, n_labels, spec.regex_depth);
            (thompson(&r, &alphabet), Some(r))
        }
        QueryKind::NfaWithEps => (random_nfa(&mut rng, spec, &alphabet, true), None),
        _ => (random_nfa(&mut rng, spec, &alphabet, false), None),
    };
    let source = *vertices.choose(&mut rng).unwrap();
    let target = *vertices.choose(&mut rng).unwrap();
    Instance {
        db,
        aut,
        source,
        target,
        regex,
    }
}

fn closure(aut: &Automaton, set: &mut [bool]) {
    let mut changed = true;
    while changed {
        changed = false;
        for q in 0..set.len() {
            if set[q] {
                for &r in aut.eps(StateId(q as u32)) {
                    if !set[r.index()] {
                        set[r.index()] = true;
                        changed = true;
                    }
                }
            }
        }
    }
}

fn start_set(aut: &Automaton) -> Vec<bool> {
    let mut set = vec![false; aut.num_states()];
    for q in aut.initial() {
        set[q.index()] = true;
    }
    closure(aut, &mut set);
    set
}

fn step_set(aut: &Automaton, db: &Database, set: &[bool], e: EdgeId) -> Vec<bool> {
    let mut next = vec![false; set.len()];
    for q in (0..set.len()).filter(|&q| set[q]) {
        for &a in db.labels(e) {
            for &p in aut.delta(StateId(q as u32), a) {
                next[p.index()] = true;
            }
        }
    }
    closure(aut, &mut next);
    next
}

/// Minimal remaining weight from `(v, q)` to `(t, f ∈ F)` in the product,
/// by fixpoint iteration. ε-moves are free.
fn distance_to_accept(
    db: &Database,
    aut: &Automaton,
    t: VertexId,
    weight: impl Fn(EdgeId) -> u64,
) -> Vec<Vec<u64>> {
    let n = aut.num_states();
    let mut d = vec![vec![INF; n]; db.num_vertices()];
    for &f in aut.finals() {
        d[t.index()][f.index()] = 0;
    }
    let mut changed = true;
    while changed {
        changed = false;
        for v in 0..db.num_vertices() {
            for q in 0..n {
                let mut best = d[v][q];
                for &r in aut.eps(StateId(q as u32)) {
                    best = best.min(d[v][r.index()]);
                }
                for &e in db.outgoing(VertexId(v as u32)) {
                    let u = db.edge(e).tgt.index();
                    for &a in db.labels(e) {
                        for &p in aut.delta(StateId(q as u32), a) {
                            if d[u][p.index()] != INF {
                                best = best.min(d[u][p.index()] + weight(e));
                            }
                        }
                    }
                }
                if best < d[v][q] {
                    d[v][q] = best;
                    changed = true;
                }
            }
        }
    }
    d
}

fn min_over(set: &[bool], row: &[u64]) -> u64 {
    set.iter()
        .zip(row)
        .filter(|(&b, _)| b)
        .map(|(_, &d)| d)
        .min()
        .unwrap_or(INF)
}

/// Canonical order key: the position of each edge in the incoming list of
/// its target, read from the last edge backwards.
pub fn canonical_key(db: &Database, edges: &[EdgeId]) -> Vec<usize> {
    edges
        .iter()
        .rev()
        .map(|&e| {
            db.incoming(db.edge(e).tgt)
                .iter()
                .position(|&x| x == e)
                .expect("edge listed at its target")
        })
        .collect()
}

fn sort_canonical(db: &Database, walks: &mut [Walk]) {
    walks.sort_by_cached_key(|w| canonical_key(db, w.edges()));
}

/// All shortest walks from `s` to `t` matching `aut`, sorted canonically.
/// Walks are grown level by level from `s`; branches that can no longer
/// reach acceptance within the shortest possible length are cut.
pub fn brute_force_answers(
    db: &Database,
    aut: &Automaton,
    s: VertexId,
    t: VertexId,
) -> Result<Vec<Walk>, OracleError> {
    let d = distance_to_accept(db, aut, t, |_| 1);
    let init = start_set(aut);
    let lambda = min_over(&init, &d[s.index()]);
    if lambda == INF {
        return Ok(Vec::new());
    }
    let max_level = (db.num_vertices() * aut.num_states()) as u64;
    let mut generated = 1usize;
    let mut level: Vec<(Vec<EdgeId>, VertexId, Vec<bool>)> = vec![(Vec::new(), s, init)];
    for len in 0..=max_level {
        let mut found: Vec<Walk> = level
            .iter()
            .filter(|(_, v, _)| *v == t)
            .filter_map(|(edges, _, _)| Walk::from_edges(db, s, edges.clone()))
            .filter(|w| aut.matches_walk(db, w))
            .collect();
        if !found.is_empty() {
            sort_canonical(db, &mut found);
            return Ok(found);
        }
        let mut next = Vec::new();
        for (edges, v, set) in &level {
            for &e in db.outgoing(*v) {
                let u = db.edge(e).tgt;
                let set2 = step_set(aut, db, set, e);
                let rest = min_over(&set2, &d[u.index()]);
                if rest == INF || len + 1 + rest > lambda {
                    continue;
                }
                generated += 1;
                if generated > WALK_GUARD {
                    return Err(OracleError::InstanceTooLarge(WALK_GUARD));
                }
                let mut e2 = edges.clone();
                e2.push(e);
                next.push((e2, u, set2));
            }
        }
        level = next;
    }
    Ok(Vec::new())
}

/// All cheapest matching walks under positive integer costs, sorted
/// canonically. Depth-first search bounded by the optimal cost.
pub fn brute_force_cheapest(
    db: &Database,
    aut: &Automaton,
    s: VertexId,
    t: VertexId,
    costs: &[u64],
) -> Result<(Option<u64>, Vec<Walk>), OracleError> {
    let d = distance_to_accept(db, aut, t, |e| costs[e.index()]);
    let init = start_set(aut);
    let best = min_over(&init, &d[s.index()]);
    if best == INF {
        return Ok((None, Vec::new()));
    }
    let mut out = Vec::new();
    let mut generated = 0usize;
    let mut stack: Vec<(Vec<EdgeId>, VertexId, Vec<bool>, u64)> = vec![(Vec::new(), s, init, 0)];
    while let Some((edges, v, set, cost)) = stack.pop() {
        if v == t && cost == best {
            let w = Walk::from_edges(db, s, edges.clone()).expect("walk");
            if aut.matches_walk(db, &w) {
                out.push(w);
            }
        }
        for &e in db.outgoing(v) {
            let u = db.edge(e).tgt;
            let set2 = step_set(aut, db, &set, e);
            let c = cost + costs[e.index()];
            let rest = min_over(&set2, &d[u.index()]);
            if rest == INF || c + rest > best {
                continue;
            }
            generated += 1;
            if generated > WALK_GUARD {
                return Err(OracleError::InstanceTooLarge(WALK_GUARD));
            }
            let mut e2 = edges.clone();
            e2.push(e);
            stack.push((e2, u, set2, c));
        }
    }
    sort_canonical(db, &mut out);
    Ok((Some(best), out))
}

/// States occupied after each prefix of `walk` by some accepting run: the
/// intersection of forward-reachable and backward-accepting states.
/// Intended for ε-free automata.
pub fn run_states(db: &Database, aut: &Automaton, walk: &Walk) -> Vec<BTreeSet<StateId>> {
    let n = aut.num_states();
    let edges = walk.edges();
    let mut fwd = vec![start_set(aut)];
    for &e in edges {
        let next = step_set(aut, db, fwd.last().unwrap(), e);
        fwd.push(next);
    }
    let mut bwd = vec![vec![false; n]; edges.len() + 1];
    for &f in aut.finals() {
        bwd[edges.len()][f.index()] = true;
    }
    for k in (0..edges.len()).rev() {
        for q in 0..n {
            bwd[k][q] = db.labels(edges[k]).iter().any(|&a| {
                aut.delta(StateId(q as u32), a)
                    .iter()
                    .any(|p| bwd[k + 1][p.index()])
            });
        }
    }
    (0..=edges.len())
        .map(|k| {
            (0..n)
                .filter(|&q| fwd[k][q] && bwd[k][q])
                .map(|q| StateId(q as u32))
                .collect()
        })
        .collect()
}

/// The backward-search tree, materialized from the answers: every suffix
/// of every answer (including the empty suffix at `t`), mapped to its
/// certificate, the union over answers of the states found at the front
/// of the suffix along accepting runs. Intended for ε-free automata.
pub fn brute_force_certificates(
    db: &Database,
    aut: &Automaton,
    s: VertexId,
    t: VertexId,
) -> Result<BTreeMap<Vec<EdgeId>, BTreeSet<StateId>>, OracleError> {
    let answers = brute_force_answers(db, aut, s, t)?;
    let mut tree: BTreeMap<Vec<EdgeId>, BTreeSet<StateId>> = BTreeMap::new();
    for w in &answers {
        let states = run_states(db, aut, w);
        for (k, at) in states.iter().enumerate().take(w.len() + 1) {
            tree.entry(w.edges()[k..].to_vec())
                .or_default()
                .extend(at.iter().copied());
        }
    }
    Ok(tree)
}

/// `layers[k]` holds every `(v, q)` such that some walk of length exactly
/// `k` from `s` can leave the automaton in `q` at `v`.
pub fn reachable_layers(
    db: &Database,
    aut: &Automaton,
    s: VertexId,
    max_len: usize,
) -> Vec<HashSet<(VertexId, StateId)>> {
    let init = start_set(aut);
    let mut layer: HashSet<(VertexId, StateId)> = (0..aut.num_states())
        .filter(|&q| init[q])
        .map(|q| (s, StateId(q as u32)))
        .collect();
    let mut out = vec![layer.clone()];
    for _ in 0..max_len {
        let mut next = HashSet::new();
        for &(v, q) in &layer {
            for &e in db.outgoing(v) {
                let mut one = vec![false; aut.num_states()];
                one[q.index()] = true;
                let stepped = step_set(aut, db, &one, e);
                for (p, _) in stepped.iter().enumerate().filter(|(_, &b)| b) {
                    next.insert((db.edge(e).tgt, StateId(p as u32)));
                }
            }
        }
        layer = next;
        out.push(layer.clone());
    }
    out
}

/// Number of accepting runs over `walk`, counted one by one: every choice
/// of a label per edge and a transition per step. ε-free automata only.
pub fn brute_force_multiplicity(db: &Database, aut: &Automaton, walk: &Walk) -> Result<u128, OracleError> {
    fn go(db: &Database, aut: &Automaton, edges: &[EdgeId], q: StateId, budget: &mut usize) -> Option<u128> {
        *budget = budget.checked_sub(1)?;
        let Some((&e, rest)) = edges.split_first() else {
            return Some(aut.is_final(q) as u128);
        };
        let mut total = 0u128;
        for &a in db.labels(e) {
            for &p in aut.delta(q, a) {
                total += go(db, aut, rest, p, budget)?;
            }
        }
        Some(total)
    }
    let mut budget = WALK_GUARD;
    let mut total = 0u128;
    for &q in aut.initial() {
        total +=
            go(db, aut, walk.edges(), q, &mut budget).ok_or(OracleError::InstanceTooLarge(WALK_GUARD))?;
    }
    Ok(total)
}

/// Words of length at most `max_len` in the language of `regex`, computed
/// structurally.
pub fn regex_words(regex: &Regex, max_len: usize) -> BTreeSet<Vec<String>> {
    fn concat(a: &BTreeSet<Vec<String>>, b: &BTreeSet<Vec<String>>, max_len: usize) -> BTreeSet<Vec<String>> {
        let mut out = BTreeSet::new();
        for x in a {
            for y in b {
                if x.len() + y.len() <= max_len {
                    out.insert(x.iter().chain(y).cloned().collect());
                }
            }
        }
        out
    }
    fn star(inner: &BTreeSet<Vec<String>>, max_len: usize) -> BTreeSet<Vec<String>> {
        let mut acc: BTreeSet<Vec<String>> = [Vec::new()].into_iter().collect();
        loop {
            let grown: BTreeSet<_> = acc.union(&concat(&acc, inner, max_len)).cloned().collect();
            if grown.len() == acc.len() {
                return acc;
            }
            acc = grown;
        }
    }
    match regex {
        Regex::Epsilon => [Vec::new()].into_iter().collect(),
        Regex::Label(l) => {
            if max_len >= 1 {
                [vec![l.clone()]].into_iter().collect()
            } else {
                BTreeSet::new()
            }
        }
        Regex::Concat(parts) => parts.iter().fold([Vec::new()].into_iter().collect(), |acc, p| {
            concat(&acc, &regex_words(p, max_len), max_len)
        }),
        Regex::Alt(branches) => branches.iter().flat_map(|b| regex_words(b, max_len)).collect(),
        Regex::Star(r) => star(&regex_words(r, max_len), max_len),
        Regex::Plus(r) => {
            let inner = regex_words(r, max_len);
            concat(&inner, &star(&inner, max_len), max_len)
        }
        Regex::Optional(r) => {
            let mut w = regex_words(r, max_len);
            w.insert(Vec::new());
            w
        }
    }
}
