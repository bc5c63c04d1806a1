//! Nondeterministic finite automata over the label alphabet, with optional
//! ε-transitions.
//!
//! Transitions are stored in a dense `|Q| × |Σ|` table so that `Δ(q, a)` is a
//! constant-time slice lookup. Labels whose id is beyond the table (labels
//! interned after the automaton was built) have no transitions.

mod regex;
mod thompson;

pub use regex::{parse_regex, Regex};
pub use thompson::thompson;

use std::collections::BTreeSet;

use crate::error::AutomatonError;
use crate::graph::{is_identifier, Alphabet, Database, Label, Walk};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateId(pub u32);

impl StateId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Automaton {
    alphabet: Alphabet,
    n_states: usize,
    n_labels: usize,
    delta: Vec<Vec<StateId>>,
    eps: Vec<Vec<StateId>>,
    initial: Vec<StateId>,
    finals: Vec<StateId>,
    is_final: Vec<bool>,
    n_transitions: usize,
}

impl Automaton {
    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.n_states
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> {
        (0..self.n_states as u32).map(StateId)
    }

    /// Number of labelled transitions plus ε-transitions.
    pub fn num_transitions(&self) -> usize {
        self.n_transitions + self.num_eps_transitions()
    }

    pub fn num_eps_transitions(&self) -> usize {
        self.eps.iter().map(Vec::len).sum()
    }

    /// `|Σ| + |Q| + |Δ|`.
    pub fn size(&self) -> usize {
        self.alphabet.len() + self.n_states + self.num_transitions()
    }

    pub fn initial(&self) -> &[StateId] {
        &self.initial
    }

    pub fn finals(&self) -> &[StateId] {
        &self.finals
    }

    #[inline]
    pub fn is_final(&self, q: StateId) -> bool {
        self.is_final[q.index()]
    }

    pub fn has_epsilon(&self) -> bool {
        self.eps.iter().any(|v| !v.is_empty())
    }

    /// `Δ(q, a)` as a non-repeating list.
    #[inline]
    pub fn delta(&self, q: StateId, a: Label) -> &[StateId] {
        if a.index() >= self.n_labels {
            return &[];
        }
        &self.delta[q.index() * self.n_labels + a.index()]
    }

    #[inline]
    pub fn eps(&self, q: StateId) -> &[StateId] {
        &self.eps[q.index()]
    }

    /// Labelled transitions as `(p, a, q)` triples.
    pub fn transitions(&self) -> impl Iterator<Item = (StateId, Label, StateId)> + '_ {
        self.states().flat_map(move |p| {
            (0..self.n_labels as u32)
                .flat_map(move |a| self.delta(p, Label(a)).iter().map(move |&q| (p, Label(a), q)))
        })
    }

    /// Union of `Δ(q, a)` over `a ∈ labels`, without duplicates.
    pub fn delta_over_label_set(&self, q: StateId, labels: &[Label]) -> Vec<StateId> {
        let mut seen = vec![false; self.n_states];
        let mut out = Vec::new();
        for &a in labels {
            for &p in self.delta(q, a) {
                if !seen[p.index()] {
                    seen[p.index()] = true;
                    out.push(p);
                }
            }
        }
        out
    }

    /// Extends `set` (a boolean map over states) with everything reachable by
    /// ε-transitions.
    fn close(&self, set: &mut [bool]) {
        let mut stack: Vec<StateId> = (0..self.n_states as u32)
            .map(StateId)
            .filter(|q| set[q.index()])
            .collect();
        while let Some(q) = stack.pop() {
            for &r in self.eps(q) {
                if !set[r.index()] {
                    set[r.index()] = true;
                    stack.push(r);
                }
            }
        }
    }

    /// ε-closure of a set of states, sorted.
    pub fn epsilon_closure(&self, states: &[StateId]) -> Vec<StateId> {
        let mut set = vec![false; self.n_states];
        for q in states {
            set[q.index()] = true;
        }
        self.close(&mut set);
        collect_set(&set)
    }

    fn step(&self, current: &[bool], labels: &[Label]) -> Vec<bool> {
        let mut next = vec![false; self.n_states];
        for (q, _) in current.iter().enumerate().filter(|(_, &b)| b) {
            for &a in labels {
                for &p in self.delta(StateId(q as u32), a) {
                    next[p.index()] = true;
                }
            }
        }
        self.close(&mut next);
        next
    }

    fn initial_set(&self) -> Vec<bool> {
        let mut set = vec![false; self.n_states];
        for q in &self.initial {
            set[q.index()] = true;
        }
        self.close(&mut set);
        set
    }

    /// Subset simulation with ε-closure.
    pub fn accepts(&self, word: &[Label]) -> bool {
        let mut current = self.initial_set();
        for &a in word {
            current = self.step(&current, std::slice::from_ref(&a));
        }
        current.iter().zip(&self.is_final).any(|(&c, &f)| c && f)
    }

    /// Like [`accepts`](Self::accepts) but with label names. Unknown names
    /// make the word rejected.
    pub fn accepts_names(&self, word: &[&str]) -> bool {
        let mut labels = Vec::with_capacity(word.len());
        for name in word {
            match self.alphabet.get(name) {
                Some(l) => labels.push(l),
                None => return false,
            }
        }
        self.accepts(&labels)
    }

    /// True iff some label word carried by `walk` is accepted.
    pub fn matches_walk(&self, db: &Database, walk: &Walk) -> bool {
        let mut current = self.initial_set();
        for &e in walk.edges() {
            current = self.step(&current, db.labels(e));
            if !current.iter().any(|&b| b) {
                return false;
            }
        }
        current.iter().zip(&self.is_final).any(|(&c, &f)| c && f)
    }

    /// Number of accepting runs over the label words of `walk`, where a run
    /// picks one label per edge and one transition per step. Automata with
    /// ε-transitions are counted on their ε-free equivalent from
    /// [`eliminate_eps`](Self::eliminate_eps). Saturates at `u128::MAX`.
    pub fn count_runs(&self, db: &Database, walk: &Walk) -> u128 {
        if self.has_epsilon() {
            return self.eliminate_eps().count_runs(db, walk);
        }
        let mut counts = vec![0u128; self.n_states];
        for q in &self.initial {
            counts[q.index()] = 1;
        }
        for &e in walk.edges() {
            let mut next = vec![0u128; self.n_states];
            for (q, &c) in counts.iter().enumerate() {
                if c == 0 {
                    continue;
                }
                for &a in db.labels(e) {
                    for &p in self.delta(StateId(q as u32), a) {
                        next[p.index()] = next[p.index()].saturating_add(c);
                    }
                }
            }
            counts = next;
        }
        self.finals
            .iter()
            .fold(0u128, |acc, f| acc.saturating_add(counts[f.index()]))
    }

    /// Equivalent automaton without ε-transitions.
    ///
    /// ε-free input is returned unchanged. Otherwise the result keeps the
    /// initial states and the targets of labelled transitions; a kept state
    /// `q` gets `q -a-> p` whenever some `r` in the ε-closure of `q` has
    /// `r -a-> p`, and is final when its closure meets a final state.
    pub fn eliminate_eps(&self) -> Automaton {
        if !self.has_epsilon() {
            return self.clone();
        }
        let mut keep = vec![false; self.n_states];
        for q in &self.initial {
            keep[q.index()] = true;
        }
        for (_, _, q) in self.transitions() {
            keep[q.index()] = true;
        }
        let mut renumber = vec![None; self.n_states];
        let mut builder = AutomatonBuilder::new(self.alphabet.clone());
        for q in 0..self.n_states {
            if keep[q] {
                renumber[q] = Some(builder.add_state());
            }
        }
        for q in self.states().filter(|q| keep[q.index()]) {
            let new_q = renumber[q.index()].unwrap();
            let closure = self.epsilon_closure(&[q]);
            if closure.iter().any(|&r| self.is_final(r)) {
                builder.add_final(new_q);
            }
            for &r in &closure {
                for a in 0..self.n_labels as u32 {
                    for &p in self.delta(r, Label(a)) {
                        builder.add_transition(new_q, Label(a), renumber[p.index()].unwrap());
                    }
                }
            }
        }
        for q in &self.initial {
            builder.add_initial(renumber[q.index()].unwrap());
        }
        builder.build()
    }

    /// Re-expresses the automaton over `alphabet` (matching labels by name).
    /// Labels unknown to `alphabet` are appended to it.
    pub fn rebind(&self, alphabet: &Alphabet) -> Automaton {
        if self.alphabet.extends(alphabet) {
            return self.clone();
        }
        let mut target = alphabet.clone();
        let map: Vec<Label> = self
            .alphabet
            .labels()
            .map(|l| target.intern(self.alphabet.name(l)))
            .collect();
        let mut builder = AutomatonBuilder::new(target);
        builder.add_states(self.n_states);
        for (p, a, q) in self.transitions() {
            builder.add_transition(p, map[a.index()], q);
        }
        for p in self.states() {
            for &q in self.eps(p) {
                builder.add_eps(p, q);
            }
        }
        for &q in &self.initial {
            builder.add_initial(q);
        }
        for &q in &self.finals {
            builder.add_final(q);
        }
        builder.build()
    }

    /// Renders the automaton in the NFA file format.
    pub fn to_text(&self) -> String {
        let mut out = format!("states {}\n", self.n_states);
        let ids = |v: &[StateId]| v.iter().map(|q| q.0.to_string()).collect::<Vec<_>>().join(" ");
        out.push_str(&format!("initial {}\n", ids(&self.initial)));
        out.push_str(&format!("final {}\n", ids(&self.finals)));
        for (p, a, q) in self.transitions() {
            out.push_str(&format!("trans {} {} {}\n", p.0, self.alphabet.name(a), q.0));
        }
        for p in self.states() {
            for q in self.eps(p) {
                out.push_str(&format!("trans {} eps {}\n", p.0, q.0));
            }
        }
        out
    }
}

fn collect_set(set: &[bool]) -> Vec<StateId> {
    set.iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .map(|(q, _)| StateId(q as u32))
        .collect()
}

#[derive(Debug, Default)]
pub struct AutomatonBuilder {
    alphabet: Alphabet,
    n_states: usize,
    transitions: BTreeSet<(StateId, Label, StateId)>,
    eps: BTreeSet<(StateId, StateId)>,
    initial: BTreeSet<StateId>,
    finals: BTreeSet<StateId>,
}

impl AutomatonBuilder {
    pub fn new(alphabet: Alphabet) -> Self {
        AutomatonBuilder {
            alphabet,
            ..Default::default()
        }
    }

    pub fn alphabet_mut(&mut self) -> &mut Alphabet {
        &mut self.alphabet
    }

    pub fn add_state(&mut self) -> StateId {
        self.n_states += 1;
        StateId(self.n_states as u32 - 1)
    }

    pub fn add_states(&mut self, n: usize) {
        self.n_states += n;
    }

    pub fn add_transition(&mut self, p: StateId, a: Label, q: StateId) {
        self.transitions.insert((p, a, q));
    }

    pub fn add_labelled(&mut self, p: StateId, label: &str, q: StateId) {
        let a = self.alphabet.intern(label);
        self.add_transition(p, a, q);
    }

    pub fn add_eps(&mut self, p: StateId, q: StateId) {
        self.eps.insert((p, q));
    }

    pub fn add_initial(&mut self, q: StateId) {
        self.initial.insert(q);
    }

    pub fn add_final(&mut self, q: StateId) {
        self.finals.insert(q);
    }

    pub fn build(self) -> Automaton {
        let n = self.n_states;
        let n_labels = self.alphabet.len();
        let mut delta = vec![Vec::new(); n * n_labels];
        for &(p, a, q) in &self.transitions {
            delta[p.index() * n_labels + a.index()].push(q);
        }
        let mut eps = vec![Vec::new(); n];
        for &(p, q) in &self.eps {
            eps[p.index()].push(q);
        }
        let mut is_final = vec![false; n];
        for q in &self.finals {
            is_final[q.index()] = true;
        }
        Automaton {
            alphabet: self.alphabet,
            n_states: n,
            n_labels,
            delta,
            eps,
            initial: self.initial.into_iter().collect(),
            finals: self.finals.into_iter().collect(),
            is_final,
            n_transitions: self.transitions.len(),
        }
    }
}

/// Parses the NFA file format:
///
/// ```text
/// states <n>
/// initial <id>...
/// final <id>...
/// trans <p> <label|eps> <q>
/// ```
///
/// Labels are interned into a copy of `alphabet`.
pub fn parse_nfa(text: &str, alphabet: &Alphabet) -> Result<Automaton, AutomatonError> {
    let mut builder = AutomatonBuilder::new(alphabet.clone());
    let mut n_states: Option<u32> = None;
    for (lineno, raw) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |reason: String| AutomatonError::NfaParse {
            line: line_no,
            reason,
        };
        let fields: Vec<&str> = line.split_whitespace().collect();
        let state = |s: &str| -> Result<StateId, AutomatonError> {
            let n = n_states.ok_or_else(|| err("`states` must come first".into()))?;
            let q: u32 = s.parse().map_err(|_| err(format!("invalid state `{s}`")))?;
            if q >= n {
                return Err(err(format!("state {q} out of range")));
            }
            Ok(StateId(q))
        };
        match fields[0] {
            "states" => {
                if n_states.is_some() || fields.len() != 2 {
                    return Err(err("expected a single `states <n>` line".into()));
                }
                let n: u32 = fields[1]
                    .parse()
                    .map_err(|_| err(format!("invalid state count `{}`", fields[1])))?;
                builder.add_states(n as usize);
                n_states = Some(n);
            }
            "initial" => {
                for f in &fields[1..] {
                    builder.add_initial(state(f)?);
                }
            }
            "final" => {
                for f in &fields[1..] {
                    builder.add_final(state(f)?);
                }
            }
            "trans" => {
                if fields.len() != 4 {
                    return Err(err("expected `trans <p> <label> <q>`".into()));
                }
                let p = state(fields[1])?;
                let q = state(fields[3])?;
                if fields[2] == "eps" {
                    builder.add_eps(p, q);
                } else if is_identifier(fields[2]) {
                    builder.add_labelled(p, fields[2], q);
                } else {
                    return Err(err(format!("invalid label `{}`", fields[2])));
                }
            }
            other => return Err(err(format!("unknown directive `{other}`"))),
        }
    }
    if n_states.is_none() {
        return Err(AutomatonError::NfaParse {
            line: 0,
            reason: "missing `states` line".into(),
        });
    }
    Ok(builder.build())
}

/// Compiles a regex source string into a Thompson automaton over a copy of
/// `alphabet`.
pub fn compile_regex(text: &str, alphabet: &Alphabet) -> Result<Automaton, AutomatonError> {
    Ok(thompson(&parse_regex(text)?, alphabet))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{BANK_GRAPH, BANK_NFA, BANK_REGEX};
    use crate::graph::{load_database, parse_walk};

    fn bank() -> (Database, Automaton) {
        let db = load_database(BANK_GRAPH).unwrap();
        let a = parse_nfa(BANK_NFA, db.alphabet()).unwrap();
        (db, a)
    }

    #[test]
    fn delta_over_label_sets() {
        let (db, a) = bank();
        let h = db.alphabet().get("h").unwrap();
        let s = db.alphabet().get("s").unwrap();
        assert_eq!(
            a.delta_over_label_set(StateId(0), &[h, s]),
            vec![StateId(0), StateId(1)]
        );
        assert_eq!(a.delta_over_label_set(StateId(1), &[h, s]), vec![StateId(1)]);
        assert!(a.delta_over_label_set(StateId(0), &[]).is_empty());
        assert!(a.delta_over_label_set(StateId(0), &[Label(99)]).is_empty());
    }

    #[test]
    fn bank_membership() {
        let (_, a) = bank();
        assert!(!a.accepts_names(&["h", "h"]));
        assert!(a.accepts_names(&["s", "h", "s"]));
        assert!(a.accepts_names(&["s", "h", "h"]));
        assert!(a.accepts_names(&["h", "h", "s"]));
        assert!(!a.accepts_names(&[]));
        let t = compile_regex(BANK_REGEX, &Alphabet::new()).unwrap();
        for w in [&["h", "h"][..], &["s", "h", "s"], &["s"], &["h", "s", "s"], &[]] {
            assert_eq!(t.accepts_names(w), a.accepts_names(w), "{w:?}");
        }
    }

    #[test]
    fn walk_matching() {
        let (db, a) = bank();
        let w = |s| parse_walk(&db, s).unwrap();
        assert!(!a.matches_walk(&db, &w("e1,e7")));
        assert!(a.matches_walk(&db, &w("e2,e4,e8")));
        assert!(a.matches_walk(&db, &w("e2,e3,e6,e8")));
        let eps = compile_regex("eps", db.alphabet()).unwrap();
        assert!(eps.matches_walk(&db, &w("<Alix>")));
        assert!(!a.matches_walk(&db, &w("<Alix>")));
    }

    #[test]
    fn run_counts() {
        let (db, a) = bank();
        let w = |s| parse_walk(&db, s).unwrap();
        assert_eq!(a.count_runs(&db, &w("e2,e4,e8")), 3);
        assert_eq!(a.count_runs(&db, &w("e1,e5,e8")), 1);
        assert_eq!(a.count_runs(&db, &w("e1,e6,e8")), 2);
        assert_eq!(a.count_runs(&db, &w("e2,e3,e7")), 2);
        assert_eq!(a.count_runs(&db, &w("e1,e7")), 0);
        // Thompson automaton for the same regex, counted after ε-elimination.
        let t = compile_regex(BANK_REGEX, db.alphabet()).unwrap();
        assert_eq!(t.count_runs(&db, &w("e2,e4,e8")), 3);
    }

    #[test]
    fn eliminate_eps_fixpoint_and_empty_word() {
        let (_, a) = bank();
        assert_eq!(a.eliminate_eps(), a);

        let mut b = AutomatonBuilder::new(Alphabet::new());
        let q0 = b.add_state();
        let q1 = b.add_state();
        let q2 = b.add_state();
        b.add_eps(q0, q1);
        b.add_eps(q1, q2);
        b.add_initial(q0);
        b.add_final(q2);
        let chain = b.build();
        let free = chain.eliminate_eps();
        assert!(!free.has_epsilon());
        assert!(free.initial().iter().any(|&q| free.is_final(q)));
        assert!(free.accepts(&[]));
    }

    #[test]
    fn thompson_eliminated_agrees_on_short_words() {
        let t = compile_regex(BANK_REGEX, &Alphabet::new()).unwrap();
        let free = t.eliminate_eps();
        assert!(!free.has_epsilon());
        let labels: Vec<Label> = t.alphabet().labels().collect();
        let mut words: Vec<Vec<Label>> = vec![vec![]];
        for _ in 0..4 {
            let next: Vec<Vec<Label>> = words
                .iter()
                .flat_map(|w| {
                    labels.iter().map(move |&a| {
                        let mut w = w.clone();
                        w.push(a);
                        w
                    })
                })
                .collect();
            for w in &next {
                assert_eq!(t.accepts(w), free.accepts(w), "{w:?}");
            }
            words = next;
        }
    }

    #[test]
    fn nfa_parse_errors() {
        let alpha = Alphabet::new();
        assert!(parse_nfa("initial 0\n", &alpha).is_err());
        assert!(parse_nfa("states 2\ntrans 0 a 2\n", &alpha).is_err());
        assert!(parse_nfa("states 2\ntrans 0 1a 1\n", &alpha).is_err());
        assert!(parse_nfa("", &alpha).is_err());
        let a = parse_nfa("states 2\ninitial 0\nfinal 1\ntrans 0 eps 1\n", &alpha).unwrap();
        assert!(a.accepts(&[]));
        assert_eq!(parse_nfa(&a.to_text(), &alpha).unwrap(), a);
    }

    #[test]
    fn rebind_maps_labels_by_name() {
        let a = compile_regex("b a", &Alphabet::new()).unwrap();
        let mut target = Alphabet::new();
        target.intern("a");
        target.intern("b");
        let r = a.rebind(&target);
        assert!(r.alphabet().extends(&target));
        assert!(r.accepts(&[Label(1), Label(0)]));
        assert!(!r.accepts(&[Label(0), Label(1)]));
    }
}
