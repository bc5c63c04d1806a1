//! Thompson's construction: linear-size ε-NFA with one initial and one final
//! state.

use super::{Automaton, AutomatonBuilder, Regex, StateId};
use crate::graph::Alphabet;

struct Fragment {
    start: StateId,
    end: StateId,
}

fn build(r: &Regex, b: &mut AutomatonBuilder) -> Fragment {
    match r {
        Regex::Epsilon => {
            let (start, end) = (b.add_state(), b.add_state());
            b.add_eps(start, end);
            Fragment { start, end }
        }
        Regex::Label(name) => {
            let (start, end) = (b.add_state(), b.add_state());
            b.add_labelled(start, name, end);
            Fragment { start, end }
        }
        Regex::Concat(parts) => {
            let mut frags = parts.iter().map(|p| build(p, b)).collect::<Vec<_>>();
            for w in frags.windows(2) {
                b.add_eps(w[0].end, w[1].start);
            }
            let last = frags.pop().expect("non-empty concatenation");
            Fragment {
                start: frags.first().map_or(last.start, |f| f.start),
                end: last.end,
            }
        }
        Regex::Alt(branches) => {
            let start = b.add_state();
            let frags = branches.iter().map(|p| build(p, b)).collect::<Vec<_>>();
            let end = b.add_state();
            for f in frags {
                b.add_eps(start, f.start);
                b.add_eps(f.end, end);
            }
            Fragment { start, end }
        }
        Regex::Star(inner) | Regex::Plus(inner) | Regex::Optional(inner) => {
            let start = b.add_state();
            let f = build(inner, b);
            let end = b.add_state();
            b.add_eps(start, f.start);
            b.add_eps(f.end, end);
            if !matches!(r, Regex::Plus(_)) {
                b.add_eps(start, end);
            }
            if !matches!(r, Regex::Optional(_)) {
                b.add_eps(f.end, f.start);
            }
            Fragment { start, end }
        }
    }
}

/// Builds the Thompson automaton of `regex`. Labels are interned into a copy
/// of `alphabet`, so label ids of an existing database stay valid.
pub fn thompson(regex: &Regex, alphabet: &Alphabet) -> Automaton {
    let mut b = AutomatonBuilder::new(alphabet.clone());
    let f = build(regex, &mut b);
    b.add_initial(f.start);
    b.add_final(f.end);
    b.build()
}
