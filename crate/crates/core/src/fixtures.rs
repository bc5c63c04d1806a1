//! The five-person bank transfer database used throughout the docs and tests.
//!
//! Edges are declared so that the incoming arrays are
//! Cassie: [e3, e1], Dan: [e2], Eve: [e4, e5, e6], Bob: [e8, e7].

pub const BANK_GRAPH: &str = "\
# people
vertex Alix
vertex Bob
vertex Cassie
vertex Dan
vertex Eve
# transfers: h = high value, s = suspicious
edge e2 Alix Dan h,s
edge e3 Dan Cassie s
edge e4 Dan Eve h
edge e5 Cassie Eve h
edge e6 Cassie Eve s
edge e8 Eve Bob h,s
edge e1 Alix Cassie h
edge e7 Cassie Bob h
";

/// Two-state automaton for `h* s (h|s)*`.
pub const BANK_NFA: &str = "\
states 2
initial 0
final 1
trans 0 h 0
trans 0 s 1
trans 1 h 1
trans 1 s 1
";

pub const BANK_REGEX: &str = "h* s (h|s)*";
