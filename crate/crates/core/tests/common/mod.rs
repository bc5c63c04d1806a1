#![allow(dead_code)]

use std::sync::OnceLock;

use dsw_core::oracle::{brute_force_answers, generate_instance, Instance, InstanceSpec, QueryKind};
use dsw_core::{run_query, Database, Walk, WalkFormat};

pub const CORPUS_SIZE: usize = 500;

pub struct Corpus {
    /// `(seed, instance, oracle answers)`.
    pub entries: Vec<(u64, Instance, Vec<Walk>)>,
    /// Seeds whose answer count exceeds the oracle's walk guard.
    pub skipped: Vec<u64>,
}

/// The seeded equivalence corpus: random NFAs (possibly with ε) and
/// Thompson automata of random regexes, alternating at random. Seeds are
/// taken in order; a seed is skipped when exhaustive search is out of reach.
pub fn corpus_with_oracle() -> &'static Corpus {
    static CORPUS: OnceLock<Corpus> = OnceLock::new();
    CORPUS.get_or_init(|| {
        let mut entries = Vec::with_capacity(CORPUS_SIZE);
        let mut skipped = Vec::new();
        let mut seed = 0;
        while entries.len() < CORPUS_SIZE {
            let inst = generate_instance(&InstanceSpec::with_seed(seed));
            match brute_force_answers(&inst.db, &inst.aut, inst.source, inst.target) {
                Ok(answers) => entries.push((seed, inst, answers)),
                Err(_) => skipped.push(seed),
            }
            seed += 1;
        }
        Corpus { entries, skipped }
    })
}

pub fn corpus() -> impl Iterator<Item = (u64, &'static Instance)> {
    corpus_with_oracle().entries.iter().map(|(s, i, _)| (*s, i))
}

/// ε-free instances that have at least one answer, for the structural
/// checks.
pub fn structural_instances(count: usize) -> Vec<(u64, Instance)> {
    let mut out = Vec::new();
    let mut seed = 10_000;
    while out.len() < count {
        let spec = InstanceSpec {
            query: QueryKind::Nfa,
            seed,
            ..InstanceSpec::default()
        };
        let inst = generate_instance(&spec);
        if run_query(&inst.db, &inst.aut, inst.source, inst.target)
            .lambda()
            .is_some()
        {
            out.push((seed, inst));
        }
        seed += 1;
    }
    out
}

pub fn engine_answers(inst: &Instance) -> Vec<Walk> {
    run_query(&inst.db, &inst.aut, inst.source, inst.target)
        .map(|o| o.walk)
        .collect()
}

pub fn render(db: &Database, walks: &[Walk]) -> Vec<String> {
    walks
        .iter()
        .map(|w| w.display(db, WalkFormat::Edges).to_string())
        .collect()
}
