//! Parameterized graph families for delay and preprocessing measurements.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::automaton::{parse_nfa, Automaton};
use crate::fixtures::BANK_NFA;
use crate::graph::{Alphabet, Database, DatabaseBuilder, Label, VertexId};
use crate::query::run_query;

/// A generated query instance.
#[derive(Clone, Debug)]
pub struct BenchInstance {
    pub db: Database,
    pub aut: Automaton,
    pub source: VertexId,
    pub target: VertexId,
}

fn bank_alphabet() -> (Alphabet, Label, Label) {
    let mut alphabet = Alphabet::new();
    let h = alphabet.intern("h");
    let s = alphabet.intern("s");
    (alphabet, h, s)
}

/// The two-state automaton for `h* s (h|s)*`, used by every family.
pub fn fixed_automaton(alphabet: &Alphabet) -> Automaton {
    parse_nfa(BANK_NFA, alphabet).expect("fixture parses")
}

/// Chain `x0 → x1 → … → xλ` with two parallel edges per step (labels `h`
/// and `{h,s}`), so there are `2^λ − 1` answers from `x0` to `xλ`.
///
/// The remaining `total_edges − 2λ` edges are padding that no answer can
/// use: a dead-end region hanging off the chain, a region that only feeds
/// into the chain and cannot be reached from `x0`, and a disconnected
/// region. Padding edges into the chain are interleaved with chain edges
/// in the incoming arrays, so target indices shift while the trimmed
/// queues along the chain keep the same content.
pub fn padded_chain(lambda: usize, total_edges: usize, seed: u64) -> BenchInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (alphabet, h, s) = bank_alphabet();
    let mut b = DatabaseBuilder::with_alphabet(alphabet.clone());
    let chain: Vec<VertexId> = (0..=lambda)
        .map(|i| b.add_vertex(&format!("x{i}")).unwrap())
        .collect();
    let padding = total_edges.saturating_sub(2 * lambda);
    let region = (padding / 4).max(2);
    let mk = |b: &mut DatabaseBuilder, p: &str| -> Vec<VertexId> {
        (0..region)
            .map(|i| b.add_vertex(&format!("{p}{i}")).unwrap())
            .collect()
    };
    let dead = mk(&mut b, "d");
    let feed = mk(&mut b, "f");
    let far = mk(&mut b, "z");
    let labels = [vec![h], vec![s], vec![h, s]];
    let pick = |rng: &mut ChaCha8Rng, vs: &[VertexId]| vs[rng.gen_range(0..vs.len())];

    // Padding is spread over the steps so it interleaves with chain edges.
    let mut budget = padding;
    for i in 0..lambda {
        let share = if i + 1 == lambda {
            budget
        } else {
            padding / lambda.max(1)
        };
        budget -= share;
        for k in 0..share {
            let l = &labels[rng.gen_range(0..labels.len())];
            match k % 4 {
                0 => {
                    let from = pick(&mut rng, &chain);
                    b.add_anonymous_edge(from, pick(&mut rng, &dead), l);
                }
                1 => {
                    let to = pick(&mut rng, &chain);
                    b.add_anonymous_edge(pick(&mut rng, &feed), to, l);
                }
                2 => {
                    let (x, y) = (pick(&mut rng, &dead), pick(&mut rng, &dead));
                    if rng.gen_bool(0.5) {
                        b.add_anonymous_edge(x, y, l);
                    } else {
                        let (x, y) = (pick(&mut rng, &far), pick(&mut rng, &far));
                        b.add_anonymous_edge(x, y, l);
                    }
                }
                _ => {
                    let (x, y) = (pick(&mut rng, &feed), pick(&mut rng, &feed));
                    b.add_anonymous_edge(x, y, l);
                }
            }
        }
        b.add_anonymous_edge(chain[i], chain[i + 1], &[h]);
        b.add_anonymous_edge(chain[i], chain[i + 1], &[h, s]);
    }
    BenchInstance {
        db: b.build(),
        aut: fixed_automaton(&alphabet),
        source: chain[0],
        target: chain[lambda],
    }
}

/// Random core of about `m/5` vertices with random `h`/`s` edges, plus a
/// chain from the core to the target long enough that the traversal has
/// to exhaust the reachable product before reaching it. `m` edges total.
pub fn preprocessing_family(m: usize, seed: u64) -> BenchInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (alphabet, h, s) = bank_alphabet();
    let mut b = DatabaseBuilder::with_alphabet(alphabet.clone());
    let n_core = (m / 5).max(2);
    let core: Vec<VertexId> = (0..n_core)
        .map(|i| b.add_vertex(&format!("c{i}")).unwrap())
        .collect();
    let chain: Vec<VertexId> = (0..n_core)
        .map(|i| b.add_vertex(&format!("y{i}")).unwrap())
        .collect();
    let labels = [vec![h], vec![s], vec![h, s]];
    for _ in 0..m.saturating_sub(n_core) {
        let x = core[rng.gen_range(0..n_core)];
        let y = core[rng.gen_range(0..n_core)];
        b.add_anonymous_edge(x, y, &labels[rng.gen_range(0..labels.len())]);
    }
    b.add_anonymous_edge(core[1], chain[0], &[s]);
    for w in chain.windows(2) {
        b.add_anonymous_edge(w[0], w[1], &[h]);
    }
    BenchInstance {
        db: b.build(),
        aut: fixed_automaton(&alphabet),
        source: core[0],
        target: chain[n_core - 1],
    }
}

/// One measured query.
#[derive(Clone, Debug)]
pub struct BenchRow {
    pub edges: usize,
    pub lambda: Option<u64>,
    pub answers: usize,
    pub preprocessing_steps: u64,
    pub max_delay_steps: u64,
    pub mean_delay_steps: f64,
    pub preprocessing_time: Duration,
    pub enumeration_time: Duration,
}

/// Runs the full enumeration and collects step counters.
pub fn measure(inst: &BenchInstance) -> BenchRow {
    let start = Instant::now();
    let mut q = run_query(&inst.db, &inst.aut, inst.source, inst.target).record_delays();
    let preprocessing_time = start.elapsed();
    let start = Instant::now();
    let mut answers = 0;
    for _ in q.by_ref() {
        answers += 1;
    }
    let enumeration_time = start.elapsed();
    let per = q.per_output_steps();
    BenchRow {
        edges: inst.db.num_edges(),
        lambda: q.lambda(),
        answers,
        preprocessing_steps: q.preprocessing_steps().total(),
        max_delay_steps: per.iter().copied().max().unwrap_or(0),
        mean_delay_steps: if per.is_empty() {
            0.0
        } else {
            per.iter().sum::<u64>() as f64 / per.len() as f64
        },
        preprocessing_time,
        enumeration_time,
    }
}
