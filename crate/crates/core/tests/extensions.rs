mod common;

use std::thread;

use common::render;
use dsw_core::annotate::annotate_traced;
use dsw_core::fixtures::{BANK_GRAPH, BANK_REGEX};
use dsw_core::oracle::{
    brute_force_answers, brute_force_cheapest, brute_force_multiplicity, generate_instance, InstanceSpec,
    QueryKind,
};
use dsw_core::{
    annotate_multi, compile_regex, enumerate_with_multiplicity, load_database, parse_walk, run_query,
    run_query_cheapest, MemorylessQuery, QueryError, QueryStatus, VertexId,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn nfa_spec(seed: u64) -> InstanceSpec {
    InstanceSpec {
        query: QueryKind::Nfa,
        seed,
        ..InstanceSpec::default()
    }
}

#[test]
fn multiplicities_match_run_enumeration() {
    let mut checked = 0;
    for seed in 0..300 {
        let inst = generate_instance(&nfa_spec(seed));
        for o in enumerate_with_multiplicity(&inst.db, &inst.aut, inst.source, inst.target).take(200) {
            let m = o.multiplicity.unwrap();
            assert!(m >= 1);
            if let Ok(want) = brute_force_multiplicity(&inst.db, &inst.aut, &o.walk) {
                assert_eq!(m, want, "seed {seed}");
                checked += 1;
            }
        }
    }
    assert!(checked > 100);
}

#[test]
fn cheapest_matches_oracle_with_random_costs() {
    let mut answered = 0;
    for seed in 0..300 {
        let inst = generate_instance(&InstanceSpec::with_seed(seed));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let costs: Vec<u64> = (0..inst.db.num_edges()).map(|_| rng.gen_range(1..=4)).collect();
        let Ok((best, want)) = brute_force_cheapest(&inst.db, &inst.aut, inst.source, inst.target, &costs)
        else {
            continue;
        };
        let q = run_query_cheapest(&inst.db, &inst.aut, inst.source, inst.target, &costs).unwrap();
        assert_eq!(q.lambda(), best, "seed {seed}");
        let got: Vec<_> = q.map(|o| o.walk).collect();
        assert_eq!(got, want, "seed {seed}");
        answered += !got.is_empty() as usize;
    }
    assert!(answered > 50);
}

#[test]
fn equal_cost_walks_of_different_lengths() {
    let db = load_database(
        "vertex a\nvertex b\nvertex c\nvertex d\n\
         edge ab a b x 2\nedge ac a c x 1\nedge cb c b x 1\nedge bd b d x 1\nedge ad a d x 5\n",
    )
    .unwrap();
    let aut = compile_regex("x+", db.alphabet()).unwrap();
    let costs = db.costs().unwrap();
    let (a, d) = (db.vertex_by_name("a").unwrap(), db.vertex_by_name("d").unwrap());
    let got: Vec<_> = run_query_cheapest(&db, &aut, a, d, &costs)
        .unwrap()
        .map(|o| o.walk)
        .collect();
    assert_eq!(render(&db, &got), ["ab,bd", "ac,cb,bd"]);
    let (_, oracle) = brute_force_cheapest(&db, &aut, a, d, &costs).unwrap();
    assert_eq!(got, oracle);

    let m = MemorylessQuery::cheapest(&db, &aut, a, d, &costs).unwrap();
    let first = m.first().unwrap();
    let second = m.next_output(&first).unwrap().unwrap();
    assert_eq!(vec![first, second.clone()], got);
    assert_eq!(m.next_output(&second).unwrap(), None);
}

#[test]
fn cheapest_rejects_bad_costs() {
    let db = load_database(BANK_GRAPH).unwrap();
    let aut = compile_regex(BANK_REGEX, db.alphabet()).unwrap();
    let (s, t) = (VertexId(0), VertexId(1));
    let mut costs = vec![1; db.num_edges()];
    costs[3] = 0;
    assert!(matches!(
        run_query_cheapest(&db, &aut, s, t, &costs),
        Err(QueryError::NonPositiveCost(_))
    ));
    assert!(matches!(
        run_query_cheapest(&db, &aut, s, t, &[1, 2]),
        Err(QueryError::CostLength { got: 2, .. })
    ));
}

#[test]
fn frontier_holds_exactly_one_level() {
    for seed in 0..200 {
        let inst = generate_instance(&nfa_spec(seed));
        let (result, trace) = annotate_traced(&inst.db, &inst.aut, inst.source, inst.target);
        let Ok(r) = result else { continue };
        for (k, frontier) in trace.iter().enumerate() {
            for &(v, q) in frontier {
                assert_eq!(r.annotation.lengths.get(v, q), Some(k as u64), "seed {seed}");
            }
            let all = inst
                .db
                .vertices()
                .flat_map(|v| inst.aut.states().map(move |q| (v, q)))
                .filter(|&(v, q)| r.annotation.lengths.get(v, q) == Some(k as u64))
                .count();
            assert_eq!(all, frontier.len(), "seed {seed} level {k}");
        }
    }
}

#[test]
fn inner_loop_bounded_by_edges_times_transitions() {
    for seed in 0..200 {
        let inst = generate_instance(&nfa_spec(seed));
        let all: Vec<VertexId> = inst.db.vertices().collect();
        let m = annotate_multi(&inst.db, &inst.aut, inst.source, &all);
        let bound = (inst.db.num_edges() * inst.aut.num_transitions()) as u64;
        assert!(m.annotation.steps.inner <= bound, "seed {seed}");
    }
}

#[test]
fn multi_target_lambdas_on_bank() {
    let db = load_database(BANK_GRAPH).unwrap();
    let aut = compile_regex(BANK_REGEX, db.alphabet()).unwrap();
    let v = |n| db.vertex_by_name(n).unwrap();
    let m = annotate_multi(&db, &aut, v("Alix"), &[v("Bob"), v("Eve")]);
    assert_eq!(m.lambda(v("Bob")), Some(3));
    assert_eq!(m.lambda(v("Eve")), Some(2));
}

#[test]
fn epsilon_chain_gives_zero_length_answer() {
    let db = load_database(BANK_GRAPH).unwrap();
    let aut = compile_regex("eps eps (eps|eps)", db.alphabet()).unwrap();
    assert!(aut.has_epsilon());
    let s = db.vertex_by_name("Dan").unwrap();
    let q = run_query(&db, &aut, s, s);
    assert_eq!(q.lambda(), Some(0));
    assert_eq!(render(&db, &q.map(|o| o.walk).collect::<Vec<_>>()), ["<Dan>"]);
}

#[test]
fn unsatisfiable_query_reports_status() {
    let db = load_database("vertex a\nvertex b\nedge x a b h\nedge y b a h\n").unwrap();
    let aut = compile_regex("h* s", db.alphabet()).unwrap();
    let q = run_query(&db, &aut, VertexId(0), VertexId(1));
    assert_eq!(q.status(), QueryStatus::NoMatchingWalk);
    assert_eq!(q.count(), 0);
    assert!(brute_force_answers(&db, &aut, VertexId(0), VertexId(1))
        .unwrap()
        .is_empty());
    assert!(matches!(
        MemorylessQuery::new(&db, &aut, VertexId(0), VertexId(1)),
        Err(QueryError::NoMatchingWalk)
    ));
}

#[test]
fn memoryless_rejects_non_answers() {
    let db = load_database(BANK_GRAPH).unwrap();
    let aut = compile_regex(BANK_REGEX, db.alphabet()).unwrap();
    let v = |n| db.vertex_by_name(n).unwrap();
    let m = MemorylessQuery::new(&db, &aut, v("Alix"), v("Bob")).unwrap();
    for bad in ["e2,e4", "e2,e3,e6,e8", "e1,e7", "e3,e7"] {
        let w = parse_walk(&db, bad).unwrap();
        assert!(
            matches!(m.next_output(&w), Err(QueryError::InvalidPrevious(_))),
            "{bad}"
        );
    }
}

#[test]
fn memoryless_index_is_shared_across_threads() {
    let db = load_database(BANK_GRAPH).unwrap();
    let aut = compile_regex(BANK_REGEX, db.alphabet()).unwrap();
    let v = |n| db.vertex_by_name(n).unwrap();
    let m = MemorylessQuery::new(&db, &aut, v("Alix"), v("Bob")).unwrap();
    let answers: Vec<_> = run_query(&db, &aut, v("Alix"), v("Bob"))
        .map(|o| o.walk)
        .collect();
    let before = m.index().checksum();
    thread::scope(|scope| {
        for i in 0..answers.len() {
            let (m, answers) = (&m, &answers);
            scope.spawn(move || {
                let next = m.next_output(&answers[i]).unwrap();
                assert_eq!(next.as_ref(), answers.get(i + 1));
            });
        }
    });
    assert_eq!(m.index().checksum(), before);
}
