use std::path::PathBuf;
use std::process::{Command, Output};

const BANK_REGEX: &str = "h* s (h|s)*";
const BANK_ANSWERS: [&str; 4] = ["e2,e4,e8", "e1,e5,e8", "e1,e6,e8", "e2,e3,e7"];

fn data(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "data", name]
        .iter()
        .collect();
    p.to_string_lossy().into_owned()
}

fn dsw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dsw"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn bank(extra: &[&str]) -> Output {
    let graph = data("bank.graph");
    let mut args = vec![
        "query", "--graph", &graph, "--regex", BANK_REGEX, "--source", "Alix",
    ];
    if !extra.contains(&"--all-targets") {
        args.extend(["--target", "Bob"]);
    }
    args.extend_from_slice(extra);
    dsw(&args)
}

fn lines(out: &Output) -> Vec<String> {
    String::from_utf8(out.stdout.clone())
        .unwrap()
        .lines()
        .map(str::to_owned)
        .collect()
}

#[test]
fn bank_answers_in_canonical_order() {
    let out = bank(&[]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(lines(&out), BANK_ANSWERS);
}

#[test]
fn nfa_file_gives_same_answers() {
    let (graph, nfa) = (data("bank.graph"), data("bank.nfa"));
    let out = dsw(&[
        "query", "--graph", &graph, "--nfa", &nfa, "--source", "Alix", "--target", "Bob",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(lines(&out), BANK_ANSWERS);
}

#[test]
fn limit_one_prints_first_line() {
    let out = bank(&["--limit", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(lines(&out), ["e2,e4,e8"]);
}

#[test]
fn resume_prints_remaining_answers() {
    let out = bank(&["--resume-from", "e2,e4,e8"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(lines(&out), ["e1,e5,e8", "e1,e6,e8", "e2,e3,e7"]);
}

#[test]
fn resume_equals_full_output_minus_prefix() {
    let full = lines(&bank(&[]));
    for (i, w) in full.iter().enumerate() {
        let out = bank(&["--resume-from", w]);
        assert_eq!(out.status.code(), Some(0));
        assert_eq!(lines(&out), full[i + 1..], "resume from {w}");
    }
}

#[test]
fn resume_from_non_answer_is_input_error() {
    let out = bank(&["--resume-from", "e1,e7"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("invalid previous answer"));
}

#[test]
fn multiplicity_suffix() {
    let out = bank(&["--multiplicity"]);
    assert_eq!(
        lines(&out),
        ["e2,e4,e8 x3", "e1,e5,e8 x1", "e1,e6,e8 x2", "e2,e3,e7 x2"]
    );
}

#[test]
fn full_format() {
    let out = bank(&["--format", "full", "--limit", "2"]);
    assert_eq!(
        lines(&out),
        [
            "Alix -e2-> Dan -e4-> Eve -e8-> Bob",
            "Alix -e1-> Cassie -e5-> Eve -e8-> Bob"
        ]
    );
}

#[test]
fn all_targets_prefixes_target_name() {
    let out = bank(&["--all-targets"]);
    assert_eq!(out.status.code(), Some(0));
    let got = lines(&out);
    let bob: Vec<_> = got.iter().filter_map(|l| l.strip_prefix("Bob\t")).collect();
    assert_eq!(bob, BANK_ANSWERS);
    assert!(got.contains(&"Dan\te2".to_owned()));
    assert!(got.contains(&"Eve\te2,e4".to_owned()));
    assert!(got.contains(&"Eve\te1,e6".to_owned()));
}

#[test]
fn no_matching_walk_exits_3() {
    let graph = data("bank.graph");
    let out = dsw(&[
        "query",
        "--graph",
        &graph,
        "--regex",
        "h h h h h",
        "--source",
        "Alix",
        "--target",
        "Bob",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(out.stdout.is_empty());
}

#[test]
fn input_errors_exit_2() {
    let graph = data("bank.graph");
    let cases: [&[&str]; 4] = [
        &[
            "query", "--graph", &graph, "--regex", "h (", "--source", "Alix", "--target", "Bob",
        ],
        &[
            "query", "--graph", &graph, "--regex", "h", "--source", "Nobody", "--target", "Bob",
        ],
        &[
            "query",
            "--graph",
            "/nonexistent/graph",
            "--regex",
            "h",
            "--source",
            "Alix",
            "--target",
            "Bob",
        ],
        &[
            "query",
            "--graph",
            &graph,
            "--regex",
            "h",
            "--source",
            "Alix",
            "--target",
            "Bob",
            "--mode",
            "cheapest",
            "--cost-field",
        ],
    ];
    for args in cases {
        let out = dsw(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(
            String::from_utf8_lossy(&out.stderr).starts_with("error:"),
            "{args:?}"
        );
    }
}

#[test]
fn output_is_deterministic() {
    let a = bank(&["--multiplicity", "--format", "full"]);
    let b = bank(&["--multiplicity", "--format", "full"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn stats_go_to_stderr() {
    let out = bank(&["--stats"]);
    assert_eq!(lines(&out), BANK_ANSWERS);
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("lambda: 3"));
    assert!(err.contains("answers: 4"));
    let per = err
        .lines()
        .find_map(|l| l.strip_prefix("per_output_steps: "))
        .unwrap();
    assert_eq!(per.split(',').count(), 4);
}

#[test]
fn cheapest_with_cost_column() {
    let graph = data("costs.graph");
    let base = [
        "query", "--graph", &graph, "--regex", "x+", "--source", "a", "--target", "d", "--mode", "cheapest",
    ];
    let out = dsw(&[&base[..], &["--cost-field"]].concat());
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(lines(&out), ["ab,bd", "ac,cb,bd"]);
    let resumed = dsw(&[&base[..], &["--cost-field", "--resume-from", "ab,bd"]].concat());
    assert_eq!(lines(&resumed), ["ac,cb,bd"]);
    let unit = dsw(&base);
    assert_eq!(lines(&unit), ["ad"]);
}

#[test]
fn bench_fixed_lambda_delay_is_flat() {
    let out = dsw(&[
        "bench",
        "--sizes",
        "20,200,2000",
        "--lambdas",
        "3",
        "--prep-sizes",
        "100",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let rows = lines(&out);
    let max_delay: Vec<&str> = rows[1..4]
        .iter()
        .map(|r| r.split_whitespace().nth(5).unwrap())
        .collect();
    assert_eq!(max_delay.len(), 3);
    assert!(max_delay.iter().all(|d| *d == max_delay[0]));
}
