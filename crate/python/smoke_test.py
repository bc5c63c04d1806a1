"""Smoke test for the `dsw` extension module.

Build first with `cargo build -p dsw-python` (or `--release`), then run
`python3 python/smoke_test.py`. The script copies the built shared library
to a temporary directory as `dsw.so` and imports it from there.
"""

import importlib
import shutil
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
DATA = ROOT / "crates" / "cli" / "tests" / "data"
BANK_ANSWERS = ["e2,e4,e8", "e1,e5,e8", "e1,e6,e8", "e2,e3,e7"]


def find_library():
    for profile in ("release", "debug"):
        for name in ("libdsw.so", "libdsw.dylib"):
            path = ROOT / "target" / profile / name
            if path.exists():
                return path
    sys.exit("extension not built; run `cargo build -p dsw-python` first")


def main():
    tmp = Path(tempfile.mkdtemp())
    shutil.copy(find_library(), tmp / "dsw.so")
    sys.path.insert(0, str(tmp))
    dsw = importlib.import_module("dsw")

    db = dsw.Database.load(str(DATA / "bank.graph"))
    assert (db.num_vertices, db.num_edges) == (5, 8)

    aut = dsw.Automaton.regex(db, "h* s (h|s)*")
    assert dsw.shortest_length(db, aut, "Alix", "Bob") == 3
    assert dsw.query(db, aut, "Alix", "Bob") == BANK_ANSWERS
    assert dsw.query(db, aut, "Alix", "Bob", limit=1) == BANK_ANSWERS[:1]
    assert dsw.query(db, aut, "Alix", "Bob", limit=1, full=True) == [
        "Alix -e2-> Dan -e4-> Eve -e8-> Bob"
    ]

    nfa = dsw.Automaton.nfa(db, (DATA / "bank.nfa").read_text())
    assert dsw.query(db, nfa, "Alix", "Bob") == BANK_ANSWERS
    assert dsw.query_with_multiplicity(db, nfa, "Alix", "Bob") == [
        ("e2,e4,e8", 3),
        ("e1,e5,e8", 1),
        ("e1,e6,e8", 2),
        ("e2,e3,e7", 2),
    ]

    chain, prev = [], None
    while (prev := dsw.next_output(db, aut, "Alix", "Bob", prev)) is not None:
        chain.append(prev)
    assert chain == BANK_ANSWERS

    try:
        dsw.next_output(db, aut, "Alix", "Bob", "e1,e7")
    except ValueError:
        pass
    else:
        raise AssertionError("non-answer accepted as previous")

    try:
        dsw.query(db, aut, "Nobody", "Bob")
    except KeyError:
        pass
    else:
        raise AssertionError("unknown vertex accepted")

    print("python smoke test: ok")


if __name__ == "__main__":
    main()
