//! Python bindings: load a database, compile a query, enumerate answers.

use dsw_core::{
    compile_regex, load_database, parse_nfa, parse_walk, run_query, Automaton as CoreAutomaton,
    Database as CoreDatabase, MemorylessQuery, QueryError, VertexId, Walk, WalkFormat,
};
use pyo3::exceptions::{PyKeyError, PyValueError};
use pyo3::prelude::*;

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// An edge-labeled multigraph.
#[pyclass(frozen, name = "Database")]
struct Database {
    inner: CoreDatabase,
}

#[pymethods]
impl Database {
    /// Parses the text format (`vertex` and `edge` lines).
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        load_database(text)
            .map(|inner| Database { inner })
            .map_err(value_err)
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        let text = std::fs::read_to_string(path).map_err(value_err)?;
        Self::new(&text)
    }

    #[getter]
    fn num_vertices(&self) -> usize {
        self.inner.num_vertices()
    }

    #[getter]
    fn num_edges(&self) -> usize {
        self.inner.num_edges()
    }

    fn vertices(&self) -> Vec<String> {
        self.inner
            .vertices()
            .map(|v| self.inner.vertex_name(v).to_owned())
            .collect()
    }
}

impl Database {
    fn vertex(&self, name: &str) -> PyResult<VertexId> {
        self.inner
            .vertex_by_name(name)
            .ok_or_else(|| PyKeyError::new_err(format!("unknown vertex `{name}`")))
    }

    fn render(&self, walk: &Walk, format: WalkFormat) -> String {
        walk.display(&self.inner, format).to_string()
    }
}

/// A query automaton over a database's labels.
#[pyclass(frozen, name = "Automaton")]
struct Automaton {
    inner: CoreAutomaton,
}

#[pymethods]
impl Automaton {
    #[staticmethod]
    fn regex(db: &Database, text: &str) -> PyResult<Self> {
        compile_regex(text, db.inner.alphabet())
            .map(|inner| Automaton { inner })
            .map_err(value_err)
    }

    #[staticmethod]
    fn nfa(db: &Database, text: &str) -> PyResult<Self> {
        parse_nfa(text, db.inner.alphabet())
            .map(|inner| Automaton { inner })
            .map_err(value_err)
    }

    #[getter]
    fn num_states(&self) -> usize {
        self.inner.num_states()
    }

    fn has_epsilon(&self) -> bool {
        self.inner.has_epsilon()
    }
}

fn walk_format(full: bool) -> WalkFormat {
    if full {
        WalkFormat::Full
    } else {
        WalkFormat::Edges
    }
}

/// Length of the shortest matching walk, or `None`.
#[pyfunction]
fn shortest_length(db: &Database, aut: &Automaton, source: &str, target: &str) -> PyResult<Option<u64>> {
    let (s, t) = (db.vertex(source)?, db.vertex(target)?);
    Ok(run_query(&db.inner, &aut.inner, s, t).lambda())
}

/// Answers in canonical order, rendered as edge lists (or full walks).
#[pyfunction]
#[pyo3(signature = (db, aut, source, target, limit=None, full=false))]
fn query(
    db: &Database,
    aut: &Automaton,
    source: &str,
    target: &str,
    limit: Option<usize>,
    full: bool,
) -> PyResult<Vec<String>> {
    let (s, t) = (db.vertex(source)?, db.vertex(target)?);
    Ok(run_query(&db.inner, &aut.inner, s, t)
        .take(limit.unwrap_or(usize::MAX))
        .map(|o| db.render(&o.walk, walk_format(full)))
        .collect())
}

/// Answers paired with their number of accepting runs.
#[pyfunction]
#[pyo3(signature = (db, aut, source, target, limit=None))]
fn query_with_multiplicity(
    db: &Database,
    aut: &Automaton,
    source: &str,
    target: &str,
    limit: Option<usize>,
) -> PyResult<Vec<(String, u128)>> {
    let (s, t) = (db.vertex(source)?, db.vertex(target)?);
    Ok(run_query(&db.inner, &aut.inner, s, t)
        .with_multiplicity(&aut.inner)
        .take(limit.unwrap_or(usize::MAX))
        .map(|o| (db.render(&o.walk, WalkFormat::Edges), o.multiplicity.unwrap_or(0)))
        .collect())
}

/// The answer following `previous` (edge-list text), computed without
/// enumerator state. `previous=None` gives the first answer.
#[pyfunction]
#[pyo3(signature = (db, aut, source, target, previous=None))]
fn next_output(
    db: &Database,
    aut: &Automaton,
    source: &str,
    target: &str,
    previous: Option<&str>,
) -> PyResult<Option<String>> {
    let (s, t) = (db.vertex(source)?, db.vertex(target)?);
    let q = match MemorylessQuery::new(&db.inner, &aut.inner, s, t) {
        Ok(q) => q,
        Err(QueryError::NoMatchingWalk) => return Ok(None),
        Err(e) => return Err(value_err(e)),
    };
    let next = match previous {
        None => q.first(),
        Some(text) => {
            let prev = parse_walk(&db.inner, text).map_err(value_err)?;
            q.next_output(&prev).map_err(value_err)?
        }
    };
    Ok(next.map(|w| db.render(&w, WalkFormat::Edges)))
}

#[pymodule]
fn dsw(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Database>()?;
    m.add_class::<Automaton>()?;
    m.add_function(wrap_pyfunction!(shortest_length, m)?)?;
    m.add_function(wrap_pyfunction!(query, m)?)?;
    m.add_function(wrap_pyfunction!(query_with_multiplicity, m)?)?;
    m.add_function(wrap_pyfunction!(next_output, m)?)?;
    Ok(())
}
