//! Multi-labeled, multi-edge directed graph databases.
//!
//! Vertices, edges and labels are dense integer ids. Every vertex keeps its
//! incoming and outgoing edge arrays, and every edge knows its position in
//! the incoming array of its target (`tgtidx`). Incoming arrays follow edge
//! declaration order, which fixes the order in which answers are produced.

use std::collections::HashMap;
use std::fmt;

use crate::error::GraphError;

/// A label symbol. Equality is id equality.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(pub u32);

impl Label {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl VertexId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl EdgeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Interned label dictionary. Ids are assigned in first-occurrence order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Alphabet {
    names: Vec<String>,
    index: HashMap<String, Label>,
}

impl Alphabet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern(&mut self, name: &str) -> Label {
        if let Some(&label) = self.index.get(name) {
            return label;
        }
        let label = Label(self.names.len() as u32);
        self.names.push(name.to_owned());
        self.index.insert(name.to_owned(), label);
        label
    }

    pub fn get(&self, name: &str) -> Option<Label> {
        self.index.get(name).copied()
    }

    pub fn name(&self, label: Label) -> &str {
        &self.names[label.index()]
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn labels(&self) -> impl Iterator<Item = Label> + '_ {
        (0..self.names.len() as u32).map(Label)
    }

    /// True when every label of `other` has the same id here.
    pub fn extends(&self, other: &Alphabet) -> bool {
        other.names.len() <= self.names.len() && other.names.iter().zip(&self.names).all(|(a, b)| a == b)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub id: EdgeId,
    pub src: VertexId,
    pub tgt: VertexId,
    /// Sorted, without duplicates. May be empty.
    pub labels: Vec<Label>,
    pub tgtidx: u32,
    pub cost: Option<u64>,
}

/// An immutable graph database.
#[derive(Clone, Debug)]
pub struct Database {
    alphabet: Alphabet,
    vertex_names: Vec<String>,
    vertex_index: HashMap<String, VertexId>,
    edge_names: Vec<String>,
    edge_index: HashMap<String, EdgeId>,
    edges: Vec<Edge>,
    incoming: Vec<Vec<EdgeId>>,
    outgoing: Vec<Vec<EdgeId>>,
}

impl Database {
    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn num_vertices(&self) -> usize {
        self.vertex_names.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// `|V| + |E| + sum of label set sizes`.
    pub fn size(&self) -> usize {
        self.num_vertices() + self.num_edges() + self.edges.iter().map(|e| e.labels.len()).sum::<usize>()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> {
        (0..self.vertex_names.len() as u32).map(VertexId)
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    #[inline]
    pub fn edge(&self, e: EdgeId) -> &Edge {
        &self.edges[e.index()]
    }

    #[inline]
    pub fn src(&self, e: EdgeId) -> VertexId {
        self.edges[e.index()].src
    }

    #[inline]
    pub fn tgt(&self, e: EdgeId) -> VertexId {
        self.edges[e.index()].tgt
    }

    #[inline]
    pub fn labels(&self, e: EdgeId) -> &[Label] {
        &self.edges[e.index()].labels
    }

    #[inline]
    pub fn tgtidx(&self, e: EdgeId) -> u32 {
        self.edges[e.index()].tgtidx
    }

    #[inline]
    pub fn incoming(&self, v: VertexId) -> &[EdgeId] {
        &self.incoming[v.index()]
    }

    #[inline]
    pub fn outgoing(&self, v: VertexId) -> &[EdgeId] {
        &self.outgoing[v.index()]
    }

    #[inline]
    pub fn indeg(&self, v: VertexId) -> usize {
        self.incoming[v.index()].len()
    }

    #[inline]
    pub fn outdeg(&self, v: VertexId) -> usize {
        self.outgoing[v.index()].len()
    }

    pub fn vertex_name(&self, v: VertexId) -> &str {
        &self.vertex_names[v.index()]
    }

    pub fn edge_name(&self, e: EdgeId) -> &str {
        &self.edge_names[e.index()]
    }

    pub fn vertex_by_name(&self, name: &str) -> Option<VertexId> {
        self.vertex_index.get(name).copied()
    }

    pub fn edge_by_name(&self, name: &str) -> Option<EdgeId> {
        self.edge_index.get(name).copied()
    }

    pub fn costs(&self) -> Option<Vec<u64>> {
        self.edges.iter().map(|e| e.cost).collect()
    }

    /// Recomputes every edge's `tgtidx` from the incoming arrays in one pass.
    pub fn precompute_tgtidx(&mut self) {
        for incoming in &self.incoming {
            for (i, e) in incoming.iter().enumerate() {
                self.edges[e.index()].tgtidx = i as u32;
            }
        }
    }

    /// Renders the database in the line-oriented text format accepted by
    /// [`load_database`].
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for name in &self.vertex_names {
            out.push_str("vertex ");
            out.push_str(name);
            out.push('\n');
        }
        for edge in &self.edges {
            let labels = if edge.labels.is_empty() {
                "-".to_owned()
            } else {
                edge.labels
                    .iter()
                    .map(|&l| self.alphabet.name(l))
                    .collect::<Vec<_>>()
                    .join(",")
            };
            out.push_str(&format!(
                "edge {} {} {} {}",
                self.edge_names[edge.id.index()],
                self.vertex_names[edge.src.index()],
                self.vertex_names[edge.tgt.index()],
                labels
            ));
            if let Some(cost) = edge.cost {
                out.push_str(&format!(" {cost}"));
            }
            out.push('\n');
        }
        out
    }
}

/// Incremental construction of a [`Database`].
#[derive(Debug, Default)]
pub struct DatabaseBuilder {
    alphabet: Alphabet,
    vertex_names: Vec<String>,
    vertex_index: HashMap<String, VertexId>,
    edge_names: Vec<String>,
    edge_index: HashMap<String, EdgeId>,
    edges: Vec<Edge>,
}

impl DatabaseBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_alphabet(alphabet: Alphabet) -> Self {
        Self {
            alphabet,
            ..Self::default()
        }
    }

    pub fn add_vertex(&mut self, name: &str) -> Result<VertexId, GraphError> {
        if self.vertex_index.contains_key(name) {
            return Err(GraphError::DuplicateVertex(name.to_owned()));
        }
        let v = VertexId(self.vertex_names.len() as u32);
        self.vertex_names.push(name.to_owned());
        self.vertex_index.insert(name.to_owned(), v);
        Ok(v)
    }

    pub fn vertex(&self, name: &str) -> Option<VertexId> {
        self.vertex_index.get(name).copied()
    }

    pub fn intern_label(&mut self, name: &str) -> Label {
        self.alphabet.intern(name)
    }

    pub fn add_edge(
        &mut self,
        name: &str,
        src: VertexId,
        tgt: VertexId,
        labels: &[Label],
        cost: Option<u64>,
    ) -> Result<EdgeId, GraphError> {
        if self.edge_index.contains_key(name) {
            return Err(GraphError::DuplicateEdgeId(name.to_owned()));
        }
        let n = self.vertex_names.len() as u32;
        if src.0 >= n || tgt.0 >= n {
            return Err(GraphError::UnknownVertex(format!(
                "vertex id {} out of range",
                src.0.max(tgt.0)
            )));
        }
        let mut labels = labels.to_vec();
        labels.sort_unstable();
        labels.dedup();
        let id = EdgeId(self.edges.len() as u32);
        self.edge_names.push(name.to_owned());
        self.edge_index.insert(name.to_owned(), id);
        self.edges.push(Edge {
            id,
            src,
            tgt,
            labels,
            tgtidx: 0,
            cost,
        });
        Ok(id)
    }

    /// Adds an edge named `e<id>` (1-based), handy for generated graphs.
    pub fn add_anonymous_edge(&mut self, src: VertexId, tgt: VertexId, labels: &[Label]) -> EdgeId {
        let name = format!("e{}", self.edges.len() + 1);
        self.add_edge(&name, src, tgt, labels, None)
            .expect("generated edge names are unique")
    }

    pub fn build(self) -> Database {
        let n = self.vertex_names.len();
        let mut incoming = vec![Vec::new(); n];
        let mut outgoing = vec![Vec::new(); n];
        for edge in &self.edges {
            incoming[edge.tgt.index()].push(edge.id);
            outgoing[edge.src.index()].push(edge.id);
        }
        let mut db = Database {
            alphabet: self.alphabet,
            vertex_names: self.vertex_names,
            vertex_index: self.vertex_index,
            edge_names: self.edge_names,
            edge_index: self.edge_index,
            edges: self.edges,
            incoming,
            outgoing,
        };
        db.precompute_tgtidx();
        db
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Parses a graph file.
///
/// ```text
/// vertex <name>
/// edge <name> <src> <tgt> <label>[,<label>...] [cost]
/// edge <name> <src> <tgt> -          # empty label set
/// ```
pub fn load_database(text: &str) -> Result<Database, GraphError> {
    let mut builder = DatabaseBuilder::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let parse_err = |reason: String| GraphError::Parse {
            line: line_no,
            reason,
        };
        match fields[0] {
            "vertex" => {
                if fields.len() != 2 {
                    return Err(parse_err("expected `vertex <name>`".into()));
                }
                check_name(fields[1]).map_err(parse_err)?;
                builder.add_vertex(fields[1]).map_err(|e| e.at_line(line_no))?;
            }
            "edge" => {
                if fields.len() != 5 && fields.len() != 6 {
                    return Err(parse_err(
                        "expected `edge <name> <src> <tgt> <labels> [cost]`".into(),
                    ));
                }
                check_name(fields[1]).map_err(parse_err)?;
                let lookup = |name: &str| {
                    builder
                        .vertex(name)
                        .ok_or_else(|| GraphError::UnknownVertex(name.to_owned()))
                };
                let src = lookup(fields[2]).map_err(|e| e.at_line(line_no))?;
                let tgt = lookup(fields[3]).map_err(|e| e.at_line(line_no))?;
                let mut labels = Vec::new();
                if fields[4] != "-" {
                    for name in fields[4].split(',') {
                        check_name(name).map_err(parse_err)?;
                        labels.push(builder.intern_label(name));
                    }
                }
                let cost = match fields.get(5) {
                    Some(c) => Some(
                        c.parse::<u64>()
                            .map_err(|_| parse_err(format!("invalid cost `{c}`")))?,
                    ),
                    None => None,
                };
                builder
                    .add_edge(fields[1], src, tgt, &labels, cost)
                    .map_err(|e| e.at_line(line_no))?;
            }
            other => return Err(parse_err(format!("unknown directive `{other}`"))),
        }
    }
    Ok(builder.build())
}

fn check_name(name: &str) -> Result<(), String> {
    if is_identifier(name) {
        Ok(())
    } else {
        Err(format!("invalid identifier `{name}`"))
    }
}

/// A walk: `v0 e0 v1 ... e_{k-1} vk`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Walk {
    vertices: Vec<VertexId>,
    edges: Vec<EdgeId>,
}

impl Walk {
    pub fn empty(v: VertexId) -> Self {
        Walk {
            vertices: vec![v],
            edges: Vec::new(),
        }
    }

    /// Builds a walk from its edge sequence. `start` is only used when
    /// `edges` is empty. Returns `None` if consecutive edges do not chain.
    pub fn from_edges(db: &Database, start: VertexId, edges: Vec<EdgeId>) -> Option<Self> {
        let mut vertices = Vec::with_capacity(edges.len() + 1);
        vertices.push(edges.first().map_or(start, |&e| db.src(e)));
        for &e in &edges {
            if db.src(e) != *vertices.last().unwrap() {
                return None;
            }
            vertices.push(db.tgt(e));
        }
        Some(Walk { vertices, edges })
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn source(&self) -> VertexId {
        self.vertices[0]
    }

    pub fn target(&self) -> VertexId {
        *self.vertices.last().unwrap()
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn edges(&self) -> &[EdgeId] {
        &self.edges
    }

    /// Sort key of the canonical answer order: target indices read from the
    /// last edge to the first.
    pub fn order_key(&self, db: &Database) -> Vec<u32> {
        self.edges.iter().rev().map(|&e| db.tgtidx(e)).collect()
    }

    pub fn display<'a>(&'a self, db: &'a Database, format: WalkFormat) -> WalkDisplay<'a> {
        WalkDisplay {
            walk: self,
            db,
            format,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum WalkFormat {
    /// `e1,e5,e8`; a zero-length walk renders as `<vertex>`.
    #[default]
    Edges,
    /// `Alix -e1-> Cassie -e5-> Eve -e8-> Bob`
    Full,
}

pub struct WalkDisplay<'a> {
    walk: &'a Walk,
    db: &'a Database,
    format: WalkFormat,
}

impl fmt::Display for WalkDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let db = self.db;
        match self.format {
            WalkFormat::Edges => {
                if self.walk.edges.is_empty() {
                    return write!(f, "<{}>", db.vertex_name(self.walk.source()));
                }
                for (i, &e) in self.walk.edges.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    f.write_str(db.edge_name(e))?;
                }
                Ok(())
            }
            WalkFormat::Full => {
                f.write_str(db.vertex_name(self.walk.vertices[0]))?;
                for (i, &e) in self.walk.edges.iter().enumerate() {
                    write!(
                        f,
                        " -{}-> {}",
                        db.edge_name(e),
                        db.vertex_name(self.walk.vertices[i + 1])
                    )?;
                }
                Ok(())
            }
        }
    }
}

/// Parses the edge-list rendering (`e2,e4,e8` or `<Alix>`) back into a walk.
pub fn parse_walk(db: &Database, text: &str) -> Result<Walk, GraphError> {
    let text = text.trim();
    if let Some(name) = text.strip_prefix('<').and_then(|t| t.strip_suffix('>')) {
        let v = db
            .vertex_by_name(name)
            .ok_or_else(|| GraphError::UnknownVertex(name.to_owned()))?;
        return Ok(Walk::empty(v));
    }
    let mut edges = Vec::new();
    for name in text.split(',') {
        let name = name.trim();
        edges.push(
            db.edge_by_name(name)
                .ok_or_else(|| GraphError::UnknownEdge(name.to_owned()))?,
        );
    }
    Walk::from_edges(db, VertexId(0), edges).ok_or(GraphError::NotAWalk)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::BANK_GRAPH;

    fn e(db: &Database, name: &str) -> EdgeId {
        db.edge_by_name(name).unwrap()
    }

    #[test]
    fn bank_graph_dimensions() {
        let db = load_database(BANK_GRAPH).unwrap();
        assert_eq!(db.num_vertices(), 5);
        assert_eq!(db.num_edges(), 8);
        assert_eq!(db.alphabet().len(), 2);
    }

    #[test]
    fn bank_tgtidx_matches_arrowheads() {
        let db = load_database(BANK_GRAPH).unwrap();
        assert_eq!(db.tgtidx(e(&db, "e8")), 0);
        assert_eq!(db.tgtidx(e(&db, "e7")), 1);
        assert_eq!(db.tgtidx(e(&db, "e4")), 0);
        assert_eq!(db.tgtidx(e(&db, "e5")), 1);
        assert_eq!(db.tgtidx(e(&db, "e6")), 2);
        assert_eq!(db.tgtidx(e(&db, "e3")), 0);
        assert_eq!(db.tgtidx(e(&db, "e1")), 1);
        assert_eq!(db.tgtidx(e(&db, "e2")), 0);
    }

    #[test]
    fn single_vertex_no_edges() {
        let db = load_database("vertex a\n").unwrap();
        assert_eq!(db.num_vertices(), 1);
        assert_eq!(db.num_edges(), 0);
        assert!(db.incoming(VertexId(0)).is_empty());
        assert!(db.outgoing(VertexId(0)).is_empty());
    }

    #[test]
    fn self_loop_has_index_zero() {
        let db = load_database("vertex a\nedge l a a x\n").unwrap();
        assert_eq!(db.tgtidx(EdgeId(0)), 0);
        assert_eq!(db.incoming(VertexId(0)), &[EdgeId(0)]);
    }

    #[test]
    fn empty_label_set() {
        let db = load_database("vertex a\nvertex b\nedge x a b -\n").unwrap();
        assert!(db.labels(EdgeId(0)).is_empty());
    }

    #[test]
    fn errors() {
        assert!(matches!(
            load_database("vertex a\nedge x a b h\n"),
            Err(GraphError::UnknownVertex(_)) | Err(GraphError::AtLine { .. })
        ));
        let err = load_database("vertex a\nedge x a a h\nedge x a a h\n").unwrap_err();
        assert!(err.to_string().contains("duplicate edge"), "{err}");
        let err = load_database("vertex a\nbogus\n").unwrap_err();
        assert!(matches!(err, GraphError::Parse { line: 2, .. }));
        let err = load_database("vertex 1a\n").unwrap_err();
        assert!(matches!(err, GraphError::Parse { line: 1, .. }));
        let err = load_database("vertex a\nedge x a a h 1.5\n").unwrap_err();
        assert!(matches!(err, GraphError::Parse { line: 2, .. }));
    }

    #[test]
    fn comments_and_costs() {
        let db = load_database("# header\nvertex a # trailing\nedge x a a h,s 7\n").unwrap();
        assert_eq!(db.edge(EdgeId(0)).cost, Some(7));
        assert_eq!(db.labels(EdgeId(0)).len(), 2);
    }

    #[test]
    fn walk_rendering_and_parsing() {
        let db = load_database(BANK_GRAPH).unwrap();
        let w = parse_walk(&db, "e2,e4,e8").unwrap();
        assert_eq!(w.len(), 3);
        assert_eq!(w.display(&db, WalkFormat::Edges).to_string(), "e2,e4,e8");
        assert_eq!(
            w.display(&db, WalkFormat::Full).to_string(),
            "Alix -e2-> Dan -e4-> Eve -e8-> Bob"
        );
        assert!(matches!(parse_walk(&db, "e2,e8"), Err(GraphError::NotAWalk)));
        let z = parse_walk(&db, "<Alix>").unwrap();
        assert_eq!(z.len(), 0);
        assert_eq!(z.display(&db, WalkFormat::Edges).to_string(), "<Alix>");
    }

    #[test]
    fn text_round_trip_preserves_layout() {
        let db = load_database(BANK_GRAPH).unwrap();
        let again = load_database(&db.to_text()).unwrap();
        for v in db.vertices() {
            assert_eq!(db.incoming(v), again.incoming(v));
            assert_eq!(db.outgoing(v), again.outgoing(v));
            assert_eq!(db.vertex_name(v), again.vertex_name(v));
        }
        assert_eq!(db.edges(), again.edges());
    }
}
