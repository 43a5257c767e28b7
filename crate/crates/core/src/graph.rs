//! Simple loopless undirected graphs with a totally ordered edge set.
//!
//! Vertices are labelled `1..=n` and edges `1..=|E|`; the label of an edge is
//! its position in the input list, which also fixes the edge order used by the
//! traversal machinery (a later edge is a larger edge).

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("a graph needs at least one vertex")]
    NoVertices,
    #[error("edge e{edge} is a loop at vertex {vertex}")]
    Loop { edge: usize, vertex: usize },
    #[error("edge e{edge} = {{{u},{v}}} duplicates e{first}")]
    DuplicateEdge {
        edge: usize,
        first: usize,
        u: usize,
        v: usize,
    },
    #[error("edge e{edge} uses vertex {vertex}, outside 1..={n}")]
    VertexOutOfRange { edge: usize, vertex: usize, n: usize },
    #[error("vertex {vertex} is not a vertex of the graph (n = {n})")]
    UnknownVertex { vertex: usize, n: usize },
    #[error("vertex {vertex} is not a member of the given vertex set")]
    NotInSet { vertex: usize },
    #[error("root set is empty")]
    EmptyRoots,
    #[error("component {component:?} contains no root")]
    RootlessComponent { component: Vec<usize> },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Degrees of a vertex relative to a vertex set `U` containing it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeStats {
    pub degree: usize,
    /// Neighbours outside `U`.
    pub out_degree: usize,
    /// Neighbours inside `U`.
    pub in_degree: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    // incident[v - 1] = (edge label, neighbour), ascending by edge label
    incident: Vec<Vec<(usize, usize)>>,
}

impl Graph {
    /// Builds a graph on vertices `1..=n`. Edge `k` (1-based) is `edge_list[k - 1]`.
    pub fn new(n: usize, edge_list: &[(usize, usize)]) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::NoVertices);
        }
        let mut edges = Vec::with_capacity(edge_list.len());
        let mut incident = vec![Vec::new(); n];
        for (idx, &(a, b)) in edge_list.iter().enumerate() {
            let label = idx + 1;
            for vertex in [a, b] {
                if vertex == 0 || vertex > n {
                    return Err(GraphError::VertexOutOfRange {
                        edge: label,
                        vertex,
                        n,
                    });
                }
            }
            if a == b {
                return Err(GraphError::Loop {
                    edge: label,
                    vertex: a,
                });
            }
            let pair = (a.min(b), a.max(b));
            if let Some(first) = edges.iter().position(|&e| e == pair) {
                return Err(GraphError::DuplicateEdge {
                    edge: label,
                    first: first + 1,
                    u: pair.0,
                    v: pair.1,
                });
            }
            edges.push(pair);
            incident[pair.0 - 1].push((label, pair.1));
            incident[pair.1 - 1].push((label, pair.0));
        }
        Ok(Graph { n, edges, incident })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = usize> {
        1..=self.n
    }

    /// `(label, u, v)` with `u < v`, in ascending edge order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.edges
            .iter()
            .enumerate()
            .map(|(i, &(u, v))| (i + 1, u, v))
    }

    /// Endpoints of edge `label`.
    ///
    /// Panics if the label is not an edge of the graph.
    pub fn endpoints(&self, label: usize) -> (usize, usize) {
        self.edges[label - 1]
    }

    pub fn contains_vertex(&self, v: usize) -> bool {
        (1..=self.n).contains(&v)
    }

    pub fn contains_edge(&self, label: usize) -> bool {
        (1..=self.edges.len()).contains(&label)
    }

    pub fn is_incident(&self, edge: usize, v: usize) -> bool {
        let (a, b) = self.endpoints(edge);
        a == v || b == v
    }

    /// `(edge label, neighbour)` pairs at `v`.
    pub fn incident(&self, v: usize) -> &[(usize, usize)] {
        &self.incident[v - 1]
    }

    pub fn neighbours(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.incident[v - 1].iter().map(|&(_, w)| w)
    }

    pub fn degree(&self, v: usize) -> usize {
        self.incident[v - 1].len()
    }

    pub fn edge_between(&self, u: usize, v: usize) -> Option<usize> {
        self.incident[u - 1]
            .iter()
            .find(|&&(_, w)| w == v)
            .map(|&(e, _)| e)
    }

    /// Neighbours of `v` for which `inside` is false.
    pub(crate) fn out_degree_by(&self, v: usize, inside: impl Fn(usize) -> bool) -> usize {
        self.neighbours(v).filter(|&w| !inside(w)).count()
    }

    pub fn degree_stats(&self, set: &BTreeSet<usize>, v: usize) -> Result<DegreeStats, GraphError> {
        self.check_vertex(v)?;
        if !set.contains(&v) {
            return Err(GraphError::NotInSet { vertex: v });
        }
        let degree = self.degree(v);
        let in_degree = self.neighbours(v).filter(|w| set.contains(w)).count();
        Ok(DegreeStats {
            degree,
            out_degree: degree - in_degree,
            in_degree,
        })
    }

    pub(crate) fn check_vertex(&self, v: usize) -> Result<(), GraphError> {
        if self.contains_vertex(v) {
            Ok(())
        } else {
            Err(GraphError::UnknownVertex { vertex: v, n: self.n })
        }
    }

    /// Connected components, each sorted, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for start in self.vertices() {
            if seen[start - 1] {
                continue;
            }
            seen[start - 1] = true;
            let mut stack = vec![start];
            let mut comp = Vec::new();
            while let Some(v) = stack.pop() {
                comp.push(v);
                for w in self.neighbours(v) {
                    if !seen[w - 1] {
                        seen[w - 1] = true;
                        stack.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() == 1
    }

    /// Short human-readable identifier, e.g. `n4[13,24,23,12,34]`.
    pub fn id(&self) -> String {
        let edges: Vec<String> = self.edges.iter().map(|(u, v)| format!("{u}-{v}")).collect();
        format!("n{}[{}]", self.n, edges.join(","))
    }
}

/// Text format: `n <count>` followed by one `e <u> <v>` line per edge in
/// ascending edge order.
impl fmt::Display for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "n {}", self.n)?;
        for &(u, v) in &self.edges {
            writeln!(f, "e {u} {v}")?;
        }
        Ok(())
    }
}

impl FromStr for Graph {
    type Err = GraphError;

    /// Blank lines and lines starting with `#` are ignored.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parse_err = |line: usize, message: String| GraphError::Parse { line, message };
        let mut n = None;
        let mut edges = Vec::new();
        for (idx, raw) in s.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let num = |tok: &str| {
                tok.parse::<usize>()
                    .map_err(|_| parse_err(line_no, format!("expected a non-negative integer, got `{tok}`")))
            };
            match (fields[0], n) {
                ("n", None) if fields.len() == 2 => n = Some(num(fields[1])?),
                ("n", Some(_)) => return Err(parse_err(line_no, "repeated `n` line".into())),
                ("e", Some(_)) if fields.len() == 3 => edges.push((num(fields[1])?, num(fields[2])?)),
                ("e", None) => return Err(parse_err(line_no, "`e` line before `n` line".into())),
                _ => return Err(parse_err(line_no, format!("unrecognised line `{line}`"))),
            }
        }
        let n = n.ok_or_else(|| parse_err(0, "missing `n` line".into()))?;
        Graph::new(n, &edges)
    }
}

/// A nonempty set of root vertices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RootSet(BTreeSet<usize>);

impl RootSet {
    pub fn new(roots: impl IntoIterator<Item = usize>) -> Result<Self, GraphError> {
        let set: BTreeSet<usize> = roots.into_iter().collect();
        if set.is_empty() {
            return Err(GraphError::EmptyRoots);
        }
        Ok(RootSet(set))
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0.contains(&v)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_set(&self) -> &BTreeSet<usize> {
        &self.0
    }

    /// Checks that every root is a vertex and every component holds a root.
    pub fn validate(&self, graph: &Graph) -> Result<(), GraphError> {
        validate_roots(graph, &self.0)
    }
}

/// Succeeds iff `roots` is nonempty, lies in `V(G)` and meets every component.
pub fn validate_roots(graph: &Graph, roots: &BTreeSet<usize>) -> Result<(), GraphError> {
    if roots.is_empty() {
        return Err(GraphError::EmptyRoots);
    }
    for &r in roots {
        graph.check_vertex(r)?;
    }
    match graph
        .components()
        .into_iter()
        .find(|c| !c.iter().any(|v| roots.contains(v)))
    {
        Some(component) => Err(GraphError::RootlessComponent { component }),
        None => Ok(()),
    }
}

impl fmt::Display for RootSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|v| v.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

impl FromStr for RootSet {
    type Err = GraphError;

    /// Comma-separated vertex labels, e.g. `1,4`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut roots = Vec::new();
        for tok in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let v = tok
                .trim_start_matches('v')
                .parse::<usize>()
                .map_err(|_| GraphError::Parse {
                    line: 1,
                    message: format!("bad root label `{tok}`"),
                })?;
            roots.push(v);
        }
        RootSet::new(roots)
    }
}
