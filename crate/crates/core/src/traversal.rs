//! Descending R-traversals: sequences listing every vertex and edge once,
//! driven by a choice function that picks the next frontier edge or the next
//! root.
//!
//! A sequence is accepted when, at every position `j` with prefix `P`:
//! - a root equals `ζ(P, ∅)`; position 1 must hold a root;
//! - a non-root vertex directly follows an edge incident to it;
//! - an edge lies in the frontier of `P` and equals `ζ(P, frontier(P))`.
//!
//! [`psi`] reads a multiparking function off a traversal and [`phi`] builds
//! the canonical traversal of a multiparking function; `psi(phi(f)) = f`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, GraphError, RootSet};
use crate::multiparking::{ParkValue, VertexFunction};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Item {
    Vertex(usize),
    Edge(usize),
}

impl Item {
    pub fn is_vertex(self) -> bool {
        matches!(self, Item::Vertex(_))
    }

    pub fn is_edge(self) -> bool {
        matches!(self, Item::Edge(_))
    }
}

impl fmt::Display for Item {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Item::Vertex(v) => write!(f, "v{v}"),
            Item::Edge(e) => write!(f, "e{e}"),
        }
    }
}

impl FromStr for Item {
    type Err = TraversalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || TraversalError::Parse(s.to_string());
        let (kind, num) = s.split_at(s.chars().next().map_or(0, char::len_utf8));
        let label: usize = num.parse().map_err(|_| bad())?;
        match kind {
            "v" => Ok(Item::Vertex(label)),
            "e" => Ok(Item::Edge(label)),
            _ => Err(bad()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Traversal(Vec<Item>);

impl Traversal {
    pub fn new(items: Vec<Item>) -> Self {
        Traversal(items)
    }

    pub fn items(&self) -> &[Item] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// First 1-based position where the two sequences differ, with both entries.
    pub fn first_difference(&self, other: &Traversal) -> Option<(usize, Item, Item)> {
        self.0
            .iter()
            .zip(&other.0)
            .position(|(a, b)| a != b)
            .map(|i| (i + 1, self.0[i], other.0[i]))
    }
}

impl fmt::Display for Traversal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.iter().join(","))
    }
}

impl FromStr for Traversal {
    type Err = TraversalError;

    /// Comma-separated `v<k>` / `e<k>` tokens.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.split(',')
            .map(str::parse)
            .collect::<Result<Vec<_>, _>>()
            .map(Traversal)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ViolationKind {
    FirstNotRoot { found: Item },
    RootNotChosen { root: usize, expected: Item },
    VertexNotAfterAdjacentEdge { vertex: usize, previous: Item },
    EdgeNotInFrontier { edge: usize },
    EdgeNotChosen { edge: usize, expected: Item },
}

/// The first failed condition of a sequence, at a 1-based position.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub position: usize,
    /// 1 = root rule, 2 = vertex rule, 3 = edge rule.
    pub condition: u8,
    pub kind: ViolationKind,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "position {} (condition {}): ", self.position, self.condition)?;
        match &self.kind {
            ViolationKind::FirstNotRoot { found } => write!(f, "sequence starts with {found}, not a root"),
            ViolationKind::RootNotChosen { root, expected } => {
                write!(f, "root v{root} placed where the choice function gives {expected}")
            }
            ViolationKind::VertexNotAfterAdjacentEdge { vertex, previous } => {
                write!(f, "v{vertex} follows {previous}, not an incident edge")
            }
            ViolationKind::EdgeNotInFrontier { edge } => {
                write!(f, "e{edge} is not incident to any earlier vertex")
            }
            ViolationKind::EdgeNotChosen { edge, expected } => {
                write!(f, "e{edge} placed where the choice function gives {expected}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TraversalError {
    #[error("bad traversal token `{0}`")]
    Parse(String),
    #[error("malformed sequence: {0}")]
    Malformed(String),
    #[error("not a descending traversal: {0}")]
    Violation(Violation),
    #[error("choice function broke its contract at prefix [{prefix}]: {message}")]
    ChoiceContract { prefix: String, message: String },
    #[error("function has {found} values but the graph has {expected} vertices")]
    LengthMismatch { expected: usize, found: usize },
    #[error("function roots {found:?} differ from the root set {expected:?}")]
    RootMismatch {
        expected: BTreeSet<usize>,
        found: BTreeSet<usize>,
    },
    #[error("not a multiparking function: construction stuck after [{prefix}]")]
    Stuck { prefix: String },
    #[error("vertices {vertices:?} became appendable together after [{prefix}]")]
    SimultaneousReady { prefix: String, vertices: Vec<usize> },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Rule `ζ(prefix, W)` picking the next entry.
///
/// Called only when `W` is nonempty or some root is missing from `prefix`.
/// Must return an edge of `W` when `W` is nonempty, and otherwise a root not
/// in `prefix`. Must be deterministic.
pub trait ChoiceFunction {
    fn choose(&self, graph: &Graph, roots: &RootSet, prefix: &[Item], window: &BTreeSet<usize>) -> Item;
}

/// Largest edge of `W`, or the smallest unused root when `W` is empty.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StandardChoice;

impl ChoiceFunction for StandardChoice {
    fn choose(&self, _graph: &Graph, roots: &RootSet, prefix: &[Item], window: &BTreeSet<usize>) -> Item {
        match window.last() {
            Some(&e) => Item::Edge(e),
            None => {
                let root = roots
                    .iter()
                    .find(|&r| !prefix.contains(&Item::Vertex(r)))
                    .expect("choice queried with every root already placed");
                Item::Vertex(root)
            }
        }
    }
}

/// Edges outside `prefix` incident to a vertex listed in `prefix`.
pub fn frontier(graph: &Graph, prefix: &[Item]) -> BTreeSet<usize> {
    let placed: BTreeSet<Item> = prefix.iter().copied().collect();
    prefix
        .iter()
        .filter_map(|&it| match it {
            Item::Vertex(v) => Some(v),
            Item::Edge(_) => None,
        })
        .flat_map(|v| graph.incident(v).iter().map(|&(e, _)| e))
        .filter(|&e| !placed.contains(&Item::Edge(e)))
        .collect()
}

/// Queries `ζ`, enforcing its domain guard and output contract.
fn query(
    choice: &dyn ChoiceFunction,
    graph: &Graph,
    roots: &RootSet,
    prefix: &[Item],
    window: &BTreeSet<usize>,
) -> Result<Item, TraversalError> {
    let unused_root = |r: usize| roots.contains(r) && !prefix.contains(&Item::Vertex(r));
    let contract = |message: String| TraversalError::ChoiceContract {
        prefix: prefix.iter().join(","),
        message,
    };
    if window.is_empty() && !roots.iter().any(unused_root) {
        return Err(contract("queried outside its domain".into()));
    }
    let pick = choice.choose(graph, roots, prefix, window);
    match pick {
        Item::Edge(e) if window.contains(&e) => Ok(pick),
        Item::Vertex(r) if window.is_empty() && unused_root(r) => Ok(pick),
        other => Err(contract(format!("returned {other}"))),
    }
}

fn check_well_formed(graph: &Graph, traversal: &Traversal) -> Result<(), TraversalError> {
    let m = graph.vertex_count() + graph.edge_count();
    if traversal.len() != m {
        return Err(TraversalError::Malformed(format!(
            "length {} but the graph has {m} vertices and edges",
            traversal.len()
        )));
    }
    let mut seen = BTreeSet::new();
    for &item in traversal.items() {
        let known = match item {
            Item::Vertex(v) => graph.contains_vertex(v),
            Item::Edge(e) => graph.contains_edge(e),
        };
        if !known {
            return Err(TraversalError::Malformed(format!("{item} is not in the graph")));
        }
        if !seen.insert(item) {
            return Err(TraversalError::Malformed(format!("{item} appears twice")));
        }
    }
    Ok(())
}

/// Accepts `traversal` iff it is a descending R-traversal for `(graph, roots, choice)`.
pub fn validate_traversal(
    graph: &Graph,
    roots: &RootSet,
    choice: &dyn ChoiceFunction,
    traversal: &Traversal,
) -> Result<(), TraversalError> {
    roots.validate(graph)?;
    check_well_formed(graph, traversal)?;
    let items = traversal.items();
    let violation = |position: usize, condition: u8, kind: ViolationKind| {
        Err(TraversalError::Violation(Violation {
            position,
            condition,
            kind,
        }))
    };
    for (idx, &item) in items.iter().enumerate() {
        let prefix = &items[..idx];
        let position = idx + 1;
        match item {
            Item::Vertex(v) if roots.contains(v) => {
                let expected = query(choice, graph, roots, prefix, &BTreeSet::new())?;
                if expected != item {
                    return violation(position, 1, ViolationKind::RootNotChosen { root: v, expected });
                }
            }
            _ if idx == 0 => return violation(position, 1, ViolationKind::FirstNotRoot { found: item }),
            Item::Vertex(v) => {
                let previous = items[idx - 1];
                let ok = matches!(previous, Item::Edge(e) if graph.is_incident(e, v));
                if !ok {
                    return violation(
                        position,
                        2,
                        ViolationKind::VertexNotAfterAdjacentEdge { vertex: v, previous },
                    );
                }
            }
            Item::Edge(e) => {
                let window = frontier(graph, prefix);
                if !window.contains(&e) {
                    return violation(position, 3, ViolationKind::EdgeNotInFrontier { edge: e });
                }
                let expected = query(choice, graph, roots, prefix, &window)?;
                if expected != item {
                    return violation(position, 3, ViolationKind::EdgeNotChosen { edge: e, expected });
                }
            }
        }
    }
    Ok(())
}

/// Reads off `f(v) = (incident edges before v) − 1` for non-roots, ∞ on roots.
pub fn psi(
    graph: &Graph,
    roots: &RootSet,
    choice: &dyn ChoiceFunction,
    traversal: &Traversal,
) -> Result<VertexFunction, TraversalError> {
    validate_traversal(graph, roots, choice, traversal)?;
    let mut placed_edges = vec![false; graph.edge_count()];
    let mut values = vec![ParkValue::Infinite; graph.vertex_count()];
    for &item in traversal.items() {
        match item {
            Item::Edge(e) => placed_edges[e - 1] = true,
            Item::Vertex(v) if !roots.contains(v) => {
                let before = graph.incident(v).iter().filter(|&&(e, _)| placed_edges[e - 1]).count();
                // the vertex rule guarantees at least one incident edge precedes v
                values[v - 1] = ParkValue::Finite(before as u64 - 1);
            }
            Item::Vertex(_) => {}
        }
    }
    Ok(VertexFunction::new(values))
}

/// Builds the canonical traversal of the multiparking function `f`.
///
/// Starting from `ζ(∅, ∅)`, appends the unique non-root vertex `v` with
/// exactly `f(v) + 1` incident edges already listed if there is one, and
/// otherwise `ζ(prefix, frontier(prefix))`.
pub fn phi(
    graph: &Graph,
    roots: &RootSet,
    choice: &dyn ChoiceFunction,
    f: &VertexFunction,
) -> Result<Traversal, TraversalError> {
    roots.validate(graph)?;
    if f.len() != graph.vertex_count() {
        return Err(TraversalError::LengthMismatch {
            expected: graph.vertex_count(),
            found: f.len(),
        });
    }
    if f.roots() != *roots.as_set() {
        return Err(TraversalError::RootMismatch {
            expected: roots.as_set().clone(),
            found: f.roots(),
        });
    }
    let m = graph.vertex_count() + graph.edge_count();
    let mut items: Vec<Item> = Vec::with_capacity(m);
    let mut vertex_placed = vec![false; graph.vertex_count()];
    let mut edges_before = vec![0u64; graph.vertex_count()];
    while items.len() < m {
        let appendable: Vec<usize> = graph
            .vertices()
            .filter(|&v| !vertex_placed[v - 1])
            .filter(|&v| matches!(f.get(v), ParkValue::Finite(x) if edges_before[v - 1] == x + 1))
            .collect();
        let next = match appendable.as_slice() {
            [v] => Item::Vertex(*v),
            [] => {
                let window = frontier(graph, &items);
                let missing_root = roots.iter().any(|r| !vertex_placed[r - 1]);
                if window.is_empty() && !missing_root {
                    return Err(TraversalError::Stuck {
                        prefix: items.iter().join(","),
                    });
                }
                query(choice, graph, roots, &items, &window)?
            }
            _ => {
                return Err(TraversalError::SimultaneousReady {
                    prefix: items.iter().join(","),
                    vertices: appendable,
                })
            }
        };
        match next {
            Item::Vertex(v) => vertex_placed[v - 1] = true,
            Item::Edge(e) => {
                let (a, b) = graph.endpoints(e);
                edges_before[a - 1] += 1;
                edges_before[b - 1] += 1;
            }
        }
        items.push(next);
    }
    let traversal = Traversal(items);
    debug_assert!(validate_traversal(graph, roots, choice, &traversal).is_ok());
    Ok(traversal)
}

/// Every descending R-traversal, in lexicographic order.
///
/// Backtracks over the only admissible extensions of a prefix: a non-root
/// vertex incident to the last listed edge, the chosen frontier edge, and the
/// chosen next root.
pub fn enumerate_dt(
    graph: &Graph,
    roots: &RootSet,
    choice: &dyn ChoiceFunction,
) -> Result<Vec<Traversal>, TraversalError> {
    roots.validate(graph)?;
    let mut out = Vec::new();
    let mut state = Search {
        graph,
        roots,
        choice,
        items: Vec::new(),
        vertex_placed: vec![false; graph.vertex_count()],
        total: graph.vertex_count() + graph.edge_count(),
    };
    state.extend(&mut out)?;
    out.sort();
    Ok(out)
}

struct Search<'a> {
    graph: &'a Graph,
    roots: &'a RootSet,
    choice: &'a dyn ChoiceFunction,
    items: Vec<Item>,
    vertex_placed: Vec<bool>,
    total: usize,
}

impl Search<'_> {
    fn extend(&mut self, out: &mut Vec<Traversal>) -> Result<(), TraversalError> {
        if self.items.len() == self.total {
            out.push(Traversal(self.items.clone()));
            return Ok(());
        }
        let mut candidates = Vec::with_capacity(4);
        if let Some(&Item::Edge(e)) = self.items.last() {
            let (a, b) = self.graph.endpoints(e);
            for v in [a, b] {
                if !self.vertex_placed[v - 1] && !self.roots.contains(v) {
                    candidates.push(Item::Vertex(v));
                }
            }
        }
        let window = frontier(self.graph, &self.items);
        if !window.is_empty() {
            candidates.push(query(self.choice, self.graph, self.roots, &self.items, &window)?);
        }
        if self.roots.iter().any(|r| !self.vertex_placed[r - 1]) {
            candidates.push(query(self.choice, self.graph, self.roots, &self.items, &BTreeSet::new())?);
        }
        for item in candidates {
            if let Item::Vertex(v) = item {
                self.vertex_placed[v - 1] = true;
            }
            self.items.push(item);
            self.extend(out)?;
            self.items.pop();
            if let Item::Vertex(v) = item {
                self.vertex_placed[v - 1] = false;
            }
        }
        Ok(())
    }
}

/// Descending R-traversals grouped by their image under [`psi`].
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiberPartition(BTreeMap<VertexFunction, BTreeSet<Traversal>>);

impl FiberPartition {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn fiber(&self, f: &VertexFunction) -> Option<&BTreeSet<Traversal>> {
        self.0.get(f)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&VertexFunction, &BTreeSet<Traversal>)> {
        self.0.iter()
    }

    pub fn traversal_count(&self) -> usize {
        self.0.values().map(BTreeSet::len).sum()
    }
}

pub fn fibers(
    graph: &Graph,
    roots: &RootSet,
    choice: &dyn ChoiceFunction,
) -> Result<FiberPartition, TraversalError> {
    let mut map: BTreeMap<VertexFunction, BTreeSet<Traversal>> = BTreeMap::new();
    for t in enumerate_dt(graph, roots, choice)? {
        let f = psi(graph, roots, choice, &t)?;
        map.entry(f).or_default().insert(t);
    }
    Ok(FiberPartition(map))
}

serde_as_text!(Item);
serde_as_text!(Traversal);
