//! Multiparking functions: the subset definition, the burning algorithm,
//! enumeration, and the pointwise order.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{validate_roots, Graph, GraphError, RootSet};

/// Largest vertex count accepted by the exhaustive subset check.
pub const MAX_EXHAUSTIVE_VERTICES: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MultiparkingError {
    #[error("function has {found} values but the graph has {expected} vertices")]
    LengthMismatch { expected: usize, found: usize },
    #[error("exhaustive subset check is limited to {MAX_EXHAUSTIVE_VERTICES} vertices, graph has {0}")]
    TooLarge(usize),
    #[error("functions have different root sets")]
    RootSetMismatch,
    #[error("bad function value `{0}`")]
    Parse(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// A value in ℕ ∪ {∞}. `Finite(_) < Infinite`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ParkValue {
    Finite(u64),
    Infinite,
}

impl ParkValue {
    pub fn finite(self) -> Option<u64> {
        match self {
            ParkValue::Finite(x) => Some(x),
            ParkValue::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        self == ParkValue::Infinite
    }
}

impl fmt::Display for ParkValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParkValue::Finite(x) => write!(f, "{x}"),
            ParkValue::Infinite => f.write_str("inf"),
        }
    }
}

/// A function `V(G) → ℕ ∪ {∞}`, stored in vertex order. Roots are the
/// vertices mapped to ∞.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexFunction(Vec<ParkValue>);

impl VertexFunction {
    pub fn new(values: Vec<ParkValue>) -> Self {
        VertexFunction(values)
    }

    /// ∞ on `roots`, `finite[v - 1]` elsewhere.
    pub fn with_roots(roots: &RootSet, finite: &[u64]) -> Self {
        VertexFunction(
            finite
                .iter()
                .enumerate()
                .map(|(i, &x)| {
                    if roots.contains(i + 1) {
                        ParkValue::Infinite
                    } else {
                        ParkValue::Finite(x)
                    }
                })
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Value at vertex `v` (1-based).
    pub fn get(&self, v: usize) -> ParkValue {
        self.0[v - 1]
    }

    pub fn values(&self) -> &[ParkValue] {
        &self.0
    }

    pub fn roots(&self) -> BTreeSet<usize> {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, x)| x.is_infinite())
            .map(|(i, _)| i + 1)
            .collect()
    }

    fn check_len(&self, graph: &Graph) -> Result<(), MultiparkingError> {
        if self.len() == graph.vertex_count() {
            Ok(())
        } else {
            Err(MultiparkingError::LengthMismatch {
                expected: graph.vertex_count(),
                found: self.len(),
            })
        }
    }

    /// Root at `v`, or `f(v) < out-degree of v relative to the set given by `inside`.
    fn acceptable(&self, graph: &Graph, v: usize, inside: impl Fn(usize) -> bool) -> bool {
        match self.get(v) {
            ParkValue::Infinite => true,
            ParkValue::Finite(x) => (x as usize) < graph.out_degree_by(v, inside),
        }
    }
}

impl fmt::Display for VertexFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.iter().join(","))
    }
}

impl FromStr for VertexFunction {
    type Err = MultiparkingError;

    /// Comma-separated values with `inf` for ∞, e.g. `inf,1,1,inf`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.split(',')
            .map(|tok| match tok.trim() {
                "inf" | "∞" => Ok(ParkValue::Infinite),
                t => t
                    .parse::<u64>()
                    .map(ParkValue::Finite)
                    .map_err(|_| MultiparkingError::Parse(t.to_string())),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(VertexFunction)
    }
}

/// Checks the defining condition directly: every nonempty `U ⊆ V(G)` holds a
/// root or a vertex `i` with `f(i) < |neighbours of i outside U|`.
///
/// Runs over all `2^n` subsets; intended as a reference check on small graphs.
pub fn is_mp_definition(graph: &Graph, f: &VertexFunction) -> Result<bool, MultiparkingError> {
    Ok(failing_subset(graph, f)?.is_none())
}

/// The first subset (in bitmask order) violating the definition, if any.
pub fn failing_subset(
    graph: &Graph,
    f: &VertexFunction,
) -> Result<Option<BTreeSet<usize>>, MultiparkingError> {
    f.check_len(graph)?;
    let n = graph.vertex_count();
    if n > MAX_EXHAUSTIVE_VERTICES {
        return Err(MultiparkingError::TooLarge(n));
    }
    for mask in 1u32..(1u32 << n) {
        let inside = |v: usize| mask & (1 << (v - 1)) != 0;
        let ok = graph
            .vertices()
            .filter(|&v| inside(v))
            .any(|v| f.acceptable(graph, v, inside));
        if !ok {
            return Ok(Some(graph.vertices().filter(|&v| inside(v)).collect()));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BurnReason {
    Root,
    /// `value < out_degree` in the remaining set at removal time.
    WellBehaved { value: u64, out_degree: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BurnStep {
    pub vertex: usize,
    pub reason: BurnReason,
}

/// A removal order in which each vertex is a root or well-behaved in the set
/// of vertices not yet removed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BurningCertificate {
    pub steps: Vec<BurnStep>,
}

impl BurningCertificate {
    pub fn order(&self) -> Vec<usize> {
        self.steps.iter().map(|s| s.vertex).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Burning {
    Certificate(BurningCertificate),
    /// `remaining` has no root and no well-behaved vertex.
    Stuck {
        removed: Vec<usize>,
        remaining: BTreeSet<usize>,
    },
}

impl Burning {
    pub fn is_certificate(&self) -> bool {
        matches!(self, Burning::Certificate(_))
    }
}

/// Vertices of `remaining` that may be burnt next, ascending.
pub fn eligible_vertices(
    graph: &Graph,
    f: &VertexFunction,
    remaining: &BTreeSet<usize>,
) -> Result<Vec<BurnStep>, MultiparkingError> {
    f.check_len(graph)?;
    let inside = |w: usize| remaining.contains(&w);
    Ok(remaining
        .iter()
        .filter_map(|&v| match f.get(v) {
            ParkValue::Infinite => Some(BurnStep {
                vertex: v,
                reason: BurnReason::Root,
            }),
            ParkValue::Finite(value) => {
                let out_degree = graph.out_degree_by(v, inside);
                ((value as usize) < out_degree).then_some(BurnStep {
                    vertex: v,
                    reason: BurnReason::WellBehaved { value, out_degree },
                })
            }
        })
        .collect())
}

/// Greedy burning: repeatedly removes the smallest-label vertex that is a
/// root or well-behaved in the remaining set.
pub fn burning_sequence(graph: &Graph, f: &VertexFunction) -> Result<Burning, MultiparkingError> {
    let mut remaining: BTreeSet<usize> = graph.vertices().collect();
    let mut steps = Vec::with_capacity(graph.vertex_count());
    while !remaining.is_empty() {
        match eligible_vertices(graph, f, &remaining)?.first() {
            Some(&step) => {
                remaining.remove(&step.vertex);
                steps.push(step);
            }
            None => {
                return Ok(Burning::Stuck {
                    removed: steps.iter().map(|s| s.vertex).collect(),
                    remaining,
                })
            }
        }
    }
    Ok(Burning::Certificate(BurningCertificate { steps }))
}

/// Checks a proposed removal order against `f`.
pub fn is_burning_order(graph: &Graph, f: &VertexFunction, order: &[usize]) -> Result<bool, MultiparkingError> {
    f.check_len(graph)?;
    let n = graph.vertex_count();
    let distinct: BTreeSet<usize> = order.iter().copied().collect();
    if order.len() != n || distinct.len() != n || !order.iter().all(|&v| graph.contains_vertex(v)) {
        return Ok(false);
    }
    let mut removed = vec![false; n];
    for &v in order {
        if !f.acceptable(graph, v, |w| !removed[w - 1]) {
            return Ok(false);
        }
        removed[v - 1] = true;
    }
    Ok(true)
}

/// All multiparking functions with root set exactly `roots`, in lexicographic
/// order.
///
/// A non-root `v` of a multiparking function satisfies `f(v) < deg(v)`: taking
/// `U = {v}` leaves `v` as the only candidate and its out-degree in `{v}` is
/// `deg(v)`. The search therefore ranges over `0..deg(v)` at each non-root.
/// Components without a root produce no functions.
pub fn enumerate_mp(graph: &Graph, roots: &RootSet) -> Result<Vec<VertexFunction>, MultiparkingError> {
    for r in roots.iter() {
        graph.check_vertex(r)?;
    }
    if validate_roots(graph, roots.as_set()).is_err() {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for f in candidate_box(graph, roots, 0) {
        if burning_sequence(graph, &f)?.is_certificate() {
            out.push(f);
        }
    }
    Ok(out)
}

/// Every function with root set `roots` and non-root values in
/// `0..deg(v) + slack`, in lexicographic order.
pub fn candidate_box(graph: &Graph, roots: &RootSet, slack: u64) -> impl Iterator<Item = VertexFunction> {
    let ranges: Vec<Vec<ParkValue>> = graph
        .vertices()
        .map(|v| {
            if roots.contains(v) {
                vec![ParkValue::Infinite]
            } else {
                (0..graph.degree(v) as u64 + slack).map(ParkValue::Finite).collect()
            }
        })
        .collect();
    ranges
        .into_iter()
        .multi_cartesian_product()
        .map(VertexFunction)
}

/// Pointwise `f ≤ g`, defined only for functions with equal root sets.
pub fn poset_leq(f: &VertexFunction, g: &VertexFunction) -> Result<bool, MultiparkingError> {
    if f.len() != g.len() {
        return Err(MultiparkingError::LengthMismatch {
            expected: f.len(),
            found: g.len(),
        });
    }
    if f.roots() != g.roots() {
        return Err(MultiparkingError::RootSetMismatch);
    }
    Ok(f.0.iter().zip(&g.0).all(|(a, b)| a <= b))
}

serde_as_text!(VertexFunction);

#[cfg(test)]
mod tests {
    use super::*;

    fn gamma() -> Graph {
        Graph::new(4, &[(1, 3), (2, 4), (2, 3), (1, 2), (3, 4)]).unwrap()
    }

    fn vf(s: &str) -> VertexFunction {
        s.parse().unwrap()
    }

    #[test]
    fn definition_examples() {
        let g = gamma();
        assert!(is_mp_definition(&g, &vf("inf,1,1,inf")).unwrap());
        assert!(!is_mp_definition(&g, &vf("inf,3,0,inf")).unwrap());
        assert_eq!(failing_subset(&g, &vf("inf,3,0,inf")).unwrap(), Some([2].into()));
        assert!(is_mp_definition(&g, &vf("inf,inf,inf,inf")).unwrap());
        assert!(matches!(
            is_mp_definition(&g, &vf("inf,1")),
            Err(MultiparkingError::LengthMismatch { expected: 4, found: 2 })
        ));
    }

    #[test]
    fn burning_examples() {
        let g = gamma();
        let Burning::Certificate(cert) = burning_sequence(&g, &vf("inf,0,0,inf")).unwrap() else {
            panic!("expected certificate");
        };
        assert_eq!(cert.order(), vec![1, 2, 3, 4]);
        assert!(is_burning_order(&g, &vf("inf,0,0,inf"), &cert.order()).unwrap());

        assert!(burning_sequence(&g, &vf("inf,1,1,inf")).unwrap().is_certificate());

        match burning_sequence(&g, &vf("inf,2,2,inf")).unwrap() {
            Burning::Stuck { remaining, removed } => {
                assert_eq!(remaining, [2, 3].into());
                assert_eq!(removed, vec![1, 4]);
            }
            other => panic!("unexpected {other:?}"),
        }
        match burning_sequence(&g, &vf("inf,3,0,inf")).unwrap() {
            Burning::Stuck { remaining, .. } => assert_eq!(remaining, [2].into()),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn burning_order_rejects_non_permutations() {
        let g = gamma();
        let f = vf("inf,0,0,inf");
        assert!(!is_burning_order(&g, &f, &[1, 2, 3]).unwrap());
        assert!(!is_burning_order(&g, &f, &[1, 1, 3, 4]).unwrap());
        assert!(!is_burning_order(&g, &f, &[2, 1, 3, 4]).unwrap());
    }

    #[test]
    fn enumeration_examples() {
        let g = gamma();
        let roots = RootSet::new([1, 4]).unwrap();
        let got: BTreeSet<VertexFunction> = enumerate_mp(&g, &roots).unwrap().into_iter().collect();
        let expected: BTreeSet<VertexFunction> = [
            "inf,1,1,inf",
            "inf,2,1,inf",
            "inf,1,2,inf",
            "inf,0,2,inf",
            "inf,1,0,inf",
            "inf,2,0,inf",
            "inf,0,1,inf",
            "inf,0,0,inf",
        ]
        .into_iter()
        .map(vf)
        .collect();
        assert_eq!(got, expected);

        let p2 = Graph::new(2, &[(1, 2)]).unwrap();
        assert_eq!(
            enumerate_mp(&p2, &RootSet::new([1]).unwrap()).unwrap(),
            vec![vf("inf,0")]
        );

        let k3 = Graph::new(3, &[(1, 2), (1, 3), (2, 3)]).unwrap();
        assert_eq!(
            enumerate_mp(&k3, &RootSet::new([1]).unwrap()).unwrap(),
            vec![vf("inf,0,0"), vf("inf,0,1"), vf("inf,1,0")]
        );

        let split = Graph::new(4, &[(1, 2), (3, 4)]).unwrap();
        assert!(enumerate_mp(&split, &RootSet::new([1]).unwrap()).unwrap().is_empty());
    }

    #[test]
    fn poset_examples() {
        assert!(poset_leq(&vf("inf,0,0,inf"), &vf("inf,1,1,inf")).unwrap());
        assert!(!poset_leq(&vf("inf,2,0,inf"), &vf("inf,0,2,inf")).unwrap());
        assert!(!poset_leq(&vf("inf,0,2,inf"), &vf("inf,2,0,inf")).unwrap());
        let f = vf("inf,2,1,inf");
        assert!(poset_leq(&f, &f).unwrap());
        assert_eq!(
            poset_leq(&vf("inf,0,0,inf"), &vf("inf,0,inf,0")),
            Err(MultiparkingError::RootSetMismatch)
        );
    }

    #[test]
    fn text_format() {
        let f = vf("inf, 1,1,inf");
        assert_eq!(f.to_string(), "inf,1,1,inf");
        assert_eq!(f.roots(), [1, 4].into());
        assert!(matches!("inf,-1".parse::<VertexFunction>(), Err(MultiparkingError::Parse(_))));
    }
}
