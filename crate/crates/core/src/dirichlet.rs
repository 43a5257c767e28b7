//! Chip configurations with absorbing roots, avalanches, and Dirichlet
//! (stable and recurrent) configurations.
//!
//! Roots hold −∞ chips. A non-root vertex is ready when it holds at least
//! `deg(v)` chips; firing it sends one chip along every incident edge, and a
//! chip arriving at a root disappears. Roots never fire individually during
//! stabilization: from a stable configuration the whole root set fires as one
//! block (ascending label order), which adds `χ(v)` = number of root
//! neighbours of `v` to every non-root.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{validate_roots, Graph, GraphError, RootSet};
use crate::multiparking::{failing_subset, MultiparkingError, ParkValue, VertexFunction};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DirichletError {
    #[error("configuration has {found} values but the graph has {expected} vertices")]
    LengthMismatch { expected: usize, found: usize },
    #[error("vertex {vertex} holds {chips} chips but needs {degree} to fire")]
    NotReady { vertex: usize, chips: u64, degree: usize },
    #[error("root {0} can only fire as part of the root block")]
    SingleRootFiring(usize),
    #[error("root block fired from an unstable configuration (ready: {ready:?})")]
    NotStable { ready: BTreeSet<usize> },
    #[error("{0} is not a permutation of the vertices")]
    NotAPermutation(String),
    #[error("not a multiparking function: subset {witness:?} has no root and no well-behaved vertex")]
    NotMultiparking { witness: BTreeSet<usize> },
    #[error("not a Dirichlet configuration: {0}")]
    NotDirichlet(String),
    #[error("permutation {0} is not a Dirichlet certificate")]
    NotACertificate(String),
    #[error("certificate replay broke at step {step}: {source}")]
    Inconsistent {
        step: usize,
        #[source]
        source: Box<DirichletError>,
    },
    #[error("bad chip count `{0}`")]
    Parse(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Multiparking(#[from] MultiparkingError),
}

/// Chip count at a vertex: −∞ at roots, a natural number elsewhere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Chips {
    NegInfinite,
    Finite(u64),
}

impl Chips {
    pub fn finite(self) -> Option<u64> {
        match self {
            Chips::Finite(x) => Some(x),
            Chips::NegInfinite => None,
        }
    }

    /// −∞ absorbs any addition.
    pub fn add(self, k: u64) -> Chips {
        match self {
            Chips::Finite(x) => Chips::Finite(x + k),
            Chips::NegInfinite => Chips::NegInfinite,
        }
    }
}

impl fmt::Display for Chips {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Chips::Finite(x) => write!(f, "{x}"),
            Chips::NegInfinite => f.write_str("-inf"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Configuration(Vec<Chips>);

impl Configuration {
    pub fn new(chips: Vec<Chips>) -> Self {
        Configuration(chips)
    }

    /// −∞ on `roots`, `finite[v - 1]` elsewhere.
    pub fn with_roots(roots: &RootSet, finite: &[u64]) -> Self {
        Configuration(
            finite
                .iter()
                .enumerate()
                .map(|(i, &x)| {
                    if roots.contains(i + 1) {
                        Chips::NegInfinite
                    } else {
                        Chips::Finite(x)
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

    pub fn get(&self, v: usize) -> Chips {
        self.0[v - 1]
    }

    pub fn chips(&self) -> &[Chips] {
        &self.0
    }

    pub fn roots(&self) -> BTreeSet<usize> {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, c)| **c == Chips::NegInfinite)
            .map(|(i, _)| i + 1)
            .collect()
    }

    pub fn is_root(&self, v: usize) -> bool {
        self.get(v) == Chips::NegInfinite
    }

    /// Sum of chips over non-roots.
    pub fn total(&self) -> u64 {
        self.0.iter().filter_map(|c| c.finite()).sum()
    }

    fn check(&self, graph: &Graph) -> Result<(), DirichletError> {
        if self.len() != graph.vertex_count() {
            return Err(DirichletError::LengthMismatch {
                expected: graph.vertex_count(),
                found: self.len(),
            });
        }
        Ok(())
    }

    fn check_roots(&self, graph: &Graph) -> Result<(), DirichletError> {
        self.check(graph)?;
        validate_roots(graph, &self.roots())?;
        Ok(())
    }

    fn is_ready(&self, graph: &Graph, v: usize) -> bool {
        matches!(self.get(v), Chips::Finite(x) if x >= graph.degree(v) as u64)
    }

    /// Pointwise `self ≥ other` on non-roots; root sets must agree.
    pub fn dominates(&self, other: &Configuration) -> bool {
        self.len() == other.len() && self.0.iter().zip(&other.0).all(|(a, b)| a >= b)
            && self.roots() == other.roots()
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.iter().join(","))
    }
}

impl FromStr for Configuration {
    type Err = DirichletError;

    /// Comma-separated chip counts with `-inf` at roots, e.g. `-inf,1,1,-inf`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.split(',')
            .map(|tok| match tok.trim() {
                "-inf" | "-∞" => Ok(Chips::NegInfinite),
                t => t
                    .parse::<u64>()
                    .map(Chips::Finite)
                    .map_err(|_| DirichletError::Parse(t.to_string())),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Configuration)
    }
}

/// What happened in one avalanche step.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "fired", rename_all = "snake_case")]
pub enum Firing {
    /// Roots fired together, in the listed order.
    RootBlock(Vec<usize>),
    Vertex(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AvalancheStep {
    pub firing: Firing,
    pub result: Configuration,
}

/// A firing trace: `start`, then the configuration after each step.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Avalanche {
    pub start: Configuration,
    pub steps: Vec<AvalancheStep>,
}

impl Avalanche {
    pub fn new(start: Configuration) -> Self {
        Avalanche {
            start,
            steps: Vec::new(),
        }
    }

    pub fn end(&self) -> &Configuration {
        self.steps.last().map_or(&self.start, |s| &s.result)
    }

    /// Every configuration in order, starting with `start`.
    pub fn configurations(&self) -> impl Iterator<Item = &Configuration> {
        std::iter::once(&self.start).chain(self.steps.iter().map(|s| &s.result))
    }

    /// Non-root vertices fired, in order.
    pub fn fired_vertices(&self) -> Vec<usize> {
        self.steps
            .iter()
            .filter_map(|s| match s.firing {
                Firing::Vertex(v) => Some(v),
                Firing::RootBlock(_) => None,
            })
            .collect()
    }

    fn push(&mut self, firing: Firing, result: Configuration) {
        self.steps.push(AvalancheStep { firing, result });
    }
}

/// Number of root neighbours of each non-root; 0 on roots. Indexed by `v - 1`.
pub fn chi(graph: &Graph, roots: &RootSet) -> Result<Vec<u64>, DirichletError> {
    roots.validate(graph)?;
    Ok(graph
        .vertices()
        .map(|v| {
            if roots.contains(v) {
                0
            } else {
                graph.neighbours(v).filter(|&w| roots.contains(w)).count() as u64
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub stable: bool,
    pub ready: BTreeSet<usize>,
}

pub fn classify(graph: &Graph, mu: &Configuration) -> Result<Classification, DirichletError> {
    mu.check(graph)?;
    let ready: BTreeSet<usize> = graph.vertices().filter(|&v| mu.is_ready(graph, v)).collect();
    Ok(Classification {
        stable: ready.is_empty(),
        ready,
    })
}

pub fn is_stable(graph: &Graph, mu: &Configuration) -> Result<bool, DirichletError> {
    Ok(classify(graph, mu)?.stable)
}

/// Fires the non-root vertex `v`, which must be ready.
pub fn fire(graph: &Graph, mu: &Configuration, v: usize) -> Result<Configuration, DirichletError> {
    mu.check(graph)?;
    graph.check_vertex(v)?;
    let chips = match mu.get(v) {
        Chips::NegInfinite => return Err(DirichletError::SingleRootFiring(v)),
        Chips::Finite(x) => x,
    };
    let degree = graph.degree(v);
    if chips < degree as u64 {
        return Err(DirichletError::NotReady {
            vertex: v,
            chips,
            degree,
        });
    }
    let mut next = mu.0.clone();
    next[v - 1] = Chips::Finite(chips - degree as u64);
    for w in graph.neighbours(v) {
        next[w - 1] = next[w - 1].add(1);
    }
    Ok(Configuration(next))
}

/// Sends one chip from each root to each of its neighbours, i.e. returns `μ + χ`.
fn send_from_roots<'a>(graph: &Graph, mu: &Configuration, roots: impl IntoIterator<Item = &'a usize>) -> Configuration {
    let mut next = mu.0.clone();
    for &r in roots {
        for w in graph.neighbours(r) {
            next[w - 1] = next[w - 1].add(1);
        }
    }
    Configuration(next)
}

/// Fires the whole root block from a stable configuration, producing `μ + χ`.
pub fn fire_all_roots(graph: &Graph, mu: &Configuration) -> Result<Configuration, DirichletError> {
    let class = classify(graph, mu)?;
    if !class.stable {
        return Err(DirichletError::NotStable { ready: class.ready });
    }
    Ok(send_from_roots(graph, mu, &mu.roots()))
}

/// Fires ready vertices (smallest label first) until the configuration is stable.
///
/// Every component must contain a root, otherwise firing need not terminate.
pub fn stabilize(graph: &Graph, mu: &Configuration) -> Result<(Configuration, Avalanche), DirichletError> {
    mu.check_roots(graph)?;
    let mut trace = Avalanche::new(mu.clone());
    let mut current = mu.clone();
    while let Some(v) = graph.vertices().find(|&v| current.is_ready(graph, v)) {
        current = fire(graph, &current, v)?;
        trace.push(Firing::Vertex(v), current.clone());
    }
    Ok((current, trace))
}

/// Stable, and stabilizing `μ + χ` returns to `μ`.
pub fn is_dirichlet(graph: &Graph, mu: &Configuration) -> Result<bool, DirichletError> {
    Ok(dirichlet_failure(graph, mu)?.is_none())
}

/// Reason `μ` is not Dirichlet, or `None` if it is.
pub fn dirichlet_failure(graph: &Graph, mu: &Configuration) -> Result<Option<String>, DirichletError> {
    mu.check_roots(graph)?;
    let class = classify(graph, mu)?;
    if !class.stable {
        return Ok(Some(format!("not stable, ready vertices {:?}", class.ready)));
    }
    let lifted = fire_all_roots(graph, mu)?;
    let (settled, _) = stabilize(graph, &lifted)?;
    if settled == *mu {
        Ok(None)
    } else {
        Ok(Some(format!("μ + χ = {lifted} stabilizes to {settled}")))
    }
}

/// `Ω_f(v) = deg(v) − 1 − f(v)` off the roots, −∞ on them.
pub fn omega(graph: &Graph, f: &VertexFunction) -> Result<Configuration, DirichletError> {
    if let Some(witness) = failing_subset(graph, f)? {
        return Err(DirichletError::NotMultiparking { witness });
    }
    Ok(Configuration(
        graph
            .vertices()
            .map(|v| match f.get(v) {
                ParkValue::Infinite => Chips::NegInfinite,
                // f(v) < deg(v) holds for every multiparking function
                ParkValue::Finite(x) => Chips::Finite(graph.degree(v) as u64 - 1 - x),
            })
            .collect(),
    ))
}

/// `Ω⁻¹_μ(v) = deg(v) − 1 − μ(v)` off the roots, ∞ on them.
pub fn omega_inv(graph: &Graph, mu: &Configuration) -> Result<VertexFunction, DirichletError> {
    if let Some(reason) = dirichlet_failure(graph, mu)? {
        return Err(DirichletError::NotDirichlet(reason));
    }
    Ok(VertexFunction::new(
        graph
            .vertices()
            .map(|v| match mu.get(v) {
                Chips::NegInfinite => ParkValue::Infinite,
                // stable: μ(v) < deg(v)
                Chips::Finite(x) => ParkValue::Finite(graph.degree(v) as u64 - 1 - x),
            })
            .collect(),
    ))
}

fn check_permutation(graph: &Graph, order: &[usize]) -> Result<(), DirichletError> {
    let n = graph.vertex_count();
    let distinct: BTreeSet<usize> = order.iter().copied().collect();
    if order.len() != n || distinct.len() != n || !order.iter().all(|&v| graph.contains_vertex(v)) {
        return Err(DirichletError::NotAPermutation(format!("{order:?}")));
    }
    Ok(())
}

/// Whether every non-root `π(i)` satisfies
/// `deg(π(i)) > μ(π(i)) ≥ |neighbours of π(i) among π(i), …, π(n)|`.
///
/// Returns false when `order` is not a permutation of the vertices.
pub fn is_certificate(graph: &Graph, mu: &Configuration, order: &[usize]) -> Result<bool, DirichletError> {
    mu.check(graph)?;
    if check_permutation(graph, order).is_err() {
        return Ok(false);
    }
    let mut removed = vec![false; graph.vertex_count()];
    for &v in order {
        if let Chips::Finite(chips) = mu.get(v) {
            let in_degree = graph.neighbours(v).filter(|&w| !removed[w - 1]).count() as u64;
            if chips >= graph.degree(v) as u64 || chips < in_degree {
                return Ok(false);
            }
        }
        removed[v - 1] = true;
    }
    Ok(true)
}

/// Fires the vertices of `order` once each, in order, starting from `μ`.
///
/// Non-root vertices must be ready when fired. Each maximal run of consecutive
/// roots in `order` fires as one root block wherever it occurs, so that every
/// permutation determines an avalanche attempt.
pub fn replay_firing_order(
    graph: &Graph,
    mu: &Configuration,
    order: &[usize],
) -> Result<Avalanche, DirichletError> {
    mu.check(graph)?;
    check_permutation(graph, order)?;
    let mut trace = Avalanche::new(mu.clone());
    let mut current = mu.clone();
    let mut idx = 0;
    while idx < order.len() {
        let v = order[idx];
        if mu.is_root(v) {
            let block: Vec<usize> = order[idx..]
                .iter()
                .copied()
                .take_while(|&w| mu.is_root(w))
                .collect();
            idx += block.len();
            current = send_from_roots(graph, &current, &block);
            trace.push(Firing::RootBlock(block), current.clone());
        } else {
            current = fire(graph, &current, v)?;
            trace.push(Firing::Vertex(v), current.clone());
            idx += 1;
        }
    }
    Ok(trace)
}

/// Replays a Dirichlet certificate as an avalanche; it returns to `μ`.
pub fn avalanche_from_certificate(
    graph: &Graph,
    mu: &Configuration,
    order: &[usize],
) -> Result<Avalanche, DirichletError> {
    if !is_certificate(graph, mu, order)? {
        return Err(DirichletError::NotACertificate(format!("{order:?}")));
    }
    let trace = replay_firing_order(graph, mu, order).map_err(|e| DirichletError::Inconsistent {
        step: 0,
        source: Box::new(e),
    })?;
    if trace.end() != mu {
        return Err(DirichletError::Inconsistent {
            step: trace.steps.len(),
            source: Box::new(DirichletError::NotDirichlet(format!(
                "replay ended at {}",
                trace.end()
            ))),
        });
    }
    Ok(trace)
}

/// A certificate for a Dirichlet configuration: a burning order of `Ω⁻¹(μ)`.
pub fn find_certificate(graph: &Graph, mu: &Configuration) -> Result<Vec<usize>, DirichletError> {
    let f = omega_inv(graph, mu)?;
    match crate::multiparking::burning_sequence(graph, &f)? {
        crate::multiparking::Burning::Certificate(cert) => Ok(cert.order()),
        crate::multiparking::Burning::Stuck { remaining, .. } => {
            Err(DirichletError::NotMultiparking { witness: remaining })
        }
    }
}

/// Every stable configuration with root set `roots`, in lexicographic order.
pub fn stable_configurations(graph: &Graph, roots: &RootSet) -> impl Iterator<Item = Configuration> {
    let ranges: Vec<Vec<Chips>> = graph
        .vertices()
        .map(|v| {
            if roots.contains(v) {
                vec![Chips::NegInfinite]
            } else {
                (0..graph.degree(v) as u64).map(Chips::Finite).collect()
            }
        })
        .collect();
    ranges.into_iter().multi_cartesian_product().map(Configuration)
}

/// All Dirichlet configurations with root set `roots`, in lexicographic order.
pub fn enumerate_dc(graph: &Graph, roots: &RootSet) -> Result<Vec<Configuration>, DirichletError> {
    roots.validate(graph)?;
    let mut out = Vec::new();
    for mu in stable_configurations(graph, roots) {
        if is_dirichlet(graph, &mu)? {
            out.push(mu);
        }
    }
    Ok(out)
}

serde_as_text!(Configuration);
