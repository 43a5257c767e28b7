//! Exhaustive cross-checks on small graphs.
//!
//! Everything here is deliberately brute force and shares as little code as
//! possible with the routines it checks: the rooted forest count comes from a
//! determinant, recurrence from a search over all avalanches, stabilization
//! from all firing orders, and classical descending traversals from a
//! position-by-position check of the original three conditions.

use std::collections::{BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dirichlet::{
    self, avalanche_from_certificate, enumerate_dc, find_certificate, omega, omega_inv, Chips,
    Configuration, DirichletError,
};
use crate::graph::{Graph, GraphError, RootSet};
use crate::multiparking::{enumerate_mp, MultiparkingError, VertexFunction};
use crate::traversal::{fibers, phi, psi, ChoiceFunction, Item, Traversal, TraversalError};

/// Largest vertex count accepted by [`graph_suite`].
pub const MAX_SUITE_VERTICES: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("graph suites are limited to {MAX_SUITE_VERTICES} vertices, asked for {0}")]
    SuiteTooLarge(usize),
    #[error("determinant overflowed 128-bit arithmetic")]
    Overflow,
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Multiparking(#[from] MultiparkingError),
    #[error(transparent)]
    Dirichlet(#[from] DirichletError),
    #[error(transparent)]
    Traversal(#[from] TraversalError),
}

/// Determinant of an integer matrix by fraction-free (Bareiss) elimination.
pub fn bareiss_determinant(mut a: Vec<Vec<i128>>) -> Result<i128, OracleError> {
    let n = a.len();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&r| a[r][k] != 0) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return Ok(0),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let lhs = a[i][j].checked_mul(a[k][k]).ok_or(OracleError::Overflow)?;
                let rhs = a[i][k].checked_mul(a[k][j]).ok_or(OracleError::Overflow)?;
                // exact by Sylvester's identity
                a[i][j] = lhs.checked_sub(rhs).ok_or(OracleError::Overflow)? / prev;
            }
            a[i][k] = 0;
        }
        prev = a[k][k];
    }
    Ok(if n == 0 { 1 } else { sign * a[n - 1][n - 1] })
}

/// Number of spanning forests in which every tree contains exactly one root:
/// the Laplacian determinant with the root rows and columns deleted.
pub fn rooted_forest_count(graph: &Graph, roots: &RootSet) -> Result<u128, OracleError> {
    roots.validate(graph)?;
    let kept: Vec<usize> = graph.vertices().filter(|&v| !roots.contains(v)).collect();
    let index: HashMap<usize, usize> = kept.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut lap = vec![vec![0i128; kept.len()]; kept.len()];
    for (i, &v) in kept.iter().enumerate() {
        lap[i][i] = graph.degree(v) as i128;
    }
    for (_, u, v) in graph.edges() {
        if let (Some(&i), Some(&j)) = (index.get(&u), index.get(&v)) {
            lap[i][j] -= 1;
            lap[j][i] -= 1;
        }
    }
    let det = bareiss_determinant(lap)?;
    u128::try_from(det).map_err(|_| OracleError::Overflow)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteMember {
    pub graph: Graph,
    pub roots: RootSet,
}

/// Every labelled simple graph on `1..=n_max` vertices paired with every root
/// set meeting all of its components.
///
/// Order: vertex count, then edge subset as a bitmask over the pairs
/// `(1,2), (1,3), …, (n-1,n)` in lexicographic order, then root set as a
/// bitmask over the vertices.
pub fn graph_suite(n_max: usize) -> Result<impl Iterator<Item = SuiteMember>, OracleError> {
    if n_max > MAX_SUITE_VERTICES {
        return Err(OracleError::SuiteTooLarge(n_max));
    }
    Ok((1..=n_max).flat_map(|n| {
        let pairs: Vec<(usize, usize)> = (1..=n)
            .flat_map(|u| (u + 1..=n).map(move |v| (u, v)))
            .collect();
        (0u32..1 << pairs.len()).flat_map(move |mask| {
            let edges: Vec<(usize, usize)> = pairs
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, &p)| p)
                .collect();
            let graph = Graph::new(n, &edges).expect("suite edges are simple");
            let members: Vec<SuiteMember> = (1u32..1 << n)
                .filter_map(|rmask| {
                    let roots = RootSet::new((1..=n).filter(|v| rmask & (1 << (v - 1)) != 0)).ok()?;
                    roots.validate(&graph).ok()?;
                    Some(SuiteMember {
                        graph: graph.clone(),
                        roots,
                    })
                })
                .collect();
            members
        })
    }))
}

/// Whether some avalanche with at least one step begins and ends at `μ`.
///
/// Follows the firing convention literally: the root block fires only as the
/// first step and only from a stable start; every later step fires a ready
/// non-root vertex.
pub fn recurrent_by_search(graph: &Graph, mu: &Configuration) -> Result<bool, OracleError> {
    let roots = RootSet::new(mu.roots())?;
    roots.validate(graph)?;
    let mut frontier = Vec::new();
    if dirichlet::is_stable(graph, mu)? {
        frontier.push(dirichlet::fire_all_roots(graph, mu)?);
    } else {
        frontier.extend(successors(graph, mu));
    }
    let mut seen: HashSet<Configuration> = frontier.iter().cloned().collect();
    while let Some(state) = frontier.pop() {
        if state == *mu {
            return Ok(true);
        }
        for next in successors(graph, &state) {
            if seen.insert(next.clone()) {
                frontier.push(next);
            }
        }
    }
    Ok(false)
}

fn successors(graph: &Graph, mu: &Configuration) -> Vec<Configuration> {
    graph
        .vertices()
        .filter_map(|v| match mu.get(v) {
            Chips::Finite(x) if x >= graph.degree(v) as u64 => {
                let mut next: Vec<Chips> = mu.chips().to_vec();
                next[v - 1] = Chips::Finite(x - graph.degree(v) as u64);
                for w in graph.neighbours(v) {
                    next[w - 1] = next[w - 1].add(1);
                }
                Some(Configuration::new(next))
            }
            _ => None,
        })
        .collect()
}

/// Stable configurations reached by every maximal sequence of non-root firings.
pub fn stabilization_outcomes(graph: &Graph, mu: &Configuration) -> Result<BTreeSet<Configuration>, OracleError> {
    RootSet::new(mu.roots())?.validate(graph)?;
    let mut memo: HashMap<Configuration, BTreeSet<Configuration>> = HashMap::new();
    Ok(outcomes(graph, mu, &mut memo))
}

fn outcomes(
    graph: &Graph,
    mu: &Configuration,
    memo: &mut HashMap<Configuration, BTreeSet<Configuration>>,
) -> BTreeSet<Configuration> {
    if let Some(done) = memo.get(mu) {
        return done.clone();
    }
    let next = successors(graph, mu);
    let result = if next.is_empty() {
        BTreeSet::from([mu.clone()])
    } else {
        next.iter().flat_map(|c| outcomes(graph, c, memo)).collect()
    };
    memo.insert(mu.clone(), result.clone());
    result
}

/// All configurations with root set `roots` and total non-root chips at most `max_total`.
pub fn configurations_up_to(graph: &Graph, roots: &RootSet, max_total: u64) -> Vec<Configuration> {
    let free: Vec<usize> = graph.vertices().filter(|&v| !roots.contains(v)).collect();
    let mut out = Vec::new();
    let mut chips = vec![0u64; graph.vertex_count()];
    fill(&free, 0, max_total, &mut chips, roots, &mut out);
    out
}

fn fill(free: &[usize], idx: usize, budget: u64, chips: &mut Vec<u64>, roots: &RootSet, out: &mut Vec<Configuration>) {
    if idx == free.len() {
        out.push(Configuration::with_roots(roots, chips));
        return;
    }
    for x in 0..=budget {
        chips[free[idx] - 1] = x;
        fill(free, idx + 1, budget - x, chips, roots, out);
    }
    chips[free[idx] - 1] = 0;
}

/// Checks position `prefix.len() + 1` of a classical descending traversal
/// started at `start`: the first entry is `start`; a later vertex follows an
/// edge incident to it; an edge touches an earlier vertex and is the largest
/// not-yet-listed edge touching an earlier vertex.
fn classical_position_ok(graph: &Graph, start: usize, prefix: &[Item], item: Item) -> bool {
    let earlier_vertex = |v: usize| prefix.contains(&Item::Vertex(v));
    match (prefix.last(), item) {
        (None, Item::Vertex(v)) => v == start,
        (None, Item::Edge(_)) => false,
        (Some(&Item::Edge(e)), Item::Vertex(v)) => {
            let (a, b) = graph.endpoints(e);
            a == v || b == v
        }
        (Some(&Item::Vertex(_)), Item::Vertex(_)) => false,
        (Some(_), Item::Edge(e)) => {
            let (a, b) = graph.endpoints(e);
            if !earlier_vertex(a) && !earlier_vertex(b) {
                return false;
            }
            graph
                .edges()
                .filter(|&(f, _, _)| !prefix.contains(&Item::Edge(f)))
                .filter(|&(_, u, w)| earlier_vertex(u) || earlier_vertex(w))
                .all(|(f, _, _)| f <= e)
        }
    }
}

/// Whether `sequence` is a classical descending traversal starting at `start`.
pub fn is_classical_descending(graph: &Graph, start: usize, sequence: &[Item]) -> bool {
    let m = graph.vertex_count() + graph.edge_count();
    let distinct: BTreeSet<Item> = sequence.iter().copied().collect();
    let in_graph = sequence.iter().all(|&it| match it {
        Item::Vertex(v) => graph.contains_vertex(v),
        Item::Edge(e) => graph.contains_edge(e),
    });
    sequence.len() == m
        && distinct.len() == m
        && in_graph
        && (0..m).all(|i| classical_position_ok(graph, start, &sequence[..i], sequence[i]))
}

/// Every classical descending traversal starting at `start`, in lexicographic
/// order, found by trying every unused item at every position.
pub fn classical_traversals(graph: &Graph, start: usize) -> Vec<Traversal> {
    let all: Vec<Item> = graph
        .vertices()
        .map(Item::Vertex)
        .chain(graph.edges().map(|(e, _, _)| Item::Edge(e)))
        .collect();
    let mut out = Vec::new();
    let mut prefix = Vec::with_capacity(all.len());
    classical_extend(graph, start, &all, &mut prefix, &mut out);
    out.sort();
    out
}

fn classical_extend(graph: &Graph, start: usize, all: &[Item], prefix: &mut Vec<Item>, out: &mut Vec<Traversal>) {
    if prefix.len() == all.len() {
        out.push(Traversal::new(prefix.clone()));
        return;
    }
    for &item in all {
        if !prefix.contains(&item) && classical_position_ok(graph, start, prefix, item) {
            prefix.push(item);
            classical_extend(graph, start, all, prefix, out);
            prefix.pop();
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub multiparking: usize,
    pub dirichlet: usize,
    pub fibers: usize,
    pub forests: u128,
    pub traversals: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    /// Counterexample on failure.
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossCheckReport {
    pub graph: String,
    pub roots: Vec<usize>,
    pub counts: Counts,
    pub checks: Vec<CheckResult>,
}

impl CrossCheckReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

fn check(name: &str, outcome: Result<(), String>) -> CheckResult {
    CheckResult {
        name: name.to_string(),
        passed: outcome.is_ok(),
        detail: outcome.err(),
    }
}

/// Computes all four families for `(graph, roots)` and checks the identities
/// linking them.
pub fn cross_check(
    graph: &Graph,
    roots: &RootSet,
    choice: &dyn ChoiceFunction,
) -> Result<CrossCheckReport, OracleError> {
    roots.validate(graph)?;
    let mp = enumerate_mp(graph, roots)?;
    let dc = enumerate_dc(graph, roots)?;
    let parts = fibers(graph, roots, choice)?;
    let forests = rooted_forest_count(graph, roots)?;
    let mp_set: BTreeSet<&VertexFunction> = mp.iter().collect();
    let mut checks = Vec::new();

    let omega_check = (|| {
        let mut image = BTreeSet::new();
        for f in &mp {
            let mu = omega(graph, f).map_err(|e| format!("Ω({f}): {e}"))?;
            let back = omega_inv(graph, &mu).map_err(|e| format!("Ω⁻¹({mu}): {e}"))?;
            if back != *f {
                return Err(format!("Ω⁻¹(Ω({f})) = {back}"));
            }
            image.insert(mu);
        }
        let dc_set: BTreeSet<Configuration> = dc.iter().cloned().collect();
        if image != dc_set {
            let stray = image.symmetric_difference(&dc_set).next().unwrap();
            return Err(format!("Ω image and Dirichlet set differ at {stray}"));
        }
        Ok(())
    })();
    checks.push(check("omega_bijection", omega_check));

    let fiber_check = (|| {
        let keys: BTreeSet<&VertexFunction> = parts.iter().map(|(f, _)| f).collect();
        if keys != mp_set {
            let stray = keys.symmetric_difference(&mp_set).next().unwrap();
            return Err(format!("fiber keys and multiparking set differ at {stray}"));
        }
        Ok(())
    })();
    checks.push(check("fibers_match_multiparking", fiber_check));

    let section_check = (|| {
        let mut images: HashMap<Traversal, &VertexFunction> = HashMap::new();
        for f in &mp {
            let sigma = phi(graph, roots, choice, f).map_err(|e| format!("Φ({f}): {e}"))?;
            let back = psi(graph, roots, choice, &sigma).map_err(|e| format!("Ψ({sigma}): {e}"))?;
            if back != *f {
                return Err(format!("Ψ(Φ({f})) = {back}"));
            }
            if !parts.fiber(f).is_some_and(|fib| fib.contains(&sigma)) {
                return Err(format!("Φ({f}) = {sigma} missing from its fiber"));
            }
            if let Some(g) = images.insert(sigma.clone(), f) {
                return Err(format!("Φ({g}) = Φ({f}) = {sigma}"));
            }
        }
        Ok(())
    })();
    checks.push(check("phi_section_injective", section_check));

    let forest_check = if forests == mp.len() as u128 {
        Ok(())
    } else {
        Err(format!("{} multiparking functions but {forests} rooted forests", mp.len()))
    };
    checks.push(check("forest_count", forest_check));

    let count_check = if mp.len() == dc.len() && dc.len() == parts.len() {
        Ok(())
    } else {
        Err(format!(
            "|MP| = {}, |DC| = {}, fibers = {}",
            mp.len(),
            dc.len(),
            parts.len()
        ))
    };
    checks.push(check("counts_agree", count_check));

    let replay_check = (|| {
        for mu in &dc {
            let order = find_certificate(graph, mu).map_err(|e| format!("{mu}: {e}"))?;
            avalanche_from_certificate(graph, mu, &order).map_err(|e| format!("{mu} via {order:?}: {e}"))?;
        }
        Ok(())
    })();
    checks.push(check("certificate_replay", replay_check));

    Ok(CrossCheckReport {
        graph: graph.id(),
        roots: roots.iter().collect(),
        counts: Counts {
            multiparking: mp.len(),
            dirichlet: dc.len(),
            fibers: parts.len(),
            forests,
            traversals: parts.traversal_count(),
        },
        checks,
    })
}
