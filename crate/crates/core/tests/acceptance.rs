//! Acceptance criteria. Each test prints one `PASS`/`FAIL` line.
//!
//! Run with `cargo test -p multipark --test acceptance -- --nocapture` to see
//! the lines.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use itertools::Itertools;
use multipark::dirichlet::{
    enumerate_dc, is_certificate, is_dirichlet, is_stable, omega, replay_firing_order, stable_configurations,
};
use multipark::multiparking::{
    burning_sequence, candidate_box, eligible_vertices, enumerate_mp, is_mp_definition, poset_leq,
};
use multipark::oracle::{
    classical_traversals, configurations_up_to, cross_check, graph_suite, recurrent_by_search,
    stabilization_outcomes,
};
use multipark::traversal::{enumerate_dt, phi, psi, validate_traversal, Violation, ViolationKind};
use multipark::{Graph, Item, RootSet, StandardChoice, TraversalError, VertexFunction};

use common::*;

const FAST: Duration = Duration::from_secs(1);
const BIJECTION_BUDGET: Duration = Duration::from_secs(60);
const CERTIFICATE_BUDGET: Duration = Duration::from_secs(120);

/// Prints the verdict line, then fails the test if any problem was recorded.
fn verdict(id: u32, title: &str, started: Instant, budget: Option<Duration>, mut problems: Vec<String>) {
    let elapsed = started.elapsed();
    if let Some(limit) = budget {
        if elapsed > limit {
            problems.push(format!("took {elapsed:?}, limit {limit:?}"));
        }
    }
    let status = if problems.is_empty() { "PASS" } else { "FAIL" };
    println!("[{status}] criterion {id:>2}: {title} ({elapsed:.2?})");
    for p in problems.iter().take(10) {
        println!("         {p}");
    }
    assert!(problems.is_empty(), "criterion {id} failed: {problems:?}");
}

#[test]
fn criterion_01_psi_table() {
    let start = Instant::now();
    let g = gamma();
    let r = roots(&[1, 4]);
    let mut problems = Vec::new();
    for (sigma, expected) in PSI_TABLE {
        match psi(&g, &r, &StandardChoice, &traversal(sigma)) {
            Ok(f) if f == function(expected) => {}
            Ok(f) => problems.push(format!("Ψ({sigma}) = {f}, table says {expected}")),
            Err(e) => problems.push(format!("Ψ({sigma}): {e}")),
        }
    }
    verdict(1, "Ψ table reproduced for Γ, R = {1,4}", start, Some(FAST), problems);
}

#[test]
fn criterion_02_phi_table() {
    let start = Instant::now();
    let g = gamma();
    let r = roots(&[1, 4]);
    let mut problems = Vec::new();
    for (f, expected) in PHI_TABLE {
        match phi(&g, &r, &StandardChoice, &function(f)) {
            Ok(sigma) if sigma.to_string() == expected => {}
            Ok(sigma) => problems.push(format!("Φ({f}) = {sigma}, table says {expected}")),
            Err(e) => problems.push(format!("Φ({f}): {e}")),
        }
    }
    verdict(2, "Φ table reproduced for Γ, R = {1,4}", start, Some(FAST), problems);
}

#[test]
fn criterion_03_example_traversals() {
    let start = Instant::now();
    let g = gamma();
    let mut problems = Vec::new();
    for (r, sigma) in VALID_EXAMPLES {
        if let Err(e) = validate_traversal(&g, &roots(r), &StandardChoice, &traversal(sigma)) {
            problems.push(format!("{sigma} with R = {r:?}: {e}"));
        }
    }
    let expected = TraversalError::Violation(Violation {
        position: 9,
        condition: 2,
        kind: ViolationKind::VertexNotAfterAdjacentEdge {
            vertex: 4,
            previous: Item::Vertex(1),
        },
    });
    match validate_traversal(&g, &roots(&[2, 3]), &StandardChoice, &traversal(FLAGGED_EXAMPLE)) {
        Err(e) if e == expected => {}
        other => problems.push(format!("{FLAGGED_EXAMPLE}: expected {expected}, got {other:?}")),
    }
    verdict(3, "example traversals accepted, flagged one rejected at position 9", start, Some(FAST), problems);
}

#[test]
fn criterion_04_bijection_suite() {
    let start = Instant::now();
    let mut problems = Vec::new();
    let mut members = 0;
    for m in graph_suite(4).unwrap() {
        members += 1;
        let report = cross_check(&m.graph, &m.roots, &StandardChoice).unwrap();
        let c = report.counts;
        if !(c.multiparking == c.dirichlet
            && c.dirichlet == c.fibers
            && c.fibers as u128 == c.forests)
        {
            problems.push(format!("{} R={:?}: counts {c:?}", report.graph, report.roots));
        }
        for failure in report.failures() {
            problems.push(format!(
                "{} R={:?}: {} {:?}",
                report.graph, report.roots, failure.name, failure.detail
            ));
        }
    }
    if members == 0 {
        problems.push("empty suite".into());
    }
    verdict(
        4,
        &format!("bijection identities on all {members} suite members, n ≤ 4"),
        start,
        Some(BIJECTION_BUDGET),
        problems,
    );
}

#[test]
fn criterion_05_certificate_iff_avalanche() {
    let start = Instant::now();
    let mut problems = Vec::new();
    let mut checked = 0u64;
    for m in graph_suite(4).unwrap() {
        let n = m.graph.vertex_count();
        for mu in enumerate_dc(&m.graph, &m.roots).unwrap() {
            for order in (1..=n).permutations(n) {
                checked += 1;
                let cert = is_certificate(&m.graph, &mu, &order).unwrap();
                let returns = matches!(
                    replay_firing_order(&m.graph, &mu, &order),
                    Ok(trace) if *trace.end() == mu
                );
                if cert != returns {
                    problems.push(format!(
                        "{} μ={mu} π={order:?}: certificate {cert}, avalanche {returns}",
                        m.graph.id()
                    ));
                }
            }
        }
    }
    verdict(
        5,
        &format!("certificate ⟺ self-returning avalanche ({checked} pairs)"),
        start,
        Some(CERTIFICATE_BUDGET),
        problems,
    );
}

/// Success/failure of every run of the greedy burning process, over all
/// choices of the next eligible vertex.
fn all_greedy_outcomes(g: &Graph, f: &VertexFunction, remaining: &mut BTreeSet<usize>, out: &mut BTreeSet<bool>) {
    if remaining.is_empty() {
        out.insert(true);
        return;
    }
    let steps = eligible_vertices(g, f, remaining).unwrap();
    if steps.is_empty() {
        out.insert(false);
        return;
    }
    for step in steps {
        remaining.remove(&step.vertex);
        all_greedy_outcomes(g, f, remaining, out);
        remaining.insert(step.vertex);
    }
}

#[test]
fn criterion_06_burning_matches_definition() {
    let start = Instant::now();
    let mut problems = Vec::new();
    let mut checked = 0u64;
    for m in graph_suite(4).unwrap() {
        for f in candidate_box(&m.graph, &m.roots, 1) {
            checked += 1;
            let by_definition = is_mp_definition(&m.graph, &f).unwrap();
            let by_burning = burning_sequence(&m.graph, &f).unwrap().is_certificate();
            if by_definition != by_burning {
                problems.push(format!("{} f={f}: definition {by_definition}, burning {by_burning}", m.graph.id()));
            }
            if m.graph.vertex_count() <= 3 {
                let mut outcomes = BTreeSet::new();
                all_greedy_outcomes(&m.graph, &f, &mut m.graph.vertices().collect(), &mut outcomes);
                if outcomes != BTreeSet::from([by_definition]) {
                    problems.push(format!("{} f={f}: greedy outcomes {outcomes:?}", m.graph.id()));
                }
            }
        }
    }
    verdict(
        6,
        &format!("burning ⟺ definition on {checked} candidates, all tie-breaks for n ≤ 3"),
        start,
        None,
        problems,
    );
}

#[test]
fn criterion_07_poset_properties() {
    let start = Instant::now();
    let mut problems = Vec::new();
    for m in graph_suite(4).unwrap() {
        let (g, r) = (&m.graph, &m.roots);
        let mp = enumerate_mp(g, r).unwrap();
        let mp_set: BTreeSet<&VertexFunction> = mp.iter().collect();
        let images: BTreeMap<&VertexFunction, _> = mp.iter().map(|f| (f, omega(g, f).unwrap())).collect();
        for (f, h) in mp.iter().cartesian_product(&mp) {
            let below = poset_leq(f, h).unwrap();
            let above = images[f].dominates(&images[h]);
            if below != above {
                problems.push(format!("{} f={f} g={h}: f≤g {below}, Ω_f≥Ω_g {above}", g.id()));
            }
        }
        // downward closure, over the whole box below each member
        for candidate in candidate_box(g, r, 0) {
            let dominated = mp.iter().any(|f| poset_leq(&candidate, f).unwrap());
            if dominated && !mp_set.contains(&candidate) {
                problems.push(format!("{} {candidate} lies below a multiparking function", g.id()));
            }
        }
        let dc = enumerate_dc(g, r).unwrap();
        for nu in stable_configurations(g, r) {
            if dc.iter().any(|mu| nu.dominates(mu)) && !is_dirichlet(g, &nu).unwrap() {
                problems.push(format!("{} {nu} lies above a Dirichlet configuration", g.id()));
            }
        }
    }
    verdict(7, "order reversal under Ω, downward/upward closure", start, None, problems);
}

#[test]
fn criterion_08_confluence_and_recurrence() {
    let start = Instant::now();
    let mut problems = Vec::new();
    let mut starts = 0u64;
    for m in graph_suite(3).unwrap() {
        let (g, r) = (&m.graph, &m.roots);
        let budget = 2 * g.edge_count() as u64;
        for mu in configurations_up_to(g, r, budget) {
            starts += 1;
            let ends = stabilization_outcomes(g, &mu).unwrap();
            if ends.len() != 1 {
                problems.push(format!("{} {mu}: {} distinct stable ends", g.id(), ends.len()));
            }
            let by_search = recurrent_by_search(g, &mu).unwrap();
            let stable_and_recurrent = by_search && is_stable(g, &mu).unwrap();
            if stable_and_recurrent != is_dirichlet(g, &mu).unwrap() {
                problems.push(format!("{} {mu}: search says {stable_and_recurrent}", g.id()));
            }
        }
        for mu in stable_configurations(g, r) {
            if recurrent_by_search(g, &mu).unwrap() != is_dirichlet(g, &mu).unwrap() {
                problems.push(format!("{} stable {mu}: search and Dirichlet test disagree", g.id()));
            }
        }
    }
    verdict(
        8,
        &format!("confluence and recurrence search on {starts} starting configurations"),
        start,
        None,
        problems,
    );
}

#[test]
fn criterion_09_counterexample_pair() {
    let start = Instant::now();
    let g = gamma();
    let r = roots(&[1, 4]);
    let (a, b) = (traversal(COUNTEREXAMPLE_PAIR.0), traversal(COUNTEREXAMPLE_PAIR.1));
    let mut problems = Vec::new();
    for t in [&a, &b] {
        if let Err(e) = validate_traversal(&g, &r, &StandardChoice, t) {
            problems.push(format!("{t}: {e}"));
        }
    }
    match a.first_difference(&b) {
        Some((_, x, y)) if x.is_vertex() && y.is_vertex() => {}
        other => problems.push(format!("first difference {other:?} is not vertex/vertex")),
    }
    verdict(9, "valid pair first differing at two vertices", start, None, problems);
}

#[test]
fn criterion_10_classical_specialization() {
    let start = Instant::now();
    let mut problems = Vec::new();
    let mut graphs = 0;
    let single = RootSet::new([1]).unwrap();
    for m in graph_suite(4).unwrap() {
        if m.roots != single || !m.graph.is_connected() {
            continue;
        }
        graphs += 1;
        let ours = enumerate_dt(&m.graph, &single, &StandardChoice).unwrap();
        let classical = classical_traversals(&m.graph, 1);
        if ours != classical {
            problems.push(format!(
                "{}: {} rooted traversals vs {} classical",
                m.graph.id(),
                ours.len(),
                classical.len()
            ));
        }
    }
    verdict(
        10,
        &format!("R = {{1}} traversals equal classical ones on {graphs} connected graphs"),
        start,
        None,
        problems,
    );
}
