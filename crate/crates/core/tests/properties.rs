use std::collections::BTreeSet;

use multipark::dirichlet::{fire, is_dirichlet, stabilize, Chips};
use multipark::multiparking::{candidate_box, enumerate_mp, is_mp_definition, poset_leq, ParkValue};
use multipark::oracle::{graph_suite, rooted_forest_count, stabilization_outcomes};
use multipark::traversal::{enumerate_dt, phi, psi};
use multipark::{Configuration, Graph, Item, RootSet, StandardChoice, Traversal, VertexFunction};
use proptest::prelude::*;

/// A labelled simple graph on `1..=n` from an edge bitmask, with edges
/// shuffled by `rotation` so edge order is not always lexicographic.
fn graph_from(n: usize, mask: u32, rotation: usize) -> Graph {
    let pairs: Vec<(usize, usize)> = (1..=n).flat_map(|u| (u + 1..=n).map(move |v| (u, v))).collect();
    let mut edges: Vec<(usize, usize)> = pairs
        .iter()
        .enumerate()
        .filter(|(i, _)| mask & (1 << i) != 0)
        .map(|(_, &p)| p)
        .collect();
    if !edges.is_empty() {
        let k = rotation % edges.len();
        edges.rotate_left(k);
    }
    Graph::new(n, &edges).unwrap()
}

fn arb_graph() -> impl Strategy<Value = Graph> {
    (1usize..=6, any::<u32>(), any::<usize>()).prop_map(|(n, mask, rot)| graph_from(n, mask, rot))
}

/// A graph together with a root set meeting every component.
fn arb_rooted(max_n: usize) -> impl Strategy<Value = (Graph, RootSet)> {
    (1usize..=max_n, any::<u32>(), any::<usize>(), any::<u32>()).prop_map(|(n, mask, rot, extra)| {
        let g = graph_from(n, mask, rot);
        let mut roots: BTreeSet<usize> = g.components().iter().map(|c| c[extra as usize % c.len()]).collect();
        roots.extend(g.vertices().filter(|v| extra & (1 << (v + 8)) != 0));
        (g, RootSet::new(roots).unwrap())
    })
}

proptest! {
    #[test]
    fn degree_splits_into_out_and_in(g in arb_graph(), mask in any::<u32>(), v in 1usize..=6) {
        prop_assume!(v <= g.vertex_count());
        let mut set: BTreeSet<usize> = g.vertices().filter(|w| mask & (1 << w) != 0).collect();
        set.insert(v);
        let s = g.degree_stats(&set, v).unwrap();
        prop_assert_eq!(s.degree, s.out_degree + s.in_degree);
        let all: BTreeSet<usize> = g.vertices().collect();
        let wider = g.degree_stats(&all, v).unwrap();
        prop_assert!(wider.out_degree <= s.out_degree);
    }

    #[test]
    fn text_formats_round_trip(g in arb_graph(), values in prop::collection::vec(prop::option::of(0u64..50), 1..8)) {
        prop_assert_eq!(g.to_string().parse::<Graph>().unwrap(), g.clone());

        let f = VertexFunction::new(values.iter().map(|x| x.map_or(ParkValue::Infinite, ParkValue::Finite)).collect());
        prop_assert_eq!(f.to_string().parse::<VertexFunction>().unwrap(), f);

        let mu = Configuration::new(values.iter().map(|x| x.map_or(Chips::NegInfinite, Chips::Finite)).collect());
        prop_assert_eq!(mu.to_string().parse::<Configuration>().unwrap(), mu);

        let items: Vec<Item> = values
            .iter()
            .enumerate()
            .map(|(i, x)| if x.is_some() { Item::Vertex(i + 1) } else { Item::Edge(i + 1) })
            .collect();
        let sigma = Traversal::new(items);
        prop_assert_eq!(sigma.to_string().parse::<Traversal>().unwrap(), sigma);
    }

    #[test]
    fn multiparking_is_closed_downward((g, r) in arb_rooted(5), pick in any::<prop::sample::Index>()) {
        let mp = enumerate_mp(&g, &r).unwrap();
        prop_assume!(!mp.is_empty());
        let f = pick.get(&mp);
        for h in candidate_box(&g, &r, 0) {
            if poset_leq(&h, f).unwrap() {
                prop_assert!(is_mp_definition(&g, &h).unwrap(), "{} below {}", h, f);
            }
        }
    }

    #[test]
    fn single_firing_loses_only_chips_sent_to_roots((g, r) in arb_rooted(6), chips in prop::collection::vec(0u64..8, 6)) {
        let mu = Configuration::with_roots(&r, &chips[..g.vertex_count()]);
        for v in g.vertices().filter(|&v| !r.contains(v)) {
            if let Ok(next) = fire(&g, &mu, v) {
                let to_roots = g.neighbours(v).filter(|&w| r.contains(w)).count() as u64;
                prop_assert_eq!(mu.total() - next.total(), to_roots);
            }
        }
    }

    #[test]
    fn stabilize_agrees_with_every_firing_order((g, r) in arb_rooted(4), chips in prop::collection::vec(0u64..5, 4)) {
        let mu = Configuration::with_roots(&r, &chips[..g.vertex_count()]);
        let (end, trace) = stabilize(&g, &mu).unwrap();
        prop_assert_eq!(stabilization_outcomes(&g, &mu).unwrap(), BTreeSet::from([end.clone()]));
        prop_assert_eq!(trace.end(), &end);
    }

    #[test]
    fn phi_is_a_section_of_psi((g, r) in arb_rooted(5)) {
        let std = StandardChoice;
        let mut seen = BTreeSet::new();
        for f in enumerate_mp(&g, &r).unwrap() {
            let sigma = phi(&g, &r, &std, &f).unwrap();
            prop_assert_eq!(psi(&g, &r, &std, &sigma).unwrap(), f);
            prop_assert!(seen.insert(sigma));
        }
    }

    #[test]
    fn psi_lands_in_multiparking((g, r) in arb_rooted(4)) {
        let std = StandardChoice;
        for sigma in enumerate_dt(&g, &r, &std).unwrap() {
            let f = psi(&g, &r, &std, &sigma).unwrap();
            prop_assert!(is_mp_definition(&g, &f).unwrap());
        }
    }

    #[test]
    fn dirichlet_is_closed_upward((g, r) in arb_rooted(5), bump in any::<u32>()) {
        for f in enumerate_mp(&g, &r).unwrap() {
            let mu = multipark::dirichlet::omega(&g, &f).unwrap();
            // raise some non-roots by one where that keeps the configuration stable
            let raised: Vec<Chips> = g
                .vertices()
                .map(|v| match mu.get(v) {
                    Chips::Finite(x) if bump & (1 << v) != 0 && x + 1 < g.degree(v) as u64 => Chips::Finite(x + 1),
                    c => c,
                })
                .collect();
            prop_assert!(is_dirichlet(&g, &Configuration::new(raised)).unwrap());
        }
    }
}

#[test]
fn forest_count_is_multiplicative_over_components() {
    let mut disconnected = 0;
    for m in graph_suite(5).unwrap() {
        let comps = m.graph.components();
        if comps.len() < 2 {
            continue;
        }
        disconnected += 1;
        let whole = rooted_forest_count(&m.graph, &m.roots).unwrap();
        let product: u128 = comps
            .iter()
            .map(|comp| {
                let relabel = |v: usize| comp.iter().position(|&w| w == v).unwrap() + 1;
                let edges: Vec<(usize, usize)> = m
                    .graph
                    .edges()
                    .filter(|(_, u, _)| comp.contains(u))
                    .map(|(_, u, v)| (relabel(u), relabel(v)))
                    .collect();
                let sub = Graph::new(comp.len(), &edges).unwrap();
                let sub_roots = RootSet::new(comp.iter().filter(|&&v| m.roots.contains(v)).map(|&v| relabel(v))).unwrap();
                rooted_forest_count(&sub, &sub_roots).unwrap()
            })
            .product();
        assert_eq!(whole, product, "{} R={}", m.graph.id(), m.roots);
    }
    assert!(disconnected > 0);
}
