#![allow(dead_code)]

use multipark::{Graph, RootSet, Traversal, VertexFunction};

/// V = {1,2,3,4}; e1 = {1,3}, e2 = {2,4}, e3 = {2,3}, e4 = {1,2}, e5 = {3,4}.
pub const GAMMA_EDGES: [(usize, usize); 5] = [(1, 3), (2, 4), (2, 3), (1, 2), (3, 4)];

pub fn gamma() -> Graph {
    Graph::new(4, &GAMMA_EDGES).unwrap()
}

pub fn roots(r: &[usize]) -> RootSet {
    RootSet::new(r.iter().copied()).unwrap()
}

pub fn traversal(s: &str) -> Traversal {
    s.parse().unwrap()
}

pub fn function(s: &str) -> VertexFunction {
    s.parse().unwrap()
}

/// Traversals of Γ with roots {1,4} and their images under Ψ.
pub const PSI_TABLE: [(&str, &str); 13] = [
    ("v1,e4,e1,v4,e5,v3,e3,v2,e2", "inf,1,1,inf"),
    ("v1,e4,e1,v4,e5,v3,e3,e2,v2", "inf,2,1,inf"),
    ("v1,e4,e1,v4,e5,e2,v2,e3,v3", "inf,1,2,inf"),
    ("v1,e4,v2,e3,e2,v4,e5,e1,v3", "inf,0,2,inf"),
    ("v1,e4,v2,e3,e2,e1,v4,e5,v3", "inf,0,2,inf"),
    ("v1,e4,e1,v3,e5,v4,e3,v2,e2", "inf,1,0,inf"),
    ("v1,e4,e1,v3,e5,e3,v2,e2,v4", "inf,1,0,inf"),
    ("v1,e4,e1,v3,e5,v4,e3,e2,v2", "inf,2,0,inf"),
    ("v1,e4,e1,v3,e5,e3,v4,e2,v2", "inf,2,0,inf"),
    ("v1,e4,v2,e3,e2,v4,e5,v3,e1", "inf,0,1,inf"),
    ("v1,e4,v2,e3,e2,e1,v3,e5,v4", "inf,0,1,inf"),
    ("v1,e4,v2,e3,v3,e5,e2,e1,v4", "inf,0,0,inf"),
    ("v1,e4,v2,e3,v3,e5,e2,v4,e1", "inf,0,0,inf"),
];

/// Multiparking functions of Γ with roots {1,4} and their images under Φ.
pub const PHI_TABLE: [(&str, &str); 8] = [
    ("inf,1,1,inf", "v1,e4,e1,v4,e5,v3,e3,v2,e2"),
    ("inf,2,1,inf", "v1,e4,e1,v4,e5,v3,e3,e2,v2"),
    ("inf,1,2,inf", "v1,e4,e1,v4,e5,e2,v2,e3,v3"),
    ("inf,0,2,inf", "v1,e4,v2,e3,e2,e1,v4,e5,v3"),
    ("inf,1,0,inf", "v1,e4,e1,v3,e5,e3,v2,e2,v4"),
    ("inf,2,0,inf", "v1,e4,e1,v3,e5,e3,v4,e2,v2"),
    ("inf,0,1,inf", "v1,e4,v2,e3,e2,e1,v3,e5,v4"),
    ("inf,0,0,inf", "v1,e4,v2,e3,v3,e5,e2,e1,v4"),
];

/// Traversals of Γ that are valid for the given roots.
pub const VALID_EXAMPLES: [(&[usize], &str); 4] = [
    (&[1], "v1,e4,v2,e3,e2,v4,e5,v3,e1"),
    (&[1], "v1,e4,e1,v3,e5,e3,v2,e2,v4"),
    (&[2, 3], "v2,e4,e3,e2,v4,e5,v3,e1,v1"),
    (&[1, 2, 4], "v1,e4,e1,v2,e3,v3,e5,e2,v4"),
];

/// Listed as valid for roots {2,3}, but v4 directly follows the vertex v1.
pub const FLAGGED_EXAMPLE: &str = "v2,e4,e3,e2,v3,e5,e1,v1,v4";

/// Two valid traversals for roots {1,4} whose first difference is vertex/vertex.
pub const COUNTEREXAMPLE_PAIR: (&str, &str) = ("v1,e4,e1,v4,e5,e2,v2,e3,v3", "v1,e4,e1,v3,e5,v4,e3,e2,v2");
