//! Multiparking functions, Dirichlet configurations and descending
//! R-traversals on simple graphs, with the bijections between them.
//!
//! - [`graph`]: graphs with an ordered edge set, degrees, components, root sets.
//! - [`multiparking`]: the subset definition, burning, enumeration, order.
//! - [`dirichlet`]: chip configurations, firing, stabilization, `Ω`, certificates.
//! - [`traversal`]: choice functions, validation, `Ψ`, `Φ`, enumeration, fibers.
//! - [`oracle`]: brute-force cross-checks over exhaustive graph suites.

/// Serializes a type through its `Display` text form and deserializes it
/// through `FromStr`.
macro_rules! serde_as_text {
    ($ty:ty) => {
        impl serde::Serialize for $ty {
            fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.collect_str(self)
            }
        }

        impl<'de> serde::Deserialize<'de> for $ty {
            fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                let text = String::deserialize(d)?;
                text.parse().map_err(serde::de::Error::custom)
            }
        }
    };
}

pub mod dirichlet;
pub mod graph;
pub mod multiparking;
pub mod oracle;
pub mod traversal;

pub use dirichlet::{Avalanche, Chips, Configuration, DirichletError};
pub use graph::{Graph, GraphError, RootSet};
pub use multiparking::{Burning, MultiparkingError, ParkValue, VertexFunction};
pub use oracle::{CrossCheckReport, OracleError};
pub use traversal::{ChoiceFunction, Item, StandardChoice, Traversal, TraversalError};
