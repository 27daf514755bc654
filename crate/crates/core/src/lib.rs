//! Stochastic probing sparsification over matroids and related set systems.

pub mod adversarial;
pub mod certificates;
pub mod crs;
pub mod descriptor;
pub mod element;
pub mod error;
pub mod graph;
pub mod harness;
pub mod lp;
pub mod matroid;
pub mod objective;
pub mod rng;
pub mod set_system;
pub mod sparsify;
pub mod stochastic;

pub use element::{ElementId, ElementSet, WeightVector};
pub use error::{Error, Result};
pub use graph::Graph;
pub use matroid::{MatroidFamily, MatroidOracle};
pub use objective::Objective;
pub use set_system::{FeasibleSet, SetSystem, SystemRank};
pub use sparsify::{SparseSet, Sparsifier};
pub use stochastic::{EvalReport, Marginals, SppInstance};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/matroids.md")]
    mod matroids {}
    #[doc = include_str!("../../../book/src/sparsifiers.md")]
    mod sparsifiers {}
    #[doc = include_str!("../../../book/src/certificates.md")]
    mod certificates {}
    #[doc = include_str!("../../../book/src/coverage.md")]
    mod coverage {}
    #[doc = include_str!("../../../book/src/hard-instances.md")]
    mod hard_instances {}
    #[doc = include_str!("../../../book/src/harness.md")]
    mod harness {}
}
