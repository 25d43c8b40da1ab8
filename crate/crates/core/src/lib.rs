//! Tooling for edge-colorings of the complete bipartite graph `K_{n,n}`.
//!
//! The crate builds explicit colorings, decides whether every copy of
//! `K_{s,t}` receives at least `q` colors, computes the minimum palette for
//! tiny parameters by exhaustive search, and implements the bipartite color
//! energy machinery (energy graphs, pruning, detectors, reservoirs) together
//! with the closed-form bounds that go with it.

pub mod bounds;
pub mod coloring;
pub mod constructions;
pub mod energy;
pub mod error;
pub mod exact;
pub mod graph;
pub mod hypergraph;
pub mod store;
pub mod subsets;
pub mod verifier;

pub use coloring::{ColorId, Coloring, PatternSpec, Side, Subcopy, Vertex};
pub use error::{Error, Result};
