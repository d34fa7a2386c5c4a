//! Exact fractional clique decompositions of dense graphs and k-uniform
//! hypergraphs.
//!
//! The crate builds rational weightings ω on the r-cliques of a host so that
//! the weights of the cliques through each edge sum to exactly 1, entirely
//! in exact arithmetic:
//!
//! - [`hypergraph`]: hosts, degrees, neighbourhoods, interchange formats.
//! - [`cliques`]: deterministic clique enumeration, counting, extensions.
//! - [`audits`]: exact inequality audits for the counting estimates the
//!   constructions rely on.
//! - [`gadgets`]: signed local weightings (edge and vertex gadgets) with
//!   exact cancellation identities.
//! - [`pipeline`]: preprocessing, smoothing machinery, the three top-level
//!   decomposition drivers, and certificate verification.
//! - [`oracle`]: an independent exact-rational LP feasibility decision.
//! - [`generators`]: corpus instance generators, including the extremal
//!   family showing the minimum-degree threshold is essentially sharp.

pub mod audits;
pub mod bits;
pub mod cli;
pub mod cliques;
pub mod comb;
pub mod gadgets;
pub mod generators;
pub mod hypergraph;
pub mod oracle;
pub mod pipeline;
pub mod rat;

pub use hypergraph::{DegreeProfile, Edge, GraphError, Hypergraph, Vertex};
pub use rat::Q;
