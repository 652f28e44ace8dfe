//! Exact counting of spanning trees of a complete bipartite graph that
//! contain a prescribed spanning forest, evaluated through a closed form
//! and validated against independent Matrix-Tree and enumeration oracles.
//! Includes a property-test lab for the underlying algebraic identities and
//! an empirical probe of the conjectured tripartite lower bound.

pub mod closed_form;
pub mod exact;
pub mod forest;
pub mod identities;
pub mod kirchhoff;
mod rng;
pub mod selftest;
pub mod tripartite;
pub mod weighted;
