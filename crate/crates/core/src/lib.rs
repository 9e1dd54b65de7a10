//! Mini-CSP interpreter and explicit-state verifier for pairwise
//! synchronization, electoral systems and symmetry in peer-to-peer networks.

pub mod graph;

pub use graph::{Network, Permutation, Vertex};
pub mod extension;

pub use extension::ExtendedNetwork;
pub mod lang;
pub use lang::{Program, System};
pub mod checkers;
pub mod engine;
pub mod library;
pub use engine::{explore, Limits, Outcome, StateGraph, Step};
