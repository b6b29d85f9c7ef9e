//! Exact distance oracles for directed planar graphs with failed vertices.
//!
//! The crate is organised bottom-up:
//!
//! * [`graph`]: embedded planar graphs, `.pgr` I/O, generators and the
//!   brute-force reference [`graph::distance_avoiding`].
//! * [`decomposition`]: recursive cycle-separator decomposition, boundary
//!   sets, holes and r-divisions.
//! * [`ddg`]: dense distance graphs (standard, strictly internal, strictly
//!   external) and per-piece distance tables.
//! * [`frdijkstra`]: Dijkstra over unions of dense distance graphs.
//! * [`failure`], [`tradeoff`], [`dynamic`]: the three oracles.
//! * [`format`]: the binary oracle file container.

pub mod ddg;
pub mod decomposition;
pub mod dynamic;
pub mod error;
pub mod failure;
pub mod format;
pub mod frdijkstra;
pub mod graph;
pub mod local;
pub mod par;
pub mod tradeoff;
pub mod workload;

#[cfg(test)]
mod testutil;

pub use error::{Error, Result};
pub use graph::{DistanceValue, EmbeddedPlanarGraph, VertexId};
