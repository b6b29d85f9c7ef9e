//! Exact reference shortest paths.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use super::{distance::INF, DistanceValue, EmbeddedPlanarGraph, VertexId};
use crate::error::{Error, Result};

/// Dijkstra from `source` over `g` minus the vertices flagged in `blocked`.
/// Returns raw distances with [`INF`] for unreachable vertices.
pub fn dijkstra_raw(
    g: &EmbeddedPlanarGraph,
    source: VertexId,
    blocked: Option<&[bool]>,
) -> Vec<u64> {
    let n = g.vertex_count();
    let mut dist = vec![INF; n];
    let is_blocked = |v: VertexId| blocked.is_some_and(|b| b[v as usize]);
    if is_blocked(source) {
        return dist;
    }
    let mut heap = BinaryHeap::new();
    dist[source as usize] = 0;
    heap.push(Reverse((0u64, source)));
    while let Some(Reverse((d, x))) = heap.pop() {
        if d > dist[x as usize] {
            continue;
        }
        for (_, a) in g.out_arcs(x) {
            if is_blocked(a.head) {
                continue;
            }
            let nd = d + a.weight;
            if nd < dist[a.head as usize] {
                dist[a.head as usize] = nd;
                heap.push(Reverse((nd, a.head)));
            }
        }
    }
    dist
}

/// Single-source shortest path lengths.
pub fn sssp(g: &EmbeddedPlanarGraph, source: VertexId) -> Result<Vec<DistanceValue>> {
    g.check_vertex(source)?;
    Ok(dijkstra_raw(g, source, None)
        .into_iter()
        .map(DistanceValue::from_raw)
        .collect())
}

/// Length of a shortest `u -> v` path avoiding every vertex of `failed`,
/// computed by deleting those vertices and running Dijkstra.
pub fn distance_avoiding(
    g: &EmbeddedPlanarGraph,
    u: VertexId,
    v: VertexId,
    failed: &[VertexId],
) -> Result<DistanceValue> {
    g.check_vertex(u)?;
    g.check_vertex(v)?;
    let mut blocked = vec![false; g.vertex_count()];
    for &x in failed {
        g.check_vertex(x)?;
        blocked[x as usize] = true;
    }
    for w in [u, v] {
        if blocked[w as usize] {
            return Err(Error::EndpointFailed(w));
        }
    }
    Ok(DistanceValue::from_raw(
        dijkstra_raw(g, u, Some(&blocked))[v as usize],
    ))
}
