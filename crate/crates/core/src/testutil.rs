//! Independent reference computations shared by unit tests.

use crate::graph::{EmbeddedPlanarGraph, INF};

/// Bellman–Ford over explicit `(tail, head, weight)` arcs on vertices
/// `0..n`. Arcs leaving a vertex in `frozen_tails` are ignored.
pub(crate) fn bellman_ford(
    n: usize,
    arcs: &[(u32, u32, u64)],
    src: u32,
    frozen_tails: &[u32],
) -> Vec<u64> {
    let mut d = vec![INF; n];
    d[src as usize] = 0;
    loop {
        let mut changed = false;
        for &(t, h, w) in arcs {
            if frozen_tails.contains(&t) || d[t as usize] == INF {
                continue;
            }
            let nd = d[t as usize] + w;
            if nd < d[h as usize] {
                d[h as usize] = nd;
                changed = true;
            }
        }
        if !changed {
            return d;
        }
    }
}

pub(crate) fn graph_arcs(g: &EmbeddedPlanarGraph) -> Vec<(u32, u32, u64)> {
    g.arcs()
        .iter()
        .map(|a| (a.tail, a.head, a.weight))
        .collect()
}
