//! Compact subgraphs induced by an arc subset, with plain and boundary-shifted
//! Dijkstra.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::graph::{ArcId, EmbeddedPlanarGraph, VertexId, INF};

/// CSR subgraph over a sorted vertex list. Local index `i` stands for
/// `vertices[i]`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LocalGraph {
    vertices: Vec<VertexId>,
    offsets: Vec<u32>,
    targets: Vec<u32>,
    weights: Vec<u64>,
}

/// Shifted label: `units` counts arcs whose tail is a boundary vertex.
/// Ordering is lexicographic, which equals the numeric order of
/// `units * C + residual` whenever `C` exceeds every simple path length.
pub type Shifted = (u32, u64);

pub const SHIFTED_INF: Shifted = (u32::MAX, u64::MAX);

impl LocalGraph {
    /// Subgraph on the given arcs of `g` plus any extra (possibly isolated)
    /// vertices.
    pub fn from_arcs(
        g: &EmbeddedPlanarGraph,
        arcs: impl IntoIterator<Item = ArcId>,
        extra: impl IntoIterator<Item = VertexId>,
    ) -> Self {
        let list: Vec<(VertexId, VertexId, u64)> = arcs
            .into_iter()
            .map(|a| {
                let a = g.arc(a);
                (a.tail, a.head, a.weight)
            })
            .collect();
        Self::from_triples(list, extra)
    }

    /// Subgraph from explicit `(tail, head, weight)` triples.
    pub fn from_triples(
        arcs: Vec<(VertexId, VertexId, u64)>,
        extra: impl IntoIterator<Item = VertexId>,
    ) -> Self {
        let mut vertices: Vec<VertexId> = arcs
            .iter()
            .flat_map(|&(t, h, _)| [t, h])
            .chain(extra)
            .collect();
        vertices.sort_unstable();
        vertices.dedup();
        let idx = |v: VertexId| vertices.binary_search(&v).unwrap() as u32;
        let mut offsets = vec![0u32; vertices.len() + 1];
        let local: Vec<(u32, u32, u64)> =
            arcs.iter().map(|&(t, h, w)| (idx(t), idx(h), w)).collect();
        for &(t, _, _) in &local {
            offsets[t as usize + 1] += 1;
        }
        for i in 0..vertices.len() {
            offsets[i + 1] += offsets[i];
        }
        let mut fill = offsets.clone();
        let mut targets = vec![0; local.len()];
        let mut weights = vec![0; local.len()];
        for &(t, h, w) in &local {
            let s = &mut fill[t as usize];
            targets[*s as usize] = h;
            weights[*s as usize] = w;
            *s += 1;
        }
        Self {
            vertices,
            offsets,
            targets,
            weights,
        }
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn arc_count(&self) -> usize {
        self.targets.len()
    }

    pub fn index_of(&self, v: VertexId) -> Option<usize> {
        self.vertices.binary_search(&v).ok()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.index_of(v).is_some()
    }

    /// Outgoing `(local head, weight)` pairs of local vertex `i`.
    pub fn out(&self, i: usize) -> impl Iterator<Item = (usize, u64)> + '_ {
        let (lo, hi) = (self.offsets[i] as usize, self.offsets[i + 1] as usize);
        self.targets[lo..hi]
            .iter()
            .zip(&self.weights[lo..hi])
            .map(|(&t, &w)| (t as usize, w))
    }

    /// Plain Dijkstra from local index `src`; vertices flagged in `blocked`
    /// are never entered. Unreachable entries are [`INF`].
    pub fn dijkstra(&self, src: usize, blocked: Option<&[bool]>) -> Vec<u64> {
        let mut dist = vec![INF; self.vertices.len()];
        if blocked.is_some_and(|b| b[src]) {
            return dist;
        }
        dist[src] = 0;
        let mut heap = BinaryHeap::new();
        heap.push(Reverse((0u64, src as u32)));
        while let Some(Reverse((d, x))) = heap.pop() {
            if d > dist[x as usize] {
                continue;
            }
            for (y, w) in self.out(x as usize) {
                if blocked.is_some_and(|b| b[y]) {
                    continue;
                }
                let nd = d + w;
                if nd < dist[y] {
                    dist[y] = nd;
                    heap.push(Reverse((nd, y as u32)));
                }
            }
        }
        dist
    }

    /// Dijkstra in the shifted graph where every arc leaving a vertex flagged
    /// in `shifted_tail` costs one extra unit of the symbolic constant.
    pub fn dijkstra_shifted(
        &self,
        src: usize,
        shifted_tail: &[bool],
        blocked: Option<&[bool]>,
    ) -> Vec<Shifted> {
        let mut dist = vec![SHIFTED_INF; self.vertices.len()];
        if blocked.is_some_and(|b| b[src]) {
            return dist;
        }
        dist[src] = (0, 0);
        let mut heap = BinaryHeap::new();
        heap.push(Reverse(((0u32, 0u64), src as u32)));
        while let Some(Reverse((d, x))) = heap.pop() {
            if d > dist[x as usize] {
                continue;
            }
            let bump = shifted_tail[x as usize] as u32;
            for (y, w) in self.out(x as usize) {
                if blocked.is_some_and(|b| b[y]) {
                    continue;
                }
                let nd = (d.0 + bump, d.1 + w);
                if nd < dist[y] {
                    dist[y] = nd;
                    heap.push(Reverse((nd, y as u32)));
                }
            }
        }
        dist
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path() -> LocalGraph {
        LocalGraph::from_triples(vec![(10, 20, 1), (20, 30, 1)], [])
    }

    #[test]
    fn plain_and_blocked() {
        let g = path();
        assert_eq!(g.dijkstra(0, None), vec![0, 1, 2]);
        assert_eq!(
            g.dijkstra(0, Some(&[false, true, false])),
            vec![0, INF, INF]
        );
    }

    #[test]
    fn shifted_counts_boundary_tails() {
        let g = path();
        let d = g.dijkstra_shifted(0, &[true, true, true], None);
        assert_eq!(d, vec![(0, 0), (1, 1), (2, 2)]);
        let d = g.dijkstra_shifted(0, &[true, false, true], None);
        assert_eq!(d[2], (1, 2));
    }

    #[test]
    fn extra_vertices_are_isolated() {
        let g = LocalGraph::from_triples(vec![(1, 2, 4)], [7]);
        assert_eq!(g.vertices(), &[1, 2, 7]);
        assert_eq!(g.dijkstra(0, None)[2], INF);
    }
}
