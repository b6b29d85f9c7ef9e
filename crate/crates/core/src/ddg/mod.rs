//! Dense distance graphs over piece boundaries.
//!
//! Three variants share one representation: a complete digraph on a sorted
//! vertex list with a dense row-major weight matrix, where [`INF`] marks the
//! absence of a path.
//!
//! * `Standard`: `d_P(u, v)`.
//! * `StrictInternal`: shortest `u -> v` paths in `P` that touch `∂P` only
//!   at their ends. They are computed in the shifted graph where every arc
//!   leaving a boundary vertex costs one more unit of a constant `C` that
//!   exceeds every simple path length; a path is strictly internal exactly
//!   when it pays one unit. The constant stays symbolic (see [`Shifted`]).
//! * `StrictExternal`: distances outside a tuple of pieces, see
//!   [`external`].

pub mod external;

#[cfg(feature = "monge")]
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::decomposition::{DecompositionTree, NodeId};
use crate::graph::{DistanceValue, EmbeddedPlanarGraph, VertexId, INF};
use crate::local::{LocalGraph, Shifted};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DdgVariant {
    Standard,
    StrictInternal,
    StrictExternal,
}

/// Complete weighted digraph on a set of boundary vertices.
#[derive(Debug, Serialize, Deserialize)]
pub struct DenseDistanceGraph {
    variant: DdgVariant,
    vertices: Vec<VertexId>,
    weights: Vec<u64>,
    source_pieces: Vec<NodeId>,
    /// Vertex indices in boundary-walk order; drives the Monge block layout.
    order: Vec<u32>,
    #[serde(skip)]
    #[cfg(feature = "monge")]
    monge: OnceLock<crate::frdijkstra::monge::MongeIndex>,
}

impl Clone for DenseDistanceGraph {
    fn clone(&self) -> Self {
        Self {
            variant: self.variant,
            vertices: self.vertices.clone(),
            weights: self.weights.clone(),
            source_pieces: self.source_pieces.clone(),
            order: self.order.clone(),
            #[cfg(feature = "monge")]
            monge: OnceLock::new(),
        }
    }
}

impl PartialEq for DenseDistanceGraph {
    fn eq(&self, other: &Self) -> bool {
        self.variant == other.variant
            && self.vertices == other.vertices
            && self.weights == other.weights
            && self.source_pieces == other.source_pieces
            && self.order == other.order
    }
}

impl Eq for DenseDistanceGraph {}

impl DenseDistanceGraph {
    /// `vertices` must be sorted and distinct; `weights` is row-major.
    pub fn new(
        variant: DdgVariant,
        vertices: Vec<VertexId>,
        weights: Vec<u64>,
        source_pieces: Vec<NodeId>,
        order: Option<Vec<u32>>,
    ) -> Self {
        let k = vertices.len();
        assert_eq!(weights.len(), k * k, "weight matrix must be square");
        debug_assert!(vertices.windows(2).all(|w| w[0] < w[1]));
        let order = order.unwrap_or_else(|| (0..k as u32).collect());
        assert_eq!(order.len(), k);
        Self {
            variant,
            vertices,
            weights,
            source_pieces,
            order,
            #[cfg(feature = "monge")]
            monge: OnceLock::new(),
        }
    }

    /// A graph without vertices.
    pub fn empty(variant: DdgVariant, source_pieces: Vec<NodeId>) -> Self {
        Self::new(variant, Vec::new(), Vec::new(), source_pieces, None)
    }

    pub fn variant(&self) -> DdgVariant {
        self.variant
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn source_pieces(&self) -> &[NodeId] {
        &self.source_pieces
    }

    pub fn order(&self) -> &[u32] {
        &self.order
    }

    pub fn raw_weights(&self) -> &[u64] {
        &self.weights
    }

    pub fn entry_count(&self) -> usize {
        self.weights.len()
    }

    pub fn index_of(&self, v: VertexId) -> Option<usize> {
        self.vertices.binary_search(&v).ok()
    }

    #[inline]
    pub fn weight_raw(&self, i: usize, j: usize) -> u64 {
        self.weights[i * self.vertices.len() + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[u64] {
        let k = self.vertices.len();
        &self.weights[i * k..(i + 1) * k]
    }

    /// Weight of `u -> v`, or `None` if either is not a vertex.
    pub fn get(&self, u: VertexId, v: VertexId) -> Option<DistanceValue> {
        Some(DistanceValue::from_raw(
            self.weight_raw(self.index_of(u)?, self.index_of(v)?),
        ))
    }

    /// All-pairs shortest paths inside this graph (Floyd–Warshall), with a
    /// zero diagonal.
    pub fn min_plus_closure(&self) -> DenseDistanceGraph {
        let k = self.vertices.len();
        let mut d = self.weights.clone();
        for i in 0..k {
            d[i * k + i] = 0;
        }
        for m in 0..k {
            for i in 0..k {
                let dim = d[i * k + m];
                if dim == INF {
                    continue;
                }
                for j in 0..k {
                    let dmj = d[m * k + j];
                    if dmj != INF && dim + dmj < d[i * k + j] {
                        d[i * k + j] = dim + dmj;
                    }
                }
            }
        }
        DenseDistanceGraph::new(
            DdgVariant::Standard,
            self.vertices.clone(),
            d,
            self.source_pieces.clone(),
            Some(self.order.clone()),
        )
    }

    #[cfg(feature = "monge")]
    pub(crate) fn monge_index(&self) -> &crate::frdijkstra::monge::MongeIndex {
        self.monge
            .get_or_init(|| crate::frdijkstra::monge::MongeIndex::build(self))
    }
}

/// The shift constant `C = 2 Σ w(e)`.
///
/// Stored DDG entries never contain `C`; shifted lengths are kept as
/// `(units of C, residual)` pairs and only resolved to numbers on request,
/// so changing `C` never touches a stored residual.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShiftConstant {
    value: u64,
}

impl ShiftConstant {
    pub fn for_graph(g: &EmbeddedPlanarGraph) -> Self {
        Self::from_total_weight(g.total_weight())
    }

    /// `total` is below `2^63` for every validated graph.
    pub fn from_total_weight(total: u64) -> Self {
        Self {
            value: total.checked_mul(2).expect("total weight below 2^63"),
        }
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn set_total_weight(&mut self, total: u64) {
        *self = Self::from_total_weight(total);
    }

    /// Numeric value `units·C + residual` of a shifted length.
    pub fn resolve(&self, s: Shifted) -> u128 {
        s.0 as u128 * self.value as u128 + s.1 as u128
    }
}

/// Map the shifted distances from a boundary source to a strictly internal
/// distance: a path is strictly internal iff it paid exactly one unit.
#[inline]
fn strict_entry(s: Shifted) -> u64 {
    if s.0 == 1 {
        s.1
    } else {
        INF
    }
}

/// Strictly internal DDG of the subgraph `local` with the given boundary.
/// Vertices flagged in `blocked` (local indices) are removed first.
pub fn strict_internal_from_local(
    local: &LocalGraph,
    boundary: &[VertexId],
    blocked: Option<&[bool]>,
    source_pieces: Vec<NodeId>,
    order: Option<Vec<u32>>,
) -> DenseDistanceGraph {
    let k = boundary.len();
    let bidx: Vec<usize> = boundary
        .iter()
        .map(|&b| {
            local
                .index_of(b)
                .expect("boundary vertex belongs to the piece")
        })
        .collect();
    let mut is_b = vec![false; local.vertex_count()];
    for &i in &bidx {
        is_b[i] = true;
    }
    let mut w = vec![INF; k * k];
    for (r, &src) in bidx.iter().enumerate() {
        let dist = local.dijkstra_shifted(src, &is_b, blocked);
        for (c, &dst) in bidx.iter().enumerate() {
            w[r * k + c] = if r == c { 0 } else { strict_entry(dist[dst]) };
        }
    }
    DenseDistanceGraph::new(
        DdgVariant::StrictInternal,
        boundary.to_vec(),
        w,
        source_pieces,
        order,
    )
}

/// Standard DDG of the subgraph `local`.
pub fn standard_from_local(
    local: &LocalGraph,
    boundary: &[VertexId],
    source_pieces: Vec<NodeId>,
    order: Option<Vec<u32>>,
) -> DenseDistanceGraph {
    let k = boundary.len();
    let bidx: Vec<usize> = boundary
        .iter()
        .map(|&b| local.index_of(b).unwrap())
        .collect();
    let mut w = vec![INF; k * k];
    for (r, &src) in bidx.iter().enumerate() {
        let dist = local.dijkstra(src, None);
        for (c, &dst) in bidx.iter().enumerate() {
            w[r * k + c] = dist[dst];
        }
    }
    DenseDistanceGraph::new(
        DdgVariant::Standard,
        boundary.to_vec(),
        w,
        source_pieces,
        order,
    )
}

/// Walk-order permutation for a piece's boundary.
pub(crate) fn piece_order(tree: &DecompositionTree, piece: NodeId) -> Vec<u32> {
    let p = tree.piece(piece);
    p.boundary_cycle
        .iter()
        .map(|v| p.boundary.binary_search(v).unwrap() as u32)
        .collect()
}

/// `DDG°_P` for a piece of the decomposition.
pub fn compute_ddg_internal(
    g: &EmbeddedPlanarGraph,
    tree: &DecompositionTree,
    piece: NodeId,
    shift: &ShiftConstant,
) -> DenseDistanceGraph {
    let local = tree.local_graph(g, piece);
    let p = tree.piece(piece);
    let ddg = strict_internal_from_local(
        &local,
        &p.boundary,
        None,
        vec![piece],
        Some(piece_order(tree, piece)),
    );
    // Strict paths are simple, so every residual stays below C.
    debug_assert!(ddg
        .weights
        .iter()
        .all(|&w| w == INF || w < shift.value().max(1)));
    ddg
}

/// `DDG_P` for a piece of the decomposition.
pub fn compute_ddg_standard(
    g: &EmbeddedPlanarGraph,
    tree: &DecompositionTree,
    piece: NodeId,
) -> DenseDistanceGraph {
    let local = tree.local_graph(g, piece);
    standard_from_local(
        &local,
        &tree.piece(piece).boundary,
        vec![piece],
        Some(piece_order(tree, piece)),
    )
}

/// In-piece distances from every boundary vertex to every vertex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PieceDistanceTable {
    piece: NodeId,
    boundary: Vec<VertexId>,
    vertices: Vec<VertexId>,
    dist: Vec<u64>,
}

impl PieceDistanceTable {
    pub fn from_parts(
        piece: NodeId,
        boundary: Vec<VertexId>,
        vertices: Vec<VertexId>,
        dist: Vec<u64>,
    ) -> Self {
        assert_eq!(dist.len(), boundary.len() * vertices.len());
        Self {
            piece,
            boundary,
            vertices,
            dist,
        }
    }

    pub fn piece(&self) -> NodeId {
        self.piece
    }

    pub fn boundary(&self) -> &[VertexId] {
        &self.boundary
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn raw(&self) -> &[u64] {
        &self.dist
    }

    pub fn vertex_index(&self, v: VertexId) -> Option<usize> {
        self.vertices.binary_search(&v).ok()
    }

    /// Raw distance from the `s_idx`-th boundary vertex to the `v_idx`-th
    /// vertex.
    #[inline]
    pub fn raw_at(&self, s_idx: usize, v_idx: usize) -> u64 {
        self.dist[s_idx * self.vertices.len() + v_idx]
    }

    pub fn get(&self, s: VertexId, v: VertexId) -> Option<DistanceValue> {
        let si = self.boundary.binary_search(&s).ok()?;
        let vi = self.vertex_index(v)?;
        Some(DistanceValue::from_raw(self.raw_at(si, vi)))
    }
}

pub fn compute_piece_distance_table(
    g: &EmbeddedPlanarGraph,
    tree: &DecompositionTree,
    piece: NodeId,
) -> PieceDistanceTable {
    let local = tree.local_graph(g, piece);
    let p = tree.piece(piece);
    let mut dist = Vec::with_capacity(p.boundary.len() * local.vertex_count());
    for &b in &p.boundary {
        dist.extend(local.dijkstra(local.index_of(b).unwrap(), None));
    }
    PieceDistanceTable::from_parts(piece, p.boundary.clone(), local.vertices().to_vec(), dist)
}

#[cfg(test)]
mod tests;
