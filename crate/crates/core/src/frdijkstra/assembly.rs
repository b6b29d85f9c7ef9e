//! Unions of piece summaries that together cover a subtree of the
//! decomposition, with chosen leaves replaced by on-the-fly summaries.

use std::collections::BTreeSet;

use super::cone::{leaf_ddg, piece_ddg, DdgStore};
use super::{DdgUnion, Member};
use crate::decomposition::{DecompositionTree, NodeId};
use crate::graph::{EmbeddedPlanarGraph, VertexId};

/// Smallest-id leaf below `top` (inclusive) that contains `v`.
pub fn leaf_under(tree: &DecompositionTree, top: NodeId, v: VertexId) -> Option<NodeId> {
    let mut cur = top;
    if !tree.contains(cur, v) {
        return None;
    }
    while let Some([a, b]) = tree.piece(cur).children {
        cur = if tree.contains(a, v) { a } else { b };
    }
    Some(cur)
}

/// Siblings of the nodes on the paths from each anchor up to (excluding)
/// `top`, leaving out nodes that are themselves on such a path. Anchors must
/// be descendants of `top`. Together with the anchors the result partitions
/// the arcs of `top`.
pub fn sibling_antichain(tree: &DecompositionTree, top: NodeId, anchors: &[NodeId]) -> Vec<NodeId> {
    let mut on_path: BTreeSet<NodeId> = BTreeSet::new();
    for &a in anchors {
        debug_assert!(tree.is_ancestor(top, a));
        for p in tree.path_to_root(a) {
            if !on_path.insert(p) || p == top {
                break;
            }
        }
    }
    on_path.insert(top);
    let mut out: Vec<NodeId> = on_path
        .iter()
        .filter(|&&p| p != top)
        .filter_map(|&p| tree.sibling(p))
        .filter(|s| !on_path.contains(s))
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Which pieces an assembly used.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AssemblyPieces {
    /// Leaves summarised on the fly with failures removed.
    pub leaves: Vec<NodeId>,
    /// Pieces whose plain `DDG°` was added.
    pub siblings: Vec<NodeId>,
}

/// Add to `union` members that represent the piece `top` with the vertices
/// of `removed` deleted and the vertices of `promoted` usable as endpoints.
/// Every vertex of `anchors` inside `top` gets its leaf summarised on the
/// fly; the rest of `top` is covered by stored summaries.
#[allow(clippy::too_many_arguments)]
pub fn assemble_within<'a, S: DdgStore + ?Sized>(
    g: &EmbeddedPlanarGraph,
    tree: &DecompositionTree,
    store: &'a S,
    top: NodeId,
    anchors: &[VertexId],
    promoted: &[VertexId],
    removed: &[VertexId],
    union: &mut DdgUnion<'a>,
) -> AssemblyPieces {
    let mut leaves: Vec<NodeId> = anchors
        .iter()
        .filter_map(|&w| leaf_under(tree, top, w))
        .collect();
    leaves.sort_unstable();
    leaves.dedup();
    if leaves.is_empty() {
        union.push(Member::Dense(piece_ddg(g, tree, store, top)));
        return AssemblyPieces {
            leaves,
            siblings: vec![top],
        };
    }
    let siblings = sibling_antichain(tree, top, &leaves);
    for &s in &siblings {
        union.push(Member::Dense(piece_ddg(g, tree, store, s)));
    }
    for &l in &leaves {
        union.push_dense_owned(leaf_ddg(g, tree, l, promoted, removed));
    }
    AssemblyPieces { leaves, siblings }
}
