//! Cones: the leaf summary of a vertex plus the sibling summaries along the
//! root path of its leaf.

use std::borrow::Cow;

use super::{DdgUnion, Member};
use crate::ddg::{strict_internal_from_local, DenseDistanceGraph};
use crate::decomposition::{DecompositionTree, NodeId};
use crate::error::Result;
use crate::graph::{EmbeddedPlanarGraph, VertexId};

/// Access to precomputed strictly internal DDGs.
pub trait DdgStore {
    fn internal(&self, p: NodeId) -> Option<&DenseDistanceGraph>;
}

impl DdgStore for std::collections::BTreeMap<NodeId, DenseDistanceGraph> {
    fn internal(&self, p: NodeId) -> Option<&DenseDistanceGraph> {
        self.get(&p)
    }
}

impl DdgStore for Vec<Option<DenseDistanceGraph>> {
    fn internal(&self, p: NodeId) -> Option<&DenseDistanceGraph> {
        self.get(p as usize).and_then(Option::as_ref)
    }
}

/// `DDG°` of `piece` with the vertices of `removed` deleted and the vertices
/// of `extra` (those inside the piece) promoted to boundary vertices.
pub fn leaf_ddg(
    g: &EmbeddedPlanarGraph,
    tree: &DecompositionTree,
    piece: NodeId,
    extra: &[VertexId],
    removed: &[VertexId],
) -> DenseDistanceGraph {
    let p = tree.piece(piece);
    let local = tree.local_graph(g, piece);
    let mut boundary: Vec<VertexId> = p
        .boundary
        .iter()
        .chain(extra.iter().filter(|&&v| p.contains(v)))
        .copied()
        .filter(|v| !removed.contains(v))
        .collect();
    boundary.sort_unstable();
    boundary.dedup();
    let blocked: Option<Vec<bool>> = if removed.iter().any(|&x| p.contains(x)) {
        Some(
            local
                .vertices()
                .iter()
                .map(|v| removed.contains(v))
                .collect(),
        )
    } else {
        None
    };
    strict_internal_from_local(&local, &boundary, blocked.as_deref(), vec![piece], None)
}

/// The stored `DDG°` of `p`, or one computed on the spot.
pub fn piece_ddg<'a, S: DdgStore + ?Sized>(
    g: &EmbeddedPlanarGraph,
    tree: &DecompositionTree,
    store: &'a S,
    p: NodeId,
) -> Cow<'a, DenseDistanceGraph> {
    match store.internal(p) {
        Some(d) => Cow::Borrowed(d),
        None => Cow::Owned(leaf_ddg(g, tree, p, &[], &[])),
    }
}

/// A cone as a list of union members.
#[derive(Debug)]
pub struct Cone<'a> {
    pub apex: VertexId,
    /// Pieces summarised by `members`, in the same order.
    pub pieces: Vec<NodeId>,
    pub members: Vec<Member<'a>>,
}

impl<'a> Cone<'a> {
    pub fn add_to(self, union: &mut DdgUnion<'a>) {
        for m in self.members {
            union.push(m);
        }
    }

    pub fn into_union(self) -> DdgUnion<'a> {
        let mut u = DdgUnion::new();
        self.add_to(&mut u);
        u
    }
}

/// Cone of `v`: `DDG°` of `v`'s leaf with `v` as an extra boundary vertex,
/// and `DDG°` of the sibling of every node on the leaf's root path.
pub fn assemble_cone<'a, S: DdgStore + ?Sized>(
    g: &EmbeddedPlanarGraph,
    tree: &DecompositionTree,
    store: &'a S,
    v: VertexId,
) -> Result<Cone<'a>> {
    g.check_vertex(v)?;
    let leaf = tree.leaf_of(v);
    let mut pieces = vec![leaf];
    let mut members = vec![Member::Dense(Cow::Owned(leaf_ddg(
        g,
        tree,
        leaf,
        &[v],
        &[],
    )))];
    for p in tree.path_to_root(leaf) {
        if let Some(s) = tree.sibling(p) {
            pieces.push(s);
            members.push(Member::Dense(piece_ddg(g, tree, store, s)));
        }
    }
    Ok(Cone {
        apex: v,
        pieces,
        members,
    })
}
