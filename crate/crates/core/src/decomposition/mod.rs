//! Recursive decomposition of a planar graph into a binary tree of pieces.
//!
//! A piece is a set of arcs (plus, for graphs with isolated vertices, a set
//! of isolated vertices). Its vertices are the arc endpoints; its boundary is
//! the set of its vertices incident to arcs outside the piece. Children of a
//! piece partition its arcs. Node ids follow DFS preorder, so the subtree of
//! node `p` is the id range `p..subtree_end(p)`.

mod separator;

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::embedding::{Dsu, FaceWalker};
use crate::graph::{ArcId, EmbeddedPlanarGraph, VertexId};
use crate::local::LocalGraph;
use crate::par;

pub type NodeId = u32;

pub const DEFAULT_LEAF_SIZE: usize = 32;
pub const DEFAULT_BASE: usize = 2;

/// One node of the decomposition tree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Piece {
    pub id: NodeId,
    pub parent: Option<NodeId>,
    pub children: Option<[NodeId; 2]>,
    pub depth: u32,
    /// Sorted vertex ids.
    pub vertices: Vec<VertexId>,
    /// Sorted boundary vertex ids.
    pub boundary: Vec<VertexId>,
    /// Partition of `boundary`: vertices sharing a face of the piece that
    /// holds arcs from outside the piece end up in one group.
    pub holes: Vec<Vec<VertexId>>,
    /// `boundary` in the order first met when walking the hole faces.
    pub boundary_cycle: Vec<VertexId>,
    /// Vertices shared by the two children (internal nodes only).
    pub separator: Vec<VertexId>,
    pub arc_count: u32,
    pub subtree_end: NodeId,
    /// Arc ids, stored at leaves only; see [`DecompositionTree::piece_arcs`].
    pub arcs: Vec<ArcId>,
}

impl Piece {
    pub fn is_leaf(&self) -> bool {
        self.children.is_none()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.vertices.binary_search(&v).is_ok()
    }

    pub fn is_boundary(&self, v: VertexId) -> bool {
        self.boundary.binary_search(&v).is_ok()
    }
}

/// The complete recursive decomposition with r-division marks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionTree {
    pieces: Vec<Piece>,
    leaf_of: Vec<NodeId>,
    rdivision_marks: BTreeMap<usize, Vec<NodeId>>,
    leaf_size: usize,
    base: usize,
    vertex_count: usize,
}

struct Built {
    vertices: Vec<VertexId>,
    boundary: Vec<VertexId>,
    holes: Vec<Vec<VertexId>>,
    boundary_cycle: Vec<VertexId>,
    arc_count: usize,
    arcs: Vec<ArcId>,
    children: Option<Box<(Built, Built)>>,
}

/// Pieces above this many arcs split their two subtrees in parallel.
const PARALLEL_ARCS: usize = 4096;

fn build_rec(
    g: &EmbeddedPlanarGraph,
    leaf_size: usize,
    arcs: Vec<ArcId>,
    isolated: Vec<VertexId>,
) -> Built {
    let mut ends: Vec<VertexId> = arcs
        .iter()
        .flat_map(|&a| [g.arc(a).tail, g.arc(a).head])
        .collect();
    ends.sort_unstable();
    let mut vertices = Vec::new();
    let mut boundary = Vec::new();
    let mut i = 0;
    while i < ends.len() {
        let v = ends[i];
        let mut j = i;
        while j < ends.len() && ends[j] == v {
            j += 1;
        }
        vertices.push(v);
        if j - i < g.degree(v) {
            boundary.push(v);
        }
        i = j;
    }
    vertices.extend_from_slice(&isolated);
    vertices.sort_unstable();
    let (holes, boundary_cycle) = hole_groups(g, &arcs, &boundary);
    let arc_count = arcs.len();

    if vertices.len() <= leaf_size {
        return Built {
            vertices,
            boundary,
            holes,
            boundary_cycle,
            arc_count,
            arcs,
            children: None,
        };
    }
    let split = separator::split_piece(g, &arcs, &isolated);
    drop(arcs);
    let (a, b) = if arc_count >= PARALLEL_ARCS {
        par::join(
            || build_rec(g, leaf_size, split.a, split.iso_a),
            || build_rec(g, leaf_size, split.b, split.iso_b),
        )
    } else {
        (
            build_rec(g, leaf_size, split.a, split.iso_a),
            build_rec(g, leaf_size, split.b, split.iso_b),
        )
    };
    Built {
        vertices,
        boundary,
        holes,
        boundary_cycle,
        arc_count,
        arcs: Vec::new(),
        children: Some(Box::new((a, b))),
    }
}

/// Group boundary vertices by the faces of the piece that contain arcs of
/// the rest of the graph. Also returns the boundary in face-walk order.
fn hole_groups(
    g: &EmbeddedPlanarGraph,
    arcs: &[ArcId],
    boundary: &[VertexId],
) -> (Vec<Vec<VertexId>>, Vec<VertexId>) {
    if boundary.is_empty() {
        return (Vec::new(), Vec::new());
    }
    let local_of: HashMap<ArcId, u32> = arcs
        .iter()
        .enumerate()
        .map(|(i, &a)| (a, i as u32))
        .collect();
    let mut verts: Vec<VertexId> = arcs
        .iter()
        .flat_map(|&a| [g.arc(a).tail, g.arc(a).head])
        .collect();
    verts.sort_unstable();
    verts.dedup();
    let lidx = |v: VertexId| verts.binary_search(&v).unwrap() as u32;
    let ends: Vec<(u32, u32)> = arcs
        .iter()
        .map(|&a| (lidx(g.arc(a).tail), lidx(g.arc(a).head)))
        .collect();
    let rotation: Vec<Vec<u32>> = verts
        .iter()
        .map(|&v| {
            g.rotation(v)
                .iter()
                .filter_map(|a| local_of.get(a).copied())
                .collect()
        })
        .collect();
    let walker = FaceWalker::new(&ends, &rotation);
    let faces = walker.faces();

    let bidx = |v: VertexId| boundary.binary_search(&v).ok();
    let mut dsu = Dsu::new(boundary.len());
    let mut cycle = Vec::with_capacity(boundary.len());
    let mut listed = vec![false; boundary.len()];
    for face in &faces {
        let mut first: Option<u32> = None;
        for (k, &d) in face.iter().enumerate() {
            // Corner at the head of the previous dart, between its arc and
            // the arc of `d` in the piece's rotation.
            let prev = face[(k + face.len() - 1) % face.len()];
            let into = arcs[(prev >> 1) as usize];
            let out = arcs[(d >> 1) as usize];
            let (t, h) = ends[(d >> 1) as usize];
            let v = verts[if d & 1 == 0 { t } else { h } as usize];
            let Some(bi) = bidx(v) else { continue };
            let rot = g.rotation(v);
            let start = rot.iter().position(|&a| a == into).unwrap();
            let mut open = false;
            for step in 1..=rot.len() {
                let a = rot[(start + step) % rot.len()];
                if a == out {
                    break;
                }
                if !local_of.contains_key(&a) {
                    open = true;
                    break;
                }
            }
            if open {
                if !listed[bi] {
                    listed[bi] = true;
                    cycle.push(v);
                }
                match first {
                    None => first = Some(bi as u32),
                    Some(f) => {
                        dsu.union(f, bi as u32);
                    }
                }
            }
        }
    }
    let mut groups: BTreeMap<u32, Vec<VertexId>> = BTreeMap::new();
    for (i, &v) in boundary.iter().enumerate() {
        groups.entry(dsu.find(i as u32)).or_default().push(v);
    }
    let mut out: Vec<Vec<VertexId>> = groups.into_values().collect();
    out.sort();
    for (i, &v) in boundary.iter().enumerate() {
        if !listed[i] {
            cycle.push(v);
        }
    }
    (out, cycle)
}

impl DecompositionTree {
    /// Decompose `g` into pieces of at most `leaf_size` vertices and mark the
    /// r-divisions for `r = leaf_size·b, leaf_size·b², …, n`.
    pub fn build(g: &EmbeddedPlanarGraph, leaf_size: usize, base: usize) -> Result<Self> {
        if leaf_size < 2 {
            return Err(Error::InvalidParameter(
                "leaf size must be at least 2".into(),
            ));
        }
        if base < 2 {
            return Err(Error::InvalidParameter(
                "r-sequence base must be at least 2".into(),
            ));
        }
        let n = g.vertex_count();
        let arcs: Vec<ArcId> = (0..g.arc_count() as ArcId).collect();
        let isolated: Vec<VertexId> = (0..n as VertexId).filter(|&v| g.degree(v) == 0).collect();
        let root = build_rec(g, leaf_size, arcs, isolated);

        let mut pieces = Vec::new();
        flatten(root, None, 0, &mut pieces);

        let mut leaf_of = vec![NodeId::MAX; n];
        for p in &pieces {
            if p.is_leaf() {
                for &v in &p.vertices {
                    if leaf_of[v as usize] == NodeId::MAX {
                        leaf_of[v as usize] = p.id;
                    }
                }
            }
        }
        let mut tree = Self {
            pieces,
            leaf_of,
            rdivision_marks: BTreeMap::new(),
            leaf_size,
            base,
            vertex_count: n,
        };
        for r in r_sequence(n, leaf_size, base) {
            let div = tree.antichain_at(r);
            tree.rdivision_marks.insert(r, div);
        }
        Ok(tree)
    }

    /// Build with the default leaf size and base.
    pub fn build_default(g: &EmbeddedPlanarGraph) -> Result<Self> {
        Self::build(g, DEFAULT_LEAF_SIZE, DEFAULT_BASE)
    }

    /// Topmost pieces with at most `r` vertices, in id order.
    pub fn antichain_at(&self, r: usize) -> Vec<NodeId> {
        let mut out = Vec::new();
        let mut stack = vec![self.root()];
        while let Some(p) = stack.pop() {
            let piece = &self.pieces[p as usize];
            match piece.children {
                Some([a, b]) if piece.vertices.len() > r => {
                    stack.push(b);
                    stack.push(a);
                }
                _ => out.push(p),
            }
        }
        out
    }

    pub fn root(&self) -> NodeId {
        0
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn piece(&self, id: NodeId) -> &Piece {
        &self.pieces[id as usize]
    }

    pub fn len(&self) -> usize {
        self.pieces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn leaf_size(&self) -> usize {
        self.leaf_size
    }

    pub fn base(&self) -> usize {
        self.base
    }

    /// The smallest-id leaf containing `v`.
    pub fn leaf_of(&self, v: VertexId) -> NodeId {
        self.leaf_of[v as usize]
    }

    pub fn r_sequence(&self) -> Vec<usize> {
        self.rdivision_marks.keys().copied().collect()
    }

    pub fn rdivision_marks(&self) -> &BTreeMap<usize, Vec<NodeId>> {
        &self.rdivision_marks
    }

    /// The marked r-division for `r`.
    pub fn r_division(&self, r: usize) -> Result<&[NodeId]> {
        self.rdivision_marks
            .get(&r)
            .map(Vec::as_slice)
            .ok_or(Error::UnmarkedR(r))
    }

    pub fn contains(&self, p: NodeId, v: VertexId) -> bool {
        self.pieces[p as usize].contains(v)
    }

    /// `a` is `d` or an ancestor of `d`.
    pub fn is_ancestor(&self, a: NodeId, d: NodeId) -> bool {
        a <= d && d < self.pieces[a as usize].subtree_end
    }

    pub fn sibling(&self, p: NodeId) -> Option<NodeId> {
        let parent = self.pieces[p as usize].parent?;
        let [a, b] = self.pieces[parent as usize].children.unwrap();
        Some(if a == p { b } else { a })
    }

    /// `p` followed by its strict ancestors up to the root.
    pub fn path_to_root(&self, p: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        std::iter::successors(Some(p), move |&x| self.pieces[x as usize].parent)
    }

    /// Arc ids of piece `p`, sorted.
    pub fn piece_arcs(&self, p: NodeId) -> Vec<ArcId> {
        let end = self.pieces[p as usize].subtree_end;
        let mut out: Vec<ArcId> = (p..end)
            .flat_map(|q| self.pieces[q as usize].arcs.iter().copied())
            .collect();
        out.sort_unstable();
        out
    }

    /// The subgraph of `g` formed by piece `p`.
    pub fn local_graph(&self, g: &EmbeddedPlanarGraph, p: NodeId) -> LocalGraph {
        LocalGraph::from_arcs(
            g,
            self.piece_arcs(p),
            self.pieces[p as usize].vertices.iter().copied(),
        )
    }

    /// Highest ancestor of `start` whose vertex set avoids `forbidden`.
    pub fn highest_excluding_ancestor(
        &self,
        start: NodeId,
        forbidden: &[VertexId],
    ) -> Result<NodeId> {
        let hits = |p: NodeId| forbidden.iter().find(|&&x| self.contains(p, x)).copied();
        if let Some(x) = hits(start) {
            return Err(Error::ForbiddenInStartPiece(x));
        }
        let mut cur = start;
        while let Some(parent) = self.pieces[cur as usize].parent {
            if hits(parent).is_some() {
                break;
            }
            cur = parent;
        }
        Ok(cur)
    }

    /// Σ |∂P| over all pieces.
    pub fn total_boundary(&self) -> usize {
        self.pieces.iter().map(|p| p.boundary.len()).sum()
    }

    /// Σ |P| over all pieces.
    pub fn total_vertices(&self) -> usize {
        self.pieces.iter().map(|p| p.vertices.len()).sum()
    }

    pub fn height(&self) -> u32 {
        self.pieces.iter().map(|p| p.depth).max().unwrap_or(0)
    }

    /// Human-readable JSON dump.
    pub fn debug_json(&self) -> String {
        #[derive(Serialize)]
        struct Dump<'a> {
            schema: &'static str,
            vertex_count: usize,
            leaf_size: usize,
            base: usize,
            rdivision_marks: &'a BTreeMap<usize, Vec<NodeId>>,
            pieces: Vec<PieceDump<'a>>,
        }
        #[derive(Serialize)]
        struct PieceDump<'a> {
            id: NodeId,
            parent: Option<NodeId>,
            children: Option<[NodeId; 2]>,
            depth: u32,
            vertices: &'a [VertexId],
            boundary: &'a [VertexId],
            holes: &'a [Vec<VertexId>],
            separator: &'a [VertexId],
            arc_count: u32,
        }
        let dump = Dump {
            schema: "planar-fto/decomposition/v1",
            vertex_count: self.vertex_count,
            leaf_size: self.leaf_size,
            base: self.base,
            rdivision_marks: &self.rdivision_marks,
            pieces: self
                .pieces
                .iter()
                .map(|p| PieceDump {
                    id: p.id,
                    parent: p.parent,
                    children: p.children,
                    depth: p.depth,
                    vertices: &p.vertices,
                    boundary: &p.boundary,
                    holes: &p.holes,
                    separator: &p.separator,
                    arc_count: p.arc_count,
                })
                .collect(),
        };
        serde_json::to_string_pretty(&dump).expect("dump is serializable")
    }

    pub(crate) fn from_parts(
        pieces: Vec<Piece>,
        leaf_of: Vec<NodeId>,
        rdivision_marks: BTreeMap<usize, Vec<NodeId>>,
        leaf_size: usize,
        base: usize,
        vertex_count: usize,
    ) -> Self {
        Self {
            pieces,
            leaf_of,
            rdivision_marks,
            leaf_size,
            base,
            vertex_count,
        }
    }

    pub(crate) fn leaf_of_all(&self) -> &[NodeId] {
        &self.leaf_of
    }
}

/// `leaf_size·b, leaf_size·b², …` below `n`, then `n` itself.
pub fn r_sequence(n: usize, leaf_size: usize, base: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut r = leaf_size.saturating_mul(base);
    while r < n {
        out.push(r);
        r = r.saturating_mul(base);
    }
    out.push(n.max(1));
    out
}

fn flatten(b: Built, parent: Option<NodeId>, depth: u32, out: &mut Vec<Piece>) -> NodeId {
    let id = out.len() as NodeId;
    out.push(Piece {
        id,
        parent,
        children: None,
        depth,
        vertices: b.vertices,
        boundary: b.boundary,
        holes: b.holes,
        boundary_cycle: b.boundary_cycle,
        separator: Vec::new(),
        arc_count: b.arc_count as u32,
        subtree_end: id + 1,
        arcs: b.arcs,
    });
    if let Some(children) = b.children {
        let (ca, cb) = *children;
        let a = flatten(ca, Some(id), depth + 1, out);
        let bb = flatten(cb, Some(id), depth + 1, out);
        let sep = intersect(&out[a as usize].vertices, &out[bb as usize].vertices);
        let end = out.len() as NodeId;
        let p = &mut out[id as usize];
        p.children = Some([a, bb]);
        p.separator = sep;
        p.subtree_end = end;
    }
    id
}

fn intersect(a: &[VertexId], b: &[VertexId]) -> Vec<VertexId> {
    let (mut i, mut j, mut out) = (0, 0, Vec::new());
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests;
