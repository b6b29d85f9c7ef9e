//! Strictly external dense distance graphs of tuples of r-division pieces.
//!
//! For a tuple `T` of pieces, the entry `(a, b)` over `∂T = ∪∂R` is the
//! length of a shortest `a -> b` path whose inner vertices avoid every
//! vertex of every piece of `T`. Tables are derived top-down along the
//! marked r-sequence: a tuple's table comes from the table of the tuple of
//! its enclosing pieces one level up, plus the strictly internal summaries
//! of those enclosing pieces with the tuple pieces cut out.

use std::collections::{BTreeMap, BTreeSet};

use super::{DdgVariant, DenseDistanceGraph};
use crate::decomposition::{DecompositionTree, NodeId};
use crate::error::{Error, Result};
use crate::frdijkstra::assembly::sibling_antichain;
use crate::frdijkstra::cone::{piece_ddg, DdgStore};
use crate::frdijkstra::{multi_dijkstra, DdgUnion, Member, Strategy};
use crate::graph::{DistanceValue, EmbeddedPlanarGraph, VertexId, INF};
use crate::par;

/// A sorted set of node ids.
pub type Tuple = Vec<NodeId>;

/// Sorted union of the boundaries of `pieces`.
pub fn tuple_boundary(tree: &DecompositionTree, pieces: &[NodeId]) -> Vec<VertexId> {
    let set: BTreeSet<VertexId> = pieces
        .iter()
        .flat_map(|&p| tree.piece(p).boundary.iter().copied())
        .collect();
    set.into_iter().collect()
}

/// Check that `tuple` is a set of pieces of the r-division `r` and return
/// it sorted.
pub fn normalize_tuple(tree: &DecompositionTree, r: usize, tuple: &[NodeId]) -> Result<Tuple> {
    let div = tree.r_division(r)?;
    let mut t = tuple.to_vec();
    t.sort_unstable();
    for w in t.windows(2) {
        if w[0] == w[1] {
            return Err(Error::DuplicatePiece(w[0]));
        }
    }
    if t.iter().any(|p| div.binary_search(p).is_err()) {
        return Err(Error::MixedRDivision);
    }
    Ok(t)
}

/// `DDG°_ext` of one tuple of r-division pieces.
pub fn compute_ddg_external<S: DdgStore + Sync + ?Sized>(
    g: &EmbeddedPlanarGraph,
    tree: &DecompositionTree,
    store: &S,
    r: usize,
    tuple: &[NodeId],
) -> Result<DenseDistanceGraph> {
    let t = normalize_tuple(tree, r, tuple)?;
    let mut all = compute_ddg_external_all(g, tree, store, r, std::slice::from_ref(&t))?;
    Ok(all.remove(&t).expect("requested tuple is computed"))
}

/// `DDG°_ext` of every given tuple of the r-division `r`, sharing the work
/// on enclosing tuples.
pub fn compute_ddg_external_all<S: DdgStore + Sync + ?Sized>(
    g: &EmbeddedPlanarGraph,
    tree: &DecompositionTree,
    store: &S,
    r: usize,
    tuples: &[Tuple],
) -> Result<BTreeMap<Tuple, DenseDistanceGraph>> {
    let seq = tree.r_sequence();
    let start = seq
        .iter()
        .position(|&x| x == r)
        .ok_or(Error::UnmarkedR(r))?;
    let mut wanted: BTreeSet<Tuple> = BTreeSet::new();
    for t in tuples {
        wanted.insert(normalize_tuple(tree, r, t)?);
    }
    // levels[j]: tuples needed at r = seq[start + j]; parent[j]: for each of
    // them, the enclosing tuple one level up.
    let mut levels: Vec<Vec<Tuple>> = vec![wanted.into_iter().collect()];
    let mut parents: Vec<Vec<Tuple>> = Vec::new();
    for &up in &seq[start + 1..] {
        let div = tree.r_division(up)?;
        let ps: Vec<Tuple> = levels
            .last()
            .unwrap()
            .iter()
            .map(|t| enclosing(tree, div, t))
            .collect();
        let next: BTreeSet<Tuple> = ps.iter().cloned().collect();
        parents.push(ps);
        levels.push(next.into_iter().collect());
    }

    let mut above: BTreeMap<Tuple, DenseDistanceGraph> = levels
        .last()
        .unwrap()
        .iter()
        .map(|t| (t.clone(), top_level(tree, t)))
        .collect();
    for j in (0..levels.len() - 1).rev() {
        let here = &levels[j];
        let ps = &parents[j];
        let mut cut: BTreeSet<(NodeId, Tuple)> = BTreeSet::new();
        for (t, e) in here.iter().zip(ps) {
            for &a in e {
                cut.insert((a, inside(tree, a, t)));
            }
        }
        let cut: Vec<(NodeId, Tuple)> = cut.into_iter().collect();
        let cut_ddgs = par::map(&cut, |(a, qs)| cut_out(g, tree, store, *a, qs));
        let cut_map: BTreeMap<&(NodeId, Tuple), &DenseDistanceGraph> =
            cut.iter().zip(&cut_ddgs).collect();
        let items: Vec<(&Tuple, &Tuple)> = here.iter().zip(ps).collect();
        let computed = par::map(&items, |(t, e)| {
            let parts: Vec<&DenseDistanceGraph> = e
                .iter()
                .map(|&a| cut_map[&(a, inside(tree, a, t))])
                .collect();
            combine(g, tree, t, &above[*e], &parts)
        });
        above = here.iter().cloned().zip(computed).collect();
    }
    Ok(above)
}

/// For each piece of `t`, its ancestor in the antichain `div`.
fn enclosing(tree: &DecompositionTree, div: &[NodeId], t: &[NodeId]) -> Tuple {
    let set: BTreeSet<NodeId> = t
        .iter()
        .map(|&p| {
            tree.path_to_root(p)
                .find(|a| div.binary_search(a).is_ok())
                .expect("r-divisions are nested")
        })
        .collect();
    set.into_iter().collect()
}

fn inside(tree: &DecompositionTree, a: NodeId, t: &[NodeId]) -> Tuple {
    t.iter()
        .copied()
        .filter(|&q| tree.is_ancestor(a, q))
        .collect()
}

/// Table of a tuple of the topmost r-division. Only `{root}` has nothing
/// outside it.
fn top_level(tree: &DecompositionTree, t: &[NodeId]) -> DenseDistanceGraph {
    debug_assert_eq!(t, [tree.root()]);
    let verts = tuple_boundary(tree, t);
    let k = verts.len();
    let mut w = vec![INF; k * k];
    for i in 0..k {
        w[i * k + i] = 0;
    }
    DenseDistanceGraph::new(DdgVariant::StrictExternal, verts, w, t.to_vec(), None)
}

/// Strictly internal DDG of piece `a` with the pieces `qs` removed, on
/// `∂a ∪ ∪∂q`.
fn cut_out<S: DdgStore + ?Sized>(
    g: &EmbeddedPlanarGraph,
    tree: &DecompositionTree,
    store: &S,
    a: NodeId,
    qs: &[NodeId],
) -> DenseDistanceGraph {
    let mut pieces = vec![a];
    pieces.extend_from_slice(qs);
    let verts = tuple_boundary(tree, &pieces);
    let k = verts.len();
    let mut w = vec![INF; k * k];
    let mut union = DdgUnion::new();
    for s in sibling_antichain(tree, a, qs) {
        union.push(Member::Dense(piece_ddg(g, tree, store, s)));
    }
    for (i, &s) in verts.iter().enumerate() {
        w[i * k + i] = 0;
        if !union.contains(s) {
            continue;
        }
        union.set_forbidden(verts.iter().copied().filter(|&x| x != s).collect());
        let res = multi_dijkstra(&union, &[(s, DistanceValue::Finite(0))], Strategy::Naive)
            .expect("source is in the union");
        for (j, &t) in verts.iter().enumerate() {
            if j != i {
                w[i * k + j] = res.raw(t);
            }
        }
    }
    DenseDistanceGraph::new(DdgVariant::StrictInternal, verts, w, pieces, None)
}

/// Table of `t` from the table of its enclosing tuple and the enclosing
/// pieces with `t` cut out.
fn combine(
    g: &EmbeddedPlanarGraph,
    tree: &DecompositionTree,
    t: &[NodeId],
    outer: &DenseDistanceGraph,
    parts: &[&DenseDistanceGraph],
) -> DenseDistanceGraph {
    let verts = tuple_boundary(tree, t);
    let k = verts.len();
    let mut w = vec![INF; k * k];
    let mut union = DdgUnion::new();
    union.push_dense(outer);
    for &p in parts {
        union.push_dense(p);
    }
    for (i, &s) in verts.iter().enumerate() {
        w[i * k + i] = 0;
        let res = if union.contains(s) {
            union.set_forbidden(verts.iter().copied().filter(|&x| x != s).collect());
            Some(
                multi_dijkstra(&union, &[(s, DistanceValue::Finite(0))], Strategy::Naive)
                    .expect("source is in the union"),
            )
        } else {
            None
        };
        for (j, &b) in verts.iter().enumerate() {
            if j == i {
                continue;
            }
            let via = res.as_ref().map_or(INF, |r| r.raw(b));
            w[i * k + j] = via.min(g.arc_between(s, b).unwrap_or(INF));
        }
    }
    DenseDistanceGraph::new(DdgVariant::StrictExternal, verts, w, t.to_vec(), None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ddg::{compute_ddg_internal, ShiftConstant};
    use crate::graph::generate::{grid, random_triangulation, WeightMode};

    /// Dijkstra from `s` where vertices of `frozen` other than `s` are
    /// reached but never expanded.
    fn frozen_tail(g: &EmbeddedPlanarGraph, s: VertexId, frozen: &[bool]) -> Vec<u64> {
        let mut dist = vec![INF; g.vertex_count()];
        let mut heap = std::collections::BinaryHeap::new();
        dist[s as usize] = 0;
        heap.push(std::cmp::Reverse((0u64, s)));
        while let Some(std::cmp::Reverse((d, x))) = heap.pop() {
            if d > dist[x as usize] || (x != s && frozen[x as usize]) {
                continue;
            }
            for (_, a) in g.out_arcs(x) {
                let nd = d + a.weight;
                if nd < dist[a.head as usize] {
                    dist[a.head as usize] = nd;
                    heap.push(std::cmp::Reverse((nd, a.head)));
                }
            }
        }
        dist
    }

    fn brute(g: &EmbeddedPlanarGraph, tree: &DecompositionTree, t: &[NodeId]) -> Vec<u64> {
        let verts = tuple_boundary(tree, t);
        let mut frozen = vec![false; g.vertex_count()];
        for &p in t {
            for &v in &tree.piece(p).vertices {
                frozen[v as usize] = true;
            }
        }
        let mut out = Vec::new();
        for &s in &verts {
            let d = frozen_tail(g, s, &frozen);
            out.extend(
                verts
                    .iter()
                    .map(|&b| if b == s { 0 } else { d[b as usize] }),
            );
        }
        out
    }

    fn store(g: &EmbeddedPlanarGraph, tree: &DecompositionTree) -> Vec<Option<DenseDistanceGraph>> {
        let shift = ShiftConstant::for_graph(g);
        (0..tree.len() as NodeId)
            .map(|p| (!tree.piece(p).is_leaf()).then(|| compute_ddg_internal(g, tree, p, &shift)))
            .collect()
    }

    fn check_all(g: &EmbeddedPlanarGraph, tree: &DecompositionTree, max_size: usize) {
        let st = store(g, tree);
        for r in tree.r_sequence() {
            let div = tree.r_division(r).unwrap().to_vec();
            let mut tuples: Vec<Tuple> = Vec::new();
            for (i, &a) in div.iter().enumerate() {
                tuples.push(vec![a]);
                for (j, &b) in div.iter().enumerate().skip(i + 1) {
                    if max_size >= 2 {
                        tuples.push(vec![a, b]);
                    }
                    if max_size >= 3 {
                        for &c in div.iter().skip(j + 1).take(3) {
                            tuples.push(vec![a, b, c]);
                        }
                    }
                }
            }
            let got = compute_ddg_external_all(g, tree, &st, r, &tuples).unwrap();
            for t in &tuples {
                let d = &got[t];
                assert_eq!(d.vertices(), tuple_boundary(tree, t));
                assert_eq!(d.raw_weights(), brute(g, tree, t), "r {r} tuple {t:?}");
            }
        }
    }

    #[test]
    fn root_tuple_is_empty() {
        let g = grid(6, 6, WeightMode::Unit).unwrap();
        let tree = DecompositionTree::build(&g, 4, 2).unwrap();
        let st = store(&g, &tree);
        let d = compute_ddg_external(&g, &tree, &st, 36, &[0]).unwrap();
        assert!(d.is_empty());
    }

    #[test]
    fn grid_tuples_match_brute_force() {
        let g = grid(
            8,
            8,
            WeightMode::SeededRandom {
                max_weight: 10,
                seed: 2,
            },
        )
        .unwrap();
        let tree = DecompositionTree::build(&g, 4, 2).unwrap();
        check_all(&g, &tree, 3);
    }

    #[test]
    fn triangulation_tuples_match_brute_force() {
        let g = random_triangulation(
            120,
            WeightMode::SeededRandom {
                max_weight: 30,
                seed: 1,
            },
            4,
        )
        .unwrap();
        let tree = DecompositionTree::build(&g, 6, 2).unwrap();
        check_all(&g, &tree, 2);
    }

    #[test]
    fn tuple_validation() {
        let g = grid(8, 8, WeightMode::Unit).unwrap();
        let tree = DecompositionTree::build(&g, 4, 2).unwrap();
        let st = store(&g, &tree);
        let r = tree.r_sequence()[0];
        let div = tree.r_division(r).unwrap().to_vec();
        assert!(matches!(
            compute_ddg_external(&g, &tree, &st, r, &[div[0], div[0]]),
            Err(Error::DuplicatePiece(_))
        ));
        assert!(matches!(
            compute_ddg_external(&g, &tree, &st, r, &[div[0], 0]),
            Err(Error::MixedRDivision)
        ));
        assert!(matches!(
            compute_ddg_external(&g, &tree, &st, 3, &[0]),
            Err(Error::UnmarkedR(3))
        ));
    }
}
