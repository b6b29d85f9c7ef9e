use std::collections::HashSet;

use super::*;
use crate::graph::generate::{grid, path, random_triangulation, WeightMode};

fn check_invariants(g: &EmbeddedPlanarGraph, t: &DecompositionTree) {
    let n = g.vertex_count();
    for p in t.pieces() {
        // Boundary matches its definition.
        let arcs = t.piece_arcs(p.id);
        assert_eq!(arcs.len(), p.arc_count as usize);
        let inside: HashSet<ArcId> = arcs.iter().copied().collect();
        let mut expect: Vec<VertexId> = p
            .vertices
            .iter()
            .copied()
            .filter(|&v| g.rotation(v).iter().any(|a| !inside.contains(a)))
            .collect();
        expect.sort_unstable();
        assert_eq!(p.boundary, expect, "piece {}", p.id);

        // Holes partition the boundary.
        let mut flat: Vec<VertexId> = p.holes.iter().flatten().copied().collect();
        flat.sort_unstable();
        assert_eq!(flat, p.boundary);
        let mut cyc = p.boundary_cycle.clone();
        cyc.sort_unstable();
        assert_eq!(cyc, p.boundary);

        match p.children {
            None => assert!(p.vertices.len() <= t.leaf_size()),
            Some([a, b]) => {
                let (pa, pb) = (t.piece(a), t.piece(b));
                assert_eq!(pa.parent, Some(p.id));
                assert_eq!(pb.parent, Some(p.id));
                assert_eq!(a, p.id + 1);
                assert_eq!(b, pa.subtree_end);
                assert_eq!(p.subtree_end, pb.subtree_end);
                let mut union: Vec<VertexId> =
                    pa.vertices.iter().chain(&pb.vertices).copied().collect();
                union.sort_unstable();
                union.dedup();
                assert_eq!(union, p.vertices);
                let aa = t.piece_arcs(a);
                let ab = t.piece_arcs(b);
                assert!(!aa.is_empty() || !pa.vertices.is_empty());
                let mut all: Vec<ArcId> = aa.iter().chain(&ab).copied().collect();
                all.sort_unstable();
                assert_eq!(all, arcs, "children must partition the arcs");
                for c in [pa, pb] {
                    for &v in &c.boundary {
                        assert!(p.is_boundary(v) || p.separator.contains(&v));
                    }
                }
            }
        }
    }
    for v in 0..n as VertexId {
        let l = t.leaf_of(v);
        assert!(t.piece(l).is_leaf() && t.contains(l, v));
        let first = t
            .pieces()
            .iter()
            .find(|p| p.is_leaf() && p.contains(v))
            .unwrap();
        assert_eq!(first.id, l);
    }
    // Internal in at most one piece per level.
    let mut seen: HashSet<(u32, VertexId)> = HashSet::new();
    for p in t.pieces() {
        for &v in &p.vertices {
            if !p.is_boundary(v) {
                assert!(
                    seen.insert((p.depth, v)),
                    "vertex {v} internal twice at depth {}",
                    p.depth
                );
            }
        }
    }
    // r-divisions cover all arcs, are antichains, and nest.
    let seq = t.r_sequence();
    for (i, &r) in seq.iter().enumerate() {
        let div = t.r_division(r).unwrap();
        let mut all: Vec<ArcId> = div.iter().flat_map(|&p| t.piece_arcs(p)).collect();
        all.sort_unstable();
        assert_eq!(all, (0..g.arc_count() as ArcId).collect::<Vec<_>>());
        for &p in div {
            assert!(t.piece(p).vertices.len() <= r);
        }
        if let Some(&r2) = seq.get(i + 1) {
            let coarse = t.r_division(r2).unwrap();
            for &p in div {
                assert!(coarse.iter().any(|&q| t.is_ancestor(q, p)));
            }
        }
    }
    assert_eq!(t.r_division(*seq.last().unwrap()).unwrap(), &[t.root()]);
}

#[test]
fn single_vertex() {
    let g = EmbeddedPlanarGraph::new(1, vec![], vec![vec![]]).unwrap();
    let t = DecompositionTree::build_default(&g).unwrap();
    assert_eq!(t.len(), 1);
    assert!(t.piece(0).is_leaf());
    assert!(t.piece(0).boundary.is_empty());
    assert_eq!(t.leaf_of(0), 0);
}

#[test]
fn grids_and_triangulations_satisfy_invariants() {
    for (rows, cols, leaf) in [(4, 4, 4), (8, 8, 4), (6, 9, 5), (16, 16, 8), (1, 40, 4)] {
        let g = grid(rows, cols, WeightMode::Unit).unwrap();
        let t = DecompositionTree::build(&g, leaf, 2).unwrap();
        check_invariants(&g, &t);
    }
    for seed in 0..3 {
        let g = random_triangulation(300, WeightMode::Unit, seed).unwrap();
        let t = DecompositionTree::build(&g, 8, 2).unwrap();
        check_invariants(&g, &t);
    }
    let g = path(&[1; 30]).unwrap();
    check_invariants(&g, &DecompositionTree::build(&g, 3, 3).unwrap());
}

#[test]
fn disconnected_and_isolated_vertices() {
    let text = "7 4\n0 1 1\n1 2 1\n4 5 1\n5 4 1\n0\n0 1\n1\n\n2 3\n2 3\n\n";
    let g = crate::graph::pgr::parse_graph(text).unwrap();
    let t = DecompositionTree::build(&g, 2, 2).unwrap();
    check_invariants(&g, &t);
    assert!(t.piece(t.leaf_of(3)).contains(3));
}

#[test]
fn four_by_four_split_balance() {
    let g = grid(4, 4, WeightMode::Unit).unwrap();
    let t = DecompositionTree::build(&g, 4, 2).unwrap();
    for p in t.pieces() {
        if let Some(children) = p.children {
            let size = p.vertices.len();
            for c in children {
                let c = t.piece(c);
                assert!(
                    c.vertices.len() <= (2 * size).div_ceil(3) + p.separator.len(),
                    "piece {} of {size} vertices has child of {}",
                    p.id,
                    c.vertices.len()
                );
            }
        }
    }
}

#[test]
fn highest_excluding_ancestor_matches_scan() {
    use rand::{Rng, SeedableRng};
    let g = grid(8, 8, WeightMode::Unit).unwrap();
    let t = DecompositionTree::build(&g, 4, 2).unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    assert_eq!(
        t.highest_excluding_ancestor(t.leaf_of(5), &[]).unwrap(),
        t.root()
    );
    for _ in 0..300 {
        let v = rng.gen_range(0..64);
        let forb = [rng.gen_range(0..64), rng.gen_range(0..64)];
        let leaf = t.leaf_of(v);
        let got = t.highest_excluding_ancestor(leaf, &forb);
        let disjoint = |p: NodeId| t.piece(p).vertices.iter().all(|x| !forb.contains(x));
        if !disjoint(leaf) {
            assert!(matches!(got, Err(Error::ForbiddenInStartPiece(_))));
            continue;
        }
        let expect = t
            .path_to_root(leaf)
            .filter(|&p| disjoint(p))
            .min_by_key(|&p| t.piece(p).depth)
            .unwrap();
        assert_eq!(got.unwrap(), expect);
    }
}

#[test]
fn sibling_forbidden_stops_below_parent() {
    let g = grid(8, 8, WeightMode::Unit).unwrap();
    let t = DecompositionTree::build(&g, 4, 2).unwrap();
    let leaf = t.leaf_of(0);
    let sib = t.sibling(leaf).unwrap();
    let x = *t
        .piece(sib)
        .vertices
        .iter()
        .find(|&&x| !t.contains(leaf, x))
        .unwrap();
    let parent = t.piece(leaf).parent.unwrap();
    let got = t.highest_excluding_ancestor(leaf, &[x]).unwrap();
    assert!(t.is_ancestor(parent, got) && got != parent);
}

#[test]
fn r_sequence_shape() {
    assert_eq!(r_sequence(64, 4, 2), vec![8, 16, 32, 64]);
    assert_eq!(r_sequence(5, 4, 2), vec![5]);
    let g = grid(8, 8, WeightMode::Unit).unwrap();
    let t = DecompositionTree::build(&g, 4, 2).unwrap();
    assert!(matches!(t.r_division(7), Err(Error::UnmarkedR(7))));
    assert_eq!(t.r_division(64).unwrap(), &[0]);
}

#[test]
fn debug_dump_is_json() {
    let g = grid(3, 3, WeightMode::Unit).unwrap();
    let t = DecompositionTree::build(&g, 4, 2).unwrap();
    let v: serde_json::Value = serde_json::from_str(&t.debug_json()).unwrap();
    assert_eq!(v["schema"], "planar-fto/decomposition/v1");
    assert_eq!(v["pieces"].as_array().unwrap().len(), t.len());
}

#[test]
fn build_is_deterministic() {
    let g = random_triangulation(500, WeightMode::Unit, 9).unwrap();
    assert_eq!(
        DecompositionTree::build(&g, 16, 2).unwrap(),
        DecompositionTree::build(&g, 16, 2).unwrap()
    );
}
