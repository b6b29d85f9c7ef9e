use super::*;
use crate::graph::generate::{grid, path, WeightMode};
use crate::testutil::bellman_ford;

fn piece_arcs_local(
    g: &EmbeddedPlanarGraph,
    t: &DecompositionTree,
    p: NodeId,
) -> Vec<(u32, u32, u64)> {
    t.piece_arcs(p)
        .into_iter()
        .map(|a| {
            let a = g.arc(a);
            (a.tail, a.head, a.weight)
        })
        .collect()
}

#[test]
fn path_piece_strict_internal() {
    let g = path(&[1, 1]).unwrap();
    let local = LocalGraph::from_arcs(&g, [0, 1], []);
    let d = strict_internal_from_local(&local, &[0, 2], None, vec![], None);
    assert_eq!(d.get(0, 2), Some(DistanceValue::Finite(2)));
    assert_eq!(d.get(2, 0), Some(DistanceValue::Unreachable));
    let d = strict_internal_from_local(&local, &[0, 1, 2], None, vec![], None);
    assert_eq!(d.get(0, 2), Some(DistanceValue::Unreachable));
    assert_eq!(d.get(0, 1), Some(DistanceValue::Finite(1)));
    assert_eq!(d.get(1, 2), Some(DistanceValue::Finite(1)));
    assert_eq!(
        d.min_plus_closure().get(0, 2),
        Some(DistanceValue::Finite(2))
    );
}

/// Dijkstra on the numerically shifted piece with `u128` weights.
fn numeric_shift_oracle(
    arcs: &[(u32, u32, u64)],
    boundary: &[u32],
    c: u128,
    s: u32,
    n: usize,
) -> Vec<u128> {
    let mut d = vec![u128::MAX; n];
    d[s as usize] = 0;
    loop {
        let mut changed = false;
        for &(t, h, w) in arcs {
            if d[t as usize] == u128::MAX {
                continue;
            }
            let w = w as u128 + if boundary.contains(&t) { c } else { 0 };
            if d[t as usize] + w < d[h as usize] {
                d[h as usize] = d[t as usize] + w;
                changed = true;
            }
        }
        if !changed {
            return d;
        }
    }
}

#[test]
fn strict_internal_matches_numeric_shift_and_closure_matches_standard() {
    for seed in 0..4 {
        let g = grid(
            6,
            6,
            WeightMode::SeededRandom {
                max_weight: 20,
                seed,
            },
        )
        .unwrap();
        let t = DecompositionTree::build(&g, 6, 2).unwrap();
        let shift = ShiftConstant::for_graph(&g);
        let c = shift.value() as u128;
        for p in t.pieces() {
            let arcs = piece_arcs_local(&g, &t, p.id);
            let ddg = compute_ddg_internal(&g, &t, p.id, &shift);
            assert_eq!(ddg.variant(), DdgVariant::StrictInternal);
            for (i, &u) in p.boundary.iter().enumerate() {
                let num = numeric_shift_oracle(&arcs, &p.boundary, c, u, g.vertex_count());
                let plain = bellman_ford(g.vertex_count(), &arcs, u, &[]);
                let closure = ddg.min_plus_closure();
                for (j, &v) in p.boundary.iter().enumerate() {
                    let expect = if i == j {
                        0
                    } else if num[v as usize] != u128::MAX && num[v as usize] < 2 * c {
                        (num[v as usize] - c) as u64
                    } else {
                        INF
                    };
                    assert_eq!(ddg.weight_raw(i, j), expect, "piece {} {u}->{v}", p.id);
                    assert_eq!(closure.weight_raw(i, j), plain[v as usize]);
                }
            }
            assert_eq!(compute_ddg_standard(&g, &t, p.id), ddg.min_plus_closure());
        }
    }
}

#[test]
fn shift_constant_resolves_symbolically() {
    let g = grid(3, 3, WeightMode::Unit).unwrap();
    let mut s = ShiftConstant::for_graph(&g);
    assert_eq!(s.value(), 2 * 24);
    assert_eq!(s.resolve((1, 5)), 53);
    s.set_total_weight(100);
    assert_eq!(s.resolve((2, 1)), 401);
}

#[test]
fn piece_tables_match_per_pair_search() {
    let text = "9 7\n0 1 3\n1 2 4\n2 0 1\n2 3 1\n4 5 2\n5 6 2\n6 7 2\n\
                0 2\n0 1\n1 2 3\n3\n4\n4 5\n5 6\n6\n\n";
    let g = crate::graph::pgr::parse_graph(text).unwrap();
    let t = DecompositionTree::build(&g, 2, 2).unwrap();
    let mut saw_unreachable = false;
    for p in t.pieces() {
        let table = compute_piece_distance_table(&g, &t, p.id);
        let arcs = piece_arcs_local(&g, &t, p.id);
        for &s in &p.boundary {
            let d = bellman_ford(g.vertex_count(), &arcs, s, &[]);
            assert_eq!(table.get(s, s), Some(DistanceValue::Finite(0)));
            for &v in &p.vertices {
                let got = table.get(s, v).unwrap();
                assert_eq!(got, DistanceValue::from_raw(d[v as usize]));
                saw_unreachable |= !got.is_finite();
            }
        }
    }
    assert!(saw_unreachable);
}

#[test]
fn serde_skips_cache_and_round_trips() {
    let g = grid(4, 4, WeightMode::Unit).unwrap();
    let t = DecompositionTree::build(&g, 4, 2).unwrap();
    let d = compute_ddg_internal(&g, &t, 1, &ShiftConstant::for_graph(&g));
    let text = serde_json::to_string(&d).unwrap();
    let back: DenseDistanceGraph = serde_json::from_str(&text).unwrap();
    assert_eq!(back, d);
}
