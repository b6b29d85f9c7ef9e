use proptest::prelude::*;

use planar_fto::failure::FailureOracle;
use planar_fto::format::{self, OracleFile};
use planar_fto::frdijkstra::Strategy as SearchStrategy;
use planar_fto::graph::distance_avoiding;
use planar_fto::graph::generate::{grid, random_triangulation, WeightMode};
use planar_fto::graph::pgr::{parse_graph, to_pgr_string};
use planar_fto::{EmbeddedPlanarGraph, VertexId};

fn graph() -> impl Strategy<Value = EmbeddedPlanarGraph> {
    prop_oneof![
        (2usize..9, 2usize..9, 1u64..40, any::<u64>()).prop_map(|(r, c, w, s)| grid(
            r,
            c,
            WeightMode::SeededRandom {
                max_weight: w,
                seed: s
            }
        )
        .unwrap()),
        (4usize..90, 1u64..40, any::<u64>()).prop_map(|(n, w, s)| {
            random_triangulation(
                n,
                WeightMode::SeededRandom {
                    max_weight: w,
                    seed: s,
                },
                s,
            )
            .unwrap()
        }),
    ]
}

/// A graph, its oracle, and raw vertex picks to be reduced modulo n.
fn case() -> impl Strategy<Value = (EmbeddedPlanarGraph, FailureOracle, Vec<u32>)> {
    (
        graph(),
        1usize..5,
        2usize..4,
        prop::collection::vec(any::<u32>(), 8),
    )
        .prop_map(|(g, leaf, base, picks)| {
            let o = FailureOracle::build_with(g.clone(), 2 * leaf, base).unwrap();
            (g, o, picks)
        })
}

fn failed_set(picks: &[u32], n: usize, skip: &[VertexId]) -> Vec<VertexId> {
    let mut x: Vec<VertexId> = picks
        .iter()
        .map(|p| p % n as u32)
        .filter(|v| !skip.contains(v))
        .collect();
    x.sort_unstable();
    x.dedup();
    x
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn queries_match_brute_force_and_are_monotone((g, o, picks) in case()) {
        let n = g.vertex_count();
        let (u, v) = (picks[0] % n as u32, picks[1] % n as u32);
        let x = failed_set(&picks[2..], n, &[u, v]);
        let mut prev = None;
        for len in 0..=x.len() {
            let d = o.query(u, v, &x[..len]).unwrap();
            prop_assert_eq!(d, distance_avoiding(&g, u, v, &x[..len]).unwrap());
            if let Some(p) = prev {
                prop_assert!(d >= p);
            }
            prev = Some(d);
        }
    }

    #[test]
    fn triangle_inequality((g, o, picks) in case()) {
        let n = g.vertex_count();
        let (u, v, w) = (picks[0] % n as u32, picks[1] % n as u32, picks[2] % n as u32);
        let x = failed_set(&picks[3..6], n, &[u, v, w]);
        let uv = o.query(u, v, &x).unwrap();
        let vw = o.query(v, w, &x).unwrap();
        let uw = o.query(u, w, &x).unwrap();
        prop_assert!(uw <= uv.plus(vw));
    }

    #[test]
    fn strategies_agree((g, o, picks) in case()) {
        prop_assume!(SearchStrategy::Monge.available());
        let n = g.vertex_count();
        let (u, v) = (picks[0] % n as u32, picks[1] % n as u32);
        let x = failed_set(&picks[2..], n, &[u, v]);
        let a = o.query_with(u, v, &x, SearchStrategy::Naive).unwrap().distance;
        let b = o.query_with(u, v, &x, SearchStrategy::Monge).unwrap().distance;
        prop_assert_eq!(a, b);
    }

    #[test]
    fn oracle_file_round_trip((_g, o, _picks) in case()) {
        let bytes = format::failure_to_bytes(&o);
        let OracleFile::Failure(back) = format::from_bytes(&bytes).unwrap() else {
            panic!("wrong kind");
        };
        prop_assert_eq!(format::failure_to_bytes(&back), bytes);
        prop_assert_eq!(back, o);
    }

    #[test]
    fn pgr_round_trip(g in graph()) {
        prop_assert_eq!(parse_graph(&to_pgr_string(&g)).unwrap(), g);
    }
}
