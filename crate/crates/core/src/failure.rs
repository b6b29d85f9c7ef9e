//! Near-linear-space oracle for distances avoiding any set of failed
//! vertices.
//!
//! Every non-leaf piece stores its strictly internal DDG. A query replaces
//! the leaves of `u`, `v` and every failed vertex by on-the-fly summaries of
//! the leaf minus the failures, adds the stored summaries of the sibling
//! antichain around those leaves, and searches the union with the failed
//! vertices as forbidden tails.

use crate::ddg::{compute_ddg_internal, DenseDistanceGraph, ShiftConstant};
use crate::decomposition::{DecompositionTree, NodeId, DEFAULT_BASE, DEFAULT_LEAF_SIZE};
use crate::error::{Error, Result};
use crate::frdijkstra::assembly::{assemble_within, AssemblyPieces};
use crate::frdijkstra::{multi_dijkstra_until, DdgUnion, SearchStats, Strategy};
use crate::graph::{DistanceValue, EmbeddedPlanarGraph, VertexId, INF};
use crate::par;

/// The failure oracle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FailureOracle {
    graph: EmbeddedPlanarGraph,
    tree: DecompositionTree,
    ddg: Vec<Option<DenseDistanceGraph>>,
    shift: ShiftConstant,
}

/// A query answer with instrumentation.
#[derive(Clone, Debug)]
pub struct QueryOutcome {
    pub distance: DistanceValue,
    pub stats: SearchStats,
    pub pieces: AssemblyPieces,
    /// Σ of member vertex counts in the searched union.
    pub union_boundary: usize,
}

impl FailureOracle {
    /// Build with the default leaf size and r-sequence base.
    pub fn build(g: EmbeddedPlanarGraph) -> Result<Self> {
        Self::build_with(g, DEFAULT_LEAF_SIZE, DEFAULT_BASE)
    }

    pub fn build_with(g: EmbeddedPlanarGraph, leaf_size: usize, base: usize) -> Result<Self> {
        let tree = DecompositionTree::build(&g, leaf_size, base)?;
        Ok(Self::with_tree(g, tree))
    }

    /// Compute the stored summaries for an existing decomposition of `g`.
    pub fn with_tree(g: EmbeddedPlanarGraph, tree: DecompositionTree) -> Self {
        let shift = ShiftConstant::for_graph(&g);
        let ddg = par::map_range(tree.len(), |p| {
            let p = p as NodeId;
            (!tree.piece(p).is_leaf()).then(|| compute_ddg_internal(&g, &tree, p, &shift))
        });
        Self {
            graph: g,
            tree,
            ddg,
            shift,
        }
    }

    pub(crate) fn from_parts(
        graph: EmbeddedPlanarGraph,
        tree: DecompositionTree,
        ddg: Vec<Option<DenseDistanceGraph>>,
        shift: ShiftConstant,
    ) -> Result<Self> {
        if ddg.len() != tree.len() {
            return Err(Error::Format(
                "summary count does not match the tree".into(),
            ));
        }
        for (p, d) in ddg.iter().enumerate() {
            if d.is_some() == tree.piece(p as NodeId).is_leaf() {
                return Err(Error::Format(format!(
                    "summary presence mismatch at piece {p}"
                )));
            }
        }
        Ok(Self {
            graph,
            tree,
            ddg,
            shift,
        })
    }

    pub fn graph(&self) -> &EmbeddedPlanarGraph {
        &self.graph
    }

    pub fn tree(&self) -> &DecompositionTree {
        &self.tree
    }

    pub fn shift(&self) -> &ShiftConstant {
        &self.shift
    }

    /// Stored summaries indexed by node id (`None` at leaves).
    pub fn ddgs(&self) -> &Vec<Option<DenseDistanceGraph>> {
        &self.ddg
    }

    pub fn ddg(&self, p: NodeId) -> Option<&DenseDistanceGraph> {
        self.ddg.get(p as usize).and_then(Option::as_ref)
    }

    /// Total number of stored matrix entries.
    pub fn stored_entries(&self) -> usize {
        self.ddg
            .iter()
            .flatten()
            .map(DenseDistanceGraph::entry_count)
            .sum()
    }

    /// Distance from `u` to `v` avoiding `failed`.
    pub fn query(&self, u: VertexId, v: VertexId, failed: &[VertexId]) -> Result<DistanceValue> {
        Ok(self.query_with(u, v, failed, Strategy::default())?.distance)
    }

    pub fn query_with(
        &self,
        u: VertexId,
        v: VertexId,
        failed: &[VertexId],
        strategy: Strategy,
    ) -> Result<QueryOutcome> {
        let failed = self.check_query(u, v, failed)?;
        if u == v {
            return Ok(QueryOutcome {
                distance: DistanceValue::Finite(0),
                stats: SearchStats::default(),
                pieces: AssemblyPieces::default(),
                union_boundary: 0,
            });
        }
        let (union, pieces) = self.assemble(u, v, &failed);
        let res =
            multi_dijkstra_until(&union, &[(u, DistanceValue::Finite(0))], strategy, Some(v))?;
        let mut best = res.raw(v);
        let leaf = self.tree.leaf_of(u);
        if self.tree.contains(leaf, v) {
            best = best.min(self.in_leaf(leaf, u, v, &failed));
        }
        Ok(QueryOutcome {
            distance: DistanceValue::from_raw(best),
            stats: res.stats,
            pieces,
            union_boundary: union.member_vertex_total(),
        })
    }

    /// The union searched for a query. `failed` must be sorted and free of
    /// `u` and `v`.
    pub fn assemble(
        &self,
        u: VertexId,
        v: VertexId,
        failed: &[VertexId],
    ) -> (DdgUnion<'_>, AssemblyPieces) {
        let mut anchors = vec![u, v];
        anchors.extend_from_slice(failed);
        let mut union = DdgUnion::new();
        let pieces = assemble_within(
            &self.graph,
            &self.tree,
            &self.ddg,
            self.tree.root(),
            &anchors,
            &[u, v],
            failed,
            &mut union,
        );
        union.set_forbidden(failed.to_vec());
        (union, pieces)
    }

    /// Validate endpoints and failures; returns the sorted, deduplicated
    /// failure set.
    pub(crate) fn check_query(
        &self,
        u: VertexId,
        v: VertexId,
        failed: &[VertexId],
    ) -> Result<Vec<VertexId>> {
        self.graph.check_vertex(u)?;
        self.graph.check_vertex(v)?;
        for &x in failed {
            self.graph.check_vertex(x)?;
        }
        for w in [u, v] {
            if failed.contains(&w) {
                return Err(Error::EndpointFailed(w));
            }
        }
        let mut f = failed.to_vec();
        f.sort_unstable();
        f.dedup();
        Ok(f)
    }

    fn in_leaf(&self, leaf: NodeId, u: VertexId, v: VertexId, failed: &[VertexId]) -> u64 {
        let local = self.tree.local_graph(&self.graph, leaf);
        let blocked: Vec<bool> = local
            .vertices()
            .iter()
            .map(|x| failed.binary_search(x).is_ok())
            .collect();
        match (local.index_of(u), local.index_of(v)) {
            (Some(a), Some(b)) => local.dijkstra(a, Some(&blocked))[b],
            _ => INF,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::distance_avoiding;
    use crate::graph::generate::{grid, path, random_triangulation, WeightMode};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_query(rng: &mut ChaCha8Rng, n: u32, k: usize) -> (u32, u32, Vec<u32>) {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        let mut x = Vec::new();
        while x.len() < k {
            let c = rng.gen_range(0..n);
            if c != u && c != v && !x.contains(&c) {
                x.push(c);
            }
        }
        (u, v, x)
    }

    #[test]
    fn single_vertex_graph() {
        let g = EmbeddedPlanarGraph::new(1, vec![], vec![vec![]]).unwrap();
        let o = FailureOracle::build(g).unwrap();
        assert_eq!(o.stored_entries(), 0);
        assert_eq!(o.query(0, 0, &[]).unwrap(), DistanceValue::Finite(0));
    }

    #[test]
    fn path_with_failed_middle() {
        let g = path(&[1, 1]).unwrap();
        let o = FailureOracle::build(g).unwrap();
        assert_eq!(o.query(0, 2, &[]).unwrap(), DistanceValue::Finite(2));
        assert_eq!(o.query(0, 2, &[1]).unwrap(), DistanceValue::Unreachable);
        assert!(matches!(o.query(0, 2, &[0]), Err(Error::EndpointFailed(0))));
    }

    #[test]
    fn grid_center_failure() {
        let g = grid(3, 3, WeightMode::Unit).unwrap();
        let o = FailureOracle::build_with(g, 4, 2).unwrap();
        assert_eq!(o.query(0, 8, &[]).unwrap(), DistanceValue::Finite(4));
        assert_eq!(o.query(0, 8, &[4]).unwrap(), DistanceValue::Finite(4));
        assert_eq!(o.query(0, 8, &[1, 3]).unwrap(), DistanceValue::Unreachable);
    }

    #[test]
    fn random_grid_queries_match_brute_force() {
        let g = grid(
            16,
            16,
            WeightMode::SeededRandom {
                max_weight: 50,
                seed: 3,
            },
        )
        .unwrap();
        let o = FailureOracle::build_with(g.clone(), 8, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for i in 0..200 {
            let (u, v, x) = random_query(&mut rng, 256, 1 + i % 4);
            let want = distance_avoiding(&g, u, v, &x).unwrap();
            for s in [Strategy::Naive, Strategy::Monge] {
                if s.available() {
                    assert_eq!(
                        o.query_with(u, v, &x, s).unwrap().distance,
                        want,
                        "{u} {v} {x:?} {s:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn triangulation_queries_match_brute_force() {
        let g = random_triangulation(
            300,
            WeightMode::SeededRandom {
                max_weight: 20,
                seed: 5,
            },
            5,
        )
        .unwrap();
        let o = FailureOracle::build_with(g.clone(), 10, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for i in 0..100 {
            let (u, v, x) = random_query(&mut rng, 300, i % 5);
            assert_eq!(
                o.query(u, v, &x).unwrap(),
                distance_avoiding(&g, u, v, &x).unwrap()
            );
        }
    }

    #[test]
    fn empty_failure_set_matches_sssp() {
        let g = grid(
            9,
            9,
            WeightMode::SeededRandom {
                max_weight: 9,
                seed: 1,
            },
        )
        .unwrap();
        let o = FailureOracle::build_with(g.clone(), 6, 2).unwrap();
        for u in [0u32, 40, 80] {
            let d = crate::graph::sssp(&g, u).unwrap();
            for v in 0..81 {
                assert_eq!(o.query(u, v, &[]).unwrap(), d[v as usize]);
            }
        }
    }

    #[test]
    fn assembled_pieces_cover_every_arc_and_avoid_internal_failures() {
        let g = grid(12, 12, WeightMode::Unit).unwrap();
        let o = FailureOracle::build_with(g, 6, 2).unwrap();
        let t = o.tree();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..50 {
            let (u, v, mut x) = random_query(&mut rng, 144, 3);
            x.sort_unstable();
            let (_, pieces) = o.assemble(u, v, &x);
            let mut arcs: Vec<u32> = pieces
                .leaves
                .iter()
                .chain(&pieces.siblings)
                .flat_map(|&p| t.piece_arcs(p))
                .collect();
            arcs.sort_unstable();
            assert_eq!(arcs, t.piece_arcs(t.root()));
            for &s in &pieces.siblings {
                for &f in &x {
                    assert!(!t.contains(s, f) || t.piece(s).is_boundary(f));
                }
            }
        }
    }

    #[test]
    fn more_failures_never_shorten() {
        let g = grid(
            10,
            10,
            WeightMode::SeededRandom {
                max_weight: 7,
                seed: 9,
            },
        )
        .unwrap();
        let o = FailureOracle::build_with(g, 6, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..60 {
            let (u, v, x) = random_query(&mut rng, 100, 4);
            let mut prev = o.query(u, v, &[]).unwrap();
            for j in 1..=4 {
                let d = o.query(u, v, &x[..j]).unwrap();
                assert!(d >= prev);
                prev = d;
            }
        }
    }
}
