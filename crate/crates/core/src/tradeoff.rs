//! Space/query tradeoff oracle for at most `k` failed vertices.
//!
//! For a marked r-division with `m` pieces, every `(k+1)`-subset of pieces
//! stores its strictly external DDG. For each such tuple `T` and each piece
//! `Q` hanging off the root paths of `T`, and each `y ∈ ∂T`, an additive
//! weight table `ω_y(s) = d(y, s)` over `s ∈ ∂Q` avoiding the vertices of
//! `T` is stored, together with in-piece distance tables of every such `Q`.
//!
//! A query with `u`, `v` and failures `X` places `u` and every failed vertex
//! in its own tuple piece, finds the highest piece `Q` around `v` free of
//! them, computes `d(u, y, X)` for `y ∈ ∂T` by searching the tuple's
//! external DDG together with failure-aware summaries of the tuple pieces,
//! and finishes with a scan over `y` and the sites of `Q`. Queries whose
//! endpoints and failures cannot be separated this way are answered by a
//! single search over the external DDG of a covering tuple.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::ddg::external::{compute_ddg_external_all, tuple_boundary, Tuple};
use crate::ddg::{compute_piece_distance_table, DenseDistanceGraph, PieceDistanceTable};
use crate::decomposition::{DecompositionTree, NodeId, DEFAULT_BASE, DEFAULT_LEAF_SIZE};
use crate::error::{Error, Result};
use crate::failure::FailureOracle;
use crate::frdijkstra::assembly::{assemble_within, sibling_antichain};
use crate::frdijkstra::cone::piece_ddg;
use crate::frdijkstra::{
    multi_dijkstra, multi_dijkstra_until, DdgUnion, Member, SearchStats, Strategy,
};
use crate::graph::{DistanceValue, EmbeddedPlanarGraph, VertexId, INF};
use crate::par;

/// Additive weights from every `y ∈ ∂T` to the sites `∂Q`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VoronoiTable {
    rows: Vec<VertexId>,
    sites: Vec<VertexId>,
    omega: Vec<u64>,
}

impl VoronoiTable {
    pub fn from_parts(rows: Vec<VertexId>, sites: Vec<VertexId>, omega: Vec<u64>) -> Result<Self> {
        if omega.len() != rows.len() * sites.len() {
            return Err(Error::Format(
                "additive weight table has the wrong size".into(),
            ));
        }
        Ok(Self { rows, sites, omega })
    }

    pub fn rows(&self) -> &[VertexId] {
        &self.rows
    }

    pub fn sites(&self) -> &[VertexId] {
        &self.sites
    }

    pub fn raw(&self) -> &[u64] {
        &self.omega
    }

    pub fn row(&self, y_idx: usize) -> &[u64] {
        let k = self.sites.len();
        &self.omega[y_idx * k..(y_idx + 1) * k]
    }

    pub fn get(&self, y: VertexId, s: VertexId) -> Option<DistanceValue> {
        let i = self.rows.binary_search(&y).ok()?;
        let j = self.sites.binary_search(&s).ok()?;
        Some(DistanceValue::from_raw(self.row(i)[j]))
    }
}

/// How a query was answered.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Route {
    /// `u == v`.
    Trivial,
    /// Scan over `∂T` and the sites of `q`; `witness` is the minimising
    /// `(y, s)` when the answer is finite.
    Main {
        tuple: Tuple,
        q: NodeId,
        witness: Option<(VertexId, VertexId)>,
    },
    /// One search over the external DDG of a tuple covering `u`, `v` and
    /// the failures.
    Fallback { tuple: Tuple },
}

#[derive(Clone, Debug)]
pub struct TradeoffOutcome {
    pub distance: DistanceValue,
    pub route: Route,
    pub stats: SearchStats,
    pub union_boundary: usize,
}

/// The tradeoff oracle.
#[derive(Clone, Debug)]
pub struct TradeoffOracle {
    base: FailureOracle,
    r: usize,
    k: usize,
    rdiv: Vec<NodeId>,
    ext: BTreeMap<Tuple, DenseDistanceGraph>,
    vor: BTreeMap<(Tuple, NodeId), VoronoiTable>,
    piece_tables: BTreeMap<NodeId, PieceDistanceTable>,
    rpieces_of: Vec<Vec<NodeId>>,
}

impl PartialEq for TradeoffOracle {
    fn eq(&self, o: &Self) -> bool {
        self.base == o.base
            && self.r == o.r
            && self.k == o.k
            && self.rdiv == o.rdiv
            && self.ext == o.ext
            && self.vor == o.vor
            && self.piece_tables == o.piece_tables
    }
}

/// All `d`-subsets of `items`, lexicographic.
pub fn subsets(items: &[NodeId], d: usize) -> Vec<Tuple> {
    fn rec(items: &[NodeId], d: usize, cur: &mut Tuple, out: &mut Vec<Tuple>) {
        if cur.len() == d {
            out.push(cur.clone());
            return;
        }
        for (i, &x) in items.iter().enumerate() {
            if items.len() - i < d - cur.len() {
                break;
            }
            cur.push(x);
            rec(&items[i + 1..], d, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(items, d, &mut Vec::new(), &mut out);
    out
}

impl TradeoffOracle {
    pub fn build(g: EmbeddedPlanarGraph, r: usize, k: usize) -> Result<Self> {
        Self::build_with(g, r, k, DEFAULT_LEAF_SIZE, DEFAULT_BASE)
    }

    pub fn build_with(
        g: EmbeddedPlanarGraph,
        r: usize,
        k: usize,
        leaf_size: usize,
        base: usize,
    ) -> Result<Self> {
        let tree = DecompositionTree::build(&g, leaf_size, base)?;
        tree.r_division(r)?;
        Self::from_failure_oracle(FailureOracle::with_tree(g, tree), r, k)
    }

    /// Add the tuple tables for `(r, k)` on top of an existing oracle.
    pub fn from_failure_oracle(base: FailureOracle, r: usize, k: usize) -> Result<Self> {
        let g = base.graph();
        let tree = base.tree();
        let rdiv = tree.r_division(r)?.to_vec();
        if k > g.vertex_count() / r {
            return Err(Error::InvalidParameter(format!(
                "k = {k} exceeds n/r = {}",
                g.vertex_count() / r
            )));
        }
        let d = (k + 1).min(rdiv.len());
        let tuples = subsets(&rdiv, d);
        let ext = compute_ddg_external_all(g, tree, base.ddgs(), r, &tuples)?;

        let per_tuple = par::map(&tuples, |t| omega_tables(g, tree, base.ddgs(), t));
        let mut vor = BTreeMap::new();
        let mut qs = BTreeSet::new();
        for (t, tables) in tuples.iter().zip(per_tuple) {
            for (q, table) in tables {
                qs.insert(q);
                vor.insert((t.clone(), q), table);
            }
        }
        let qs: Vec<NodeId> = qs.into_iter().collect();
        let tables = par::map(&qs, |&q| compute_piece_distance_table(g, tree, q));
        let piece_tables = qs.into_iter().zip(tables).collect();
        Self::from_loaded(base, r, k, rdiv, ext, vor, piece_tables)
    }

    pub(crate) fn from_loaded(
        base: FailureOracle,
        r: usize,
        k: usize,
        rdiv: Vec<NodeId>,
        ext: BTreeMap<Tuple, DenseDistanceGraph>,
        vor: BTreeMap<(Tuple, NodeId), VoronoiTable>,
        piece_tables: BTreeMap<NodeId, PieceDistanceTable>,
    ) -> Result<Self> {
        let d = (k + 1).min(rdiv.len());
        if ext
            .keys()
            .any(|t| t.len() != d || t.iter().any(|p| rdiv.binary_search(p).is_err()))
        {
            return Err(Error::Format(
                "external DDG keyed by a foreign tuple".into(),
            ));
        }
        if vor
            .keys()
            .any(|(t, q)| !ext.contains_key(t) || !piece_tables.contains_key(q))
        {
            return Err(Error::Format(
                "additive weight table without its tuple or piece".into(),
            ));
        }
        let mut rpieces_of = vec![Vec::new(); base.graph().vertex_count()];
        for &p in &rdiv {
            for &v in &base.tree().piece(p).vertices {
                rpieces_of[v as usize].push(p);
            }
        }
        Ok(Self {
            base,
            r,
            k,
            rdiv,
            ext,
            vor,
            piece_tables,
            rpieces_of,
        })
    }

    pub fn base(&self) -> &FailureOracle {
        &self.base
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn rdiv(&self) -> &[NodeId] {
        &self.rdiv
    }

    /// Size of the stored tuples.
    pub fn tuple_size(&self) -> usize {
        (self.k + 1).min(self.rdiv.len())
    }

    pub fn ext(&self) -> &BTreeMap<Tuple, DenseDistanceGraph> {
        &self.ext
    }

    pub fn vor(&self) -> &BTreeMap<(Tuple, NodeId), VoronoiTable> {
        &self.vor
    }

    pub fn piece_tables(&self) -> &BTreeMap<NodeId, PieceDistanceTable> {
        &self.piece_tables
    }

    /// Stored external DDG of a tuple given in any order.
    pub fn ext_for(&self, tuple: &[NodeId]) -> Option<&DenseDistanceGraph> {
        let mut t = tuple.to_vec();
        t.sort_unstable();
        self.ext.get(&t)
    }

    /// r-division pieces containing `v`.
    pub fn rpieces_of(&self, v: VertexId) -> &[NodeId] {
        &self.rpieces_of[v as usize]
    }

    pub fn query(&self, u: VertexId, v: VertexId, failed: &[VertexId]) -> Result<DistanceValue> {
        Ok(self.query_with(u, v, failed, Strategy::default())?.distance)
    }

    pub fn query_with(
        &self,
        u: VertexId,
        v: VertexId,
        failed: &[VertexId],
        strategy: Strategy,
    ) -> Result<TradeoffOutcome> {
        let x = self.base.check_query(u, v, failed)?;
        if x.len() > self.k {
            return Err(Error::TooManyFailures {
                given: x.len(),
                capacity: self.k,
            });
        }
        if u == v {
            return Ok(TradeoffOutcome {
                distance: DistanceValue::Finite(0),
                route: Route::Trivial,
                stats: SearchStats::default(),
                union_boundary: 0,
            });
        }
        match self.main_plan(u, v, &x) {
            Some((tuple, q)) => self.answer_main(u, v, &x, tuple, q, strategy),
            None => self.answer_fallback(u, v, &x, strategy),
        }
    }

    /// The tuple and the piece `Q` for the scan, when `u`, `v` and the
    /// failures can be separated.
    fn main_plan(&self, u: VertexId, v: VertexId, x: &[VertexId]) -> Option<(Tuple, NodeId)> {
        let tree = self.base.tree();
        let mut f = vec![u];
        f.extend_from_slice(x);
        let mut seen = BTreeSet::new();
        for &e in &f {
            for &p in &self.rpieces_of[e as usize] {
                if !seen.insert(p) {
                    return None;
                }
            }
        }
        let rv = *self.rpieces_of[v as usize]
            .iter()
            .find(|&&p| f.iter().all(|&e| !tree.contains(p, e)))?;
        let q = tree.highest_excluding_ancestor(rv, &f).ok()?;
        let s = tree.sibling(q)?;
        let i = *f.iter().find(|&&e| tree.contains(s, e))?;
        let mut ri = s;
        while self.rdiv.binary_search(&ri).is_err() {
            let [a, b] = tree.piece(ri).children?;
            ri = if tree.contains(a, i) { a } else { b };
        }
        let mut tuple: Vec<NodeId> = f
            .iter()
            .map(|&e| {
                if e == i {
                    ri
                } else {
                    self.rpieces_of[e as usize][0]
                }
            })
            .collect();
        if tuple.iter().any(|&p| tree.contains(p, v)) {
            return None;
        }
        for &p in &self.rdiv {
            if tuple.len() >= self.tuple_size() {
                break;
            }
            if tree.is_ancestor(q, p) || tuple.contains(&p) {
                continue;
            }
            if tree.contains(p, v) || f.iter().any(|&e| tree.contains(p, e)) {
                continue;
            }
            tuple.push(p);
        }
        if tuple.len() < self.tuple_size() {
            return None;
        }
        tuple.sort_unstable();
        Some((tuple, q))
    }

    fn answer_main(
        &self,
        u: VertexId,
        v: VertexId,
        x: &[VertexId],
        tuple: Tuple,
        q: NodeId,
        strategy: Strategy,
    ) -> Result<TradeoffOutcome> {
        let (union, boundary) = self.tuple_union(&tuple, u, v, x, false);
        let res = multi_dijkstra(&union, &[(u, DistanceValue::Finite(0))], strategy)?;
        let vor = &self.vor[&(tuple.clone(), q)];
        let table = &self.piece_tables[&q];
        let vi = table.vertex_index(v).expect("v lies in Q");
        let site_dist: Vec<u64> = (0..table.boundary().len())
            .map(|si| table.raw_at(si, vi))
            .collect();
        let mut best = u128::from(INF);
        let mut witness = None;
        for (yi, &y) in boundary.iter().enumerate() {
            if x.binary_search(&y).is_ok() {
                continue;
            }
            let dy = res.raw(y);
            if dy == INF {
                continue;
            }
            for (si, (&w, &dq)) in vor.row(yi).iter().zip(&site_dist).enumerate() {
                if w == INF || dq == INF {
                    continue;
                }
                let total = u128::from(dy) + u128::from(w) + u128::from(dq);
                if total < best {
                    best = total;
                    witness = Some((y, vor.sites()[si]));
                }
            }
        }
        let distance = if witness.is_some() {
            DistanceValue::Finite(u64::try_from(best).expect("a real path length"))
        } else {
            DistanceValue::Unreachable
        };
        Ok(TradeoffOutcome {
            distance,
            route: Route::Main { tuple, q, witness },
            stats: res.stats,
            union_boundary: union.member_vertex_total(),
        })
    }

    fn answer_fallback(
        &self,
        u: VertexId,
        v: VertexId,
        x: &[VertexId],
        strategy: Strategy,
    ) -> Result<TradeoffOutcome> {
        let mut need = vec![u, v];
        need.extend_from_slice(x);
        let mut cover = Vec::new();
        let found = self.cover(&need, &mut cover);
        assert!(found, "at most k+1 pieces always cover u, v and X here");
        cover.sort_unstable();
        for &p in &self.rdiv {
            if cover.len() >= self.tuple_size() {
                break;
            }
            if !cover.contains(&p) {
                cover.push(p);
            }
        }
        cover.sort_unstable();
        let (union, _) = self.tuple_union(&cover, u, v, x, true);
        let res =
            multi_dijkstra_until(&union, &[(u, DistanceValue::Finite(0))], strategy, Some(v))?;
        Ok(TradeoffOutcome {
            distance: DistanceValue::from_raw(res.raw(v)),
            route: Route::Fallback { tuple: cover },
            stats: res.stats,
            union_boundary: union.member_vertex_total(),
        })
    }

    /// Choose at most `tuple_size` r-pieces covering `need`.
    fn cover(&self, need: &[VertexId], chosen: &mut Vec<NodeId>) -> bool {
        let tree = self.base.tree();
        let Some(&w) = need
            .iter()
            .find(|&&w| !chosen.iter().any(|&p| tree.contains(p, w)))
        else {
            return true;
        };
        if chosen.len() == self.tuple_size() {
            return false;
        }
        for &p in &self.rpieces_of[w as usize] {
            chosen.push(p);
            if self.cover(need, chosen) {
                return true;
            }
            chosen.pop();
        }
        false
    }

    /// External DDG of `tuple` plus a failure-aware summary of each of its
    /// pieces. Returns the union and `∂T`.
    fn tuple_union(
        &self,
        tuple: &[NodeId],
        u: VertexId,
        v: VertexId,
        x: &[VertexId],
        promote_v: bool,
    ) -> (DdgUnion<'_>, Vec<VertexId>) {
        let g = self.base.graph();
        let tree = self.base.tree();
        let ext = &self.ext[tuple];
        let mut union = DdgUnion::new();
        union.push_dense(ext);
        let mut anchors = vec![u];
        let mut promoted = vec![u];
        if promote_v {
            anchors.push(v);
            promoted.push(v);
        }
        anchors.extend_from_slice(x);
        for &p in tuple {
            assemble_within(
                g,
                tree,
                self.base.ddgs(),
                p,
                &anchors,
                &promoted,
                x,
                &mut union,
            );
        }
        union.set_forbidden(x.to_vec());
        (union, ext.vertices().to_vec())
    }
}

/// Additive weight tables of one tuple for every piece hanging off its
/// root paths.
fn omega_tables(
    g: &EmbeddedPlanarGraph,
    tree: &DecompositionTree,
    store: &Vec<Option<DenseDistanceGraph>>,
    t: &[NodeId],
) -> Vec<(NodeId, VoronoiTable)> {
    let sib = sibling_antichain(tree, tree.root(), t);
    let rows = tuple_boundary(tree, t);
    let mut union = DdgUnion::new();
    for &s in &sib {
        union.push(Member::Dense(piece_ddg(g, tree, store, s)));
    }
    let labels: Vec<Option<crate::frdijkstra::SearchResult>> = rows
        .iter()
        .map(|&y| {
            if !union.contains(y) {
                return None;
            }
            union.set_forbidden(rows.iter().copied().filter(|&w| w != y).collect());
            Some(
                multi_dijkstra(&union, &[(y, DistanceValue::Finite(0))], Strategy::Naive)
                    .expect("y is in the union"),
            )
        })
        .collect();
    sib.iter()
        .map(|&q| {
            let sites = tree.piece(q).boundary.clone();
            let mut omega = Vec::with_capacity(rows.len() * sites.len());
            for (&y, lab) in rows.iter().zip(&labels) {
                for &s in &sites {
                    omega.push(if s == y {
                        0
                    } else if rows.binary_search(&s).is_ok() {
                        INF
                    } else {
                        lab.as_ref().map_or(INF, |l| l.raw(s))
                    });
                }
            }
            (
                q,
                VoronoiTable {
                    rows: rows.clone(),
                    sites,
                    omega,
                },
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::distance_avoiding;
    use crate::graph::generate::{grid, WeightMode};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn small() -> (EmbeddedPlanarGraph, TradeoffOracle) {
        let g = grid(
            8,
            8,
            WeightMode::SeededRandom {
                max_weight: 20,
                seed: 4,
            },
        )
        .unwrap();
        let o = TradeoffOracle::build_with(g.clone(), 16, 1, 4, 2).unwrap();
        (g, o)
    }

    #[test]
    fn subsets_enumerate_combinations() {
        assert_eq!(
            subsets(&[1, 2, 3], 2),
            vec![vec![1, 2], vec![1, 3], vec![2, 3]]
        );
        assert_eq!(subsets(&[1, 2], 0), vec![Vec::<u32>::new()]);
        assert_eq!(subsets(&[4, 5, 6, 7], 3).len(), 4);
    }

    #[test]
    fn omega_matches_brute_force() {
        let (g, o) = small();
        let tree = o.base().tree();
        for ((t, q), table) in o.vor().iter().take(40) {
            let mut blocked: Vec<VertexId> = t
                .iter()
                .flat_map(|&p| tree.piece(p).vertices.clone())
                .collect();
            blocked.sort_unstable();
            blocked.dedup();
            assert!(sibling_antichain(tree, tree.root(), t).contains(q));
            for &y in table.rows() {
                for &s in table.sites() {
                    let want = if s == y {
                        DistanceValue::Finite(0)
                    } else if blocked.binary_search(&s).is_ok() {
                        DistanceValue::Unreachable
                    } else {
                        let x: Vec<VertexId> =
                            blocked.iter().copied().filter(|&b| b != y).collect();
                        distance_avoiding(&g, y, s, &x).unwrap()
                    };
                    assert_eq!(
                        table.get(y, s).unwrap(),
                        want,
                        "tuple {t:?} q {q} y {y} s {s}"
                    );
                }
            }
        }
    }

    #[test]
    fn exhaustive_single_failure_sample() {
        let (g, o) = small();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut main = 0;
        for _ in 0..400 {
            let u = rng.gen_range(0..64);
            let v = rng.gen_range(0..64);
            let x = rng.gen_range(0..64);
            if x == u || x == v {
                continue;
            }
            let out = o.query_with(u, v, &[x], Strategy::Naive).unwrap();
            assert_eq!(
                out.distance,
                distance_avoiding(&g, u, v, &[x]).unwrap(),
                "{u} {v} {x}"
            );
            if matches!(out.route, Route::Main { .. }) {
                main += 1;
            }
        }
        assert!(main > 100, "main path used {main} times");
    }

    #[test]
    fn witness_is_a_real_decomposition() {
        let (g, o) = small();
        let tree = o.base().tree();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..150 {
            let (u, v, x) = (
                rng.gen_range(0..64),
                rng.gen_range(0..64),
                rng.gen_range(0..64),
            );
            if x == u || x == v || u == v {
                continue;
            }
            let out = o.query(u, v, &[x]).unwrap();
            let full = o.query_with(u, v, &[x], Strategy::Naive).unwrap();
            assert_eq!(out, full.distance);
            if let Route::Main {
                tuple,
                q,
                witness: Some((y, s)),
            } = full.route
            {
                let mut blocked: Vec<VertexId> = tuple
                    .iter()
                    .flat_map(|&p| tree.piece(p).vertices.clone())
                    .collect();
                blocked.retain(|&b| b != y);
                let a = distance_avoiding(&g, u, y, &[x]).unwrap();
                let b = if s == y {
                    DistanceValue::Finite(0)
                } else {
                    distance_avoiding(&g, y, s, &blocked).unwrap()
                };
                let local = tree.local_graph(&g, q);
                let c =
                    local.dijkstra(local.index_of(s).unwrap(), None)[local.index_of(v).unwrap()];
                assert_eq!(a.plus(b).plus(DistanceValue::from_raw(c)), full.distance);
            }
        }
    }

    #[test]
    fn tuple_keys_are_order_independent() {
        let (_, o) = small();
        for t in o.ext().keys() {
            let mut rev = t.clone();
            rev.reverse();
            assert_eq!(o.ext_for(&rev), o.ext.get(t));
        }
    }

    #[test]
    fn too_many_failures_and_bad_parameters() {
        let (_, o) = small();
        assert!(matches!(
            o.query(0, 5, &[1, 2]),
            Err(Error::TooManyFailures {
                given: 2,
                capacity: 1
            })
        ));
        let g = grid(4, 4, WeightMode::Unit).unwrap();
        assert!(matches!(
            TradeoffOracle::build_with(g.clone(), 5, 1, 4, 2),
            Err(Error::UnmarkedR(5))
        ));
        assert!(matches!(
            TradeoffOracle::build_with(g, 16, 2, 4, 2),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn zero_failures_agree_with_failure_oracle() {
        let g = grid(
            8,
            8,
            WeightMode::SeededRandom {
                max_weight: 5,
                seed: 8,
            },
        )
        .unwrap();
        let o = TradeoffOracle::build_with(g, 16, 0, 4, 2).unwrap();
        for u in (0..64).step_by(7) {
            for v in 0..64 {
                assert_eq!(
                    o.query(u, v, &[]).unwrap(),
                    o.base().query(u, v, &[]).unwrap()
                );
            }
        }
    }
}
