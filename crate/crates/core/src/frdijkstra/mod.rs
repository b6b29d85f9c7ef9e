//! Dijkstra over a union of dense distance graphs and raw piece subgraphs.
//!
//! A vertex shared by several members is a single search node. Vertices in
//! the forbidden set may be reached and settled but never relax their
//! outgoing edges; this is how failed or deleted vertices are modelled.

pub mod assembly;
pub mod cone;
#[cfg(feature = "monge")]
pub mod monge;

use std::borrow::Cow;
use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::sync::OnceLock;

use crate::ddg::DenseDistanceGraph;
use crate::error::{Error, Result};
use crate::graph::{DistanceValue, VertexId, INF};
use crate::local::LocalGraph;

/// How dense members relax their rows.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Strategy {
    /// Relax the full row of every settled vertex immediately.
    #[default]
    Naive,
    /// Defer rows and merge them in batches with column-minima searches on
    /// verified Monge blocks.
    Monge,
}

impl Strategy {
    pub fn available(self) -> bool {
        match self {
            Strategy::Naive => true,
            Strategy::Monge => cfg!(feature = "monge"),
        }
    }
}

impl std::str::FromStr for Strategy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "naive" => Ok(Strategy::Naive),
            "monge" => Ok(Strategy::Monge),
            _ => Err(Error::InvalidParameter(format!("unknown strategy {s:?}"))),
        }
    }
}

/// One summarised piece inside a union.
#[derive(Clone, Debug)]
pub enum Member<'a> {
    Dense(Cow<'a, DenseDistanceGraph>),
    Raw(Cow<'a, LocalGraph>),
}

impl Member<'_> {
    pub fn vertices(&self) -> &[VertexId] {
        match self {
            Member::Dense(d) => d.vertices(),
            Member::Raw(r) => r.vertices(),
        }
    }

    pub fn as_dense(&self) -> Option<&DenseDistanceGraph> {
        match self {
            Member::Dense(d) => Some(d),
            Member::Raw(_) => None,
        }
    }
}

struct Index {
    nodes: Vec<VertexId>,
    /// Per member, local index -> node.
    node_of: Vec<Vec<u32>>,
    /// CSR: node -> (member, local index).
    occ_offsets: Vec<u32>,
    occ: Vec<(u32, u32)>,
}

/// A union of members searched as one graph.
#[derive(Debug, Default)]
pub struct DdgUnion<'a> {
    members: Vec<Member<'a>>,
    forbidden: Vec<VertexId>,
    index: OnceLock<Index>,
}

impl std::fmt::Debug for Index {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Index")
            .field("nodes", &self.nodes.len())
            .finish()
    }
}

/// Instrumentation of one search.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub settled: usize,
    pub relaxations: usize,
    pub union_vertices: usize,
    pub member_vertices: usize,
}

/// Labels produced by a search.
#[derive(Clone, Debug)]
pub struct SearchResult {
    nodes: Vec<VertexId>,
    dist: Vec<u64>,
    pub stats: SearchStats,
}

impl SearchResult {
    pub fn get(&self, v: VertexId) -> Option<DistanceValue> {
        let i = self.nodes.binary_search(&v).ok()?;
        Some(DistanceValue::from_raw(self.dist[i]))
    }

    /// Raw label of `v`, [`INF`] when unreached or absent.
    pub fn raw(&self, v: VertexId) -> u64 {
        self.nodes.binary_search(&v).map_or(INF, |i| self.dist[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (VertexId, DistanceValue)> + '_ {
        self.nodes
            .iter()
            .zip(&self.dist)
            .map(|(&v, &d)| (v, DistanceValue::from_raw(d)))
    }
}

impl<'a> DdgUnion<'a> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, m: Member<'a>) {
        self.members.push(m);
        self.index = OnceLock::new();
    }

    pub fn push_dense(&mut self, d: &'a DenseDistanceGraph) {
        self.push(Member::Dense(Cow::Borrowed(d)));
    }

    pub fn push_dense_owned(&mut self, d: DenseDistanceGraph) {
        self.push(Member::Dense(Cow::Owned(d)));
    }

    pub fn push_raw(&mut self, g: &'a LocalGraph) {
        self.push(Member::Raw(Cow::Borrowed(g)));
    }

    pub fn push_raw_owned(&mut self, g: LocalGraph) {
        self.push(Member::Raw(Cow::Owned(g)));
    }

    pub fn members(&self) -> &[Member<'a>] {
        &self.members
    }

    pub fn set_forbidden(&mut self, mut forbidden: Vec<VertexId>) {
        forbidden.sort_unstable();
        forbidden.dedup();
        self.forbidden = forbidden;
    }

    pub fn forbidden(&self) -> &[VertexId] {
        &self.forbidden
    }

    /// Σ member vertex counts (a vertex counts once per member).
    pub fn member_vertex_total(&self) -> usize {
        self.members.iter().map(|m| m.vertices().len()).sum()
    }

    /// Σ vertex counts of the dense members only.
    pub fn dense_vertex_total(&self) -> usize {
        self.members
            .iter()
            .filter_map(Member::as_dense)
            .map(DenseDistanceGraph::len)
            .sum()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.index().nodes.binary_search(&v).is_ok()
    }

    /// Distinct vertices of the union.
    pub fn vertices(&self) -> &[VertexId] {
        &self.index().nodes
    }

    fn index(&self) -> &Index {
        self.index.get_or_init(|| {
            let mut nodes: Vec<VertexId> = self
                .members
                .iter()
                .flat_map(|m| m.vertices().iter().copied())
                .collect();
            nodes.sort_unstable();
            nodes.dedup();
            let node_of: Vec<Vec<u32>> = self
                .members
                .iter()
                .map(|m| {
                    m.vertices()
                        .iter()
                        .map(|v| nodes.binary_search(v).unwrap() as u32)
                        .collect()
                })
                .collect();
            let mut occ_offsets = vec![0u32; nodes.len() + 1];
            for map in &node_of {
                for &x in map {
                    occ_offsets[x as usize + 1] += 1;
                }
            }
            for i in 0..nodes.len() {
                occ_offsets[i + 1] += occ_offsets[i];
            }
            let mut fill = occ_offsets.clone();
            let mut occ = vec![(0, 0); occ_offsets[nodes.len()] as usize];
            for (m, map) in node_of.iter().enumerate() {
                for (i, &x) in map.iter().enumerate() {
                    let s = &mut fill[x as usize];
                    occ[*s as usize] = (m as u32, i as u32);
                    *s += 1;
                }
            }
            Index {
                nodes,
                node_of,
                occ_offsets,
                occ,
            }
        })
    }
}

/// Exact multi-source distances in the union.
pub fn multi_dijkstra(
    union: &DdgUnion<'_>,
    sources: &[(VertexId, DistanceValue)],
    strategy: Strategy,
) -> Result<SearchResult> {
    multi_dijkstra_until(union, sources, strategy, None)
}

/// As [`multi_dijkstra`], stopping as soon as `target` is settled. Only the
/// target's label is guaranteed final in that case.
pub fn multi_dijkstra_until(
    union: &DdgUnion<'_>,
    sources: &[(VertexId, DistanceValue)],
    strategy: Strategy,
    target: Option<VertexId>,
) -> Result<SearchResult> {
    let idx = union.index();
    let n = idx.nodes.len();
    let mut dist = vec![INF; n];
    let mut forbidden = vec![false; n];
    for x in &union.forbidden {
        if let Ok(i) = idx.nodes.binary_search(x) {
            forbidden[i] = true;
        }
    }
    let target = target.and_then(|t| idx.nodes.binary_search(&t).ok());
    let mut stats = SearchStats {
        union_vertices: n,
        member_vertices: union.member_vertex_total(),
        ..Default::default()
    };
    let mut init = Vec::with_capacity(sources.len());
    for &(s, d) in sources {
        let i = idx
            .nodes
            .binary_search(&s)
            .map_err(|_| Error::SourceNotInUnion(s))?;
        if let DistanceValue::Finite(d) = d {
            if d < dist[i] {
                dist[i] = d;
            }
            init.push(i);
        }
    }
    match strategy {
        Strategy::Naive => naive(union, idx, &mut dist, &forbidden, &init, target, &mut stats),
        Strategy::Monge => {
            #[cfg(feature = "monge")]
            monge::search(union, idx, &mut dist, &forbidden, &init, target, &mut stats);
            #[cfg(not(feature = "monge"))]
            return Err(Error::StrategyUnavailable);
        }
    }
    Ok(SearchResult {
        nodes: idx.nodes.clone(),
        dist,
        stats,
    })
}

fn naive(
    union: &DdgUnion<'_>,
    idx: &Index,
    dist: &mut [u64],
    forbidden: &[bool],
    init: &[usize],
    target: Option<usize>,
    stats: &mut SearchStats,
) {
    let n = idx.nodes.len();
    let mut done = vec![false; n];
    let mut heap: BinaryHeap<Reverse<(u64, u32)>> =
        init.iter().map(|&i| Reverse((dist[i], i as u32))).collect();
    while let Some(Reverse((d, x))) = heap.pop() {
        let x = x as usize;
        if done[x] || d > dist[x] {
            continue;
        }
        done[x] = true;
        stats.settled += 1;
        if Some(x) == target {
            break;
        }
        if forbidden[x] {
            continue;
        }
        let (lo, hi) = (idx.occ_offsets[x] as usize, idx.occ_offsets[x + 1] as usize);
        for &(m, i) in &idx.occ[lo..hi] {
            let map = &idx.node_of[m as usize];
            let mut relax = |j: usize, w: u64| {
                stats.relaxations += 1;
                let y = map[j] as usize;
                let nd = d + w;
                if nd < dist[y] {
                    dist[y] = nd;
                    heap.push(Reverse((nd, y as u32)));
                }
            };
            match &union.members[m as usize] {
                Member::Dense(ddg) => {
                    for (j, &w) in ddg.row(i as usize).iter().enumerate() {
                        if w != INF && j != i as usize {
                            relax(j, w);
                        }
                    }
                }
                Member::Raw(g) => {
                    for (j, w) in g.out(i as usize) {
                        relax(j, w);
                    }
                }
            }
        }
    }
}
