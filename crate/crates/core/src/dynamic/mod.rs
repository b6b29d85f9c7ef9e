//! Fully dynamic oracle over a single-level r-division.
//!
//! Each piece keeps its raw subgraph and its strictly internal DDG. Updates
//! touch only the pieces they change; deleted boundary vertices stay in the
//! structure as forbidden tails. Everything is rebuilt from scratch after
//! `⌈√r⌉` operations.

pub mod graph;
pub mod script;

use std::collections::BTreeSet;

use crate::ddg::{strict_internal_from_local, DenseDistanceGraph, ShiftConstant};
use crate::decomposition::{DecompositionTree, NodeId, DEFAULT_BASE, DEFAULT_LEAF_SIZE};
use crate::error::{Error, Result};
use crate::frdijkstra::{multi_dijkstra_until, DdgUnion, SearchStats, Strategy};
use crate::graph::{ArcId, DistanceValue, EmbeddedPlanarGraph, VertexId};
use crate::local::LocalGraph;
use crate::par;
pub use graph::DynGraph;

const NO_PIECE: u32 = u32::MAX;

/// One update.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Op {
    SetWeight {
        arc: ArcId,
        weight: u64,
    },
    /// Insert `tail -> head`, placed at the given indices of the two
    /// rotation lists.
    InsertEdge {
        tail: VertexId,
        head: VertexId,
        weight: u64,
        tail_pos: usize,
        head_pos: usize,
    },
    DeleteEdge {
        arc: ArcId,
    },
    InsertVertex,
    DeleteVertex {
        v: VertexId,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct DynPiece {
    source: NodeId,
    arcs: BTreeSet<ArcId>,
    vertices: BTreeSet<VertexId>,
    boundary: Vec<VertexId>,
    local: LocalGraph,
    ddg: DenseDistanceGraph,
}

/// The dynamic oracle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DynamicOracle {
    graph: DynGraph,
    r: usize,
    leaf_size: usize,
    pieces: Vec<DynPiece>,
    piece_of_arc: Vec<u32>,
    pieces_of: Vec<Vec<u32>>,
    shift: ShiftConstant,
    deleted_boundary: BTreeSet<VertexId>,
    ops_since_rebuild: usize,
    rebuild_threshold: usize,
    rebuilds: usize,
}

impl DynamicOracle {
    pub fn new(g: &EmbeddedPlanarGraph, r: usize) -> Result<Self> {
        if r < 2 {
            return Err(Error::InvalidParameter("r must be at least 2".into()));
        }
        let mut o = Self {
            graph: DynGraph::from_graph(g),
            r,
            leaf_size: (r / 2).clamp(2, DEFAULT_LEAF_SIZE),
            pieces: Vec::new(),
            piece_of_arc: Vec::new(),
            pieces_of: Vec::new(),
            shift: ShiftConstant::for_graph(g),
            deleted_boundary: BTreeSet::new(),
            ops_since_rebuild: 0,
            rebuild_threshold: (r as f64).sqrt().ceil() as usize,
            rebuilds: 0,
        };
        o.rebuild()?;
        o.rebuilds = 0;
        Ok(o)
    }

    /// Recompute the r-division and every piece from the current graph.
    pub fn rebuild(&mut self) -> Result<()> {
        self.graph.strip_deleted();
        let (g, stable) = self.graph.compact()?;
        let tree = DecompositionTree::build(&g, self.leaf_size, DEFAULT_BASE)?;
        let nodes = tree.antichain_at(self.r);
        self.piece_of_arc = vec![NO_PIECE; self.graph.arc_slots()];
        self.pieces_of = vec![Vec::new(); self.graph.vertex_count()];
        let mut pieces = Vec::with_capacity(nodes.len());
        for (i, &p) in nodes.iter().enumerate() {
            let arcs: BTreeSet<ArcId> = tree
                .piece_arcs(p)
                .into_iter()
                .map(|a| stable[a as usize])
                .collect();
            for &a in &arcs {
                self.piece_of_arc[a as usize] = i as u32;
            }
            let vertices: BTreeSet<VertexId> = tree
                .piece(p)
                .vertices
                .iter()
                .copied()
                .filter(|&v| !self.graph.is_deleted(v))
                .collect();
            for &v in &vertices {
                self.pieces_of[v as usize].push(i as u32);
            }
            pieces.push(DynPiece {
                source: p,
                arcs,
                vertices,
                boundary: Vec::new(),
                local: LocalGraph::default(),
                ddg: DenseDistanceGraph::empty(crate::ddg::DdgVariant::StrictInternal, vec![p]),
            });
        }
        self.pieces = pieces;
        let fresh = par::map_range(self.pieces.len(), |i| self.summarise(i));
        for (piece, (boundary, local, ddg)) in self.pieces.iter_mut().zip(fresh) {
            piece.boundary = boundary;
            piece.local = local;
            piece.ddg = ddg;
        }
        self.shift.set_total_weight(self.graph.total_weight());
        self.deleted_boundary.clear();
        self.ops_since_rebuild = 0;
        self.rebuilds += 1;
        Ok(())
    }

    fn summarise(&self, i: usize) -> (Vec<VertexId>, LocalGraph, DenseDistanceGraph) {
        let p = &self.pieces[i];
        let boundary: Vec<VertexId> = p
            .vertices
            .iter()
            .copied()
            .filter(|&v| self.pieces_of[v as usize].len() >= 2)
            .collect();
        let triples = p
            .arcs
            .iter()
            .map(|&a| {
                let a = self.graph.arc(a).expect("piece arcs are live");
                (a.tail, a.head, a.weight)
            })
            .collect();
        let local = LocalGraph::from_triples(triples, p.vertices.iter().copied());
        let ddg = strict_internal_from_local(&local, &boundary, None, vec![p.source], None);
        (boundary, local, ddg)
    }

    fn refresh(&mut self, i: u32) {
        let (boundary, local, ddg) = self.summarise(i as usize);
        let p = &mut self.pieces[i as usize];
        p.boundary = boundary;
        p.local = local;
        p.ddg = ddg;
    }

    /// Add `v` to piece `i`; returns the pieces whose boundary changed.
    fn join(&mut self, v: VertexId, i: u32) -> Vec<u32> {
        if !self.pieces[i as usize].vertices.insert(v) {
            return Vec::new();
        }
        let list = &mut self.pieces_of[v as usize];
        list.push(i);
        list.sort_unstable();
        if list.len() == 2 {
            list.clone()
        } else {
            vec![i]
        }
    }

    /// Apply one update. Returns the new id for vertex and edge insertions.
    /// A failed update leaves the oracle unchanged.
    pub fn apply(&mut self, op: Op) -> Result<Option<u32>> {
        let out = match op {
            Op::SetWeight { arc, weight } => {
                self.graph.set_weight(arc, weight)?;
                self.refresh(self.piece_of_arc[arc as usize]);
                None
            }
            Op::InsertEdge {
                tail,
                head,
                weight,
                tail_pos,
                head_pos,
            } => {
                let id = self
                    .graph
                    .insert_arc(tail, head, weight, tail_pos, head_pos)?;
                let (pt, ph) = (
                    &self.pieces_of[tail as usize],
                    &self.pieces_of[head as usize],
                );
                let target = pt
                    .iter()
                    .find(|p| ph.contains(p))
                    .or(pt.first())
                    .or(ph.first())
                    .copied()
                    .unwrap_or(0);
                self.piece_of_arc.push(target);
                self.pieces[target as usize].arcs.insert(id);
                let mut dirty: BTreeSet<u32> = BTreeSet::from([target]);
                dirty.extend(self.join(tail, target));
                dirty.extend(self.join(head, target));
                for p in dirty {
                    self.refresh(p);
                }
                Some(id)
            }
            Op::DeleteEdge { arc } => {
                self.graph.remove_arc(arc)?;
                let p = self.piece_of_arc[arc as usize];
                self.piece_of_arc[arc as usize] = NO_PIECE;
                self.pieces[p as usize].arcs.remove(&arc);
                self.refresh(p);
                None
            }
            Op::InsertVertex => {
                let v = self.graph.add_vertex();
                self.pieces_of.push(Vec::new());
                Some(v)
            }
            Op::DeleteVertex { v } => {
                self.graph.check_live(v)?;
                self.graph.mark_deleted(v);
                let held = self.pieces_of[v as usize].clone();
                match held.as_slice() {
                    [] => {}
                    &[p] => {
                        let incident: Vec<ArcId> = self.pieces[p as usize]
                            .arcs
                            .iter()
                            .copied()
                            .filter(|&a| {
                                let a = self.graph.arc(a).unwrap();
                                a.tail == v || a.head == v
                            })
                            .collect();
                        for a in incident {
                            self.graph.remove_arc(a)?;
                            self.piece_of_arc[a as usize] = NO_PIECE;
                            self.pieces[p as usize].arcs.remove(&a);
                        }
                        self.pieces[p as usize].vertices.remove(&v);
                        self.pieces_of[v as usize].clear();
                        self.refresh(p);
                    }
                    _ => {
                        self.deleted_boundary.insert(v);
                    }
                }
                None
            }
        };
        self.shift.set_total_weight(self.graph.total_weight());
        self.ops_since_rebuild += 1;
        if self.ops_since_rebuild >= self.rebuild_threshold {
            self.rebuild()?;
        }
        Ok(out)
    }

    pub fn query(&self, u: VertexId, v: VertexId) -> Result<DistanceValue> {
        Ok(self.query_with(u, v, Strategy::default())?.0)
    }

    pub fn query_with(
        &self,
        u: VertexId,
        v: VertexId,
        strategy: Strategy,
    ) -> Result<(DistanceValue, SearchStats)> {
        self.graph.check_live(u)?;
        self.graph.check_live(v)?;
        if u == v {
            return Ok((DistanceValue::Finite(0), SearchStats::default()));
        }
        let (Some(&pu), Some(&pv)) = (
            self.pieces_of[u as usize].first(),
            self.pieces_of[v as usize].first(),
        ) else {
            return Ok((DistanceValue::Unreachable, SearchStats::default()));
        };
        let mut union = DdgUnion::new();
        union.push_raw(&self.pieces[pu as usize].local);
        for p in &self.pieces {
            union.push_dense(&p.ddg);
        }
        if pv != pu {
            union.push_raw(&self.pieces[pv as usize].local);
        }
        union.set_forbidden(self.deleted_boundary.iter().copied().collect());
        let res =
            multi_dijkstra_until(&union, &[(u, DistanceValue::Finite(0))], strategy, Some(v))?;
        Ok((DistanceValue::from_raw(res.raw(v)), res.stats))
    }

    /// The current graph with deleted vertices isolated.
    pub fn snapshot(&self) -> Result<EmbeddedPlanarGraph> {
        let mut g = self.graph.clone();
        g.strip_deleted();
        Ok(g.compact()?.0)
    }

    /// An oracle built from scratch on the current graph.
    pub fn rebuilt(&self) -> Result<Self> {
        let mut o = self.clone();
        o.rebuild()?;
        o.rebuilds = 0;
        Ok(o)
    }

    pub fn graph(&self) -> &DynGraph {
        &self.graph
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn piece_count(&self) -> usize {
        self.pieces.len()
    }

    pub fn piece_vertex_count(&self, i: usize) -> usize {
        self.pieces[i].vertices.len()
    }

    pub fn piece_boundary(&self, i: usize) -> &[VertexId] {
        &self.pieces[i].boundary
    }

    pub fn piece_ddg(&self, i: usize) -> &DenseDistanceGraph {
        &self.pieces[i].ddg
    }

    pub fn pieces_of(&self, v: VertexId) -> &[u32] {
        &self.pieces_of[v as usize]
    }

    pub fn deleted_boundary(&self) -> &BTreeSet<VertexId> {
        &self.deleted_boundary
    }

    pub fn shift(&self) -> &ShiftConstant {
        &self.shift
    }

    pub fn ops_since_rebuild(&self) -> usize {
        self.ops_since_rebuild
    }

    pub fn rebuild_threshold(&self) -> usize {
        self.rebuild_threshold
    }

    /// Rebuilds triggered by updates since construction.
    pub fn rebuild_count(&self) -> usize {
        self.rebuilds
    }
}
