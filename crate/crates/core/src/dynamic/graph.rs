//! Mutable embedded graph with stable vertex and arc ids.

use crate::error::{Error, Result};
use crate::graph::{Arc, ArcId, EmbeddedPlanarGraph, VertexId};

/// Arcs keep their id for life; deleted arcs leave a hole. Deleted vertices
/// keep their id and lose their arcs at the next compaction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DynGraph {
    arcs: Vec<Option<Arc>>,
    rotation: Vec<Vec<ArcId>>,
    deleted: Vec<bool>,
    total_weight: u64,
}

impl DynGraph {
    pub fn from_graph(g: &EmbeddedPlanarGraph) -> Self {
        Self {
            arcs: g.arcs().iter().copied().map(Some).collect(),
            rotation: g.rotations().to_vec(),
            deleted: vec![false; g.vertex_count()],
            total_weight: g.total_weight(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.rotation.len()
    }

    /// Number of arc ids ever issued.
    pub fn arc_slots(&self) -> usize {
        self.arcs.len()
    }

    pub fn live_arcs(&self) -> impl Iterator<Item = (ArcId, Arc)> + '_ {
        self.arcs
            .iter()
            .enumerate()
            .filter_map(|(i, a)| a.map(|a| (i as ArcId, a)))
    }

    pub fn arc(&self, a: ArcId) -> Result<Arc> {
        self.arcs
            .get(a as usize)
            .copied()
            .flatten()
            .ok_or(Error::InvalidArc(a))
    }

    pub fn rotation(&self, v: VertexId) -> &[ArcId] {
        &self.rotation[v as usize]
    }

    pub fn total_weight(&self) -> u64 {
        self.total_weight
    }

    pub fn is_deleted(&self, v: VertexId) -> bool {
        self.deleted[v as usize]
    }

    pub fn check_vertex(&self, v: VertexId) -> Result<()> {
        if (v as usize) < self.vertex_count() {
            Ok(())
        } else {
            Err(Error::InvalidVertex(v))
        }
    }

    pub fn check_live(&self, v: VertexId) -> Result<()> {
        self.check_vertex(v)?;
        if self.deleted[v as usize] {
            return Err(Error::EndpointDeleted(v));
        }
        Ok(())
    }

    pub fn set_weight(&mut self, a: ArcId, w: u64) -> Result<()> {
        let old = self.arc(a)?.weight;
        let total = (self.total_weight - old)
            .checked_add(w)
            .filter(|&t| t < 1 << 63);
        self.total_weight = total.ok_or(Error::WeightOverflow)?;
        self.arcs[a as usize].as_mut().unwrap().weight = w;
        Ok(())
    }

    pub fn add_vertex(&mut self) -> VertexId {
        self.rotation.push(Vec::new());
        self.deleted.push(false);
        (self.rotation.len() - 1) as VertexId
    }

    /// Insert `tail -> head` at the given rotation positions. The graph is
    /// unchanged when the result would not be a valid planar embedding.
    pub fn insert_arc(
        &mut self,
        tail: VertexId,
        head: VertexId,
        weight: u64,
        tail_pos: usize,
        head_pos: usize,
    ) -> Result<ArcId> {
        self.check_live(tail)?;
        self.check_live(head)?;
        if tail_pos > self.rotation[tail as usize].len()
            || head_pos > self.rotation[head as usize].len()
        {
            return Err(Error::Planarity("rotation position out of range".into()));
        }
        let total = self
            .total_weight
            .checked_add(weight)
            .filter(|&t| t < 1 << 63)
            .ok_or(Error::WeightOverflow)?;
        let id = self.arcs.len() as ArcId;
        self.arcs.push(Some(Arc { tail, head, weight }));
        self.rotation[tail as usize].insert(tail_pos, id);
        self.rotation[head as usize].insert(head_pos, id);
        if let Err(e) = self.compact() {
            self.rotation[tail as usize].remove(tail_pos);
            self.rotation[head as usize].remove(head_pos);
            self.arcs.pop();
            return Err(match e {
                Error::InvalidEmbedding(m) => Error::Planarity(m),
                e => e,
            });
        }
        self.total_weight = total;
        Ok(id)
    }

    pub fn remove_arc(&mut self, a: ArcId) -> Result<Arc> {
        let arc = self.arc(a)?;
        self.arcs[a as usize] = None;
        self.rotation[arc.tail as usize].retain(|&x| x != a);
        self.rotation[arc.head as usize].retain(|&x| x != a);
        self.total_weight -= arc.weight;
        Ok(arc)
    }

    /// Mark `v` deleted; its arcs stay until [`Self::strip_deleted`].
    pub fn mark_deleted(&mut self, v: VertexId) {
        self.deleted[v as usize] = true;
    }

    /// Remove every arc incident to a deleted vertex. Returns the removed
    /// arc ids.
    pub fn strip_deleted(&mut self) -> Vec<ArcId> {
        let doomed: Vec<ArcId> = self
            .live_arcs()
            .filter(|(_, a)| self.deleted[a.tail as usize] || self.deleted[a.head as usize])
            .map(|(i, _)| i)
            .collect();
        for &a in &doomed {
            self.remove_arc(a).unwrap();
        }
        doomed
    }

    /// The live graph with arcs renumbered densely, and for each dense id
    /// the stable id.
    pub fn compact(&self) -> Result<(EmbeddedPlanarGraph, Vec<ArcId>)> {
        let mut dense = vec![u32::MAX; self.arcs.len()];
        let mut stable = Vec::new();
        let mut arcs = Vec::new();
        for (i, a) in self.live_arcs() {
            dense[i as usize] = stable.len() as ArcId;
            stable.push(i);
            arcs.push(a);
        }
        let rotation = self
            .rotation
            .iter()
            .map(|r| r.iter().map(|&a| dense[a as usize]).collect())
            .collect();
        Ok((
            EmbeddedPlanarGraph::new(self.vertex_count(), arcs, rotation)?,
            stable,
        ))
    }
}
