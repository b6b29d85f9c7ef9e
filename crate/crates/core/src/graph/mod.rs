//! Embedded directed planar graphs, instance generators and the exact
//! baseline shortest-path routines every oracle is checked against.

mod baseline;
mod distance;
pub(crate) mod embedding;
pub mod generate;
pub mod pgr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use baseline::{dijkstra_raw, distance_avoiding, sssp};
pub use distance::{DistanceValue, INF};

pub type VertexId = u32;
pub type ArcId = u32;

/// A directed arc with a nonnegative integer weight.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Arc {
    pub tail: VertexId,
    pub head: VertexId,
    pub weight: u64,
}

/// Directed weighted graph together with a combinatorial embedding.
///
/// `rotation[v]` lists every arc incident to `v` (incoming and outgoing) in
/// clockwise order. The embedding is validated on construction with Euler's
/// formula, so an instance of this type is always planar.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmbeddedPlanarGraph {
    vertex_count: usize,
    arcs: Vec<Arc>,
    rotation: Vec<Vec<ArcId>>,
    out_offsets: Vec<u32>,
    out_arcs: Vec<ArcId>,
    face_count: usize,
    total_weight: u64,
}

impl EmbeddedPlanarGraph {
    /// Validate and assemble a graph. Arc indices are positions in `arcs`.
    pub fn new(vertex_count: usize, arcs: Vec<Arc>, rotation: Vec<Vec<ArcId>>) -> Result<Self> {
        if vertex_count > u32::MAX as usize / 2 || arcs.len() > u32::MAX as usize / 2 {
            return Err(Error::SizeOverflow(format!(
                "{vertex_count} vertices, {} arcs",
                arcs.len()
            )));
        }
        if rotation.len() != vertex_count {
            return Err(Error::InvalidEmbedding(format!(
                "expected {vertex_count} rotation lists, found {}",
                rotation.len()
            )));
        }
        let mut total: u64 = 0;
        let mut seen_pairs = std::collections::HashSet::with_capacity(arcs.len());
        for (i, a) in arcs.iter().enumerate() {
            if a.tail as usize >= vertex_count || a.head as usize >= vertex_count {
                return Err(Error::InvalidEmbedding(format!(
                    "arc {i} references a vertex outside 0..{vertex_count}"
                )));
            }
            if a.tail == a.head {
                return Err(Error::InvalidEmbedding(format!("arc {i} is a self-loop")));
            }
            if !seen_pairs.insert((a.tail, a.head)) {
                return Err(Error::InvalidEmbedding(format!(
                    "arc {i} duplicates {} -> {}",
                    a.tail, a.head
                )));
            }
            total = total.checked_add(a.weight).ok_or(Error::WeightOverflow)?;
        }
        if total >= 1 << 63 {
            return Err(Error::WeightOverflow);
        }
        let endpoints: Vec<(u32, u32)> = arcs.iter().map(|a| (a.tail, a.head)).collect();
        let face_count = embedding::validate(vertex_count, &endpoints, &rotation)?;

        let mut out_offsets = vec![0u32; vertex_count + 1];
        for a in &arcs {
            out_offsets[a.tail as usize + 1] += 1;
        }
        for v in 0..vertex_count {
            out_offsets[v + 1] += out_offsets[v];
        }
        let mut fill = out_offsets.clone();
        let mut out_arcs = vec![0; arcs.len()];
        for (i, a) in arcs.iter().enumerate() {
            let slot = &mut fill[a.tail as usize];
            out_arcs[*slot as usize] = i as ArcId;
            *slot += 1;
        }
        Ok(Self {
            vertex_count,
            arcs,
            rotation,
            out_offsets,
            out_arcs,
            face_count,
            total_weight: total,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn arc(&self, id: ArcId) -> Arc {
        self.arcs[id as usize]
    }

    pub fn rotation(&self, v: VertexId) -> &[ArcId] {
        &self.rotation[v as usize]
    }

    pub fn rotations(&self) -> &[Vec<ArcId>] {
        &self.rotation
    }

    /// Number of faces, counting the outer face once per connected component
    /// and one face for every isolated vertex.
    pub fn face_count(&self) -> usize {
        self.face_count
    }

    /// Sum of all arc weights.
    pub fn total_weight(&self) -> u64 {
        self.total_weight
    }

    /// Outgoing arcs of `v`.
    pub fn out_arcs(&self, v: VertexId) -> impl Iterator<Item = (ArcId, &Arc)> + '_ {
        let lo = self.out_offsets[v as usize] as usize;
        let hi = self.out_offsets[v as usize + 1] as usize;
        self.out_arcs[lo..hi]
            .iter()
            .map(move |&id| (id, &self.arcs[id as usize]))
    }

    /// Number of distinct neighbours (ignoring direction).
    pub fn degree(&self, v: VertexId) -> usize {
        self.rotation[v as usize].len()
    }

    pub fn check_vertex(&self, v: VertexId) -> Result<()> {
        if (v as usize) < self.vertex_count {
            Ok(())
        } else {
            Err(Error::InvalidVertex(v))
        }
    }

    /// Weight of the lightest arc `tail -> head`, if any.
    pub fn arc_between(&self, tail: VertexId, head: VertexId) -> Option<u64> {
        self.out_arcs(tail)
            .filter(|(_, a)| a.head == head)
            .map(|(_, a)| a.weight)
            .min()
    }
}
