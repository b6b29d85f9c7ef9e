//! Face tracing and Euler-formula validation for rotation systems.
//!
//! Every arc is one embedded edge with two darts: dart `2a` leaves the tail
//! of arc `a`, dart `2a + 1` leaves its head. The face to the left of a
//! dart entering `y` continues with the arc following it in `rotation[y]`.

use crate::error::{Error, Result};

pub(crate) type Dart = u32;

#[inline]
pub(crate) fn dart_origin(endpoints: &[(u32, u32)], d: Dart) -> u32 {
    let (t, h) = endpoints[(d >> 1) as usize];
    if d & 1 == 0 {
        t
    } else {
        h
    }
}

/// Dart successor table for a rotation system over the given arcs.
pub(crate) struct FaceWalker {
    next: Vec<Dart>,
}

impl FaceWalker {
    /// `rotation` must mention every arc exactly once at each endpoint;
    /// callers that cannot guarantee it use [`validate`] first.
    pub(crate) fn new(endpoints: &[(u32, u32)], rotation: &[Vec<u32>]) -> Self {
        let m = endpoints.len();
        let mut next = vec![0; 2 * m];
        for (v, rot) in rotation.iter().enumerate() {
            let v = v as u32;
            let deg = rot.len();
            for (i, &a) in rot.iter().enumerate() {
                // Dart entering v along arc a is the twin of the dart leaving v.
                let leaving = leaving_dart(endpoints, a, v);
                let b = rot[(i + 1) % deg];
                next[(leaving ^ 1) as usize] = leaving_dart(endpoints, b, v);
            }
        }
        Self { next }
    }

    /// Trace all faces; returns each face as its dart cycle.
    pub(crate) fn faces(&self) -> Vec<Vec<Dart>> {
        let mut seen = vec![false; self.next.len()];
        let mut faces = Vec::new();
        for start in 0..self.next.len() {
            if seen[start] {
                continue;
            }
            let mut face = Vec::new();
            let mut d = start as Dart;
            while !seen[d as usize] {
                seen[d as usize] = true;
                face.push(d);
                d = self.next[d as usize];
            }
            faces.push(face);
        }
        faces
    }
}

#[inline]
pub(crate) fn leaving_dart(endpoints: &[(u32, u32)], arc: u32, v: u32) -> Dart {
    if endpoints[arc as usize].0 == v {
        2 * arc
    } else {
        2 * arc + 1
    }
}

/// Check that `rotation` is a rotation system for `endpoints` and that it
/// describes a planar embedding. Returns the number of faces (one per
/// isolated vertex included).
pub(crate) fn validate(n: usize, endpoints: &[(u32, u32)], rotation: &[Vec<u32>]) -> Result<usize> {
    let m = endpoints.len();
    let mut at_tail = vec![false; m];
    let mut at_head = vec![false; m];
    for (v, rot) in rotation.iter().enumerate() {
        for &a in rot {
            let Some(&(t, h)) = endpoints.get(a as usize) else {
                return Err(Error::InvalidEmbedding(format!(
                    "rotation of vertex {v} references unknown arc {a}"
                )));
            };
            let slot = if t as usize == v {
                &mut at_tail[a as usize]
            } else if h as usize == v {
                &mut at_head[a as usize]
            } else {
                return Err(Error::InvalidEmbedding(format!(
                    "arc {a} is not incident to vertex {v}"
                )));
            };
            if *slot {
                return Err(Error::InvalidEmbedding(format!(
                    "arc {a} listed twice around vertex {v}"
                )));
            }
            *slot = true;
        }
    }
    for a in 0..m {
        if !at_tail[a] || !at_head[a] {
            return Err(Error::InvalidEmbedding(format!(
                "arc {a} missing from the rotation of vertex {}",
                if at_tail[a] {
                    endpoints[a].1
                } else {
                    endpoints[a].0
                }
            )));
        }
    }

    let faces = FaceWalker::new(endpoints, rotation).faces();

    // Per-component Euler check.
    let mut dsu = Dsu::new(n);
    for &(t, h) in endpoints {
        dsu.union(t, h);
    }
    let mut verts = vec![0i64; n];
    let mut edges = vec![0i64; n];
    let mut fcount = vec![0i64; n];
    for v in 0..n as u32 {
        verts[dsu.find(v) as usize] += 1;
    }
    for &(t, _) in endpoints {
        edges[dsu.find(t) as usize] += 1;
    }
    for f in &faces {
        let v = dart_origin(endpoints, f[0]);
        fcount[dsu.find(v) as usize] += 1;
    }
    let mut total_faces = faces.len();
    for v in 0..n as u32 {
        if dsu.find(v) != v {
            continue;
        }
        let root = v as usize;
        if edges[root] == 0 {
            total_faces += 1;
            continue;
        }
        let chi = verts[root] - edges[root] + fcount[root];
        if chi != 2 {
            return Err(Error::InvalidEmbedding(format!(
                "component of vertex {v} has Euler characteristic {chi} \
                 ({} vertices, {} edges, {} faces)",
                verts[root], edges[root], fcount[root]
            )));
        }
    }
    Ok(total_faces)
}

/// Union-find with path halving and union by size.
#[derive(Clone, Debug)]
pub(crate) struct Dsu {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl Dsu {
    pub(crate) fn new(n: usize) -> Self {
        Self {
            parent: (0..n as u32).collect(),
            size: vec![1; n],
        }
    }

    pub(crate) fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let p = self.parent[x as usize];
            self.parent[x as usize] = self.parent[p as usize];
            x = self.parent[x as usize];
        }
        x
    }

    pub(crate) fn union(&mut self, a: u32, b: u32) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.size[a as usize] < self.size[b as usize] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b as usize] = a;
        self.size[a as usize] += self.size[b as usize];
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_arc_has_one_face() {
        let ends = [(0, 1)];
        let rot = vec![vec![0], vec![0]];
        assert_eq!(validate(2, &ends, &rot).unwrap(), 1);
    }

    #[test]
    fn antiparallel_pair_bounds_a_digon() {
        let ends = [(0, 1), (1, 0)];
        let rot = vec![vec![0, 1], vec![0, 1]];
        assert_eq!(validate(2, &ends, &rot).unwrap(), 2);
    }

    #[test]
    fn k4_with_a_twisted_rotation_is_rejected() {
        // K4 as undirected arcs i<j.
        let ends = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
        let good = vec![vec![0, 1, 2], vec![0, 4, 3], vec![1, 3, 5], vec![2, 5, 4]];
        assert_eq!(validate(4, &ends, &good).unwrap(), 4);
        let bad = vec![vec![0, 2, 1], vec![0, 4, 3], vec![1, 3, 5], vec![2, 5, 4]];
        assert!(validate(4, &ends, &bad).is_err());
    }

    #[test]
    fn isolated_vertices_count_as_faces() {
        assert_eq!(validate(3, &[], &[vec![], vec![], vec![]]).unwrap(), 3);
    }
}
