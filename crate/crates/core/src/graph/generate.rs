//! Seeded instance generators.

use std::collections::{HashMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Arc, ArcId, EmbeddedPlanarGraph, VertexId};
use crate::error::{Error, Result};

/// How generated arcs are weighted.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeightMode {
    Unit,
    /// Independent uniform weights in `1..=max_weight`.
    SeededRandom {
        max_weight: u64,
        seed: u64,
    },
}

struct Weights {
    rng: Option<(ChaCha8Rng, u64)>,
}

impl Weights {
    fn new(mode: WeightMode) -> Result<Self> {
        Ok(match mode {
            WeightMode::Unit => Self { rng: None },
            WeightMode::SeededRandom { max_weight, seed } => {
                if max_weight == 0 {
                    return Err(Error::InvalidParameter(
                        "max_weight must be at least 1".into(),
                    ));
                }
                Self {
                    rng: Some((ChaCha8Rng::seed_from_u64(seed), max_weight)),
                }
            }
        })
    }

    fn next(&mut self) -> u64 {
        match &mut self.rng {
            None => 1,
            Some((rng, max)) => rng.gen_range(1..=*max),
        }
    }
}

/// Build a graph from undirected edges and, per vertex, the clockwise cyclic
/// order of its neighbours. Each edge becomes two opposite arcs; around a
/// vertex the incoming arc from a neighbour precedes the outgoing one, so the
/// pair bounds a digon face.
pub fn from_undirected(
    n: usize,
    neighbour_order: &[Vec<VertexId>],
    mut weight: impl FnMut(VertexId, VertexId) -> u64,
) -> Result<EmbeddedPlanarGraph> {
    let mut arcs = Vec::new();
    let mut id_of: HashMap<(VertexId, VertexId), ArcId> = HashMap::new();
    for (v, nbrs) in neighbour_order.iter().enumerate() {
        for &w in nbrs {
            let v = v as VertexId;
            if v < w {
                id_of.insert((v, w), arcs.len() as ArcId);
                arcs.push(Arc {
                    tail: v,
                    head: w,
                    weight: weight(v, w),
                });
                id_of.insert((w, v), arcs.len() as ArcId);
                arcs.push(Arc {
                    tail: w,
                    head: v,
                    weight: weight(w, v),
                });
            }
        }
    }
    let mut rotation = Vec::with_capacity(n);
    for (v, nbrs) in neighbour_order.iter().enumerate() {
        let v = v as VertexId;
        let mut rot = Vec::with_capacity(2 * nbrs.len());
        for &w in nbrs {
            let inc = id_of.get(&(w, v));
            let out = id_of.get(&(v, w));
            match (inc, out) {
                (Some(&i), Some(&o)) => {
                    rot.push(i);
                    rot.push(o);
                }
                _ => {
                    return Err(Error::InvalidEmbedding(format!(
                        "neighbour lists of {v} and {w} are not symmetric"
                    )))
                }
            }
        }
        rotation.push(rot);
    }
    EmbeddedPlanarGraph::new(n, arcs, rotation)
}

/// `rows × cols` grid; vertex `(r, c)` has id `r * cols + c`.
pub fn grid(rows: usize, cols: usize, mode: WeightMode) -> Result<EmbeddedPlanarGraph> {
    if rows == 0 || cols == 0 {
        return Err(Error::InvalidParameter(
            "grid dimensions must be positive".into(),
        ));
    }
    let n = rows
        .checked_mul(cols)
        .filter(|&n| n <= u32::MAX as usize / 8)
        .ok_or_else(|| Error::SizeOverflow(format!("{rows}x{cols} grid")))?;
    let id = |r: usize, c: usize| (r * cols + c) as VertexId;
    let mut order = vec![Vec::new(); n];
    for r in 0..rows {
        for c in 0..cols {
            let nb = &mut order[r * cols + c];
            // Clockwise with rows growing downwards: up, right, down, left.
            if r > 0 {
                nb.push(id(r - 1, c));
            }
            if c + 1 < cols {
                nb.push(id(r, c + 1));
            }
            if r + 1 < rows {
                nb.push(id(r + 1, c));
            }
            if c > 0 {
                nb.push(id(r, c - 1));
            }
        }
    }
    let mut w = Weights::new(mode)?;
    from_undirected(n, &order, |_, _| w.next())
}

/// Random maximal planar graph on `n ≥ 3` vertices: a stacked triangulation
/// grown by inserting each vertex into a uniformly chosen face, followed by
/// `n` attempted random edge flips to spread the degrees.
pub fn random_triangulation(n: usize, mode: WeightMode, seed: u64) -> Result<EmbeddedPlanarGraph> {
    if n < 3 {
        return Err(Error::InvalidParameter(
            "a triangulation needs at least 3 vertices".into(),
        ));
    }
    if n > u32::MAX as usize / 16 {
        return Err(Error::SizeOverflow(format!("{n} vertices")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Oriented triangles; both orientations of the first triangle are faces.
    let mut faces: Vec<[VertexId; 3]> = vec![[0, 1, 2], [0, 2, 1]];
    for p in 3..n as VertexId {
        let i = rng.gen_range(0..faces.len());
        let [a, b, c] = faces[i];
        faces[i] = [a, b, p];
        faces.push([b, c, p]);
        faces.push([c, a, p]);
    }

    // Directed edge -> face owning it.
    let mut owner: HashMap<(VertexId, VertexId), usize> = HashMap::new();
    let mut edges: HashSet<(VertexId, VertexId)> = HashSet::new();
    let mut degree = vec![0usize; n];
    for (fi, f) in faces.iter().enumerate() {
        for j in 0..3 {
            let (x, y) = (f[j], f[(j + 1) % 3]);
            owner.insert((x, y), fi);
            if x < y {
                edges.insert((x, y));
                degree[x as usize] += 1;
                degree[y as usize] += 1;
            }
        }
    }
    let mut edge_list: Vec<(VertexId, VertexId)> = edges.iter().copied().collect();
    edge_list.sort_unstable();
    for _ in 0..n {
        let ei = rng.gen_range(0..edge_list.len());
        let (a, b) = edge_list[ei];
        let f1 = owner[&(a, b)];
        let f2 = owner[&(b, a)];
        let c = third(faces[f1], a, b);
        let d = third(faces[f2], b, a);
        let key = (c.min(d), c.max(d));
        if c == d || edges.contains(&key) || degree[a as usize] <= 3 || degree[b as usize] <= 3 {
            continue;
        }
        // Quad a, d, b, c in face order; replace diagonal a-b with c-d.
        for face in [faces[f1], faces[f2]] {
            for j in 0..3 {
                owner.remove(&(face[j], face[(j + 1) % 3]));
            }
        }
        faces[f1] = [a, d, c];
        faces[f2] = [d, b, c];
        for fi in [f1, f2] {
            let f = faces[fi];
            for j in 0..3 {
                owner.insert((f[j], f[(j + 1) % 3]), fi);
            }
        }
        edges.remove(&(a.min(b), a.max(b)));
        edges.insert(key);
        edge_list[ei] = key;
        degree[a as usize] -= 1;
        degree[b as usize] -= 1;
        degree[c as usize] += 1;
        degree[d as usize] += 1;
    }

    // Around vertex a, face (a, b, c) makes c follow b.
    let mut succ: Vec<HashMap<VertexId, VertexId>> = vec![HashMap::new(); n];
    for f in &faces {
        for j in 0..3 {
            let (a, b, c) = (f[j], f[(j + 1) % 3], f[(j + 2) % 3]);
            succ[a as usize].insert(b, c);
        }
    }
    let mut order = Vec::with_capacity(n);
    for s in &succ {
        let start = *s.keys().min().expect("every vertex lies on a face");
        let mut cyc = vec![start];
        let mut x = s[&start];
        while x != start {
            cyc.push(x);
            x = s[&x];
        }
        order.push(cyc);
    }
    let mut w = Weights::new(match mode {
        WeightMode::SeededRandom {
            max_weight,
            seed: ws,
        } => WeightMode::SeededRandom {
            max_weight,
            seed: ws ^ seed.rotate_left(17),
        },
        m => m,
    })?;
    from_undirected(n, &order, |_, _| w.next())
}

fn third(f: [VertexId; 3], a: VertexId, b: VertexId) -> VertexId {
    for j in 0..3 {
        if f[j] == a && f[(j + 1) % 3] == b {
            return f[(j + 2) % 3];
        }
    }
    unreachable!("edge {a}->{b} is not on face {f:?}")
}

/// Directed path `0 -> 1 -> … -> weights.len()`.
pub fn path(weights: &[u64]) -> Result<EmbeddedPlanarGraph> {
    let n = weights.len() + 1;
    let arcs: Vec<Arc> = weights
        .iter()
        .enumerate()
        .map(|(i, &w)| Arc {
            tail: i as VertexId,
            head: i as VertexId + 1,
            weight: w,
        })
        .collect();
    let rotation = (0..n)
        .map(|v| {
            let mut r = Vec::new();
            if v > 0 {
                r.push(v as ArcId - 1);
            }
            if v < weights.len() {
                r.push(v as ArcId);
            }
            r
        })
        .collect();
    EmbeddedPlanarGraph::new(n, arcs, rotation)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_by_two_grid() {
        let g = grid(1, 2, WeightMode::Unit).unwrap();
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(g.arc_count(), 2);
        assert!(g.arcs().iter().all(|a| a.weight == 1));
    }

    #[test]
    fn grid_face_count() {
        // 2 arcs per undirected edge add one digon each.
        let g = grid(4, 5, WeightMode::Unit).unwrap();
        let e = 4 * 4 + 3 * 5;
        assert_eq!(g.arc_count(), 2 * e);
        assert_eq!(g.face_count() + 20, 2 + 2 * e);
    }

    #[test]
    fn seeded_grids_are_reproducible() {
        let m = WeightMode::SeededRandom {
            max_weight: 100,
            seed: 7,
        };
        assert_eq!(grid(32, 32, m).unwrap(), grid(32, 32, m).unwrap());
        let other = WeightMode::SeededRandom {
            max_weight: 100,
            seed: 8,
        };
        assert_ne!(grid(32, 32, m).unwrap(), grid(32, 32, other).unwrap());
    }

    #[test]
    fn triangulations_are_maximal_planar() {
        for seed in 0..5 {
            let g = random_triangulation(200, WeightMode::Unit, seed).unwrap();
            assert_eq!(g.arc_count(), 2 * (3 * 200 - 6));
            let max_deg = (0..200).map(|v| g.degree(v) / 2).max().unwrap();
            assert!(max_deg < 60, "max degree {max_deg}");
        }
    }

    #[test]
    fn path_generator() {
        let g = path(&[1, 1]).unwrap();
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.arc(1).tail, 1);
    }
}
