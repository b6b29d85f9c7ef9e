//! Splitting a piece into two edge-disjoint halves.
//!
//! Disconnected pieces are split along components when that is balanced.
//! Otherwise the largest component is triangulated and cut along the
//! fundamental cycle (with respect to a BFS tree) whose larger side, counting
//! the cycle itself, is smallest.

use std::collections::{HashMap, VecDeque};

use crate::graph::embedding::{dart_origin, Dart, Dsu, FaceWalker};
use crate::graph::{ArcId, EmbeddedPlanarGraph, VertexId};

pub(crate) struct Split {
    pub a: Vec<ArcId>,
    pub iso_a: Vec<VertexId>,
    pub b: Vec<ArcId>,
    pub iso_b: Vec<VertexId>,
}

struct Component {
    arcs: Vec<ArcId>,
    isolated: Option<VertexId>,
    size: usize,
}

/// Split a piece with at least two vertices into two nonempty parts.
pub(crate) fn split_piece(g: &EmbeddedPlanarGraph, arcs: &[ArcId], isolated: &[VertexId]) -> Split {
    let mut verts: Vec<VertexId> = arcs
        .iter()
        .flat_map(|&a| {
            let a = g.arc(a);
            [a.tail, a.head]
        })
        .collect();
    verts.sort_unstable();
    verts.dedup();
    let lidx = |v: VertexId| verts.binary_search(&v).unwrap() as u32;

    let mut dsu = Dsu::new(verts.len());
    for &a in arcs {
        let arc = g.arc(a);
        dsu.union(lidx(arc.tail), lidx(arc.head));
    }
    let mut comp_of_root: HashMap<u32, usize> = HashMap::new();
    let mut comps: Vec<Component> = Vec::new();
    for &a in arcs {
        let r = dsu.find(lidx(g.arc(a).tail));
        let ci = *comp_of_root.entry(r).or_insert_with(|| {
            comps.push(Component {
                arcs: Vec::new(),
                isolated: None,
                size: 0,
            });
            comps.len() - 1
        });
        comps[ci].arcs.push(a);
    }
    for i in 0..verts.len() as u32 {
        let r = dsu.find(i);
        comps[comp_of_root[&r]].size += 1;
    }
    for &v in isolated {
        comps.push(Component {
            arcs: Vec::new(),
            isolated: Some(v),
            size: 1,
        });
    }
    let total: usize = comps.iter().map(|c| c.size).sum();

    let mut out = Split {
        a: Vec::new(),
        iso_a: Vec::new(),
        b: Vec::new(),
        iso_b: Vec::new(),
    };
    let largest = (0..comps.len())
        .max_by_key(|&i| (comps[i].size, std::cmp::Reverse(i)))
        .expect("piece has vertices");

    let (mut load_a, mut load_b) = (0usize, 0usize);
    let mut rest: Vec<usize> = (0..comps.len()).collect();
    if comps.len() < 2 || 3 * comps[largest].size > 2 * total {
        let big = &comps[largest];
        if big.arcs.len() >= 2 {
            let (a, b) = cycle_split(g, &big.arcs).unwrap_or_else(|| fallback_split(g, &big.arcs));
            load_a = vertex_count(g, &a);
            load_b = vertex_count(g, &b);
            out.a = a;
            out.b = b;
            rest.retain(|&i| i != largest);
        }
    }
    rest.sort_by_key(|&i| (std::cmp::Reverse(comps[i].size), i));
    for i in rest {
        let c = &comps[i];
        let to_a = load_a <= load_b;
        let (arcs_out, iso_out, load) = if to_a {
            (&mut out.a, &mut out.iso_a, &mut load_a)
        } else {
            (&mut out.b, &mut out.iso_b, &mut load_b)
        };
        arcs_out.extend_from_slice(&c.arcs);
        iso_out.extend(c.isolated);
        *load += c.size;
    }
    out.a.sort_unstable();
    out.b.sort_unstable();
    out.iso_a.sort_unstable();
    out.iso_b.sort_unstable();
    out
}

fn vertex_count(g: &EmbeddedPlanarGraph, arcs: &[ArcId]) -> usize {
    let mut v: Vec<VertexId> = arcs
        .iter()
        .flat_map(|&a| [g.arc(a).tail, g.arc(a).head])
        .collect();
    v.sort_unstable();
    v.dedup();
    v.len()
}

/// Halve the arcs of a connected piece by BFS rank. Always makes progress.
fn fallback_split(g: &EmbeddedPlanarGraph, arcs: &[ArcId]) -> (Vec<ArcId>, Vec<ArcId>) {
    let mut adj: HashMap<VertexId, Vec<VertexId>> = HashMap::new();
    for &a in arcs {
        let a = g.arc(a);
        adj.entry(a.tail).or_default().push(a.head);
        adj.entry(a.head).or_default().push(a.tail);
    }
    let start = *adj.keys().min().unwrap();
    let mut rank: HashMap<VertexId, usize> = HashMap::new();
    let mut queue = VecDeque::from([start]);
    rank.insert(start, 0);
    while let Some(x) = queue.pop_front() {
        let mut nb = adj[&x].clone();
        nb.sort_unstable();
        for y in nb {
            if !rank.contains_key(&y) {
                rank.insert(y, rank.len());
                queue.push_back(y);
            }
        }
    }
    let mut sorted: Vec<ArcId> = arcs.to_vec();
    sorted.sort_by_key(|&a| {
        let arc = g.arc(a);
        (rank[&arc.tail].max(rank[&arc.head]), a)
    });
    let b = sorted.split_off(sorted.len() / 2);
    (sorted, b)
}

fn bfs(adj: &[Vec<(u32, u32)>], src: u32) -> (Vec<u32>, Vec<u32>, Vec<u32>) {
    let n = adj.len();
    let mut depth = vec![u32::MAX; n];
    let mut parent_edge = vec![u32::MAX; n];
    let mut order = Vec::with_capacity(n);
    depth[src as usize] = 0;
    let mut queue = VecDeque::from([src]);
    while let Some(x) = queue.pop_front() {
        order.push(x);
        for &(y, e) in &adj[x as usize] {
            if depth[y as usize] == u32::MAX {
                depth[y as usize] = depth[x as usize] + 1;
                parent_edge[y as usize] = e;
                queue.push_back(y);
            }
        }
    }
    (depth, parent_edge, order)
}

/// Fundamental-cycle separator of a connected piece. Returns `None` when the
/// best cycle leaves one side without arcs.
fn cycle_split(g: &EmbeddedPlanarGraph, arcs: &[ArcId]) -> Option<(Vec<ArcId>, Vec<ArcId>)> {
    let mut verts: Vec<VertexId> = arcs
        .iter()
        .flat_map(|&a| [g.arc(a).tail, g.arc(a).head])
        .collect();
    verts.sort_unstable();
    verts.dedup();
    let n = verts.len();
    let lidx = |v: VertexId| verts.binary_search(&v).unwrap() as u32;
    let local_of: HashMap<ArcId, u32> = arcs
        .iter()
        .enumerate()
        .map(|(i, &a)| (a, i as u32))
        .collect();
    let mut ends: Vec<(u32, u32)> = arcs
        .iter()
        .map(|&a| (lidx(g.arc(a).tail), lidx(g.arc(a).head)))
        .collect();
    let real = ends.len();
    let rotation: Vec<Vec<u32>> = verts
        .iter()
        .map(|&v| {
            g.rotation(v)
                .iter()
                .filter_map(|a| local_of.get(a).copied())
                .collect()
        })
        .collect();
    let faces = FaceWalker::new(&ends, &rotation).faces();

    let mut tri: Vec<Vec<Dart>> = Vec::with_capacity(2 * faces.len());
    for face in faces {
        triangulate(face, &mut ends, &mut tri);
    }

    let mut adj: Vec<Vec<(u32, u32)>> = vec![Vec::new(); n];
    for (e, &(x, y)) in ends.iter().enumerate() {
        adj[x as usize].push((y, e as u32));
        adj[y as usize].push((x, e as u32));
    }
    let (d0, _, order0) = bfs(&adj, 0);
    let far = *order0.last().unwrap();
    debug_assert!(d0.iter().all(|&d| d != u32::MAX));
    let (_, pe, order1) = bfs(&adj, far);
    let mut path = vec![*order1.last().unwrap()];
    while *path.last().unwrap() != far {
        let x = *path.last().unwrap();
        let (a, b) = ends[pe[x as usize] as usize];
        path.push(if a == x { b } else { a });
    }
    let center = path[path.len() / 2];
    let (depth, parent_edge, _) = bfs(&adj, center);
    let parent = |x: u32| {
        let (a, b) = ends[parent_edge[x as usize] as usize];
        if a == x {
            b
        } else {
            a
        }
    };
    let mut is_tree = vec![false; ends.len()];
    for v in 0..n {
        if parent_edge[v] != u32::MAX {
            is_tree[parent_edge[v] as usize] = true;
        }
    }

    let nf = tri.len();
    let mut face_of = vec![0u32; 2 * ends.len()];
    for (f, face) in tri.iter().enumerate() {
        for &d in face {
            face_of[d as usize] = f as u32;
        }
    }
    let mut dual: Vec<Vec<(u32, u32)>> = vec![Vec::new(); nf];
    for e in 0..ends.len() {
        if !is_tree[e] {
            let (f1, f2) = (face_of[2 * e], face_of[2 * e + 1]);
            dual[f1 as usize].push((f2, e as u32));
            dual[f2 as usize].push((f1, e as u32));
        }
    }
    // Dual spanning tree: preorder intervals and the edge to each face's parent.
    let mut tin = vec![u32::MAX; nf];
    let mut tout = vec![0u32; nf];
    let mut dparent_edge = vec![u32::MAX; nf];
    let mut preorder = Vec::with_capacity(nf);
    let mut stack: Vec<(u32, usize)> = vec![(0, 0)];
    tin[0] = 0;
    preorder.push(0u32);
    while let Some(&(f, it)) = stack.last() {
        if it < dual[f as usize].len() {
            let (h, e) = dual[f as usize][it];
            stack.last_mut().unwrap().1 += 1;
            if tin[h as usize] == u32::MAX {
                tin[h as usize] = preorder.len() as u32;
                preorder.push(h);
                dparent_edge[h as usize] = e;
                stack.push((h, 0));
            }
        } else {
            tout[f as usize] = preorder.len() as u32;
            stack.pop();
        }
    }
    if preorder.len() != nf {
        return None;
    }

    let mut rep = vec![0u32; n];
    for (e, &(x, y)) in ends.iter().enumerate() {
        rep[x as usize] = face_of[2 * e];
        rep[y as usize] = face_of[2 * e + 1];
    }
    let mut sub = vec![0u32; nf];
    for &r in &rep {
        sub[r as usize] += 1;
    }
    for &f in preorder.iter().rev() {
        let e = dparent_edge[f as usize];
        if e != u32::MAX {
            let (f1, f2) = (face_of[2 * e as usize], face_of[2 * e as usize + 1]);
            let p = if f1 == f { f2 } else { f1 };
            sub[p as usize] += sub[f as usize];
        }
    }

    let mut best: Option<((usize, usize, u32), u32)> = None;
    let mut cycle = Vec::new();
    for e in 0..ends.len() as u32 {
        if is_tree[e as usize] {
            continue;
        }
        let (f1, f2) = (face_of[2 * e as usize], face_of[2 * e as usize + 1]);
        let child = if dparent_edge[f1 as usize] == e {
            f1
        } else {
            f2
        };
        let (lo, hi) = (tin[child as usize], tout[child as usize]);
        cycle.clear();
        let (mut x, mut y) = ends[e as usize];
        while x != y {
            if depth[x as usize] >= depth[y as usize] {
                cycle.push(x);
                x = parent(x);
            } else {
                cycle.push(y);
                y = parent(y);
            }
        }
        cycle.push(x);
        let on_cycle_inside = cycle
            .iter()
            .filter(|&&v| {
                let t = tin[rep[v as usize] as usize];
                lo <= t && t < hi
            })
            .count();
        let inside = sub[child as usize] as usize - on_cycle_inside;
        let outside = n - cycle.len() - inside;
        let score = (inside.max(outside) + cycle.len(), cycle.len(), e);
        if best.is_none_or(|(s, _)| score < s) {
            best = Some((score, child));
        }
    }
    let (_, child) = best?;
    let (lo, hi) = (tin[child as usize], tout[child as usize]);
    let in_s = |f: u32| {
        let t = tin[f as usize];
        lo <= t && t < hi
    };
    let (mut a, mut b) = (Vec::new(), Vec::new());
    for e in 0..real {
        if in_s(face_of[2 * e]) || in_s(face_of[2 * e + 1]) {
            a.push(arcs[e]);
        } else {
            b.push(arcs[e]);
        }
    }
    if a.is_empty() || b.is_empty() {
        return None;
    }
    Some((a, b))
}

/// Cut ears off a face walk until only triangles remain (or no ear with
/// distinct ends exists). New chords are appended to `ends`.
fn triangulate(mut walk: Vec<Dart>, ends: &mut Vec<(u32, u32)>, out: &mut Vec<Vec<Dart>>) {
    let mut pos = 0;
    while walk.len() > 3 {
        let len = walk.len();
        let found = (0..len)
            .map(|k| (pos + k) % len)
            .find(|&i| dart_origin(ends, walk[i]) != dart_origin(ends, walk[(i + 2) % len]));
        let Some(i) = found else { break };
        let a = dart_origin(ends, walk[i]);
        let c = dart_origin(ends, walk[(i + 2) % len]);
        let e = ends.len() as u32;
        ends.push((a, c));
        out.push(vec![walk[i], walk[(i + 1) % len], 2 * e + 1]);
        walk[i] = 2 * e;
        if i + 1 < len {
            walk.remove(i + 1);
            pos = i + 1;
        } else {
            walk.remove(0);
            pos = i;
        }
        pos %= walk.len();
    }
    out.push(walk);
}
