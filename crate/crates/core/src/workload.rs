//! Seeded query and update generators shared by tests, benches and the CLI.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::dynamic::{DynamicOracle, Op};
use crate::graph::VertexId;

/// `u`, `v` and a failure set avoiding both.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FailureQuery {
    pub u: VertexId,
    pub v: VertexId,
    pub failed: Vec<VertexId>,
}

/// A query on `n` vertices with exactly `k` failures (`k ≤ n - 2`).
pub fn failure_query<R: Rng>(rng: &mut R, n: usize, k: usize) -> FailureQuery {
    let n = n as VertexId;
    let u = rng.gen_range(0..n);
    let v = rng.gen_range(0..n);
    let k = k.min(n as usize - if u == v { 1 } else { 2 });
    let mut failed = Vec::with_capacity(k);
    while failed.len() < k {
        let x = rng.gen_range(0..n);
        if x != u && x != v && !failed.contains(&x) {
            failed.push(x);
        }
    }
    FailureQuery { u, v, failed }
}

/// `count` queries with failure counts cycling through `0..=max_failures`.
pub fn failure_queries<R: Rng>(
    rng: &mut R,
    n: usize,
    count: usize,
    max_failures: usize,
) -> Vec<FailureQuery> {
    (0..count)
        .map(|i| failure_query(rng, n, i % (max_failures + 1)))
        .collect()
}

/// The five update kinds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OpKind {
    SetWeight,
    InsertEdge,
    DeleteEdge,
    InsertVertex,
    DeleteVertex,
}

pub const OP_KINDS: [OpKind; 5] = [
    OpKind::SetWeight,
    OpKind::InsertEdge,
    OpKind::DeleteEdge,
    OpKind::InsertVertex,
    OpKind::DeleteVertex,
];

/// Vertices of `o` that are not deleted.
pub fn live_vertices(o: &DynamicOracle) -> Vec<VertexId> {
    let g = o.graph();
    (0..g.vertex_count() as VertexId)
        .filter(|&v| !g.is_deleted(v))
        .collect()
}

/// A valid update of the given kind, or `None` when the graph offers none.
/// Edge insertions are searched among vertex pairs at most two hops apart
/// and random rotation positions, keeping the first embedding that checks.
pub fn random_op<R: Rng>(
    o: &DynamicOracle,
    rng: &mut R,
    kind: OpKind,
    max_weight: u64,
) -> Option<Op> {
    let g = o.graph();
    let arcs: Vec<_> = g.live_arcs().collect();
    let live = live_vertices(o);
    match kind {
        OpKind::SetWeight => {
            let &(arc, _) = arcs.choose(rng)?;
            Some(Op::SetWeight {
                arc,
                weight: rng.gen_range(1..=max_weight),
            })
        }
        OpKind::DeleteEdge => Some(Op::DeleteEdge {
            arc: arcs.choose(rng)?.0,
        }),
        OpKind::InsertVertex => Some(Op::InsertVertex),
        OpKind::DeleteVertex => {
            if live.len() <= 2 {
                return None;
            }
            Some(Op::DeleteVertex {
                v: *live.choose(rng)?,
            })
        }
        OpKind::InsertEdge => {
            for _ in 0..400 {
                let &tail = live.choose(rng)?;
                let near: Vec<VertexId> = g
                    .rotation(tail)
                    .iter()
                    .flat_map(|&a| {
                        let a = g.arc(a).unwrap();
                        let w = if a.tail == tail { a.head } else { a.tail };
                        std::iter::once(w).chain(g.rotation(w).iter().map(move |&b| {
                            let b = g.arc(b).unwrap();
                            if b.tail == w {
                                b.head
                            } else {
                                b.tail
                            }
                        }))
                    })
                    .filter(|&h| h != tail && !g.is_deleted(h))
                    .collect();
                let head = match near.choose(rng) {
                    Some(&h) => h,
                    None => *live.choose(rng)?,
                };
                if head == tail || g.live_arcs().any(|(_, a)| a.tail == tail && a.head == head) {
                    continue;
                }
                let tail_pos = rng.gen_range(0..=g.rotation(tail).len());
                let head_pos = rng.gen_range(0..=g.rotation(head).len());
                let weight = rng.gen_range(1..=max_weight);
                let mut trial = g.clone();
                if trial
                    .insert_arc(tail, head, weight, tail_pos, head_pos)
                    .is_ok()
                {
                    return Some(Op::InsertEdge {
                        tail,
                        head,
                        weight,
                        tail_pos,
                        head_pos,
                    });
                }
            }
            None
        }
    }
}

/// A random update, cycling through kinds until one is available.
pub fn any_op<R: Rng>(o: &DynamicOracle, rng: &mut R, max_weight: u64) -> Op {
    let start = rng.gen_range(0..OP_KINDS.len());
    (0..OP_KINDS.len())
        .find_map(|i| random_op(o, rng, OP_KINDS[(start + i) % OP_KINDS.len()], max_weight))
        .unwrap_or(Op::InsertVertex)
}
