//! Batched relaxation for dense members.
//!
//! Settled rows of a dense member are parked until the smallest lower bound
//! `label(t) + rowmin(t)` among them reaches the top of the queue; then all
//! parked rows are merged at once. The matrix is cut into the usual nested
//! off-diagonal blocks over the boundary walk order; blocks whose entries
//! satisfy the Monge inequality (in either column direction) get their
//! column minima by monotone divide and conquer, all others are scanned.
//! Every block is checked entry by entry when the index is built, so the
//! strategy never relies on an unverified structural assumption.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use super::{DdgUnion, Index, Member, SearchStats};
use crate::ddg::DenseDistanceGraph;
use crate::graph::INF;

/// Block side length below which blocks are always scanned.
const LEAF: u32 = 8;
const BIG: u128 = 1 << 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    Monge,
    Reversed,
    Dense,
}

#[derive(Clone, Copy, Debug)]
struct Block {
    rows: (u32, u32),
    cols: (u32, u32),
    kind: Kind,
}

/// Per-DDG structure for the batched strategy.
#[derive(Debug)]
pub struct MongeIndex {
    order: Vec<u32>,
    pos: Vec<u32>,
    rowmin: Vec<u64>,
    blocks: Vec<Block>,
}

#[inline]
fn big(w: u64) -> u128 {
    if w == INF {
        BIG
    } else {
        w as u128
    }
}

impl MongeIndex {
    pub(crate) fn build(ddg: &DenseDistanceGraph) -> Self {
        let k = ddg.len();
        let order = ddg.order().to_vec();
        let mut pos = vec![0u32; k];
        for (p, &i) in order.iter().enumerate() {
            pos[i as usize] = p as u32;
        }
        let rowmin = (0..k)
            .map(|i| {
                ddg.row(i)
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(_, &w)| w)
                    .min()
                    .unwrap_or(INF)
            })
            .collect();
        let mut blocks = Vec::new();
        let at = |r: u32, c: u32| {
            big(ddg.weight_raw(order[r as usize] as usize, order[c as usize] as usize))
        };
        layout(0, k as u32, &at, &mut blocks);
        Self {
            order,
            pos,
            rowmin,
            blocks,
        }
    }

    pub fn verified_blocks(&self) -> usize {
        self.blocks.iter().filter(|b| b.kind != Kind::Dense).count()
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }
}

fn layout(lo: u32, hi: u32, at: &impl Fn(u32, u32) -> u128, out: &mut Vec<Block>) {
    if hi - lo <= LEAF {
        if hi > lo {
            out.push(Block {
                rows: (lo, hi),
                cols: (lo, hi),
                kind: Kind::Dense,
            });
        }
        return;
    }
    let mid = lo + (hi - lo) / 2;
    for (rows, cols) in [((lo, mid), (mid, hi)), ((mid, hi), (lo, mid))] {
        out.push(Block {
            rows,
            cols,
            kind: classify(rows, cols, at),
        });
    }
    layout(lo, mid, at, out);
    layout(mid, hi, at, out);
}

fn classify(rows: (u32, u32), cols: (u32, u32), at: &impl Fn(u32, u32) -> u128) -> Kind {
    let (mut monge, mut reversed) = (true, true);
    for i in rows.0..rows.1 - 1 {
        for j in cols.0..cols.1 - 1 {
            let straight = at(i, j) + at(i + 1, j + 1);
            let cross = at(i, j + 1) + at(i + 1, j);
            monge &= straight <= cross;
            reversed &= cross <= straight;
        }
        if !monge && !reversed {
            return Kind::Dense;
        }
    }
    if monge {
        Kind::Monge
    } else {
        Kind::Reversed
    }
}

/// Column minima of the implicit matrix `value(r, c)` (rows `0..nr`, columns
/// `0..nc`) whose leftmost row argmin is nondecreasing in `c`.
fn monotone_column_minima(
    nr: usize,
    nc: usize,
    value: &impl Fn(usize, usize) -> u128,
    out: &mut [u128],
    evals: &mut usize,
) {
    fn rec(
        c_lo: usize,
        c_hi: usize,
        r_lo: usize,
        r_hi: usize,
        value: &impl Fn(usize, usize) -> u128,
        out: &mut [u128],
        evals: &mut usize,
    ) {
        if c_lo >= c_hi {
            return;
        }
        let mid = (c_lo + c_hi) / 2;
        let (mut best, mut arg) = (u128::MAX, r_lo);
        for r in r_lo..=r_hi {
            let v = value(r, mid);
            *evals += 1;
            if v < best {
                best = v;
                arg = r;
            }
        }
        out[mid] = best;
        rec(c_lo, mid, r_lo, arg, value, out, evals);
        rec(mid + 1, c_hi, arg, r_hi, value, out, evals);
    }
    if nr > 0 {
        rec(0, nc, 0, nr - 1, value, out, evals);
    }
}

pub(super) fn search(
    union: &DdgUnion<'_>,
    idx: &Index,
    dist: &mut [u64],
    forbidden: &[bool],
    init: &[usize],
    target: Option<usize>,
    stats: &mut SearchStats,
) {
    let n = idx.nodes.len();
    let nm = union.members.len();
    let mut done = vec![false; n];
    let mut pending: Vec<Vec<u32>> = vec![Vec::new(); nm];
    let mut pending_key = vec![INF; nm];
    // (key, kind, id): kind 0 is a member batch, kind 1 a vertex.
    let mut heap: BinaryHeap<Reverse<(u64, u8, u32)>> = init
        .iter()
        .map(|&i| Reverse((dist[i], 1, i as u32)))
        .collect();
    let mut rows_buf = Vec::new();
    let mut cols_buf = Vec::new();
    let mut mins = Vec::new();

    while let Some(Reverse((key, kind, id))) = heap.pop() {
        if kind == 0 {
            let m = id as usize;
            if key != pending_key[m] {
                continue;
            }
            pending_key[m] = INF;
            let Member::Dense(ddg) = &union.members[m] else {
                unreachable!()
            };
            let mi = ddg.monge_index();
            let map = &idx.node_of[m];
            rows_buf.clear();
            rows_buf.append(&mut pending[m]);
            rows_buf.sort_unstable();
            for b in &mi.blocks {
                let r0 = rows_buf.partition_point(|&p| p < b.rows.0);
                let r1 = rows_buf.partition_point(|&p| p < b.rows.1);
                if r0 == r1 {
                    continue;
                }
                let rows = &rows_buf[r0..r1];
                cols_buf.clear();
                let mut push_col = |c: u32| {
                    if !done[map[mi.order[c as usize] as usize] as usize] {
                        cols_buf.push(c);
                    }
                };
                if b.kind == Kind::Reversed {
                    (b.cols.0..b.cols.1).rev().for_each(&mut push_col);
                } else {
                    (b.cols.0..b.cols.1).for_each(&mut push_col);
                }
                if cols_buf.is_empty() {
                    continue;
                }
                let value = |r: usize, c: usize| {
                    let ri = mi.order[rows[r] as usize] as usize;
                    let ci = mi.order[cols_buf[c] as usize] as usize;
                    if ri == ci {
                        return u128::MAX;
                    }
                    dist[map[ri] as usize] as u128 + big(ddg.weight_raw(ri, ci))
                };
                mins.clear();
                mins.resize(cols_buf.len(), u128::MAX);
                let mut evals = 0;
                if b.kind == Kind::Dense {
                    for (c, slot) in mins.iter_mut().enumerate() {
                        for r in 0..rows.len() {
                            *slot = (*slot).min(value(r, c));
                        }
                    }
                    evals = rows.len() * cols_buf.len();
                } else {
                    monotone_column_minima(
                        rows.len(),
                        cols_buf.len(),
                        &value,
                        &mut mins,
                        &mut evals,
                    );
                }
                stats.relaxations += evals;
                for (c, &v) in mins.iter().enumerate() {
                    if v < BIG {
                        let y = map[mi.order[cols_buf[c] as usize] as usize] as usize;
                        let v = v as u64;
                        if v < dist[y] {
                            dist[y] = v;
                            heap.push(Reverse((v, 1, y as u32)));
                        }
                    }
                }
            }
            continue;
        }

        let x = id as usize;
        if done[x] || key > dist[x] {
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
        let d = key;
        let (lo, hi) = (idx.occ_offsets[x] as usize, idx.occ_offsets[x + 1] as usize);
        for &(m, i) in &idx.occ[lo..hi] {
            let map = &idx.node_of[m as usize];
            match &union.members[m as usize] {
                Member::Dense(ddg) => {
                    let mi = ddg.monge_index();
                    let rm = mi.rowmin[i as usize];
                    if rm == INF {
                        continue;
                    }
                    pending[m as usize].push(mi.pos[i as usize]);
                    let k = d + rm;
                    if k < pending_key[m as usize] {
                        pending_key[m as usize] = k;
                        heap.push(Reverse((k, 0, m)));
                    }
                }
                Member::Raw(g) => {
                    for (j, w) in g.out(i as usize) {
                        stats.relaxations += 1;
                        let y = map[j] as usize;
                        let nd = d + w;
                        if nd < dist[y] {
                            dist[y] = nd;
                            heap.push(Reverse((nd, 1, y as u32)));
                        }
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monotone_minima_match_scan() {
        // A[r][c] = (r - c)^2 is Monge.
        let nr = 13;
        let nc = 29;
        let value = |r: usize, c: usize| {
            let d = r as i64 * 2 - c as i64;
            (d * d) as u128 + r as u128
        };
        let mut out = vec![0; nc];
        let mut evals = 0;
        monotone_column_minima(nr, nc, &value, &mut out, &mut evals);
        for (c, &got) in out.iter().enumerate() {
            assert_eq!(got, (0..nr).map(|r| value(r, c)).min().unwrap());
        }
    }

    #[test]
    fn classify_detects_both_directions() {
        let monge = |r: u32, c: u32| ((r as i64 - c as i64).pow(2)) as u128;
        assert_eq!(classify((0, 6), (6, 12), &monge), Kind::Monge);
        let rev = |r: u32, c: u32| ((r as i64 + c as i64).pow(2)) as u128;
        assert_eq!(classify((0, 6), (6, 12), &rev), Kind::Reversed);
        let bad = |r: u32, c: u32| ((r * 7 + c * 13) % 5) as u128;
        assert_eq!(classify((0, 6), (6, 12), &bad), Kind::Dense);
    }
}
