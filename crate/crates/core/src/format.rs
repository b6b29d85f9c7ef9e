//! Binary oracle files.
//!
//! Layout: magic `PFTO`, format version (u32), oracle kind (u8), section
//! count (u32), then tagged sections `tag[4] len:u64 payload`. All integers
//! are little-endian; `u64::MAX` encodes an unreachable entry and
//! `u32::MAX` an absent node id. Maps are written in key order, so equal
//! oracles produce equal bytes.
//!
//! Sections: `GRPH` graph, `TREE` decomposition, `DDGI` strictly internal
//! DDGs, `SHFT` shift constant; tradeoff files add `RDIV` parameters and
//! r-division, `EXTD` external DDGs, `VORT` additive weight tables and
//! `PTAB` piece distance tables.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use crate::ddg::{DdgVariant, DenseDistanceGraph, PieceDistanceTable, ShiftConstant};
use crate::decomposition::{DecompositionTree, NodeId, Piece};
use crate::error::{Error, Result};
use crate::failure::FailureOracle;
use crate::graph::{Arc, EmbeddedPlanarGraph};
use crate::tradeoff::{TradeoffOracle, VoronoiTable};

pub const MAGIC: &[u8; 4] = b"PFTO";
pub const VERSION: u32 = 1;

const NONE: u32 = u32::MAX;

/// Either oracle kind, as stored in a file.
#[derive(Clone, Debug)]
pub enum OracleFile {
    Failure(FailureOracle),
    Tradeoff(TradeoffOracle),
}

impl OracleFile {
    pub fn failure(&self) -> &FailureOracle {
        match self {
            OracleFile::Failure(o) => o,
            OracleFile::Tradeoff(t) => t.base(),
        }
    }
}

#[derive(Default)]
struct Buf(Vec<u8>);

impl Buf {
    fn u8(&mut self, x: u8) {
        self.0.push(x);
    }
    fn u32(&mut self, x: u32) {
        self.0.extend_from_slice(&x.to_le_bytes());
    }
    fn u64(&mut self, x: u64) {
        self.0.extend_from_slice(&x.to_le_bytes());
    }
    fn len(&mut self, x: usize) {
        self.u64(x as u64);
    }
    fn u32s(&mut self, xs: &[u32]) {
        self.len(xs.len());
        for &x in xs {
            self.u32(x);
        }
    }
    fn u64s(&mut self, xs: &[u64]) {
        self.len(xs.len());
        for &x in xs {
            self.u64(x);
        }
    }
    fn opt(&mut self, x: Option<u32>) {
        self.u32(x.unwrap_or(NONE));
    }
}

struct Cur<'a> {
    data: &'a [u8],
    at: usize,
}

fn bad(what: &str) -> Error {
    Error::Format(what.to_string())
}

impl<'a> Cur<'a> {
    fn take(&mut self, k: usize) -> Result<&'a [u8]> {
        let end = self
            .at
            .checked_add(k)
            .filter(|&e| e <= self.data.len())
            .ok_or_else(|| bad("truncated"))?;
        let s = &self.data[self.at..end];
        self.at = end;
        Ok(s)
    }
    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }
    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    /// A length bounded by the remaining bytes at `unit` bytes per item.
    fn len(&mut self, unit: usize) -> Result<usize> {
        let n = self.u64()?;
        let rest = (self.data.len() - self.at) as u64;
        if n.saturating_mul(unit.max(1) as u64) > rest {
            return Err(bad("length exceeds file size"));
        }
        Ok(n as usize)
    }
    fn u32s(&mut self) -> Result<Vec<u32>> {
        let n = self.len(4)?;
        (0..n).map(|_| self.u32()).collect()
    }
    fn u64s(&mut self) -> Result<Vec<u64>> {
        let n = self.len(8)?;
        (0..n).map(|_| self.u64()).collect()
    }
    fn opt(&mut self) -> Result<Option<u32>> {
        let x = self.u32()?;
        Ok((x != NONE).then_some(x))
    }
    fn done(&self) -> Result<()> {
        if self.at == self.data.len() {
            Ok(())
        } else {
            Err(bad("trailing bytes in section"))
        }
    }
}

fn put_graph(b: &mut Buf, g: &EmbeddedPlanarGraph) {
    b.len(g.vertex_count());
    b.len(g.arc_count());
    for a in g.arcs() {
        b.u32(a.tail);
        b.u32(a.head);
        b.u64(a.weight);
    }
    for r in g.rotations() {
        b.u32s(r);
    }
}

fn get_graph(c: &mut Cur) -> Result<EmbeddedPlanarGraph> {
    let n = c.len(8)?;
    let m = c.len(16)?;
    let arcs = (0..m)
        .map(|_| {
            Ok(Arc {
                tail: c.u32()?,
                head: c.u32()?,
                weight: c.u64()?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let rotation = (0..n).map(|_| c.u32s()).collect::<Result<Vec<_>>>()?;
    EmbeddedPlanarGraph::new(n, arcs, rotation)
}

fn put_tree(b: &mut Buf, t: &DecompositionTree) {
    b.len(t.leaf_size());
    b.len(t.base());
    b.len(t.vertex_count());
    b.len(t.len());
    for p in t.pieces() {
        b.u32(p.id);
        b.opt(p.parent);
        b.opt(p.children.map(|c| c[0]));
        b.opt(p.children.map(|c| c[1]));
        b.u32(p.depth);
        b.u32s(&p.vertices);
        b.u32s(&p.boundary);
        b.len(p.holes.len());
        for h in &p.holes {
            b.u32s(h);
        }
        b.u32s(&p.boundary_cycle);
        b.u32s(&p.separator);
        b.u32(p.arc_count);
        b.u32(p.subtree_end);
        b.u32s(&p.arcs);
    }
    b.u32s(t.leaf_of_all());
    b.len(t.rdivision_marks().len());
    for (&r, div) in t.rdivision_marks() {
        b.len(r);
        b.u32s(div);
    }
}

fn get_tree(c: &mut Cur) -> Result<DecompositionTree> {
    let leaf_size = c.u64()? as usize;
    let base = c.u64()? as usize;
    let vertex_count = c.u64()? as usize;
    let count = c.len(40)?;
    let mut pieces = Vec::with_capacity(count);
    for i in 0..count {
        let id = c.u32()?;
        if id as usize != i {
            return Err(bad("piece ids out of order"));
        }
        let parent = c.opt()?;
        let children = match (c.opt()?, c.opt()?) {
            (Some(a), Some(b)) if (a as usize) < count && (b as usize) < count => Some([a, b]),
            (None, None) => None,
            _ => return Err(bad("malformed child pointers")),
        };
        let depth = c.u32()?;
        let vertices = c.u32s()?;
        let boundary = c.u32s()?;
        let nh = c.len(8)?;
        let holes = (0..nh).map(|_| c.u32s()).collect::<Result<Vec<_>>>()?;
        let boundary_cycle = c.u32s()?;
        let separator = c.u32s()?;
        let arc_count = c.u32()?;
        let subtree_end = c.u32()?;
        let arcs = c.u32s()?;
        if vertices
            .iter()
            .chain(&boundary)
            .any(|&v| v as usize >= vertex_count)
        {
            return Err(bad("piece references an unknown vertex"));
        }
        if parent.is_some_and(|p| p as usize >= count)
            || (subtree_end as usize) > count
            || subtree_end <= id
        {
            return Err(bad("malformed tree links"));
        }
        pieces.push(Piece {
            id,
            parent,
            children,
            depth,
            vertices,
            boundary,
            holes,
            boundary_cycle,
            separator,
            arc_count,
            subtree_end,
            arcs,
        });
    }
    let leaf_of = c.u32s()?;
    if leaf_of.len() != vertex_count || leaf_of.iter().any(|&l| l as usize >= count) {
        return Err(bad("malformed leaf map"));
    }
    let nr = c.len(16)?;
    let mut marks = BTreeMap::new();
    for _ in 0..nr {
        let r = c.u64()? as usize;
        let div = c.u32s()?;
        if div.iter().any(|&p| p as usize >= count) {
            return Err(bad("r-division references an unknown piece"));
        }
        marks.insert(r, div);
    }
    if count == 0 {
        return Err(bad("empty tree"));
    }
    Ok(DecompositionTree::from_parts(
        pieces,
        leaf_of,
        marks,
        leaf_size,
        base,
        vertex_count,
    ))
}

fn variant_code(v: DdgVariant) -> u8 {
    match v {
        DdgVariant::Standard => 0,
        DdgVariant::StrictInternal => 1,
        DdgVariant::StrictExternal => 2,
    }
}

fn put_ddg(b: &mut Buf, d: &DenseDistanceGraph) {
    b.u8(variant_code(d.variant()));
    b.u32s(d.vertices());
    b.u64s(d.raw_weights());
    b.u32s(d.source_pieces());
    b.u32s(d.order());
}

fn get_ddg(c: &mut Cur) -> Result<DenseDistanceGraph> {
    let variant = match c.u8()? {
        0 => DdgVariant::Standard,
        1 => DdgVariant::StrictInternal,
        2 => DdgVariant::StrictExternal,
        _ => return Err(bad("unknown DDG variant")),
    };
    let vertices = c.u32s()?;
    let weights = c.u64s()?;
    let source_pieces = c.u32s()?;
    let order = c.u32s()?;
    let k = vertices.len();
    if weights.len() != k * k || order.len() != k || !vertices.windows(2).all(|w| w[0] < w[1]) {
        return Err(bad("malformed DDG"));
    }
    let mut seen = vec![false; k];
    for &o in &order {
        if o as usize >= k || std::mem::replace(&mut seen[o as usize], true) {
            return Err(bad("DDG order is not a permutation"));
        }
    }
    Ok(DenseDistanceGraph::new(
        variant,
        vertices,
        weights,
        source_pieces,
        Some(order),
    ))
}

fn section(out: &mut Vec<u8>, tag: &[u8; 4], body: Buf) {
    out.extend_from_slice(tag);
    out.extend_from_slice(&(body.0.len() as u64).to_le_bytes());
    out.extend_from_slice(&body.0);
}

fn failure_sections(o: &FailureOracle) -> Vec<([u8; 4], Buf)> {
    let mut g = Buf::default();
    put_graph(&mut g, o.graph());
    let mut t = Buf::default();
    put_tree(&mut t, o.tree());
    let mut d = Buf::default();
    d.len(o.ddgs().len());
    for x in o.ddgs() {
        match x {
            Some(x) => {
                d.u8(1);
                put_ddg(&mut d, x);
            }
            None => d.u8(0),
        }
    }
    let mut s = Buf::default();
    s.u64(o.shift().value());
    vec![(*b"GRPH", g), (*b"TREE", t), (*b"DDGI", d), (*b"SHFT", s)]
}

/// Serialise a failure oracle.
pub fn failure_to_bytes(o: &FailureOracle) -> Vec<u8> {
    assemble(1, failure_sections(o))
}

/// Serialise a tradeoff oracle.
pub fn tradeoff_to_bytes(o: &TradeoffOracle) -> Vec<u8> {
    let mut secs = failure_sections(o.base());
    secs.extend(tradeoff_sections(o));
    assemble(2, secs)
}

/// Bytes of the tradeoff-specific sections alone (payload plus headers).
pub fn tradeoff_section_bytes(o: &TradeoffOracle) -> usize {
    tradeoff_sections(o)
        .iter()
        .map(|(_, b)| b.0.len() + 12)
        .sum()
}

fn tradeoff_sections(o: &TradeoffOracle) -> Vec<([u8; 4], Buf)> {
    let mut p = Buf::default();
    p.len(o.r());
    p.len(o.k());
    p.u32s(o.rdiv());
    let mut e = Buf::default();
    e.len(o.ext().len());
    for (t, d) in o.ext() {
        e.u32s(t);
        put_ddg(&mut e, d);
    }
    let mut v = Buf::default();
    v.len(o.vor().len());
    for ((t, q), table) in o.vor() {
        v.u32s(t);
        v.u32(*q);
        v.u32s(table.rows());
        v.u32s(table.sites());
        v.u64s(table.raw());
    }
    let mut pt = Buf::default();
    pt.len(o.piece_tables().len());
    for (q, table) in o.piece_tables() {
        pt.u32(*q);
        pt.u32s(table.boundary());
        pt.u32s(table.vertices());
        pt.u64s(table.raw());
    }
    vec![(*b"RDIV", p), (*b"EXTD", e), (*b"VORT", v), (*b"PTAB", pt)]
}

fn assemble(kind: u8, secs: Vec<([u8; 4], Buf)>) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.push(kind);
    out.extend_from_slice(&(secs.len() as u32).to_le_bytes());
    for (tag, body) in secs {
        section(&mut out, &tag, body);
    }
    out
}

/// Parse an oracle file.
pub fn from_bytes(data: &[u8]) -> Result<OracleFile> {
    let mut c = Cur { data, at: 0 };
    if c.take(4)? != MAGIC {
        return Err(bad("not an oracle file"));
    }
    let version = c.u32()?;
    if version != VERSION {
        return Err(Error::Format(format!(
            "unsupported format version {version}"
        )));
    }
    let kind = c.u8()?;
    let count = c.u32()?;
    let mut secs: BTreeMap<[u8; 4], &[u8]> = BTreeMap::new();
    for _ in 0..count {
        let tag: [u8; 4] = c.take(4)?.try_into().unwrap();
        let len = c.u64()?;
        let len = usize::try_from(len).map_err(|_| bad("section too large"))?;
        if secs.insert(tag, c.take(len)?).is_some() {
            return Err(bad("duplicate section"));
        }
    }
    c.done()?;
    let sec = |tag: &[u8; 4]| -> Result<Cur> {
        let data = secs.get(tag).ok_or_else(|| {
            Error::Format(format!("missing section {}", String::from_utf8_lossy(tag)))
        })?;
        Ok(Cur { data, at: 0 })
    };

    let mut g = sec(b"GRPH")?;
    let graph = get_graph(&mut g)?;
    g.done()?;
    let mut t = sec(b"TREE")?;
    let tree = get_tree(&mut t)?;
    t.done()?;
    if tree.vertex_count() != graph.vertex_count() {
        return Err(bad("tree and graph disagree on n"));
    }
    let mut d = sec(b"DDGI")?;
    let nd = d.len(1)?;
    let mut ddgs = Vec::with_capacity(nd);
    for _ in 0..nd {
        ddgs.push(match d.u8()? {
            0 => None,
            1 => Some(get_ddg(&mut d)?),
            _ => return Err(bad("bad presence flag")),
        });
    }
    d.done()?;
    let mut s = sec(b"SHFT")?;
    let c_value = s.u64()?;
    s.done()?;
    let shift = ShiftConstant::for_graph(&graph);
    if shift.value() != c_value {
        return Err(bad("shift constant does not match the graph"));
    }
    let base = FailureOracle::from_parts(graph, tree, ddgs, shift)?;
    match kind {
        1 => Ok(OracleFile::Failure(base)),
        2 => Ok(OracleFile::Tradeoff(read_tradeoff(base, &sec)?)),
        _ => Err(bad("unknown oracle kind")),
    }
}

fn read_tradeoff<'a>(
    base: FailureOracle,
    sec: &dyn Fn(&[u8; 4]) -> Result<Cur<'a>>,
) -> Result<TradeoffOracle> {
    let mut p = sec(b"RDIV")?;
    let r = p.u64()? as usize;
    let k = p.u64()? as usize;
    let rdiv = p.u32s()?;
    p.done()?;
    if base.tree().r_division(r)? != rdiv.as_slice() {
        return Err(bad("r-division does not match the tree"));
    }
    let mut e = sec(b"EXTD")?;
    let ne = e.len(1)?;
    let mut ext = BTreeMap::new();
    for _ in 0..ne {
        let t = e.u32s()?;
        ext.insert(t, get_ddg(&mut e)?);
    }
    e.done()?;
    let mut v = sec(b"VORT")?;
    let nv = v.len(1)?;
    let mut vor = BTreeMap::new();
    for _ in 0..nv {
        let t = v.u32s()?;
        let q: NodeId = v.u32()?;
        let rows = v.u32s()?;
        let sites = v.u32s()?;
        let omega = v.u64s()?;
        vor.insert((t, q), VoronoiTable::from_parts(rows, sites, omega)?);
    }
    v.done()?;
    let mut pt = sec(b"PTAB")?;
    let np = pt.len(1)?;
    let mut tables = BTreeMap::new();
    for _ in 0..np {
        let q = pt.u32()?;
        let boundary = pt.u32s()?;
        let vertices = pt.u32s()?;
        let dist = pt.u64s()?;
        if dist.len() != boundary.len() * vertices.len() {
            return Err(bad("malformed piece table"));
        }
        tables.insert(
            q,
            PieceDistanceTable::from_parts(q, boundary, vertices, dist),
        );
    }
    pt.done()?;
    TradeoffOracle::from_loaded(base, r, k, rdiv, ext, vor, tables)
}

pub fn write_to<W: Write>(mut w: W, bytes: &[u8]) -> Result<()> {
    w.write_all(bytes)?;
    Ok(())
}

pub fn read_from<R: Read>(mut r: R) -> Result<OracleFile> {
    let mut data = Vec::new();
    r.read_to_end(&mut data)?;
    from_bytes(&data)
}
