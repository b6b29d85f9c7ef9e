//! Line-oriented update scripts for the dynamic oracle.
//!
//! ```text
//! set_weight <arc> <w>
//! insert_edge <tail> <head> <w> <tail_pos> <head_pos>
//! delete_edge <arc>
//! insert_vertex
//! delete_vertex <v>
//! query <u> <v>
//! ```
//!
//! Blank lines and text after `#` are ignored.

use super::{DynamicOracle, Op};
use crate::error::{Error, Result};
use crate::graph::{DistanceValue, VertexId};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Update(Op),
    Query(VertexId, VertexId),
}

/// A parsed command with its 1-based line number.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Line {
    pub line: usize,
    pub command: Command,
}

/// One answered query.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Answer {
    pub line: usize,
    pub u: VertexId,
    pub v: VertexId,
    pub distance: DistanceValue,
}

pub fn parse_script(text: &str) -> Result<Vec<Line>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("");
        let toks: Vec<&str> = body.split_whitespace().collect();
        let Some((&name, args)) = toks.split_first() else {
            continue;
        };
        let err = |message: String| Error::Parse { line, message };
        let nums = |want: usize| -> Result<Vec<u64>> {
            if args.len() != want {
                return Err(err(format!(
                    "{name} takes {want} arguments, found {}",
                    args.len()
                )));
            }
            args.iter()
                .map(|a| {
                    a.parse::<u64>()
                        .map_err(|_| err(format!("not a nonnegative integer: {a:?}")))
                })
                .collect()
        };
        let id = |x: u64| u32::try_from(x).map_err(|_| err(format!("id {x} out of range")));
        let command = match name {
            "set_weight" => {
                let a = nums(2)?;
                Command::Update(Op::SetWeight {
                    arc: id(a[0])?,
                    weight: a[1],
                })
            }
            "insert_edge" => {
                let a = nums(5)?;
                Command::Update(Op::InsertEdge {
                    tail: id(a[0])?,
                    head: id(a[1])?,
                    weight: a[2],
                    tail_pos: a[3] as usize,
                    head_pos: a[4] as usize,
                })
            }
            "delete_edge" => Command::Update(Op::DeleteEdge {
                arc: id(nums(1)?[0])?,
            }),
            "insert_vertex" => {
                nums(0)?;
                Command::Update(Op::InsertVertex)
            }
            "delete_vertex" => Command::Update(Op::DeleteVertex {
                v: id(nums(1)?[0])?,
            }),
            "query" => {
                let a = nums(2)?;
                Command::Query(id(a[0])?, id(a[1])?)
            }
            other => return Err(err(format!("unknown command {other:?}"))),
        };
        out.push(Line { line, command });
    }
    Ok(out)
}

/// Replay `lines` against `o`, collecting query answers. Stops at the first
/// failing command and reports its line.
pub fn run_script(o: &mut DynamicOracle, lines: &[Line]) -> Result<Vec<Answer>> {
    let mut out = Vec::new();
    for l in lines {
        let at = |e: Error| Error::Parse {
            line: l.line,
            message: e.to_string(),
        };
        match l.command {
            Command::Update(op) => {
                o.apply(op).map_err(at)?;
            }
            Command::Query(u, v) => {
                let distance = o.query(u, v).map_err(at)?;
                out.push(Answer {
                    line: l.line,
                    u,
                    v,
                    distance,
                });
            }
        }
    }
    Ok(out)
}

/// Render an update in script syntax.
pub fn format_op(op: &Op) -> String {
    match *op {
        Op::SetWeight { arc, weight } => format!("set_weight {arc} {weight}"),
        Op::InsertEdge {
            tail,
            head,
            weight,
            tail_pos,
            head_pos,
        } => {
            format!("insert_edge {tail} {head} {weight} {tail_pos} {head_pos}")
        }
        Op::DeleteEdge { arc } => format!("delete_edge {arc}"),
        Op::InsertVertex => "insert_vertex".to_string(),
        Op::DeleteVertex { v } => format!("delete_vertex {v}"),
    }
}
