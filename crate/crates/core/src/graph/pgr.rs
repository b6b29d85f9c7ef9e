//! The `.pgr` text format.
//!
//! ```text
//! n m
//! tail head weight      (m lines, arc i on the i-th of them)
//! a b c ...             (n lines, clockwise rotation of vertex i)
//! ```
//!
//! `#` starts a comment. Blank lines are skipped before the rotation section;
//! inside it every line counts, so an isolated vertex has an empty line.

use std::io::{BufRead, Write};

use super::{Arc, ArcId, EmbeddedPlanarGraph};
use crate::error::{Error, Result};

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

fn parse_num<T: std::str::FromStr>(tok: &str, line: usize, what: &str) -> Result<T> {
    tok.parse().map_err(|_| Error::Parse {
        line,
        message: format!("expected {what}, found {tok:?}"),
    })
}

type Lines<'a> = dyn Iterator<Item = (usize, std::io::Result<String>)> + 'a;

/// Next line with content after comment stripping.
fn next_content(lines: &mut Lines<'_>) -> Result<Option<(usize, String)>> {
    for (no, l) in lines {
        let l = l?;
        if !strip_comment(&l).trim().is_empty() {
            return Ok(Some((no, l)));
        }
    }
    Ok(None)
}

/// Read a graph from `.pgr` text and validate its embedding.
pub fn load_graph<R: BufRead>(reader: R) -> Result<EmbeddedPlanarGraph> {
    let mut lines = reader.lines().enumerate().map(|(i, l)| (i + 1, l));

    let (hline, header) = next_content(&mut lines)?.ok_or(Error::Parse {
        line: 1,
        message: "missing header".into(),
    })?;
    let toks: Vec<&str> = strip_comment(&header).split_whitespace().collect();
    if toks.len() != 2 {
        return Err(Error::Parse {
            line: hline,
            message: "header must be \"n m\"".into(),
        });
    }
    let n: usize = parse_num(toks[0], hline, "vertex count")?;
    let m: usize = parse_num(toks[1], hline, "arc count")?;
    if n > u32::MAX as usize / 2 || m > u32::MAX as usize / 2 {
        return Err(Error::SizeOverflow(format!("{n} vertices, {m} arcs")));
    }

    let mut arcs = Vec::with_capacity(m);
    let mut last_line = hline;
    for _ in 0..m {
        let (no, l) = next_content(&mut lines)?.ok_or(Error::Parse {
            line: last_line + 1,
            message: format!("expected {m} arc lines"),
        })?;
        last_line = no;
        let toks: Vec<&str> = strip_comment(&l).split_whitespace().collect();
        if toks.len() != 3 {
            return Err(Error::Parse {
                line: no,
                message: "arc line must be \"tail head weight\"".into(),
            });
        }
        let tail: u32 = parse_num(toks[0], no, "tail")?;
        let head: u32 = parse_num(toks[1], no, "head")?;
        let weight: u64 = parse_num(toks[2], no, "nonnegative weight")?;
        if tail as usize >= n || head as usize >= n {
            return Err(Error::Parse {
                line: no,
                message: format!("vertex id out of range 0..{n}"),
            });
        }
        arcs.push(Arc { tail, head, weight });
    }

    let mut rotation = Vec::with_capacity(n);
    for _ in 0..n {
        let Some((no, l)) = lines.next() else {
            return Err(Error::Parse {
                line: last_line + 1,
                message: format!("expected {n} rotation lines"),
            });
        };
        let l = l?;
        last_line = no;
        let mut rot = Vec::new();
        for tok in strip_comment(&l).split_whitespace() {
            let a: ArcId = parse_num(tok, no, "arc index")?;
            if a as usize >= m {
                return Err(Error::Parse {
                    line: no,
                    message: format!("arc index {a} out of range 0..{m}"),
                });
            }
            rot.push(a);
        }
        rotation.push(rot);
    }
    for (no, l) in lines {
        if !strip_comment(&l?).trim().is_empty() {
            return Err(Error::Parse {
                line: no,
                message: "trailing content after rotation section".into(),
            });
        }
    }
    EmbeddedPlanarGraph::new(n, arcs, rotation)
}

/// Parse a graph from an in-memory string.
pub fn parse_graph(text: &str) -> Result<EmbeddedPlanarGraph> {
    load_graph(text.as_bytes())
}

/// Write `g` in `.pgr` format. The output depends only on the graph.
pub fn save_graph<W: Write>(g: &EmbeddedPlanarGraph, mut w: W) -> Result<()> {
    writeln!(w, "{} {}", g.vertex_count(), g.arc_count())?;
    for a in g.arcs() {
        writeln!(w, "{} {} {}", a.tail, a.head, a.weight)?;
    }
    for rot in g.rotations() {
        let mut first = true;
        for a in rot {
            if !first {
                w.write_all(b" ")?;
            }
            write!(w, "{a}")?;
            first = false;
        }
        w.write_all(b"\n")?;
    }
    Ok(())
}

pub fn to_pgr_string(g: &EmbeddedPlanarGraph) -> String {
    let mut buf = Vec::new();
    save_graph(g, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("pgr output is ASCII")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generate::{grid, WeightMode};

    #[test]
    fn minimal_file() {
        let g = parse_graph("2 1\n0 1 5\n0\n0\n").unwrap();
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(g.arc_count(), 1);
        assert_eq!(g.arc(0).weight, 5);
    }

    #[test]
    fn comments_and_blank_lines_before_rotations() {
        let text = "# tiny\n2 1 # header\n\n0 1 5 # only arc\n0\n0\n";
        assert_eq!(parse_graph(text).unwrap().arc_count(), 1);
    }

    #[test]
    fn isolated_vertex_uses_an_empty_rotation_line() {
        let g = parse_graph("3 1\n0 1 2\n0\n0\n\n").unwrap();
        assert_eq!(g.vertex_count(), 3);
        assert!(g.rotation(2).is_empty());
    }

    #[test]
    fn grid_round_trips() {
        let g = grid(3, 3, WeightMode::Unit).unwrap();
        let text = to_pgr_string(&g);
        let back = parse_graph(&text).unwrap();
        assert_eq!(back, g);
        assert_eq!(to_pgr_string(&back), text);
    }

    #[test]
    fn missing_rotation_entry_is_an_embedding_error() {
        let err = parse_graph("2 1\n0 1 5\n0\n\n").unwrap_err();
        assert!(matches!(err, Error::InvalidEmbedding(_)), "{err}");
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        match parse_graph("2 1\n0 x 5\n0\n0\n").unwrap_err() {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            e => panic!("unexpected {e}"),
        }
        match parse_graph("2 1\n0 1 -5\n0\n0\n").unwrap_err() {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn overflowing_weights_are_rejected() {
        let text = format!("3 2\n0 1 {}\n1 2 {}\n0\n0 1\n1\n", 1u64 << 62, 1u64 << 62);
        assert!(matches!(
            parse_graph(&text).unwrap_err(),
            Error::WeightOverflow
        ));
    }

    #[test]
    fn self_loops_and_parallel_arcs_are_rejected() {
        assert!(parse_graph("1 1\n0 0 1\n0 0\n").is_err());
        assert!(parse_graph("2 2\n0 1 1\n0 1 2\n0 1\n0 1\n").is_err());
    }
}
