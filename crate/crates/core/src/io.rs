//! Text formats: edge lists and dense matrices.
//!
//! Edge list:
//!
//! ```text
//! # comment
//! n 3 directed
//! 0 1 1.5
//! 1 2 2
//! ```
//!
//! The header is `n <count> [directed|undirected]` (directed when omitted).
//! Body lines are `u v [w]` with 0-based vertices; a missing weight is 1.
//! Dense matrices are rows of whitespace-separated decimals, `inf`/`-inf`
//! allowed.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::matrix::MatrixBuffer;
use crate::semiring::PrecisionMode;

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })
}

/// Yields `(1-based line number, content)` for non-blank lines, comments stripped.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let line = line.split('#').next().unwrap_or("").trim();
        (!line.is_empty()).then_some((i + 1, line))
    })
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn parse_value(line: usize, tok: &str) -> Result<f32> {
    let v: f32 = tok
        .parse()
        .map_err(|_| parse_err(line, format!("'{tok}' is not a number")))?;
    if v.is_nan() {
        return Err(parse_err(line, "NaN is not a valid value"));
    }
    Ok(v)
}

pub fn parse_edge_list(path: impl AsRef<Path>) -> Result<Graph> {
    parse_edge_list_str(&read(path.as_ref())?)
}

pub fn parse_edge_list_str(text: &str) -> Result<Graph> {
    let mut lines = content_lines(text);
    let (hline, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, "missing 'n <count>' header"))?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    let (n, directed) = match toks.as_slice() {
        ["n", count, rest @ ..] if rest.len() <= 1 => {
            let n: usize = count
                .parse()
                .map_err(|_| parse_err(hline, format!("bad vertex count '{count}'")))?;
            let directed = match rest.first() {
                None | Some(&"directed") => true,
                Some(&"undirected") => false,
                Some(other) => return Err(parse_err(hline, format!("unknown graph kind '{other}'"))),
            };
            (n, directed)
        }
        _ => return Err(parse_err(hline, "expected 'n <count> [directed|undirected]'")),
    };

    let mut g = Graph::new(n, directed);
    for (lineno, line) in lines {
        let toks: Vec<&str> = line.split_whitespace().collect();
        if !(2..=3).contains(&toks.len()) {
            return Err(parse_err(lineno, "expected 'u v [w]'"));
        }
        let vertex = |tok: &str| -> Result<usize> {
            let index: usize = tok
                .parse()
                .map_err(|_| parse_err(lineno, format!("'{tok}' is not a vertex index")))?;
            if index >= n {
                return Err(Error::Index {
                    line: lineno,
                    index,
                    n,
                });
            }
            Ok(index)
        };
        let (u, v) = (vertex(toks[0])?, vertex(toks[1])?);
        let w = toks.get(2).map_or(Ok(1.0), |t| parse_value(lineno, t))?;
        if !w.is_finite() {
            return Err(parse_err(lineno, "edge weights must be finite"));
        }
        g.add_edge(u, v, w)?;
    }
    Ok(g)
}

pub fn format_edge_list(g: &Graph) -> String {
    let mut out = format!(
        "n {} {}\n",
        g.n(),
        if g.is_directed() { "directed" } else { "undirected" }
    );
    for e in g.edges() {
        let _ = writeln!(out, "{} {} {}", e.u, e.v, e.w);
    }
    out
}

pub fn write_edge_list(path: impl AsRef<Path>, g: &Graph) -> Result<()> {
    write_file(path.as_ref(), &format_edge_list(g))
}

pub fn parse_dense_matrix(path: impl AsRef<Path>, mode: PrecisionMode) -> Result<MatrixBuffer> {
    parse_dense_matrix_str(&read(path.as_ref())?, mode)
}

pub fn parse_dense_matrix_str(text: &str, mode: PrecisionMode) -> Result<MatrixBuffer> {
    let mut data = Vec::new();
    let mut rows = 0;
    let mut cols = None;
    for (lineno, line) in content_lines(text) {
        let before = data.len();
        for tok in line.split_whitespace() {
            data.push(parse_value(lineno, tok)?);
        }
        let width = data.len() - before;
        match cols {
            None => cols = Some(width),
            Some(c) if c != width => {
                return Err(parse_err(lineno, format!("row has {width} values, expected {c}")));
            }
            _ => {}
        }
        rows += 1;
    }
    MatrixBuffer::from_vec(rows, cols.unwrap_or(0), data, mode)
}

/// One row per line; f32 `Display` gives the shortest decimal that parses
/// back to the same value.
pub fn format_dense_matrix(buf: &MatrixBuffer) -> String {
    let mut out = String::new();
    for r in 0..buf.rows() {
        let row: Vec<String> = buf.row(r).iter().map(|v| v.to_string()).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

pub fn write_dense_matrix(path: impl AsRef<Path>, buf: &MatrixBuffer) -> Result<()> {
    write_file(path.as_ref(), &format_dense_matrix(buf))
}
