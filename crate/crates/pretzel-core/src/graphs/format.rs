//! Text and DOT renderings of birooted graphs.
//!
//! The text format is line oriented and bit-stable: writing a graph and
//! parsing the result yields the same graph, identically numbered.
//!
//! ```text
//! alphabet: x y
//! vertices: 5
//! start: 0
//! end: 4
//! edge: 0 x 1
//! edge: 1 y 2
//! ```

use super::{BirootedGraph, Edge, GraphError, Label, VertexId};
use std::collections::BTreeSet;
use std::fmt::Write as _;

pub fn write_graph(g: &BirootedGraph) -> String {
    let mut out = String::new();
    let alpha: Vec<String> = g.alphabet().iter().map(|l| l.0.to_string()).collect();
    writeln!(out, "alphabet: {}", alpha.join(" ")).unwrap();
    writeln!(out, "vertices: {}", g.n_vertices()).unwrap();
    writeln!(out, "start: {}", g.start()).unwrap();
    writeln!(out, "end: {}", g.end()).unwrap();
    for &(s, l, t) in g.edges() {
        writeln!(out, "edge: {} {} {}", s, l, t).unwrap();
    }
    out
}

pub fn parse_graph(src: &str) -> Result<BirootedGraph, GraphError> {
    let mut alphabet: Option<Vec<Label>> = None;
    let mut n_vertices: Option<usize> = None;
    let mut start: Option<VertexId> = None;
    let mut end: Option<VertexId> = None;
    let mut edges: BTreeSet<Edge> = BTreeSet::new();
    let err = |line: usize, msg: &str| GraphError::Parse {
        line,
        msg: msg.to_string(),
    };
    for (i, raw) in src.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, rest) = line
            .split_once(':')
            .ok_or_else(|| err(line_no, "expected `key: value`"))?;
        let rest = rest.trim();
        match key.trim() {
            "alphabet" => {
                let mut labels = Vec::new();
                for tok in rest.split_whitespace() {
                    let mut chars = tok.chars();
                    let c = chars.next().ok_or_else(|| err(line_no, "empty label"))?;
                    if chars.next().is_some() {
                        return Err(err(line_no, "labels are single characters"));
                    }
                    if labels.contains(&Label(c)) {
                        return Err(err(line_no, "duplicate label"));
                    }
                    labels.push(Label(c));
                }
                alphabet = Some(labels);
            }
            "vertices" => {
                n_vertices =
                    Some(rest.parse().map_err(|_| err(line_no, "bad vertex count"))?);
            }
            "start" => {
                start = Some(rest.parse().map_err(|_| err(line_no, "bad start vertex"))?);
            }
            "end" => {
                end = Some(rest.parse().map_err(|_| err(line_no, "bad end vertex"))?);
            }
            "edge" => {
                let parts: Vec<&str> = rest.split_whitespace().collect();
                if parts.len() != 3 {
                    return Err(err(line_no, "expected `edge: src label dst`"));
                }
                let s: VertexId = parts[0]
                    .parse()
                    .map_err(|_| err(line_no, "bad edge source"))?;
                let mut chars = parts[1].chars();
                let c = chars.next().ok_or_else(|| err(line_no, "empty label"))?;
                if chars.next().is_some() {
                    return Err(err(line_no, "labels are single characters"));
                }
                let t: VertexId = parts[2]
                    .parse()
                    .map_err(|_| err(line_no, "bad edge target"))?;
                edges.insert((s, Label(c), t));
            }
            other => {
                return Err(GraphError::Parse {
                    line: line_no,
                    msg: format!("unknown key `{other}`"),
                });
            }
        }
    }
    let alphabet = alphabet.ok_or_else(|| err(0, "missing `alphabet:` line"))?;
    let n_vertices = n_vertices.ok_or_else(|| err(0, "missing `vertices:` line"))?;
    let start = start.ok_or_else(|| err(0, "missing `start:` line"))?;
    let end = end.ok_or_else(|| err(0, "missing `end:` line"))?;
    BirootedGraph::new(alphabet, n_vertices, edges, start, end)
}

/// Graphviz rendering. The start vertex is annotated `+`, the end `×`,
/// coincident roots `⊕×`.
pub fn export_dot(g: &BirootedGraph) -> String {
    let mut out = String::new();
    writeln!(out, "digraph pretzel {{").unwrap();
    writeln!(out, "  rankdir=LR;").unwrap();
    writeln!(out, "  node [shape=circle];").unwrap();
    for v in 0..g.n_vertices() {
        let mark = if v == g.start() && v == g.end() {
            "⊕×"
        } else if v == g.start() {
            "+"
        } else if v == g.end() {
            "×"
        } else {
            ""
        };
        writeln!(out, "  v{v} [label=\"{mark}\"];").unwrap();
    }
    for &(s, l, t) in g.edges() {
        writeln!(out, "  v{s} -> v{t} [label=\"{l}\"];").unwrap();
    }
    writeln!(out, "}}").unwrap();
    out
}
