//! Line-based text format for a tree together with a map on it.
//!
//! ```text
//! treedyn 1
//! vertex <id>
//! edge <id> <v-from> <v-to> <len>
//! map
//! piece <edge-id> <t0> <t1> -> <point> [via <vertex-id>...] <point>
//! ```
//!
//! Points are `<edge-id>@<offset>` or `v:<vertex-id>`, rationals `p/q` or
//! `p`, and `#` starts a comment. The `via` list names the vertices strictly
//! inside the image geodesic; it is optional on input and always written.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::map::{Piece, PlMap};
use crate::scalar::{parse_scalar, Scalar};
use crate::tree::{Edge, FiniteTree, TreePoint};

const HEADER: &str = "treedyn 1";

#[derive(Debug, Clone)]
struct Token<'a> {
    text: &'a str,
    line: usize,
    column: usize,
}

fn tokens(line_no: usize, line: &str) -> Vec<Token<'_>> {
    let body = line.split('#').next().unwrap_or("");
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    for (i, c) in body.char_indices().chain(std::iter::once((body.len(), ' '))) {
        match (c.is_whitespace(), start) {
            (true, Some(s)) => {
                out.push(Token {
                    text: &body[s..i],
                    line: line_no,
                    column: body[..s].chars().count() + 1,
                });
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    out
}

fn err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

fn at(t: &Token<'_>, message: impl Into<String>) -> Error {
    err(t.line, t.column, message)
}

fn rational<S: Scalar>(t: &Token<'_>) -> Result<S> {
    parse_scalar(t.text).ok_or_else(|| at(t, format!("expected a rational, got `{}`", t.text)))
}

struct Raw<'a> {
    head: Token<'a>,
    edge: Token<'a>,
    start: Token<'a>,
    end: Token<'a>,
    from: Token<'a>,
    via: Vec<Token<'a>>,
    to: Token<'a>,
}

/// Parses a map file. Syntax and reference errors carry a line and column;
/// structural problems (cycles, discontinuity) are validation errors.
pub fn parse_map<S: Scalar>(input: &str) -> Result<PlMap<S>> {
    let mut lines = input
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, tokens(i + 1, l)))
        .filter(|(_, t)| !t.is_empty());

    let (hline, header) = lines.next().ok_or_else(|| err(1, 1, "empty input"))?;
    let joined: Vec<&str> = header.iter().map(|t| t.text).collect();
    if joined.join(" ") != HEADER {
        return Err(err(hline, header[0].column, format!("expected header `{HEADER}`")));
    }

    let mut vertex_ids: Vec<String> = Vec::new();
    let mut vertex_index: HashMap<String, usize> = HashMap::new();
    let mut edges: Vec<Edge<S>> = Vec::new();
    let mut raw: Vec<Raw<'_>> = Vec::new();
    let mut in_map = false;

    for (_, toks) in lines {
        let kw = &toks[0];
        let expect = |n: usize, shape: &str| -> Result<()> {
            if toks.len() != n {
                Err(at(kw, format!("expected `{shape}`")))
            } else {
                Ok(())
            }
        };
        match (kw.text, in_map) {
            ("vertex", false) => {
                expect(2, "vertex <id>")?;
                let id = toks[1].text.to_string();
                if vertex_index.insert(id.clone(), vertex_ids.len()).is_some() {
                    return Err(at(&toks[1], format!("duplicate vertex `{id}`")));
                }
                vertex_ids.push(id);
            }
            ("edge", false) => {
                expect(5, "edge <id> <v-from> <v-to> <len>")?;
                let end = |t: &Token<'_>| {
                    vertex_index
                        .get(t.text)
                        .copied()
                        .ok_or_else(|| at(t, format!("unknown vertex `{}`", t.text)))
                };
                edges.push(Edge {
                    id: toks[1].text.to_string(),
                    from: end(&toks[2])?,
                    to: end(&toks[3])?,
                    length: rational(&toks[4])?,
                });
            }
            ("map", false) => {
                expect(1, "map")?;
                in_map = true;
            }
            ("piece", true) => {
                if toks.len() < 7 || toks[4].text != "->" {
                    return Err(at(kw, "expected `piece <edge> <t0> <t1> -> <point> [via <vertex>...] <point>`"));
                }
                let mut via = Vec::new();
                let rest = &toks[6..];
                let to = if rest.len() == 1 {
                    rest[0].clone()
                } else {
                    if rest[0].text != "via" {
                        return Err(at(&rest[0], "expected `via` or end of line"));
                    }
                    if rest.len() < 3 {
                        return Err(at(&rest[0], "`via` needs at least one vertex and a target point"));
                    }
                    via.extend(rest[1..rest.len() - 1].iter().cloned());
                    rest[rest.len() - 1].clone()
                };
                raw.push(Raw {
                    head: kw.clone(),
                    edge: toks[1].clone(),
                    start: toks[2].clone(),
                    end: toks[3].clone(),
                    from: toks[5].clone(),
                    via,
                    to,
                });
            }
            ("piece", false) => return Err(at(kw, "`piece` before `map`")),
            ("vertex" | "edge" | "map", true) => return Err(at(kw, format!("`{}` after `map`", kw.text))),
            (other, _) => return Err(at(kw, format!("unknown keyword `{other}`"))),
        }
    }
    if !in_map {
        return Err(err(1, 1, "missing `map` section"));
    }

    let tree = Arc::new(FiniteTree::new(vertex_ids, edges)?);
    let point = |t: &Token<'_>| -> Result<TreePoint<S>> {
        tree.parse_point(t.text).map_err(|e| match e {
            Error::Parse { message, .. } => at(t, message),
            other => at(t, other.to_string()),
        })
    };
    let mut pieces: Vec<Vec<Piece<S>>> = vec![Vec::new(); tree.edge_count()];
    for r in &raw {
        let e = tree
            .edge_by_id(r.edge.text)
            .ok_or_else(|| at(&r.edge, format!("unknown edge `{}`", r.edge.text)))?;
        let from = point(&r.from)?;
        let to = point(&r.to)?;
        if !r.via.is_empty() {
            let inner = inner_vertices(&tree, &from, &to);
            let given: Vec<&str> = r.via.iter().map(|t| t.text).collect();
            let want: Vec<&str> = inner.iter().map(|&v| tree.vertex_id(v)).collect();
            if given != want {
                return Err(at(
                    &r.via[0],
                    format!("via list does not match the geodesic (expected `{}`)", want.join(" ")),
                ));
            }
        }
        let start: S = rational(&r.start)?;
        let end: S = rational(&r.end)?;
        if start >= end {
            return Err(at(&r.head, "piece needs t0 < t1"));
        }
        pieces[e].push(Piece { start, end, from, to });
    }
    for list in &mut pieces {
        list.sort_by(|a, b| a.start.cmp(&b.start));
    }
    PlMap::new(tree, pieces)
}

// Vertices strictly inside the geodesic from `p` to `q`, in order.
fn inner_vertices<S: Scalar>(tree: &FiniteTree<S>, p: &TreePoint<S>, q: &TreePoint<S>) -> Vec<usize> {
    let segs = tree.segments_between(p, q);
    segs.iter()
        .skip(1)
        .filter_map(|s| match tree.point_unchecked(s.edge, s.start.clone()) {
            TreePoint::Vertex(v) => Some(v),
            _ => None,
        })
        .collect()
}

/// Canonical serialization: vertices and edges in tree order, pieces in
/// edge order, full `via` lists.
pub fn serialize_map<S: Scalar>(f: &PlMap<S>) -> String {
    let tree = f.tree();
    let mut out = String::new();
    out.push_str(HEADER);
    out.push('\n');
    for id in tree.vertex_ids() {
        out.push_str(&format!("vertex {id}\n"));
    }
    for e in tree.edges() {
        out.push_str(&format!(
            "edge {} {} {} {}\n",
            e.id,
            tree.vertex_id(e.from),
            tree.vertex_id(e.to),
            e.length
        ));
    }
    out.push_str("map\n");
    for (i, e) in tree.edges().iter().enumerate() {
        for p in f.pieces(i) {
            out.push_str(&format!(
                "piece {} {} {} -> {}",
                e.id,
                p.start,
                p.end,
                tree.format_point(&p.from)
            ));
            let inner = inner_vertices(tree, &p.from, &p.to);
            if !inner.is_empty() {
                out.push_str(" via");
                for v in inner {
                    out.push(' ');
                    out.push_str(tree.vertex_id(v));
                }
            }
            out.push(' ');
            out.push_str(&tree.format_point(&p.to));
            out.push('\n');
        }
    }
    out
}
