//! Finite metric trees with exact positive edge lengths.
//!
//! Points are stored canonically: anything sitting on a vertex is
//! [`TreePoint::Vertex`], everything else is an interior offset on exactly
//! one edge, so `==` on points is a syntactic check.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::region::{RegionSet, Subtree};
use crate::scalar::{parse_scalar, Scalar};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge<S> {
    pub id: String,
    pub from: usize,
    pub to: usize,
    pub length: S,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TreePoint<S> {
    Vertex(usize),
    /// `0 < offset < length`, measured from the edge's `from` vertex.
    Interior { edge: usize, offset: S },
}

/// A directed piece of one edge, `start != end`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Segment<S> {
    pub edge: usize,
    pub start: S,
    pub end: S,
}

impl<S: Scalar> Segment<S> {
    pub fn length(&self) -> S {
        (self.end.clone() - self.start.clone()).abs()
    }

    pub fn forward(&self) -> bool {
        self.end > self.start
    }

    pub fn low(&self) -> &S {
        if self.forward() {
            &self.start
        } else {
            &self.end
        }
    }

    pub fn high(&self) -> &S {
        if self.forward() {
            &self.end
        } else {
            &self.start
        }
    }
}

/// The unique geodesic between two distinct points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arc<S> {
    pub start: TreePoint<S>,
    pub end: TreePoint<S>,
    pub segments: Vec<Segment<S>>,
    pub length: S,
}

impl<S: Scalar> Arc<S> {
    pub fn point_at(&self, tree: &FiniteTree<S>, s: &S) -> TreePoint<S> {
        tree.point_on_segments(&self.segments, s)
    }

    /// Arc-length position of `p` measured from `start`, if `p` lies on the arc.
    pub fn param_of(&self, tree: &FiniteTree<S>, p: &TreePoint<S>) -> Option<S> {
        if *p == self.start {
            return Some(S::zero());
        }
        tree.param_on_segments(&self.segments, p)
    }

    pub fn contains(&self, tree: &FiniteTree<S>, p: &TreePoint<S>) -> bool {
        self.param_of(tree, p).is_some()
    }

    pub fn to_region(&self, tree: &FiniteTree<S>) -> RegionSet<S> {
        RegionSet::from_segments(tree, &self.segments)
    }
}

/// One connected component of `X \ {base}`, identified by the direction in
/// which geodesics leave `base` to reach it.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Component<S> {
    pub base: TreePoint<S>,
    pub edge: usize,
    /// True when the component lies toward the edge's `to` vertex.
    pub toward_to: bool,
}

impl<S: Scalar> Component<S> {
    pub fn contains(&self, tree: &FiniteTree<S>, p: &TreePoint<S>) -> bool {
        if *p == self.base {
            return false;
        }
        let segs = tree.segments_between(&self.base, p);
        let first = &segs[0];
        first.edge == self.edge && first.forward() == self.toward_to
    }

    /// The closure `Y ∪ {base}` as a subtree.
    pub fn closure(&self, tree: &FiniteTree<S>) -> Subtree<S> {
        let edge = &tree.edges[self.edge];
        let mut region = RegionSet::empty();
        let (start, far_vertex) = match (&self.base, self.toward_to) {
            (TreePoint::Vertex(_), true) => (S::zero(), edge.to),
            (TreePoint::Vertex(_), false) => (edge.length.clone(), edge.from),
            (TreePoint::Interior { offset, .. }, true) => (offset.clone(), edge.to),
            (TreePoint::Interior { offset, .. }, false) => (offset.clone(), edge.from),
        };
        let (lo, hi) = if self.toward_to {
            (start, edge.length.clone())
        } else {
            (S::zero(), start)
        };
        region.push_interval(self.edge, lo, hi);
        for e in tree.edges_beyond(far_vertex, self.edge) {
            region.push_interval(e, S::zero(), tree.edges[e].length.clone());
        }
        region.push_vertex(far_vertex);
        region.normalize(tree);
        Subtree::new(tree, region).expect("component closures are connected")
    }
}

#[derive(Debug, Clone)]
pub struct FiniteTree<S> {
    vertex_ids: Vec<String>,
    edges: Vec<Edge<S>>,
    incident: Vec<Vec<usize>>,
    // hop[u][v]: first edge on the vertex path from u to v
    hop: Vec<Vec<usize>>,
    vdist: Vec<Vec<S>>,
    vertex_index: HashMap<String, usize>,
    edge_index: HashMap<String, usize>,
}

impl<S: PartialEq> PartialEq for FiniteTree<S> {
    fn eq(&self, other: &Self) -> bool {
        self.vertex_ids == other.vertex_ids && self.edges == other.edges
    }
}

impl<S: Eq> Eq for FiniteTree<S> {}

fn valid_id(id: &str) -> bool {
    !id.is_empty()
        && id
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-' || c == '.')
}

impl<S: Scalar> FiniteTree<S> {
    pub fn new(vertex_ids: Vec<String>, edges: Vec<Edge<S>>) -> Result<Self> {
        let mut vertex_index = HashMap::new();
        for (i, id) in vertex_ids.iter().enumerate() {
            if !valid_id(id) {
                return Err(Error::Validation(format!("invalid vertex id `{id}`")));
            }
            if vertex_index.insert(id.clone(), i).is_some() {
                return Err(Error::Validation(format!("duplicate vertex `{id}`")));
            }
        }
        if edges.is_empty() {
            return Err(Error::Validation("tree needs at least one edge".into()));
        }
        let mut edge_index = HashMap::new();
        let mut incident = vec![Vec::new(); vertex_ids.len()];
        for (i, e) in edges.iter().enumerate() {
            if !valid_id(&e.id) {
                return Err(Error::Validation(format!("invalid edge id `{}`", e.id)));
            }
            if edge_index.insert(e.id.clone(), i).is_some() {
                return Err(Error::Validation(format!("duplicate edge `{}`", e.id)));
            }
            if e.from >= vertex_ids.len() || e.to >= vertex_ids.len() {
                return Err(Error::Validation(format!("edge `{}` has unknown endpoint", e.id)));
            }
            if e.from == e.to {
                return Err(Error::Validation(format!("cycle: edge `{}` is a loop", e.id)));
            }
            if e.length <= S::zero() {
                return Err(Error::Validation(format!("edge `{}` has non-positive length", e.id)));
            }
            incident[e.from].push(i);
            incident[e.to].push(i);
        }

        let n = vertex_ids.len();
        // Union-find catches cycles with the offending edge named.
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for e in &edges {
            let (a, b) = (find(&mut parent, e.from), find(&mut parent, e.to));
            if a == b {
                return Err(Error::Validation(format!("cycle through edge `{}`", e.id)));
            }
            parent[a] = b;
        }
        if edges.len() + 1 != n {
            return Err(Error::Validation("tree is disconnected".into()));
        }

        let mut hop = vec![vec![usize::MAX; n]; n];
        let mut vdist = vec![vec![S::zero(); n]; n];
        for src in 0..n {
            // DFS from src; hop[v][src] is the edge leading back toward src
            let mut stack = vec![src];
            let mut seen = vec![false; n];
            seen[src] = true;
            while let Some(v) = stack.pop() {
                for &e in &incident[v] {
                    let w = if edges[e].from == v { edges[e].to } else { edges[e].from };
                    if !seen[w] {
                        seen[w] = true;
                        hop[w][src] = e;
                        vdist[w][src] = vdist[v][src].clone() + edges[e].length.clone();
                        stack.push(w);
                    }
                }
            }
        }

        Ok(FiniteTree {
            vertex_ids,
            edges,
            incident,
            hop,
            vdist,
            vertex_index,
            edge_index,
        })
    }

    /// Builds a tree from string ids; edges are `(id, from, to, length)`.
    pub fn from_named(vertices: &[&str], edges: &[(&str, &str, &str, S)]) -> Result<Self> {
        let vertex_ids: Vec<String> = vertices.iter().map(|s| s.to_string()).collect();
        let index: HashMap<&str, usize> = vertices.iter().enumerate().map(|(i, v)| (*v, i)).collect();
        let mut out = Vec::new();
        for (id, a, b, len) in edges {
            let from = *index
                .get(a)
                .ok_or_else(|| Error::Validation(format!("unknown vertex `{a}`")))?;
            let to = *index
                .get(b)
                .ok_or_else(|| Error::Validation(format!("unknown vertex `{b}`")))?;
            out.push(Edge {
                id: id.to_string(),
                from,
                to,
                length: len.clone(),
            });
        }
        Self::new(vertex_ids, out)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge<S>] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> &Edge<S> {
        &self.edges[e]
    }

    pub fn vertex_ids(&self) -> &[String] {
        &self.vertex_ids
    }

    pub fn vertex_id(&self, v: usize) -> &str {
        &self.vertex_ids[v]
    }

    pub fn vertex_by_id(&self, id: &str) -> Option<usize> {
        self.vertex_index.get(id).copied()
    }

    pub fn edge_by_id(&self, id: &str) -> Option<usize> {
        self.edge_index.get(id).copied()
    }

    pub fn incident(&self, v: usize) -> &[usize] {
        &self.incident[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.incident[v].len()
    }

    pub fn is_branching(&self, v: usize) -> bool {
        self.degree(v) >= 3
    }

    pub fn total_length(&self) -> S {
        self.edges.iter().fold(S::zero(), |acc, e| acc + e.length.clone())
    }

    pub fn other_end(&self, e: usize, v: usize) -> usize {
        let edge = &self.edges[e];
        if edge.from == v {
            edge.to
        } else {
            edge.from
        }
    }

    /// Offset of vertex `v` on edge `e` (0 or the edge length).
    pub fn vertex_offset(&self, e: usize, v: usize) -> S {
        if self.edges[e].from == v {
            S::zero()
        } else {
            self.edges[e].length.clone()
        }
    }

    /// Canonical point at `offset` along edge `e`.
    pub fn point(&self, e: usize, offset: S) -> Result<TreePoint<S>> {
        let edge = &self.edges[e];
        if offset < S::zero() || offset > edge.length {
            return Err(Error::Validation(format!(
                "offset {offset} outside edge `{}` of length {}",
                edge.id, edge.length
            )));
        }
        Ok(self.point_unchecked(e, offset))
    }

    pub(crate) fn point_unchecked(&self, e: usize, offset: S) -> TreePoint<S> {
        let edge = &self.edges[e];
        if offset.is_zero() {
            TreePoint::Vertex(edge.from)
        } else if offset == edge.length {
            TreePoint::Vertex(edge.to)
        } else {
            TreePoint::Interior { edge: e, offset }
        }
    }

    /// Every `(edge, offset)` pair naming `p`.
    pub fn representations(&self, p: &TreePoint<S>) -> Vec<(usize, S)> {
        match p {
            TreePoint::Vertex(v) => self.incident[*v]
                .iter()
                .map(|&e| (e, self.vertex_offset(e, *v)))
                .collect(),
            TreePoint::Interior { edge, offset } => vec![(*edge, offset.clone())],
        }
    }

    /// Some `(edge, offset)` naming `p`.
    pub fn representation(&self, p: &TreePoint<S>) -> (usize, S) {
        match p {
            TreePoint::Vertex(v) => {
                let e = self.incident[*v][0];
                (e, self.vertex_offset(e, *v))
            }
            TreePoint::Interior { edge, offset } => (*edge, offset.clone()),
        }
    }

    /// Order of `p`: the number of components of `X \ {p}`.
    pub fn order(&self, p: &TreePoint<S>) -> usize {
        match p {
            TreePoint::Vertex(v) => self.degree(*v),
            TreePoint::Interior { .. } => 2,
        }
    }

    fn exits(&self, p: &TreePoint<S>) -> Vec<(usize, S, Option<Segment<S>>)> {
        match p {
            TreePoint::Vertex(v) => vec![(*v, S::zero(), None)],
            TreePoint::Interior { edge, offset } => {
                let e = &self.edges[*edge];
                vec![
                    (
                        e.from,
                        offset.clone(),
                        Some(Segment {
                            edge: *edge,
                            start: offset.clone(),
                            end: S::zero(),
                        }),
                    ),
                    (
                        e.to,
                        e.length.clone() - offset.clone(),
                        Some(Segment {
                            edge: *edge,
                            start: offset.clone(),
                            end: e.length.clone(),
                        }),
                    ),
                ]
            }
        }
    }

    fn shared_edge(&self, p: &TreePoint<S>, q: &TreePoint<S>) -> Option<(usize, S, S)> {
        for (e, a) in self.representations(p) {
            for (f, b) in self.representations(q) {
                if e == f {
                    return Some((e, a, b));
                }
            }
        }
        None
    }

    // Best exit/entry vertex pair for points not sharing an edge.
    fn route(&self, p: &TreePoint<S>, q: &TreePoint<S>) -> (usize, usize, S) {
        let mut best: Option<(usize, usize, S)> = None;
        for (u, cu, _) in self.exits(p) {
            for (w, cw, _) in self.exits(q) {
                let total = cu.clone() + self.vdist[u][w].clone() + cw;
                if best.as_ref().map_or(true, |b| total < b.2) {
                    best = Some((u, w, total));
                }
            }
        }
        best.expect("every point has an exit")
    }

    /// Path metric.
    pub fn distance(&self, p: &TreePoint<S>, q: &TreePoint<S>) -> S {
        if p == q {
            return S::zero();
        }
        if let Some((_, a, b)) = self.shared_edge(p, q) {
            return (a - b).abs();
        }
        self.route(p, q).2
    }

    /// Consecutive segments from `p` to `q`; empty when `p == q`.
    pub fn segments_between(&self, p: &TreePoint<S>, q: &TreePoint<S>) -> Vec<Segment<S>> {
        if p == q {
            return Vec::new();
        }
        if let Some((e, a, b)) = self.shared_edge(p, q) {
            return vec![Segment {
                edge: e,
                start: a,
                end: b,
            }];
        }
        let (u, w, _) = self.route(p, q);
        let mut segs = Vec::new();
        if let Some((_, _, Some(seg))) = self.exits(p).into_iter().find(|x| x.0 == u) {
            segs.push(seg);
        }
        let mut cur = u;
        while cur != w {
            let e = self.hop[cur][w];
            let next = self.other_end(e, cur);
            segs.push(Segment {
                edge: e,
                start: self.vertex_offset(e, cur),
                end: self.vertex_offset(e, next),
            });
            cur = next;
        }
        if let Some((_, _, Some(seg))) = self.exits(q).into_iter().find(|x| x.0 == w) {
            segs.push(Segment {
                edge: seg.edge,
                start: seg.end,
                end: seg.start,
            });
        }
        segs
    }

    pub fn geodesic(&self, p: &TreePoint<S>, q: &TreePoint<S>) -> Result<Arc<S>> {
        if p == q {
            return Err(Error::DegeneratePoint);
        }
        let segments = self.segments_between(p, q);
        let length = segments.iter().fold(S::zero(), |acc, s| acc + s.length());
        Ok(Arc {
            start: p.clone(),
            end: q.clone(),
            segments,
            length,
        })
    }

    /// Point at arc length `s` along `segs` (clamped to the ends).
    pub fn point_on_segments(&self, segs: &[Segment<S>], s: &S) -> TreePoint<S> {
        let mut remaining = s.clone();
        for (i, seg) in segs.iter().enumerate() {
            let len = seg.length();
            if remaining <= len || i + 1 == segs.len() {
                let r = if remaining > len { len } else { remaining };
                let offset = if seg.forward() {
                    seg.start.clone() + r
                } else {
                    seg.start.clone() - r
                };
                return self.point_unchecked(seg.edge, offset);
            }
            remaining = remaining - len;
        }
        panic!("point_on_segments called with an empty path")
    }

    /// Arc-length position of `p` along `segs`, or `None` if off the path.
    /// The start point of the path itself is not recognised; callers check it.
    pub fn param_on_segments(&self, segs: &[Segment<S>], p: &TreePoint<S>) -> Option<S> {
        let mut acc = S::zero();
        let reps = self.representations(p);
        for seg in segs {
            for (e, t) in &reps {
                if *e == seg.edge && *seg.low() <= *t && *t <= *seg.high() {
                    return Some(acc + (t.clone() - seg.start.clone()).abs());
                }
            }
            acc = acc + seg.length();
        }
        None
    }

    /// True iff `q` lies on the closed geodesic from `p` to `r`.
    pub fn between(&self, p: &TreePoint<S>, q: &TreePoint<S>, r: &TreePoint<S>) -> bool {
        self.distance(p, q) + self.distance(q, r) == self.distance(p, r)
    }

    /// Edges reachable from vertex `v` without crossing `excluded`.
    pub fn edges_beyond(&self, v: usize, excluded: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![(v, excluded)];
        while let Some((u, via)) = stack.pop() {
            for &e in &self.incident[u] {
                if e != via {
                    out.push(e);
                    stack.push((self.other_end(e, u), e));
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// All components of `X \ {x}`; their count is the order of `x`.
    pub fn components_minus_point(&self, x: &TreePoint<S>) -> Vec<Component<S>> {
        match x {
            TreePoint::Vertex(v) => self.incident[*v]
                .iter()
                .map(|&e| Component {
                    base: x.clone(),
                    edge: e,
                    toward_to: self.edges[e].from == *v,
                })
                .collect(),
            TreePoint::Interior { edge, .. } => vec![
                Component {
                    base: x.clone(),
                    edge: *edge,
                    toward_to: false,
                },
                Component {
                    base: x.clone(),
                    edge: *edge,
                    toward_to: true,
                },
            ],
        }
    }

    /// First point function: the point where geodesics from `x` first meet `y`.
    pub fn first_point_retraction(&self, y: &RegionSet<S>, x: &TreePoint<S>) -> Result<TreePoint<S>> {
        let target = y.any_point(self).ok_or(Error::EmptySubtree)?;
        if y.contains(x) {
            return Ok(x.clone());
        }
        let segs = self.segments_between(x, &target);
        for (i, seg) in segs.iter().enumerate() {
            if i > 0 {
                let at_start = self.point_unchecked(seg.edge, seg.start.clone());
                if y.contains(&at_start) {
                    return Ok(at_start);
                }
            }
            let mut hit: Option<S> = None;
            for (lo, hi) in y.intervals_on(seg.edge) {
                if seg.forward() {
                    if *hi >= seg.start && *lo <= seg.end {
                        let cand = crate::scalar::max(lo, &seg.start);
                        if hit.as_ref().map_or(true, |h| cand < *h) {
                            hit = Some(cand);
                        }
                    }
                } else if *lo <= seg.start && *hi >= seg.end {
                    let cand = crate::scalar::min(hi, &seg.start);
                    if hit.as_ref().map_or(true, |h| cand > *h) {
                        hit = Some(cand);
                    }
                }
            }
            if let Some(t) = hit {
                return Ok(self.point_unchecked(seg.edge, t));
            }
            let at_end = self.point_unchecked(seg.edge, seg.end.clone());
            if y.contains(&at_end) {
                return Ok(at_end);
            }
        }
        Err(Error::Internal("retraction target not reached".into()))
    }

    /// First point function onto a validated subtree.
    pub fn retract(&self, y: &Subtree<S>, x: &TreePoint<S>) -> TreePoint<S> {
        self.first_point_retraction(y.region(), x)
            .expect("subtrees are nonempty")
    }

    pub fn format_point(&self, p: &TreePoint<S>) -> String {
        match p {
            TreePoint::Vertex(v) => format!("v:{}", self.vertex_ids[*v]),
            TreePoint::Interior { edge, offset } => format!("{}@{}", self.edges[*edge].id, offset),
        }
    }

    pub fn parse_point(&self, s: &str) -> Result<TreePoint<S>> {
        let s = s.trim();
        let bad = |msg: String| Error::Parse {
            line: 1,
            column: 1,
            message: msg,
        };
        if let Some(id) = s.strip_prefix("v:") {
            return self
                .vertex_by_id(id)
                .map(TreePoint::Vertex)
                .ok_or_else(|| bad(format!("unknown vertex `{id}`")));
        }
        let (eid, off) = s
            .split_once('@')
            .ok_or_else(|| bad(format!("expected `v:<id>` or `<edge>@<offset>`, got `{s}`")))?;
        let e = self
            .edge_by_id(eid)
            .ok_or_else(|| bad(format!("unknown edge `{eid}`")))?;
        let t: S = parse_scalar(off).ok_or_else(|| bad(format!("bad rational `{off}`")))?;
        self.point(e, t)
    }

    /// Key used for deterministic tie-breaking between points.
    pub fn point_key(&self, p: &TreePoint<S>) -> String {
        self.format_point(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_rational::Ratio;

    type Q = Ratio<BigInt>;

    fn q(n: i64, d: i64) -> Q {
        Q::from_ratio(n, d)
    }

    pub(crate) fn star3() -> FiniteTree<Q> {
        FiniteTree::from_named(
            &["c", "l1", "l2", "l3"],
            &[
                ("e1", "c", "l1", q(1, 1)),
                ("e2", "c", "l2", q(1, 1)),
                ("e3", "c", "l3", q(1, 1)),
            ],
        )
        .unwrap()
    }

    fn interval() -> FiniteTree<Q> {
        FiniteTree::from_named(&["a", "b"], &[("e", "a", "b", q(1, 1))]).unwrap()
    }

    // Shortest path on the graph subdivided at both points, by Dijkstra over
    // a handful of nodes. Independent of the routing code above.
    fn brute_distance(t: &FiniteTree<Q>, p: &TreePoint<Q>, r: &TreePoint<Q>) -> Q {
        let n = t.vertex_count();
        let mut nodes: Vec<TreePoint<Q>> = (0..n).map(TreePoint::Vertex).collect();
        for x in [p, r] {
            if !nodes.contains(x) {
                nodes.push(x.clone());
            }
        }
        let mut adj: Vec<Vec<(usize, Q)>> = vec![Vec::new(); nodes.len()];
        for (ei, e) in t.edges().iter().enumerate() {
            let mut on: Vec<(Q, usize)> = vec![(q(0, 1), e.from), (e.length.clone(), e.to)];
            for (i, x) in nodes.iter().enumerate().skip(n) {
                if let TreePoint::Interior { edge, offset } = x {
                    if *edge == ei {
                        on.push((offset.clone(), i));
                    }
                }
            }
            on.sort();
            for w in on.windows(2) {
                let d = w[1].0.clone() - w[0].0.clone();
                adj[w[0].1].push((w[1].1, d.clone()));
                adj[w[1].1].push((w[0].1, d));
            }
        }
        let src = nodes.iter().position(|x| x == p).unwrap();
        let dst = nodes.iter().position(|x| x == r).unwrap();
        let mut dist: Vec<Option<Q>> = vec![None; nodes.len()];
        dist[src] = Some(q(0, 1));
        let mut done = vec![false; nodes.len()];
        loop {
            let mut best: Option<usize> = None;
            for i in 0..nodes.len() {
                if !done[i] && dist[i].is_some() {
                    if best.map_or(true, |b| dist[i] < dist[b]) {
                        best = Some(i);
                    }
                }
            }
            let Some(u) = best else { break };
            done[u] = true;
            for (w, d) in adj[u].clone() {
                let nd = dist[u].clone().unwrap() + d;
                if dist[w].as_ref().map_or(true, |x| nd < *x) {
                    dist[w] = Some(nd);
                }
            }
        }
        dist[dst].clone().unwrap()
    }

    #[test]
    fn rejects_cycles_and_disconnection() {
        let cyc = FiniteTree::from_named(
            &["a", "b", "c"],
            &[("x", "a", "b", q(1, 1)), ("y", "b", "c", q(1, 1)), ("z", "c", "a", q(1, 1))],
        );
        assert!(matches!(cyc, Err(Error::Validation(m)) if m.contains("cycle")));
        let disc = FiniteTree::from_named(&["a", "b", "c"], &[("x", "a", "b", q(1, 1))]);
        assert!(matches!(disc, Err(Error::Validation(m)) if m.contains("disconnected")));
        let neg = FiniteTree::from_named(&["a", "b"], &[("x", "a", "b", q(0, 1))]);
        assert!(neg.is_err());
    }

    #[test]
    fn canonical_vertex_points() {
        let t = interval();
        assert_eq!(t.point(0, q(0, 1)).unwrap(), TreePoint::Vertex(0));
        assert_eq!(t.point(0, q(1, 1)).unwrap(), TreePoint::Vertex(1));
        assert!(t.point(0, q(2, 1)).is_err());
    }

    #[test]
    fn whole_edge_geodesic() {
        let t = interval();
        let arc = t.geodesic(&TreePoint::Vertex(0), &TreePoint::Vertex(1)).unwrap();
        assert_eq!(arc.segments.len(), 1);
        assert_eq!(arc.length, q(1, 1));
        assert_eq!(
            t.geodesic(&TreePoint::Vertex(0), &TreePoint::Vertex(0)),
            Err(Error::DegeneratePoint)
        );
    }

    #[test]
    fn star_tip_to_tip() {
        let t = star3();
        let (l1, l2) = (TreePoint::Vertex(1), TreePoint::Vertex(2));
        let arc = t.geodesic(&l1, &l2).unwrap();
        assert_eq!(arc.segments.len(), 2);
        assert_eq!(arc.length, brute_distance(&t, &l1, &l2));
        assert_eq!(arc.length, q(2, 1));
        assert!(arc.contains(&t, &TreePoint::Vertex(0)));
        assert_eq!(t.distance(&l1, &l2), q(2, 1));
    }

    #[test]
    fn distances_match_brute_force() {
        let t = FiniteTree::from_named(
            &["a", "b", "c", "d", "e"],
            &[
                ("p", "a", "b", q(1, 2)),
                ("r", "c", "b", q(3, 1)),
                ("s", "b", "d", q(2, 3)),
                ("u", "e", "d", q(5, 4)),
            ],
        )
        .unwrap();
        let mut pts = vec![];
        for e in 0..t.edge_count() {
            let len = t.edge(e).length.clone();
            for k in 0..=4 {
                pts.push(t.point(e, len.clone() * q(k, 4)).unwrap());
            }
        }
        for p in &pts {
            for r in &pts {
                assert_eq!(t.distance(p, r), brute_distance(&t, p, r), "{p:?} {r:?}");
                if p != r {
                    let arc = t.geodesic(p, r).unwrap();
                    assert_eq!(arc.length, t.distance(p, r));
                    assert_eq!(arc.point_at(&t, &arc.length), *r);
                    assert_eq!(arc.point_at(&t, &q(0, 1)), *p);
                }
            }
        }
    }

    #[test]
    fn retraction_examples() {
        let t = interval();
        let mut y = RegionSet::empty();
        y.push_interval(0, q(0, 1), q(1, 2));
        y.normalize(&t);
        let x = t.point(0, q(3, 4)).unwrap();
        assert_eq!(t.first_point_retraction(&y, &x).unwrap(), t.point(0, q(1, 2)).unwrap());
        let inside = t.point(0, q(1, 4)).unwrap();
        assert_eq!(t.first_point_retraction(&y, &inside).unwrap(), inside);

        let s = star3();
        let arm1 = Subtree::new(&s, RegionSet::from_segments(&s, &s.segments_between(&TreePoint::Vertex(0), &TreePoint::Vertex(1)))).unwrap();
        let x = s.point(1, q(1, 2)).unwrap();
        assert_eq!(s.retract(&arm1, &x), TreePoint::Vertex(0));
        assert_eq!(
            s.first_point_retraction(&RegionSet::empty(), &x),
            Err(Error::EmptySubtree)
        );
    }

    #[test]
    fn component_counts() {
        let t = interval();
        assert_eq!(t.components_minus_point(&t.point(0, q(1, 2)).unwrap()).len(), 2);
        assert_eq!(t.components_minus_point(&TreePoint::Vertex(0)).len(), 1);
        let s = star3();
        let comps = s.components_minus_point(&TreePoint::Vertex(0));
        assert_eq!(comps.len(), 3);
        for (i, c) in comps.iter().enumerate() {
            assert!(c.contains(&s, &TreePoint::Vertex(i + 1)));
            assert!(!c.contains(&s, &TreePoint::Vertex(0)));
            for (j, _) in comps.iter().enumerate().filter(|(j, _)| *j != i) {
                assert!(!c.contains(&s, &TreePoint::Vertex(j + 1)));
            }
        }
    }

    #[test]
    fn point_syntax() {
        let t = interval();
        let p = t.parse_point("e@1/2").unwrap();
        assert_eq!(t.format_point(&p), "e@1/2");
        assert_eq!(t.parse_point("e@0").unwrap(), TreePoint::Vertex(0));
        assert_eq!(t.format_point(&t.parse_point("e@2/2").unwrap()), "v:b");
        assert!(t.parse_point("e@3").is_err());
        assert!(t.parse_point("zz@1/2").is_err());
    }
}
