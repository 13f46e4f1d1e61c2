//! Finite unions of points and closed segments of a tree.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::scalar::{self, parse_scalar, Scalar};
use crate::tree::{FiniteTree, Segment, TreePoint};

/// Canonical form: per edge, sorted disjoint closed intervals that do not
/// touch each other. An interval reaching offset 0 or the edge length implies
/// the corresponding vertex is in `vertices`; zero-length intervals only occur
/// at interior offsets (isolated points).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct RegionSet<S> {
    vertices: BTreeSet<usize>,
    intervals: BTreeMap<usize, Vec<(S, S)>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Connectivity {
    /// Vacuously connected; callers treat this as a flag, not a verdict.
    Empty,
    Connected,
    Disconnected,
}

impl<S: Scalar> RegionSet<S> {
    pub fn empty() -> Self {
        RegionSet {
            vertices: BTreeSet::new(),
            intervals: BTreeMap::new(),
        }
    }

    pub fn whole(tree: &FiniteTree<S>) -> Self {
        let mut r = Self::empty();
        for (e, edge) in tree.edges().iter().enumerate() {
            r.push_interval(e, S::zero(), edge.length.clone());
        }
        r.normalize(tree);
        r
    }

    pub fn point(tree: &FiniteTree<S>, p: &TreePoint<S>) -> Self {
        let mut r = Self::empty();
        r.push_point(p);
        r.normalize(tree);
        r
    }

    pub fn from_segments(tree: &FiniteTree<S>, segs: &[Segment<S>]) -> Self {
        let mut r = Self::empty();
        for s in segs {
            r.push_interval(s.edge, s.low().clone(), s.high().clone());
        }
        r.normalize(tree);
        r
    }

    /// Closed geodesic from `p` to `q` (a point when they coincide).
    pub fn path(tree: &FiniteTree<S>, p: &TreePoint<S>, q: &TreePoint<S>) -> Self {
        if p == q {
            return Self::point(tree, p);
        }
        Self::from_segments(tree, &tree.segments_between(p, q))
    }

    /// Raw insertion; call [`normalize`](Self::normalize) afterwards.
    pub fn push_vertex(&mut self, v: usize) {
        self.vertices.insert(v);
    }

    /// Raw insertion; call [`normalize`](Self::normalize) afterwards.
    pub fn push_interval(&mut self, e: usize, lo: S, hi: S) {
        let (lo, hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
        self.intervals.entry(e).or_default().push((lo, hi));
    }

    /// Raw insertion; call [`normalize`](Self::normalize) afterwards.
    pub fn push_point(&mut self, p: &TreePoint<S>) {
        match p {
            TreePoint::Vertex(v) => self.push_vertex(*v),
            TreePoint::Interior { edge, offset } => {
                self.push_interval(*edge, offset.clone(), offset.clone())
            }
        }
    }

    pub fn normalize(&mut self, tree: &FiniteTree<S>) {
        let mut out: BTreeMap<usize, Vec<(S, S)>> = BTreeMap::new();
        for (e, mut ivs) in std::mem::take(&mut self.intervals) {
            let edge = tree.edge(e);
            let len = edge.length.clone();
            ivs.sort();
            let mut merged: Vec<(S, S)> = Vec::new();
            for (lo, hi) in ivs {
                let lo = scalar::max(&lo, &S::zero());
                let hi = scalar::min(&hi, &len);
                if lo > hi {
                    continue;
                }
                if let Some(last) = merged.last_mut() {
                    if lo <= last.1 {
                        if hi > last.1 {
                            last.1 = hi;
                        }
                        continue;
                    }
                }
                merged.push((lo, hi));
            }
            let mut kept = Vec::new();
            for (lo, hi) in merged {
                if lo.is_zero() {
                    self.vertices.insert(edge.from);
                }
                if hi == len {
                    self.vertices.insert(edge.to);
                }
                let degenerate_end = lo == hi && (lo.is_zero() || hi == len);
                if !degenerate_end {
                    kept.push((lo, hi));
                }
            }
            if !kept.is_empty() {
                out.insert(e, kept);
            }
        }
        self.intervals = out;
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty() && self.intervals.is_empty()
    }

    pub fn vertices(&self) -> &BTreeSet<usize> {
        &self.vertices
    }

    pub fn intervals(&self) -> &BTreeMap<usize, Vec<(S, S)>> {
        &self.intervals
    }

    pub fn intervals_on(&self, e: usize) -> &[(S, S)] {
        self.intervals.get(&e).map(|v| v.as_slice()).unwrap_or(&[])
    }

    pub fn contains(&self, p: &TreePoint<S>) -> bool {
        match p {
            TreePoint::Vertex(v) => self.vertices.contains(v),
            TreePoint::Interior { edge, offset } => self
                .intervals_on(*edge)
                .iter()
                .any(|(lo, hi)| lo <= offset && offset <= hi),
        }
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        if !self.vertices.is_subset(&other.vertices) {
            return false;
        }
        self.intervals.iter().all(|(e, ivs)| {
            let theirs = other.intervals_on(*e);
            ivs.iter()
                .all(|(lo, hi)| theirs.iter().any(|(a, b)| a <= lo && hi <= b))
        })
    }

    pub fn union(&self, other: &Self, tree: &FiniteTree<S>) -> Self {
        let mut r = self.clone();
        r.extend(other);
        r.normalize(tree);
        r
    }

    /// Raw union; call [`normalize`](Self::normalize) afterwards.
    pub fn extend(&mut self, other: &Self) {
        self.vertices.extend(other.vertices.iter().copied());
        for (e, ivs) in &other.intervals {
            self.intervals.entry(*e).or_default().extend(ivs.iter().cloned());
        }
    }

    pub fn intersection(&self, other: &Self, tree: &FiniteTree<S>) -> Self {
        let mut r = Self::empty();
        r.vertices = self.vertices.intersection(&other.vertices).copied().collect();
        for (e, ivs) in &self.intervals {
            for (lo, hi) in ivs {
                for (a, b) in other.intervals_on(*e) {
                    let l = scalar::max(lo, a);
                    let h = scalar::min(hi, b);
                    if l <= h {
                        r.push_interval(*e, l, h);
                    }
                }
            }
        }
        r.normalize(tree);
        r
    }

    /// Some member point, deterministic.
    pub fn any_point(&self, tree: &FiniteTree<S>) -> Option<TreePoint<S>> {
        if let Some(v) = self.vertices.iter().next() {
            return Some(TreePoint::Vertex(*v));
        }
        self.intervals
            .iter()
            .next()
            .map(|(e, ivs)| tree.point_unchecked(*e, ivs[0].0.clone()))
    }

    /// Vertices plus every interval endpoint; includes all extreme points.
    pub fn boundary_points(&self, tree: &FiniteTree<S>) -> Vec<TreePoint<S>> {
        let mut out: BTreeSet<TreePoint<S>> = self.vertices.iter().map(|v| TreePoint::Vertex(*v)).collect();
        for (e, ivs) in &self.intervals {
            for (lo, hi) in ivs {
                out.insert(tree.point_unchecked(*e, lo.clone()));
                out.insert(tree.point_unchecked(*e, hi.clone()));
            }
        }
        out.into_iter().collect()
    }

    /// Total length of the region.
    pub fn measure(&self) -> S {
        self.intervals
            .values()
            .flatten()
            .fold(S::zero(), |acc, (lo, hi)| acc + hi.clone() - lo.clone())
    }

    pub fn components(&self, tree: &FiniteTree<S>) -> Vec<RegionSet<S>> {
        // Nodes: vertices first, then intervals in storage order.
        let verts: Vec<usize> = self.vertices.iter().copied().collect();
        let mut ivs: Vec<(usize, S, S)> = Vec::new();
        for (e, list) in &self.intervals {
            for (lo, hi) in list {
                ivs.push((*e, lo.clone(), hi.clone()));
            }
        }
        let n = verts.len() + ivs.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        let vpos = |v: usize| verts.binary_search(&v).ok();
        for (i, (e, lo, hi)) in ivs.iter().enumerate() {
            let edge = tree.edge(*e);
            let me = verts.len() + i;
            let join = |v: usize, parent: &mut Vec<usize>| {
                if let Some(j) = vpos(v) {
                    let (a, b) = (find(parent, me), find(parent, j));
                    parent[a] = b;
                }
            };
            if lo.is_zero() {
                join(edge.from, &mut parent);
            }
            if *hi == edge.length {
                join(edge.to, &mut parent);
            }
        }
        let mut groups: BTreeMap<usize, RegionSet<S>> = BTreeMap::new();
        for (j, v) in verts.iter().enumerate() {
            let root = find(&mut parent, j);
            groups.entry(root).or_insert_with(Self::empty).vertices.insert(*v);
        }
        for (i, (e, lo, hi)) in ivs.into_iter().enumerate() {
            let root = find(&mut parent, verts.len() + i);
            groups
                .entry(root)
                .or_insert_with(Self::empty)
                .intervals
                .entry(e)
                .or_default()
                .push((lo, hi));
        }
        let mut out: Vec<RegionSet<S>> = groups.into_values().collect();
        out.sort();
        out
    }

    pub fn connectivity(&self, tree: &FiniteTree<S>) -> Connectivity {
        if self.is_empty() {
            return Connectivity::Empty;
        }
        if self.components(tree).len() == 1 {
            Connectivity::Connected
        } else {
            Connectivity::Disconnected
        }
    }

    /// True for connected and (vacuously) for empty regions.
    pub fn is_connected(&self, tree: &FiniteTree<S>) -> bool {
        self.connectivity(tree) != Connectivity::Disconnected
    }

    /// Distance from each vertex to the region. `None` for an empty region.
    pub fn vertex_distances(&self, tree: &FiniteTree<S>) -> Option<Vec<S>> {
        if self.is_empty() {
            return None;
        }
        let n = tree.vertex_count();
        let mut d: Vec<Option<S>> = vec![None; n];
        let better = |slot: &mut Option<S>, cand: S| {
            if slot.as_ref().map_or(true, |x| cand < *x) {
                *slot = Some(cand);
                true
            } else {
                false
            }
        };
        for v in &self.vertices {
            d[*v] = Some(S::zero());
        }
        for (e, ivs) in &self.intervals {
            let edge = tree.edge(*e);
            better(&mut d[edge.from], ivs[0].0.clone());
            better(&mut d[edge.to], edge.length.clone() - ivs[ivs.len() - 1].1.clone());
        }
        // Relax along edges until stable; a tree needs at most n rounds.
        loop {
            let mut changed = false;
            for edge in tree.edges() {
                if let Some(a) = d[edge.from].clone() {
                    changed |= better(&mut d[edge.to], a + edge.length.clone());
                }
                if let Some(b) = d[edge.to].clone() {
                    changed |= better(&mut d[edge.from], b + edge.length.clone());
                }
            }
            if !changed {
                break;
            }
        }
        Some(d.into_iter().map(|x| x.expect("tree is connected")).collect())
    }

    pub fn distance_to(&self, tree: &FiniteTree<S>, p: &TreePoint<S>) -> Option<S> {
        let dv = self.vertex_distances(tree)?;
        Some(self.distance_with(tree, &dv, p))
    }

    fn distance_with(&self, tree: &FiniteTree<S>, dv: &[S], p: &TreePoint<S>) -> S {
        match p {
            TreePoint::Vertex(v) => dv[*v].clone(),
            TreePoint::Interior { edge, offset } => {
                let e = tree.edge(*edge);
                let mut best = scalar::min(
                    &(offset.clone() + dv[e.from].clone()),
                    &(e.length.clone() - offset.clone() + dv[e.to].clone()),
                );
                for (lo, hi) in self.intervals_on(*edge) {
                    let d = if offset < lo {
                        lo.clone() - offset.clone()
                    } else if offset > hi {
                        offset.clone() - hi.clone()
                    } else {
                        S::zero()
                    };
                    best = scalar::min(&best, &d);
                }
                best
            }
        }
    }

    /// Closed `r`-neighborhood `{x : d(x, self) <= r}`.
    pub fn neighborhood(&self, tree: &FiniteTree<S>, r: &S) -> Self {
        let Some(dv) = self.vertex_distances(tree) else {
            return Self::empty();
        };
        let mut out = Self::empty();
        for (v, d) in dv.iter().enumerate() {
            if d <= r {
                out.vertices.insert(v);
            }
        }
        for (e, edge) in tree.edges().iter().enumerate() {
            if dv[edge.from] <= *r {
                let reach = r.clone() - dv[edge.from].clone();
                out.push_interval(e, S::zero(), scalar::min(&reach, &edge.length));
            }
            if dv[edge.to] <= *r {
                let reach = r.clone() - dv[edge.to].clone();
                let lo = edge.length.clone() - reach;
                out.push_interval(e, scalar::max(&lo, &S::zero()), edge.length.clone());
            }
            for (lo, hi) in self.intervals_on(e) {
                out.push_interval(e, lo.clone() - r.clone(), hi.clone() + r.clone());
            }
        }
        out.normalize(tree);
        out
    }

    /// Regions are written `{v:a, e1@1/3, e2[0,1/2]}`: vertices in index
    /// order, then per edge the isolated points and intervals.
    pub fn format(&self, tree: &FiniteTree<S>) -> String {
        let mut parts: Vec<String> = self
            .vertices
            .iter()
            .map(|v| format!("v:{}", tree.vertex_id(*v)))
            .collect();
        for (e, ivs) in &self.intervals {
            let id = &tree.edge(*e).id;
            for (lo, hi) in ivs {
                if lo == hi {
                    parts.push(format!("{id}@{lo}"));
                } else {
                    parts.push(format!("{id}[{lo},{hi}]"));
                }
            }
        }
        format!("{{{}}}", parts.join(", "))
    }

    pub fn parse(tree: &FiniteTree<S>, s: &str) -> Result<Self> {
        let bad = |m: String| Error::Parse {
            line: 1,
            column: 1,
            message: m,
        };
        let inner = s
            .trim()
            .strip_prefix('{')
            .and_then(|x| x.strip_suffix('}'))
            .ok_or_else(|| bad(format!("region must be braced: `{s}`")))?;
        let mut r = Self::empty();
        // Split on commas that are not inside brackets.
        let mut depth = 0usize;
        let mut items = Vec::new();
        let mut cur = String::new();
        for c in inner.chars() {
            match c {
                '[' => depth += 1,
                ']' => depth = depth.saturating_sub(1),
                ',' if depth == 0 => {
                    items.push(std::mem::take(&mut cur));
                    continue;
                }
                _ => {}
            }
            cur.push(c);
        }
        items.push(cur);
        for item in items.iter().map(|x| x.trim()).filter(|x| !x.is_empty()) {
            if let Some((eid, rest)) = item.split_once('[') {
                let body = rest
                    .strip_suffix(']')
                    .ok_or_else(|| bad(format!("unterminated interval `{item}`")))?;
                let (a, b) = body
                    .split_once(',')
                    .ok_or_else(|| bad(format!("interval needs two bounds `{item}`")))?;
                let e = tree
                    .edge_by_id(eid.trim())
                    .ok_or_else(|| bad(format!("unknown edge `{eid}`")))?;
                let lo: S = parse_scalar(a).ok_or_else(|| bad(format!("bad rational `{a}`")))?;
                let hi: S = parse_scalar(b).ok_or_else(|| bad(format!("bad rational `{b}`")))?;
                if lo > hi || lo < S::zero() || hi > tree.edge(e).length {
                    return Err(bad(format!("interval out of range `{item}`")));
                }
                r.push_interval(e, lo, hi);
            } else {
                let p = tree.parse_point(item)?;
                r.push_point(&p);
            }
        }
        r.normalize(tree);
        Ok(r)
    }
}

/// A nonempty connected region.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subtree<S>(RegionSet<S>);

impl<S: Scalar> Subtree<S> {
    pub fn new(tree: &FiniteTree<S>, region: RegionSet<S>) -> Result<Self> {
        match region.connectivity(tree) {
            Connectivity::Empty => Err(Error::EmptySubtree),
            Connectivity::Disconnected => Err(Error::NotConnected),
            Connectivity::Connected => Ok(Subtree(region)),
        }
    }

    pub fn whole(tree: &FiniteTree<S>) -> Self {
        Subtree(RegionSet::whole(tree))
    }

    pub fn point(tree: &FiniteTree<S>, p: &TreePoint<S>) -> Self {
        Subtree(RegionSet::point(tree, p))
    }

    pub fn region(&self) -> &RegionSet<S> {
        &self.0
    }

    pub fn into_region(self) -> RegionSet<S> {
        self.0
    }

    /// A subtree with no positive length is a single point.
    pub fn as_point(&self, tree: &FiniteTree<S>) -> Option<TreePoint<S>> {
        if self.0.measure().is_zero() {
            self.0.any_point(tree)
        } else {
            None
        }
    }
}

impl<S> std::ops::Deref for Subtree<S> {
    type Target = RegionSet<S>;

    fn deref(&self) -> &RegionSet<S> {
        &self.0
    }
}
