//! Piecewise-linear continuous self-maps of a finite tree.
//!
//! On each edge the parameter interval is cut at breakpoints; each piece is
//! sent onto the geodesic between two image points at constant speed. A piece
//! whose two image points coincide is constant.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::region::{RegionSet, Subtree};
use crate::scalar::Scalar;
use crate::tree::{FiniteTree, Segment, TreePoint};

/// Default cap on the total number of pieces produced by composition.
pub const DEFAULT_BUDGET: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Piece<S> {
    pub start: S,
    pub end: S,
    pub from: TreePoint<S>,
    pub to: TreePoint<S>,
}

impl<S: Scalar> Piece<S> {
    pub fn is_constant(&self) -> bool {
        self.from == self.to
    }

    pub fn width(&self) -> S {
        self.end.clone() - self.start.clone()
    }

    /// Absolute speed `d(from, to) / width`.
    pub fn speed(&self, tree: &FiniteTree<S>) -> S {
        tree.distance(&self.from, &self.to) / self.width()
    }

    /// Value at parameter `t` in `[start, end]`.
    pub fn value(&self, tree: &FiniteTree<S>, t: &S) -> TreePoint<S> {
        if self.is_constant() || *t == self.start {
            return self.from.clone();
        }
        if *t == self.end {
            return self.to.clone();
        }
        let segs = tree.segments_between(&self.from, &self.to);
        let len = segs.iter().fold(S::zero(), |acc, s| acc + s.length());
        let s = (t.clone() - self.start.clone()) * len / self.width();
        tree.point_on_segments(&segs, &s)
    }
}

#[derive(Debug, Clone)]
pub struct PlMap<S> {
    tree: Arc<FiniteTree<S>>,
    pieces: Vec<Vec<Piece<S>>>,
}

impl<S: Scalar> PartialEq for PlMap<S> {
    fn eq(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.tree, &other.tree) || self.tree == other.tree) && self.pieces == other.pieces
    }
}

impl<S: Scalar> Eq for PlMap<S> {}

// Merge two adjacent pieces when their union is still one constant-speed
// geodesic piece.
fn try_merge<S: Scalar>(tree: &FiniteTree<S>, a: &Piece<S>, b: &Piece<S>) -> Option<Piece<S>> {
    debug_assert!(a.end == b.start && a.to == b.from);
    let merged = Piece {
        start: a.start.clone(),
        end: b.end.clone(),
        from: a.from.clone(),
        to: b.to.clone(),
    };
    match (a.is_constant(), b.is_constant()) {
        (true, true) => Some(merged),
        (false, false) => {
            let d1 = tree.distance(&a.from, &a.to);
            let d2 = tree.distance(&b.from, &b.to);
            if d1.clone() * b.width() != d2.clone() * a.width() {
                return None;
            }
            if tree.distance(&a.from, &b.to) != d1 + d2 {
                return None;
            }
            Some(merged)
        }
        _ => None,
    }
}

fn push_merged<S: Scalar>(tree: &FiniteTree<S>, out: &mut Vec<Piece<S>>, p: Piece<S>) {
    if let Some(last) = out.last() {
        if let Some(m) = try_merge(tree, last, &p) {
            *out.last_mut().unwrap() = m;
            return;
        }
    }
    out.push(p);
}

impl<S: Scalar> PlMap<S> {
    /// Validates coverage and continuity, then merges collinear pieces.
    pub fn new(tree: Arc<FiniteTree<S>>, pieces: Vec<Vec<Piece<S>>>) -> Result<Self> {
        if pieces.len() != tree.edge_count() {
            return Err(Error::Validation(format!(
                "map has pieces for {} edges, tree has {}",
                pieces.len(),
                tree.edge_count()
            )));
        }
        for (e, list) in pieces.iter().enumerate() {
            let edge = tree.edge(e);
            let first = list
                .first()
                .ok_or_else(|| Error::Validation(format!("edge `{}` has no pieces", edge.id)))?;
            if !first.start.is_zero() || list.last().unwrap().end != edge.length {
                return Err(Error::Validation(format!(
                    "pieces of edge `{}` do not cover [0, {}]",
                    edge.id, edge.length
                )));
            }
            for p in list {
                if p.start >= p.end {
                    return Err(Error::Validation(format!(
                        "empty piece [{}, {}] on edge `{}`",
                        p.start, p.end, edge.id
                    )));
                }
            }
            for w in list.windows(2) {
                if w[0].end != w[1].start {
                    return Err(Error::Validation(format!(
                        "pieces of edge `{}` leave a gap or overlap at {}",
                        edge.id, w[0].end
                    )));
                }
                if w[0].to != w[1].from {
                    return Err(Error::Validation(format!(
                        "continuity at breakpoint {} of edge `{}`",
                        w[0].end, edge.id
                    )));
                }
            }
        }
        for v in 0..tree.vertex_count() {
            let mut value: Option<&TreePoint<S>> = None;
            for &e in tree.incident(v) {
                let list = &pieces[e];
                let here = if tree.edge(e).from == v {
                    &list[0].from
                } else {
                    &list[list.len() - 1].to
                };
                match value {
                    None => value = Some(here),
                    Some(x) if x != here => {
                        return Err(Error::Validation(format!(
                            "continuity at vertex {}",
                            tree.vertex_id(v)
                        )))
                    }
                    _ => {}
                }
            }
        }
        let pieces = pieces
            .into_iter()
            .map(|list| {
                let mut out = Vec::with_capacity(list.len());
                for p in list {
                    push_merged(&tree, &mut out, p);
                }
                out
            })
            .collect();
        Ok(PlMap { tree, pieces })
    }

    pub fn identity(tree: Arc<FiniteTree<S>>) -> Self {
        let pieces = tree
            .edges()
            .iter()
            .map(|e| {
                vec![Piece {
                    start: S::zero(),
                    end: e.length.clone(),
                    from: TreePoint::Vertex(e.from),
                    to: TreePoint::Vertex(e.to),
                }]
            })
            .collect();
        PlMap { tree, pieces }
    }

    pub fn constant(tree: Arc<FiniteTree<S>>, c: TreePoint<S>) -> Self {
        let pieces = tree
            .edges()
            .iter()
            .map(|e| {
                vec![Piece {
                    start: S::zero(),
                    end: e.length.clone(),
                    from: c.clone(),
                    to: c.clone(),
                }]
            })
            .collect();
        PlMap { tree, pieces }
    }

    /// The first point retraction onto `y`, as a PL map.
    pub fn retraction(tree: Arc<FiniteTree<S>>, y: &Subtree<S>) -> Self {
        let mut pieces = Vec::with_capacity(tree.edge_count());
        for (e, edge) in tree.edges().iter().enumerate() {
            let mut list = Vec::new();
            let mut cursor = S::zero();
            let mut spans: Vec<(S, S)> = y.intervals_on(e).to_vec();
            spans.retain(|(lo, hi)| lo < hi);
            for (lo, hi) in spans {
                if cursor < lo {
                    let mid = (cursor.clone() + lo.clone()) / S::two();
                    let r = tree.retract(y, &tree.point_unchecked(e, mid));
                    list.push(Piece {
                        start: cursor.clone(),
                        end: lo.clone(),
                        from: r.clone(),
                        to: r,
                    });
                }
                list.push(Piece {
                    start: lo.clone(),
                    end: hi.clone(),
                    from: tree.point_unchecked(e, lo.clone()),
                    to: tree.point_unchecked(e, hi.clone()),
                });
                cursor = hi;
            }
            if cursor < edge.length {
                let mid = (cursor.clone() + edge.length.clone()) / S::two();
                let r = tree.retract(y, &tree.point_unchecked(e, mid));
                list.push(Piece {
                    start: cursor,
                    end: edge.length.clone(),
                    from: r.clone(),
                    to: r,
                });
            }
            let mut merged = Vec::with_capacity(list.len());
            for p in list {
                push_merged(&tree, &mut merged, p);
            }
            pieces.push(merged);
        }
        PlMap { tree, pieces }
    }

    pub fn tree(&self) -> &FiniteTree<S> {
        &self.tree
    }

    pub fn shared_tree(&self) -> Arc<FiniteTree<S>> {
        Arc::clone(&self.tree)
    }

    pub fn pieces(&self, e: usize) -> &[Piece<S>] {
        &self.pieces[e]
    }

    pub fn all_pieces(&self) -> &[Vec<Piece<S>>] {
        &self.pieces
    }

    pub fn piece_count(&self) -> usize {
        self.pieces.iter().map(|p| p.len()).sum()
    }

    /// Interior breakpoints of edge `e`, increasing.
    pub fn breakpoints(&self, e: usize) -> impl Iterator<Item = &S> {
        self.pieces[e][1..].iter().map(|p| &p.start)
    }

    pub fn eval_on_edge(&self, e: usize, t: &S) -> TreePoint<S> {
        let list = &self.pieces[e];
        let i = list.partition_point(|p| p.end < *t).min(list.len() - 1);
        list[i].value(&self.tree, t)
    }

    pub fn eval(&self, p: &TreePoint<S>) -> TreePoint<S> {
        let (e, t) = self.tree.representation(p);
        self.eval_on_edge(e, &t)
    }

    /// `n`-fold evaluation without building the iterate.
    pub fn eval_n(&self, p: &TreePoint<S>, n: usize) -> TreePoint<S> {
        let mut x = p.clone();
        for _ in 0..n {
            x = self.eval(&x);
        }
        x
    }

    pub fn is_constant(&self) -> bool {
        let c = &self.pieces[0][0].from;
        self.pieces.iter().flatten().all(|p| p.from == *c && p.to == *c)
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &PlMap<S>, budget: usize) -> Result<PlMap<S>> {
        let tree = &*self.tree;
        let mut total = 0usize;
        let mut pieces = Vec::with_capacity(tree.edge_count());
        for list in &inner.pieces {
            let mut out: Vec<Piece<S>> = Vec::new();
            for gp in list {
                if gp.is_constant() {
                    let c = self.eval(&gp.from);
                    push_merged(tree, &mut out, Piece {
                        start: gp.start.clone(),
                        end: gp.end.clone(),
                        from: c.clone(),
                        to: c,
                    });
                    continue;
                }
                let cuts = self.cuts_along(&tree.segments_between(&gp.from, &gp.to));
                let len = cuts.last().unwrap().0.clone();
                let scale = gp.width() / len;
                let images: Vec<TreePoint<S>> = cuts.iter().map(|(_, p)| self.eval(p)).collect();
                for i in 0..cuts.len() - 1 {
                    push_merged(tree, &mut out, Piece {
                        start: gp.start.clone() + cuts[i].0.clone() * scale.clone(),
                        end: gp.start.clone() + cuts[i + 1].0.clone() * scale.clone(),
                        from: images[i].clone(),
                        to: images[i + 1].clone(),
                    });
                }
                if total + out.len() > budget {
                    return Err(Error::BudgetExceeded(total + out.len()));
                }
            }
            // Exact endpoints: the scaled last cut equals gp.end already.
            total += out.len();
            pieces.push(out);
        }
        Ok(PlMap {
            tree: Arc::clone(&self.tree),
            pieces,
        })
    }

    // Arc-length positions along `segs` where this map may change piece:
    // segment junctions and this map's breakpoints. Starts at 0, ends at the
    // path length.
    fn cuts_along(&self, segs: &[Segment<S>]) -> Vec<(S, TreePoint<S>)> {
        let tree = &*self.tree;
        let first = &segs[0];
        let mut cuts = vec![(S::zero(), tree.point_unchecked(first.edge, first.start.clone()))];
        let mut sigma = S::zero();
        for seg in segs {
            let mut inner: Vec<&S> = self
                .breakpoints(seg.edge)
                .filter(|b| *b > seg.low() && *b < seg.high())
                .collect();
            if !seg.forward() {
                inner.reverse();
            }
            for b in inner {
                let d = (b.clone() - seg.start.clone()).abs();
                cuts.push((sigma.clone() + d, tree.point_unchecked(seg.edge, b.clone())));
            }
            sigma = sigma + seg.length();
            cuts.push((sigma.clone(), tree.point_unchecked(seg.edge, seg.end.clone())));
        }
        cuts
    }

    /// `self^n`; `n = 0` gives the identity.
    pub fn iterate(&self, n: usize, budget: usize) -> Result<PlMap<S>> {
        if n == 0 {
            return Ok(Self::identity(Arc::clone(&self.tree)));
        }
        let mut acc = self.clone();
        for _ in 1..n {
            acc = self.compose(&acc, budget)?;
        }
        Ok(acc)
    }

    /// Exact image of a region; connected regions map to subtrees.
    pub fn image_region(&self, y: &RegionSet<S>) -> RegionSet<S> {
        let tree = &*self.tree;
        let mut out = RegionSet::empty();
        for v in y.vertices() {
            out.push_point(&self.eval(&TreePoint::Vertex(*v)));
        }
        for (e, ivs) in y.intervals() {
            for (lo, hi) in ivs {
                if lo == hi {
                    out.push_point(&self.eval_on_edge(*e, lo));
                    continue;
                }
                for p in &self.pieces[*e] {
                    if p.end <= *lo || p.start >= *hi {
                        continue;
                    }
                    if p.is_constant() {
                        out.push_point(&p.from);
                        continue;
                    }
                    let a = if p.start < *lo { p.value(tree, lo) } else { p.from.clone() };
                    let b = if p.end > *hi { p.value(tree, hi) } else { p.to.clone() };
                    push_path(tree, &mut out, &a, &b);
                }
            }
        }
        out.normalize(tree);
        out
    }

    pub fn image_subtree(&self, y: &Subtree<S>) -> Subtree<S> {
        Subtree::new(&self.tree, self.image_region(y.region())).expect("continuous image of a continuum")
    }

    pub fn image_arc(&self, a: &crate::tree::Arc<S>) -> Subtree<S> {
        Subtree::new(&self.tree, self.image_region(&a.to_region(&self.tree)))
            .expect("continuous image of an arc")
    }

    /// `f[X]`.
    pub fn image(&self) -> Subtree<S> {
        self.image_subtree(&Subtree::whole(&self.tree))
    }

    /// The full preimage of a point.
    pub fn preimages_point(&self, y: &TreePoint<S>) -> RegionSet<S> {
        let tree = &*self.tree;
        let mut out = RegionSet::empty();
        for (e, list) in self.pieces.iter().enumerate() {
            for p in list {
                if p.is_constant() {
                    if p.from == *y {
                        out.push_interval(e, p.start.clone(), p.end.clone());
                    }
                    continue;
                }
                let segs = tree.segments_between(&p.from, &p.to);
                let s = if p.from == *y {
                    Some(S::zero())
                } else {
                    tree.param_on_segments(&segs, y)
                };
                if let Some(s) = s {
                    let len = segs.iter().fold(S::zero(), |acc, x| acc + x.length());
                    let t = p.start.clone() + s * p.width() / len;
                    out.push_point(&tree.point_unchecked(e, t));
                }
            }
        }
        out.normalize(tree);
        out
    }

    /// Exact `fix(f)`.
    pub fn fixed_set(&self) -> Result<RegionSet<S>> {
        let tree = &*self.tree;
        let mut out = RegionSet::empty();
        for v in 0..tree.vertex_count() {
            let p = TreePoint::Vertex(v);
            if self.eval(&p) == p {
                out.push_vertex(v);
            }
        }
        for (e, list) in self.pieces.iter().enumerate() {
            for p in list {
                solve_piece_fixed(tree, e, p, &mut out);
            }
        }
        out.normalize(tree);
        if out.is_empty() {
            return Err(Error::Internal("fixed set of a tree map came out empty".into()));
        }
        Ok(out)
    }

    /// Exact check that the map fixes every point of `y`.
    pub fn is_identity_on(&self, y: &RegionSet<S>) -> bool {
        let tree = &*self.tree;
        for v in y.vertices() {
            let p = TreePoint::Vertex(*v);
            if self.eval(&p) != p {
                return false;
            }
        }
        for (e, ivs) in y.intervals() {
            for (lo, hi) in ivs {
                let mut checks = vec![lo.clone(), hi.clone()];
                checks.extend(self.breakpoints(*e).filter(|b| *b > lo && *b < hi).cloned());
                for t in checks {
                    let p = tree.point_unchecked(*e, t.clone());
                    if self.eval_on_edge(*e, &t) != p {
                        return false;
                    }
                }
            }
        }
        true
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(Arc::clone(&self.tree))
    }

    /// Largest absolute speed over pieces meeting `region` in positive length.
    pub fn max_speed_on(&self, region: &RegionSet<S>) -> Option<S> {
        let mut best: Option<S> = None;
        for (e, ivs) in region.intervals() {
            for (lo, hi) in ivs.iter().filter(|(lo, hi)| lo < hi) {
                for p in &self.pieces[*e] {
                    if p.end > *lo && p.start < *hi {
                        let s = p.speed(&self.tree);
                        if best.as_ref().map_or(true, |b| s > *b) {
                            best = Some(s);
                        }
                    }
                }
            }
        }
        best
    }
}

/// Adds the closed geodesic `a b` to a raw region.
pub(crate) fn push_path<S: Scalar>(tree: &FiniteTree<S>, out: &mut RegionSet<S>, a: &TreePoint<S>, b: &TreePoint<S>) {
    out.push_point(a);
    out.push_point(b);
    for s in tree.segments_between(a, b) {
        out.push_interval(s.edge, s.low().clone(), s.high().clone());
    }
}

// Fixed points of one piece lying in the interior of its own edge.
fn solve_piece_fixed<S: Scalar>(tree: &FiniteTree<S>, e: usize, p: &Piece<S>, out: &mut RegionSet<S>) {
    if p.is_constant() {
        for (edge, u) in tree.representations(&p.from) {
            if edge == e && p.start <= u && u <= p.end {
                out.push_point(&p.from);
            }
        }
        return;
    }
    let segs = tree.segments_between(&p.from, &p.to);
    let len = segs.iter().fold(S::zero(), |acc, s| acc + s.length());
    let k = len / p.width();
    let mut sigma0 = S::zero();
    for seg in &segs {
        let seg_len = seg.length();
        if seg.edge == e {
            // Parameter range of t whose image lies on this segment.
            let t_lo = p.start.clone() + sigma0.clone() / k.clone();
            let t_hi = p.start.clone() + (sigma0.clone() + seg_len.clone()) / k.clone();
            let dir = if seg.forward() { S::one() } else { -S::one() };
            // image offset u(t) = seg.start + dir * (k (t - start) - sigma0)
            let slope = dir.clone() * k.clone();
            let rhs = slope.clone() * p.start.clone() + dir * sigma0.clone() - seg.start.clone();
            let denom = slope - S::one();
            if denom.is_zero() {
                if rhs.is_zero() {
                    out.push_interval(e, t_lo, t_hi);
                }
            } else {
                let t = rhs / denom;
                if t >= t_lo && t <= t_hi {
                    out.push_point(&tree.point_unchecked(e, t));
                }
            }
        }
        sigma0 = sigma0 + seg_len;
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

    fn unit() -> Arc<FiniteTree<Q>> {
        Arc::new(FiniteTree::from_named(&["a", "b"], &[("e", "a", "b", q(1, 1))]).unwrap())
    }

    fn pt(t: &FiniteTree<Q>, x: Q) -> TreePoint<Q> {
        t.point(0, x).unwrap()
    }

    fn tent() -> PlMap<Q> {
        let t = unit();
        let p = vec![vec![
            Piece { start: q(0, 1), end: q(1, 2), from: TreePoint::Vertex(0), to: TreePoint::Vertex(1) },
            Piece { start: q(1, 2), end: q(1, 1), from: TreePoint::Vertex(1), to: TreePoint::Vertex(0) },
        ]];
        PlMap::new(t, p).unwrap()
    }

    fn half() -> PlMap<Q> {
        let t = unit();
        let to = pt(&t, q(1, 2));
        PlMap::new(t, vec![vec![Piece { start: q(0, 1), end: q(1, 1), from: TreePoint::Vertex(0), to }]]).unwrap()
    }

    #[test]
    fn evaluation() {
        let f = tent();
        let t = f.tree();
        assert_eq!(f.eval(&pt(t, q(3, 4))), pt(t, q(1, 2)));
        assert_eq!(half().eval(&pt(t, q(1, 2))), pt(t, q(1, 4)));
        let id = PlMap::identity(unit());
        assert_eq!(id.eval(&pt(t, q(2, 7))), pt(t, q(2, 7)));
    }

    #[test]
    fn composition() {
        let f = tent();
        let t = f.tree();
        let id = PlMap::identity(f.shared_tree());
        assert_eq!(id.compose(&f, DEFAULT_BUDGET).unwrap(), f);
        assert_eq!(f.compose(&id, DEFAULT_BUDGET).unwrap(), f);
        let t2 = f.iterate(2, DEFAULT_BUDGET).unwrap();
        assert_eq!(t2.piece_count(), 4);
        assert_eq!(t2.eval(&pt(t, q(1, 4))), TreePoint::Vertex(1));
        let h3 = half().iterate(3, DEFAULT_BUDGET).unwrap();
        assert_eq!(h3.piece_count(), 1);
        assert_eq!(h3.eval(&TreePoint::Vertex(1)), pt(t, q(1, 8)));
        assert_eq!(f.iterate(0, 10).unwrap(), id);
        assert!(matches!(f.iterate(60, 1000), Err(Error::BudgetExceeded(_))));
    }

    #[test]
    fn rejects_discontinuity() {
        let t = unit();
        let bad = vec![vec![
            Piece { start: q(0, 1), end: q(1, 2), from: TreePoint::Vertex(0), to: TreePoint::Vertex(1) },
            Piece { start: q(1, 2), end: q(1, 1), from: TreePoint::Vertex(0), to: TreePoint::Vertex(1) },
        ]];
        assert!(PlMap::new(t, bad).is_err());
    }

    #[test]
    fn images() {
        let f = tent();
        let t = f.tree();
        let left = RegionSet::parse(t, "{e[0,1/2]}").unwrap();
        assert_eq!(f.image_region(&left), RegionSet::whole(t));
        assert_eq!(f.image(), Subtree::whole(t));
        assert_eq!(half().image().format(t), "{v:a, e[0,1/2]}");
        let c = PlMap::constant(unit(), pt(t, q(1, 3)));
        assert_eq!(c.image_region(&left).format(t), "{e@1/3}");
    }

    #[test]
    fn preimages() {
        let f = tent();
        let t = f.tree();
        assert_eq!(f.preimages_point(&pt(t, q(1, 2))).format(t), "{e@1/4, e@3/4}");
        let c = PlMap::constant(unit(), pt(t, q(1, 3)));
        assert_eq!(c.preimages_point(&pt(t, q(1, 3))), RegionSet::whole(t));
        assert!(c.preimages_point(&pt(t, q(1, 2))).is_empty());
    }

    #[test]
    fn fixed_sets() {
        let f = tent();
        let t = f.tree();
        assert_eq!(f.fixed_set().unwrap().format(t), "{v:a, e@2/3}");
        assert_eq!(
            f.iterate(2, DEFAULT_BUDGET).unwrap().fixed_set().unwrap().format(t),
            "{v:a, e@2/5, e@2/3, e@4/5}"
        );
        assert_eq!(half().fixed_set().unwrap().format(t), "{v:a}");
        assert_eq!(PlMap::identity(unit()).fixed_set().unwrap(), RegionSet::whole(t));
        assert!(f.is_identity_on(&RegionSet::point(t, &pt(t, q(2, 3)))));
        assert!(!f.is_identity_on(&RegionSet::whole(t)));
    }

    #[test]
    fn retraction_map_matches_pointwise() {
        let t = Arc::new(
            FiniteTree::from_named(
                &["c", "l1", "l2", "l3"],
                &[("e1", "c", "l1", q(1, 1)), ("e2", "c", "l2", q(2, 1)), ("e3", "c", "l3", q(1, 2))],
            )
            .unwrap(),
        );
        let y = Subtree::new(&t, RegionSet::parse(&t, "{e1[1/4,1/2]}").unwrap()).unwrap();
        let r = PlMap::retraction(Arc::clone(&t), &y);
        for e in 0..3 {
            for k in 0..=8 {
                let x = t.point(e, t.edge(e).length.clone() * q(k, 8)).unwrap();
                assert_eq!(r.eval(&x), t.retract(&y, &x));
            }
        }
    }
}
