//! Orbits, iterate caches, the eventual image, periodic sets and the
//! numeric equicontinuity probe.

use std::cell::{Cell, RefCell};
use std::collections::{BTreeMap, HashMap};
use std::rc::Rc;

use crate::error::{Error, Result};
use crate::map::PlMap;
use crate::region::{RegionSet, Subtree};
use crate::scalar::Scalar;
use crate::tree::TreePoint;

/// Depth used to build the invariant subtree when none is given.
pub const DEFAULT_DEPTH: usize = 12;

/// Memoized powers of a map restricted to an invariant subtree, and their
/// fixed sets.
///
/// With `Y = f^D[X]` (forward invariant, holding every periodic point) and
/// `h = f ∘ r_Y`, the powers `h^n` agree with `f^n` on `Y` and
/// `fix(h^n) = fix(f^n)`: a point with `h^n(x) = x` lies in `h[X] ⊆ Y`, where
/// `h` is `f`. Off `Y`, `h^n` is constant on each piece, so piece counts
/// track only the dynamics on `Y`.
pub struct Iterates<S: Scalar> {
    base: PlMap<S>,
    invariant: Subtree<S>,
    budget: usize,
    // maps[k] = h^(k+1)
    maps: RefCell<Vec<Rc<PlMap<S>>>>,
    failed_at: Cell<Option<usize>>,
    fixes: RefCell<HashMap<usize, Rc<RegionSet<S>>>>,
}

/// `f^depth[X]`, or the first image that `f` maps onto itself.
pub fn forward_image<S: Scalar>(f: &PlMap<S>, depth: usize) -> Subtree<S> {
    let mut y = Subtree::whole(f.tree());
    for _ in 0..depth {
        let next = f.image_subtree(&y);
        if next == y {
            break;
        }
        y = next;
    }
    y
}

impl<S: Scalar> Iterates<S> {
    pub fn new(f: PlMap<S>, budget: usize) -> Self {
        Self::with_depth(f, budget, DEFAULT_DEPTH)
    }

    pub fn with_depth(f: PlMap<S>, budget: usize, depth: usize) -> Self {
        let invariant = forward_image(&f, depth);
        let reduced = if invariant == Subtree::whole(f.tree()) {
            f.clone()
        } else {
            let r = PlMap::retraction(f.shared_tree(), &invariant);
            f.compose(&r, usize::MAX).expect("unbounded budget")
        };
        Iterates {
            maps: RefCell::new(vec![Rc::new(reduced)]),
            base: f,
            invariant,
            budget,
            failed_at: Cell::new(None),
            fixes: RefCell::new(HashMap::new()),
        }
    }

    pub fn base(&self) -> &PlMap<S> {
        &self.base
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    /// The forward-invariant subtree on which [`map`](Self::map) is exact.
    pub fn invariant(&self) -> &Subtree<S> {
        &self.invariant
    }

    /// Number of powers already composed.
    pub fn cached_powers(&self) -> usize {
        self.maps.borrow().len()
    }

    /// A map agreeing with `f^n` on [`invariant`](Self::invariant), with the
    /// same fixed set as `f^n`. `n >= 1`.
    pub fn map(&self, n: usize) -> Result<Rc<PlMap<S>>> {
        assert!(n >= 1, "iterate index starts at 1");
        if let Some(k) = self.failed_at.get() {
            if n >= k {
                return Err(Error::BudgetExceeded(self.budget));
            }
        }
        let mut maps = self.maps.borrow_mut();
        while maps.len() < n {
            let next = maps[0].compose(maps.last().unwrap(), self.budget);
            match next {
                Ok(m) => maps.push(Rc::new(m)),
                Err(e) => {
                    self.failed_at.set(Some(maps.len() + 1));
                    return Err(e);
                }
            }
        }
        Ok(Rc::clone(&maps[n - 1]))
    }

    /// `fix(f^n)`.
    pub fn fix(&self, n: usize) -> Result<Rc<RegionSet<S>>> {
        if let Some(r) = self.fixes.borrow().get(&n) {
            return Ok(Rc::clone(r));
        }
        let r = Rc::new(self.map(n)?.fixed_set()?);
        self.fixes.borrow_mut().insert(n, Rc::clone(&r));
        Ok(r)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitRecord<S> {
    pub base: TreePoint<S>,
    /// `x, f(x), …, f^N(x)`.
    pub points: Vec<TreePoint<S>>,
    /// `(preperiod, period)` when an exact repetition was seen.
    pub cycle: Option<(usize, usize)>,
}

impl<S: Scalar> OrbitRecord<S> {
    pub fn is_eventually_periodic(&self) -> bool {
        self.cycle.is_some()
    }

    /// The distinct points of the orbit, exact when eventually periodic.
    pub fn distinct_points(&self) -> Vec<TreePoint<S>> {
        let end = match self.cycle {
            Some((pre, per)) => pre + per,
            None => self.points.len(),
        };
        self.points[..end.min(self.points.len())].to_vec()
    }

    /// The periodic cycle reached by the orbit.
    pub fn cycle_points(&self) -> Option<Vec<TreePoint<S>>> {
        let (pre, per) = self.cycle?;
        Some(self.points[pre..pre + per].to_vec())
    }
}

/// Exact orbit prefix of length `steps + 1`, with repetition detection.
pub fn orbit<S: Scalar>(f: &PlMap<S>, x: &TreePoint<S>, steps: usize) -> OrbitRecord<S> {
    let mut points = vec![x.clone()];
    let mut seen: HashMap<TreePoint<S>, usize> = HashMap::new();
    seen.insert(x.clone(), 0);
    let mut cycle = None;
    while points.len() <= steps {
        let next = f.eval(points.last().unwrap());
        if let Some(&i) = seen.get(&next) {
            cycle = Some((i, points.len() - i));
            break;
        }
        seen.insert(next.clone(), points.len());
        points.push(next);
    }
    if let Some((pre, per)) = cycle {
        while points.len() <= steps {
            let k = points.len();
            points.push(points[pre + (k - pre) % per].clone());
        }
    }
    OrbitRecord {
        base: x.clone(),
        points,
        cycle,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ImageStatus<S> {
    /// `f^m[X] = f^(m+1)[X]`.
    Exact { depth: usize },
    /// The candidate is `fix(f^power)` with `f[candidate] = candidate`;
    /// `f^depth[X]` lies in its closed `radius`-neighborhood and `f^power`
    /// moves it toward the candidate with factor `contraction < 1`.
    CertifiedLimit {
        depth: usize,
        power: usize,
        radius: S,
        contraction: S,
    },
    /// Only the outer bound `f^depth[X]` is known.
    Enclosure { depth: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventualImage<S> {
    pub candidate: Subtree<S>,
    pub status: ImageStatus<S>,
    /// `f^depth[X]` at the depth where the search stopped.
    pub outer: Subtree<S>,
}

impl<S: Scalar> EventualImage<S> {
    pub fn is_certified(&self) -> bool {
        !matches!(self.status, ImageStatus::Enclosure { .. })
    }
}

/// The intersection of the forward images `f^m[X]`.
pub fn eventual_image<S: Scalar>(iters: &Iterates<S>, max_depth: usize) -> Result<EventualImage<S>> {
    let f = iters.base();
    let tree = f.tree();
    let mut y = Subtree::whole(tree);
    for m in 0..max_depth.max(1) {
        let next = f.image_subtree(&y);
        if next == y {
            return Ok(EventualImage {
                candidate: y.clone(),
                status: ImageStatus::Exact { depth: m },
                outer: y,
            });
        }
        y = next;
    }
    let depth = max_depth.max(1);
    for k in 1..=4 {
        let p = match iters.fix(k) {
            Ok(p) => p,
            Err(Error::BudgetExceeded(_)) => break,
            Err(e) => return Err(e),
        };
        if let Some((radius, contraction)) = contraction_certificate(iters, k, &p, &y)? {
            let candidate = Subtree::new(tree, (*p).clone())?;
            return Ok(EventualImage {
                candidate,
                status: ImageStatus::CertifiedLimit {
                    depth,
                    power: k,
                    radius,
                    contraction,
                },
                outer: y,
            });
        }
    }
    Ok(EventualImage {
        candidate: y.clone(),
        status: ImageStatus::Enclosure { depth },
        outer: y,
    })
}

/// Checks that `p = fix(f^k)` is the eventual image given the invariant
/// outer bound `y = f^m[X]`: `p` connected, `f[p] = p`, and `f^k` has speed
/// at most `c < 1` on every piece meeting `y \ p` in positive length.
/// Returns `(r, c)` with `y` inside the closed `r`-neighborhood of `p`.
///
/// For `x` in `y`, the geodesic from `x` to its retraction `q` onto `p`
/// runs through `y \ p` apart from `q`, and `f^k(q) = q`, so
/// `d(f^k x, p) <= c d(x, p)`. Hence the iterates of `y` shrink onto `p`.
pub fn contraction_certificate<S: Scalar>(
    iters: &Iterates<S>,
    k: usize,
    p: &RegionSet<S>,
    y: &Subtree<S>,
) -> Result<Option<(S, S)>> {
    let f = iters.base();
    let tree = f.tree();
    if p.is_empty() || !p.is_connected(tree) || f.image_region(p) != *p || !p.is_subset(y) {
        return Ok(None);
    }
    let mut radius = S::zero();
    for b in y.boundary_points(tree) {
        let d = p.distance_to(tree, &b).expect("nonempty");
        if d > radius {
            radius = d;
        }
    }
    // Only points of y matter: the geodesic from x in y to its retraction
    // onto p stays inside the connected set y.
    let fk = if y.is_subset(iters.invariant()) {
        match iters.map(k) {
            Ok(m) => m,
            Err(Error::BudgetExceeded(_)) => return Ok(None),
            Err(e) => return Err(e),
        }
    } else {
        match f.iterate(k, iters.budget()) {
            Ok(m) => Rc::new(m),
            Err(Error::BudgetExceeded(_)) => return Ok(None),
            Err(e) => return Err(e),
        }
    };
    let mut worst = S::zero();
    for (e, list) in fk.all_pieces().iter().enumerate() {
        for piece in list {
            let overlap_y = overlap(y.intervals_on(e), &piece.start, &piece.end);
            let overlap_p = overlap(p.intervals_on(e), &piece.start, &piece.end);
            if overlap_y > overlap_p {
                let s = piece.speed(tree);
                if s > worst {
                    worst = s;
                }
            }
        }
    }
    if worst < S::one() {
        Ok(Some((radius, worst)))
    } else {
        Ok(None)
    }
}

pub(crate) fn overlap<S: Scalar>(ivs: &[(S, S)], a: &S, b: &S) -> S {
    ivs.iter().fold(S::zero(), |acc, (lo, hi)| {
        let l = crate::scalar::max(lo, a);
        let h = crate::scalar::min(hi, b);
        if l < h {
            acc + h - l
        } else {
            acc
        }
    })
}

/// `fix(f) ∪ … ∪ fix(f^n)`.
pub fn periodic_set<S: Scalar>(iters: &Iterates<S>, n: usize) -> Result<RegionSet<S>> {
    let tree = iters.base().tree();
    let mut out = RegionSet::empty();
    for k in 1..=n {
        let fk = iters.fix(k)?;
        out.extend(&fk);
    }
    out.normalize(tree);
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OmegaEstimate<S> {
    pub points: Vec<TreePoint<S>>,
    /// True when read off an exact cycle; otherwise a heuristic guess.
    pub exact: bool,
}

/// Cluster representatives of the orbit tail.
pub fn omega_limit_estimate<S: Scalar>(
    iters: &Iterates<S>,
    x: &TreePoint<S>,
    steps: usize,
    tail: usize,
    tolerance: &S,
) -> OmegaEstimate<S> {
    let f = iters.base();
    let tree = f.tree();
    let orb = orbit(f, x, steps);
    if let Some(mut pts) = orb.cycle_points() {
        pts.sort_by_key(|p| tree.point_key(p));
        return OmegaEstimate { points: pts, exact: true };
    }
    let tail_pts = &orb.points[orb.points.len() - tail.min(orb.points.len())..];
    // Snap the tail onto fix(f^p) for a small period p when it is close.
    for p in 1..=4 {
        let Ok(fix) = iters.fix(p) else { break };
        let mut reps: Vec<TreePoint<S>> = Vec::new();
        let mut ok = true;
        for t in tail_pts {
            let Some(d) = fix.distance_to(tree, t) else {
                ok = false;
                break;
            };
            if d > *tolerance {
                ok = false;
                break;
            }
            let near = nearest_in(tree, &fix, t);
            if !reps.contains(&near) {
                reps.push(near);
            }
        }
        if ok {
            reps.sort_by_key(|p| tree.point_key(p));
            return OmegaEstimate { points: reps, exact: false };
        }
    }
    let mut pts: Vec<TreePoint<S>> = Vec::new();
    for t in tail_pts {
        if !pts.contains(t) {
            pts.push(t.clone());
        }
    }
    OmegaEstimate { points: pts, exact: false }
}

/// Nearest point of a nonempty region to `x`.
pub fn nearest_in<S: Scalar>(
    tree: &crate::tree::FiniteTree<S>,
    region: &RegionSet<S>,
    x: &TreePoint<S>,
) -> TreePoint<S> {
    let mut best: Option<(S, TreePoint<S>)> = None;
    for comp in region.components(tree) {
        let r = tree
            .first_point_retraction(&comp, x)
            .expect("components are nonempty");
        let d = tree.distance(x, &r);
        if best.as_ref().map_or(true, |(bd, _)| d < *bd) {
            best = Some((d, r));
        }
    }
    best.expect("region is nonempty").1
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbeWitness<S> {
    pub x: TreePoint<S>,
    pub y: TreePoint<S>,
    pub n: usize,
    pub separation: S,
}

/// Mesh points along every edge: offsets `0, mesh, 2 mesh, …` and the far end.
pub fn mesh_points<S: Scalar>(tree: &crate::tree::FiniteTree<S>, mesh: &S) -> Vec<Vec<TreePoint<S>>> {
    tree.edges()
        .iter()
        .enumerate()
        .map(|(e, edge)| {
            let mut pts = Vec::new();
            let mut t = S::zero();
            while t < edge.length {
                pts.push(tree.point_unchecked(e, t.clone()));
                t = t + mesh.clone();
            }
            pts.push(TreePoint::Vertex(edge.to));
            pts
        })
        .collect()
}

/// Halvings a separating pair must survive before it counts as a witness.
pub const PROBE_REFINEMENTS: usize = 10;

/// Searches mesh-adjacent pairs for `n <= max_iter` with
/// `d(f^n x, f^n y) > eps`. Heuristic evidence only.
///
/// A separating pair is bisected [`PROBE_REFINEMENTS`] times and one half
/// must separate again at every level, so a single steep piece (a large
/// but finite modulus) is not reported. Pairs near `fix(f)` and branching
/// points go first, since failures of equicontinuity propagate along
/// orbits.
pub fn modulus_probe<S: Scalar>(
    iters: &Iterates<S>,
    eps: &S,
    mesh: &S,
    max_iter: usize,
) -> Option<ProbeWitness<S>> {
    let f = iters.base();
    let tree = f.tree();
    let mut anchors = match iters.fix(1) {
        Ok(r) => (*r).clone(),
        Err(_) => RegionSet::empty(),
    };
    for v in 0..tree.vertex_count() {
        if tree.is_branching(v) {
            anchors.push_vertex(v);
        }
    }
    anchors.normalize(tree);

    let mut pairs: Vec<(S, usize, usize, TreePoint<S>, TreePoint<S>)> = Vec::new();
    for (e, pts) in mesh_points(tree, mesh).into_iter().enumerate() {
        for (i, w) in pts.windows(2).enumerate() {
            let d = anchors.distance_to(tree, &w[0]).unwrap_or_else(S::zero);
            pairs.push((d, e, i, w[0].clone(), w[1].clone()));
        }
    }
    pairs.sort_by(|a, b| (&a.0, a.1, a.2).cmp(&(&b.0, b.1, b.2)));

    let mut probe = Probe {
        f,
        eps,
        max_iter,
        cache: HashMap::new(),
    };
    for (_, _, _, x, y) in pairs {
        if probe.separation(&x, &y).is_some() {
            if let Some(w) = probe.refine(x, y, PROBE_REFINEMENTS) {
                return Some(w);
            }
        }
    }
    None
}

struct Probe<'a, S: Scalar> {
    f: &'a PlMap<S>,
    eps: &'a S,
    max_iter: usize,
    cache: HashMap<TreePoint<S>, OrbitRecord<S>>,
}

impl<S: Scalar> Probe<'_, S> {
    fn orbit(&mut self, p: &TreePoint<S>) -> &OrbitRecord<S> {
        if !self.cache.contains_key(p) {
            let o = orbit(self.f, p, self.max_iter);
            self.cache.insert(p.clone(), o);
        }
        &self.cache[p]
    }

    // First n with d(f^n x, f^n y) > eps.
    fn separation(&mut self, x: &TreePoint<S>, y: &TreePoint<S>) -> Option<(usize, S)> {
        let tree = self.f.tree();
        let cx = self.orbit(x).cycle;
        let cy = self.orbit(y).cycle;
        // Once both orbits cycle, one joint period decides the rest.
        let horizon = match (cx, cy) {
            (Some((p1, q1)), Some((p2, q2))) => (p1.max(p2) + lcm(q1, q2)).min(self.max_iter),
            _ => self.max_iter,
        };
        let (ox, oy) = (&self.cache[x], &self.cache[y]);
        for n in 1..=horizon {
            let (a, b) = (&ox.points[n], &oy.points[n]);
            if a == b {
                return None;
            }
            let d = tree.distance(a, b);
            if d > *self.eps {
                return Some((n, d));
            }
        }
        None
    }

    fn refine(&mut self, x: TreePoint<S>, y: TreePoint<S>, levels: usize) -> Option<ProbeWitness<S>> {
        let tree = self.f.tree();
        if levels == 0 {
            let (n, separation) = self.separation(&x, &y)?;
            return Some(ProbeWitness { x, y, n, separation });
        }
        let segs = tree.segments_between(&x, &y);
        let half = tree.distance(&x, &y) / S::two();
        let mid = tree.point_on_segments(&segs, &half);
        for (a, b) in [(x.clone(), mid.clone()), (mid.clone(), y.clone())] {
            if self.separation(&a, &b).is_some() {
                if let Some(w) = self.refine(a, b, levels - 1) {
                    return Some(w);
                }
            }
        }
        None
    }
}

fn lcm(a: usize, b: usize) -> usize {
    let g = num_integer::gcd(a, b);
    a / g * b
}

/// Mesh-sampled table of pointwise limits `lim f^n(x)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PointwiseLimit<S> {
    /// `(sample, limit, exact)`: exact when the orbit lands on a fixed point.
    Table(Vec<(TreePoint<S>, TreePoint<S>, bool)>),
    /// A sample whose orbit tail is not Cauchy at the tolerance, with the
    /// cycle when one was seen.
    NoLimit {
        sample: TreePoint<S>,
        cycle: Option<Vec<TreePoint<S>>>,
    },
}

pub(crate) fn sample_limits<S: Scalar>(
    f: &PlMap<S>,
    mesh: &S,
    steps: usize,
    tol: &S,
) -> PointwiseLimit<S> {
    let tree = f.tree();
    let fix = f.fixed_set().ok();
    let mut table = Vec::new();
    let mut seen: BTreeMap<String, ()> = BTreeMap::new();
    for pts in mesh_points(tree, mesh) {
        for x in pts {
            if seen.insert(tree.point_key(&x), ()).is_some() {
                continue;
            }
            let orb = orbit(f, &x, steps);
            match orb.cycle {
                Some((_, 1)) => {
                    let lim = orb.points.last().unwrap().clone();
                    table.push((x, lim, true));
                }
                Some(_) => {
                    return PointwiseLimit::NoLimit {
                        sample: x,
                        cycle: orb.cycle_points(),
                    }
                }
                None => {
                    // Cauchy test on the last quarter of the orbit.
                    let tail = &orb.points[orb.points.len() - (steps / 4).max(2)..];
                    let last = tail.last().unwrap();
                    if tail.iter().any(|p| tree.distance(p, last) > *tol) {
                        return PointwiseLimit::NoLimit { sample: x, cycle: None };
                    }
                    // Report the nearby fixed point the tail settles on.
                    let lim = match &fix {
                        Some(r) if r.distance_to(tree, last).map_or(false, |d| d <= *tol) => {
                            nearest_in(tree, r, last)
                        }
                        _ => last.clone(),
                    };
                    table.push((x, lim, false));
                }
            }
        }
    }
    PointwiseLimit::Table(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::{Piece, DEFAULT_BUDGET};
    use crate::tree::FiniteTree;
    use num_bigint::BigInt;
    use num_rational::Ratio;
    use std::sync::Arc;

    type Q = Ratio<BigInt>;

    fn q(n: i64, d: i64) -> Q {
        Q::from_ratio(n, d)
    }

    fn unit() -> Arc<FiniteTree<Q>> {
        Arc::new(FiniteTree::from_named(&["a", "b"], &[("e", "a", "b", q(1, 1))]).unwrap())
    }

    fn tent() -> PlMap<Q> {
        PlMap::new(
            unit(),
            vec![vec![
                Piece { start: q(0, 1), end: q(1, 2), from: TreePoint::Vertex(0), to: TreePoint::Vertex(1) },
                Piece { start: q(1, 2), end: q(1, 1), from: TreePoint::Vertex(1), to: TreePoint::Vertex(0) },
            ]],
        )
        .unwrap()
    }

    fn half() -> PlMap<Q> {
        let t = unit();
        let to = t.point(0, q(1, 2)).unwrap();
        PlMap::new(t, vec![vec![Piece { start: q(0, 1), end: q(1, 1), from: TreePoint::Vertex(0), to }]]).unwrap()
    }

    #[test]
    fn orbits() {
        let f = tent();
        let t = f.tree();
        let o = orbit(&f, &t.point(0, q(1, 2)).unwrap(), 6);
        assert_eq!(o.cycle, Some((2, 1)));
        assert_eq!(o.points[1], TreePoint::Vertex(1));
        assert_eq!(o.points[6], TreePoint::Vertex(0));
        let h = orbit(&half(), &TreePoint::Vertex(1), 30);
        assert_eq!(h.cycle, None);
        assert_eq!(h.points[3], t.point(0, q(1, 8)).unwrap());
        let id = PlMap::identity(unit());
        let x = t.point(0, q(1, 3)).unwrap();
        assert_eq!(orbit(&id, &x, 5).cycle, Some((0, 1)));
    }

    #[test]
    fn eventual_images() {
        let it = Iterates::new(tent(), DEFAULT_BUDGET);
        let ev = eventual_image(&it, 12).unwrap();
        assert_eq!(ev.status, ImageStatus::Exact { depth: 0 });

        let it = Iterates::new(half(), DEFAULT_BUDGET);
        let ev = eventual_image(&it, 12).unwrap();
        let t = it.base().tree();
        assert_eq!(ev.candidate.format(t), "{v:a}");
        match ev.status {
            ImageStatus::CertifiedLimit { contraction, power, .. } => {
                assert_eq!(contraction, q(1, 2));
                assert_eq!(power, 1);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn periodic_sets() {
        let it = Iterates::new(tent(), DEFAULT_BUDGET);
        let t = it.base().tree();
        assert_eq!(periodic_set(&it, 2).unwrap().format(t), "{v:a, e@2/5, e@2/3, e@4/5}");
    }

    #[test]
    fn omega_estimates() {
        let it = Iterates::new(half(), DEFAULT_BUDGET);
        let t = it.base().tree();
        let est = omega_limit_estimate(&it, &TreePoint::Vertex(1), 60, 10, &q(1, 1_000_000));
        assert_eq!(est.points, vec![TreePoint::Vertex(0)]);
        assert!(!est.exact);
        let it = Iterates::new(tent(), DEFAULT_BUDGET);
        let x = t.point(0, q(2, 3)).unwrap();
        let est = omega_limit_estimate(&it, &x, 60, 10, &q(1, 1_000_000));
        assert_eq!(est.points, vec![x]);
        assert!(est.exact);
    }

    #[test]
    fn probe() {
        let it = Iterates::new(tent(), DEFAULT_BUDGET);
        let w = modulus_probe(&it, &q(1, 8), &q(1, 64), 200).expect("tent is sensitive");
        assert!(w.separation > q(1, 8));
        assert_eq!(it.base().tree().distance(&w.x, &w.y), q(1, 64 << PROBE_REFINEMENTS));
        let it = Iterates::new(half(), DEFAULT_BUDGET);
        assert!(modulus_probe(&it, &q(1, 8), &q(1, 64), 200).is_none());
        let it = Iterates::new(PlMap::identity(unit()), DEFAULT_BUDGET);
        assert!(modulus_probe(&it, &q(1, 8), &q(1, 64), 200).is_none());

        // Identity on [0, 1], slope -16 just past 1, then constant: f^2 = f,
        // equicontinuous although mesh neighbors separate at the first step.
        let t = Arc::new(FiniteTree::from_named(&["a", "b"], &[("e", "a", "b", q(2, 1))]).unwrap());
        let pt = |n, d| t.point(0, q(n, d)).unwrap();
        let piece = |s: Q, e: Q, from, to| Piece { start: s, end: e, from, to };
        let steep = PlMap::new(
            t.clone(),
            vec![vec![
                piece(q(0, 1), q(1, 1), pt(0, 1), pt(1, 1)),
                piece(q(1, 1), q(17, 16), pt(1, 1), pt(0, 1)),
                piece(q(17, 16), q(2, 1), pt(0, 1), pt(0, 1)),
            ]],
        )
        .unwrap();
        let it = Iterates::new(steep, DEFAULT_BUDGET);
        assert!(modulus_probe(&it, &q(1, 8), &q(1, 64), 200).is_none());
    }

    #[test]
    fn pointwise_limits() {
        match sample_limits(&half(), &q(1, 8), 80, &q(1, 1000)) {
            PointwiseLimit::Table(rows) => {
                assert!(rows.iter().all(|(_, l, _)| *l == TreePoint::Vertex(0)))
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            sample_limits(&tent(), &q(1, 5), 40, &q(1, 1000)),
            PointwiseLimit::NoLimit { .. }
        ));
    }
}
