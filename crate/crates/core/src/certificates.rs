//! Finite certificates and their independent checkers.
//!
//! The construction chain runs expanding arc → backward sequence →
//! divergent sequence. Every certificate here can be re-checked from the map
//! alone by the `verify_*` functions, which use repeated evaluation rather
//! than the composed iterates wherever possible.

use crate::dynamics::{orbit, Iterates};
use crate::error::{Error, Result};
use crate::map::PlMap;
use crate::region::{RegionSet, Subtree};
use crate::scalar::Scalar;
use crate::tree::{Component, FiniteTree, TreePoint};

/// `A = xy` with `A ⊊ f^n[A]`, witnessed by `f^n(x) = x`, `f^n(y) ≠ y` and
/// `y ∈ x f^n(y)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpandingArcCert<S> {
    pub n: usize,
    pub x: TreePoint<S>,
    pub y: TreePoint<S>,
    /// `f^n[A]`.
    pub image: Subtree<S>,
}

/// `fix(f^n)` is disconnected: `a`, `b` are fixed by `f^n` and `gap`, on the
/// arc between them, is not.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DisconnectedFixCert<S> {
    pub n: usize,
    pub a: TreePoint<S>,
    pub b: TreePoint<S>,
    pub gap: TreePoint<S>,
}

/// `per(f)` is disconnected: `a` and `b` are periodic and `gap`, on the arc
/// between them, is eventually periodic with a positive preperiod.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NonPeriodicGapCert<S> {
    pub a: TreePoint<S>,
    pub period_a: usize,
    pub b: TreePoint<S>,
    pub period_b: usize,
    pub gap: TreePoint<S>,
    pub preperiod: usize,
    pub period: usize,
}

/// `f^n(y_{k+1}) = y_k`, monotone toward `limit`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BackwardSequenceCert<S> {
    pub n: usize,
    /// The fixed endpoint `x` of the expanding arc the chain started from.
    pub anchor: TreePoint<S>,
    pub points: Vec<TreePoint<S>>,
    /// The nearest `f^n`-fixed point to `y_0` on the arc toward the anchor.
    pub limit: TreePoint<S>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Avoidance<S> {
    /// The `f^m`-orbit of `x_0` closes up exactly; all its points lie
    /// outside the open `rho`-ball around the limit.
    EventuallyPeriodic {
        orbit: Vec<TreePoint<S>>,
        preperiod: usize,
        period: usize,
    },
    /// Only the first `steps` orbit points were checked.
    FinitePrefix { steps: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Construction {
    /// The backward sequence itself, its base orbit staying behind `x_0`.
    BackwardItself,
    /// Chain of preimages of a fixed point found in the component of
    /// `X \ {x_0}` that `g(x_0)` falls into.
    ComponentFixedPoint,
    /// A fixed point of `r_I ∘ g^m` between `x_0` and `x_m`, then a chain
    /// interleaved with the backward sequence.
    RetractedFixedPoint,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivergentSequenceCert<S> {
    pub m: usize,
    pub points: Vec<TreePoint<S>>,
    pub limit: TreePoint<S>,
    pub rho: S,
    pub avoidance: Avoidance<S>,
    pub construction: Construction,
}

impl<S> DivergentSequenceCert<S> {
    pub fn is_complete(&self) -> bool {
        matches!(self.avoidance, Avoidance::EventuallyPeriodic { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CertCheck {
    Complete,
    /// Every stated condition holds but the certificate is partial.
    Partial,
    Failed(String),
}

impl CertCheck {
    pub fn passed(&self) -> bool {
        !matches!(self, CertCheck::Failed(_))
    }
}

macro_rules! ensure {
    ($cond:expr, $($msg:tt)*) => {
        if !$cond {
            return CertCheck::Failed(format!($($msg)*));
        }
    };
}

/// The preimage of `target` under `g` on the arc `toward target` closest to
/// `target`, excluding `target` itself. Ties cannot occur on an arc; `None`
/// when no such point exists or preimages accumulate at `target`.
pub fn closest_preimage<S: Scalar>(
    g: &PlMap<S>,
    target: &TreePoint<S>,
    toward: &TreePoint<S>,
    within: Option<&RegionSet<S>>,
) -> Option<TreePoint<S>> {
    let tree = g.tree();
    let mut cand = g
        .preimages_point(target)
        .intersection(&RegionSet::path(tree, toward, target), tree);
    if let Some(w) = within {
        cand = cand.intersection(w, tree);
    }
    let isolated = RegionSet::point(tree, target);
    for comp in cand.components(tree) {
        if comp.contains(target) && comp != isolated {
            return None;
        }
    }
    cand.boundary_points(tree)
        .into_iter()
        .filter(|p| p != target)
        .min_by(|p, q| tree.distance(p, target).cmp(&tree.distance(q, target)))
}

/// The `f^n`-fixed point on `[toward, from]` nearest to `from`.
fn nearest_fixed_on_arc<S: Scalar>(
    tree: &FiniteTree<S>,
    fix: &RegionSet<S>,
    toward: &TreePoint<S>,
    from: &TreePoint<S>,
) -> Option<TreePoint<S>> {
    let on = fix.intersection(&RegionSet::path(tree, toward, from), tree);
    on.boundary_points(tree)
        .into_iter()
        .min_by(|p, q| tree.distance(p, from).cmp(&tree.distance(q, from)))
}

/// Backward chain `y_0 = y, y_1, …, y_K` from an expanding-arc witness.
pub fn backward_sequence<S: Scalar>(
    iters: &Iterates<S>,
    cert: &ExpandingArcCert<S>,
    k: usize,
) -> Result<BackwardSequenceCert<S>> {
    let g = iters.map(cert.n)?;
    let tree = g.tree();
    let mut points = vec![cert.y.clone()];
    for _ in 0..k {
        let last = points.last().unwrap();
        let next = closest_preimage(&g, last, &cert.x, None).ok_or_else(|| {
            Error::SolverFailure(format!("no preimage of {} toward {}", tree.format_point(last), tree.format_point(&cert.x)))
        })?;
        points.push(next);
    }
    let fix = iters.fix(cert.n)?;
    let limit = nearest_fixed_on_arc(tree, &fix, &cert.x, &cert.y)
        .ok_or_else(|| Error::SolverFailure("anchor is not fixed".into()))?;
    Ok(BackwardSequenceCert {
        n: cert.n,
        anchor: cert.x.clone(),
        points,
        limit,
    })
}

/// `ρ`: half the distance from `limit` to the nearer of `p` and the first
/// branching vertex on the way to `p`.
pub fn separation_radius<S: Scalar>(tree: &FiniteTree<S>, limit: &TreePoint<S>, p: &TreePoint<S>) -> S {
    let mut d = tree.distance(limit, p);
    for v in branching_between(tree, limit, p) {
        let dv = tree.distance(limit, &TreePoint::Vertex(v));
        if dv < d {
            d = dv;
        }
    }
    d / S::two()
}

/// Branching vertices strictly inside the arc `pq`.
fn branching_between<S: Scalar>(tree: &FiniteTree<S>, p: &TreePoint<S>, q: &TreePoint<S>) -> Vec<usize> {
    let segs = tree.segments_between(p, q);
    let mut out = Vec::new();
    for s in segs.iter().skip(1) {
        if let TreePoint::Vertex(v) = tree.point_unchecked(s.edge, s.start.clone()) {
            if tree.is_branching(v) {
                out.push(v);
            }
        }
    }
    out
}

/// A fixed point of `f` in the component `comp` of `X \ {x}`, given that
/// `f(x)` lies in it; found as a fixed point of `r ∘ f` with `r` the
/// retraction onto the closure of the component.
pub fn fixed_point_in_component<S: Scalar>(
    f: &PlMap<S>,
    x: &TreePoint<S>,
    comp: &Component<S>,
    budget: usize,
) -> Result<TreePoint<S>> {
    let tree = f.tree();
    let fx = f.eval(x);
    if !comp.contains(tree, &fx) {
        return Err(Error::PreconditionViolated(format!(
            "f({}) = {} is not in the given component",
            tree.format_point(x),
            tree.format_point(&fx)
        )));
    }
    let closure = comp.closure(tree);
    let r = PlMap::retraction(f.shared_tree(), &closure);
    let h = r.compose(f, budget)?;
    let fixed = h.fixed_set()?.intersection(closure.region(), tree);
    let best = fixed
        .boundary_points(tree)
        .into_iter()
        .filter(|p| p != x)
        .min_by(|p, q| {
            tree.distance(p, x)
                .cmp(&tree.distance(q, x))
                .then_with(|| tree.point_key(p).cmp(&tree.point_key(q)))
        })
        .ok_or_else(|| Error::Internal("component holds no fixed point".into()))?;
    if f.eval(&best) != best {
        return Err(Error::Internal("retracted fixed point is not fixed".into()));
    }
    Ok(best)
}

/// Extends a backward chain by closest preimages until it has `len` points.
fn extend_chain<S: Scalar>(g: &PlMap<S>, chain: &mut Vec<TreePoint<S>>, toward: &TreePoint<S>, len: usize) -> Result<()> {
    while chain.len() < len {
        let last = chain.last().unwrap();
        let next = closest_preimage(g, last, toward, None)
            .ok_or_else(|| Error::SolverFailure("backward chain stalled".into()))?;
        chain.push(next);
    }
    Ok(())
}

/// Builds a divergent sequence from a backward sequence.
///
/// Tries, in order: the backward sequence itself when the orbit of its base
/// point never retracts past it; a preimage chain from a fixed point in the
/// component of `X \ {y_0}` containing `g(y_0)`; the retracted fixed point
/// between `x_0` and `x_m`. Falls back to a partial certificate when the
/// base orbit never closes up within `steps`.
pub fn divergent_sequence<S: Scalar>(
    iters: &Iterates<S>,
    bseq: &BackwardSequenceCert<S>,
    steps: usize,
) -> Result<DivergentSequenceCert<S>> {
    let n = bseq.n;
    let g = iters.map(n)?;
    let tree = g.tree();
    let len = bseq.points.len().max(2);
    let limit = bseq.limit.clone();

    // Shrink to a free arc: drop terms until no branching vertex lies
    // strictly between the base point and the limit.
    let mut chain = bseq.points.clone();
    let mut j = 0;
    loop {
        extend_chain(&g, &mut chain, &bseq.anchor, j + len)?;
        if branching_between(tree, &chain[j], &limit).is_empty() {
            break;
        }
        j += 1;
        if j > 64 {
            return Err(Error::SolverFailure("could not reach a free arc".into()));
        }
    }
    let xs: Vec<TreePoint<S>> = chain[j..].to_vec();
    let x0 = xs[0].clone();
    let arc = Subtree::new(tree, RegionSet::path(tree, &x0, &limit))?;

    let orb = orbit(&g, &x0, steps);
    let trigger = (1..orb.points.len()).find(|&t| tree.retract(&arc, &orb.points[t]) != x0);

    if trigger.is_none() {
        let rho = separation_radius(tree, &limit, &x0);
        let avoidance = match orb.cycle {
            Some((pre, per)) => Avoidance::EventuallyPeriodic {
                orbit: orb.distinct_points(),
                preperiod: pre,
                period: per,
            },
            None => Avoidance::FinitePrefix { steps },
        };
        let cert = DivergentSequenceCert {
            m: n,
            points: xs,
            limit,
            rho,
            avoidance,
            construction: Construction::BackwardItself,
        };
        if cert.is_complete() {
            return Ok(cert);
        }
        if let Some(c) = component_route(iters, bseq)? {
            return Ok(c);
        }
        return Ok(cert);
    }

    if let Some(c) = component_route(iters, bseq)? {
        return Ok(c);
    }

    let m = trigger.unwrap();
    let gm = iters.map(n * m)?;
    let mut xs = xs;
    // x_{(K+2)m} bounds the last link of the new chain.
    extend_chain(&g, &mut xs, &bseq.anchor, (len + 1) * m + 1)?;
    let r = PlMap::retraction(g.shared_tree(), &arc);
    let h = r.compose(&gm, iters.budget())?;
    let bracket = RegionSet::path(tree, &xs[0], &xs[m]);
    let z0 = h
        .fixed_set()?
        .intersection(&bracket, tree)
        .boundary_points(tree)
        .into_iter()
        .filter(|p| *p != xs[0] && *p != xs[m])
        .min_by(|p, q| tree.distance(p, &xs[0]).cmp(&tree.distance(q, &xs[0])))
        .ok_or_else(|| Error::SolverFailure("no retracted fixed point between x_0 and x_m".into()))?;
    if gm.eval(&z0) != z0 {
        return Err(Error::SolverFailure("retracted fixed point is not fixed".into()));
    }
    let mut zs = vec![z0.clone()];
    for i in 0..len - 1 {
        let window = RegionSet::path(tree, &xs[(i + 1) * m], &xs[(i + 2) * m]);
        let next = closest_preimage(&gm, zs.last().unwrap(), &limit, Some(&window))
            .ok_or_else(|| Error::SolverFailure("interleaved chain stalled".into()))?;
        zs.push(next);
    }
    let rho = separation_radius(tree, &limit, &z0);
    Ok(DivergentSequenceCert {
        m: n * m,
        points: zs,
        limit,
        rho,
        avoidance: Avoidance::EventuallyPeriodic {
            orbit: vec![z0],
            preperiod: 0,
            period: 1,
        },
        construction: Construction::RetractedFixedPoint,
    })
}

// Preimage chain from a fixed point in the component of X \ {y_0} holding
// g(y_0), when that component does not contain the limit.
fn component_route<S: Scalar>(
    iters: &Iterates<S>,
    bseq: &BackwardSequenceCert<S>,
) -> Result<Option<DivergentSequenceCert<S>>> {
    let g = iters.map(bseq.n)?;
    let tree = g.tree();
    let y0 = &bseq.points[0];
    let gy = g.eval(y0);
    let Some(comp) = tree
        .components_minus_point(y0)
        .into_iter()
        .find(|c| c.contains(tree, &gy))
    else {
        return Ok(None);
    };
    if comp.contains(tree, &bseq.limit) {
        return Ok(None);
    }
    let z0 = fixed_point_in_component(&g, y0, &comp, iters.budget())?;
    let toward = &bseq.limit;
    let mut zs = vec![z0.clone()];
    while zs.len() < bseq.points.len().max(2) {
        match closest_preimage(&g, zs.last().unwrap(), toward, None) {
            Some(p) => zs.push(p),
            None => return Ok(None),
        }
    }
    let fix = iters.fix(bseq.n)?;
    let Some(limit) = nearest_fixed_on_arc(tree, &fix, toward, &zs[1]) else {
        return Ok(None);
    };
    if limit == z0 {
        return Ok(None);
    }
    let cert = DivergentSequenceCert {
        m: bseq.n,
        rho: separation_radius(tree, &limit, &z0),
        points: zs,
        limit,
        avoidance: Avoidance::EventuallyPeriodic {
            orbit: vec![z0],
            preperiod: 0,
            period: 1,
        },
        construction: Construction::ComponentFixedPoint,
    };
    let f = iters.base();
    if verify_divergent(f, &cert, iters.budget()) == CertCheck::Complete {
        Ok(Some(cert))
    } else {
        Ok(None)
    }
}

/// Re-checks an expanding-arc certificate from the map alone.
pub fn verify_expanding_arc<S: Scalar>(f: &PlMap<S>, cert: &ExpandingArcCert<S>) -> CertCheck {
    let tree = f.tree();
    ensure!(cert.n >= 1, "exponent must be positive");
    ensure!(cert.x != cert.y, "arc endpoints coincide");
    ensure!(f.eval_n(&cert.x, cert.n) == cert.x, "x is not fixed by f^n");
    let fy = f.eval_n(&cert.y, cert.n);
    ensure!(fy != cert.y, "y is fixed by f^n");
    ensure!(tree.between(&cert.x, &cert.y, &fy), "y is not on the arc from x to f^n(y)");
    let a = RegionSet::path(tree, &cert.x, &cert.y);
    // f^n[A] is the n-fold image; composing f^n is not needed.
    let mut image = a.clone();
    for _ in 0..cert.n {
        image = f.image_region(&image);
    }
    ensure!(image == *cert.image.region(), "recorded image differs from f^n[A]");
    ensure!(a.is_subset(&image), "A is not contained in f^n[A]");
    ensure!(image != a, "f^n[A] equals A");
    CertCheck::Complete
}

pub fn verify_disconnected_fix<S: Scalar>(f: &PlMap<S>, cert: &DisconnectedFixCert<S>) -> CertCheck {
    let tree = f.tree();
    ensure!(f.eval_n(&cert.a, cert.n) == cert.a, "a is not fixed by f^n");
    ensure!(f.eval_n(&cert.b, cert.n) == cert.b, "b is not fixed by f^n");
    ensure!(f.eval_n(&cert.gap, cert.n) != cert.gap, "gap point is fixed");
    ensure!(
        cert.gap != cert.a && cert.gap != cert.b && tree.between(&cert.a, &cert.gap, &cert.b),
        "gap point is not between a and b"
    );
    CertCheck::Complete
}

pub fn verify_nonperiodic_gap<S: Scalar>(f: &PlMap<S>, cert: &NonPeriodicGapCert<S>) -> CertCheck {
    let tree = f.tree();
    ensure!(cert.period_a >= 1 && f.eval_n(&cert.a, cert.period_a) == cert.a, "a is not periodic");
    ensure!(cert.period_b >= 1 && f.eval_n(&cert.b, cert.period_b) == cert.b, "b is not periodic");
    ensure!(
        cert.gap != cert.a && cert.gap != cert.b && tree.between(&cert.a, &cert.gap, &cert.b),
        "gap point is not between a and b"
    );
    ensure!(cert.preperiod >= 1 && cert.period >= 1, "gap orbit must have a positive preperiod");
    let mut pts = vec![cert.gap.clone()];
    for _ in 0..cert.preperiod + cert.period {
        pts.push(f.eval(pts.last().unwrap()));
    }
    ensure!(
        pts[cert.preperiod + cert.period] == pts[cert.preperiod],
        "gap orbit does not close up"
    );
    let cycle = &pts[cert.preperiod..cert.preperiod + cert.period];
    ensure!(!cycle.contains(&cert.gap), "gap point is periodic");
    CertCheck::Complete
}

pub fn verify_backward<S: Scalar>(f: &PlMap<S>, cert: &BackwardSequenceCert<S>) -> CertCheck {
    let tree = f.tree();
    ensure!(!cert.points.is_empty(), "empty sequence");
    ensure!(f.eval_n(&cert.limit, cert.n) == cert.limit, "limit is not fixed");
    for w in cert.points.windows(2) {
        ensure!(f.eval_n(&w[1], cert.n) == w[0], "backward relation fails at {}", tree.format_point(&w[1]));
    }
    for w in cert.points.windows(3) {
        ensure!(w[1] != w[0] && tree.between(&w[0], &w[1], &w[2]), "sequence is not monotone");
    }
    for p in &cert.points {
        ensure!(tree.between(&cert.anchor, &cert.limit, p), "limit is not between the anchor and the sequence");
    }
    CertCheck::Complete
}

/// Walks the three defining conditions of a divergent sequence.
pub fn verify_divergent<S: Scalar>(f: &PlMap<S>, cert: &DivergentSequenceCert<S>, budget: usize) -> CertCheck {
    let tree = f.tree();
    let m = cert.m;
    ensure!(m >= 1 && cert.points.len() >= 2, "need m >= 1 and two points");
    ensure!(cert.rho > S::zero(), "radius must be positive");
    // Backward relations.
    for w in cert.points.windows(2) {
        ensure!(f.eval_n(&w[1], m) == w[0], "relation g(x_(k+1)) = x_k fails");
    }
    // Monotone convergence: every term lies between its predecessor and
    // the limit, the limit is fixed, and no other fixed point sits on the
    // arc from the limit to x_1, so the chain of nearest preimages cannot
    // stop short of the limit.
    ensure!(f.eval_n(&cert.limit, m) == cert.limit, "limit is not fixed by g");
    for w in cert.points.windows(2) {
        ensure!(
            w[1] != w[0] && w[1] != cert.limit && tree.between(&w[0], &w[1], &cert.limit),
            "sequence is not monotone toward the limit"
        );
    }
    let fix = match Iterates::new(f.clone(), budget).fix(m) {
        Ok(r) => r,
        Err(e) => return CertCheck::Failed(format!("cannot form fix(g): {e}")),
    };
    let on_arc = fix.intersection(&RegionSet::path(tree, &cert.limit, &cert.points[1]), tree);
    ensure!(on_arc == RegionSet::point(tree, &cert.limit), "another fixed point lies between the limit and x_1");
    // Orbit avoidance.
    match &cert.avoidance {
        Avoidance::EventuallyPeriodic { orbit, preperiod, period } => {
            ensure!(*period >= 1 && orbit.len() == preperiod + period, "malformed orbit record");
            ensure!(orbit[0] == cert.points[0], "orbit does not start at x_0");
            for w in orbit.windows(2) {
                ensure!(f.eval_n(&w[0], m) == w[1], "orbit step is wrong");
            }
            ensure!(
                f.eval_n(orbit.last().unwrap(), m) == orbit[*preperiod],
                "orbit does not close up"
            );
            for p in orbit.iter().skip(1).chain(std::iter::once(&orbit[*preperiod])) {
                ensure!(tree.distance(p, &cert.limit) >= cert.rho, "orbit enters the rho-ball");
            }
            CertCheck::Complete
        }
        Avoidance::FinitePrefix { steps } => {
            let mut p = cert.points[0].clone();
            for _ in 0..*steps {
                p = f.eval_n(&p, m);
                ensure!(tree.distance(&p, &cert.limit) >= cert.rho, "orbit prefix enters the rho-ball");
            }
            CertCheck::Partial
        }
    }
}

/// Searches `δ = L, L/2, L/4, …` down to `resolution` (with `L` the longest
/// edge) for a forward-invariant `k`-od neighborhood of the fixed point `x`,
/// `k` its order: `Y = Z ∪ f[Z] ∪ … ∪ f^k[Z]` with `Z` the closed δ-ball.
pub fn invariant_kod<S: Scalar>(f: &PlMap<S>, x: &TreePoint<S>, resolution: &S) -> Result<Option<Subtree<S>>> {
    let tree = f.tree();
    if f.eval(x) != *x {
        return Err(Error::PreconditionViolated(format!("{} is not fixed", tree.format_point(x))));
    }
    let k = tree.order(x);
    let mut delta = tree
        .edges()
        .iter()
        .map(|e| e.length.clone())
        .max()
        .expect("trees have edges");
    let point = RegionSet::point(tree, x);
    while delta >= *resolution {
        let z = point.neighborhood(tree, &delta);
        let mut y = z.clone();
        let mut layer = z;
        for _ in 0..k {
            layer = f.image_region(&layer);
            y.extend(&layer);
        }
        y.normalize(tree);
        if is_kod_at(tree, &y, x, k) && f.image_region(&y).is_subset(&y) {
            return Ok(Some(Subtree::new(tree, y)?));
        }
        delta = delta / S::two();
    }
    Ok(None)
}

// Y is an arc (k <= 2) or has exactly one branching point, x, of order k.
fn is_kod_at<S: Scalar>(tree: &FiniteTree<S>, y: &RegionSet<S>, x: &TreePoint<S>, k: usize) -> bool {
    if !y.is_connected(tree) || !y.contains(x) {
        return false;
    }
    let mut branching = Vec::new();
    for &v in y.vertices() {
        let ord = tree
            .incident(v)
            .iter()
            .filter(|&&e| {
                let edge = tree.edge(e);
                y.intervals_on(e).iter().any(|(lo, hi)| {
                    lo < hi && if edge.from == v { lo.is_zero() } else { *hi == edge.length }
                })
            })
            .count();
        if ord >= 3 {
            branching.push((v, ord));
        }
    }
    if k <= 2 {
        branching.is_empty()
    } else {
        branching.len() == 1 && TreePoint::Vertex(branching[0].0) == *x && branching[0].1 == k
    }
}

/// Sampled pointwise limits of the iterates, labelled heuristic.
pub fn pointwise_limit_map<S: Scalar>(
    f: &PlMap<S>,
    mesh: &S,
    steps: usize,
    tol: &S,
) -> crate::dynamics::PointwiseLimit<S> {
    crate::dynamics::sample_limits(f, mesh, steps, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::*;
    use crate::map::DEFAULT_BUDGET;

    fn arc(f: &PlMap<Q>, x: (i64, i64), y: (i64, i64)) -> ExpandingArcCert<Q> {
        let t = f.tree();
        let (x, y) = (at(t, x.0, x.1), at(t, y.0, y.1));
        let image = Subtree::new(t, f.image_region(&RegionSet::path(t, &x, &y))).unwrap();
        ExpandingArcCert { n: 1, x, y, image }
    }

    #[test]
    fn tent_backward_halves() {
        let f = tent();
        let it = Iterates::new(f.clone(), DEFAULT_BUDGET);
        let b = backward_sequence(&it, &arc(&f, (0, 1), (1, 2)), 3).unwrap();
        let t = f.tree();
        let want: Vec<_> = [2, 4, 8, 16].iter().map(|&d| at(t, 1, d)).collect();
        assert_eq!(b.points, want);
        assert_eq!(b.limit, TreePoint::Vertex(0));
        assert_eq!(verify_backward(&f, &b), CertCheck::Complete);
    }

    #[test]
    fn tent_divergent_from_fixed_point() {
        let f = tent();
        let t = f.tree();
        let it = Iterates::new(f.clone(), DEFAULT_BUDGET);
        let c = arc(&f, (0, 1), (1, 2));
        assert_eq!(verify_expanding_arc(&f, &c), CertCheck::Complete);
        let b = backward_sequence(&it, &c, 3).unwrap();
        let d = divergent_sequence(&it, &b, 200).unwrap();
        assert_eq!(d.construction, Construction::ComponentFixedPoint);
        assert_eq!(d.m, 1);
        assert_eq!(d.points, vec![at(t, 2, 3), at(t, 1, 3), at(t, 1, 6), at(t, 1, 12)]);
        assert_eq!(d.limit, TreePoint::Vertex(0));
        assert_eq!(d.rho, q(1, 3));
        assert_eq!(verify_divergent(&f, &d, DEFAULT_BUDGET), CertCheck::Complete);
    }

    #[test]
    fn clamped_divergent_is_backward_chain() {
        let f = clamped();
        let t = f.tree();
        let it = Iterates::new(f.clone(), DEFAULT_BUDGET);
        let c = arc(&f, (0, 1), (1, 2));
        assert_eq!(verify_expanding_arc(&f, &c), CertCheck::Complete);
        let b = backward_sequence(&it, &c, 3).unwrap();
        let d = divergent_sequence(&it, &b, 200).unwrap();
        assert_eq!(d.construction, Construction::BackwardItself);
        assert_eq!(d.points, vec![at(t, 1, 2), at(t, 1, 4), at(t, 1, 8), at(t, 1, 16)]);
        assert_eq!(d.rho, q(1, 4));
        assert!(d.is_complete());
        assert_eq!(verify_divergent(&f, &d, DEFAULT_BUDGET), CertCheck::Complete);
    }

    #[test]
    fn tampered_certificates_fail() {
        let f = tent();
        let t = f.tree();
        let mut c = arc(&f, (0, 1), (1, 2));
        c.y = at(t, 3, 4);
        assert!(!verify_expanding_arc(&f, &c).passed());
        let it = Iterates::new(f.clone(), DEFAULT_BUDGET);
        let b = backward_sequence(&it, &arc(&f, (0, 1), (1, 2)), 3).unwrap();
        let mut d = divergent_sequence(&it, &b, 200).unwrap();
        d.points[2] = at(t, 1, 5);
        assert!(!verify_divergent(&f, &d, DEFAULT_BUDGET).passed());
        let mut d = divergent_sequence(&it, &b, 200).unwrap();
        d.rho = q(1, 1);
        assert!(!verify_divergent(&f, &d, DEFAULT_BUDGET).passed());
    }

    #[test]
    fn fixed_point_in_component_examples() {
        let f = tent();
        let t = f.tree();
        let x = at(t, 1, 2);
        let comps = t.components_minus_point(&x);
        let right = comps.iter().find(|c| c.contains(t, &TreePoint::Vertex(1))).unwrap();
        assert_eq!(fixed_point_in_component(&f, &x, right, DEFAULT_BUDGET).unwrap(), at(t, 2, 3));

        let h = half();
        let left = comps.iter().find(|c| c.contains(t, &TreePoint::Vertex(0))).unwrap();
        assert_eq!(fixed_point_in_component(&h, &x, left, DEFAULT_BUDGET).unwrap(), TreePoint::Vertex(0));

        let id = PlMap::identity(unit());
        assert!(matches!(
            fixed_point_in_component(&id, &x, left, DEFAULT_BUDGET),
            Err(Error::PreconditionViolated(_))
        ));
    }

    #[test]
    fn nonperiodic_gap_checker() {
        let f = tent();
        let t = f.tree();
        // 1/3 -> 2/3 fixed, between the fixed points 0 and 2/3.
        let good = NonPeriodicGapCert {
            a: TreePoint::Vertex(0),
            period_a: 1,
            b: at(t, 2, 3),
            period_b: 1,
            gap: at(t, 1, 3),
            preperiod: 1,
            period: 1,
        };
        assert_eq!(verify_nonperiodic_gap(&f, &good), CertCheck::Complete);
        let bad = NonPeriodicGapCert { gap: at(t, 2, 5), preperiod: 0, period: 2, ..good };
        assert!(!verify_nonperiodic_gap(&f, &bad).passed());
    }

    #[test]
    fn invariant_kod_on_interval() {
        let h = half();
        let y = invariant_kod(&h, &TreePoint::Vertex(0), &q(1, 64)).unwrap().unwrap();
        assert!(h.image_region(y.region()).is_subset(y.region()));
        assert!(y.contains(&TreePoint::Vertex(0)));
        assert!(invariant_kod(&h, &TreePoint::Vertex(1), &q(1, 64)).is_err());
    }
}
