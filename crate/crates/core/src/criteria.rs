//! The nine equivalent characterizations of equicontinuity for tree maps,
//! one refutation or confirmation search per item, and the aggregate
//! analyzer that propagates verdicts across the equivalences.
//!
//! Items:
//!
//! - (a) `f` is equicontinuous
//! - (b) some `f^n` is the identity on the eventual image `⋂ f^m[X]`
//! - (c) `fix(f^n) = ⋂ f^m[X]` for some `n`
//! - (d) `per(f) = ⋂ f^m[X]`
//! - (e) there is no `f`-expanding arc
//! - (f) `fix(f^n)` is connected for every `n`
//! - (g) `per(f)` is connected
//! - (h) every remainder element `f^u` is continuous
//! - (i) some remainder element `f^u` is continuous
//!
//! Direct certificates exist for "yes" on (b), (c), (d) and for "no" on
//! (d) through (i); everything else is inferred through the equivalence and
//! labelled as such.

use std::fmt;

use crate::certificates::{
    backward_sequence, divergent_sequence, verify_divergent, BackwardSequenceCert, CertCheck,
    DisconnectedFixCert, DivergentSequenceCert, ExpandingArcCert, NonPeriodicGapCert,
};
use crate::dynamics::{
    eventual_image, modulus_probe, orbit, sample_limits, EventualImage, ImageStatus, Iterates,
    PointwiseLimit, ProbeWitness,
};
use crate::error::{Error, Result};
use crate::map::{PlMap, DEFAULT_BUDGET};
use crate::region::{RegionSet, Subtree};
use crate::scalar::Scalar;
use crate::tree::{FiniteTree, TreePoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Item {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
    H,
    I,
}

impl Item {
    pub const ALL: [Item; 9] = [
        Item::A,
        Item::B,
        Item::C,
        Item::D,
        Item::E,
        Item::F,
        Item::G,
        Item::H,
        Item::I,
    ];

    pub fn letter(self) -> char {
        (b'a' + self as u8) as char
    }

    pub fn from_letter(c: char) -> Option<Item> {
        Item::ALL.into_iter().find(|i| i.letter() == c)
    }

    pub fn statement(self) -> &'static str {
        match self {
            Item::A => "f is equicontinuous",
            Item::B => "some iterate f^n is the identity on the eventual image",
            Item::C => "fix(f^n) equals the eventual image for some n",
            Item::D => "per(f) equals the eventual image",
            Item::E => "there is no f-expanding arc",
            Item::F => "fix(f^n) is connected for every n",
            Item::G => "per(f) is connected",
            Item::H => "every remainder element f^u is continuous",
            Item::I => "some remainder element f^u is continuous",
        }
    }
}

impl fmt::Display for Item {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.letter())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Status {
    Yes,
    No,
    Undecided { depth: usize, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Direct,
    Inferred(Item),
}

/// Which certificate in [`Certificates`] backs a verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CertKind {
    Identity,
    PeriodicCore,
    PeriodicEscape,
    ExpandingArc,
    DisconnectedFix,
    NonPeriodicGap,
    DivergentSequence,
}

impl CertKind {
    pub fn name(self) -> &'static str {
        match self {
            CertKind::Identity => "identity",
            CertKind::PeriodicCore => "periodic_core",
            CertKind::PeriodicEscape => "periodic_escape",
            CertKind::ExpandingArc => "expanding_arc",
            CertKind::DisconnectedFix => "disconnected_fix",
            CertKind::NonPeriodicGap => "nonperiodic_gap",
            CertKind::DivergentSequence => "divergent_sequence",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub status: Status,
    pub provenance: Provenance,
    pub certificate: Option<CertKind>,
}

impl Verdict {
    fn direct(status: Status, cert: CertKind) -> Self {
        Verdict {
            status,
            provenance: Provenance::Direct,
            certificate: Some(cert),
        }
    }

    fn undecided(depth: usize, reason: impl Into<String>) -> Self {
        Verdict {
            status: Status::Undecided {
                depth,
                reason: reason.into(),
            },
            provenance: Provenance::Direct,
            certificate: None,
        }
    }

    pub fn is_decided(&self) -> bool {
        !matches!(self.status, Status::Undecided { .. })
    }
}

/// `f^n` is the identity on a certified eventual image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityCert<S> {
    pub n: usize,
    pub core: Subtree<S>,
    pub status: ImageStatus<S>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Certificates<S> {
    pub identity: Option<IdentityCert<S>>,
    /// `n` with `fix(f) ∪ … ∪ fix(f^n)` equal to the certified core.
    pub periodic_core: Option<usize>,
    /// A point of `fix(f^n)` outside the certified core.
    pub periodic_escape: Option<(usize, TreePoint<S>)>,
    pub expanding_arc: Option<ExpandingArcCert<S>>,
    pub disconnected_fix: Option<DisconnectedFixCert<S>>,
    pub nonperiodic_gap: Option<NonPeriodicGapCert<S>>,
    pub backward: Option<BackwardSequenceCert<S>>,
    pub divergent: Option<DivergentSequenceCert<S>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Params<S> {
    /// Uniform bound on iterate exponents and image depth.
    pub depth: usize,
    pub budget: usize,
    pub mesh: S,
    pub probe_eps: S,
    pub probe_iters: usize,
    /// Orbit length for periodicity detection inside certificates.
    pub orbit_steps: usize,
    /// Number of terms emitted in backward and divergent sequences, minus one.
    pub sequence_terms: usize,
    pub limit_steps: usize,
    pub limit_tolerance: S,
    /// Run the sampled probe and pointwise-limit table.
    pub evidence: bool,
}

impl<S: Scalar> Default for Params<S> {
    fn default() -> Self {
        Params {
            depth: 12,
            budget: DEFAULT_BUDGET,
            mesh: S::from_ratio(1, 64),
            probe_eps: S::from_ratio(1, 8),
            probe_iters: 200,
            orbit_steps: 200,
            sequence_terms: 4,
            limit_steps: 64,
            limit_tolerance: S::from_ratio(1, 1 << 20),
            evidence: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnalysisReport<S> {
    pub params: Params<S>,
    pub items: Vec<(Item, Verdict)>,
    pub eventual_image: EventualImage<S>,
    pub certificates: Certificates<S>,
    /// Heuristic: a sampled pair whose iterates separate.
    pub probe: Option<ProbeWitness<S>>,
    /// Heuristic: sampled pointwise limits of the iterates.
    pub pointwise: Option<PointwiseLimit<S>>,
    pub notes: Vec<String>,
}

impl<S: Scalar> AnalysisReport<S> {
    pub fn verdict(&self, item: Item) -> &Verdict {
        &self.items.iter().find(|(i, _)| *i == item).expect("all items present").1
    }

    pub fn fully_decided(&self) -> bool {
        self.items.iter().all(|(_, v)| v.is_decided())
    }

    /// `Some(true)` when certified equicontinuous, `Some(false)` when
    /// certified not, `None` when undecided.
    pub fn equicontinuous(&self) -> Option<bool> {
        match self.verdict(Item::A).status {
            Status::Yes => Some(true),
            Status::No => Some(false),
            Status::Undecided { .. } => None,
        }
    }
}

/// Outcome of a bounded search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Search<T> {
    Found(T),
    /// Exponents `1..=searched` were examined without success.
    Exhausted { searched: usize },
    /// The piece budget ran out at this exponent.
    Budget { at: usize },
}

/// Refutation search for (e)/(f): the first `n <= n_max` with `fix(f^n)`
/// disconnected, converted into an expanding arc.
pub fn search_expanding_arc<S: Scalar>(
    iters: &Iterates<S>,
    n_max: usize,
) -> Result<Search<(ExpandingArcCert<S>, DisconnectedFixCert<S>)>> {
    let tree = iters.base().tree();
    for n in 1..=n_max {
        let fix = match iters.fix(n) {
            Ok(r) => r,
            Err(Error::BudgetExceeded(_)) => return Ok(Search::Budget { at: n }),
            Err(e) => return Err(e),
        };
        if !fix.is_connected(tree) {
            return Ok(Search::Found(arc_from_disconnection(iters, n, &fix)?));
        }
    }
    Ok(Search::Exhausted { searched: n_max })
}

// The two components of `region` nearest each other, starting from the
// first, and the gates `a`, `b` of the arc joining them.
fn nearest_gap<S: Scalar>(tree: &FiniteTree<S>, region: &RegionSet<S>) -> Result<(TreePoint<S>, TreePoint<S>)> {
    let comps = region.components(tree);
    if comps.len() < 2 {
        return Err(Error::Internal("region is connected".into()));
    }
    let c1 = &comps[0];
    let mut best: Option<(S, usize)> = None;
    for (i, c) in comps.iter().enumerate().skip(1) {
        let d = c
            .boundary_points(tree)
            .iter()
            .map(|p| c1.distance_to(tree, p).expect("nonempty"))
            .min()
            .expect("nonempty");
        if best.as_ref().map_or(true, |(bd, _)| d < *bd) {
            best = Some((d, i));
        }
    }
    let c2 = &comps[best.unwrap().1];
    let a = tree.first_point_retraction(c1, &c2.any_point(tree).unwrap())?;
    let b = tree.first_point_retraction(c2, &a)?;
    Ok((a, b))
}

// Points strictly inside the arc `ab` where `g` may change piece, plus the
// midpoint.
fn gap_candidates<S: Scalar>(g: &PlMap<S>, a: &TreePoint<S>, b: &TreePoint<S>) -> Vec<TreePoint<S>> {
    let tree = g.tree();
    let segs = tree.segments_between(a, b);
    let len = segs.iter().fold(S::zero(), |acc, s| acc + s.length());
    let mut out = vec![tree.point_on_segments(&segs, &(len / S::two()))];
    for (i, s) in segs.iter().enumerate() {
        if i > 0 {
            out.push(tree.point_unchecked(s.edge, s.start.clone()));
        }
        for bp in g.breakpoints(s.edge) {
            if bp > s.low() && bp < s.high() {
                out.push(tree.point_unchecked(s.edge, bp.clone()));
            }
        }
    }
    out
}

/// Converts a disconnected `fix(f^n)` into an expanding arc.
///
/// Takes the gap `(a, b)` between the first component and the one nearest
/// it, so no point of the open arc is fixed. Picks `y` in the gap moved
/// farthest by `g = f^n`, retracts `g(y)` onto `ab` as `z`, and takes the
/// endpoint `x` with `y ∈ xz`; then `y ∈ x g(y)` and `xy ⊊ g[xy]`.
pub fn arc_from_disconnection<S: Scalar>(
    iters: &Iterates<S>,
    n: usize,
    fix: &RegionSet<S>,
) -> Result<(ExpandingArcCert<S>, DisconnectedFixCert<S>)> {
    let g = iters.map(n)?;
    let tree = g.tree();
    let (a, b) = nearest_gap(tree, fix)?;
    let mut best: Option<(S, String, TreePoint<S>)> = None;
    for c in gap_candidates(&g, &a, &b) {
        let d = tree.distance(&c, &g.eval(&c));
        let key = tree.point_key(&c);
        let better = match &best {
            None => true,
            Some((bd, bk, _)) => d > *bd || (d == *bd && key < *bk),
        };
        if better {
            best = Some((d, key, c));
        }
    }
    let (moved, _, y) = best.expect("midpoint is always a candidate");
    if moved.is_zero() {
        return Err(Error::Internal("gap point is fixed".into()));
    }
    let ab = Subtree::new(tree, RegionSet::path(tree, &a, &b))?;
    let gy = g.eval(&y);
    let z = tree.retract(&ab, &gy);
    let mut sides = Vec::new();
    if tree.between(&a, &y, &z) {
        sides.push(a.clone());
    }
    if tree.between(&z, &y, &b) {
        sides.push(b.clone());
    }
    let x = sides
        .into_iter()
        .min_by_key(|p| tree.point_key(p))
        .ok_or_else(|| Error::Internal("retraction lies on neither side".into()))?;
    let arc = RegionSet::path(tree, &x, &y);
    let image = g.image_region(&arc);
    if !arc.is_subset(&image) || image == arc {
        return Err(Error::Internal("constructed arc is not expanding".into()));
    }
    Ok((
        ExpandingArcCert {
            n,
            x,
            y: y.clone(),
            image: Subtree::new(tree, image)?,
        },
        DisconnectedFixCert { n, a, b, gap: y },
    ))
}

/// Confirmation search for (b)/(c): the first `n <= n_max` with `f^n` the
/// identity on the certified core.
pub fn search_identity<S: Scalar>(
    iters: &Iterates<S>,
    core: &EventualImage<S>,
    n_max: usize,
) -> Result<Search<IdentityCert<S>>> {
    if !core.is_certified() {
        return Err(Error::CoreUncertified);
    }
    for n in 1..=n_max {
        let g = match iters.map(n) {
            Ok(g) => g,
            Err(Error::BudgetExceeded(_)) => return Ok(Search::Budget { at: n }),
            Err(e) => return Err(e),
        };
        if g.is_identity_on(core.candidate.region()) {
            return Ok(Search::Found(IdentityCert {
                n,
                core: core.candidate.clone(),
                status: core.status.clone(),
            }));
        }
    }
    Ok(Search::Exhausted { searched: n_max })
}

/// (d): `Ok(n)` when the truncated periodic set equals the core at `n`,
/// `Err((n, p))` when a point of `fix(f^n)` lies outside it.
pub fn search_periodic_core<S: Scalar>(
    iters: &Iterates<S>,
    core: &EventualImage<S>,
    n_max: usize,
) -> Result<Search<std::result::Result<usize, (usize, TreePoint<S>)>>> {
    if !core.is_certified() {
        return Err(Error::CoreUncertified);
    }
    let tree = iters.base().tree();
    let target = core.candidate.region();
    let mut per = RegionSet::empty();
    for n in 1..=n_max {
        let fix = match iters.fix(n) {
            Ok(r) => r,
            Err(Error::BudgetExceeded(_)) => return Ok(Search::Budget { at: n }),
            Err(e) => return Err(e),
        };
        if !fix.is_subset(target) {
            let p = fix
                .boundary_points(tree)
                .into_iter()
                .find(|p| !target.contains(p))
                .unwrap_or_else(|| fix.any_point(tree).unwrap());
            return Ok(Search::Found(Err((n, p))));
        }
        per.extend(&fix);
        per.normalize(tree);
        if per == *target {
            return Ok(Search::Found(Ok(n)));
        }
    }
    Ok(Search::Exhausted { searched: n_max })
}

/// Refutation search for (g): a gap between periodic points holding a
/// strictly preperiodic point, which keeps `per(f)` from being connected.
pub fn search_nonperiodic_gap<S: Scalar>(
    iters: &Iterates<S>,
    n_max: usize,
    steps: usize,
) -> Result<Search<NonPeriodicGapCert<S>>> {
    let f = iters.base();
    let tree = f.tree();
    let mut per = RegionSet::empty();
    let mut fixes = Vec::new();
    for n in 1..=n_max {
        let fix = match iters.fix(n) {
            Ok(r) => r,
            Err(Error::BudgetExceeded(_)) => return Ok(Search::Budget { at: n }),
            Err(e) => return Err(e),
        };
        per.extend(&fix);
        per.normalize(tree);
        fixes.push(fix);
        if per.is_connected(tree) {
            continue;
        }
        let (a, b) = nearest_gap(tree, &per)?;
        let period = |p: &TreePoint<S>| fixes.iter().position(|r| r.contains(p)).map(|i| i + 1);
        let (Some(pa), Some(pb)) = (period(&a), period(&b)) else {
            return Err(Error::Internal("gate point is not periodic".into()));
        };
        let mut cands = gap_candidates(f, &a, &b);
        let arc = RegionSet::path(tree, &a, &b);
        for end in [&a, &b] {
            let pre = f.preimages_point(end).intersection(&arc, tree);
            cands.extend(pre.boundary_points(tree));
        }
        cands.retain(|c| c != &a && c != &b);
        cands.sort_by_key(|c| tree.point_key(c));
        cands.dedup();
        for z in cands {
            let orb = orbit(f, &z, steps);
            if let Some((pre, period)) = orb.cycle {
                if pre >= 1 {
                    return Ok(Search::Found(NonPeriodicGapCert {
                        a,
                        period_a: pa,
                        b,
                        period_b: pb,
                        gap: z,
                        preperiod: pre,
                        period,
                    }));
                }
            }
        }
    }
    Ok(Search::Exhausted { searched: n_max })
}

fn search_reason<T>(s: &Search<T>) -> String {
    match s {
        Search::Found(_) => "found".into(),
        Search::Exhausted { searched } => format!("no certificate for exponents up to {searched}"),
        Search::Budget { at } => format!("piece budget exceeded at exponent {at}"),
    }
}

/// Runs every item search, then fills undecided items through the
/// equivalence. A direct "yes" next to a direct "no" is a bug, reported as
/// [`Error::Inconsistency`].
pub fn analyze<S: Scalar>(f: &PlMap<S>, params: &Params<S>) -> Result<AnalysisReport<S>> {
    let depth = params.depth.max(1);
    let iters = Iterates::with_depth(f.clone(), params.budget, depth);
    let tree = f.tree();
    let mut certs = Certificates {
        identity: None,
        periodic_core: None,
        periodic_escape: None,
        expanding_arc: None,
        disconnected_fix: None,
        nonperiodic_gap: None,
        backward: None,
        divergent: None,
    };
    let mut notes = Vec::new();
    let mut verdicts: Vec<(Item, Verdict)> = Vec::new();

    let core = eventual_image(&iters, depth)?;

    // (e), (f)
    let arc_search = search_expanding_arc(&iters, depth)?;
    match &arc_search {
        Search::Found((arc, disc)) => {
            certs.expanding_arc = Some(arc.clone());
            certs.disconnected_fix = Some(disc.clone());
            verdicts.push((Item::E, Verdict::direct(Status::No, CertKind::ExpandingArc)));
            verdicts.push((Item::F, Verdict::direct(Status::No, CertKind::DisconnectedFix)));
        }
        other => {
            let reason = search_reason(other);
            verdicts.push((Item::E, Verdict::undecided(depth, reason.clone())));
            verdicts.push((Item::F, Verdict::undecided(depth, reason)));
        }
    }
    let refuted = certs.expanding_arc.is_some();

    // (b), (c). Once an expanding arc is known, only exponents already
    // composed are examined: larger powers of expanding maps mostly hit the
    // budget and cannot change the outcome.
    let identity_depth = if refuted {
        iters.cached_powers().min(depth)
    } else {
        depth
    };
    match search_identity(&iters, &core, identity_depth) {
        Ok(Search::Found(cert)) => {
            let fix = iters.fix(cert.n)?;
            if !cert.core.region().is_subset(&fix) {
                return Err(Error::Inconsistency(format!(
                    "f^{} is the identity on the core but fix(f^{}) misses part of it",
                    cert.n, cert.n
                )));
            }
            certs.identity = Some(cert);
            verdicts.push((Item::B, Verdict::direct(Status::Yes, CertKind::Identity)));
            verdicts.push((Item::C, Verdict::direct(Status::Yes, CertKind::Identity)));
        }
        Ok(other) => {
            let reason = search_reason(&other);
            verdicts.push((Item::B, Verdict::undecided(depth, reason.clone())));
            verdicts.push((Item::C, Verdict::undecided(depth, reason)));
        }
        Err(Error::CoreUncertified) => {
            let reason = Error::CoreUncertified.to_string();
            verdicts.push((Item::B, Verdict::undecided(depth, reason.clone())));
            verdicts.push((Item::C, Verdict::undecided(depth, reason)));
        }
        Err(e) => return Err(e),
    }

    // (d)
    let per_depth = if refuted {
        iters.cached_powers().min(depth)
    } else {
        depth
    };
    match search_periodic_core(&iters, &core, per_depth) {
        Ok(Search::Found(Ok(n))) => {
            certs.periodic_core = Some(n);
            verdicts.push((Item::D, Verdict::direct(Status::Yes, CertKind::PeriodicCore)));
        }
        Ok(Search::Found(Err(esc))) => {
            certs.periodic_escape = Some(esc);
            verdicts.push((Item::D, Verdict::direct(Status::No, CertKind::PeriodicEscape)));
        }
        Ok(other) => verdicts.push((Item::D, Verdict::undecided(depth, search_reason(&other)))),
        Err(Error::CoreUncertified) => {
            verdicts.push((Item::D, Verdict::undecided(depth, Error::CoreUncertified.to_string())))
        }
        Err(e) => return Err(e),
    }

    // (g)
    let gap_depth = if refuted {
        iters.cached_powers().min(depth)
    } else {
        depth
    };
    match search_nonperiodic_gap(&iters, gap_depth, params.orbit_steps)? {
        Search::Found(cert) => {
            certs.nonperiodic_gap = Some(cert);
            verdicts.push((Item::G, Verdict::direct(Status::No, CertKind::NonPeriodicGap)));
        }
        other => verdicts.push((Item::G, Verdict::undecided(depth, search_reason(&other)))),
    }

    // (h), (i)
    let mut ellis = Verdict::undecided(depth, "no expanding arc to start from");
    if let Some(arc) = &certs.expanding_arc {
        match backward_sequence(&iters, arc, params.sequence_terms)
            .and_then(|b| divergent_sequence(&iters, &b, params.orbit_steps).map(|d| (b, d)))
        {
            Ok((bseq, div)) => {
                match verify_divergent(f, &div, params.budget) {
                    CertCheck::Complete => {
                        ellis = Verdict::direct(Status::No, CertKind::DivergentSequence);
                    }
                    CertCheck::Partial => {
                        ellis = Verdict::undecided(depth, "orbit avoidance checked on a finite prefix only");
                    }
                    CertCheck::Failed(why) => {
                        notes.push(format!("divergent sequence rejected by checker: {why}"));
                        ellis = Verdict::undecided(depth, "divergent sequence failed verification");
                    }
                }
                certs.backward = Some(bseq);
                certs.divergent = Some(div);
            }
            Err(e) => {
                notes.push(format!("divergent sequence construction: {e}"));
                ellis = Verdict::undecided(depth, e.to_string());
            }
        }
    }
    verdicts.push((Item::H, ellis.clone()));
    verdicts.push((Item::I, ellis));

    // (a) has no direct certificate of its own.
    verdicts.push((Item::A, Verdict::undecided(depth, "decided only through the equivalence")));
    verdicts.sort_by_key(|(i, _)| *i);
    infer(&mut verdicts)?;

    if !core.is_certified() {
        notes.push("eventual image is only an enclosure".into());
    }

    let (probe, pointwise) = if params.evidence {
        (
            modulus_probe(&iters, &params.probe_eps, &params.mesh, params.probe_iters),
            Some(sample_limits(f, &params.mesh, params.limit_steps, &params.limit_tolerance)),
        )
    } else {
        (None, None)
    };
    let _ = tree;

    Ok(AnalysisReport {
        params: params.clone(),
        items: verdicts,
        eventual_image: core,
        certificates: certs,
        probe,
        pointwise,
        notes,
    })
}

/// Fills undecided items from direct verdicts. Sources are preferred in the
/// order (b), (c), (d) for "yes" and (e), (f), (g), (h), (i), (d) for "no".
pub fn infer(verdicts: &mut [(Item, Verdict)]) -> Result<()> {
    let direct = |status: &Status| -> Vec<(Item, Option<CertKind>)> {
        verdicts
            .iter()
            .filter(|(_, v)| v.provenance == Provenance::Direct && v.status == *status)
            .map(|(i, v)| (*i, v.certificate))
            .collect()
    };
    let yes = direct(&Status::Yes);
    let no = direct(&Status::No);
    if !yes.is_empty() && !no.is_empty() {
        let list = |v: &[(Item, Option<CertKind>)]| v.iter().map(|(i, _)| i.to_string()).collect::<Vec<_>>().join("");
        return Err(Error::Inconsistency(format!(
            "direct yes on {} contradicts direct no on {}",
            list(&yes),
            list(&no)
        )));
    }
    let pick = |found: &[(Item, Option<CertKind>)], order: &[Item]| {
        order
            .iter()
            .find_map(|o| found.iter().find(|(i, _)| i == o).copied())
            .or_else(|| found.first().copied())
    };
    let source = if !yes.is_empty() {
        pick(&yes, &[Item::B, Item::C, Item::D]).map(|s| (Status::Yes, s))
    } else if !no.is_empty() {
        pick(&no, &[Item::E, Item::F, Item::G, Item::H, Item::I, Item::D]).map(|s| (Status::No, s))
    } else {
        None
    };
    if let Some((status, (item, cert))) = source {
        for (_, v) in verdicts.iter_mut() {
            if !v.is_decided() {
                *v = Verdict {
                    status: status.clone(),
                    provenance: Provenance::Inferred(item),
                    certificate: cert,
                };
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::Piece;
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

    fn quick() -> Params<Q> {
        Params {
            evidence: false,
            ..Params::default()
        }
    }

    #[test]
    fn tent_arc_certificate() {
        let it = Iterates::new(tent(), DEFAULT_BUDGET);
        let t = it.base().tree();
        let Search::Found((arc, disc)) = search_expanding_arc(&it, 3).unwrap() else {
            panic!("tent has an expanding arc")
        };
        assert_eq!(arc.n, 1);
        assert_eq!(arc.x, TreePoint::Vertex(0));
        assert_eq!(arc.y, t.point(0, q(1, 2)).unwrap());
        assert_eq!(*arc.image.region(), RegionSet::whole(t));
        assert_eq!(disc.gap, arc.y);
    }

    #[test]
    fn tent_report() {
        let r = analyze(&tent(), &quick()).unwrap();
        for (item, v) in &r.items {
            assert_eq!(v.status, Status::No, "{item}");
        }
        assert_eq!(r.verdict(Item::A).provenance, Provenance::Inferred(Item::E));
        assert_eq!(r.verdict(Item::H).provenance, Provenance::Direct);
        assert_eq!(r.verdict(Item::G).provenance, Provenance::Direct);
    }

    #[test]
    fn identity_report() {
        let r = analyze(&PlMap::identity(unit()), &quick()).unwrap();
        assert!(r.items.iter().all(|(_, v)| v.status == Status::Yes));
        assert_eq!(r.certificates.identity.as_ref().unwrap().n, 1);
        assert_eq!(r.verdict(Item::A).provenance, Provenance::Inferred(Item::B));
        assert_eq!(r.verdict(Item::E).provenance, Provenance::Inferred(Item::B));
    }

    #[test]
    fn constant_map_is_positive() {
        let t = unit();
        let c = t.point(0, q(1, 3)).unwrap();
        let r = analyze(&PlMap::constant(t, c), &quick()).unwrap();
        assert!(r.items.iter().all(|(_, v)| v.status == Status::Yes));
        assert_eq!(r.certificates.identity.as_ref().unwrap().n, 1);
    }

    #[test]
    fn inference_rejects_contradictions() {
        let mut v: Vec<(Item, Verdict)> = Item::ALL
            .iter()
            .map(|i| (*i, Verdict::undecided(1, "x")))
            .collect();
        v[1].1 = Verdict::direct(Status::Yes, CertKind::Identity);
        v[4].1 = Verdict::direct(Status::No, CertKind::ExpandingArc);
        assert!(matches!(infer(&mut v), Err(Error::Inconsistency(_))));
    }
}
