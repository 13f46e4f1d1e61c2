//! Report rendering (JSON and text), and re-verification of every
//! certificate a report carries.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::certificates::{
    verify_backward, verify_disconnected_fix, verify_divergent, verify_expanding_arc, verify_nonperiodic_gap,
    Avoidance, BackwardSequenceCert, CertCheck, Construction, DisconnectedFixCert, DivergentSequenceCert,
    ExpandingArcCert, NonPeriodicGapCert,
};
use crate::criteria::{AnalysisReport, CertKind, Certificates, IdentityCert, Item, Provenance, Status};
use crate::dynamics::{overlap, EventualImage, ImageStatus, PointwiseLimit};
use crate::error::{Error, Result};
use crate::io::{parse_map, serialize_map};
use crate::map::PlMap;
use crate::region::{RegionSet, Subtree};
use crate::scalar::{parse_scalar, Scalar};
use crate::tree::{FiniteTree, TreePoint};

pub const FORMAT: &str = "treedyn-report 1";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WireReport {
    pub format: String,
    /// The analyzed map in the text file format.
    pub instance: String,
    pub params: WireParams,
    pub summary: WireSummary,
    pub items: Vec<WireItem>,
    pub eventual_image: WireCore,
    pub certificates: WireCertificates,
    pub evidence: WireEvidence,
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WireParams {
    pub depth: usize,
    pub budget: usize,
    pub mesh: String,
    pub probe_eps: String,
    pub probe_iters: usize,
    pub orbit_steps: usize,
    pub sequence_terms: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WireSummary {
    /// `yes`, `no` or `undecided`.
    pub equicontinuous: String,
    pub fully_decided: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WireItem {
    pub item: String,
    pub statement: String,
    pub status: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    /// `direct` or `inferred:<item>`.
    pub provenance: String,
    pub certificate: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WireCore {
    pub region: String,
    /// `exact`, `certified_limit` or `enclosure`.
    pub status: String,
    pub depth: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub power: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub contraction: Option<String>,
    pub outer: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct WireCertificates {
    pub identity: Option<WireIdentity>,
    pub periodic_core: Option<usize>,
    pub periodic_escape: Option<WireEscape>,
    pub expanding_arc: Option<WireArc>,
    pub disconnected_fix: Option<WireDisconnected>,
    pub nonperiodic_gap: Option<WireGap>,
    pub backward: Option<WireBackward>,
    pub divergent: Option<WireDivergent>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WireIdentity {
    pub n: usize,
    pub core: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WireEscape {
    pub n: usize,
    pub point: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WireArc {
    pub n: usize,
    pub x: String,
    pub y: String,
    pub arc: String,
    pub image: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WireDisconnected {
    pub n: usize,
    pub a: String,
    pub b: String,
    pub gap: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WireGap {
    pub a: String,
    pub period_a: usize,
    pub b: String,
    pub period_b: usize,
    pub gap: String,
    pub preperiod: usize,
    pub period: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WireBackward {
    pub n: usize,
    pub anchor: String,
    pub points: Vec<String>,
    pub limit: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WireDivergent {
    pub m: usize,
    pub points: Vec<String>,
    pub limit: String,
    pub rho: String,
    pub construction: String,
    pub avoidance: WireAvoidance,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WireAvoidance {
    EventuallyPeriodic {
        orbit: Vec<String>,
        preperiod: usize,
        period: usize,
    },
    FinitePrefix {
        steps: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct WireEvidence {
    pub probe: Option<WireProbe>,
    pub pointwise: Option<WirePointwise>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WireProbe {
    pub x: String,
    pub y: String,
    pub n: usize,
    pub separation: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WirePointwise {
    Table {
        samples: usize,
        /// Distinct limit points, sorted.
        limits: Vec<String>,
    },
    NoLimit {
        sample: String,
        cycle: Option<Vec<String>>,
    },
}

fn status_name(s: &Status) -> &'static str {
    match s {
        Status::Yes => "yes",
        Status::No => "no",
        Status::Undecided { .. } => "undecided",
    }
}

fn construction_name(c: Construction) -> &'static str {
    match c {
        Construction::BackwardItself => "backward_itself",
        Construction::ComponentFixedPoint => "component_fixed_point",
        Construction::RetractedFixedPoint => "retracted_fixed_point",
    }
}

fn construction_from(s: &str) -> Result<Construction> {
    Ok(match s {
        "backward_itself" => Construction::BackwardItself,
        "component_fixed_point" => Construction::ComponentFixedPoint,
        "retracted_fixed_point" => Construction::RetractedFixedPoint,
        other => return Err(Error::Validation(format!("unknown construction `{other}`"))),
    })
}

/// Builds the machine-readable form of a report.
pub fn to_wire<S: Scalar>(f: &PlMap<S>, r: &AnalysisReport<S>, timing_ms: Option<u64>) -> WireReport {
    let tree = f.tree();
    let pt = |p: &TreePoint<S>| tree.format_point(p);
    let pts = |v: &[TreePoint<S>]| v.iter().map(|p| tree.format_point(p)).collect::<Vec<_>>();
    let items = r
        .items
        .iter()
        .map(|(item, v)| {
            let (depth, reason) = match &v.status {
                Status::Undecided { depth, reason } => (Some(*depth), Some(reason.clone())),
                _ => (None, None),
            };
            WireItem {
                item: item.letter().to_string(),
                statement: item.statement().to_string(),
                status: status_name(&v.status).to_string(),
                depth,
                reason,
                provenance: match v.provenance {
                    Provenance::Direct => "direct".to_string(),
                    Provenance::Inferred(i) => format!("inferred:{}", i.letter()),
                },
                certificate: v.certificate.map(|c| c.name().to_string()),
            }
        })
        .collect();
    let core = &r.eventual_image;
    let (status, depth, power, radius, contraction) = match &core.status {
        ImageStatus::Exact { depth } => ("exact", *depth, None, None, None),
        ImageStatus::CertifiedLimit {
            depth,
            power,
            radius,
            contraction,
        } => (
            "certified_limit",
            *depth,
            Some(*power),
            Some(radius.to_string()),
            Some(contraction.to_string()),
        ),
        ImageStatus::Enclosure { depth } => ("enclosure", *depth, None, None, None),
    };
    let c = &r.certificates;
    let certificates = WireCertificates {
        identity: c.identity.as_ref().map(|i| WireIdentity {
            n: i.n,
            core: i.core.format(tree),
        }),
        periodic_core: c.periodic_core,
        periodic_escape: c.periodic_escape.as_ref().map(|(n, p)| WireEscape { n: *n, point: pt(p) }),
        expanding_arc: c.expanding_arc.as_ref().map(|a| WireArc {
            n: a.n,
            x: pt(&a.x),
            y: pt(&a.y),
            arc: RegionSet::path(tree, &a.x, &a.y).format(tree),
            image: a.image.format(tree),
        }),
        disconnected_fix: c.disconnected_fix.as_ref().map(|d| WireDisconnected {
            n: d.n,
            a: pt(&d.a),
            b: pt(&d.b),
            gap: pt(&d.gap),
        }),
        nonperiodic_gap: c.nonperiodic_gap.as_ref().map(|g| WireGap {
            a: pt(&g.a),
            period_a: g.period_a,
            b: pt(&g.b),
            period_b: g.period_b,
            gap: pt(&g.gap),
            preperiod: g.preperiod,
            period: g.period,
        }),
        backward: c.backward.as_ref().map(|b| WireBackward {
            n: b.n,
            anchor: pt(&b.anchor),
            points: pts(&b.points),
            limit: pt(&b.limit),
        }),
        divergent: c.divergent.as_ref().map(|d| WireDivergent {
            m: d.m,
            points: pts(&d.points),
            limit: pt(&d.limit),
            rho: d.rho.to_string(),
            construction: construction_name(d.construction).to_string(),
            avoidance: match &d.avoidance {
                Avoidance::EventuallyPeriodic {
                    orbit,
                    preperiod,
                    period,
                } => WireAvoidance::EventuallyPeriodic {
                    orbit: pts(orbit),
                    preperiod: *preperiod,
                    period: *period,
                },
                Avoidance::FinitePrefix { steps } => WireAvoidance::FinitePrefix { steps: *steps },
            },
        }),
    };
    let evidence = WireEvidence {
        probe: r.probe.as_ref().map(|w| WireProbe {
            x: pt(&w.x),
            y: pt(&w.y),
            n: w.n,
            separation: w.separation.to_string(),
        }),
        pointwise: r.pointwise.as_ref().map(|p| match p {
            PointwiseLimit::Table(rows) => {
                let limits: BTreeSet<String> = rows.iter().map(|(_, l, _)| pt(l)).collect();
                WirePointwise::Table {
                    samples: rows.len(),
                    limits: limits.into_iter().collect(),
                }
            }
            PointwiseLimit::NoLimit { sample, cycle } => WirePointwise::NoLimit {
                sample: pt(sample),
                cycle: cycle.as_ref().map(|c| pts(c)),
            },
        }),
    };
    WireReport {
        format: FORMAT.to_string(),
        instance: serialize_map(f),
        params: WireParams {
            depth: r.params.depth,
            budget: r.params.budget,
            mesh: r.params.mesh.to_string(),
            probe_eps: r.params.probe_eps.to_string(),
            probe_iters: r.params.probe_iters,
            orbit_steps: r.params.orbit_steps,
            sequence_terms: r.params.sequence_terms,
        },
        summary: WireSummary {
            equicontinuous: match r.equicontinuous() {
                Some(true) => "yes",
                Some(false) => "no",
                None => "undecided",
            }
            .to_string(),
            fully_decided: r.fully_decided(),
        },
        items,
        eventual_image: WireCore {
            region: core.candidate.format(tree),
            status: status.to_string(),
            depth,
            power,
            radius,
            contraction,
            outer: core.outer.format(tree),
        },
        certificates,
        evidence,
        notes: r.notes.clone(),
        timing_ms,
    }
}

pub fn to_json<S: Scalar>(f: &PlMap<S>, r: &AnalysisReport<S>, timing_ms: Option<u64>) -> String {
    let mut s = serde_json::to_string_pretty(&to_wire(f, r, timing_ms)).expect("wire types serialize");
    s.push('\n');
    s
}

/// Human-readable report.
pub fn to_text<S: Scalar>(f: &PlMap<S>, r: &AnalysisReport<S>, timing_ms: Option<u64>) -> String {
    let w = to_wire(f, r, timing_ms);
    let mut out = String::new();
    out.push_str(&format!(
        "equicontinuous: {}{}\n",
        w.summary.equicontinuous,
        if w.summary.fully_decided { "" } else { " (some items undecided)" }
    ));
    out.push_str(&format!(
        "parameters: depth {}, budget {}, mesh {}\n",
        w.params.depth, w.params.budget, w.params.mesh
    ));
    let core = &w.eventual_image;
    out.push_str(&format!("eventual image: {} [{}", core.region, core.status));
    match (&core.power, &core.radius, &core.contraction) {
        (Some(k), Some(r), Some(c)) => out.push_str(&format!(", f^{k} contracts by {c} within radius {r}]\n")),
        _ => out.push_str(&format!(" at depth {}]\n", core.depth)),
    }
    out.push('\n');
    for it in &w.items {
        let how = match (it.provenance.as_str(), &it.certificate) {
            ("direct", Some(c)) => format!("direct, {c}"),
            ("direct", None) => String::new(),
            (p, Some(c)) => format!("{}, {c}", p.replace(':', " from ")),
            (p, None) => p.to_string(),
        };
        out.push_str(&format!("({}) {:<9} {}", it.item, it.status, it.statement));
        if !how.is_empty() {
            out.push_str(&format!("  [{how}]"));
        }
        if let Some(reason) = &it.reason {
            out.push_str(&format!("  ({reason})"));
        }
        out.push('\n');
    }
    let c = &w.certificates;
    let mut lines = Vec::new();
    if let Some(i) = &c.identity {
        lines.push(format!("identity: f^{} is the identity on {}", i.n, i.core));
    }
    if let Some(n) = c.periodic_core {
        lines.push(format!("periodic core: fix(f) ∪ … ∪ fix(f^{n}) equals the eventual image"));
    }
    if let Some(e) = &c.periodic_escape {
        lines.push(format!("periodic escape: {} is fixed by f^{} but outside the eventual image", e.point, e.n));
    }
    if let Some(a) = &c.expanding_arc {
        lines.push(format!(
            "expanding arc: A = {} with f^{}[A] = {} (x = {}, y = {})",
            a.arc, a.n, a.image, a.x, a.y
        ));
    }
    if let Some(d) = &c.disconnected_fix {
        lines.push(format!(
            "disconnected fix(f^{}): {} and {} are fixed, {} between them is not",
            d.n, d.a, d.b, d.gap
        ));
    }
    if let Some(g) = &c.nonperiodic_gap {
        lines.push(format!(
            "non-periodic gap: {} (period {}) and {} (period {}) are periodic, {} between them has preperiod {}",
            g.a, g.period_a, g.b, g.period_b, g.gap, g.preperiod
        ));
    }
    if let Some(b) = &c.backward {
        lines.push(format!(
            "backward sequence (f^{}): {} toward {}",
            b.n,
            b.points.join(", "),
            b.limit
        ));
    }
    if let Some(d) = &c.divergent {
        let avoid = match &d.avoidance {
            WireAvoidance::EventuallyPeriodic { preperiod, period, .. } => {
                format!("orbit of x_0 eventually periodic (preperiod {preperiod}, period {period})")
            }
            WireAvoidance::FinitePrefix { steps } => format!("orbit checked for {steps} steps only"),
        };
        lines.push(format!(
            "divergent sequence (f^{}, {}): {} -> {}, rho = {}, {}",
            d.m,
            d.construction,
            d.points.join(", "),
            d.limit,
            d.rho,
            avoid
        ));
    }
    if !lines.is_empty() {
        out.push_str("\ncertificates:\n");
        for l in lines {
            out.push_str(&format!("  {l}\n"));
        }
    }
    let mut ev = Vec::new();
    if let Some(p) = &w.evidence.probe {
        ev.push(format!(
            "probe: {} and {} separate by {} after {} steps",
            p.x, p.y, p.separation, p.n
        ));
    } else if r.params.evidence {
        ev.push("probe: no separating pair found".to_string());
    }
    match &w.evidence.pointwise {
        Some(WirePointwise::Table { samples, limits }) => ev.push(format!(
            "pointwise limits: {samples} samples converge, limits {}",
            limits.join(", ")
        )),
        Some(WirePointwise::NoLimit { sample, .. }) => {
            ev.push(format!("pointwise limits: orbit of {sample} does not settle"))
        }
        None => {}
    }
    if !ev.is_empty() {
        out.push_str("\nevidence (sampled, not certified):\n");
        for l in ev {
            out.push_str(&format!("  {l}\n"));
        }
    }
    if !w.notes.is_empty() {
        out.push_str("\nnotes:\n");
        for n in &w.notes {
            out.push_str(&format!("  {n}\n"));
        }
    }
    if let Some(ms) = w.timing_ms {
        out.push_str(&format!("\ntime: {ms} ms\n"));
    }
    out
}

// `(f ∘ r_Y)^n`, which agrees with `f^n` on a forward-invariant `Y`.
fn restricted_power<S: Scalar>(f: &PlMap<S>, y: &Subtree<S>, n: usize, budget: usize) -> Result<PlMap<S>> {
    let r = PlMap::retraction(f.shared_tree(), y);
    let g = f.compose(&r, budget)?;
    g.iterate(n, budget)
}

fn forward_images<S: Scalar>(f: &PlMap<S>, depth: usize) -> Subtree<S> {
    let mut y = Subtree::whole(f.tree());
    for _ in 0..depth {
        y = f.image_subtree(&y);
    }
    y
}

/// Re-derives the certification of an eventual image from `f`.
pub fn verify_core<S: Scalar>(f: &PlMap<S>, core: &EventualImage<S>, budget: usize) -> CertCheck {
    let tree = f.tree();
    let p = core.candidate.region();
    match &core.status {
        ImageStatus::Exact { depth } => {
            let y = forward_images(f, *depth);
            if y != core.candidate {
                return CertCheck::Failed("candidate differs from f^m[X]".into());
            }
            if f.image_subtree(&y) != y {
                return CertCheck::Failed("f^m[X] is not mapped onto itself".into());
            }
            CertCheck::Complete
        }
        ImageStatus::CertifiedLimit {
            depth,
            power,
            radius,
            contraction,
        } => {
            let y = forward_images(f, *depth);
            if !p.is_connected(tree) || p.is_empty() {
                return CertCheck::Failed("candidate is not a continuum".into());
            }
            if f.image_region(p) != *p {
                return CertCheck::Failed("f does not map the candidate onto itself".into());
            }
            if !p.is_subset(y.region()) {
                return CertCheck::Failed("candidate is not inside f^m[X]".into());
            }
            for b in y.boundary_points(tree) {
                if p.distance_to(tree, &b).expect("nonempty") > *radius {
                    return CertCheck::Failed("f^m[X] reaches beyond the stated radius".into());
                }
            }
            if *contraction >= S::one() {
                return CertCheck::Failed("contraction factor is not below 1".into());
            }
            let g = match restricted_power(f, &y, *power, budget) {
                Ok(g) => g,
                Err(e) => return CertCheck::Failed(format!("cannot form f^k on f^m[X]: {e}")),
            };
            match g.fixed_set() {
                Ok(fix) if fix == *p => {}
                Ok(_) => return CertCheck::Failed("candidate is not fix(f^k)".into()),
                Err(e) => return CertCheck::Failed(e.to_string()),
            }
            for (e, list) in g.all_pieces().iter().enumerate() {
                for piece in list {
                    let in_y = overlap(y.intervals_on(e), &piece.start, &piece.end);
                    let in_p = overlap(p.intervals_on(e), &piece.start, &piece.end);
                    if in_y > in_p && piece.speed(tree) > *contraction {
                        return CertCheck::Failed("f^k is faster than the stated factor off the candidate".into());
                    }
                }
            }
            CertCheck::Complete
        }
        ImageStatus::Enclosure { .. } => CertCheck::Failed("eventual image is only an enclosure".into()),
    }
}

pub fn verify_identity<S: Scalar>(f: &PlMap<S>, cert: &IdentityCert<S>, budget: usize) -> CertCheck {
    let core = EventualImage {
        candidate: cert.core.clone(),
        status: cert.status.clone(),
        outer: cert.core.clone(),
    };
    if let CertCheck::Failed(m) = verify_core(f, &core, budget) {
        return CertCheck::Failed(format!("core: {m}"));
    }
    match restricted_power(f, &cert.core, cert.n, budget) {
        Ok(g) if g.is_identity_on(cert.core.region()) => CertCheck::Complete,
        Ok(_) => CertCheck::Failed(format!("f^{} is not the identity on the core", cert.n)),
        Err(e) => CertCheck::Failed(format!("cannot form f^n on the core: {e}")),
    }
}

/// Re-verifies every certificate in `report` against `f` and checks that
/// each direct verdict is backed by a certificate that passes. Returns the
/// problems found.
pub fn recheck<S: Scalar>(f: &PlMap<S>, report: &AnalysisReport<S>, budget: usize) -> Vec<String> {
    recheck_parts(f, &report.certificates, &report.eventual_image, &direct_items(report), budget)
}

fn direct_items<S: Scalar>(report: &AnalysisReport<S>) -> Vec<(Item, Status, Option<CertKind>)> {
    report
        .items
        .iter()
        .filter(|(_, v)| v.provenance == Provenance::Direct && v.is_decided())
        .map(|(i, v)| (*i, v.status.clone(), v.certificate))
        .collect()
}

fn recheck_parts<S: Scalar>(
    f: &PlMap<S>,
    c: &Certificates<S>,
    core: &EventualImage<S>,
    direct: &[(Item, Status, Option<CertKind>)],
    budget: usize,
) -> Vec<String> {
    let tree = f.tree();
    let mut problems = Vec::new();
    let mut note = |name: &str, check: CertCheck, need_complete: bool| match check {
        CertCheck::Failed(m) => problems.push(format!("{name}: {m}")),
        CertCheck::Partial if need_complete => problems.push(format!("{name}: only partially certified")),
        _ => {}
    };
    let uses = |k: CertKind| direct.iter().any(|(_, _, c)| *c == Some(k));

    if let Some(i) = &c.identity {
        note("identity", verify_identity(f, i, budget), true);
    }
    if let Some(n) = c.periodic_core {
        let check = match verify_core(f, core, budget) {
            CertCheck::Complete => {
                let y = core.candidate.region();
                let mut per = RegionSet::empty();
                let mut ok = true;
                for k in 1..=n {
                    match restricted_power(f, &core.candidate, k, budget).and_then(|g| g.fixed_set()) {
                        Ok(fix) => {
                            per.extend(&fix.intersection(y, tree));
                        }
                        Err(_) => ok = false,
                    }
                }
                per.normalize(tree);
                if ok && per == *y {
                    CertCheck::Complete
                } else {
                    CertCheck::Failed("periodic points up to the stated period do not fill the core".into())
                }
            }
            other => other,
        };
        note("periodic_core", check, true);
    }
    if let Some((n, p)) = &c.periodic_escape {
        let check = if f.eval_n(p, *n) != *p {
            CertCheck::Failed("point is not periodic".into())
        } else if core.candidate.contains(p) {
            CertCheck::Failed("point lies in the eventual image".into())
        } else {
            verify_core(f, core, budget)
        };
        note("periodic_escape", check, true);
    }
    if let Some(a) = &c.expanding_arc {
        note("expanding_arc", verify_expanding_arc(f, a), true);
    }
    if let Some(d) = &c.disconnected_fix {
        note("disconnected_fix", verify_disconnected_fix(f, d), true);
    }
    if let Some(g) = &c.nonperiodic_gap {
        note("nonperiodic_gap", verify_nonperiodic_gap(f, g), true);
    }
    if let Some(b) = &c.backward {
        note("backward", verify_backward(f, b), false);
    }
    if let Some(d) = &c.divergent {
        note(
            "divergent",
            verify_divergent(f, d, budget),
            uses(CertKind::DivergentSequence),
        );
    }
    let present = |k: CertKind| match k {
        CertKind::Identity => c.identity.is_some(),
        CertKind::PeriodicCore => c.periodic_core.is_some(),
        CertKind::PeriodicEscape => c.periodic_escape.is_some(),
        CertKind::ExpandingArc => c.expanding_arc.is_some(),
        CertKind::DisconnectedFix => c.disconnected_fix.is_some(),
        CertKind::NonPeriodicGap => c.nonperiodic_gap.is_some(),
        CertKind::DivergentSequence => c.divergent.is_some(),
    };
    for (item, _, cert) in direct {
        match cert {
            Some(k) if present(*k) => {}
            Some(k) => problems.push(format!("{item}: certificate {} is missing", k.name())),
            None => problems.push(format!("{item}: direct verdict without a certificate")),
        }
    }
    problems
}

fn parse_item(s: &str) -> Result<Item> {
    let mut chars = s.chars();
    match (chars.next(), chars.next()) {
        (Some(c), None) => Item::from_letter(c),
        _ => None,
    }
    .ok_or_else(|| Error::Validation(format!("unknown item `{s}`")))
}

fn parse_status(s: &str) -> Result<Status> {
    Ok(match s {
        "yes" => Status::Yes,
        "no" => Status::No,
        "undecided" => Status::Undecided {
            depth: 0,
            reason: String::new(),
        },
        other => return Err(Error::Validation(format!("unknown status `{other}`"))),
    })
}

fn parse_cert_kind(s: &str) -> Result<CertKind> {
    [
        CertKind::Identity,
        CertKind::PeriodicCore,
        CertKind::PeriodicEscape,
        CertKind::ExpandingArc,
        CertKind::DisconnectedFix,
        CertKind::NonPeriodicGap,
        CertKind::DivergentSequence,
    ]
    .into_iter()
    .find(|k| k.name() == s)
    .ok_or_else(|| Error::Validation(format!("unknown certificate `{s}`")))
}

fn scalar<S: Scalar>(s: &str) -> Result<S> {
    parse_scalar(s).ok_or_else(|| Error::Validation(format!("bad rational `{s}`")))
}

fn core_from_wire<S: Scalar>(tree: &FiniteTree<S>, w: &WireCore) -> Result<EventualImage<S>> {
    let status = match w.status.as_str() {
        "exact" => ImageStatus::Exact { depth: w.depth },
        "certified_limit" => ImageStatus::CertifiedLimit {
            depth: w.depth,
            power: w.power.ok_or_else(|| Error::Validation("certified limit without power".into()))?,
            radius: scalar(w.radius.as_deref().unwrap_or(""))?,
            contraction: scalar(w.contraction.as_deref().unwrap_or(""))?,
        },
        "enclosure" => ImageStatus::Enclosure { depth: w.depth },
        other => return Err(Error::Validation(format!("unknown image status `{other}`"))),
    };
    Ok(EventualImage {
        candidate: Subtree::new(tree, RegionSet::parse(tree, &w.region)?)?,
        status,
        outer: Subtree::new(tree, RegionSet::parse(tree, &w.outer)?)?,
    })
}

fn certificates_from_wire<S: Scalar>(
    tree: &FiniteTree<S>,
    w: &WireCertificates,
    core: &EventualImage<S>,
) -> Result<Certificates<S>> {
    let pt = |s: &str| tree.parse_point(s);
    let pts = |v: &[String]| v.iter().map(|s| tree.parse_point(s)).collect::<Result<Vec<_>>>();
    Ok(Certificates {
        identity: match &w.identity {
            Some(i) => Some(IdentityCert {
                n: i.n,
                core: Subtree::new(tree, RegionSet::parse(tree, &i.core)?)?,
                status: core.status.clone(),
            }),
            None => None,
        },
        periodic_core: w.periodic_core,
        periodic_escape: match &w.periodic_escape {
            Some(e) => Some((e.n, pt(&e.point)?)),
            None => None,
        },
        expanding_arc: match &w.expanding_arc {
            Some(a) => {
                let (x, y) = (pt(&a.x)?, pt(&a.y)?);
                if RegionSet::parse(tree, &a.arc)? != RegionSet::path(tree, &x, &y) {
                    return Err(Error::Validation("expanding arc does not join x and y".into()));
                }
                Some(ExpandingArcCert {
                    n: a.n,
                    x,
                    y,
                    image: Subtree::new(tree, RegionSet::parse(tree, &a.image)?)?,
                })
            }
            None => None,
        },
        disconnected_fix: match &w.disconnected_fix {
            Some(d) => Some(DisconnectedFixCert {
                n: d.n,
                a: pt(&d.a)?,
                b: pt(&d.b)?,
                gap: pt(&d.gap)?,
            }),
            None => None,
        },
        nonperiodic_gap: match &w.nonperiodic_gap {
            Some(g) => Some(NonPeriodicGapCert {
                a: pt(&g.a)?,
                period_a: g.period_a,
                b: pt(&g.b)?,
                period_b: g.period_b,
                gap: pt(&g.gap)?,
                preperiod: g.preperiod,
                period: g.period,
            }),
            None => None,
        },
        backward: match &w.backward {
            Some(b) => Some(BackwardSequenceCert {
                n: b.n,
                anchor: pt(&b.anchor)?,
                points: pts(&b.points)?,
                limit: pt(&b.limit)?,
            }),
            None => None,
        },
        divergent: match &w.divergent {
            Some(d) => Some(DivergentSequenceCert {
                m: d.m,
                points: pts(&d.points)?,
                limit: pt(&d.limit)?,
                rho: scalar(&d.rho)?,
                construction: construction_from(&d.construction)?,
                avoidance: match &d.avoidance {
                    WireAvoidance::EventuallyPeriodic {
                        orbit,
                        preperiod,
                        period,
                    } => Avoidance::EventuallyPeriodic {
                        orbit: pts(orbit)?,
                        preperiod: *preperiod,
                        period: *period,
                    },
                    WireAvoidance::FinitePrefix { steps } => Avoidance::FinitePrefix { steps: *steps },
                },
            }),
            None => None,
        },
    })
}

/// Outcome of re-verifying a serialized report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertAudit {
    /// Certificates that were checked, by name.
    pub checked: Vec<String>,
    pub problems: Vec<String>,
}

impl CertAudit {
    pub fn passed(&self) -> bool {
        self.problems.is_empty()
    }
}

/// Parses a JSON report, rebuilds the map and certificates from their text
/// forms, and re-runs every checker. Unreadable input is returned as an
/// error; failed checks and self-contradictory certificates are listed in
/// the audit.
pub fn verify_report_json<S: Scalar>(json: &str) -> Result<CertAudit> {
    let w: WireReport = serde_json::from_str(json).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    if w.format != FORMAT {
        return Err(Error::Validation(format!("unsupported report format `{}`", w.format)));
    }
    let f: PlMap<S> = parse_map(&w.instance)?;
    let tree = f.tree();
    let parts = core_from_wire(tree, &w.eventual_image)
        .and_then(|core| certificates_from_wire(tree, &w.certificates, &core).map(|c| (core, c)));
    let (core, certs) = match parts {
        Ok(p) => p,
        // Fields that contradict each other reject the certificate.
        Err(Error::Validation(msg)) => {
            return Ok(CertAudit {
                checked: vec![],
                problems: vec![msg],
            })
        }
        Err(e) => return Err(e),
    };
    let mut direct = Vec::new();
    let mut yes = false;
    let mut no = false;
    for it in &w.items {
        let item = parse_item(&it.item)?;
        let status = parse_status(&it.status)?;
        let cert = it.certificate.as_deref().map(parse_cert_kind).transpose()?;
        match status {
            Status::Yes => yes = true,
            Status::No => no = true,
            _ => {}
        }
        if it.provenance == "direct" && status != (Status::Undecided { depth: 0, reason: String::new() }) {
            direct.push((item, status, cert));
        } else if let Some(src) = it.provenance.strip_prefix("inferred:") {
            let src = parse_item(src)?;
            let backed = w
                .items
                .iter()
                .any(|o| o.item == src.letter().to_string() && o.provenance == "direct" && o.status == it.status);
            if !backed {
                return Ok(CertAudit {
                    checked: vec![],
                    problems: vec![format!("{item}: inferred from {src}, which is not a direct verdict")],
                });
            }
        }
    }
    let mut problems = recheck_parts(&f, &certs, &core, &direct, w.params.budget);
    if yes && no {
        problems.push("report mixes yes and no verdicts".into());
    }
    let c = &w.certificates;
    let checked = [
        ("identity", c.identity.is_some()),
        ("periodic_core", c.periodic_core.is_some()),
        ("periodic_escape", c.periodic_escape.is_some()),
        ("expanding_arc", c.expanding_arc.is_some()),
        ("disconnected_fix", c.disconnected_fix.is_some()),
        ("nonperiodic_gap", c.nonperiodic_gap.is_some()),
        ("backward", c.backward.is_some()),
        ("divergent", c.divergent.is_some()),
    ]
    .into_iter()
    .filter(|(_, p)| *p)
    .map(|(n, _)| n.to_string())
    .collect();
    Ok(CertAudit { checked, problems })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criteria::{analyze, Params};
    use crate::fixtures::*;

    fn quick() -> Params<Q> {
        Params {
            evidence: false,
            ..Params::default()
        }
    }

    #[test]
    fn json_round_trip_verifies() {
        for f in [tent(), half(), clamped(), PlMap::identity(unit())] {
            let r = analyze(&f, &quick()).unwrap();
            assert!(recheck(&f, &r, r.params.budget).is_empty());
            let json = to_json(&f, &r, None);
            let audit = verify_report_json::<Q>(&json).unwrap();
            assert!(audit.passed(), "{:?}", audit.problems);
            assert!(!audit.checked.is_empty());
        }
    }

    #[test]
    fn tampering_is_caught() {
        let f = tent();
        let r = analyze(&f, &quick()).unwrap();
        let json = to_json(&f, &r, None);
        let bad = json.replace("\"rho\": \"1/3\"", "\"rho\": \"1\"");
        assert_ne!(bad, json);
        assert!(!verify_report_json::<Q>(&bad).unwrap().passed());
        let mut w: WireReport = serde_json::from_str(&json).unwrap();
        w.certificates.expanding_arc.as_mut().unwrap().n = 2;
        let audit = verify_report_json::<Q>(&serde_json::to_string(&w).unwrap()).unwrap();
        assert!(!audit.passed());
    }

    #[test]
    fn text_mentions_every_item() {
        let f = tent();
        let r = analyze(&f, &quick()).unwrap();
        let t = to_text(&f, &r, None);
        for i in Item::ALL {
            assert!(t.contains(&format!("({}) ", i.letter())));
        }
        assert!(t.contains("expanding arc: A = {v:a, e[0,1/2]}"), "{t}");
    }
}
