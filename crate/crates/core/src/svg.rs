//! SVG drawings of a tree with fixed sets and certificate overlays.
//!
//! The layout is radial around a centroid vertex: every vertex sits at its
//! tree distance from the center, inside an angular wedge proportional to
//! the number of leaves below it. Coordinates are rounded to two decimals,
//! so equal inputs give byte-identical files.

use std::fmt::Write;

use crate::map::PlMap;
use crate::region::RegionSet;
use crate::report::WireReport;
use crate::scalar::Scalar;
use crate::tree::{FiniteTree, TreePoint};

const SIZE: f64 = 480.0;
const MARGIN: f64 = 40.0;

#[derive(Debug, Clone, PartialEq)]
pub struct SvgOptions {
    pub labels: bool,
    /// Overlay `fix(f)` when no report is given.
    pub fixed_set: bool,
}

impl Default for SvgOptions {
    fn default() -> Self {
        SvgOptions {
            labels: true,
            fixed_set: true,
        }
    }
}

/// Vertex whose largest remaining branch is smallest.
pub fn centroid<S: Scalar>(tree: &FiniteTree<S>) -> usize {
    let n = tree.vertex_count();
    (0..n)
        .min_by_key(|&v| {
            tree.incident(v)
                .iter()
                .map(|&e| branch_size(tree, tree.other_end(e, v), v))
                .max()
                .unwrap_or(0)
        })
        .expect("trees have vertices")
}

fn branch_size<S: Scalar>(tree: &FiniteTree<S>, v: usize, parent: usize) -> usize {
    1 + tree
        .incident(v)
        .iter()
        .map(|&e| tree.other_end(e, v))
        .filter(|&w| w != parent)
        .map(|w| branch_size(tree, w, v))
        .sum::<usize>()
}

fn leaves<S: Scalar>(tree: &FiniteTree<S>, v: usize, parent: Option<usize>) -> usize {
    let kids: Vec<usize> = tree
        .incident(v)
        .iter()
        .map(|&e| tree.other_end(e, v))
        .filter(|&w| Some(w) != parent)
        .collect();
    if kids.is_empty() {
        1
    } else {
        kids.iter().map(|&w| leaves(tree, w, Some(v))).sum()
    }
}

/// Planar positions of the vertices, in drawing units.
pub fn layout<S: Scalar>(tree: &FiniteTree<S>) -> Vec<(f64, f64)> {
    let root = centroid(tree);
    let mut pos = vec![(0.0, 0.0); tree.vertex_count()];
    let mut radius = vec![0.0f64; tree.vertex_count()];
    // (vertex, parent, wedge start, wedge width)
    let mut stack = vec![(root, None::<usize>, 0.0f64, std::f64::consts::TAU)];
    while let Some((v, parent, start, width)) = stack.pop() {
        let total = leaves(tree, v, parent) as f64;
        let mut cursor = start;
        for &e in tree.incident(v) {
            let w = tree.other_end(e, v);
            if Some(w) == parent {
                continue;
            }
            let share = width * leaves(tree, w, Some(v)) as f64 / total;
            let angle = cursor + share / 2.0;
            radius[w] = radius[v] + tree.edge(e).length.approx();
            pos[w] = (radius[w] * angle.cos(), radius[w] * angle.sin());
            stack.push((w, Some(v), cursor, share));
            cursor += share;
        }
    }
    let extent = radius.iter().cloned().fold(0.0, f64::max).max(1e-9);
    let scale = (SIZE / 2.0 - MARGIN) / extent;
    pos.into_iter()
        .map(|(x, y)| (SIZE / 2.0 + x * scale, SIZE / 2.0 - y * scale))
        .collect()
}

fn at_offset<S: Scalar>(tree: &FiniteTree<S>, pos: &[(f64, f64)], e: usize, t: &S) -> (f64, f64) {
    let edge = tree.edge(e);
    let s = t.approx() / edge.length.approx();
    let (a, b) = (pos[edge.from], pos[edge.to]);
    (a.0 + (b.0 - a.0) * s, a.1 + (b.1 - a.1) * s)
}

fn point_xy<S: Scalar>(tree: &FiniteTree<S>, pos: &[(f64, f64)], p: &TreePoint<S>) -> (f64, f64) {
    match p {
        TreePoint::Vertex(v) => pos[*v],
        TreePoint::Interior { edge, offset } => at_offset(tree, pos, *edge, offset),
    }
}

fn region_svg<S: Scalar>(
    out: &mut String,
    tree: &FiniteTree<S>,
    pos: &[(f64, f64)],
    r: &RegionSet<S>,
    class: &str,
    width: f64,
) {
    for (e, ivs) in r.intervals() {
        for (lo, hi) in ivs {
            let (x1, y1) = at_offset(tree, pos, *e, lo);
            if lo == hi {
                let _ = writeln!(out, r#"<circle class="{class}" cx="{x1:.2}" cy="{y1:.2}" r="{:.2}"/>"#, width);
            } else {
                let (x2, y2) = at_offset(tree, pos, *e, hi);
                let _ = writeln!(
                    out,
                    r#"<line class="{class}" x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}" stroke-width="{width:.2}"/>"#
                );
            }
        }
    }
    for v in r.vertices() {
        let (x, y) = pos[*v];
        let _ = writeln!(out, r#"<circle class="{class}" cx="{x:.2}" cy="{y:.2}" r="{:.2}"/>"#, width);
    }
}

fn dots<S: Scalar>(out: &mut String, tree: &FiniteTree<S>, pos: &[(f64, f64)], pts: &[TreePoint<S>], class: &str) {
    for p in pts {
        let (x, y) = point_xy(tree, pos, p);
        let _ = writeln!(out, r#"<circle class="{class}" cx="{x:.2}" cy="{y:.2}" r="3.00"/>"#);
    }
}

/// Draws the tree of `f`. With a report, overlays the eventual image, the
/// expanding arc, and the backward and divergent sequences; without one,
/// overlays `fix(f)`.
pub fn render_svg<S: Scalar>(f: &PlMap<S>, report: Option<&WireReport>, opts: &SvgOptions) -> String {
    let tree = f.tree();
    let pos = layout(tree);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{}" viewBox="0 0 {SIZE} {}">"#,
        SIZE + 60.0,
        SIZE + 60.0
    );
    out.push_str(
        "<style>\
line.edge{stroke:#888;stroke-width:2}\
.fix{stroke:#1b7837;fill:#1b7837}\
.core{stroke:#9ecae1;fill:#9ecae1;opacity:0.7}\
.arc{stroke:#d6604d;fill:#d6604d}\
.backward{fill:#2166ac}\
.divergent{fill:#762a83}\
circle.vertex{fill:#333}\
text{font-family:sans-serif;font-size:11px}\
</style>\n",
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);

    let mut legend: Vec<&str> = Vec::new();
    if let Some(w) = report {
        if let Ok(r) = RegionSet::parse(tree, &w.eventual_image.region) {
            region_svg(&mut out, tree, &pos, &r, "core", 9.0);
            legend.push("light blue: eventual image");
        }
    }
    for e in tree.edges() {
        let (a, b) = (pos[e.from], pos[e.to]);
        let _ = writeln!(
            out,
            r#"<line class="edge" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}"/>"#,
            a.0, a.1, b.0, b.1
        );
    }
    match report {
        Some(w) => {
            let c = &w.certificates;
            if let Some(a) = &c.expanding_arc {
                if let Ok(r) = RegionSet::parse(tree, &a.arc) {
                    region_svg(&mut out, tree, &pos, &r, "arc", 5.0);
                    legend.push("red: expanding arc");
                }
            }
            if let Some(b) = &c.backward {
                let pts: Vec<_> = b.points.iter().filter_map(|s| tree.parse_point(s).ok()).collect();
                dots(&mut out, tree, &pos, &pts, "backward");
                legend.push("blue dots: backward sequence");
            }
            if let Some(d) = &c.divergent {
                let pts: Vec<_> = d.points.iter().filter_map(|s| tree.parse_point(s).ok()).collect();
                dots(&mut out, tree, &pos, &pts, "divergent");
                legend.push("purple dots: divergent sequence");
            }
        }
        None if opts.fixed_set => {
            if let Ok(fix) = f.fixed_set() {
                region_svg(&mut out, tree, &pos, &fix, "fix", 4.0);
                legend.push("green: fix(f)");
            }
        }
        None => {}
    }
    for (v, &(x, y)) in pos.iter().enumerate() {
        let _ = writeln!(out, r#"<circle class="vertex" cx="{x:.2}" cy="{y:.2}" r="2.50"/>"#);
        if opts.labels {
            let _ = writeln!(
                out,
                r#"<text x="{:.2}" y="{:.2}">{}</text>"#,
                x + 5.0,
                y - 5.0,
                escape(tree.vertex_id(v))
            );
        }
    }
    if let Some(w) = report {
        let _ = writeln!(
            out,
            r#"<text x="10.00" y="{:.2}">equicontinuous: {}</text>"#,
            SIZE + 5.0,
            escape(&w.summary.equicontinuous)
        );
    }
    for (i, l) in legend.iter().enumerate() {
        let _ = writeln!(out, r#"<text x="10.00" y="{:.2}">{}</text>"#, SIZE + 20.0 + 14.0 * i as f64, l);
    }
    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::build;
    use crate::criteria::{analyze, Params};
    use crate::fixtures::*;
    use crate::report::to_wire;
    use std::collections::BTreeMap;

    #[test]
    fn identity_shows_full_fixed_set() {
        let s = render_svg(&PlMap::identity(unit()), None, &SvgOptions::default());
        assert!(s.contains(r#"<line class="fix""#));
        assert_eq!(s, render_svg(&PlMap::identity(unit()), None, &SvgOptions::default()));
    }

    #[test]
    fn tent_report_highlights_arc() {
        let f = tent();
        let r = analyze(&f, &Params { evidence: false, ..Params::default() }).unwrap();
        let w = to_wire(&f, &r, None);
        let s = render_svg(&f, Some(&w), &SvgOptions::default());
        assert!(s.contains(r#"<line class="arc""#));
        assert!(s.contains(r#"class="divergent""#));
    }

    #[test]
    fn star_is_drawn_radially() {
        let f: PlMap<Q> = build("star_rotation", &BTreeMap::new()).unwrap();
        let pos = layout(f.tree());
        assert_eq!(centroid(f.tree()), 0);
        let (cx, cy) = pos[0];
        let r: Vec<f64> = pos[1..].iter().map(|(x, y)| ((x - cx).powi(2) + (y - cy).powi(2)).sqrt()).collect();
        assert!(r.iter().all(|d| (d - r[0]).abs() < 1e-9));
        assert_eq!(render_svg(&f, None, &SvgOptions::default()).matches(r#"class="edge""#).count(), 3);
    }
}
