//! Random instances, a grid brute-force search for expanding arcs, and the
//! corpus-wide consistency run.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::criteria::{analyze, AnalysisReport, Params, Status};
use crate::dynamics::Iterates;
use crate::error::Error;
use crate::map::{Piece, PlMap};
use crate::region::RegionSet;
use crate::scalar::Scalar;
use crate::tree::{Edge, FiniteTree, TreePoint};

/// Edge lengths are drawn from this pool.
const LENGTHS: [(i64, i64); 4] = [(1, 2), (1, 1), (3, 2), (2, 1)];
/// Offsets are `k/d` of an edge length with `d` from this pool.
const GRID: [i64; 4] = [1, 2, 3, 4];

fn prufer_edges(rng: &mut ChaCha8Rng, n: usize) -> Vec<(usize, usize)> {
    if n == 2 {
        return vec![(0, 1)];
    }
    let seq: Vec<usize> = (0..n - 2).map(|_| rng.gen_range(0..n)).collect();
    let mut degree = vec![1usize; n];
    for &s in &seq {
        degree[s] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    for &s in &seq {
        let leaf = (0..n).find(|&v| degree[v] == 1).expect("a leaf always exists");
        edges.push((leaf.min(s), leaf.max(s)));
        degree[leaf] -= 1;
        degree[s] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    edges.push((rest[0], rest[1]));
    edges.sort();
    edges
}

fn grid_offset<S: Scalar>(rng: &mut ChaCha8Rng, len: &S, interior: bool) -> S {
    let d = *GRID.choose(rng).unwrap();
    let (d, k) = if interior {
        let d = d.max(2);
        (d, rng.gen_range(1..d))
    } else {
        (d, rng.gen_range(0..=d))
    };
    len.clone() * S::from_ratio(k, d)
}

fn random_point<S: Scalar>(rng: &mut ChaCha8Rng, tree: &FiniteTree<S>) -> TreePoint<S> {
    let e = rng.gen_range(0..tree.edge_count());
    let len = tree.edge(e).length.clone();
    let t = grid_offset(rng, &len, false);
    tree.point(e, t).expect("offset within the edge")
}

/// A uniformly random labelled tree (Prüfer code) with `2..=max_vertices`
/// vertices and a random continuous map with at most `max_pieces` pieces
/// per edge. Vertex images are drawn first and every edge's pieces are
/// chained between the images of its endpoints, so continuity holds by
/// construction.
pub fn random_instance<S: Scalar>(seed: u64, max_vertices: usize, max_pieces: usize) -> PlMap<S> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(2..=max_vertices.max(2));
    let pairs = prufer_edges(&mut rng, n);
    let vertex_ids = (0..n).map(|i| format!("v{i}")).collect();
    let edges = pairs
        .iter()
        .enumerate()
        .map(|(i, &(a, b))| {
            let (p, q) = *LENGTHS.choose(&mut rng).unwrap();
            Edge {
                id: format!("e{i}"),
                from: a,
                to: b,
                length: S::from_ratio(p, q),
            }
        })
        .collect();
    let tree = Arc::new(FiniteTree::new(vertex_ids, edges).expect("Prüfer trees are valid"));
    let images: Vec<TreePoint<S>> = (0..n).map(|_| random_point(&mut rng, &tree)).collect();
    let mut pieces = Vec::with_capacity(tree.edge_count());
    for e in 0..tree.edge_count() {
        let edge = tree.edge(e).clone();
        let m = rng.gen_range(1..=max_pieces.max(1));
        let mut cuts: Vec<S> = (0..m - 1).map(|_| grid_offset(&mut rng, &edge.length, true)).collect();
        cuts.sort();
        cuts.dedup();
        let mut knots = vec![S::zero()];
        knots.extend(cuts);
        knots.push(edge.length.clone());
        let mut values = vec![images[edge.from].clone()];
        for _ in 1..knots.len() - 1 {
            values.push(random_point(&mut rng, &tree));
        }
        values.push(images[edge.to].clone());
        let list = knots
            .windows(2)
            .zip(values.windows(2))
            .map(|(k, v)| Piece {
                start: k[0].clone(),
                end: k[1].clone(),
                from: v[0].clone(),
                to: v[1].clone(),
            })
            .collect();
        pieces.push(list);
    }
    PlMap::new(tree, pieces).expect("chained pieces are continuous")
}

/// Points at multiples of `mesh` along every edge.
pub fn grid_points<S: Scalar>(tree: &FiniteTree<S>, mesh: &S) -> Vec<TreePoint<S>> {
    let mut out: Vec<TreePoint<S>> = (0..tree.vertex_count()).map(TreePoint::Vertex).collect();
    for e in 0..tree.edge_count() {
        let len = &tree.edge(e).length;
        let mut t = mesh.clone();
        while t < *len {
            out.push(tree.point(e, t.clone()).expect("interior offset"));
            t = t + mesh.clone();
        }
    }
    out
}

/// A grid arc `A = pq` with `A ⊊ f^n[A]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BruteWitness<S> {
    pub n: usize,
    pub p: TreePoint<S>,
    pub q: TreePoint<S>,
}

/// Enumerates every arc between grid points and every `n <= n_max`, checking
/// `A ⊊ f^n[A]` exactly with `f^n[A]` taken as an `n`-fold image.
pub fn brute_force_expanding<S: Scalar>(f: &PlMap<S>, mesh: &S, n_max: usize) -> Option<BruteWitness<S>> {
    let tree = f.tree();
    let grid = grid_points(tree, mesh);
    for n in 1..=n_max {
        for (i, p) in grid.iter().enumerate() {
            for q in &grid[i + 1..] {
                let a = RegionSet::path(tree, p, q);
                let mut img = f.image_region(&a);
                for _ in 1..n {
                    img = f.image_region(&img);
                }
                if a.is_subset(&img) && img != a {
                    return Some(BruteWitness {
                        n,
                        p: p.clone(),
                        q: q.clone(),
                    });
                }
            }
        }
    }
    None
}

/// What the exact search says about expanding arcs with exponent `<= n_max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExactArcAnswer {
    /// An expanding arc with exponent at most `n_max` exists.
    Exists,
    /// `fix(f^k)` is connected for every `k <= 2 n_max`, which rules out
    /// expanding arcs with exponent up to `n_max`; or `f` carries an
    /// identity certificate.
    Absent,
    Undecided,
}

/// Exact answer for "is there an expanding arc with exponent `<= n_max`".
pub fn exact_arc_answer<S: Scalar>(iters: &Iterates<S>, report: &AnalysisReport<S>, n_max: usize) -> ExactArcAnswer {
    if let Some(c) = &report.certificates.expanding_arc {
        if c.n <= n_max {
            return ExactArcAnswer::Exists;
        }
    }
    if report.certificates.identity.is_some() {
        return ExactArcAnswer::Absent;
    }
    let tree = iters.base().tree();
    for k in 1..=2 * n_max {
        match iters.fix(k) {
            Ok(fix) if fix.is_connected(tree) => continue,
            Ok(_) => return ExactArcAnswer::Undecided,
            Err(_) => return ExactArcAnswer::Undecided,
        }
    }
    ExactArcAnswer::Absent
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CrossCheckSummary {
    pub instances: usize,
    pub fully_decided: usize,
    pub equicontinuous: usize,
    pub not_equicontinuous: usize,
    pub inconsistencies: usize,
    /// Instances where the piece budget cut a search short.
    pub budget_limited: usize,
    /// Instances where brute force and the exact search were compared.
    pub brute_force_compared: usize,
    pub brute_force_disagreements: usize,
    pub failures: Vec<String>,
}

impl CrossCheckSummary {
    pub fn passed(&self) -> bool {
        self.inconsistencies == 0 && self.brute_force_disagreements == 0 && self.failures.is_empty()
    }
}

/// Grid brute force settings for [`cross_check`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BruteForce<S> {
    pub mesh: S,
    pub n_max: usize,
}

/// Checks one analyzed instance against every corpus invariant: all
/// certificates re-verify, the probe stays silent next to an identity
/// certificate, and (optionally) grid brute force agrees with the exact
/// expanding-arc answer. Returns the problems found and whether brute
/// force was compared.
pub fn check_instance<S: Scalar>(
    f: &PlMap<S>,
    report: &AnalysisReport<S>,
    brute: Option<&BruteForce<S>>,
) -> (Vec<String>, bool) {
    let mut problems = crate::report::recheck(f, report, report.params.budget);
    if report.certificates.identity.is_some() {
        if let Some(w) = &report.probe {
            problems.push(format!(
                "probe separates {} and {} despite an identity certificate",
                f.tree().format_point(&w.x),
                f.tree().format_point(&w.y)
            ));
        }
    }
    let mut compared = false;
    if let Some(b) = brute {
        let iters = Iterates::with_depth(f.clone(), report.params.budget, report.params.depth);
        let exact = exact_arc_answer(&iters, report, b.n_max);
        if exact != ExactArcAnswer::Undecided {
            compared = true;
            let found = brute_force_expanding(f, &b.mesh, b.n_max);
            match (exact, &found) {
                (ExactArcAnswer::Absent, Some(w)) => problems.push(format!(
                    "brute force found an expanding arc {}..{} (n = {}) the exact search rules out",
                    f.tree().format_point(&w.p),
                    f.tree().format_point(&w.q),
                    w.n
                )),
                (ExactArcAnswer::Exists, None) => {
                    problems.push("brute force misses an expanding arc the exact search found".into())
                }
                _ => {}
            }
        }
    }
    (problems, compared)
}

/// Runs `analyze` over `count` random instances starting at `seed` and
/// checks each with [`check_instance`]. Instances are processed in seed
/// order, so the summary is deterministic.
pub fn cross_check<S: Scalar>(
    seed: u64,
    count: usize,
    max_vertices: usize,
    max_pieces: usize,
    params: &Params<S>,
    brute: Option<&BruteForce<S>>,
) -> CrossCheckSummary {
    let mut summary = CrossCheckSummary::default();
    for s in seed..seed + count as u64 {
        let f = random_instance::<S>(s, max_vertices, max_pieces);
        summary.instances += 1;
        match analyze(&f, params) {
            Ok(report) => {
                if report.fully_decided() {
                    summary.fully_decided += 1;
                }
                match report.equicontinuous() {
                    Some(true) => summary.equicontinuous += 1,
                    Some(false) => summary.not_equicontinuous += 1,
                    None => {}
                }
                if report
                    .items
                    .iter()
                    .any(|(_, v)| matches!(&v.status, Status::Undecided { reason, .. } if reason.contains("budget")))
                {
                    summary.budget_limited += 1;
                }
                let (problems, compared) = check_instance(&f, &report, brute);
                if compared {
                    summary.brute_force_compared += 1;
                }
                for p in problems {
                    if p.starts_with("brute force") {
                        summary.brute_force_disagreements += 1;
                    }
                    summary.failures.push(format!("seed {s}: {p}"));
                }
            }
            Err(Error::Inconsistency(m)) => {
                summary.inconsistencies += 1;
                summary.failures.push(format!("seed {s}: {m}"));
            }
            Err(e) => summary.failures.push(format!("seed {s}: {e}")),
        }
    }
    summary
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::*;

    #[test]
    fn generator_is_deterministic() {
        let a: PlMap<Q> = random_instance(7, 8, 6);
        let b: PlMap<Q> = random_instance(7, 8, 6);
        assert_eq!(a, b);
        let small: PlMap<Q> = random_instance(1, 2, 2);
        assert_eq!(small.tree().vertex_count(), 2);
        assert!(small.piece_count() <= 2);
    }

    #[test]
    fn prufer_gives_trees() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 2..10 {
            let e = prufer_edges(&mut rng, n);
            assert_eq!(e.len(), n - 1);
        }
    }

    #[test]
    fn brute_force_examples() {
        let w = brute_force_expanding(&tent(), &q(1, 8), 1).unwrap();
        assert_eq!(w.n, 1);
        assert!(brute_force_expanding(&PlMap::identity(unit()), &q(1, 8), 2).is_none());
        assert!(brute_force_expanding(&half(), &q(1, 8), 4).is_none());
    }
}
