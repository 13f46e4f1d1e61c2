//! Derived values checked against computations that share no code with the
//! library.

use std::collections::BTreeMap;

use treedyn::catalog::build;
use treedyn::dynamics::Iterates;
use treedyn::map::DEFAULT_BUDGET;
use treedyn::region::RegionSet;
use treedyn::{Map, Point, Rational, Scalar};

fn q(n: i64, d: i64) -> Rational {
    Rational::from_ratio(n, d)
}

fn tent() -> Map {
    build("tent", &BTreeMap::new()).unwrap()
}

/// Tent iterate `T^n` evaluated by the closed form on `[0,1]`.
fn tent_n(x: &Rational, n: u32) -> Rational {
    let mut y = x.clone();
    for _ in 0..n {
        y = if y <= q(1, 2) { q(2, 1) * y } else { q(2, 1) * (q(1, 1) - y) };
    }
    y
}

/// Solves `x = T^n(x)` on each of the `2^n` linear branches.
fn tent_fixed_points(n: u32) -> Vec<Rational> {
    let m = 1i64 << n;
    let mut out: Vec<Rational> = (0..m)
        .map(|k| if k % 2 == 0 { q(k, m - 1) } else { q(k + 1, m + 1) })
        .enumerate()
        .filter(|(k, x)| *x >= q(*k as i64, m) && *x <= q(*k as i64 + 1, m))
        .map(|(_, x)| x)
        .collect();
    out.sort();
    out.dedup();
    out
}

fn as_region(f: &Map, xs: &[Rational]) -> RegionSet<Rational> {
    let mut r = RegionSet::empty();
    for x in xs {
        r.push_point(&f.tree().point(0, x.clone()).unwrap());
    }
    r.normalize(f.tree());
    r
}

#[test]
fn tent_branch_solutions() {
    assert_eq!(tent_fixed_points(1), vec![q(0, 1), q(2, 3)]);
    assert_eq!(tent_fixed_points(2), vec![q(0, 1), q(2, 5), q(2, 3), q(4, 5)]);
    for n in 1..=5 {
        let pts = tent_fixed_points(n);
        // one fixed point per branch
        assert_eq!(pts.len(), 1 << n);
        for x in &pts {
            assert_eq!(&tent_n(x, n), x);
        }
    }
}

#[test]
fn tent_fixed_sets_match_library() {
    let f = tent();
    let iters = Iterates::new(f.clone(), DEFAULT_BUDGET);
    for n in 1..=6 {
        assert_eq!(*iters.fix(n as usize).unwrap(), as_region(&f, &tent_fixed_points(n)), "n = {n}");
    }
}

#[test]
fn tent_iterates_match_closed_form() {
    let f = tent();
    let tree = f.tree();
    for n in 1..=5u32 {
        let g = f.iterate(n as usize, DEFAULT_BUDGET).unwrap();
        for k in 0..=97 {
            let x = q(k, 97);
            let want = tent_n(&x, n);
            let p = tree.point(0, x).unwrap();
            assert_eq!(g.eval(&p), tree.point(0, want).unwrap());
        }
    }
}

#[test]
fn scaling_fixed_sets_by_hand() {
    // alpha x = x has only the root 0 for alpha < 1.
    for a in ["1/4", "1/2", "9/10"] {
        let f: Map = build("interval_scaling", &BTreeMap::from([("alpha".to_string(), a.to_string())])).unwrap();
        assert_eq!(*Iterates::new(f.clone(), DEFAULT_BUDGET).fix(3).unwrap(), as_region(&f, &[q(0, 1)]));
    }
    // min(2x, 1) = x at 0 and 1 only.
    let f: Map = build("interval_clamped_scaling", &BTreeMap::new()).unwrap();
    let fix = f.fixed_set().unwrap();
    assert_eq!(fix, as_region(&f, &[q(0, 1), q(1, 1)]));
    assert!(!fix.is_connected(f.tree()));
}

#[test]
fn star_rotation_distances_are_preserved() {
    let f: Map = build("star_rotation", &BTreeMap::from([("k".to_string(), "4".to_string())])).unwrap();
    let tree = f.tree();
    let pts: Vec<Point> = (0..4)
        .flat_map(|e| (0..=4).map(move |k| (e, q(k, 4))))
        .map(|(e, t)| tree.point(e, t).unwrap())
        .collect();
    for a in &pts {
        for b in &pts {
            assert_eq!(tree.distance(&f.eval(a), &f.eval(b)), tree.distance(a, b));
        }
    }
}
