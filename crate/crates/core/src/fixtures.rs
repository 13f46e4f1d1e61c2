//! Small maps shared by unit tests.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::Ratio;

use crate::map::{Piece, PlMap};
use crate::scalar::Scalar;
use crate::tree::{FiniteTree, TreePoint};

pub type Q = Ratio<BigInt>;

pub fn q(n: i64, d: i64) -> Q {
    Q::from_ratio(n, d)
}

pub fn unit() -> Arc<FiniteTree<Q>> {
    Arc::new(FiniteTree::from_named(&["a", "b"], &[("e", "a", "b", q(1, 1))]).unwrap())
}

pub fn at(t: &FiniteTree<Q>, n: i64, d: i64) -> TreePoint<Q> {
    t.point(0, q(n, d)).unwrap()
}

fn piece(t: &FiniteTree<Q>, s: (i64, i64), e: (i64, i64), from: (i64, i64), to: (i64, i64)) -> Piece<Q> {
    Piece {
        start: q(s.0, s.1),
        end: q(e.0, e.1),
        from: at(t, from.0, from.1),
        to: at(t, to.0, to.1),
    }
}

pub fn tent() -> PlMap<Q> {
    let t = unit();
    let p = vec![vec![
        piece(&t, (0, 1), (1, 2), (0, 1), (1, 1)),
        piece(&t, (1, 2), (1, 1), (1, 1), (0, 1)),
    ]];
    PlMap::new(t, p).unwrap()
}

/// `min(2x, 1)`.
pub fn clamped() -> PlMap<Q> {
    let t = unit();
    let p = vec![vec![
        piece(&t, (0, 1), (1, 2), (0, 1), (1, 1)),
        piece(&t, (1, 2), (1, 1), (1, 1), (1, 1)),
    ]];
    PlMap::new(t, p).unwrap()
}

/// `x / 2`.
pub fn half() -> PlMap<Q> {
    let t = unit();
    let p = vec![vec![piece(&t, (0, 1), (1, 1), (0, 1), (1, 2))]];
    PlMap::new(t, p).unwrap()
}
