//! Named map families with their known verdicts.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::harness::random_instance;
use crate::map::{Piece, PlMap};
use crate::scalar::{parse_scalar, Scalar};
use crate::tree::{Edge, FiniteTree, TreePoint};

#[derive(Debug, Clone, Copy)]
pub struct ParamSpec {
    pub name: &'static str,
    pub description: &'static str,
    pub default: Option<&'static str>,
}

/// Known answer for an entry, with where it comes from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expected {
    pub equicontinuous: bool,
    /// Exponent of the identity certificate, when positive.
    pub identity_n: Option<usize>,
    /// Exponent of the expanding arc, when negative.
    pub arc_n: Option<usize>,
    pub basis: &'static str,
}

#[derive(Debug, Clone, Copy)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub summary: &'static str,
    pub params: &'static [ParamSpec],
}

pub const ENTRIES: &[CatalogEntry] = &[
    CatalogEntry {
        name: "interval_scaling",
        summary: "x -> alpha x on [0,1], 0 <= alpha <= 1",
        params: &[ParamSpec {
            name: "alpha",
            description: "slope in [0, 1]",
            default: Some("1/2"),
        }],
    },
    CatalogEntry {
        name: "interval_clamped_scaling",
        summary: "x -> min(alpha x, 1) on [0,1], alpha > 1",
        params: &[ParamSpec {
            name: "alpha",
            description: "slope above 1",
            default: Some("2"),
        }],
    },
    CatalogEntry {
        name: "tent",
        summary: "tent map on [0,1], T(1/2) = 1",
        params: &[],
    },
    CatalogEntry {
        name: "star_rotation",
        summary: "isometric cyclic permutation of the arms of a k-star",
        params: &[ParamSpec {
            name: "k",
            description: "number of arms, at least 2",
            default: Some("3"),
        }],
    },
    CatalogEntry {
        name: "star_shift_truncated",
        summary: "each arm of a k-star onto the next, the last arm collapsed to the center",
        params: &[ParamSpec {
            name: "k",
            description: "number of arms, at least 2",
            default: Some("3"),
        }],
    },
    CatalogEntry {
        name: "random",
        summary: "random tree and map from the harness generator",
        params: &[
            ParamSpec {
                name: "seed",
                description: "generator seed",
                default: Some("0"),
            },
            ParamSpec {
                name: "max_vertices",
                description: "vertex bound, at least 2",
                default: Some("8"),
            },
            ParamSpec {
                name: "max_pieces",
                description: "pieces per edge bound, at least 1",
                default: Some("6"),
            },
        ],
    },
];

pub fn entry(name: &str) -> Result<&'static CatalogEntry> {
    ENTRIES
        .iter()
        .find(|e| e.name == name)
        .ok_or_else(|| Error::UnknownEntry(name.to_string()))
}

/// Parameter values with defaults filled in; unknown keys are rejected.
pub fn resolve_params(name: &str, given: &BTreeMap<String, String>) -> Result<BTreeMap<String, String>> {
    let e = entry(name)?;
    for k in given.keys() {
        if !e.params.iter().any(|p| p.name == k) {
            return Err(Error::BadParams(format!("`{name}` takes no parameter `{k}`")));
        }
    }
    let mut out = BTreeMap::new();
    for p in e.params {
        let v = given
            .get(p.name)
            .map(|s| s.to_string())
            .or_else(|| p.default.map(str::to_string))
            .ok_or_else(|| Error::BadParams(format!("missing parameter `{}`", p.name)))?;
        out.insert(p.name.to_string(), v);
    }
    Ok(out)
}

fn scalar_param<S: Scalar>(params: &BTreeMap<String, String>, key: &str) -> Result<S> {
    parse_scalar(&params[key]).ok_or_else(|| Error::BadParams(format!("`{key}` must be a rational")))
}

fn int_param(params: &BTreeMap<String, String>, key: &str, min: u64) -> Result<u64> {
    let v: u64 = params[key]
        .parse()
        .map_err(|_| Error::BadParams(format!("`{key}` must be a non-negative integer")))?;
    if v < min {
        return Err(Error::BadParams(format!("`{key}` must be at least {min}")));
    }
    Ok(v)
}

fn unit_interval<S: Scalar>() -> Arc<FiniteTree<S>> {
    Arc::new(FiniteTree::from_named(&["a", "b"], &[("e", "a", "b", S::one())]).expect("valid interval"))
}

fn star<S: Scalar>(k: usize) -> Arc<FiniteTree<S>> {
    let mut ids = vec!["c".to_string()];
    ids.extend((1..=k).map(|i| format!("l{i}")));
    let edges = (1..=k)
        .map(|i| Edge {
            id: format!("a{i}"),
            from: 0,
            to: i,
            length: S::one(),
        })
        .collect();
    Arc::new(FiniteTree::new(ids, edges).expect("valid star"))
}

fn linear<S: Scalar>(start: S, end: S, from: TreePoint<S>, to: TreePoint<S>) -> Piece<S> {
    Piece { start, end, from, to }
}

/// Builds a catalog map; missing parameters take their defaults.
pub fn build<S: Scalar>(name: &str, given: &BTreeMap<String, String>) -> Result<PlMap<S>> {
    let params = resolve_params(name, given)?;
    match name {
        "interval_scaling" => {
            let alpha: S = scalar_param(&params, "alpha")?;
            if alpha < S::zero() || alpha > S::one() {
                return Err(Error::BadParams("alpha must lie in [0, 1]".into()));
            }
            let t = unit_interval::<S>();
            let top = t.point(0, alpha).expect("alpha within the edge");
            PlMap::new(t, vec![vec![linear(S::zero(), S::one(), TreePoint::Vertex(0), top)]])
        }
        "interval_clamped_scaling" => {
            let alpha: S = scalar_param(&params, "alpha")?;
            if alpha <= S::one() {
                return Err(Error::BadParams("alpha must exceed 1".into()));
            }
            let t = unit_interval::<S>();
            let knee = S::one() / alpha;
            let pieces = vec![vec![
                linear(S::zero(), knee.clone(), TreePoint::Vertex(0), TreePoint::Vertex(1)),
                linear(knee, S::one(), TreePoint::Vertex(1), TreePoint::Vertex(1)),
            ]];
            PlMap::new(t, pieces)
        }
        "tent" => {
            let t = unit_interval::<S>();
            let half = S::one() / S::two();
            let pieces = vec![vec![
                linear(S::zero(), half.clone(), TreePoint::Vertex(0), TreePoint::Vertex(1)),
                linear(half, S::one(), TreePoint::Vertex(1), TreePoint::Vertex(0)),
            ]];
            PlMap::new(t, pieces)
        }
        "star_rotation" => {
            let k = int_param(&params, "k", 2)? as usize;
            let t = star::<S>(k);
            let pieces = (1..=k)
                .map(|i| {
                    let next = i % k + 1;
                    vec![linear(S::zero(), S::one(), TreePoint::Vertex(0), TreePoint::Vertex(next))]
                })
                .collect();
            PlMap::new(t, pieces)
        }
        "star_shift_truncated" => {
            let k = int_param(&params, "k", 2)? as usize;
            let t = star::<S>(k);
            let pieces = (1..=k)
                .map(|i| {
                    let to = if i < k { TreePoint::Vertex(i + 1) } else { TreePoint::Vertex(0) };
                    vec![linear(S::zero(), S::one(), TreePoint::Vertex(0), to)]
                })
                .collect();
            PlMap::new(t, pieces)
        }
        "random" => {
            let seed = int_param(&params, "seed", 0)?;
            let v = int_param(&params, "max_vertices", 2)? as usize;
            let p = int_param(&params, "max_pieces", 1)? as usize;
            Ok(random_instance(seed, v, p))
        }
        _ => Err(Error::UnknownEntry(name.to_string())),
    }
}

/// The known verdict for a catalog entry, `None` for random instances.
pub fn expected(name: &str, given: &BTreeMap<String, String>) -> Result<Option<Expected>> {
    let params = resolve_params(name, given)?;
    Ok(match name {
        "interval_scaling" => Some(Expected {
            equicontinuous: true,
            identity_n: Some(1),
            arc_n: None,
            basis: "closed form: f^n(x) = alpha^n x is 1-Lipschitz",
        }),
        "interval_clamped_scaling" => Some(Expected {
            equicontinuous: false,
            identity_n: None,
            arc_n: Some(1),
            basis: "fixed set {0, 1} is disconnected",
        }),
        "tent" => Some(Expected {
            equicontinuous: false,
            identity_n: None,
            arc_n: Some(1),
            basis: "[0,1/2] maps onto [0,1]",
        }),
        "star_rotation" => Some(Expected {
            equicontinuous: true,
            identity_n: Some(int_param(&params, "k", 2)? as usize),
            arc_n: None,
            basis: "isometry with f^k = id",
        }),
        "star_shift_truncated" => Some(Expected {
            equicontinuous: true,
            identity_n: Some(1),
            arc_n: None,
            basis: "f^k is constant at the center",
        }),
        "random" => None,
        _ => return Err(Error::UnknownEntry(name.to_string())),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::*;

    fn none() -> BTreeMap<String, String> {
        BTreeMap::new()
    }

    fn with(k: &str, v: &str) -> BTreeMap<String, String> {
        BTreeMap::from([(k.to_string(), v.to_string())])
    }

    #[test]
    fn closed_forms() {
        let f: PlMap<Q> = build("interval_scaling", &none()).unwrap();
        assert_eq!(f, half());
        let t: PlMap<Q> = build("tent", &none()).unwrap();
        assert_eq!(t, tent());
        assert_eq!(t.eval(&at(t.tree(), 1, 2)), TreePoint::Vertex(1));
        let c: PlMap<Q> = build("interval_clamped_scaling", &none()).unwrap();
        assert_eq!(c, clamped());
    }

    #[test]
    fn star_rotation_has_period_k() {
        let f: PlMap<Q> = build("star_rotation", &with("k", "3")).unwrap();
        assert!(!f.iterate(2, 1000).unwrap().is_identity());
        assert!(f.iterate(3, 1000).unwrap().is_identity());
    }

    #[test]
    fn star_shift_collapses() {
        let f: PlMap<Q> = build("star_shift_truncated", &with("k", "4")).unwrap();
        let g = f.iterate(4, 1000).unwrap();
        assert!(g.is_constant());
        assert!(!f.iterate(3, 1000).unwrap().is_constant());
    }

    #[test]
    fn parameter_errors() {
        assert!(matches!(build::<Q>("nope", &none()), Err(Error::UnknownEntry(_))));
        assert!(matches!(build::<Q>("interval_scaling", &with("alpha", "2")), Err(Error::BadParams(_))));
        assert!(matches!(build::<Q>("interval_clamped_scaling", &with("alpha", "1")), Err(Error::BadParams(_))));
        assert!(matches!(build::<Q>("tent", &with("k", "1")), Err(Error::BadParams(_))));
        assert!(matches!(build::<Q>("star_rotation", &with("k", "x")), Err(Error::BadParams(_))));
    }
}
