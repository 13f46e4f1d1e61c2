use std::collections::BTreeMap;

use treedyn::catalog::{build, expected, ENTRIES};
use treedyn::criteria::{analyze, Params};
use treedyn::{Map, Scalar};

fn with(k: &str, v: &str) -> BTreeMap<String, String> {
    BTreeMap::from([(k.to_string(), v.to_string())])
}

fn check(name: &str, given: &BTreeMap<String, String>) {
    let f: Map = build(name, given).unwrap();
    let want = expected(name, given).unwrap().unwrap();
    let r = analyze(&f, &Params::default()).unwrap();
    assert_eq!(r.equicontinuous(), Some(want.equicontinuous), "{name} {given:?}");
    assert_eq!(r.certificates.identity.as_ref().map(|c| c.n), want.identity_n, "{name} {given:?}");
    assert_eq!(r.certificates.expanding_arc.as_ref().map(|c| c.n), want.arc_n, "{name} {given:?}");
    assert!(treedyn::report::recheck(&f, &r, r.params.budget).is_empty(), "{name}");
}

#[test]
fn every_entry_matches_its_known_verdict_at_defaults() {
    for e in ENTRIES.iter().filter(|e| e.name != "random") {
        check(e.name, &BTreeMap::new());
    }
}

#[test]
fn scaling_family() {
    for a in ["0", "1/5", "1/3", "2/3", "1"] {
        check("interval_scaling", &with("alpha", a));
    }
    for a in ["3/2", "2", "5"] {
        check("interval_clamped_scaling", &with("alpha", a));
    }
}

#[test]
fn star_families() {
    for k in ["2", "4", "6"] {
        check("star_rotation", &with("k", k));
        check("star_shift_truncated", &with("k", k));
    }
}

#[test]
fn clamped_knee_sits_at_reciprocal_slope() {
    let f: Map = build("interval_clamped_scaling", &with("alpha", "4")).unwrap();
    let knee = f.tree().point(0, treedyn::Rational::from_ratio(1, 4)).unwrap();
    assert_eq!(f.eval(&knee), treedyn::Point::Vertex(1));
    let below = f.tree().point(0, treedyn::Rational::from_ratio(1, 8)).unwrap();
    assert_eq!(f.eval(&below), f.tree().point(0, treedyn::Rational::from_ratio(1, 2)).unwrap());
}

#[test]
fn random_entry_is_the_harness_generator() {
    let given = BTreeMap::from([
        ("seed".to_string(), "7".to_string()),
        ("max_vertices".to_string(), "5".to_string()),
    ]);
    let f: Map = build("random", &given).unwrap();
    assert_eq!(f, treedyn::harness::random_instance(7, 5, 6));
    assert!(expected("random", &given).unwrap().is_none());
}
