//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
//!
//! Built with `harness = false` so the lines always reach the test output.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use treedyn::catalog::build;
use treedyn::certificates::{verify_divergent, verify_expanding_arc, Avoidance, CertCheck};
use treedyn::criteria::{analyze, Params};
use treedyn::dynamics::Iterates;
use treedyn::harness::{check_instance, random_instance, BruteForce};
use treedyn::map::DEFAULT_BUDGET;
use treedyn::region::{RegionSet, Subtree};
use treedyn::report::to_json;
use treedyn::svg::{render_svg, SvgOptions};
use treedyn::{Map, Point, Rational, Report, Scalar};

const CORPUS: u64 = 500;
const MAX_VERTICES: usize = 8;
const MAX_PIECES: usize = 6;
const MIN_DECIDED: f64 = 0.60;
const CORPUS_TIME: Duration = Duration::from_secs(300);
const TENT_TIME: Duration = Duration::from_secs(1);
const MIN_PROBE_HITS: f64 = 0.95;

fn q(n: i64, d: i64) -> Rational {
    Rational::from_ratio(n, d)
}

fn params(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

struct Instance {
    f: Map,
    report: Report,
}

/// Shared pass over the random corpus. Only `analyze` is timed.
struct Corpus {
    instances: Vec<Instance>,
    analyze_time: Duration,
    errors: Vec<String>,
    brute_compared: usize,
    brute_problems: Vec<String>,
    recheck_problems: Vec<String>,
}

fn run_corpus() -> Corpus {
    let p = Params::default();
    let brute = BruteForce {
        mesh: q(1, 32),
        n_max: 4,
    };
    let mut c = Corpus {
        instances: Vec::new(),
        analyze_time: Duration::ZERO,
        errors: Vec::new(),
        brute_compared: 0,
        brute_problems: Vec::new(),
        recheck_problems: Vec::new(),
    };
    for seed in 0..CORPUS {
        let f: Map = random_instance(seed, MAX_VERTICES, MAX_PIECES);
        let start = Instant::now();
        let r = analyze(&f, &p);
        c.analyze_time += start.elapsed();
        match r {
            Ok(report) => {
                let (problems, compared) = check_instance(&f, &report, Some(&brute));
                if compared {
                    c.brute_compared += 1;
                }
                for pr in problems {
                    let line = format!("seed {seed}: {pr}");
                    if pr.contains("brute force") {
                        c.brute_problems.push(line);
                    } else {
                        c.recheck_problems.push(line);
                    }
                }
                c.instances.push(Instance { f, report });
            }
            Err(e) => c.errors.push(format!("seed {seed}: {e}")),
        }
    }
    c
}

fn corpus_consistency(c: &Corpus) -> Outcome {
    let decided = c.instances.iter().filter(|i| i.report.fully_decided()).count();
    let ratio = decided as f64 / CORPUS as f64;
    let pass = c.errors.is_empty()
        && c.recheck_problems.is_empty()
        && ratio >= MIN_DECIDED
        && c.analyze_time < CORPUS_TIME;
    let mut detail = format!(
        "{} instances, {} errors, {} certificate problems, {decided} fully decided ({:.1}%), analyze time {:.1}s",
        CORPUS,
        c.errors.len(),
        c.recheck_problems.len(),
        100.0 * ratio,
        c.analyze_time.as_secs_f64()
    );
    for e in c.errors.iter().chain(&c.recheck_problems).take(3) {
        detail.push_str(&format!("; {e}"));
    }
    outcome(pass, detail)
}

fn interval_catalog() -> Outcome {
    let p = Params::default();
    let mut pass = true;
    let mut parts = Vec::new();
    for alpha in ["1/3", "1/2", "1"] {
        let f: Map = build("interval_scaling", &params(&[("alpha", alpha)])).unwrap();
        let r = analyze(&f, &p).unwrap();
        let ok = r.equicontinuous() == Some(true) && r.certificates.identity.is_some();
        pass &= ok;
        parts.push(format!(
            "scaling {alpha}: {:?}, identity n = {:?}",
            r.equicontinuous(),
            r.certificates.identity.as_ref().map(|c| c.n)
        ));
    }
    let f: Map = build("interval_clamped_scaling", &params(&[("alpha", "2")])).unwrap();
    let r = analyze(&f, &p).unwrap();
    let arc_n = r.certificates.expanding_arc.as_ref().map(|c| c.n);
    pass &= r.equicontinuous() == Some(false) && arc_n == Some(1);
    parts.push(format!("clamped 2: {:?}, arc n = {arc_n:?}", r.equicontinuous()));
    outcome(pass, parts.join("; "))
}

/// Fixed points of `T^n` for the tent map, solved branch by branch: on
/// `[k/2^n, (k+1)/2^n]` the iterate is `2^n x - k` (k even) or
/// `k + 1 - 2^n x` (k odd).
fn tent_fixed_points(n: u32) -> Vec<Rational> {
    let m = 1i64 << n;
    let mut out = Vec::new();
    for k in 0..m {
        let x = if k % 2 == 0 { q(k, m - 1) } else { q(k + 1, m + 1) };
        if x >= q(k, m) && x <= q(k + 1, m) && !out.contains(&x) {
            out.push(x);
        }
    }
    out.sort();
    out
}

fn tent() -> Outcome {
    let start = Instant::now();
    let f: Map = build("tent", &BTreeMap::new()).unwrap();
    let tree = f.tree();
    let r = analyze(&f, &Params::default()).unwrap();
    let elapsed = start.elapsed();
    let iters = Iterates::new(f.clone(), DEFAULT_BUDGET);
    let mut pass = true;
    let mut parts = Vec::new();
    for n in 1..=2 {
        let mut want = RegionSet::empty();
        for x in tent_fixed_points(n) {
            want.push_point(&tree.point(0, x).unwrap());
        }
        want.normalize(tree);
        let got = iters.fix(n as usize).unwrap();
        pass &= *got == want;
        parts.push(format!("fix(T^{n}) = {}", got.format(tree)));
    }
    match &r.certificates.expanding_arc {
        Some(c) => {
            let arc = RegionSet::path(tree, &c.x, &c.y);
            let want_arc = RegionSet::parse(tree, "{v:a, e[0,1/2]}").unwrap();
            let ok = c.n == 1
                && arc == want_arc
                && c.image == Subtree::whole(tree)
                && verify_expanding_arc(&f, c).passed();
            pass &= ok;
            parts.push(format!("arc {} n = {} onto {}", arc.format(tree), c.n, c.image.region().format(tree)));
        }
        None => {
            pass = false;
            parts.push("no expanding arc".into());
        }
    }
    match &r.certificates.divergent {
        Some(d) => {
            let check = verify_divergent(&f, d, DEFAULT_BUDGET);
            let want: Vec<Point> = [q(2, 3), q(1, 3), q(1, 6)].into_iter().map(|t| tree.point(0, t).unwrap()).collect();
            let ok = check == CertCheck::Complete
                && d.points.starts_with(&want)
                && d.limit == Point::Vertex(0)
                && d.rho == q(1, 3)
                && matches!(d.avoidance, Avoidance::EventuallyPeriodic { .. });
            pass &= ok;
            let pts: Vec<String> = d.points.iter().map(|p| tree.format_point(p)).collect();
            parts.push(format!(
                "divergent {} -> {}, rho {}, {check:?}",
                pts.join(" "),
                tree.format_point(&d.limit),
                d.rho
            ));
        }
        None => {
            pass = false;
            parts.push("no divergent sequence".into());
        }
    }
    pass &= elapsed < TENT_TIME;
    parts.push(format!("{:.0} ms", elapsed.as_secs_f64() * 1000.0));
    outcome(pass, parts.join("; "))
}

fn arc_soundness(c: &Corpus) -> Outcome {
    let f: Map = build("tent", &BTreeMap::new()).unwrap();
    let tent = Instance {
        report: analyze(&f, &Params::default()).unwrap(),
        f,
    };
    let mut checked = 0;
    let mut bad = Vec::new();
    let named = c.instances.iter().enumerate().map(|(s, i)| (format!("seed {s}"), i));
    for (name, i) in named.chain([("tent".to_string(), &tent)]) {
        let Some(cert) = &i.report.certificates.expanding_arc else { continue };
        checked += 1;
        let tree = i.f.tree();
        let iters = Iterates::with_depth(i.f.clone(), i.report.params.budget, i.report.params.depth);
        let disconnected = [cert.n, 2 * cert.n]
            .iter()
            .any(|&k| iters.fix(k).map(|s| !s.is_connected(tree)).unwrap_or(false));
        if !verify_expanding_arc(&i.f, cert).passed() || !disconnected {
            bad.push(name);
        }
    }
    outcome(
        bad.is_empty() && checked > 0,
        format!("{checked} arc certificates, {} failing {:?}", bad.len(), &bad[..bad.len().min(5)]),
    )
}

fn brute_force(c: &Corpus) -> Outcome {
    let mut detail = format!(
        "mesh 1/32, n <= 4: {} instances compared, {} disagreements",
        c.brute_compared,
        c.brute_problems.len()
    );
    if let Some(p) = c.brute_problems.first() {
        detail.push_str(&format!("; {p}"));
    }
    outcome(c.brute_problems.is_empty() && c.brute_compared > 0, detail)
}

fn probe(c: &Corpus) -> Outcome {
    let with_identity: Vec<_> = c.instances.iter().filter(|i| i.report.certificates.identity.is_some()).collect();
    let false_alarms = with_identity.iter().filter(|i| i.report.probe.is_some()).count();
    let with_arc: Vec<_> = c.instances.iter().filter(|i| i.report.certificates.expanding_arc.is_some()).collect();
    let hits = with_arc.iter().filter(|i| i.report.probe.is_some()).count();
    let rate = hits as f64 / with_arc.len().max(1) as f64;
    outcome(
        false_alarms == 0 && rate >= MIN_PROBE_HITS,
        format!(
            "{false_alarms} witnesses among {} identity certificates; {hits}/{} arc certificates have a witness ({:.1}%)",
            with_identity.len(),
            with_arc.len(),
            100.0 * rate
        ),
    )
}

fn identity_on_whole(c: &Corpus) -> Outcome {
    let mut maps: Vec<(String, Map, Report)> = Vec::new();
    for k in ["2", "3", "5"] {
        let f: Map = build("star_rotation", &params(&[("k", k)])).unwrap();
        let r = analyze(&f, &Params::default()).unwrap();
        maps.push((format!("star_rotation k={k}"), f, r));
    }
    let f: Map = build("interval_scaling", &params(&[("alpha", "1")])).unwrap();
    let r = analyze(&f, &Params::default()).unwrap();
    maps.push(("interval_scaling alpha=1".into(), f, r));
    for (seed, i) in c.instances.iter().enumerate() {
        maps.push((format!("seed {seed}"), i.f.clone(), i.report.clone()));
    }
    let mut applicable = 0;
    let mut bad = Vec::new();
    for (name, f, r) in &maps {
        let Some(cert) = &r.certificates.identity else { continue };
        let whole = Subtree::whole(f.tree());
        if cert.core != whole || f.image() != whole {
            continue;
        }
        applicable += 1;
        match f.iterate(cert.n, DEFAULT_BUDGET) {
            Ok(g) if g.is_identity() => {}
            _ => bad.push(name.clone()),
        }
    }
    outcome(
        applicable > 0 && bad.is_empty(),
        format!("{applicable} surjective maps with identity on the whole tree, {} failing {bad:?}", bad.len()),
    )
}

fn determinism() -> Outcome {
    let p = Params::default();
    let mut maps: Vec<Map> = ["interval_scaling", "interval_clamped_scaling", "tent", "star_rotation", "star_shift_truncated"]
        .iter()
        .map(|n| build(n, &BTreeMap::new()).unwrap())
        .collect();
    maps.extend((0..20).map(|s| random_instance(1000 + s, MAX_VERTICES, MAX_PIECES)));
    let mut bad = 0;
    for f in &maps {
        let once = |f: &Map| {
            let r = analyze(f, &p).unwrap();
            let json = to_json(f, &r, None);
            let wire = serde_json::from_str(&json).unwrap();
            (json, render_svg(f, Some(&wire), &SvgOptions::default()))
        };
        if once(f) != once(f) {
            bad += 1;
        }
    }
    outcome(bad == 0, format!("{} maps analyzed twice, {bad} differing", maps.len()))
}

fn main() -> ExitCode {
    let corpus = run_corpus();
    let results = [
        ("random corpus consistent and mostly decided", corpus_consistency(&corpus)),
        ("interval catalog verdicts", interval_catalog()),
        ("tent map fixed sets and certificates", tent()),
        ("expanding arcs imply disconnected fixed sets", arc_soundness(&corpus)),
        ("grid brute force agrees with exact search", brute_force(&corpus)),
        ("sampled probe matches certificates", probe(&corpus)),
        ("identity on a surjective whole tree", identity_on_whole(&corpus)),
        ("report and drawing are reproducible", determinism()),
    ];
    let mut failed = 0;
    for (n, (name, o)) in results.iter().enumerate() {
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {} [{tag}] {name}: {}", n + 1, o.detail);
        if !o.pass {
            failed += 1;
        }
    }
    println!("{failed} of {} criteria failed", results.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
