use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use treedyn::catalog;
use treedyn::criteria::{analyze, Params};
use treedyn::dynamics::{orbit, Iterates};
use treedyn::harness::{cross_check, BruteForce};
use treedyn::io::{parse_map, serialize_map};
use treedyn::report::{to_json, to_text, verify_report_json, WireReport};
use treedyn::scalar::parse_scalar;
use treedyn::svg::{render_svg, SvgOptions};
use treedyn::{Error, Map, Rational};

const EXIT_UNDECIDED: u8 = 2;
const EXIT_INPUT: u8 = 3;
const EXIT_INCONSISTENT: u8 = 4;

#[derive(Parser)]
#[command(name = "treedyn", version, about = "Equicontinuity of piecewise-linear tree maps, with certificates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide the nine equivalent conditions for the map in FILE.
    Analyze {
        file: PathBuf,
        #[arg(long, default_value_t = 12)]
        depth: usize,
        #[arg(long, default_value_t = 100_000)]
        budget: usize,
        #[arg(long, default_value = "1/64")]
        mesh: String,
        /// Machine-readable output.
        #[arg(long)]
        json: bool,
        /// Include wall-clock time (makes output non-reproducible).
        #[arg(long)]
        timing: bool,
        /// Skip the sampled probe and pointwise-limit table.
        #[arg(long)]
        no_evidence: bool,
    },
    /// Print the orbit of a point.
    Orbit {
        file: PathBuf,
        #[arg(long)]
        point: String,
        #[arg(long, default_value_t = 20)]
        steps: usize,
    },
    /// Print fix(f^n).
    Fixset {
        file: PathBuf,
        #[arg(long, default_value_t = 1)]
        power: usize,
        #[arg(long, default_value_t = 100_000)]
        budget: usize,
    },
    /// Draw the tree as SVG, with overlays from a JSON report if given.
    Render {
        file: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Write a catalog instance to a file, or list the catalog.
    Catalog {
        name: Option<String>,
        /// `key=value`, repeatable.
        #[arg(long = "param")]
        params: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Analyze random instances and check every invariant.
    Verify {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 12)]
        depth: usize,
        #[arg(long, default_value_t = 100_000)]
        budget: usize,
        #[arg(long, default_value_t = 8)]
        max_vertices: usize,
        #[arg(long, default_value_t = 6)]
        max_pieces: usize,
        /// Also compare with grid brute force (mesh 1/32, n <= 4).
        #[arg(long)]
        brute_force: bool,
        #[arg(long)]
        json: bool,
    },
    /// Re-check every certificate in a JSON report.
    VerifyCert { report: PathBuf },
}

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::Validation(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, body: &str) -> Result<(), Error> {
    fs::write(path, body).map_err(|e| Error::Validation(format!("cannot write {}: {e}", path.display())))
}

fn load(path: &Path) -> Result<Map, Error> {
    parse_map(&read(path)?)
}

fn rational(s: &str, what: &str) -> Result<Rational, Error> {
    parse_scalar(s).ok_or_else(|| Error::Validation(format!("{what} must be a rational, got `{s}`")))
}

fn exit_for(e: &Error) -> u8 {
    match e {
        Error::Parse { .. } | Error::Validation(_) | Error::UnknownEntry(_) | Error::BadParams(_) => EXIT_INPUT,
        _ => EXIT_INCONSISTENT,
    }
}

fn run(cli: Cli) -> Result<u8, Error> {
    match cli.command {
        Command::Analyze {
            file,
            depth,
            budget,
            mesh,
            json,
            timing,
            no_evidence,
        } => {
            let f = load(&file)?;
            let params = Params {
                depth,
                budget,
                mesh: rational(&mesh, "--mesh")?,
                evidence: !no_evidence,
                ..Params::default()
            };
            if params.mesh <= Rational::from_integer(0.into()) || depth == 0 {
                return Err(Error::Validation("--mesh and --depth must be positive".into()));
            }
            let start = Instant::now();
            let report = analyze(&f, &params)?;
            let ms = timing.then(|| start.elapsed().as_millis() as u64);
            if json {
                print!("{}", to_json(&f, &report, ms));
            } else {
                print!("{}", to_text(&f, &report, ms));
            }
            Ok(if report.fully_decided() { 0 } else { EXIT_UNDECIDED })
        }
        Command::Orbit { file, point, steps } => {
            let f = load(&file)?;
            let tree = f.tree();
            let x = tree.parse_point(&point)?;
            let o = orbit(&f, &x, steps);
            for (i, p) in o.points.iter().enumerate() {
                println!("{i}\t{}", tree.format_point(p));
            }
            if let Some((pre, per)) = o.cycle {
                println!("eventually periodic: preperiod {pre}, period {per}");
            }
            Ok(0)
        }
        Command::Fixset { file, power, budget } => {
            let f = load(&file)?;
            if power == 0 {
                return Err(Error::Validation("--power must be at least 1".into()));
            }
            let iters = Iterates::with_depth(f.clone(), budget, 12);
            let fix = iters.fix(power)?;
            let tree = f.tree();
            println!("{}", fix.format(tree));
            println!("{}", if fix.is_connected(tree) { "connected" } else { "disconnected" });
            Ok(0)
        }
        Command::Render { file, out, report } => {
            let f = load(&file)?;
            let wire = match report {
                Some(p) => {
                    let w: WireReport = serde_json::from_str(&read(&p)?).map_err(|e| Error::Parse {
                        line: e.line(),
                        column: e.column(),
                        message: e.to_string(),
                    })?;
                    if w.instance != serialize_map(&f) {
                        return Err(Error::Validation("report was made for a different instance".into()));
                    }
                    Some(w)
                }
                None => None,
            };
            write(&out, &render_svg(&f, wire.as_ref(), &SvgOptions::default()))?;
            Ok(0)
        }
        Command::Catalog { name, params, out } => {
            let Some(name) = name else {
                for e in catalog::ENTRIES {
                    let ps: Vec<String> = e
                        .params
                        .iter()
                        .map(|p| format!("{}={}", p.name, p.default.unwrap_or("?")))
                        .collect();
                    println!("{:<26} {:<40} {}", e.name, ps.join(" "), e.summary);
                }
                return Ok(0);
            };
            let mut given = BTreeMap::new();
            for kv in &params {
                let (k, v) = kv
                    .split_once('=')
                    .ok_or_else(|| Error::BadParams(format!("expected key=value, got `{kv}`")))?;
                given.insert(k.to_string(), v.to_string());
            }
            let f: Map = catalog::build(&name, &given)?;
            let text = serialize_map(&f);
            match out {
                Some(p) => write(&p, &text)?,
                None => print!("{text}"),
            }
            Ok(0)
        }
        Command::Verify {
            seed,
            count,
            depth,
            budget,
            max_vertices,
            max_pieces,
            brute_force,
            json,
        } => {
            let params = Params {
                depth,
                budget,
                ..Params::default()
            };
            let brute = BruteForce {
                mesh: Rational::new(1.into(), 32.into()),
                n_max: 4,
            };
            let summary = cross_check(
                seed,
                count,
                max_vertices,
                max_pieces,
                &params,
                brute_force.then_some(&brute),
            );
            if json {
                println!("{}", serde_json::to_string_pretty(&summary).expect("summary serializes"));
            } else {
                println!("instances:          {}", summary.instances);
                println!("fully decided:      {}", summary.fully_decided);
                println!("equicontinuous:     {}", summary.equicontinuous);
                println!("not equicontinuous: {}", summary.not_equicontinuous);
                println!("budget limited:     {}", summary.budget_limited);
                println!("inconsistencies:    {}", summary.inconsistencies);
                if brute_force {
                    println!("brute force compared: {}", summary.brute_force_compared);
                    println!("brute force disagreements: {}", summary.brute_force_disagreements);
                }
                for f in &summary.failures {
                    println!("FAIL {f}");
                }
            }
            Ok(if summary.passed() { 0 } else { EXIT_INCONSISTENT })
        }
        Command::VerifyCert { report } => {
            let audit = verify_report_json::<Rational>(&read(&report)?)?;
            for c in &audit.checked {
                println!("checked {c}");
            }
            for p in &audit.problems {
                println!("FAIL {p}");
            }
            if audit.passed() {
                println!("all certificates verified");
                Ok(0)
            } else {
                Ok(EXIT_INCONSISTENT)
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_for(&e))
        }
    }
}
