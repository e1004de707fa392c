//! `tropcoral` command-line front end.
//!
//! Exit codes: 0 success, 1 internal error, 2 unreadable or malformed input,
//! 3 validation failure, 4 infeasible or unusable constraint, 5 unwritable
//! output. Errors are reported on stderr as a single JSON object.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use tropcoral::constraints::{sample_stable, Constraint};
use tropcoral::coral::{validate_coral, Degree};
use tropcoral::counting::{count, extend_coral};
use tropcoral::io::{self, CatalogFile, CoralFile, CountFile, CurveFile, MorseFile, ProblemFile, SeriesFile};
use tropcoral::lattice::{fmt_q, Q};
use tropcoral::moduli::enumerate_types;
use tropcoral::morse::{coral_to_tmt, lift_tmt, validate_tmt, ExternalRef};
use tropcoral::plot::{coral_svg, curve_svg, morse_svg, Viewport};
use tropcoral::quotient::{count_series, normalize_mod_z, shear_constraint};
use tropcoral::Error;

#[derive(Parser)]
#[command(name = "tropcoral", version, about = "Enumerate, validate and count tropical corals")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Io {
    /// Input JSON file.
    #[arg(long)]
    input: PathBuf,
    /// Output file; stdout if absent.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Check a coral, coral type, curve or Morse tree file.
    Validate {
        #[command(flatten)]
        io: Io,
    },
    /// List the coral types of a degree (general ones unless --all).
    Enumerate {
        #[command(flatten)]
        io: Io,
        #[arg(long)]
        all: bool,
    },
    /// Tropical count for a degree and constraint. Prints the total; --output
    /// receives the per-type breakdown.
    Count {
        #[command(flatten)]
        io: Io,
        /// Sample a stable constraint with this seed instead of using the
        /// file's constraint.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Lift a Morse tree to a coral with the given interior heights.
    LiftTmt {
        #[command(flatten)]
        io: Io,
        /// Comma-separated rationals, one per interior vertex in id order.
        #[arg(long, default_value = "")]
        heights: String,
    },
    /// Project a coral to its Morse tree.
    ProjectTmt {
        #[command(flatten)]
        io: Io,
        /// Root: `n<vertex>` for a negative vertex, `p<edge>` for a positive end.
        #[arg(long)]
        root: Option<String>,
    },
    /// Extend a coral to a tropical curve in the plane.
    Extend {
        #[command(flatten)]
        io: Io,
    },
    /// Area-graded count over the Z-translates of a degree.
    AreaSeries {
        #[command(flatten)]
        io: Io,
        /// Periodicity of the line arrangement.
        #[arg(long, default_value_t = 1)]
        b: u64,
        #[arg(long, default_value_t = 10)]
        a_max: u64,
    },
    /// Render a coral, curve or Morse tree as SVG.
    Plot {
        #[command(flatten)]
        io: Io,
        /// "xmin,xmax,ymin,ymax" in model coordinates.
        #[arg(long, allow_hyphen_values = true)]
        viewport: Option<String>,
    },
}

struct Failure {
    code: u8,
    kind: &'static str,
    message: String,
    violations: Vec<String>,
}

impl Failure {
    fn new(code: u8, kind: &'static str, message: impl Into<String>) -> Self {
        Failure { code, kind, message: message.into(), violations: Vec::new() }
    }

    fn invalid(violations: Vec<String>) -> Self {
        Failure { code: 3, kind: "validation", message: violations.join("; "), violations }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        use Error::*;
        let (code, kind) = match &e {
            Parse(_) => (2, "parse"),
            BadConstraint(_) | NotGeneral(_) | SamplingFailed(_) | HeightsInfeasible(_) | Underdetermined => {
                (4, "infeasible")
            }
            Overflow | RankAssertion { .. } => (1, "internal"),
            _ => (3, "validation"),
        };
        let violations = match &e {
            InvalidGraph(v) | InvalidCoral(v) | InvalidTmt(v) => v.clone(),
            _ => Vec::new(),
        };
        Failure { code, kind, message: e.to_string(), violations }
    }
}

type Res<T> = Result<T, Failure>;

enum Input {
    Coral(CoralFile),
    Curve(CurveFile),
    Morse(MorseFile),
    Problem { degree: Degree, constraint: Option<Constraint> },
}

fn malformed(e: serde_json::Error) -> Failure {
    Failure::new(2, "parse", e.to_string())
}

fn read_input(path: &PathBuf) -> Res<Input> {
    let text = fs::read_to_string(path).map_err(|e| Failure::new(2, "io", format!("{}: {e}", path.display())))?;
    let v: Value = io::parse(&text)?;
    let has = |k: &str| v.get(k).is_some();
    if has("decoration") {
        Ok(Input::Morse(serde_json::from_value(v).map_err(malformed)?))
    } else if has("ends") {
        Ok(Input::Curve(serde_json::from_value(v).map_err(malformed)?))
    } else if has("bounded_edges") {
        Ok(Input::Coral(serde_json::from_value(v).map_err(malformed)?))
    } else if has("degree") {
        let p: ProblemFile = serde_json::from_value(v).map_err(malformed)?;
        Ok(Input::Problem { degree: p.degree, constraint: Some(p.constraint) })
    } else if has("positive") {
        Ok(Input::Problem { degree: serde_json::from_value(v).map_err(malformed)?, constraint: None })
    } else {
        Err(Failure::new(2, "parse", "unrecognised input file"))
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Res<()> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::new(5, "io", format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn wrong_input(what: &str) -> Failure {
    Failure::new(2, "parse", format!("expected {what}"))
}

fn problem(input: Input, seed: Option<u64>) -> Res<(Degree, Constraint)> {
    let Input::Problem { degree, constraint } = input else { return Err(wrong_input("a degree or problem file")) };
    degree.check()?;
    match (seed, constraint) {
        (Some(s), _) => {
            let lam = sample_stable(&degree, s)?;
            Ok((degree, lam))
        }
        (None, Some(c)) => Ok((degree, c)),
        (None, None) => Err(Failure::new(4, "infeasible", "no constraint given; pass --seed to sample one")),
    }
}

fn parse_root(s: &str) -> Res<ExternalRef> {
    let bad = || Failure::new(2, "parse", format!("bad root {s:?}; expected n<vertex> or p<edge>"));
    let (tag, id) = s.split_at(1.min(s.len()));
    let id: usize = id.parse().map_err(|_| bad())?;
    match tag {
        "n" => Ok(ExternalRef::Negative(id)),
        "p" => Ok(ExternalRef::Positive(id)),
        _ => Err(bad()),
    }
}

fn run(cli: Cli) -> Res<()> {
    match cli.command {
        Command::Validate { io } => {
            let violations = match read_input(&io.input)? {
                Input::Coral(f) => match &f.positions {
                    Some(_) => validate_coral(&f.to_coral()?).violations,
                    None => f.to_type().validate().violations,
                },
                Input::Curve(f) => f.to_curve()?.check(),
                Input::Morse(f) => validate_tmt(&f.to_tree()?).0.violations,
                Input::Problem { degree, .. } => degree.check().err().map(|e| vec![e.to_string()]).unwrap_or_default(),
            };
            emit(&io.output, &io::render(&json!({ "valid": violations.is_empty(), "violations": violations })))?;
            if violations.is_empty() {
                Ok(())
            } else {
                Err(Failure::invalid(violations))
            }
        }
        Command::Enumerate { io, all } => {
            let (d, _) = match read_input(&io.input)? {
                Input::Problem { degree, constraint } => (degree, constraint),
                _ => return Err(wrong_input("a degree or problem file")),
            };
            d.check()?;
            let cat = enumerate_types(&d, !all)?;
            emit(&io.output, &io::render(&CatalogFile::from_catalog(&cat)))
        }
        Command::Count { io, seed } => {
            let (d, lam) = problem(read_input(&io.input)?, seed)?;
            let r = count(&d, &lam)?;
            println!("{}", fmt_q(&r.total));
            if let Some(p) = &io.output {
                let mut file = serde_json::to_value(CountFile::from_result(&r)).expect("serializable");
                file["constraint"] = serde_json::to_value(&lam).expect("serializable");
                emit(&Some(p.clone()), &io::render(&file))?;
            }
            Ok(())
        }
        Command::LiftTmt { io, heights } => {
            let Input::Morse(f) = read_input(&io.input)? else { return Err(wrong_input("a Morse tree file")) };
            let hs: Vec<Q> = if heights.trim().is_empty() { Vec::new() } else { io::parse_q_list(&heights)? };
            let c = lift_tmt(&f.to_tree()?, &hs)?;
            emit(&io.output, &io::render(&CoralFile::from_coral(&c)))
        }
        Command::ProjectTmt { io, root } => {
            let Input::Coral(f) = read_input(&io.input)? else { return Err(wrong_input("a coral file")) };
            let root = root.as_deref().map(parse_root).transpose()?;
            let m = coral_to_tmt(&f.to_coral()?, root)?;
            emit(&io.output, &io::render(&MorseFile::from_tree(&m)))
        }
        Command::Extend { io } => {
            let Input::Coral(f) = read_input(&io.input)? else { return Err(wrong_input("a coral file")) };
            let tc = extend_coral(&f.to_coral()?)?;
            emit(&io.output, &io::render(&CurveFile::from_curve(&tc)))
        }
        Command::AreaSeries { io, b, a_max } => {
            let (d, lam) = problem(read_input(&io.input)?, None)?;
            let qd = normalize_mod_z(&d, b)?;
            let lam = shear_constraint(&lam, qd.offset, b);
            let s = count_series(&qd, &lam, a_max)?;
            emit(&io.output, &io::render(&SeriesFile::from_series(&s)))
        }
        Command::Plot { io, viewport } => {
            let vp = match viewport {
                Some(s) => Some(Viewport::parse(&s).ok_or_else(|| Failure::new(2, "parse", format!("bad viewport {s:?}")))?),
                None => None,
            };
            let svg = match read_input(&io.input)? {
                Input::Coral(f) => {
                    let c = f.to_coral()?;
                    let r = validate_coral(&c);
                    if !r.is_valid() {
                        return Err(Failure::invalid(r.violations));
                    }
                    coral_svg(&c, vp)
                }
                Input::Curve(f) => {
                    let tc = f.to_curve()?;
                    let r = tc.check();
                    if !r.is_empty() {
                        return Err(Failure::invalid(r));
                    }
                    curve_svg(&tc, vp)
                }
                Input::Morse(f) => {
                    let m = f.to_tree()?;
                    let (r, _) = validate_tmt(&m);
                    if !r.is_valid() {
                        return Err(Failure::invalid(r.violations));
                    }
                    morse_svg(&m)
                }
                Input::Problem { .. } => return Err(wrong_input("a coral, curve or Morse tree file")),
            };
            emit(&io.output, &svg)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let mut report = json!({ "error": f.kind, "message": f.message });
            if !f.violations.is_empty() {
                report["violations"] = json!(f.violations);
            }
            eprintln!("{report}");
            ExitCode::from(f.code)
        }
    }
}
