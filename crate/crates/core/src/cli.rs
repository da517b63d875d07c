//! Command-line front end. JSON results go to standard output and
//! diagnostics to standard error.
//!
//! Exit status: 0 success, 1 validation or precondition failure, 2 property
//! failure, 3 I/O or parse error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::document::{
    parse_rel, parse_skew, rel_to_doc, skew_to_doc, to_pretty, ActionDocument, DocumentError, LoadedAction,
};
use crate::error::AlgebraError;
use crate::function_algebra::induce_algebra_action;
use crate::partial_actions::{
    check_free, enumerate_invariant_subsets, equivalence_classes, validate_partial_action, witness, Freeness,
    Relation, Witness,
};
use crate::relation_algebra::{ideal_from_invariant, rel_convolve, Gamma};
use crate::selftest::{default_targets, run_selftest, SelftestOptions, Target};
use crate::skew_ring::skew_mul;

pub const EXIT_OK: i32 = 0;
pub const EXIT_PRECONDITION: i32 = 1;
pub const EXIT_PROPERTY: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "skewrel", version, about = "Partial skew group rings of free partial actions on finite sets")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Algebra {
    Skew,
    Rel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Direction {
    Fwd,
    Inv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the partial action axioms
    Validate { action: PathBuf },
    /// List the relation R, its classes and the number of invariant subsets
    Relation { action: PathBuf },
    /// List the ideals of F0(R), one per invariant subset
    Ideals { action: PathBuf },
    /// Multiply two elements
    Mul {
        #[arg(long, value_enum)]
        algebra: Algebra,
        action: PathBuf,
        lhs: PathBuf,
        rhs: PathBuf,
    },
    /// Apply Γ or its inverse
    Gamma {
        #[arg(long, value_enum)]
        dir: Direction,
        action: PathBuf,
        element: PathBuf,
    },
    /// Run the seeded property battery
    Selftest {
        #[arg(long)]
        action: Option<PathBuf>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 500)]
        trials: usize,
    },
}

/// A failed command: exit status and message for standard error.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Failure { code, message: message.into() }
    }
}

impl From<DocumentError> for Failure {
    fn from(e: DocumentError) -> Self {
        let code = match &e {
            DocumentError::Json(_) | DocumentError::Field(_) | DocumentError::Group(_) | DocumentError::Action(_) => {
                EXIT_IO
            }
            DocumentError::Validation(_) | DocumentError::Algebra(_) => EXIT_PRECONDITION,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<AlgebraError> for Failure {
    fn from(e: AlgebraError) -> Self {
        Failure::new(EXIT_PRECONDITION, e.to_string())
    }
}

/// Successful output: a JSON document and an exit status.
struct Output {
    body: String,
    code: i32,
}

impl Output {
    fn ok(value: &impl serde::Serialize) -> Self {
        Output { body: to_pretty(value), code: EXIT_OK }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::new(EXIT_IO, format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<LoadedAction, Failure> {
    let text = read(path)?;
    ActionDocument::parse(&text).and_then(|d| d.load()).map_err(Failure::from)
}

fn require_free(loaded: &LoadedAction) -> Result<(), Failure> {
    match check_free(&loaded.action) {
        Freeness::Free => Ok(()),
        Freeness::NotFree { t, point } => Err(Failure::new(
            EXIT_PRECONDITION,
            format!(
                "action is not free: h_{} fixes {}",
                loaded.action.group().format(t),
                loaded.action.carrier().label(point)
            ),
        )),
    }
}

fn gamma_for(loaded: &LoadedAction) -> Result<Gamma, Failure> {
    require_free(loaded)?;
    let alpha = Arc::new(induce_algebra_action(loaded.action.clone(), loaded.field)?);
    Ok(Gamma::new(alpha)?)
}

/// `2^k` as a JSON number when it fits, else as a decimal string.
fn count_value(k: usize) -> Value {
    if k < 64 {
        json!(1u64 << k)
    } else {
        json!((num_bigint::BigUint::from(1u32) << k).to_string())
    }
}

fn cmd_validate(path: &Path, err: &mut dyn Write) -> Result<Output, Failure> {
    let text = read(path)?;
    let (field, data) = ActionDocument::parse(&text).and_then(|d| d.to_data())?;
    let report = validate_partial_action(&data);
    let g = data.group();
    let c = data.carrier();
    if !report.is_ok() {
        let _ = writeln!(err, "{report}");
        let violations: Vec<Value> = report
            .violations
            .iter()
            .map(|v| {
                let witness = match &v.witness {
                    Witness::Point(p) => json!({ "point": c.label(*p) }),
                    Witness::Sets { image, expected } => json!({
                        "image": image.iter().map(|&p| c.label(p)).collect::<Vec<_>>(),
                        "expected": expected.iter().map(|&p| c.label(p)).collect::<Vec<_>>(),
                    }),
                };
                json!({
                    "axiom": v.axiom.to_string(),
                    "t": g.format(v.t),
                    "s": v.s.map(|s| g.format(s)),
                    "witness": witness,
                    "message": v.message,
                })
            })
            .collect();
        let body = json!({ "command": "validate", "valid": false, "violations": violations });
        return Ok(Output { body: to_pretty(&body), code: EXIT_PRECONDITION });
    }
    let pa = crate::partial_actions::PartialAction::new(data).expect("validated above");
    let e = pa.group().identity();
    let maps: Vec<String> = pa.listed().filter(|&(t, _)| t != e).map(|(t, _)| pa.group().format(t)).collect();
    let free = match check_free(&pa) {
        Freeness::Free => json!(true),
        Freeness::NotFree { t, point } => json!({ "t": pa.group().format(t), "fixed": pa.carrier().label(point) }),
    };
    Ok(Output::ok(&json!({
        "command": "validate",
        "valid": true,
        "field": field.to_string(),
        "group": pa.group().to_string(),
        "points": pa.carrier().len(),
        "maps": maps,
        "free": free,
    })))
}

fn relation_of(loaded: &LoadedAction) -> Result<Arc<Relation>, Failure> {
    require_free(loaded)?;
    Ok(Arc::new(crate::partial_actions::build_relation(&loaded.action)))
}

fn cmd_relation(path: &Path) -> Result<Output, Failure> {
    let loaded = load(path)?;
    let r = relation_of(&loaded)?;
    let c = r.carrier();
    let g = r.group();
    let pairs: Vec<Value> = r
        .pairs()
        .map(|(x, y)| {
            let t = witness(&r, x, y).expect("free relation");
            json!({ "x": c.label(x), "y": c.label(y), "witness": g.format(t) })
        })
        .collect();
    let classes = equivalence_classes(&r).map_err(AlgebraError::from)?;
    let blocks: Vec<Vec<&str>> = classes.blocks.iter().map(|b| b.iter().map(|&p| c.label(p)).collect()).collect();
    Ok(Output::ok(&json!({
        "command": "relation",
        "pairs": pairs,
        "classes": blocks,
        "invariant_subsets": count_value(classes.len()),
    })))
}

fn cmd_ideals(path: &Path) -> Result<Output, Failure> {
    let loaded = load(path)?;
    let r = relation_of(&loaded)?;
    let c = r.carrier();
    let classes = equivalence_classes(&r).map_err(AlgebraError::from)?;
    let subsets = enumerate_invariant_subsets(&r).map_err(AlgebraError::from)?;
    let mut ideals = Vec::with_capacity(subsets.len());
    for z in &subsets {
        let ideal = ideal_from_invariant(&r, z)?;
        let generators: Vec<[&str; 2]> = classes
            .blocks
            .iter()
            .filter(|b| z.contains(b[0]))
            .map(|b| [c.label(b[0]), c.label(b[0])])
            .collect();
        ideals.push(json!({
            "invariant": z.members.iter().map(|&p| c.label(p)).collect::<Vec<_>>(),
            "basis_size": ideal.dimension(),
            "generators": generators,
        }));
    }
    Ok(Output::ok(&json!({ "command": "ideals", "count": count_value(classes.len()), "ideals": ideals })))
}

fn cmd_mul(algebra: Algebra, action: &Path, lhs: &Path, rhs: &Path) -> Result<Output, Failure> {
    let loaded = load(action)?;
    let (lhs, rhs) = (read(lhs)?, read(rhs)?);
    match algebra {
        Algebra::Skew => {
            let alpha = Arc::new(induce_algebra_action(loaded.action.clone(), loaded.field)?);
            let u = parse_skew(&lhs, &alpha)?;
            let v = parse_skew(&rhs, &alpha)?;
            Ok(Output::ok(&skew_to_doc(&skew_mul(&u, &v)?)))
        }
        Algebra::Rel => {
            let r = relation_of(&loaded)?;
            let f = parse_rel(&lhs, &r, loaded.field)?;
            let g = parse_rel(&rhs, &r, loaded.field)?;
            Ok(Output::ok(&rel_to_doc(&rel_convolve(&f, &g)?)))
        }
    }
}

fn cmd_gamma(dir: Direction, action: &Path, element: &Path) -> Result<Output, Failure> {
    let loaded = load(action)?;
    let gamma = gamma_for(&loaded)?;
    let text = read(element)?;
    match dir {
        Direction::Fwd => {
            let u = parse_skew(&text, gamma.alpha())?;
            Ok(Output::ok(&rel_to_doc(&gamma.apply(&u)?)))
        }
        Direction::Inv => {
            let f = parse_rel(&text, gamma.relation(), loaded.field)?;
            Ok(Output::ok(&skew_to_doc(&gamma.invert(&f)?)))
        }
    }
}

fn cmd_selftest(action: Option<&Path>, seed: u64, trials: usize, err: &mut dyn Write) -> Result<Output, Failure> {
    let targets = match action {
        None => default_targets(),
        Some(path) => {
            let loaded = load(path)?;
            vec![Target { name: "input".into(), field: loaded.field, action: loaded.action }]
        }
    };
    let report = run_selftest(&targets, &SelftestOptions::new(seed, trials))?;
    let code = if report.ok() { EXIT_OK } else { EXIT_PROPERTY };
    if !report.ok() {
        for t in &report.targets {
            for s in t.suites.iter().filter(|s| s.failed > 0) {
                let w = s.witness.as_ref().map(Value::to_string).unwrap_or_default();
                let _ = writeln!(err, "{} over {}: {} failed {} checks; minimal inputs {w}", t.action, t.field, s.suite, s.failed);
            }
        }
    }
    Ok(Output { body: to_pretty(&report), code })
}

pub fn execute(cli: &Cli, err: &mut dyn Write) -> Result<(String, i32), Failure> {
    let out = match &cli.command {
        Command::Validate { action } => cmd_validate(action, err)?,
        Command::Relation { action } => cmd_relation(action)?,
        Command::Ideals { action } => cmd_ideals(action)?,
        Command::Mul { algebra, action, lhs, rhs } => cmd_mul(*algebra, action, lhs, rhs)?,
        Command::Gamma { dir, action, element } => cmd_gamma(*dir, action, element)?,
        Command::Selftest { action, seed, trials } => cmd_selftest(action.as_deref(), *seed, *trials, err)?,
    };
    Ok((out.body, out.code))
}

/// Parses `args` (program name first), runs the command and returns the
/// exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{e}");
                    EXIT_IO
                }
            };
        }
    };
    match execute(&cli, err) {
        Ok((body, code)) => {
            let _ = out.write_all(body.as_bytes());
            code
        }
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}
