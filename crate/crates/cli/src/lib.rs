//! The `iri` command line.
//!
//! Exit status: 0 on success or a passing claim, 1 when a search finds a
//! countermodel or a check fails, 2 on usage and I/O errors.

use clap::{Args, Parser, Subcommand, ValueEnum};
use iri::bisim::{check_delta_bisim, distinguishing_formula, max_delta_bisim, Language, PairRelation};
use iri::corpus::{corpus_dir, manifest_paths, replicate, run_manifest, ManifestReport, ReplicationReport};
use iri::formula::{ir_depth, size};
use iri::kripke::load_model;
use iri::proofs::{check_derivation, Derivation, System};
use iri::search::{
    bounded_equivalent, candidate_count, find_countermodel, rule_preservation_probe, ProbeOutcome, SearchBound, Verdict,
};
use iri::semantics::{extension, PointedModel};
use iri::{parse, BiModel, FrameClass, FrameProperty, Formula, Which};
use serde_json::json;
use std::ffi::OsString;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Full sweeps above this many candidate models trigger a warning.
pub const SWEEP_WARNING: u128 = 100_000_000;

#[derive(Debug, Parser)]
#[command(name = "iri", version, about = "Ignorance and Rumsfeld ignorance over bi-relational Kripke models")]
pub struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Worker threads for searches and replication.
    #[arg(long, global = true, value_name = "N")]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse a formula and print its canonical form and measures.
    Parse {
        #[arg(short, long)]
        formula: String,
    },
    /// Evaluate a formula at a world, or list the worlds where it holds.
    Eval {
        #[arg(short, long)]
        model: PathBuf,
        #[arg(short, long)]
        world: Option<String>,
        #[arg(short, long)]
        formula: String,
    },
    /// Report frame properties, or check membership in a frame class.
    Props {
        #[arg(short, long)]
        model: PathBuf,
        #[arg(long)]
        class: Option<String>,
    },
    /// Print a closure of the model as JSON.
    Closure {
        #[arg(short, long)]
        model: PathBuf,
        #[arg(long, value_enum)]
        kind: ClosureKind,
        #[arg(long, value_enum, default_value = "both")]
        which: Relations,
    },
    /// Check a Δ-bisimulation, or compute the largest one.
    Bisim {
        #[arg(short, long)]
        model: PathBuf,
        #[arg(long)]
        other: PathBuf,
        /// Pairs as `a:b,c:d`; omit to compute the largest relation.
        #[arg(long)]
        pairs: Option<String>,
    },
    /// Find the least formula separating two pointed models.
    Distinguish {
        #[arg(short, long)]
        model: PathBuf,
        #[arg(short, long)]
        world: String,
        #[arg(long)]
        other: PathBuf,
        #[arg(long)]
        other_world: String,
        #[arg(long, default_value = "IRI")]
        language: String,
        #[arg(long, default_value_t = 8)]
        max_size: usize,
    },
    /// Search for a countermodel within a frame class.
    Search {
        #[arg(short, long)]
        formula: String,
        #[command(flatten)]
        bound: BoundArgs,
    },
    /// Search for a model where two formulas differ.
    Equiv {
        #[arg(short, long)]
        formula: String,
        #[arg(short = 'g', long)]
        other: String,
        #[command(flatten)]
        bound: BoundArgs,
    },
    /// Probe whether a rule preserves bounded validity.
    ProbeRule {
        /// A premise formula; repeat for several.
        #[arg(short, long = "premise")]
        premises: Vec<String>,
        /// The conclusion.
        #[arg(short, long)]
        formula: String,
        #[command(flatten)]
        bound: BoundArgs,
    },
    /// Check a derivation file.
    CheckProof {
        path: PathBuf,
        #[arg(long)]
        system: Option<String>,
    },
    /// Run claim manifests; all bundled manifests by default.
    Replicate {
        manifests: Vec<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    #[arg(long, default_value = "all")]
    pub class: String,
    #[arg(long, default_value_t = 3)]
    pub max_worlds: usize,
    /// Comma-separated atoms; defaults to those of the formulas.
    #[arg(long, value_delimiter = ',')]
    pub atoms: Option<Vec<String>>,
    #[arg(long)]
    pub isomorphism_reduction: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ClosureKind {
    Reflexive,
    Endpoints,
    Transitive,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Relations {
    R,
    Rb,
    Both,
}

impl From<Relations> for Which {
    fn from(r: Relations) -> Which {
        match r {
            Relations::R => Which::R,
            Relations::Rb => Which::RBullet,
            Relations::Both => Which::Both,
        }
    }
}

/// Usage or I/O failure; reported on stderr with exit status 2.
#[derive(Debug)]
pub struct Failure(String);

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl<E: std::error::Error> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

fn fail(msg: impl Into<String>) -> Failure {
    Failure(msg.into())
}

/// Parses `args` (including the program name), runs the command, and
/// returns the exit status.
pub fn run<I, T>(args: I, out: &mut (dyn Write + Send), err: &mut (dyn Write + Send)) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    let result = match cli.jobs {
        Some(0) => Err(fail("--jobs must be positive")),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| dispatch(&cli, out, err)),
            Err(e) => Err(e.into()),
        },
        None => dispatch(&cli, out, err),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

/// Resolves a file argument: as given if it exists, else under the corpus.
fn resolve(path: &Path) -> PathBuf {
    if path.exists() || path.is_absolute() {
        return path.to_path_buf();
    }
    let bundled = corpus_dir().join(path);
    if bundled.exists() {
        bundled
    } else {
        path.to_path_buf()
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    let full = resolve(path);
    std::fs::read_to_string(&full).map_err(|e| fail(format!("cannot read {}: {e}", full.display())))
}

fn model(path: &Path) -> Result<BiModel, Failure> {
    load_model(&read(path)?).map_err(|e| fail(format!("{}: {e}", path.display())))
}

fn formula(text: &str) -> Result<Formula, Failure> {
    parse(text).map_err(|e| fail(format!("cannot parse {text:?}: {e}")))
}

fn class(text: &str) -> Result<FrameClass, Failure> {
    text.parse().map_err(|e| fail(format!("--class: {e}")))
}

fn bound(args: &BoundArgs, formulas: &[&Formula]) -> Result<SearchBound, Failure> {
    if args.max_worlds == 0 {
        return Err(fail("--max-worlds must be positive"));
    }
    let atoms: Vec<String> = match &args.atoms {
        Some(atoms) => atoms.iter().map(|a| a.trim().to_string()).filter(|a| !a.is_empty()).collect(),
        None => formulas
            .iter()
            .flat_map(|f| f.atoms())
            .collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .collect(),
    };
    Ok(SearchBound::new(args.max_worlds, atoms).with_isomorphism_reduction(args.isomorphism_reduction))
}

fn warn_if_large(b: &SearchBound, c: &FrameClass, err: &mut dyn Write) {
    let count = candidate_count(b, c);
    if count.is_none_or(|n| n > SWEEP_WARNING) {
        let shown = count.map_or_else(|| "more than 2^128".to_string(), |n| n.to_string());
        let _ = writeln!(err, "warning: a full sweep visits {shown} candidate models");
    }
}

fn print_verdict(v: &Verdict, as_json: bool, out: &mut dyn Write) -> Result<i32, Failure> {
    if as_json {
        writeln!(out, "{}", serde_json::to_string(v)?)?;
    } else {
        match v {
            Verdict::Countermodel { model, world } => {
                writeln!(out, "countermodel at {world}")?;
                writeln!(out, "{}", model.to_json())?;
            }
            Verdict::NoCounterexampleUpTo {
                max_worlds,
                models_checked,
            } => writeln!(out, "no countermodel up to {max_worlds} worlds ({models_checked} models checked)")?,
        }
    }
    Ok(if v.is_clear() { EXIT_OK } else { EXIT_NEGATIVE })
}

fn parse_pairs(text: &str) -> Result<PairRelation, Failure> {
    let mut pairs = Vec::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (a, b) = item
            .split_once(':')
            .ok_or_else(|| fail(format!("--pairs: expected left:right, found {item:?}")))?;
        pairs.push((a.to_string(), b.to_string()));
    }
    Ok(PairRelation::new(pairs))
}

fn print_manifest_text(report: &ManifestReport, out: &mut dyn Write) -> std::io::Result<()> {
    for c in &report.claims {
        let mark = if c.passed { "PASS" } else { "FAIL" };
        write!(out, "{mark} {} #{} {} [{}] {}", report.manifest, c.index, c.op, c.tag, c.anchor)?;
        if !c.passed {
            let actual = c.actual.as_ref().map_or("-".to_string(), |v| v.to_string());
            write!(out, " (expected {}, got {actual}", c.expected)?;
            if let Some(e) = &c.error {
                write!(out, "; {e}")?;
            }
            write!(out, ")")?;
        }
        writeln!(out)?;
    }
    Ok(())
}

fn dispatch(cli: &Cli, out: &mut (dyn Write + Send), err: &mut (dyn Write + Send)) -> Result<i32, Failure> {
    let as_json = cli.json;
    match &cli.command {
        Command::Parse { formula: text } => {
            let f = formula(text)?;
            if as_json {
                let v = json!({
                    "formula": f.to_string(),
                    "desugared": f.desugar().to_string(),
                    "size": size(&f),
                    "ir_depth": ir_depth(&f),
                });
                writeln!(out, "{v}")?;
            } else {
                writeln!(out, "{f}")?;
                writeln!(out, "size {} ir-depth {}", size(&f), ir_depth(&f))?;
            }
            Ok(EXIT_OK)
        }
        Command::Eval { model: path, world, formula: text } => {
            let m = model(path)?;
            let f = formula(text)?;
            match world {
                Some(w) => {
                    let value = PointedModel::new(&m, w)?.eval(&f)?;
                    if as_json {
                        writeln!(out, "{}", json!({"world": w, "formula": f.to_string(), "value": value}))?;
                    } else {
                        writeln!(out, "{value}")?;
                    }
                }
                None => {
                    let worlds: Vec<&str> = extension(&m, &f)?
                        .into_iter()
                        .enumerate()
                        .filter(|&(_, b)| b)
                        .map(|(w, _)| m.world_name(w))
                        .collect();
                    if as_json {
                        writeln!(out, "{}", json!({"formula": f.to_string(), "worlds": worlds}))?;
                    } else {
                        writeln!(out, "{}", worlds.join(" "))?;
                    }
                }
            }
            Ok(EXIT_OK)
        }
        Command::Props { model: path, class: wanted } => {
            let m = model(path)?;
            if let Some(text) = wanted {
                let holds = m.check_frame_property(&class(text)?);
                if as_json {
                    writeln!(out, "{}", json!({"class": text, "holds": holds}))?;
                } else {
                    writeln!(out, "{holds}")?;
                }
                return Ok(if holds { EXIT_OK } else { EXIT_NEGATIVE });
            }
            let n = m.len();
            let props = |rel| -> Vec<&'static str> {
                FrameProperty::ALL
                    .into_iter()
                    .filter(|p| p.holds(n, rel))
                    .map(FrameProperty::name)
                    .collect()
            };
            let (r, rb) = (props(m.r()), props(m.rbullet()));
            let proper = m.r().is_subset(m.rbullet());
            let bullet_sub = m.rbullet().is_subset(m.r());
            if as_json {
                let v = json!({"r": r, "rbullet": rb, "proper": proper, "bullet_sub": bullet_sub});
                writeln!(out, "{v}")?;
            } else {
                writeln!(out, "R: {}", r.join(", "))?;
                writeln!(out, "R•: {}", rb.join(", "))?;
                writeln!(out, "R ⊆ R•: {proper}")?;
                writeln!(out, "R• ⊆ R: {bullet_sub}")?;
            }
            Ok(EXIT_OK)
        }
        Command::Closure { model: path, kind, which } => {
            let m = model(path)?;
            let which = Which::from(*which);
            let closed = match kind {
                ClosureKind::Reflexive => m.reflexive_closure(which),
                ClosureKind::Endpoints => m.reflexivize_endpoints(which),
                ClosureKind::Transitive => m.transitive_closure(which),
            };
            writeln!(out, "{}", closed.to_json())?;
            Ok(EXIT_OK)
        }
        Command::Bisim { model: left, other, pairs } => {
            let (m1, m2) = (model(left)?, model(other)?);
            match pairs {
                Some(text) => {
                    let z = parse_pairs(text)?;
                    let ok = check_delta_bisim(&m1, &m2, &z)?;
                    if as_json {
                        writeln!(out, "{}", json!({"bisimulation": ok}))?;
                    } else {
                        writeln!(out, "{ok}")?;
                    }
                    Ok(if ok { EXIT_OK } else { EXIT_NEGATIVE })
                }
                None => {
                    let z = max_delta_bisim(&m1, &m2);
                    if as_json {
                        writeln!(out, "{}", serde_json::to_string(&z)?)?;
                    } else {
                        for (a, b) in &z.pairs {
                            writeln!(out, "{a} {b}")?;
                        }
                    }
                    Ok(EXIT_OK)
                }
            }
        }
        Command::Distinguish {
            model: left,
            world,
            other,
            other_world,
            language,
            max_size,
        } => {
            let (m1, m2) = (model(left)?, model(other)?);
            let language: Language = language.parse().map_err(|e: String| fail(format!("--language: {e}")))?;
            let pm1 = PointedModel::new(&m1, world)?;
            let pm2 = PointedModel::new(&m2, other_world)?;
            let found = distinguishing_formula(&pm1, &pm2, language, *max_size)?;
            if as_json {
                let shown = found.as_ref().map(Formula::to_string);
                writeln!(out, "{}", json!({"language": language.to_string(), "max_size": max_size, "formula": shown}))?;
            } else {
                match &found {
                    Some(f) => writeln!(out, "{f}")?,
                    None => writeln!(out, "none up to size {max_size}")?,
                }
            }
            Ok(EXIT_OK)
        }
        Command::Search { formula: text, bound: args } => {
            let f = formula(text)?;
            let c = class(&args.class)?;
            let b = bound(args, &[&f])?;
            warn_if_large(&b, &c, err);
            print_verdict(&find_countermodel(&f, &c, &b)?, as_json, out)
        }
        Command::Equiv {
            formula: left,
            other,
            bound: args,
        } => {
            let (f, g) = (formula(left)?, formula(other)?);
            let c = class(&args.class)?;
            let b = bound(args, &[&f, &g])?;
            warn_if_large(&b, &c, err);
            print_verdict(&bounded_equivalent(&f, &g, &c, &b)?, as_json, out)
        }
        Command::ProbeRule {
            premises,
            formula: text,
            bound: args,
        } => {
            let premises = premises.iter().map(|p| formula(p)).collect::<Result<Vec<_>, _>>()?;
            let conclusion = formula(text)?;
            let c = class(&args.class)?;
            let mut all: Vec<&Formula> = premises.iter().collect();
            all.push(&conclusion);
            let b = bound(args, &all)?;
            warn_if_large(&b, &c, err);
            let report = rule_preservation_probe(&premises, &conclusion, &c, &b)?;
            if as_json {
                writeln!(out, "{}", serde_json::to_string(&report)?)?;
            } else {
                let name = serde_json::to_value(report.outcome)?;
                writeln!(out, "{}", name.as_str().unwrap_or_default())?;
            }
            Ok(match report.outcome {
                ProbeOutcome::Refuted => EXIT_NEGATIVE,
                ProbeOutcome::NotRefuted | ProbeOutcome::Inconclusive => EXIT_OK,
            })
        }
        Command::CheckProof { path, system } => {
            let d = Derivation::from_json(&read(path)?).map_err(|e| fail(format!("{}: {e}", path.display())))?;
            let system = match system {
                Some(s) => s.parse::<System>().map_err(fail)?,
                None => d.system,
            };
            let report = check_derivation(&d, system);
            if as_json {
                writeln!(out, "{}", serde_json::to_string(&report)?)?;
            } else if report.accepted {
                let theorem = report.theorem.as_ref().map(Formula::to_string).unwrap_or_default();
                writeln!(out, "accepted in {system}: {theorem}")?;
            } else {
                writeln!(out, "rejected in {system}")?;
                for d in &report.diagnostics {
                    writeln!(out, "  {d}")?;
                }
            }
            Ok(if report.accepted { EXIT_OK } else { EXIT_NEGATIVE })
        }
        Command::Replicate { manifests } => {
            let report = if manifests.is_empty() {
                replicate(&corpus_dir())?
            } else {
                let reports = manifests
                    .iter()
                    .map(|p| run_manifest(&resolve(p)))
                    .collect::<Result<Vec<_>, _>>()?;
                ReplicationReport {
                    passed: reports.iter().all(|m| m.passed),
                    manifests: reports,
                }
            };
            if as_json {
                writeln!(out, "{}", serde_json::to_string_pretty(&report)?)?;
            } else {
                for m in &report.manifests {
                    print_manifest_text(m, out)?;
                }
                let total: usize = report.manifests.iter().map(|m| m.claims.len()).sum();
                let failed: usize = report.manifests.iter().map(|m| m.failures().count()).sum();
                writeln!(out, "{} claims, {failed} failed", total)?;
            }
            Ok(if report.passed { EXIT_OK } else { EXIT_NEGATIVE })
        }
    }
}

/// Manifest files `iri replicate` runs by default.
pub fn bundled_manifests() -> Vec<PathBuf> {
    manifest_paths(&corpus_dir()).unwrap_or_default()
}
