//! Claim manifests over the bundled models and derivations.
//!
//! A manifest names a default file and lists claims. Each claim is an
//! operation name, its arguments, and the expected result. Paths inside a
//! manifest are relative to the corpus root, the directory holding
//! `models/`, `derivations/` and `manifests/`.
//!
//! ```json
//! {"file":"models/prop3i.json","claims":[{"op":"eval",
//!   "args":{"world":"s","formula":"IR p"},"expect":true,
//!   "tag":"...","anchor":"..."}]}
//! ```

use crate::bisim::{check_delta_bisim, distinguishing_formula, max_delta_bisim, Language, PairRelation};
use crate::formula::{ir_depth, order_lt, parse, size, Formula};
use crate::kripke::{load_model, BiModel, FrameClass, Which};
use crate::proofs::{check_derivation, match_axiom, single_step_perturbations, taut_check, Derivation, Schema, System};
use crate::search::{bounded_equivalent, find_countermodel, rule_preservation_probe, SearchBound, Verdict};
use crate::semantics::{consequence_on_model, valid_on_model, PointedModel};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use std::fs;
use std::path::{Path, PathBuf};
use thiserror::Error;

/// Every operation a claim may name.
pub const OPERATIONS: [&str; 18] = [
    "eval",
    "valid_on_model",
    "consequence_on_model",
    "check_frame_property",
    "check_delta_bisim",
    "max_delta_bisim",
    "distinguishing_formula",
    "size",
    "ir_depth",
    "order_lt",
    "find_countermodel",
    "bounded_valid",
    "bounded_equivalent",
    "rule_preservation_probe",
    "check_derivation",
    "check_perturbations",
    "taut_check",
    "match_axiom",
];

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot read {path}: {source}")]
    Missing {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed manifest {path}: {message}")]
    Malformed { path: PathBuf, message: String },
    #[error("manifest {0} has no claims")]
    Empty(PathBuf),
    #[error("unknown operation {op:?} in claim {index} of {path}")]
    UnknownOperation { path: PathBuf, index: usize, op: String },
}

/// The bundled corpus, or the directory named by `IRI_CORPUS_DIR`.
pub fn corpus_dir() -> PathBuf {
    match std::env::var_os("IRI_CORPUS_DIR") {
        Some(dir) => PathBuf::from(dir),
        None => PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/corpus")),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub file: Option<String>,
    pub claims: Vec<Claim>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Claim {
    pub op: String,
    #[serde(default)]
    pub args: Map<String, Value>,
    pub expect: Value,
    pub tag: String,
    pub anchor: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub file: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClaimResult {
    pub index: usize,
    pub op: String,
    pub tag: String,
    pub anchor: String,
    pub passed: bool,
    pub expected: Value,
    pub actual: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestReport {
    pub manifest: String,
    pub passed: bool,
    pub claims: Vec<ClaimResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicationReport {
    pub passed: bool,
    pub manifests: Vec<ManifestReport>,
}

impl ManifestReport {
    pub fn failures(&self) -> impl Iterator<Item = &ClaimResult> {
        self.claims.iter().filter(|c| !c.passed)
    }
}

/// Reads and validates a manifest without running it.
pub fn load_manifest(path: &Path) -> Result<Manifest, CorpusError> {
    let text = fs::read_to_string(path).map_err(|source| CorpusError::Missing {
        path: path.to_path_buf(),
        source,
    })?;
    let manifest: Manifest = serde_json::from_str(&text).map_err(|e| CorpusError::Malformed {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    if manifest.claims.is_empty() {
        return Err(CorpusError::Empty(path.to_path_buf()));
    }
    for (index, claim) in manifest.claims.iter().enumerate() {
        if !OPERATIONS.contains(&claim.op.as_str()) {
            return Err(CorpusError::UnknownOperation {
                path: path.to_path_buf(),
                index,
                op: claim.op.clone(),
            });
        }
    }
    Ok(manifest)
}

/// The corpus root for a manifest: the parent of its `manifests/` folder,
/// or the manifest's own folder otherwise.
fn root_for(path: &Path) -> PathBuf {
    let dir = path.parent().unwrap_or(Path::new("."));
    match dir.file_name() {
        Some(name) if name == "manifests" => dir.parent().unwrap_or(Path::new(".")).to_path_buf(),
        _ => dir.to_path_buf(),
    }
}

/// Runs every claim of the manifest at `path`, in order.
pub fn run_manifest(path: &Path) -> Result<ManifestReport, CorpusError> {
    let manifest = load_manifest(path)?;
    let root = root_for(path);
    let claims = manifest
        .claims
        .iter()
        .enumerate()
        .map(|(index, claim)| run_claim(&root, manifest.file.as_deref(), index, claim))
        .collect::<Vec<_>>();
    Ok(ManifestReport {
        manifest: path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default(),
        passed: claims.iter().all(|c| c.passed),
        claims,
    })
}

/// Paths of all manifests under `root/manifests`, sorted by file name.
pub fn manifest_paths(root: &Path) -> Result<Vec<PathBuf>, CorpusError> {
    let dir = root.join("manifests");
    let entries = fs::read_dir(&dir).map_err(|source| CorpusError::Missing {
        path: dir.clone(),
        source,
    })?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(Result::ok)
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    paths.sort();
    Ok(paths)
}

/// Runs every manifest of the corpus. Manifests run in parallel; the
/// report lists them in file-name order.
pub fn replicate(root: &Path) -> Result<ReplicationReport, CorpusError> {
    let paths = manifest_paths(root)?;
    let manifests = paths
        .par_iter()
        .map(|p| run_manifest(p))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ReplicationReport {
        passed: manifests.iter().all(|m| m.passed),
        manifests,
    })
}

fn run_claim(root: &Path, default_file: Option<&str>, index: usize, claim: &Claim) -> ClaimResult {
    let file = claim.file.as_deref().or(default_file);
    let outcome = execute(root, file, &claim.op, &claim.args);
    let (actual, detail, error) = match outcome {
        Ok(Outcome { value, detail }) => (Some(value), detail, None),
        Err(e) => (None, None, Some(e)),
    };
    ClaimResult {
        index,
        op: claim.op.clone(),
        tag: claim.tag.clone(),
        anchor: claim.anchor.clone(),
        passed: actual.as_ref() == Some(&claim.expect),
        expected: claim.expect.clone(),
        actual,
        detail,
        error,
    }
}

struct Outcome {
    value: Value,
    detail: Option<Value>,
}

impl From<Value> for Outcome {
    fn from(value: Value) -> Self {
        Outcome { value, detail: None }
    }
}

struct Args<'a> {
    root: &'a Path,
    file: Option<&'a str>,
    map: &'a Map<String, Value>,
}

impl Args<'_> {
    fn get(&self, key: &str) -> Result<&Value, String> {
        self.map.get(key).ok_or_else(|| format!("missing argument {key:?}"))
    }

    fn str(&self, key: &str) -> Result<&str, String> {
        self.get(key)?
            .as_str()
            .ok_or_else(|| format!("argument {key:?} must be a string"))
    }

    fn usize(&self, key: &str) -> Result<usize, String> {
        self.get(key)?
            .as_u64()
            .map(|n| n as usize)
            .ok_or_else(|| format!("argument {key:?} must be a non-negative integer"))
    }

    fn formula(&self, key: &str) -> Result<Formula, String> {
        let text = self.str(key)?;
        parse(text).map_err(|e| format!("argument {key:?}: {e}"))
    }

    fn formulas(&self, key: &str) -> Result<Vec<Formula>, String> {
        self.get(key)?
            .as_array()
            .ok_or_else(|| format!("argument {key:?} must be a list of formulas"))?
            .iter()
            .map(|v| {
                let text = v.as_str().ok_or_else(|| format!("argument {key:?} must hold strings"))?;
                parse(text).map_err(|e| format!("argument {key:?}: {e}"))
            })
            .collect()
    }

    fn pairs(&self, key: &str) -> Result<PairRelation, String> {
        let pairs: Vec<(String, String)> =
            serde_json::from_value(self.get(key)?.clone()).map_err(|e| format!("argument {key:?}: {e}"))?;
        Ok(PairRelation::new(pairs))
    }

    fn class(&self) -> Result<FrameClass, String> {
        self.str("class")?.parse().map_err(|e| format!("{e}"))
    }

    fn bound(&self) -> Result<SearchBound, String> {
        let atoms: Vec<String> = match self.map.get("atoms") {
            Some(v) => serde_json::from_value(v.clone()).map_err(|e| format!("argument \"atoms\": {e}"))?,
            None => vec![],
        };
        let iso = self.map.get("isomorphism_reduction").and_then(Value::as_bool).unwrap_or(false);
        Ok(SearchBound::new(self.usize("max_worlds")?, atoms).with_isomorphism_reduction(iso))
    }

    fn read(&self, rel: &str) -> Result<String, String> {
        let path = self.root.join(rel);
        fs::read_to_string(&path).map_err(|e| format!("cannot read {}: {e}", path.display()))
    }

    fn transform(&self, m: BiModel) -> Result<BiModel, String> {
        match self.map.get("transform").and_then(Value::as_str) {
            None => Ok(m),
            Some("reflexive_closure") => Ok(m.reflexive_closure(Which::Both)),
            Some("reflexivize_endpoints") => Ok(m.reflexivize_endpoints(Which::Both)),
            Some("transitive_closure") => Ok(m.transitive_closure(Which::Both)),
            Some(other) => Err(format!("unknown transform {other:?}")),
        }
    }

    fn load(&self, rel: &str) -> Result<BiModel, String> {
        let m = load_model(&self.read(rel)?).map_err(|e| format!("{rel}: {e}"))?;
        self.transform(m)
    }

    fn model(&self) -> Result<BiModel, String> {
        self.load(self.file.ok_or("claim needs a model file")?)
    }

    fn other(&self) -> Result<BiModel, String> {
        self.load(self.str("other")?)
    }

    fn derivation(&self) -> Result<Derivation, String> {
        let rel = self.file.ok_or("claim needs a derivation file")?;
        Derivation::from_json(&self.read(rel)?).map_err(|e| format!("{rel}: {e}"))
    }
}

fn verdict_outcome(v: Verdict) -> Outcome {
    let kind = if v.is_clear() { "clear" } else { "countermodel" };
    Outcome {
        value: json!(kind),
        detail: Some(serde_json::to_value(&v).expect("verdicts serialize")),
    }
}

fn execute(root: &Path, file: Option<&str>, op: &str, map: &Map<String, Value>) -> Result<Outcome, String> {
    let a = Args { root, file, map };
    let err = |e: &dyn std::fmt::Display| e.to_string();
    Ok(match op {
        "eval" => {
            let m = a.model()?;
            let pm = PointedModel::new(&m, a.str("world")?).map_err(|e| err(&e))?;
            json!(pm.eval(&a.formula("formula")?).map_err(|e| err(&e))?).into()
        }
        "valid_on_model" => json!(valid_on_model(&a.model()?, &a.formula("formula")?).map_err(|e| err(&e))?).into(),
        "consequence_on_model" => {
            let premises = a.formulas("premises")?;
            json!(consequence_on_model(&a.model()?, &premises, &a.formula("formula")?).map_err(|e| err(&e))?).into()
        }
        "check_frame_property" => json!(a.model()?.check_frame_property(&a.class()?)).into(),
        "check_delta_bisim" => {
            json!(check_delta_bisim(&a.model()?, &a.other()?, &a.pairs("pairs")?).map_err(|e| err(&e))?).into()
        }
        "max_delta_bisim" => {
            let z = max_delta_bisim(&a.model()?, &a.other()?);
            Outcome {
                value: json!(z.is_superset(&a.pairs("contains")?)),
                detail: Some(serde_json::to_value(&z).expect("relations serialize")),
            }
        }
        "distinguishing_formula" => {
            let (m1, m2) = (a.model()?, a.other()?);
            let pm1 = PointedModel::new(&m1, a.str("world")?).map_err(|e| err(&e))?;
            let pm2 = PointedModel::new(&m2, a.str("other_world")?).map_err(|e| err(&e))?;
            let language: Language = a.str("language")?.parse().map_err(|e| err(&e))?;
            let found = distinguishing_formula(&pm1, &pm2, language, a.usize("max_size")?).map_err(|e| err(&e))?;
            match found {
                Some(f) => json!(f.to_string()).into(),
                None => Value::Null.into(),
            }
        }
        "size" => json!(size(&a.formula("formula")?)).into(),
        "ir_depth" => json!(ir_depth(&a.formula("formula")?)).into(),
        "order_lt" => json!(order_lt(&a.formula("left")?, &a.formula("right")?)).into(),
        "find_countermodel" | "bounded_valid" => {
            verdict_outcome(find_countermodel(&a.formula("formula")?, &a.class()?, &a.bound()?).map_err(|e| err(&e))?)
        }
        "bounded_equivalent" => verdict_outcome(
            bounded_equivalent(&a.formula("left")?, &a.formula("right")?, &a.class()?, &a.bound()?)
                .map_err(|e| err(&e))?,
        ),
        "rule_preservation_probe" => {
            let report =
                rule_preservation_probe(&a.formulas("premises")?, &a.formula("conclusion")?, &a.class()?, &a.bound()?)
                    .map_err(|e| err(&e))?;
            Outcome {
                value: serde_json::to_value(report.outcome).expect("outcomes serialize"),
                detail: Some(serde_json::to_value(&report).expect("reports serialize")),
            }
        }
        "check_derivation" => {
            let d = a.derivation()?;
            let system = match a.map.get("system").and_then(Value::as_str) {
                Some(s) => s.parse::<System>()?,
                None => d.system,
            };
            let report = check_derivation(&d, system);
            Outcome {
                value: json!(report.accepted),
                detail: Some(serde_json::to_value(&report).expect("reports serialize")),
            }
        }
        "check_perturbations" => {
            let d = a.derivation()?;
            let perturbed = single_step_perturbations(&d);
            let accepted: Vec<&str> = perturbed
                .iter()
                .filter(|(_, e)| check_derivation(e, e.system).accepted)
                .map(|(label, _)| label.as_str())
                .collect();
            Outcome {
                value: json!(accepted.is_empty()),
                detail: Some(json!({"perturbations": perturbed.len(), "accepted": accepted})),
            }
        }
        "taut_check" => json!(taut_check(&a.formula("formula")?).map_err(|e| err(&e))?).into(),
        "match_axiom" => {
            let schema: Schema = a.str("schema")?.parse()?;
            match match_axiom(schema, &a.formula("formula")?).map_err(|e| err(&e))? {
                Some(sigma) => serde_json::to_value(sigma).expect("substitutions serialize").into(),
                None => Value::Null.into(),
            }
        }
        other => return Err(format!("unknown operation {other:?}")),
    })
}
