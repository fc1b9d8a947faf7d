//! Hilbert derivations for the minimal ignorance logic and two of its
//! extensions.
//!
//! A derivation is a list of formulas, each justified as an axiom instance
//! or by a rule applied to earlier lines. The checker only verifies; it
//! never searches for proofs.

mod schema;
mod taut;

pub use schema::{instantiate, match_axiom, Schema, Substitution, METAVARIABLES};
pub use taut::{taut_check, TautError, MAX_ABSTRACTION_ATOMS};

use crate::formula::Formula;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum System {
    #[serde(rename = "IRIK")]
    Irik,
    #[serde(rename = "IRIT")]
    Irit,
    #[serde(rename = "IRIK+wI4")]
    IrikWi4,
}

impl System {
    pub fn name(self) -> &'static str {
        match self {
            System::Irik => "IRIK",
            System::Irit => "IRIT",
            System::IrikWi4 => "IRIK+wI4",
        }
    }

    pub fn schemas(self) -> &'static [Schema] {
        const BASE: [Schema; 7] = [
            Schema::Taut,
            Schema::IEqu,
            Schema::IREqu,
            Schema::ICon,
            Schema::IDis,
            Schema::RII,
            Schema::Mix,
        ];
        const WITH_T: [Schema; 8] = [
            Schema::Taut,
            Schema::IEqu,
            Schema::IREqu,
            Schema::ICon,
            Schema::IDis,
            Schema::RII,
            Schema::Mix,
            Schema::IT,
        ];
        const WITH_WI4: [Schema; 8] = [
            Schema::Taut,
            Schema::IEqu,
            Schema::IREqu,
            Schema::ICon,
            Schema::IDis,
            Schema::RII,
            Schema::Mix,
            Schema::WI4,
        ];
        match self {
            System::Irik => &BASE,
            System::Irit => &WITH_T,
            System::IrikWi4 => &WITH_WI4,
        }
    }
}

impl fmt::Display for System {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for System {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [System::Irik, System::Irit, System::IrikWi4]
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown system {s:?}; expected IRIK, IRIT or IRIK+wI4"))
    }
}

/// How a derivation line was obtained.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Justification {
    /// An instance of a schema, optionally with the intended substitution.
    Axiom {
        schema: Schema,
        subst: Option<Substitution>,
    },
    /// From `i: a` and `j: a -> b`, infer `b`.
    MP(usize, usize),
    /// From `φ`, infer `~I φ`.
    RNI(usize),
    /// From `φ <-> ψ`, infer `I φ <-> I ψ`.
    REI(usize),
    /// From `φ <-> ψ`, infer `IR φ <-> IR ψ`.
    RERI(usize),
    /// From `I χ1 & … & I χn -> I φ`, infer
    /// `(~IR χ1 & I χ1) & … & (~IR χn & I χn) -> ~IR φ`.
    RMix { from: usize, arity: usize },
}

impl Justification {
    pub fn rule_name(&self) -> &'static str {
        match self {
            Justification::Axiom { schema, .. } => schema.name(),
            Justification::MP(..) => "MP",
            Justification::RNI(_) => "R-NI",
            Justification::REI(_) => "RE-I",
            Justification::RERI(_) => "RE-RI",
            Justification::RMix { .. } => "R-MIX",
        }
    }

    /// Earlier lines this justification cites.
    pub fn premises(&self) -> Vec<usize> {
        match *self {
            Justification::Axiom { .. } => vec![],
            Justification::MP(i, j) => vec![i, j],
            Justification::RNI(i) | Justification::REI(i) | Justification::RERI(i) => vec![i],
            Justification::RMix { from, .. } => vec![from],
        }
    }
}

/// JSON shape of a justification: `{"kind":"MP","from":[i,j]}`,
/// `{"kind":"RE-I","from":i}`, `{"kind":"R-MIX","from":i,"arity":n}`, or
/// `{"kind":"<schema>","subst":{"phi":"…"}}` with `subst` optional.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawJustification {
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    from: Option<serde_json::Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    arity: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    subst: Option<Substitution>,
}

impl TryFrom<RawJustification> for Justification {
    type Error = String;

    fn try_from(raw: RawJustification) -> Result<Self, Self::Error> {
        let kind = raw.kind.as_str();
        let single = || -> Result<usize, String> {
            raw.from
                .as_ref()
                .and_then(serde_json::Value::as_u64)
                .map(|i| i as usize)
                .ok_or_else(|| format!("{kind} needs \"from\": <step index>"))
        };
        let no_extras = |allow_arity: bool| -> Result<(), String> {
            if raw.subst.is_some() {
                return Err(format!("{kind} takes no substitution"));
            }
            if raw.arity.is_some() && !allow_arity {
                return Err(format!("{kind} takes no arity"));
            }
            Ok(())
        };
        Ok(match kind {
            "MP" => {
                no_extras(false)?;
                let pair: Option<[usize; 2]> = raw
                    .from
                    .clone()
                    .and_then(|v| serde_json::from_value(v).ok());
                let [i, j] = pair.ok_or("MP needs \"from\": [i, j]")?;
                Justification::MP(i, j)
            }
            "R-NI" => {
                no_extras(false)?;
                Justification::RNI(single()?)
            }
            "RE-I" => {
                no_extras(false)?;
                Justification::REI(single()?)
            }
            "RE-RI" => {
                no_extras(false)?;
                Justification::RERI(single()?)
            }
            "R-MIX" => {
                no_extras(true)?;
                let arity = raw.arity.ok_or("R-MIX needs \"arity\"")?;
                Justification::RMix {
                    from: single()?,
                    arity,
                }
            }
            _ => {
                let schema: Schema = kind.parse()?;
                if raw.from.is_some() || raw.arity.is_some() {
                    return Err(format!("axiom {kind} cites no earlier steps"));
                }
                Justification::Axiom {
                    schema,
                    subst: raw.subst,
                }
            }
        })
    }
}

impl From<Justification> for RawJustification {
    fn from(j: Justification) -> Self {
        let kind = j.rule_name().to_string();
        let mut raw = RawJustification {
            kind,
            from: None,
            arity: None,
            subst: None,
        };
        match j {
            Justification::Axiom { subst, .. } => raw.subst = subst,
            Justification::MP(i, k) => raw.from = Some(serde_json::json!([i, k])),
            Justification::RNI(i) | Justification::REI(i) | Justification::RERI(i) => {
                raw.from = Some(serde_json::json!(i))
            }
            Justification::RMix { from, arity } => {
                raw.from = Some(serde_json::json!(from));
                raw.arity = Some(arity);
            }
        }
        raw
    }
}

impl Serialize for Justification {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        RawJustification::from(self.clone()).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Justification {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = RawJustification::deserialize(deserializer)?;
        Justification::try_from(raw).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Step {
    pub formula: Formula,
    pub by: Justification,
}

/// A derivation file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Derivation {
    pub system: System,
    pub steps: Vec<Step>,
}

#[derive(Debug, Error)]
pub enum DerivationError {
    #[error("malformed derivation: {0}")]
    Malformed(#[from] serde_json::Error),
}

impl Derivation {
    pub fn from_json(text: &str) -> Result<Derivation, DerivationError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("derivations serialize")
    }

    /// The last line, if any.
    pub fn theorem(&self) -> Option<&Formula> {
        self.steps.last().map(|s| &s.formula)
    }
}

/// Why a step was rejected.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub step: usize,
    pub rule: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "step {} ({}): {}", self.step, self.rule, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerivationReport {
    pub system: System,
    pub accepted: bool,
    pub theorem: Option<Formula>,
    pub diagnostics: Vec<Diagnostic>,
}

/// Flattens nested conjunctions into their conjuncts, left to right.
fn conjuncts(f: &Formula) -> Vec<&Formula> {
    match f {
        Formula::And(a, b) => {
            let mut out = conjuncts(a);
            out.extend(conjuncts(b));
            out
        }
        _ => vec![f],
    }
}

fn check_rmix(premise: &Formula, conclusion: &Formula, arity: usize) -> Result<(), String> {
    if arity == 0 {
        return Err("arity must be at least 1".into());
    }
    let Formula::Implies(lhs, rhs) = premise else {
        return Err(format!("premise {premise} is not an implication"));
    };
    let Formula::Ig(phi) = rhs.as_ref() else {
        return Err(format!("premise consequent {rhs} is not of the form I φ"));
    };
    let items = conjuncts(lhs);
    if items.len() != arity {
        return Err(format!(
            "premise antecedent has {} conjuncts but arity is {arity}",
            items.len()
        ));
    }
    let mut chis = Vec::with_capacity(arity);
    for item in items {
        match item {
            Formula::Ig(chi) => chis.push(chi.as_ref()),
            _ => return Err(format!("premise conjunct {item} is not of the form I χ")),
        }
    }
    let Formula::Implies(lhs2, rhs2) = conclusion else {
        return Err(format!("conclusion {conclusion} is not an implication"));
    };
    let expected_rhs = Formula::not(Formula::rig(phi.as_ref().clone()));
    if **rhs2 != expected_rhs {
        return Err(format!("conclusion consequent should be {expected_rhs}, found {rhs2}"));
    }
    let items = conjuncts(lhs2);
    if items.len() != 2 * arity {
        return Err(format!(
            "conclusion antecedent has {} conjuncts, expected {}",
            items.len(),
            2 * arity
        ));
    }
    for (k, chi) in chis.iter().enumerate() {
        let not_rig = Formula::not(Formula::rig((*chi).clone()));
        let ig = Formula::ig((*chi).clone());
        if *items[2 * k] != not_rig || *items[2 * k + 1] != ig {
            return Err(format!(
                "conclusion conjuncts {} and {} should be {not_rig} and {ig}",
                2 * k,
                2 * k + 1
            ));
        }
    }
    Ok(())
}

fn check_axiom(
    system: System,
    schema: Schema,
    subst: Option<&Substitution>,
    f: &Formula,
) -> Result<(), String> {
    if !system.schemas().contains(&schema) {
        return Err(format!("schema {schema} is not part of {system}"));
    }
    let found = match_axiom(schema, f).map_err(|e| e.to_string())?;
    let Some(found) = found else {
        return Err(match schema {
            Schema::Taut => format!("{f} is not a propositional tautology"),
            _ => format!("{f} is not an instance of {}", schema.pattern_text().unwrap_or_default()),
        });
    };
    if let Some(given) = subst {
        if let Some(bad) = given.keys().find(|k| !METAVARIABLES.contains(&k.as_str())) {
            return Err(format!("unknown metavariable {bad:?}"));
        }
        if schema == Schema::Taut {
            if !given.is_empty() {
                return Err("TAUT takes no substitution".into());
            }
        } else if *given != found {
            return Err(format!(
                "stated substitution does not produce the formula; the match is {}",
                render_subst(&found)
            ));
        }
    }
    Ok(())
}

fn render_subst(s: &Substitution) -> String {
    let parts: Vec<String> = s.iter().map(|(k, v)| format!("{k} := {v}")).collect();
    format!("{{{}}}", parts.join(", "))
}

fn check_step(system: System, steps: &[Step], index: usize) -> Result<(), String> {
    let step = &steps[index];
    let by = &step.by;
    for i in by.premises() {
        if i >= index {
            return Err(format!("cites step {i}, which is not earlier"));
        }
    }
    let line = |i: usize| &steps[i].formula;
    let this = &step.formula;
    match by {
        Justification::Axiom { schema, subst } => check_axiom(system, *schema, subst.as_ref(), this),
        Justification::MP(i, j) => {
            let expected = Formula::implies(line(*i).clone(), this.clone());
            if *line(*j) == expected {
                Ok(())
            } else if !matches!(line(*j), Formula::Implies(..)) {
                Err(format!("step {j} is not an implication"))
            } else {
                Err(format!("step {j} should be {expected}"))
            }
        }
        Justification::RNI(i) => {
            let expected = Formula::not(Formula::ig(line(*i).clone()));
            if *this == expected {
                Ok(())
            } else {
                Err(format!("expected {expected}"))
            }
        }
        Justification::REI(i) | Justification::RERI(i) => {
            let Formula::Iff(a, b) = line(*i) else {
                return Err(format!("step {i} is not a biconditional"));
            };
            let wrap = |f: &Formula| match by {
                Justification::REI(_) => Formula::ig(f.clone()),
                _ => Formula::rig(f.clone()),
            };
            let expected = Formula::iff(wrap(a), wrap(b));
            if *this == expected {
                Ok(())
            } else {
                Err(format!("expected {expected}"))
            }
        }
        Justification::RMix { from, arity } => check_rmix(line(*from), this, *arity),
    }
}

/// Verifies every step of `d` against `system`. The derivation is accepted
/// iff it is nonempty and no step has a diagnostic.
pub fn check_derivation(d: &Derivation, system: System) -> DerivationReport {
    let mut diagnostics: Vec<Diagnostic> = (0..d.steps.len())
        .filter_map(|i| {
            check_step(system, &d.steps, i).err().map(|message| Diagnostic {
                step: i,
                rule: d.steps[i].by.rule_name().to_string(),
                message,
            })
        })
        .collect();
    if d.steps.is_empty() {
        diagnostics.push(Diagnostic {
            step: 0,
            rule: "-".into(),
            message: "derivation has no steps".into(),
        });
    }
    DerivationReport {
        system,
        accepted: diagnostics.is_empty(),
        theorem: d.theorem().cloned(),
        diagnostics,
    }
}

/// Every derivation that differs from `d` in exactly one step: the line's
/// formula negated, a cited line moved to another earlier line, the two
/// MP premises swapped, or the rule replaced by a neighbouring one.
pub fn single_step_perturbations(d: &Derivation) -> Vec<(String, Derivation)> {
    let mut out = Vec::new();
    let mut push = |label: String, i: usize, step: Step| {
        let mut e = d.clone();
        e.steps[i] = step;
        out.push((label, e));
    };
    for (i, step) in d.steps.iter().enumerate() {
        push(
            format!("step {i}: negate formula"),
            i,
            Step {
                formula: Formula::not(step.formula.clone()),
                by: step.by.clone(),
            },
        );
        let with = |by: Justification| Step {
            formula: step.formula.clone(),
            by,
        };
        let mut alternatives: Vec<(String, Justification)> = Vec::new();
        match &step.by {
            Justification::Axiom { schema, .. } => {
                for &other in d.system.schemas() {
                    if other != *schema {
                        alternatives.push((
                            format!("axiom {other}"),
                            Justification::Axiom {
                                schema: other,
                                subst: None,
                            },
                        ));
                    }
                }
            }
            Justification::MP(a, b) => {
                alternatives.push(("swap MP premises".into(), Justification::MP(*b, *a)));
                for k in (0..i).filter(|k| k != a) {
                    alternatives.push((format!("MP minor from {k}"), Justification::MP(k, *b)));
                }
                for k in (0..i).filter(|k| k != b) {
                    alternatives.push((format!("MP major from {k}"), Justification::MP(*a, k)));
                }
            }
            Justification::RNI(a) | Justification::REI(a) | Justification::RERI(a) => {
                let rebuild = |k: usize| match &step.by {
                    Justification::RNI(_) => Justification::RNI(k),
                    Justification::REI(_) => Justification::REI(k),
                    _ => Justification::RERI(k),
                };
                for k in (0..i).filter(|k| k != a) {
                    alternatives.push((format!("cite {k}"), rebuild(k)));
                }
                for other in [Justification::RNI(*a), Justification::REI(*a), Justification::RERI(*a)] {
                    if other.rule_name() != step.by.rule_name() {
                        alternatives.push((format!("rule {}", other.rule_name()), other));
                    }
                }
            }
            Justification::RMix { from, arity } => {
                for k in (0..i).filter(|k| k != from) {
                    alternatives.push((format!("cite {k}"), Justification::RMix { from: k, arity: *arity }));
                }
                for a in [arity.saturating_sub(1), arity + 1] {
                    if a != *arity {
                        alternatives.push((format!("arity {a}"), Justification::RMix { from: *from, arity: a }));
                    }
                }
            }
        }
        for (label, by) in alternatives {
            push(format!("step {i}: {label}"), i, with(by));
        }
    }
    out
}
