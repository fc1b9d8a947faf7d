//! Δ-bisimulation between two bi-models and a bounded search for
//! distinguishing formulas.
//!
//! A pair relation links worlds of the left model to worlds of the right
//! model. Viewed inside the disjoint union, two worlds of the same model are
//! never related, so the "two successors outside Z" trigger of Δ-Zig fires
//! exactly when the world has an `R`-successor. `R•` plays no part.

use crate::formula::{ir_depth, size, Formula};
use crate::kripke::{BiModel, World};
use crate::semantics::compact::{ignorance, knowledge, rumsfeld, CompactModel};
use crate::semantics::{EvalError, PointedModel};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::rc::Rc;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BisimError {
    #[error("unknown world {0:?} in the {1} model")]
    UnknownWorld(String, &'static str),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Pairs `(left world, right world)`, stored by name.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairRelation {
    pub pairs: BTreeSet<(String, String)>,
}

impl PairRelation {
    pub fn new<I, A, B>(pairs: I) -> PairRelation
    where
        I: IntoIterator<Item = (A, B)>,
        A: Into<String>,
        B: Into<String>,
    {
        PairRelation {
            pairs: pairs.into_iter().map(|(a, b)| (a.into(), b.into())).collect(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn contains(&self, left: &str, right: &str) -> bool {
        self.pairs.contains(&(left.to_string(), right.to_string()))
    }

    pub fn is_superset(&self, other: &PairRelation) -> bool {
        self.pairs.is_superset(&other.pairs)
    }

    /// Resolves names to world indices.
    fn indices(&self, m1: &BiModel, m2: &BiModel) -> Result<BTreeSet<(World, World)>, BisimError> {
        self.pairs
            .iter()
            .map(|(a, b)| {
                let a = m1
                    .world_index(a)
                    .ok_or_else(|| BisimError::UnknownWorld(a.clone(), "left"))?;
                let b = m2
                    .world_index(b)
                    .ok_or_else(|| BisimError::UnknownWorld(b.clone(), "right"))?;
                Ok((a, b))
            })
            .collect()
    }

    fn from_indices(m1: &BiModel, m2: &BiModel, z: &BTreeSet<(World, World)>) -> PairRelation {
        PairRelation::new(
            z.iter()
                .map(|&(a, b)| (m1.world_name(a).to_string(), m2.world_name(b).to_string())),
        )
    }
}

/// Whether `(a, b)` is related by `Z` inside the disjoint union. Side
/// `true` means the right model.
fn related(z: &BTreeSet<(World, World)>, a: (bool, World), b: (bool, World)) -> bool {
    match (a, b) {
        ((false, x), (true, y)) => z.contains(&(x, y)),
        ((true, x), (false, y)) => z.contains(&(y, x)),
        _ => false,
    }
}

fn same_atoms(m1: &BiModel, w1: World, m2: &BiModel, w2: World) -> bool {
    let atoms: BTreeSet<&str> = m1.atoms().chain(m2.atoms()).collect();
    atoms.into_iter().all(|p| {
        m1.holds_atom(p, w1).unwrap_or(false) == m2.holds_atom(p, w2).unwrap_or(false)
    })
}

/// Δ-Zig from `s` (on `side`) towards `s2` (on the other side).
fn zig(
    z: &BTreeSet<(World, World)>,
    side: bool,
    (m, s): (&BiModel, World),
    (m2, s2): (&BiModel, World),
) -> bool {
    let succ: Vec<World> = m.r_successors(s).collect();
    let triggered = succ.iter().any(|&t1| {
        succ.iter()
            .any(|&t2| !related(z, (side, t1), (side, t2)))
    });
    !triggered
        || succ.iter().all(|&t| {
            m2.r_successors(s2)
                .any(|t2| related(z, (side, t), (!side, t2)))
        })
}

fn pair_ok(z: &BTreeSet<(World, World)>, m1: &BiModel, m2: &BiModel, (a, b): (World, World)) -> bool {
    same_atoms(m1, a, m2, b) && zig(z, false, (m1, a), (m2, b)) && zig(z, true, (m2, b), (m1, a))
}

/// True iff `z` is nonempty and every pair satisfies Var, Δ-Zig and Δ-Zag.
pub fn check_delta_bisim(m1: &BiModel, m2: &BiModel, z: &PairRelation) -> Result<bool, BisimError> {
    let z = z.indices(m1, m2)?;
    Ok(!z.is_empty() && z.iter().all(|&p| pair_ok(&z, m1, m2, p)))
}

/// Greatest Δ-bisimulation between `m1` and `m2`, by refinement from all
/// Var-compatible pairs. Empty if there is none.
pub fn max_delta_bisim(m1: &BiModel, m2: &BiModel) -> PairRelation {
    let mut z: BTreeSet<(World, World)> = (0..m1.len())
        .flat_map(|a| (0..m2.len()).map(move |b| (a, b)))
        .filter(|&(a, b)| same_atoms(m1, a, m2, b))
        .collect();
    loop {
        let failing: Vec<_> = z.iter().copied().filter(|&p| !pair_ok(&z, m1, m2, p)).collect();
        if failing.is_empty() {
            break;
        }
        for p in failing {
            z.remove(&p);
        }
    }
    PairRelation::from_indices(m1, m2, &z)
}

/// Formula languages for [`distinguishing_formula`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Language {
    /// Atoms, `~`, `&`, `|`, `I`.
    LI,
    /// Adds `IR`.
    Iri,
    /// Adds `IR` and `K`.
    IriBox,
}

impl Language {
    fn has_rig(self) -> bool {
        matches!(self, Language::Iri | Language::IriBox)
    }

    fn has_box(self) -> bool {
        matches!(self, Language::IriBox)
    }
}

impl fmt::Display for Language {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Language::LI => "L(I)",
            Language::Iri => "IRI",
            Language::IriBox => "IRI+Box",
        })
    }
}

impl FromStr for Language {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "L(I)" | "LI" | "li" | "I" => Ok(Language::LI),
            "IRI" | "iri" => Ok(Language::Iri),
            "IRI+Box" | "IRI+K" | "iri+box" | "iri+k" => Ok(Language::IriBox),
            _ => Err(format!("unknown language {s:?}; expected L(I), IRI or IRI+Box")),
        }
    }
}

/// A candidate formula with its truth sets in both models.
struct Entry {
    formula: Formula,
    text: Rc<str>,
    left: u64,
    right: u64,
}

/// Entries of one size, keyed by (left, right, depth, precedence) and
/// holding the render-least formula for each key.
type Level = HashMap<(u64, u64, usize, u8), Entry>;

fn precedence(f: &Formula) -> u8 {
    match f {
        Formula::Atom(_) | Formula::Bottom => 6,
        Formula::And(..) => 4,
        Formula::Or(..) => 3,
        _ => 5,
    }
}

fn offer(level: &mut Level, formula: Formula, left: u64, right: u64) {
    let key = (left, right, ir_depth(&formula), precedence(&formula));
    let text: Rc<str> = formula.to_string().into();
    match level.get(&key) {
        Some(existing) if *existing.text <= *text => {}
        _ => {
            level.insert(
                key,
                Entry {
                    formula,
                    text,
                    left,
                    right,
                },
            );
        }
    }
}

/// The least formula of `language` with at most `max_size` symbols whose
/// truth differs between the two pointed models, ordered by I^R-depth,
/// then size, then rendered text. Atoms range over both models' atoms; an
/// atom a model does not declare is false everywhere in it.
pub fn distinguishing_formula(
    pm1: &PointedModel<'_>,
    pm2: &PointedModel<'_>,
    language: Language,
    max_size: usize,
) -> Result<Option<Formula>, BisimError> {
    let atoms: Vec<String> = pm1
        .model
        .atoms()
        .chain(pm2.model.atoms())
        .map(str::to_string)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let compact = |m: &BiModel| -> Result<CompactModel, EvalError> {
        let mut declared = m.clone();
        let names: Vec<String> = m.atoms().map(str::to_string).collect();
        let mut valuation = declared.valuation().clone();
        for a in &atoms {
            if !names.contains(a) {
                valuation.insert(a.clone(), BTreeSet::new());
            }
        }
        declared = BiModel::new(m.worlds().to_vec(), m.r().clone(), m.rbullet().clone(), valuation)
            .expect("same worlds as a valid model");
        CompactModel::from_bimodel(&declared, &atoms)
    };
    let c1 = compact(pm1.model)?;
    let c2 = compact(pm2.model)?;
    let (w1, w2) = (pm1.world, pm2.world);

    let distinguishes = |e: &Entry| (e.left >> w1 & 1) != (e.right >> w2 & 1);
    let mut best: Option<(usize, usize, Rc<str>, Formula)> = None;
    let mut consider = |e: &Entry, s: usize| {
        if !distinguishes(e) {
            return;
        }
        let d = ir_depth(&e.formula);
        let better = match &best {
            None => true,
            Some((bd, bs, bt, _)) => (d, s, &*e.text) < (*bd, *bs, &**bt),
        };
        if better {
            best = Some((d, s, e.text.clone(), e.formula.clone()));
        }
    };

    // levels[s] holds the formulas of size s.
    let mut levels: Vec<Level> = vec![Level::new()];
    for s in 1..=max_size {
        let mut level = Level::new();
        if s == 1 {
            for (i, a) in atoms.iter().enumerate() {
                offer(&mut level, Formula::atom(a.clone()), c1.valuation[i], c2.valuation[i]);
            }
        } else {
            for e in levels[s - 1].values() {
                let f = &e.formula;
                offer(
                    &mut level,
                    Formula::not(f.clone()),
                    !e.left & c1.full(),
                    !e.right & c2.full(),
                );
                offer(
                    &mut level,
                    Formula::ig(f.clone()),
                    ignorance(&c1.r, e.left),
                    ignorance(&c2.r, e.right),
                );
                if language.has_rig() {
                    offer(
                        &mut level,
                        Formula::rig(f.clone()),
                        rumsfeld(&c1.r, &c1.rbullet, e.left),
                        rumsfeld(&c2.r, &c2.rbullet, e.right),
                    );
                }
                if language.has_box() {
                    offer(
                        &mut level,
                        Formula::boxed(f.clone()),
                        knowledge(&c1.rbullet, e.left),
                        knowledge(&c2.rbullet, e.right),
                    );
                }
            }
            for a in 1..s - 1 {
                let b = s - 1 - a;
                for x in levels[a].values() {
                    for y in levels[b].values() {
                        offer(
                            &mut level,
                            Formula::and(x.formula.clone(), y.formula.clone()),
                            x.left & y.left,
                            x.right & y.right,
                        );
                        offer(
                            &mut level,
                            Formula::or(x.formula.clone(), y.formula.clone()),
                            x.left | y.left,
                            x.right | y.right,
                        );
                    }
                }
            }
        }
        for e in level.values() {
            debug_assert_eq!(size(&e.formula), s);
            consider(e, s);
        }
        levels.push(level);
    }
    Ok(best.map(|(_, _, _, f)| f))
}
