//! Exhaustive enumeration of small bi-models inside a frame class.
//!
//! Models are generated by world count, then frame, then valuation. A frame
//! is a mixed-radix number over the ordered pairs of worlds, pair `(a, b)`
//! at digit `a * n + b` with digit 0 least significant; each digit chooses
//! the joint `(R, R•)` membership of that pair among the states the
//! inclusion constraint admits. Required reflexivity is fixed on the
//! diagonal; the remaining frame properties are filtered afterwards. Atom
//! `k` of a valuation number `v` is true at world `w` iff bit `k * n + w`
//! of `v` is set.

use crate::formula::Formula;
use crate::kripke::{BiModel, FrameClass, FrameProperty, Relation};
use crate::semantics::compact::{full_mask, CompactModel, Program};
use crate::semantics::EvalError;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::sync::atomic::{AtomicU64, Ordering};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("bound must be positive")]
    ZeroBound,
    #[error("search space for {worlds} worlds and {atoms} atoms is too large to enumerate")]
    TooLarge { worlds: usize, atoms: usize },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchBound {
    pub max_worlds: usize,
    pub atoms: Vec<String>,
    pub isomorphism_reduction: bool,
}

impl SearchBound {
    pub fn new<S: Into<String>>(max_worlds: usize, atoms: impl IntoIterator<Item = S>) -> SearchBound {
        SearchBound {
            max_worlds,
            atoms: atoms.into_iter().map(Into::into).collect(),
            isomorphism_reduction: false,
        }
    }

    pub fn with_isomorphism_reduction(mut self, on: bool) -> SearchBound {
        self.isomorphism_reduction = on;
        self
    }
}

/// Outcome of a bounded search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Verdict {
    Countermodel {
        model: BiModel,
        world: String,
    },
    #[serde(rename = "clear")]
    NoCounterexampleUpTo {
        max_worlds: usize,
        #[serde(rename = "checked")]
        models_checked: u64,
    },
}

impl Verdict {
    pub fn is_clear(&self) -> bool {
        matches!(self, Verdict::NoCounterexampleUpTo { .. })
    }

    pub fn countermodel(&self) -> Option<(&BiModel, &str)> {
        match self {
            Verdict::Countermodel { model, world } => Some((model, world)),
            Verdict::NoCounterexampleUpTo { .. } => None,
        }
    }
}

/// Frames with a fixed number of worlds.
struct FrameSpace {
    n: usize,
    digits: Vec<Vec<(bool, bool)>>,
    count: u64,
}

impl FrameSpace {
    fn new(n: usize, class: &FrameClass) -> Option<FrameSpace> {
        let states = class.inclusion.pair_states();
        let refl_r = class.r.contains(FrameProperty::Reflexive);
        let refl_rb = class.rbullet.contains(FrameProperty::Reflexive);
        let diag: Vec<(bool, bool)> = states
            .iter()
            .copied()
            .filter(|&(r, rb)| (r || !refl_r) && (rb || !refl_rb))
            .collect();
        let digits: Vec<_> = (0..n * n)
            .map(|k| if k / n == k % n { diag.clone() } else { states.to_vec() })
            .collect();
        let count = digits
            .iter()
            .try_fold(1u64, |acc, d| acc.checked_mul(d.len() as u64))?;
        Some(FrameSpace { n, digits, count })
    }

    fn decode(&self, mut index: u64) -> (Vec<u64>, Vec<u64>) {
        let n = self.n;
        let mut r = vec![0u64; n];
        let mut rb = vec![0u64; n];
        for (k, digit) in self.digits.iter().enumerate() {
            let radix = digit.len() as u64;
            let (in_r, in_rb) = digit[(index % radix) as usize];
            index /= radix;
            if in_r {
                r[k / n] |= 1 << (k % n);
            }
            if in_rb {
                rb[k / n] |= 1 << (k % n);
            }
        }
        (r, rb)
    }
}

fn frame_in_class(class: &FrameClass, r: &[u64], rb: &[u64]) -> bool {
    class.r.iter().all(|p| p.holds_bits(r)) && class.rbullet.iter().all(|p| p.holds_bits(rb))
}

fn valuation_bits(n: usize, atoms: usize) -> Option<u32> {
    let bits = n.checked_mul(atoms)?;
    (bits < 64).then_some(bits as u32)
}

fn valuation(n: usize, atoms: usize, v: u64) -> Vec<u64> {
    let mask = full_mask(n);
    (0..atoms).map(|k| (v >> (k * n)) & mask).collect()
}

fn permute(set: u64, perm: &[usize]) -> u64 {
    perm.iter()
        .enumerate()
        .filter(|&(old, _)| set >> old & 1 == 1)
        .fold(0, |acc, (_, &new)| acc | 1 << new)
}

fn encoding(m: &CompactModel, perm: &[usize]) -> Vec<u64> {
    let n = m.len();
    let mut r = vec![0u64; n];
    let mut rb = vec![0u64; n];
    for old in 0..n {
        r[perm[old]] = permute(m.r[old], perm);
        rb[perm[old]] = permute(m.rbullet[old], perm);
    }
    r.into_iter()
        .chain(rb)
        .chain(m.valuation.iter().map(|&v| permute(v, perm)))
        .collect()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, n: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for i in 0..n {
            if !prefix.contains(&i) {
                prefix.push(i);
                go(prefix, n, out);
                prefix.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), n, &mut out);
    out
}

/// True iff `m` has the least encoding among all its relabellings.
fn is_canonical(m: &CompactModel, perms: &[Vec<usize>]) -> bool {
    let own = encoding(m, &perms[0]);
    perms[1..].iter().all(|p| own <= encoding(m, p))
}

/// Converts an enumerated model to a named bi-model with worlds `w0`, `w1`, ….
pub fn to_bimodel(m: &CompactModel, atoms: &[String]) -> BiModel {
    let n = m.len();
    let rel = |succ: &[u64]| -> Relation {
        (0..n)
            .flat_map(|a| (0..n).filter(move |&b| succ[a] >> b & 1 == 1).map(move |b| (a, b)))
            .collect()
    };
    let valuation: BTreeMap<String, BTreeSet<usize>> = atoms
        .iter()
        .zip(&m.valuation)
        .map(|(a, &bits)| (a.clone(), (0..n).filter(|&w| bits >> w & 1 == 1).collect()))
        .collect();
    BiModel::new(
        (0..n).map(|w| format!("w{w}")).collect(),
        rel(&m.r),
        rel(&m.rbullet),
        valuation,
    )
    .expect("enumerated models are well-formed")
}

/// Per-world-count data shared by every frame of that size.
struct Layer {
    space: FrameSpace,
    atoms: usize,
    vbits: u32,
    perms: Vec<Vec<usize>>,
}

impl Layer {
    fn new(n: usize, bound: &SearchBound, class: &FrameClass) -> Result<Layer, SearchError> {
        let atoms = bound.atoms.len();
        let too_large = SearchError::TooLarge { worlds: n, atoms };
        let space = FrameSpace::new(n, class).ok_or_else(|| too_large.clone())?;
        let vbits = valuation_bits(n, atoms).ok_or(too_large)?;
        let perms = if bound.isomorphism_reduction {
            permutations(n)
        } else {
            Vec::new()
        };
        Ok(Layer {
            space,
            atoms,
            vbits,
            perms,
        })
    }

    /// Runs `visit` on the models of frame `index` in valuation order until
    /// it returns a value. Also returns the number of models visited.
    fn visit_frame<T>(
        &self,
        index: u64,
        class: &FrameClass,
        mut visit: impl FnMut(&CompactModel) -> Option<T>,
    ) -> (Option<T>, u64) {
        let (r, rbullet) = self.space.decode(index);
        if !frame_in_class(class, &r, &rbullet) {
            return (None, 0);
        }
        let mut model = CompactModel {
            r,
            rbullet,
            valuation: Vec::new(),
        };
        let mut visited = 0;
        for v in 0..1u64 << self.vbits {
            model.valuation = valuation(self.space.n, self.atoms, v);
            if !self.perms.is_empty() && !is_canonical(&model, &self.perms) {
                continue;
            }
            visited += 1;
            if let Some(t) = visit(&model) {
                return (Some(t), visited);
            }
        }
        (None, visited)
    }
}

fn layers(bound: &SearchBound, class: &FrameClass) -> Result<Vec<Layer>, SearchError> {
    if bound.max_worlds == 0 {
        return Err(SearchError::ZeroBound);
    }
    (1..=bound.max_worlds).map(|n| Layer::new(n, bound, class)).collect()
}

/// Visits every model of the bound in enumeration order, stopping at the
/// first one for which `visit` returns a value. Frames are checked in
/// parallel; the enumeration-least hit wins. Also returns the number of
/// models visited, which is exact when the sweep ran to completion.
fn scan<T, F>(bound: &SearchBound, class: &FrameClass, visit: F) -> Result<(Option<T>, u64), SearchError>
where
    T: Send,
    F: Fn(&CompactModel) -> Option<T> + Sync,
{
    let checked = AtomicU64::new(0);
    for layer in layers(bound, class)? {
        let hit = (0..layer.space.count).into_par_iter().find_map_first(|index| {
            let (found, visited) = layer.visit_frame(index, class, &visit);
            checked.fetch_add(visited, Ordering::Relaxed);
            found
        });
        if hit.is_some() {
            return Ok((hit, checked.load(Ordering::Relaxed)));
        }
    }
    Ok((None, checked.load(Ordering::Relaxed)))
}

/// Every bi-model with `1..=max_worlds` worlds over the bound's atoms whose
/// frame lies in `class`, in enumeration order.
pub fn enumerate_bimodels(bound: &SearchBound, class: &FrameClass) -> Result<Vec<BiModel>, SearchError> {
    let mut out = Vec::new();
    for layer in layers(bound, class)? {
        for index in 0..layer.space.count {
            layer.visit_frame(index, class, |m| {
                out.push(to_bimodel(m, &bound.atoms));
                None::<()>
            });
        }
    }
    Ok(out)
}

/// Number of candidate models a full sweep would visit before frame
/// property filtering.
pub fn candidate_count(bound: &SearchBound, class: &FrameClass) -> Option<u128> {
    (1..=bound.max_worlds).try_fold(0u128, |acc, n| {
        let frames = FrameSpace::new(n, class)?.count as u128;
        let vals = 1u128.checked_shl(valuation_bits(n, bound.atoms.len())?)?;
        acc.checked_add(frames.checked_mul(vals)?)
    })
}

/// The first enumerated model and world at which `f` is false, or a clear
/// verdict with the number of models checked.
pub fn find_countermodel(f: &Formula, class: &FrameClass, bound: &SearchBound) -> Result<Verdict, SearchError> {
    let program = Program::compile(f, &bound.atoms)?;
    let (hit, checked) = scan(bound, class, |m| {
        let mask = program.eval(m, &mut Vec::new());
        let missing = !mask & m.full();
        (missing != 0).then(|| (m.clone(), missing.trailing_zeros() as usize))
    })?;
    Ok(match hit {
        Some((m, w)) => Verdict::Countermodel {
            model: to_bimodel(&m, &bound.atoms),
            world: format!("w{w}"),
        },
        None => Verdict::NoCounterexampleUpTo {
            max_worlds: bound.max_worlds,
            models_checked: checked,
        },
    })
}

/// Same contract as [`find_countermodel`].
pub fn bounded_valid(f: &Formula, class: &FrameClass, bound: &SearchBound) -> Result<Verdict, SearchError> {
    find_countermodel(f, class, bound)
}

/// Verdict for `f <-> g` over the class.
pub fn bounded_equivalent(
    f: &Formula,
    g: &Formula,
    class: &FrameClass,
    bound: &SearchBound,
) -> Result<Verdict, SearchError> {
    find_countermodel(&Formula::iff(f.clone(), g.clone()), class, bound)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeOutcome {
    /// Every premise is clear and the conclusion has a countermodel.
    Refuted,
    /// Every premise and the conclusion are clear.
    NotRefuted,
    /// Some premise already has a countermodel.
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub premises: Vec<Verdict>,
    pub conclusion: Verdict,
    pub outcome: ProbeOutcome,
}

/// Checks whether the rule `premises / conclusion` preserves bounded
/// validity over the class.
pub fn rule_preservation_probe(
    premises: &[Formula],
    conclusion: &Formula,
    class: &FrameClass,
    bound: &SearchBound,
) -> Result<ProbeReport, SearchError> {
    let premises = premises
        .iter()
        .map(|p| bounded_valid(p, class, bound))
        .collect::<Result<Vec<_>, _>>()?;
    let conclusion = bounded_valid(conclusion, class, bound)?;
    let outcome = if !premises.iter().all(Verdict::is_clear) {
        ProbeOutcome::Inconclusive
    } else if conclusion.is_clear() {
        ProbeOutcome::NotRefuted
    } else {
        ProbeOutcome::Refuted
    };
    Ok(ProbeReport {
        premises,
        conclusion,
        outcome,
    })
}
