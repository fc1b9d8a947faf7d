//! Bitmask evaluation for models with at most 64 worlds.
//!
//! A formula is compiled once into a straight-line [`Program`] whose
//! registers hold truth sets as `u64` masks; identical subformulas share a
//! register. This is the evaluator used by exhaustive search and formula
//! enumeration.

use super::EvalError;
use crate::formula::Formula;
use crate::kripke::BiModel;
use std::collections::HashMap;

pub const MAX_WORLDS: usize = 64;

/// A bi-model as successor bitmasks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompactModel {
    pub r: Vec<u64>,
    pub rbullet: Vec<u64>,
    /// Truth set of each atom, indexed like the atom list it was built for.
    pub valuation: Vec<u64>,
}

impl CompactModel {
    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    pub fn full(&self) -> u64 {
        full_mask(self.len())
    }

    /// Encodes `m`, laying out atoms in the order of `atoms`.
    pub fn from_bimodel(m: &BiModel, atoms: &[String]) -> Result<CompactModel, EvalError> {
        let n = m.len();
        if n > MAX_WORLDS {
            return Err(EvalError::TooManyWorlds(n));
        }
        let mut r = vec![0u64; n];
        let mut rbullet = vec![0u64; n];
        for &(a, b) in m.r() {
            r[a] |= 1 << b;
        }
        for &(a, b) in m.rbullet() {
            rbullet[a] |= 1 << b;
        }
        let valuation = atoms
            .iter()
            .map(|atom| {
                m.valuation()
                    .get(atom)
                    .map(|ws| ws.iter().fold(0u64, |acc, &w| acc | 1 << w))
                    .ok_or_else(|| EvalError::UndeclaredAtom(atom.clone()))
            })
            .collect::<Result<_, _>>()?;
        Ok(CompactModel {
            r,
            rbullet,
            valuation,
        })
    }
}

pub fn full_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Truth set of `I φ` given the truth set of `φ`.
#[inline]
pub fn ignorance(r: &[u64], inner: u64) -> u64 {
    let mut out = 0;
    for (w, &succ) in r.iter().enumerate() {
        if succ & inner != 0 && succ & !inner != 0 {
            out |= 1 << w;
        }
    }
    out
}

/// Truth set of `IR φ` given the truth set of `φ`.
#[inline]
pub fn rumsfeld(r: &[u64], rbullet: &[u64], inner: u64) -> u64 {
    let ig = ignorance(r, inner);
    let mut out = 0;
    for (w, &succ) in rbullet.iter().enumerate() {
        if ig >> w & 1 == 1 && succ & !ig != 0 {
            out |= 1 << w;
        }
    }
    out
}

/// Truth set of `K φ` given the truth set of `φ`.
#[inline]
pub fn knowledge(rbullet: &[u64], inner: u64) -> u64 {
    let mut out = 0;
    for (w, &succ) in rbullet.iter().enumerate() {
        if succ & !inner == 0 {
            out |= 1 << w;
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Op {
    Atom(usize),
    Bottom,
    Not(usize),
    And(usize, usize),
    Or(usize, usize),
    Implies(usize, usize),
    Iff(usize, usize),
    Ig(usize),
    RIg(usize),
    Box(usize),
}

/// A compiled formula.
#[derive(Debug, Clone)]
pub struct Program {
    ops: Vec<Op>,
}

impl Program {
    /// Compiles `f` against an atom list; atoms outside the list are an
    /// error. `Kw` is compiled as `~I`.
    pub fn compile(f: &Formula, atoms: &[String]) -> Result<Program, EvalError> {
        let mut builder = Builder {
            atoms,
            ops: Vec::new(),
            seen: HashMap::new(),
        };
        builder.emit(f)?;
        Ok(Program { ops: builder.ops })
    }

    /// Truth set of the compiled formula. `scratch` is reused between calls
    /// to avoid allocation.
    pub fn eval(&self, m: &CompactModel, scratch: &mut Vec<u64>) -> u64 {
        let full = m.full();
        scratch.clear();
        for op in &self.ops {
            let v = match *op {
                Op::Atom(i) => m.valuation[i],
                Op::Bottom => 0,
                Op::Not(a) => !scratch[a] & full,
                Op::And(a, b) => scratch[a] & scratch[b],
                Op::Or(a, b) => scratch[a] | scratch[b],
                Op::Implies(a, b) => (!scratch[a] | scratch[b]) & full,
                Op::Iff(a, b) => !(scratch[a] ^ scratch[b]) & full,
                Op::Ig(a) => ignorance(&m.r, scratch[a]),
                Op::RIg(a) => rumsfeld(&m.r, &m.rbullet, scratch[a]),
                Op::Box(a) => knowledge(&m.rbullet, scratch[a]),
            };
            scratch.push(v);
        }
        *scratch.last().expect("programs are never empty")
    }
}

struct Builder<'a> {
    atoms: &'a [String],
    ops: Vec<Op>,
    seen: HashMap<Op, usize>,
}

impl Builder<'_> {
    fn push(&mut self, op: Op) -> usize {
        if let Some(&i) = self.seen.get(&op) {
            return i;
        }
        self.ops.push(op);
        let i = self.ops.len() - 1;
        self.seen.insert(op, i);
        i
    }

    fn emit(&mut self, f: &Formula) -> Result<usize, EvalError> {
        let op = match f {
            Formula::Atom(name) => {
                let i = self
                    .atoms
                    .iter()
                    .position(|a| a == name)
                    .ok_or_else(|| EvalError::UndeclaredAtom(name.clone()))?;
                Op::Atom(i)
            }
            Formula::Bottom => Op::Bottom,
            Formula::Not(a) => Op::Not(self.emit(a)?),
            Formula::And(a, b) => Op::And(self.emit(a)?, self.emit(b)?),
            Formula::Or(a, b) => Op::Or(self.emit(a)?, self.emit(b)?),
            Formula::Implies(a, b) => Op::Implies(self.emit(a)?, self.emit(b)?),
            Formula::Iff(a, b) => Op::Iff(self.emit(a)?, self.emit(b)?),
            Formula::Ig(a) => Op::Ig(self.emit(a)?),
            Formula::RIg(a) => Op::RIg(self.emit(a)?),
            Formula::Box(a) => Op::Box(self.emit(a)?),
            Formula::Kw(a) => {
                let inner = self.emit(a)?;
                let ig = self.push(Op::Ig(inner));
                Op::Not(ig)
            }
        };
        Ok(self.push(op))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::arb;
    use crate::kripke::arb as models;
    use crate::semantics::extension;
    use proptest::prelude::*;

    fn atoms() -> Vec<String> {
        vec!["p".into(), "q".into(), "r".into()]
    }

    #[test]
    fn undeclared_atom_at_compile_time() {
        let f = crate::formula::parse("I z").unwrap();
        assert!(matches!(
            Program::compile(&f, &atoms()),
            Err(EvalError::UndeclaredAtom(a)) if a == "z"
        ));
    }

    proptest! {
        /// The bitmask evaluator agrees with the reference evaluator.
        #[test]
        fn agrees_with_reference(m in models::bimodel(5), f in arb::formula_over(&["p", "q"])) {
            let names = atoms()[..2].to_vec();
            let compact = CompactModel::from_bimodel(&m, &names).unwrap();
            let program = Program::compile(&f, &names).unwrap();
            let mask = program.eval(&compact, &mut Vec::new());
            let reference = extension(&m, &f).unwrap();
            for (w, &v) in reference.iter().enumerate() {
                prop_assert_eq!(mask >> w & 1 == 1, v, "world {} of {}", w, f);
            }
            prop_assert_eq!(mask & !compact.full(), 0);
        }
    }
}
