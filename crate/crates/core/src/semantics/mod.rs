//! Truth of formulas at worlds of a bi-model.
//!
//! `I φ` holds at `s` when some `R`-successor satisfies `φ` and some
//! `R`-successor falsifies it. `IR φ` holds when `I φ` holds and some
//! `R•`-successor falsifies `I φ`. `K φ` holds when every `R•`-successor
//! satisfies `φ`.

pub mod compact;

use crate::formula::Formula;
use crate::kripke::{BiModel, World};
use std::collections::HashMap;
use std::rc::Rc;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("undeclared atom {0:?}")]
    UndeclaredAtom(String),
    #[error("unknown world {0:?}")]
    UnknownWorld(String),
    #[error("model has {0} worlds; at most 64 are supported here")]
    TooManyWorlds(usize),
}

/// A model together with a designated world.
#[derive(Debug, Clone, Copy)]
pub struct PointedModel<'a> {
    pub model: &'a BiModel,
    pub world: World,
}

impl<'a> PointedModel<'a> {
    pub fn new(model: &'a BiModel, world: &str) -> Result<PointedModel<'a>, EvalError> {
        let world = model
            .world_index(world)
            .ok_or_else(|| EvalError::UnknownWorld(world.to_string()))?;
        Ok(PointedModel { model, world })
    }

    pub fn world_name(&self) -> &str {
        self.model.world_name(self.world)
    }

    pub fn eval(&self, f: &Formula) -> Result<bool, EvalError> {
        eval(self, f)
    }
}

type Extension = Rc<Vec<bool>>;

/// Computes truth sets bottom-up, caching each distinct subformula once.
struct Evaluator<'m, 'f> {
    model: &'m BiModel,
    cache: HashMap<&'f Formula, Extension>,
}

impl<'m, 'f> Evaluator<'m, 'f> {
    fn new(model: &'m BiModel) -> Self {
        Evaluator {
            model,
            cache: HashMap::new(),
        }
    }

    fn extension(&mut self, f: &'f Formula) -> Result<Extension, EvalError> {
        if let Some(ext) = self.cache.get(f) {
            return Ok(ext.clone());
        }
        let n = self.model.len();
        let ext: Vec<bool> = match f {
            Formula::Atom(name) => {
                let set = self
                    .model
                    .valuation()
                    .get(name)
                    .ok_or_else(|| EvalError::UndeclaredAtom(name.clone()))?;
                (0..n).map(|w| set.contains(&w)).collect()
            }
            Formula::Bottom => vec![false; n],
            Formula::Not(a) => self.extension(a)?.iter().map(|&v| !v).collect(),
            Formula::And(a, b) => self.binary(a, b, |x, y| x && y)?,
            Formula::Or(a, b) => self.binary(a, b, |x, y| x || y)?,
            Formula::Implies(a, b) => self.binary(a, b, |x, y| !x || y)?,
            Formula::Iff(a, b) => self.binary(a, b, |x, y| x == y)?,
            Formula::Ig(a) => {
                let inner = self.extension(a)?;
                self.ignorance(&inner)
            }
            Formula::Kw(a) => {
                let inner = self.extension(a)?;
                self.ignorance(&inner).into_iter().map(|v| !v).collect()
            }
            Formula::RIg(a) => {
                let inner = self.extension(a)?;
                let ig = self.ignorance(&inner);
                (0..n)
                    .map(|w| ig[w] && self.model.rbullet_successors(w).any(|t| !ig[t]))
                    .collect()
            }
            Formula::Box(a) => {
                let inner = self.extension(a)?;
                (0..n)
                    .map(|w| self.model.rbullet_successors(w).all(|t| inner[t]))
                    .collect()
            }
        };
        let ext = Rc::new(ext);
        self.cache.insert(f, ext.clone());
        Ok(ext)
    }

    fn binary(
        &mut self,
        a: &'f Formula,
        b: &'f Formula,
        op: impl Fn(bool, bool) -> bool,
    ) -> Result<Vec<bool>, EvalError> {
        let x = self.extension(a)?;
        let y = self.extension(b)?;
        Ok(x.iter().zip(y.iter()).map(|(&x, &y)| op(x, y)).collect())
    }

    fn ignorance(&self, inner: &[bool]) -> Vec<bool> {
        (0..self.model.len())
            .map(|w| {
                let mut sat = false;
                let mut unsat = false;
                for t in self.model.r_successors(w) {
                    if inner[t] {
                        sat = true;
                    } else {
                        unsat = true;
                    }
                }
                sat && unsat
            })
            .collect()
    }
}

/// Truth set of `f`: entry `w` is the value of `f` at world `w`.
pub fn extension(m: &BiModel, f: &Formula) -> Result<Vec<bool>, EvalError> {
    let mut ev = Evaluator::new(m);
    let ext = ev.extension(f)?;
    Ok(ext.as_ref().clone())
}

/// Truth of `f` at a pointed model.
pub fn eval(pm: &PointedModel<'_>, f: &Formula) -> Result<bool, EvalError> {
    Ok(extension(pm.model, f)?[pm.world])
}

/// `f` holds at every world of `m`.
pub fn valid_on_model(m: &BiModel, f: &Formula) -> Result<bool, EvalError> {
    Ok(extension(m, f)?.into_iter().all(|v| v))
}

/// At every world of `m` where all of `gamma` hold, `f` holds.
pub fn consequence_on_model(m: &BiModel, gamma: &[Formula], f: &Formula) -> Result<bool, EvalError> {
    let mut ev = Evaluator::new(m);
    let target = ev.extension(f)?;
    let premises = gamma
        .iter()
        .map(|g| ev.extension(g))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((0..m.len()).all(|w| !premises.iter().all(|p| p[w]) || target[w]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{arb, parse};
    use crate::kripke::{arb as models, Relation};
    use proptest::prelude::*;

    fn f(text: &str) -> Formula {
        parse(text).unwrap()
    }

    /// Rumsfeld-ignorance countermodel with `R(v)` containing `u`.
    fn prop3i() -> BiModel {
        let r = [("s", "u"), ("s", "v"), ("u", "u"), ("u", "v"), ("v", "v"), ("v", "u")];
        let mut rb = r.to_vec();
        rb.push(("s", "t"));
        BiModel::from_names(&["s", "t", "u", "v"], &r, &rb, &[("p", &["s", "t", "u"])]).unwrap()
    }

    fn at(m: &BiModel, w: &str, text: &str) -> bool {
        PointedModel::new(m, w).unwrap().eval(&f(text)).unwrap()
    }

    #[test]
    fn prop3i_claims() {
        let m = prop3i();
        assert!(at(&m, "s", "IR p"));
        assert!(!at(&m, "s", "I I p"));
        assert!(!at(&m, "s", "I (I p | p)"));
    }

    #[test]
    fn knowledge_uses_rbullet() {
        let m = BiModel::from_names(
            &["s", "t"],
            &[("s", "s"), ("t", "t")],
            &[("s", "s"), ("s", "t"), ("t", "t")],
            &[("p", &["s", "t"])],
        )
        .unwrap();
        assert!(at(&m, "s", "K p"));
        let mirror = BiModel::from_names(
            &["s'", "t'"],
            &[("s'", "s'"), ("t'", "t'")],
            &[("s'", "s'"), ("s'", "t'"), ("t'", "t'")],
            &[("p", &["s'"])],
        )
        .unwrap();
        assert!(!at(&mirror, "s'", "K p"));
    }

    #[test]
    fn model_level_validity_and_consequence() {
        let m = prop3i();
        assert!(valid_on_model(&m, &f("p | ~p")).unwrap());
        assert!(!valid_on_model(&m, &f("I p")).unwrap());
        assert!(consequence_on_model(&m, &[f("I p")], &f("I p")).unwrap());
        assert!(consequence_on_model(&m, &[Formula::Bottom], &f("IR q")).is_err());
        assert!(consequence_on_model(&m, &[Formula::Bottom], &f("I I p")).unwrap());
        assert!(!consequence_on_model(&m, &[f("IR p")], &f("I I p")).unwrap());
    }

    #[test]
    fn undeclared_atoms_and_worlds_are_errors() {
        let m = prop3i();
        let pm = PointedModel::new(&m, "s").unwrap();
        assert_eq!(pm.eval(&f("q")), Err(EvalError::UndeclaredAtom("q".into())));
        assert!(matches!(
            PointedModel::new(&m, "nowhere"),
            Err(EvalError::UnknownWorld(_))
        ));
    }

    /// Direct transcription of the single-relation semantics, using `R`
    /// for both the first-order and the Rumsfeld clause.
    fn single_relation(m: &BiModel, w: World, f: &Formula) -> bool {
        let succ = |w: World| m.r_successors(w).collect::<Vec<_>>();
        let ig = |w: World, g: &Formula| {
            let s = succ(w);
            s.iter().any(|&t| single_relation(m, t, g)) && s.iter().any(|&t| !single_relation(m, t, g))
        };
        match f {
            Formula::Atom(p) => m.holds_atom(p, w).unwrap(),
            Formula::Bottom => false,
            Formula::Not(a) => !single_relation(m, w, a),
            Formula::And(a, b) => single_relation(m, w, a) && single_relation(m, w, b),
            Formula::Or(a, b) => single_relation(m, w, a) || single_relation(m, w, b),
            Formula::Implies(a, b) => !single_relation(m, w, a) || single_relation(m, w, b),
            Formula::Iff(a, b) => single_relation(m, w, a) == single_relation(m, w, b),
            Formula::Ig(a) => ig(w, a),
            Formula::Kw(a) => !ig(w, a),
            Formula::RIg(a) => ig(w, a) && succ(w).into_iter().any(|t| !ig(t, a)),
            Formula::Box(a) => succ(w).into_iter().all(|t| single_relation(m, t, a)),
        }
    }

    fn merged(m: &BiModel) -> BiModel {
        let r: Relation = m.r().clone();
        BiModel::new(m.worlds().to_vec(), r.clone(), r, m.valuation().clone()).unwrap()
    }

    fn small_formula() -> impl Strategy<Value = Formula> {
        arb::formula_over(&["p", "q"]).prop_filter("bounded size", |f| crate::formula::size(f) <= 12)
    }

    proptest! {
        #[test]
        fn negation_duality(m in models::bimodel(4), g in arb::formula_over(&["p", "q"])) {
            let pos = extension(&m, &g).unwrap();
            let neg = extension(&m, &Formula::not(g.clone())).unwrap();
            for w in 0..m.len() {
                prop_assert_eq!(neg[w], !pos[w]);
            }
        }

        #[test]
        fn ignorance_equivalence_law(m in models::bimodel(4), g in arb::formula_over(&["p", "q"])) {
            prop_assert_eq!(
                extension(&m, &Formula::ig(g.clone())).unwrap(),
                extension(&m, &Formula::ig(Formula::not(g))).unwrap()
            );
        }

        #[test]
        fn rumsfeld_implies_ignorance(m in models::bimodel(4), g in arb::formula_over(&["p", "q"])) {
            let rig = extension(&m, &Formula::rig(g.clone())).unwrap();
            let ig = extension(&m, &Formula::ig(g)).unwrap();
            for w in 0..m.len() {
                prop_assert!(!rig[w] || ig[w]);
            }
        }

        #[test]
        fn merged_relations_match_single_relation_semantics(
            m in models::bimodel(4),
            g in small_formula(),
        ) {
            let m = merged(&m);
            let ext = extension(&m, &g).unwrap();
            for w in 0..m.len() {
                prop_assert_eq!(ext[w], single_relation(&m, w, &g));
            }
        }

        #[test]
        fn knowing_whether_is_negated_ignorance(m in models::bimodel(4), g in arb::formula_over(&["p", "q"])) {
            let kw = extension(&m, &Formula::kw(g.clone()).desugar()).unwrap();
            let ig = extension(&m, &Formula::ig(g)).unwrap();
            for w in 0..m.len() {
                prop_assert_eq!(kw[w], !ig[w]);
            }
        }
    }
}
