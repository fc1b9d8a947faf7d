use crate::formula::Formula;
use thiserror::Error;

pub const MAX_ABSTRACTION_ATOMS: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("boolean abstraction has {0} atoms; at most 20 are supported")]
pub struct TautError(pub usize);

/// Collects the distinct abstraction atoms: propositional atoms and
/// maximal subformulas headed by `I`, `IR`, `K` or `Kw`.
fn abstraction_atoms<'f>(f: &'f Formula, out: &mut Vec<&'f Formula>) {
    match f {
        Formula::Bottom => {}
        Formula::Atom(_) | Formula::Ig(_) | Formula::RIg(_) | Formula::Box(_) | Formula::Kw(_) => {
            if !out.contains(&f) {
                out.push(f);
            }
        }
        _ => {
            for c in f.children() {
                abstraction_atoms(c, out);
            }
        }
    }
}

fn value(f: &Formula, atoms: &[&Formula], row: u32) -> bool {
    match f {
        Formula::Bottom => false,
        Formula::Not(a) => !value(a, atoms, row),
        Formula::And(a, b) => value(a, atoms, row) && value(b, atoms, row),
        Formula::Or(a, b) => value(a, atoms, row) || value(b, atoms, row),
        Formula::Implies(a, b) => !value(a, atoms, row) || value(b, atoms, row),
        Formula::Iff(a, b) => value(a, atoms, row) == value(b, atoms, row),
        _ => {
            let i = atoms.iter().position(|&g| g == f).expect("collected atom");
            row >> i & 1 == 1
        }
    }
}

/// Whether `f` is a propositional tautology when every maximal modal
/// subformula is read as an opaque atom.
pub fn taut_check(f: &Formula) -> Result<bool, TautError> {
    let mut atoms = Vec::new();
    abstraction_atoms(f, &mut atoms);
    if atoms.len() > MAX_ABSTRACTION_ATOMS {
        return Err(TautError(atoms.len()));
    }
    Ok((0..1u32 << atoms.len()).all(|row| value(f, &atoms, row)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{arb, parse};
    use proptest::prelude::*;

    fn taut(text: &str) -> bool {
        taut_check(&parse(text).unwrap()).unwrap()
    }

    #[test]
    fn examples() {
        assert!(taut("(I p | false) <-> I p"));
        assert!(!taut("I p -> p"));
        assert!(!taut("I (p & q) -> I p | I q"));
        assert!(taut("p | ~p"));
        assert!(taut("true"));
        assert!(!taut("false"));
        assert!(taut("I (p & q) -> I (p & q)"));
        assert!(!taut("I (p & q) -> I (q & p)"));
        assert!(taut("(I p <-> I ~p) -> (I p & I q -> I ~p)"));
    }

    #[test]
    fn resource_guard() {
        let wide = (0..21)
            .map(|i| Formula::atom(format!("p{i}")))
            .reduce(Formula::or)
            .unwrap();
        assert_eq!(taut_check(&wide), Err(TautError(21)));
    }

    /// Quine's method: pick an abstraction atom, replace it by each
    /// constant, simplify, and recurse until no atom is left.
    fn quine(f: &Formula) -> bool {
        fn first_atom(f: &Formula) -> Option<Formula> {
            match f {
                Formula::Bottom => None,
                Formula::Atom(_) | Formula::Ig(_) | Formula::RIg(_) | Formula::Box(_) | Formula::Kw(_) => {
                    Some(f.clone())
                }
                _ => f.children().into_iter().find_map(first_atom),
            }
        }
        fn replace(f: &Formula, target: &Formula, by: bool) -> Formula {
            if f == target {
                return if by { Formula::top() } else { Formula::Bottom };
            }
            match f {
                Formula::Not(a) => Formula::not(replace(a, target, by)),
                Formula::And(a, b) => Formula::and(replace(a, target, by), replace(b, target, by)),
                Formula::Or(a, b) => Formula::or(replace(a, target, by), replace(b, target, by)),
                Formula::Implies(a, b) => Formula::implies(replace(a, target, by), replace(b, target, by)),
                Formula::Iff(a, b) => Formula::iff(replace(a, target, by), replace(b, target, by)),
                _ => f.clone(),
            }
        }
        fn ground(f: &Formula) -> bool {
            match f {
                Formula::Bottom => false,
                Formula::Not(a) => !ground(a),
                Formula::And(a, b) => ground(a) && ground(b),
                Formula::Or(a, b) => ground(a) || ground(b),
                Formula::Implies(a, b) => !ground(a) || ground(b),
                Formula::Iff(a, b) => ground(a) == ground(b),
                _ => unreachable!("atoms were replaced"),
            }
        }
        match first_atom(f) {
            None => ground(f),
            Some(a) => quine(&replace(f, &a, true)) && quine(&replace(f, &a, false)),
        }
    }

    proptest! {
        #[test]
        fn agrees_with_quine_splitting(f in arb::formula()) {
            prop_assert_eq!(taut_check(&f).unwrap(), quine(&f));
        }

        #[test]
        fn excluded_middle_instances(f in arb::formula()) {
            prop_assert!(taut_check(&Formula::or(f.clone(), Formula::not(f))).unwrap());
        }
    }
}
