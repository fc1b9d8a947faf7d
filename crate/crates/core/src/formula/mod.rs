//! Formulas of the language with first-order ignorance `I`, Rumsfeld
//! ignorance `IR`, explicit knowledge `K` (written □ in the literature) and
//! the `Kw` ("knows whether") abbreviation.

mod measure;
mod parser;

use std::collections::BTreeSet;
use std::fmt;

pub use measure::{ir_depth, order_lt, size, Measure};
pub use parser::{parse, ParseError};

/// Abstract syntax tree of a formula.
///
/// `Or`, `Implies`, `Iff` and `Bottom` are kept as native nodes so that
/// axiom schemas mentioning them can be matched structurally. `Kw` is the
/// only abbreviation; [`Formula::desugar`] removes it.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Atom(String),
    Bottom,
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    /// Ignorance whether.
    Ig(Box<Formula>),
    /// Rumsfeld ignorance.
    RIg(Box<Formula>),
    /// Knowledge that, interpreted over R•.
    Box(Box<Formula>),
    /// Knowing whether; abbreviates `~I φ`.
    Kw(Box<Formula>),
}

impl Formula {
    pub fn atom(name: impl Into<String>) -> Formula {
        Formula::Atom(name.into())
    }

    pub fn top() -> Formula {
        Formula::not(Formula::Bottom)
    }

    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    pub fn ig(f: Formula) -> Formula {
        Formula::Ig(Box::new(f))
    }

    pub fn rig(f: Formula) -> Formula {
        Formula::RIg(Box::new(f))
    }

    pub fn boxed(f: Formula) -> Formula {
        Formula::Box(Box::new(f))
    }

    pub fn kw(f: Formula) -> Formula {
        Formula::Kw(Box::new(f))
    }

    /// Replaces every `Kw φ` by `~I φ`, recursively.
    pub fn desugar(&self) -> Formula {
        use Formula::*;
        match self {
            Atom(_) | Bottom => self.clone(),
            Not(a) => Formula::not(a.desugar()),
            And(a, b) => Formula::and(a.desugar(), b.desugar()),
            Or(a, b) => Formula::or(a.desugar(), b.desugar()),
            Implies(a, b) => Formula::implies(a.desugar(), b.desugar()),
            Iff(a, b) => Formula::iff(a.desugar(), b.desugar()),
            Ig(a) => Formula::ig(a.desugar()),
            RIg(a) => Formula::rig(a.desugar()),
            Box(a) => Formula::boxed(a.desugar()),
            Kw(a) => Formula::not(Formula::ig(a.desugar())),
        }
    }

    pub fn is_desugared(&self) -> bool {
        match self {
            Formula::Kw(_) => false,
            _ => self.children().iter().all(|c| c.is_desugared()),
        }
    }

    /// Immediate subformulas, left to right.
    pub fn children(&self) -> Vec<&Formula> {
        use Formula::*;
        match self {
            Atom(_) | Bottom => vec![],
            Not(a) | Ig(a) | RIg(a) | Box(a) | Kw(a) => vec![a],
            And(a, b) | Or(a, b) | Implies(a, b) | Iff(a, b) => vec![a, b],
        }
    }

    /// Atom names occurring in the formula.
    pub fn atoms(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<String>) {
        if let Formula::Atom(name) = self {
            out.insert(name.clone());
        }
        for c in self.children() {
            c.collect_atoms(out);
        }
    }

    /// True when the formula mentions `IR`.
    pub fn mentions_rig(&self) -> bool {
        matches!(self, Formula::RIg(_)) || self.children().iter().any(|c| c.mentions_rig())
    }

    /// True when the formula mentions `K`.
    pub fn mentions_box(&self) -> bool {
        matches!(self, Formula::Box(_)) || self.children().iter().any(|c| c.mentions_box())
    }

    /// Right-nested conjunction of the given formulas folded to the left:
    /// `((a & b) & c)`. Returns `None` for an empty list.
    pub fn conjunction<I: IntoIterator<Item = Formula>>(items: I) -> Option<Formula> {
        items.into_iter().reduce(Formula::and)
    }

    fn precedence(&self) -> u8 {
        use Formula::*;
        match self {
            Iff(..) => 1,
            Implies(..) => 2,
            Or(..) => 3,
            And(..) => 4,
            Not(_) | Ig(_) | RIg(_) | Box(_) | Kw(_) => 5,
            Atom(_) | Bottom => 6,
        }
    }
}

impl fmt::Display for Formula {
    /// Renders with the fewest parentheses that still re-parse to the same
    /// tree. `->` and `<->` associate to the right, `&` and `|` to the left.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Formula::*;
        match self {
            Atom(name) => write!(f, "{name}"),
            Bottom => write!(f, "false"),
            Not(a) if **a == Bottom => write!(f, "true"),
            Not(a) => {
                write!(f, "~")?;
                write_operand(f, a, 5)
            }
            Ig(a) => write_prefix(f, "I", a),
            RIg(a) => write_prefix(f, "IR", a),
            Box(a) => write_prefix(f, "K", a),
            Kw(a) => write_prefix(f, "Kw", a),
            And(a, b) => write_binary(f, self.precedence(), false, a, " & ", b),
            Or(a, b) => write_binary(f, self.precedence(), false, a, " | ", b),
            Implies(a, b) => write_binary(f, self.precedence(), true, a, " -> ", b),
            Iff(a, b) => write_binary(f, self.precedence(), true, a, " <-> ", b),
        }
    }
}

fn write_prefix(f: &mut fmt::Formatter<'_>, op: &str, operand: &Formula) -> fmt::Result {
    write!(f, "{op} ")?;
    write_operand(f, operand, 5)
}

fn write_operand(f: &mut fmt::Formatter<'_>, operand: &Formula, min_prec: u8) -> fmt::Result {
    if operand.precedence() < min_prec {
        write!(f, "({operand})")
    } else {
        write!(f, "{operand}")
    }
}

fn write_binary(
    f: &mut fmt::Formatter<'_>,
    prec: u8,
    right_assoc: bool,
    left: &Formula,
    op: &str,
    right: &Formula,
) -> fmt::Result {
    let left_parens = left.precedence() < prec || (right_assoc && left.precedence() == prec);
    let right_parens = right.precedence() < prec || (!right_assoc && right.precedence() == prec);
    if left_parens {
        write!(f, "({left})")?;
    } else {
        write!(f, "{left}")?;
    }
    write!(f, "{op}")?;
    if right_parens {
        write!(f, "({right})")
    } else {
        write!(f, "{right}")
    }
}

/// Renders a formula in the concrete grammar.
pub fn render(f: &Formula) -> String {
    f.to_string()
}

impl std::str::FromStr for Formula {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

impl serde::Serialize for Formula {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for Formula {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        parse(&text).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
pub(crate) mod arb {
    use super::Formula;
    use proptest::prelude::*;

    /// Random formulas over atoms `p`, `q`, `r`, including every node kind.
    pub fn formula() -> impl Strategy<Value = Formula> {
        formula_over(&["p", "q", "r"])
    }

    /// Random formulas over the given atoms.
    pub fn formula_over(atoms: &[&'static str]) -> impl Strategy<Value = Formula> {
        let leaf = prop_oneof![
            4 => prop::sample::select(atoms.to_vec()).prop_map(Formula::atom),
            1 => Just(Formula::Bottom),
        ];
        leaf.prop_recursive(5, 40, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(Formula::not),
                inner.clone().prop_map(Formula::ig),
                inner.clone().prop_map(Formula::rig),
                inner.clone().prop_map(Formula::boxed),
                inner.clone().prop_map(Formula::kw),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::implies(a, b)),
                (inner.clone(), inner).prop_map(|(a, b)| Formula::iff(a, b)),
            ]
        })
    }
}
