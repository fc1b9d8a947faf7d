use super::taut::{taut_check, TautError};
use crate::formula::{parse, Formula};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

/// Metavariable names used in schema patterns.
pub const METAVARIABLES: [&str; 3] = ["phi", "psi", "chi"];

/// Assignment of formulas to metavariables.
pub type Substitution = BTreeMap<String, Formula>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Schema {
    #[serde(rename = "TAUT")]
    Taut,
    #[serde(rename = "I-Equ")]
    IEqu,
    #[serde(rename = "IR-Equ")]
    IREqu,
    #[serde(rename = "I-Con")]
    ICon,
    #[serde(rename = "I-Dis")]
    IDis,
    #[serde(rename = "RI-I")]
    RII,
    #[serde(rename = "MIX")]
    Mix,
    #[serde(rename = "I-T")]
    IT,
    #[serde(rename = "wI-4")]
    WI4,
}

impl Schema {
    pub const ALL: [Schema; 9] = [
        Schema::Taut,
        Schema::IEqu,
        Schema::IREqu,
        Schema::ICon,
        Schema::IDis,
        Schema::RII,
        Schema::Mix,
        Schema::IT,
        Schema::WI4,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Schema::Taut => "TAUT",
            Schema::IEqu => "I-Equ",
            Schema::IREqu => "IR-Equ",
            Schema::ICon => "I-Con",
            Schema::IDis => "I-Dis",
            Schema::RII => "RI-I",
            Schema::Mix => "MIX",
            Schema::IT => "I-T",
            Schema::WI4 => "wI-4",
        }
    }

    /// Pattern text over `phi`, `psi`, `chi`; `None` for TAUT.
    pub fn pattern_text(self) -> Option<&'static str> {
        Some(match self {
            Schema::Taut => return None,
            Schema::IEqu => "I phi <-> I ~phi",
            Schema::IREqu => "IR phi <-> IR ~phi",
            Schema::ICon => "I (phi & psi) -> I phi | I psi",
            Schema::IDis => "I (phi | psi) & I (~phi | chi) -> I phi",
            Schema::RII => "IR phi -> I phi",
            Schema::Mix => "I phi & I (I phi | chi) -> IR phi",
            Schema::IT => "phi & I (phi | psi) -> I phi",
            Schema::WI4 => "I I phi -> I phi",
        })
    }

    pub fn pattern(self) -> Option<Formula> {
        self.pattern_text()
            .map(|t| parse(t).expect("schema patterns parse"))
    }
}

impl fmt::Display for Schema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Schema {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Schema::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown schema {s:?}"))
    }
}

fn bind(pattern: &Formula, f: &Formula, sigma: &mut Substitution) -> bool {
    use Formula::*;
    match (pattern, f) {
        (Atom(var), _) => match sigma.get(var) {
            Some(bound) => bound == f,
            None => {
                sigma.insert(var.clone(), f.clone());
                true
            }
        },
        (Bottom, Bottom) => true,
        (Not(a), Not(x)) | (Ig(a), Ig(x)) | (RIg(a), RIg(x)) | (Box(a), Box(x)) | (Kw(a), Kw(x)) => {
            bind(a, x, sigma)
        }
        (And(a, b), And(x, y))
        | (Or(a, b), Or(x, y))
        | (Implies(a, b), Implies(x, y))
        | (Iff(a, b), Iff(x, y)) => bind(a, x, sigma) && bind(b, y, sigma),
        _ => false,
    }
}

/// Applies a substitution to a pattern. Metavariables without a binding
/// are left in place.
pub fn instantiate(pattern: &Formula, sigma: &Substitution) -> Formula {
    use Formula::*;
    match pattern {
        Atom(var) => sigma.get(var).cloned().unwrap_or_else(|| pattern.clone()),
        Bottom => Bottom,
        Not(a) => Formula::not(instantiate(a, sigma)),
        Ig(a) => Formula::ig(instantiate(a, sigma)),
        RIg(a) => Formula::rig(instantiate(a, sigma)),
        Box(a) => Formula::boxed(instantiate(a, sigma)),
        Kw(a) => Formula::kw(instantiate(a, sigma)),
        And(a, b) => Formula::and(instantiate(a, sigma), instantiate(b, sigma)),
        Or(a, b) => Formula::or(instantiate(a, sigma), instantiate(b, sigma)),
        Implies(a, b) => Formula::implies(instantiate(a, sigma), instantiate(b, sigma)),
        Iff(a, b) => Formula::iff(instantiate(a, sigma), instantiate(b, sigma)),
    }
}

/// The substitution making `f` an instance of the schema, if any. TAUT
/// yields the empty substitution exactly when `f` is a tautology under
/// boolean abstraction.
pub fn match_axiom(schema: Schema, f: &Formula) -> Result<Option<Substitution>, TautError> {
    match schema.pattern() {
        None => Ok(taut_check(f)?.then(Substitution::new)),
        Some(pattern) => {
            let mut sigma = Substitution::new();
            Ok(bind(&pattern, f, &mut sigma).then_some(sigma))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::arb;
    use proptest::prelude::*;

    fn f(text: &str) -> Formula {
        parse(text).unwrap()
    }

    fn sigma(pairs: &[(&str, &str)]) -> Substitution {
        pairs.iter().map(|&(k, v)| (k.to_string(), f(v))).collect()
    }

    #[test]
    fn examples() {
        assert_eq!(
            match_axiom(Schema::Mix, &f("I p & I (I p | q) -> IR p")).unwrap(),
            Some(sigma(&[("phi", "p"), ("chi", "q")]))
        );
        assert_eq!(
            match_axiom(Schema::RII, &f("IR (p & q) -> I (p & q)")).unwrap(),
            Some(sigma(&[("phi", "p & q")]))
        );
        assert_eq!(match_axiom(Schema::IEqu, &f("I p <-> I q")).unwrap(), None);
        assert_eq!(match_axiom(Schema::Taut, &f("I p | ~I p")).unwrap(), Some(Substitution::new()));
        assert_eq!(match_axiom(Schema::Taut, &f("I p")).unwrap(), None);
        assert_eq!(
            match_axiom(Schema::Mix, &f("I p & I (I p | false) -> IR p")).unwrap(),
            Some(sigma(&[("phi", "p"), ("chi", "false")]))
        );
        // Metavariables must be bound consistently.
        assert_eq!(match_axiom(Schema::Mix, &f("I p & I (I q | q) -> IR p")).unwrap(), None);
    }

    #[test]
    fn names_round_trip() {
        for s in Schema::ALL {
            assert_eq!(s.name().parse::<Schema>().unwrap(), s);
            assert_eq!(serde_json::to_string(&s).unwrap(), format!("{:?}", s.name()));
        }
    }

    fn substitution() -> impl Strategy<Value = Substitution> {
        (arb::formula(), arb::formula(), arb::formula()).prop_map(|(a, b, c)| {
            [("phi", a), ("psi", b), ("chi", c)]
                .into_iter()
                .map(|(k, v)| (k.to_string(), v))
                .collect()
        })
    }

    proptest! {
        #[test]
        fn matching_recovers_the_substitution(sigma in substitution()) {
            for schema in Schema::ALL.into_iter().skip(1) {
                let pattern = schema.pattern().unwrap();
                let instance = instantiate(&pattern, &sigma);
                let recovered = match_axiom(schema, &instance).unwrap().expect("an instance");
                let used: Substitution = sigma
                    .iter()
                    .filter(|(k, _)| pattern.atoms().contains(*k))
                    .map(|(k, v)| (k.clone(), v.clone()))
                    .collect();
                prop_assert_eq!(recovered, used);
            }
        }
    }
}
