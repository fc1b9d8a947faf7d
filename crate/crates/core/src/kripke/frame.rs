use super::Relation;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

/// First-order property of a single accessibility relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FrameProperty {
    Reflexive,
    Transitive,
    Serial,
    Symmetric,
    Euclidean,
}

impl FrameProperty {
    pub const ALL: [FrameProperty; 5] = [
        FrameProperty::Reflexive,
        FrameProperty::Transitive,
        FrameProperty::Serial,
        FrameProperty::Symmetric,
        FrameProperty::Euclidean,
    ];

    fn bit(self) -> u8 {
        1 << self as u8
    }

    pub fn name(self) -> &'static str {
        match self {
            FrameProperty::Reflexive => "reflexive",
            FrameProperty::Transitive => "transitive",
            FrameProperty::Serial => "serial",
            FrameProperty::Symmetric => "symmetric",
            FrameProperty::Euclidean => "euclidean",
        }
    }

    /// Checks the property on a relation over worlds `0..n`.
    pub fn holds(self, n: usize, rel: &Relation) -> bool {
        let has = |a: usize, b: usize| rel.contains(&(a, b));
        match self {
            FrameProperty::Reflexive => (0..n).all(|w| has(w, w)),
            FrameProperty::Serial => (0..n).all(|w| (0..n).any(|v| has(w, v))),
            FrameProperty::Symmetric => rel.iter().all(|&(a, b)| has(b, a)),
            FrameProperty::Transitive => rel
                .iter()
                .all(|&(a, b)| (0..n).all(|c| !has(b, c) || has(a, c))),
            FrameProperty::Euclidean => rel
                .iter()
                .all(|&(a, b)| (0..n).all(|c| !has(a, c) || has(b, c))),
        }
    }

    /// Checks the property on successor bitmasks (`succ[w]` has bit `v` set
    /// iff `w` reaches `v`). Supports up to 64 worlds.
    pub fn holds_bits(self, succ: &[u64]) -> bool {
        let n = succ.len();
        match self {
            FrameProperty::Reflexive => (0..n).all(|w| succ[w] >> w & 1 == 1),
            FrameProperty::Serial => succ.iter().all(|&s| s != 0),
            FrameProperty::Symmetric => {
                (0..n).all(|w| bits(succ[w]).all(|v| succ[v] >> w & 1 == 1))
            }
            FrameProperty::Transitive => {
                (0..n).all(|w| bits(succ[w]).all(|v| succ[v] & !succ[w] == 0))
            }
            FrameProperty::Euclidean => {
                (0..n).all(|w| bits(succ[w]).all(|v| succ[w] & !succ[v] == 0))
            }
        }
    }
}

fn bits(mut set: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if set == 0 {
            None
        } else {
            let v = set.trailing_zeros() as usize;
            set &= set - 1;
            Some(v)
        }
    })
}

impl FromStr for FrameProperty {
    type Err = FrameClassParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FrameProperty::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| FrameClassParseError(format!("unknown frame property {s:?}")))
    }
}

/// A set of [`FrameProperty`] values.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct PropertySet(u8);

impl PropertySet {
    pub fn empty() -> PropertySet {
        PropertySet(0)
    }

    pub fn with(self, p: FrameProperty) -> PropertySet {
        PropertySet(self.0 | p.bit())
    }

    pub fn contains(self, p: FrameProperty) -> bool {
        self.0 & p.bit() != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = FrameProperty> {
        FrameProperty::ALL.into_iter().filter(move |&p| self.contains(p))
    }
}

impl FromIterator<FrameProperty> for PropertySet {
    fn from_iter<I: IntoIterator<Item = FrameProperty>>(iter: I) -> Self {
        iter.into_iter().fold(PropertySet::empty(), PropertySet::with)
    }
}

/// Inclusion constraint between `R` and `R•`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Inclusion {
    #[default]
    None,
    /// `R ⊆ R•`, the "proper" bi-frames.
    RSubRBullet,
    /// `R• ⊆ R`.
    RBulletSubR,
    /// `R = R•`.
    Equal,
}

impl Inclusion {
    pub fn holds(self, r: &Relation, rbullet: &Relation) -> bool {
        match self {
            Inclusion::None => true,
            Inclusion::RSubRBullet => r.is_subset(rbullet),
            Inclusion::RBulletSubR => rbullet.is_subset(r),
            Inclusion::Equal => r == rbullet,
        }
    }

    /// Admissible `(in R, in R•)` memberships for a single ordered pair.
    pub fn pair_states(self) -> &'static [(bool, bool)] {
        match self {
            Inclusion::None => &[(false, false), (false, true), (true, false), (true, true)],
            Inclusion::RSubRBullet => &[(false, false), (false, true), (true, true)],
            Inclusion::RBulletSubR => &[(false, false), (true, false), (true, true)],
            Inclusion::Equal => &[(false, false), (true, true)],
        }
    }

    fn name(self) -> &'static str {
        match self {
            Inclusion::None => "all",
            Inclusion::RSubRBullet => "proper",
            Inclusion::RBulletSubR => "bullet-sub",
            Inclusion::Equal => "equal",
        }
    }
}

/// Class of bi-frames: per-relation properties and an inclusion constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct FrameClass {
    pub r: PropertySet,
    pub rbullet: PropertySet,
    pub inclusion: Inclusion,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{0}")]
pub struct FrameClassParseError(pub String);

impl FrameClass {
    /// Every bi-frame.
    pub fn all() -> FrameClass {
        FrameClass::default()
    }

    pub fn with_inclusion(inclusion: Inclusion) -> FrameClass {
        FrameClass {
            inclusion,
            ..FrameClass::default()
        }
    }

    /// `R ⊆ R•`.
    pub fn proper() -> FrameClass {
        FrameClass::with_inclusion(Inclusion::RSubRBullet)
    }

    /// Proper bi-frames whose relations are both reflexive and transitive.
    pub fn s4_proper() -> FrameClass {
        FrameClass::proper()
            .require_both(FrameProperty::Reflexive)
            .require_both(FrameProperty::Transitive)
    }

    pub fn require_r(mut self, p: FrameProperty) -> FrameClass {
        self.r = self.r.with(p);
        self
    }

    pub fn require_rbullet(mut self, p: FrameProperty) -> FrameClass {
        self.rbullet = self.rbullet.with(p);
        self
    }

    pub fn require_both(self, p: FrameProperty) -> FrameClass {
        self.require_r(p).require_rbullet(p)
    }
}

impl fmt::Display for FrameClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.inclusion.name())?;
        for p in FrameProperty::ALL {
            match (self.r.contains(p), self.rbullet.contains(p)) {
                (true, true) => write!(f, ",{}", p.name())?,
                (true, false) => write!(f, ",{}-r", p.name())?,
                (false, true) => write!(f, ",{}-rb", p.name())?,
                (false, false) => {}
            }
        }
        Ok(())
    }
}

impl FromStr for FrameClass {
    type Err = FrameClassParseError;

    /// Comma-joined tokens. The optional base token is one of `all`,
    /// `proper`, `bullet-sub`, `equal`, `s4-proper`. Property tokens are
    /// `<property>` (both relations), `<property>-r`, `<property>-rb`, or
    /// `s4` (reflexive and transitive on both).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut class = FrameClass::all();
        let mut base_seen = false;
        for token in s.split(',').map(str::trim) {
            let inclusion = match token {
                "all" => Some(Inclusion::None),
                "proper" => Some(Inclusion::RSubRBullet),
                "bullet-sub" => Some(Inclusion::RBulletSubR),
                "equal" => Some(Inclusion::Equal),
                _ => None,
            };
            if let Some(inclusion) = inclusion {
                if base_seen {
                    return Err(FrameClassParseError(format!(
                        "more than one inclusion constraint in {s:?}"
                    )));
                }
                base_seen = true;
                class.inclusion = inclusion;
                continue;
            }
            match token {
                "s4" => {
                    class = class
                        .require_both(FrameProperty::Reflexive)
                        .require_both(FrameProperty::Transitive);
                }
                "s4-proper" => {
                    if base_seen {
                        return Err(FrameClassParseError(format!(
                            "more than one inclusion constraint in {s:?}"
                        )));
                    }
                    base_seen = true;
                    let s4 = FrameClass::s4_proper();
                    class.inclusion = s4.inclusion;
                    class.r = class.r.iter().chain(s4.r.iter()).collect();
                    class.rbullet = class.rbullet.iter().chain(s4.rbullet.iter()).collect();
                }
                _ => {
                    if let Some(name) = token.strip_suffix("-rb") {
                        class = class.require_rbullet(name.parse()?);
                    } else if let Some(name) = token.strip_suffix("-r") {
                        class = class.require_r(name.parse()?);
                    } else if token.is_empty() {
                        return Err(FrameClassParseError("empty frame class token".into()));
                    } else {
                        class = class.require_both(token.parse()?);
                    }
                }
            }
        }
        Ok(class)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kripke::arb;
    use proptest::prelude::*;

    #[test]
    fn class_syntax() {
        assert_eq!("proper".parse::<FrameClass>().unwrap(), FrameClass::proper());
        assert_eq!("s4-proper".parse::<FrameClass>().unwrap(), FrameClass::s4_proper());
        assert_eq!(
            "proper,reflexive,transitive".parse::<FrameClass>().unwrap(),
            FrameClass::s4_proper()
        );
        let mixed: FrameClass = "proper,transitive-r,serial-rb".parse().unwrap();
        assert!(mixed.r.contains(FrameProperty::Transitive));
        assert!(!mixed.rbullet.contains(FrameProperty::Transitive));
        assert!(mixed.rbullet.contains(FrameProperty::Serial));
        assert_eq!(mixed.to_string(), "proper,transitive-r,serial-rb");
        assert!("proper,equal".parse::<FrameClass>().is_err());
        assert!("proper,blue".parse::<FrameClass>().is_err());
    }

    #[test]
    fn display_round_trips() {
        for text in ["all", "bullet-sub,reflexive-r", "equal,serial,euclidean-rb", "proper,reflexive,transitive"] {
            let class: FrameClass = text.parse().unwrap();
            assert_eq!(class.to_string().parse::<FrameClass>().unwrap(), class);
        }
    }

    proptest! {
        #[test]
        fn bitmask_checks_agree_with_pair_checks(m in arb::bimodel(5)) {
            let n = m.len();
            let mut succ = vec![0u64; n];
            for &(a, b) in m.r() {
                succ[a] |= 1 << b;
            }
            for p in FrameProperty::ALL {
                prop_assert_eq!(p.holds_bits(&succ), p.holds(n, m.r()), "{:?}", p);
            }
        }
    }
}
