use super::Formula;

/// Size and `IR`-depth of a formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Measure {
    pub size: usize,
    pub ir_depth: usize,
}

impl Measure {
    pub fn of(f: &Formula) -> Measure {
        Measure {
            size: size(f),
            ir_depth: ir_depth(f),
        }
    }

    /// Sort key for the well-founded order: depth first, then size.
    pub fn key(self) -> (usize, usize) {
        (self.ir_depth, self.size)
    }
}

/// Number of atoms and connectives. Every binary connective and every
/// modal operator (including `K`) adds one. `Kw φ` is measured as `~I φ`.
pub fn size(f: &Formula) -> usize {
    use Formula::*;
    match f {
        Atom(_) | Bottom => 1,
        Not(a) | Ig(a) | RIg(a) | Box(a) => 1 + size(a),
        Kw(a) => 2 + size(a),
        And(a, b) | Or(a, b) | Implies(a, b) | Iff(a, b) => size(a) + size(b) + 1,
    }
}

/// Nesting depth of `IR`. `I`, `K` and the boolean connectives are
/// transparent; binary connectives take the maximum.
pub fn ir_depth(f: &Formula) -> usize {
    use Formula::*;
    match f {
        Atom(_) | Bottom => 0,
        Not(a) | Ig(a) | Box(a) | Kw(a) => ir_depth(a),
        RIg(a) => 1 + ir_depth(a),
        And(a, b) | Or(a, b) | Implies(a, b) | Iff(a, b) => ir_depth(a).max(ir_depth(b)),
    }
}

/// `a` precedes `b` when it has smaller `IR`-depth, or equal depth and
/// smaller size.
pub fn order_lt(a: &Formula, b: &Formula) -> bool {
    Measure::of(a).key() < Measure::of(b).key()
}
