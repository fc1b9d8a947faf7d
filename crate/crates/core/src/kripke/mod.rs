//! Finite bi-models: a set of worlds with two accessibility relations,
//! `R` (for the knowledge implicit in `I`) and `R•` (for `IR` and `K`),
//! plus a valuation.

mod frame;
mod io;

use std::collections::{BTreeMap, BTreeSet};

pub use frame::{FrameClass, FrameClassParseError, FrameProperty, Inclusion, PropertySet};
pub use io::{load_model, ModelError, ModelFile};

/// Index of a world within its model's world list.
pub type World = usize;

/// A binary relation over world indices.
pub type Relation = BTreeSet<(World, World)>;

/// Which accessibility relation an operation applies to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Which {
    R,
    RBullet,
    Both,
}

impl Which {
    fn includes_r(self) -> bool {
        matches!(self, Which::R | Which::Both)
    }

    fn includes_rbullet(self) -> bool {
        matches!(self, Which::RBullet | Which::Both)
    }
}

impl std::str::FromStr for Which {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "r" | "R" => Ok(Which::R),
            "rb" | "rbullet" | "R•" => Ok(Which::RBullet),
            "both" => Ok(Which::Both),
            other => Err(format!("unknown relation selector {other:?} (expected r, rb or both)")),
        }
    }
}

/// A finite bi-model. Worlds are addressed by index; names are kept for
/// I/O and printing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BiModel {
    worlds: Vec<String>,
    r: Relation,
    rbullet: Relation,
    valuation: BTreeMap<String, BTreeSet<World>>,
    comment: Option<String>,
}

impl BiModel {
    /// Builds a model from world names and index-based relations.
    ///
    /// Fails on an empty or duplicated world list or an out-of-range index.
    pub fn new(
        worlds: Vec<String>,
        r: Relation,
        rbullet: Relation,
        valuation: BTreeMap<String, BTreeSet<World>>,
    ) -> Result<BiModel, ModelError> {
        if worlds.is_empty() {
            return Err(ModelError::EmptyWorlds);
        }
        let mut seen = BTreeSet::new();
        for w in &worlds {
            if !seen.insert(w) {
                return Err(ModelError::DuplicateWorld(w.clone()));
            }
        }
        let n = worlds.len();
        let in_range = |&(a, b): &(World, World)| a < n && b < n;
        if let Some(&(a, b)) = r.iter().chain(rbullet.iter()).find(|p| !in_range(p)) {
            return Err(ModelError::UnknownWorld(format!("#{}", a.max(b))));
        }
        if let Some(&w) = valuation.values().flatten().find(|&&w| w >= n) {
            return Err(ModelError::UnknownWorld(format!("#{w}")));
        }
        Ok(BiModel {
            worlds,
            r,
            rbullet,
            valuation,
            comment: None,
        })
    }

    /// Builds a model from world names, relation pairs given by name, and a
    /// valuation by name.
    pub fn from_names(
        worlds: &[&str],
        r: &[(&str, &str)],
        rbullet: &[(&str, &str)],
        valuation: &[(&str, &[&str])],
    ) -> Result<BiModel, ModelError> {
        let file = ModelFile {
            worlds: worlds.iter().map(|w| w.to_string()).collect(),
            r: r.iter().map(|&(a, b)| [a.to_string(), b.to_string()]).collect(),
            rbullet: rbullet
                .iter()
                .map(|&(a, b)| [a.to_string(), b.to_string()])
                .collect(),
            valuation: valuation
                .iter()
                .map(|&(p, ws)| (p.to_string(), ws.iter().map(|w| w.to_string()).collect()))
                .collect(),
            comment: None,
        };
        BiModel::try_from(file)
    }

    pub fn worlds(&self) -> &[String] {
        &self.worlds
    }

    pub fn len(&self) -> usize {
        self.worlds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.worlds.is_empty()
    }

    pub fn world_index(&self, name: &str) -> Option<World> {
        self.worlds.iter().position(|w| w == name)
    }

    pub fn world_name(&self, w: World) -> &str {
        &self.worlds[w]
    }

    pub fn r(&self) -> &Relation {
        &self.r
    }

    pub fn rbullet(&self) -> &Relation {
        &self.rbullet
    }

    pub fn relation(&self, which: Which) -> Relation {
        match which {
            Which::R => self.r.clone(),
            Which::RBullet => self.rbullet.clone(),
            Which::Both => self.r.union(&self.rbullet).copied().collect(),
        }
    }

    pub fn valuation(&self) -> &BTreeMap<String, BTreeSet<World>> {
        &self.valuation
    }

    pub fn comment(&self) -> Option<&str> {
        self.comment.as_deref()
    }

    pub fn with_comment(mut self, comment: impl Into<String>) -> BiModel {
        self.comment = Some(comment.into());
        self
    }

    /// Declared proposition names.
    pub fn atoms(&self) -> impl Iterator<Item = &str> {
        self.valuation.keys().map(String::as_str)
    }

    pub fn holds_atom(&self, atom: &str, w: World) -> Option<bool> {
        self.valuation.get(atom).map(|ws| ws.contains(&w))
    }

    /// Successors of `w` under `R`, in index order.
    pub fn r_successors(&self, w: World) -> impl Iterator<Item = World> + '_ {
        successors(&self.r, w)
    }

    /// Successors of `w` under `R•`, in index order.
    pub fn rbullet_successors(&self, w: World) -> impl Iterator<Item = World> + '_ {
        successors(&self.rbullet, w)
    }

    fn map_relations(&self, which: Which, f: impl Fn(usize, &Relation) -> Relation) -> BiModel {
        let mut out = self.clone();
        if which.includes_r() {
            out.r = f(self.len(), &self.r);
        }
        if which.includes_rbullet() {
            out.rbullet = f(self.len(), &self.rbullet);
        }
        out
    }

    /// Adds every self-loop to the selected relation(s).
    pub fn reflexive_closure(&self, which: Which) -> BiModel {
        self.map_relations(which, |n, rel| {
            let mut rel = rel.clone();
            rel.extend((0..n).map(|w| (w, w)));
            rel
        })
    }

    /// Adds a self-loop at every world that has no successor under the
    /// selected relation(s). With `Both`, each relation is treated on its own.
    pub fn reflexivize_endpoints(&self, which: Which) -> BiModel {
        self.map_relations(which, |n, rel| {
            let mut out = rel.clone();
            for w in 0..n {
                if successors(rel, w).next().is_none() {
                    out.insert((w, w));
                }
            }
            out
        })
    }

    /// Replaces the selected relation(s) by their transitive closure.
    pub fn transitive_closure(&self, which: Which) -> BiModel {
        self.map_relations(which, |n, rel| {
            let mut reach = vec![vec![false; n]; n];
            for &(a, b) in rel {
                reach[a][b] = true;
            }
            for k in 0..n {
                for i in 0..n {
                    if reach[i][k] {
                        for j in 0..n {
                            if reach[k][j] {
                                reach[i][j] = true;
                            }
                        }
                    }
                }
            }
            (0..n)
                .flat_map(|i| (0..n).map(move |j| (i, j)))
                .filter(|&(i, j)| reach[i][j])
                .collect()
        })
    }

    /// True iff both relations have their listed properties and the
    /// inclusion constraint holds.
    pub fn check_frame_property(&self, class: &FrameClass) -> bool {
        let n = self.len();
        class.r.iter().all(|p| p.holds(n, &self.r))
            && class.rbullet.iter().all(|p| p.holds(n, &self.rbullet))
            && class.inclusion.holds(&self.r, &self.rbullet)
    }
}

fn successors(rel: &Relation, w: World) -> impl Iterator<Item = World> + '_ {
    rel.range((w, 0)..(w + 1, 0)).map(|&(_, b)| b)
}

/// Checks the model against a frame class; free-function form.
pub fn check_frame_property(m: &BiModel, class: &FrameClass) -> bool {
    m.check_frame_property(class)
}

#[cfg(test)]
pub(crate) mod arb {
    use super::*;
    use proptest::prelude::*;

    /// Random bi-models with 1..=max_worlds worlds over atoms `p` and `q`.
    pub fn bimodel(max_worlds: usize) -> impl Strategy<Value = BiModel> {
        (1..=max_worlds)
            .prop_flat_map(|n| {
                let pairs = n * n;
                (
                    Just(n),
                    prop::collection::vec(any::<bool>(), pairs),
                    prop::collection::vec(any::<bool>(), pairs),
                    prop::collection::vec(any::<bool>(), n),
                    prop::collection::vec(any::<bool>(), n),
                )
            })
            .prop_map(|(n, r_bits, rb_bits, p_bits, q_bits)| {
                let rel = |bits: &[bool]| -> Relation {
                    (0..n * n)
                        .filter(|&k| bits[k])
                        .map(|k| (k / n, k % n))
                        .collect()
                };
                let ext = |bits: &[bool]| -> BTreeSet<World> {
                    (0..n).filter(|&w| bits[w]).collect()
                };
                let mut valuation = BTreeMap::new();
                valuation.insert("p".to_string(), ext(&p_bits));
                valuation.insert("q".to_string(), ext(&q_bits));
                BiModel::new(
                    (0..n).map(|w| format!("w{w}")).collect(),
                    rel(&r_bits),
                    rel(&rb_bits),
                    valuation,
                )
                .unwrap()
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn names(m: &BiModel, rel: &Relation) -> Vec<(String, String)> {
        rel.iter()
            .map(|&(a, b)| (m.world_name(a).to_string(), m.world_name(b).to_string()))
            .collect()
    }

    fn pairs(list: &[(&str, &str)]) -> Vec<(String, String)> {
        list.iter()
            .map(|&(a, b)| (a.to_string(), b.to_string()))
            .collect()
    }

    fn prop3ii() -> BiModel {
        BiModel::from_names(
            &["x", "y", "z"],
            &[("x", "y"), ("x", "z")],
            &[],
            &[("p", &["y"])],
        )
        .unwrap()
    }

    #[test]
    fn prop3ii_frame_classes() {
        let m = prop3ii();
        assert!(!m.check_frame_property(&FrameClass::proper()));
        assert!(m.check_frame_property(&FrameClass::with_inclusion(Inclusion::RBulletSubR)));
    }

    #[test]
    fn reflexive_closure_examples() {
        let m = BiModel::from_names(&["a", "b"], &[], &[], &[]).unwrap();
        let closed = m.reflexive_closure(Which::R);
        assert_eq!(names(&closed, closed.r()), pairs(&[("a", "a"), ("b", "b")]));
        assert!(closed.rbullet().is_empty());
        assert_eq!(closed.reflexive_closure(Which::R), closed);
        let both = m.reflexive_closure(Which::Both);
        let refl = FrameClass::all().require_both(FrameProperty::Reflexive);
        assert!(both.check_frame_property(&refl));
    }

    #[test]
    fn endpoints_get_self_loops() {
        let m = BiModel::from_names(&["a", "b"], &[("a", "b")], &[], &[]).unwrap();
        let out = m.reflexivize_endpoints(Which::R);
        assert_eq!(names(&out, out.r()), pairs(&[("a", "b"), ("b", "b")]));

        let rb = prop3ii().reflexivize_endpoints(Which::RBullet);
        // Every world is an R•-endpoint because R• is empty.
        let scan: Vec<_> = (0..3)
            .filter(|&w| prop3ii().rbullet_successors(w).next().is_none())
            .collect();
        assert_eq!(scan, vec![0, 1, 2]);
        assert_eq!(names(&rb, rb.rbullet()), pairs(&[("x", "x"), ("y", "y"), ("z", "z")]));
        assert_eq!(rb.r(), prop3ii().r());
    }

    #[test]
    fn serial_relation_unchanged_by_endpoint_loops() {
        let m = BiModel::from_names(&["a", "b"], &[("a", "b"), ("b", "a")], &[], &[]).unwrap();
        assert_eq!(m.reflexivize_endpoints(Which::R).r(), m.r());
    }

    #[test]
    fn transitive_closure_examples() {
        let m = BiModel::from_names(&["a", "b", "c"], &[("a", "b"), ("b", "c")], &[], &[]).unwrap();
        let t = m.transitive_closure(Which::R);
        assert_eq!(
            names(&t, t.r()),
            pairs(&[("a", "b"), ("a", "c"), ("b", "c")])
        );
        assert_eq!(t.transitive_closure(Which::R), t);

        let cycle =
            BiModel::from_names(&["a", "b", "c"], &[("a", "b"), ("b", "c"), ("c", "a")], &[], &[])
                .unwrap();
        let closed = cycle.transitive_closure(Which::R);
        // Reachability by breadth-first search from each world.
        let mut expected = Relation::new();
        for start in 0..3 {
            let mut frontier = vec![start];
            let mut seen = BTreeSet::new();
            while let Some(w) = frontier.pop() {
                for v in cycle.r_successors(w) {
                    if seen.insert(v) {
                        frontier.push(v);
                    }
                }
            }
            expected.extend(seen.into_iter().map(|v| (start, v)));
        }
        assert_eq!(expected.len(), 9);
        assert_eq!(closed.r(), &expected);
    }

    proptest! {
        #[test]
        fn closures_are_monotone_and_idempotent(m in arb::bimodel(4)) {
            for which in [Which::R, Which::RBullet, Which::Both] {
                let ops: [fn(&BiModel, Which) -> BiModel; 3] = [
                    BiModel::reflexive_closure,
                    BiModel::reflexivize_endpoints,
                    BiModel::transitive_closure,
                ];
                for op in ops {
                    let once = op(&m, which);
                    prop_assert!(once.r().is_superset(m.r()));
                    prop_assert!(once.rbullet().is_superset(m.rbullet()));
                    prop_assert_eq!(op(&once, which), once.clone());
                    prop_assert_eq!(once.valuation(), m.valuation());
                }
            }
        }

        #[test]
        fn reflexive_closure_preserves_proper_inclusion(m in arb::bimodel(4)) {
            let proper = FrameClass::proper();
            if m.check_frame_property(&proper) {
                prop_assert!(m.reflexive_closure(Which::Both).check_frame_property(&proper));
            }
        }

        #[test]
        fn proper_means_literal_containment(m in arb::bimodel(4)) {
            let contained = m.r().iter().all(|p| m.rbullet().contains(p));
            prop_assert_eq!(m.check_frame_property(&FrameClass::proper()), contained);
        }

        #[test]
        fn reflexive_closure_is_reflexive(m in arb::bimodel(4)) {
            let refl = FrameClass::all().require_both(FrameProperty::Reflexive);
            prop_assert!(m.reflexive_closure(Which::Both).check_frame_property(&refl));
        }
    }
}
