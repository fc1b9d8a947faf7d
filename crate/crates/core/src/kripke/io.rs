use super::{BiModel, Relation, World};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("malformed model document: {0}")]
    Malformed(#[from] serde_json::Error),
    #[error("empty world list")]
    EmptyWorlds,
    #[error("duplicate world {0:?}")]
    DuplicateWorld(String),
    #[error("unknown world {0:?}")]
    UnknownWorld(String),
    #[error("duplicate pair [{0:?}, {1:?}] in {2}")]
    DuplicatePair(String, String, &'static str),
    #[error("duplicate world {1:?} in valuation of {0:?}")]
    DuplicateValuation(String, String),
}

/// On-disk JSON shape of a bi-model.
///
/// ```json
/// {"worlds":["s","t"],"r":[["s","t"]],"rbullet":[["s","t"],["t","t"]],
///  "valuation":{"p":["s"]},"comment":"optional"}
/// ```
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub worlds: Vec<String>,
    #[serde(default)]
    pub r: Vec<[String; 2]>,
    #[serde(default)]
    pub rbullet: Vec<[String; 2]>,
    #[serde(default)]
    pub valuation: BTreeMap<String, Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub comment: Option<String>,
}

impl TryFrom<ModelFile> for BiModel {
    type Error = ModelError;

    fn try_from(file: ModelFile) -> Result<Self, Self::Error> {
        if file.worlds.is_empty() {
            return Err(ModelError::EmptyWorlds);
        }
        let mut index = BTreeMap::new();
        for (i, w) in file.worlds.iter().enumerate() {
            if index.insert(w.as_str(), i).is_some() {
                return Err(ModelError::DuplicateWorld(w.clone()));
            }
        }
        let lookup = |name: &str| -> Result<World, ModelError> {
            index
                .get(name)
                .copied()
                .ok_or_else(|| ModelError::UnknownWorld(name.to_string()))
        };
        let relation = |pairs: &[[String; 2]], label: &'static str| -> Result<Relation, ModelError> {
            let mut rel = Relation::new();
            for [a, b] in pairs {
                if !rel.insert((lookup(a)?, lookup(b)?)) {
                    return Err(ModelError::DuplicatePair(a.clone(), b.clone(), label));
                }
            }
            Ok(rel)
        };
        let r = relation(&file.r, "r")?;
        let rbullet = relation(&file.rbullet, "rbullet")?;
        let mut valuation = BTreeMap::new();
        for (atom, worlds) in &file.valuation {
            let mut ext = BTreeSet::new();
            for w in worlds {
                if !ext.insert(lookup(w)?) {
                    return Err(ModelError::DuplicateValuation(atom.clone(), w.clone()));
                }
            }
            valuation.insert(atom.clone(), ext);
        }
        let model = BiModel::new(file.worlds, r, rbullet, valuation)?;
        Ok(match file.comment {
            Some(c) => model.with_comment(c),
            None => model,
        })
    }
}

impl From<&BiModel> for ModelFile {
    fn from(m: &BiModel) -> Self {
        let pairs = |rel: &Relation| -> Vec<[String; 2]> {
            rel.iter()
                .map(|&(a, b)| [m.world_name(a).to_string(), m.world_name(b).to_string()])
                .collect()
        };
        ModelFile {
            worlds: m.worlds().to_vec(),
            r: pairs(m.r()),
            rbullet: pairs(m.rbullet()),
            valuation: m
                .valuation()
                .iter()
                .map(|(atom, ws)| {
                    (
                        atom.clone(),
                        ws.iter().map(|&w| m.world_name(w).to_string()).collect(),
                    )
                })
                .collect(),
            comment: m.comment().map(str::to_string),
        }
    }
}

impl Serialize for BiModel {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        ModelFile::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for BiModel {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let file = ModelFile::deserialize(deserializer)?;
        BiModel::try_from(file).map_err(serde::de::Error::custom)
    }
}

/// Parses and validates a model document.
pub fn load_model(text: &str) -> Result<BiModel, ModelError> {
    let file: ModelFile = serde_json::from_str(text)?;
    BiModel::try_from(file)
}

impl BiModel {
    /// Serializes to the JSON model format. Pairs are emitted in world
    /// index order.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&ModelFile::from(self)).expect("model serialization cannot fail")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kripke::arb;
    use proptest::prelude::*;

    #[test]
    fn loads_the_documented_example() {
        let m = load_model(
            r#"{"worlds":["s","t"],"r":[["s","t"]],"rbullet":[["s","t"],["t","t"]],"valuation":{"p":["s"]},"comment":"optional"}"#,
        )
        .unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(m.r().len(), 1);
        assert_eq!(m.rbullet().len(), 2);
        assert_eq!(m.holds_atom("p", 0), Some(true));
        assert_eq!(m.comment(), Some("optional"));
    }

    #[test]
    fn rejects_bad_documents() {
        let empty = load_model(r#"{"worlds":[]}"#).unwrap_err();
        assert_eq!(empty.to_string(), "empty world list");

        let dangling = load_model(r#"{"worlds":["s"],"r":[["s","zz"]]}"#).unwrap_err();
        assert!(matches!(&dangling, ModelError::UnknownWorld(w) if w == "zz"));
        assert!(dangling.to_string().starts_with("unknown world"));

        let val = load_model(r#"{"worlds":["s"],"valuation":{"p":["t"]}}"#).unwrap_err();
        assert!(matches!(val, ModelError::UnknownWorld(_)));

        let dup = load_model(r#"{"worlds":["s"],"rbullet":[["s","s"],["s","s"]]}"#).unwrap_err();
        assert!(matches!(dup, ModelError::DuplicatePair(..)));

        assert!(matches!(load_model("{"), Err(ModelError::Malformed(_))));
        assert!(matches!(
            load_model(r#"{"worlds":["s","s"]}"#),
            Err(ModelError::DuplicateWorld(_))
        ));
    }

    proptest! {
        #[test]
        fn json_round_trip(m in arb::bimodel(4)) {
            prop_assert_eq!(load_model(&m.to_json()).unwrap(), m);
        }
    }
}
