//! The bundled library of transformations and conditions that rules are
//! assembled from.

use serde::{Deserialize, Serialize};

use super::{Condition, RuleError, TransformKind, Transformation};

pub const BUNDLED_REGISTRY_VERSION: u32 = 1;

const BUNDLED: &str = include_str!("../../data/registry.json");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Registry {
    pub version: u32,
    pub transformations: Vec<Transformation>,
    pub conditions: Vec<Condition>,
}

impl Registry {
    pub fn from_json(text: &str) -> Result<Registry, RuleError> {
        let r: Registry = serde_json::from_str(text)?;
        if r.transformations.is_empty() || r.conditions.is_empty() {
            return Err(RuleError::Invalid(
                "registry has no transformations or conditions".into(),
            ));
        }
        for t in &r.transformations {
            t.validate()?;
        }
        for c in &r.conditions {
            c.validate()?;
        }
        Ok(r)
    }

    pub fn bundled() -> Registry {
        Registry::from_json(BUNDLED).expect("bundled registry is valid")
    }

    pub fn of_kind(&self, kind: TransformKind) -> impl Iterator<Item = &Transformation> {
        self.transformations.iter().filter(move |t| t.kind == kind)
    }

    pub fn transformation(&self, name: &str) -> Option<&Transformation> {
        self.transformations.iter().find(|t| t.name() == name)
    }
}
