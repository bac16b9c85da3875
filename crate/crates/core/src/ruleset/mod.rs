//! Interpretable transformation rules.
//!
//! A [`Rule`] pairs applicability [`Condition`]s with an ordered list of
//! [`Transformation`]s and a selection weight. Rule application is pure and
//! deterministic: each transformation edits the lowest-ranked matching site.

mod edit;
mod features;
mod registry;

use std::fmt;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::descriptors::{basic_descriptors, qed, sa_score, DescriptorRecord};
use crate::molgraph::{Element, Molecule};
use crate::pattern::Pattern;

pub use edit::Action;
pub use features::{
    pharmacophore_atoms, pharmacophore_features, reactive_alert_count, unstable_moiety_count,
    Feature,
};
pub use registry::{Registry, BUNDLED_REGISTRY_VERSION};

#[derive(Debug, Error)]
pub enum RuleError {
    #[error("rule json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Invalid(String),
}

/// A compiled pattern that serializes as its source text. Parsing happens
/// on deserialization so a bad pattern is reported when rules are loaded.
#[derive(Clone)]
pub struct Smarts(Arc<Pattern>);

impl Smarts {
    pub fn new(src: &str) -> Result<Smarts, RuleError> {
        Pattern::parse(src)
            .map(|p| Smarts(Arc::new(p)))
            .map_err(|e| RuleError::Invalid(e.to_string()))
    }

    pub fn pattern(&self) -> &Pattern {
        &self.0
    }

    pub fn as_str(&self) -> &str {
        self.0.as_str()
    }
}

impl fmt::Debug for Smarts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Smarts({:?})", self.as_str())
    }
}

impl PartialEq for Smarts {
    fn eq(&self, other: &Smarts) -> bool {
        self.as_str() == other.as_str()
    }
}

impl Serialize for Smarts {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for Smarts {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Smarts, D::Error> {
        let src = String::deserialize(d)?;
        Smarts::new(&src).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    Structural,
    Physicochemical,
    Pharmacological,
    Stability,
    DrugLikeness,
    Advanced,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Property {
    Mw,
    Logp,
    Tpsa,
    Hbd,
    Hba,
    RotatableBonds,
    HeavyAtoms,
    Qed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum ConditionKind {
    HasSubstructure { pattern: Smarts },
    LacksSubstructure { pattern: Smarts },
    MinRings { count: usize },
    MinAromaticRings { count: usize },
    MaxAromaticRings { count: usize },
    PropertyBelow { property: Property, threshold: f64 },
    PropertyAbove { property: Property, threshold: f64 },
    HasFeature { feature: Feature },
    MinFeatures { count: usize },
    NoUnstableMoiety {},
    LipinskiPass {},
    VeberPass {},
    SaBelow { threshold: f64 },
}

impl ConditionKind {
    fn category(&self) -> Category {
        use ConditionKind::*;
        match self {
            HasSubstructure { .. }
            | LacksSubstructure { .. }
            | MinRings { .. }
            | MinAromaticRings { .. }
            | MaxAromaticRings { .. } => Category::Structural,
            PropertyBelow { .. } | PropertyAbove { .. } => Category::Physicochemical,
            HasFeature { .. } | MinFeatures { .. } => Category::Pharmacological,
            NoUnstableMoiety {} => Category::Stability,
            LipinskiPass {} | VeberPass {} => Category::DrugLikeness,
            SaBelow { .. } => Category::Advanced,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Condition {
    pub category: Category,
    #[serde(flatten)]
    pub kind: ConditionKind,
}

impl Condition {
    pub fn new(kind: ConditionKind) -> Condition {
        Condition {
            category: kind.category(),
            kind,
        }
    }

    pub fn validate(&self) -> Result<(), RuleError> {
        if self.kind.category() != self.category {
            return Err(RuleError::Invalid(format!(
                "condition {:?} does not belong to category {:?}",
                self.kind, self.category
            )));
        }
        if let ConditionKind::PropertyBelow { threshold, .. }
        | ConditionKind::PropertyAbove { threshold, .. }
        | ConditionKind::SaBelow { threshold } = &self.kind
        {
            if !threshold.is_finite() {
                return Err(RuleError::Invalid("non-finite threshold".into()));
            }
        }
        Ok(())
    }

    pub fn eval(&self, facts: &MolFacts) -> bool {
        use ConditionKind::*;
        let m = facts.mol;
        match &self.kind {
            HasSubstructure { pattern } => pattern.pattern().matches(m),
            LacksSubstructure { pattern } => !pattern.pattern().matches(m),
            MinRings { count } => m.rings().len() >= *count,
            MinAromaticRings { count } => m.aromatic_ring_count() >= *count,
            MaxAromaticRings { count } => m.aromatic_ring_count() <= *count,
            PropertyBelow {
                property,
                threshold,
            } => facts.property(*property) < *threshold,
            PropertyAbove {
                property,
                threshold,
            } => facts.property(*property) > *threshold,
            HasFeature { feature } => facts.features()[*feature as usize],
            MinFeatures { count } => facts.features().iter().filter(|&&f| f).count() >= *count,
            NoUnstableMoiety {} => unstable_moiety_count(m) == 0,
            LipinskiPass {} => lipinski_pass(m, facts.descriptors()),
            VeberPass {} => {
                let d = facts.descriptors();
                d.rotatable_bonds <= 10 && d.tpsa <= 140.0
            }
            SaBelow { threshold } => facts.sa() < *threshold,
        }
    }
}

/// Lipinski's four thresholds, counting acceptors as N plus O atoms.
pub fn lipinski_pass(m: &Molecule, d: &DescriptorRecord) -> bool {
    let n_plus_o = m
        .atoms()
        .iter()
        .filter(|a| matches!(a.element, Element::N | Element::O))
        .count();
    d.mw <= 500.0 && d.logp <= 5.0 && d.hbd <= 5 && n_plus_o <= 10
}

/// Lazily computed molecular properties shared by several conditions.
pub struct MolFacts<'a> {
    mol: &'a Molecule,
    descriptors: OnceLock<DescriptorRecord>,
    qed: OnceLock<f64>,
    sa: OnceLock<f64>,
    features: OnceLock<[bool; 4]>,
}

impl<'a> MolFacts<'a> {
    pub fn new(mol: &'a Molecule) -> MolFacts<'a> {
        MolFacts {
            mol,
            descriptors: OnceLock::new(),
            qed: OnceLock::new(),
            sa: OnceLock::new(),
            features: OnceLock::new(),
        }
    }

    pub fn descriptors(&self) -> &DescriptorRecord {
        self.descriptors.get_or_init(|| basic_descriptors(self.mol))
    }

    fn sa(&self) -> f64 {
        *self.sa.get_or_init(|| sa_score(self.mol))
    }

    fn features(&self) -> &[bool; 4] {
        self.features
            .get_or_init(|| pharmacophore_features(self.mol))
    }

    fn property(&self, p: Property) -> f64 {
        let d = self.descriptors();
        match p {
            Property::Mw => d.mw,
            Property::Logp => d.logp,
            Property::Tpsa => d.tpsa,
            Property::Hbd => d.hbd as f64,
            Property::Hba => d.hba as f64,
            Property::RotatableBonds => d.rotatable_bonds as f64,
            Property::HeavyAtoms => d.heavy_atoms as f64,
            Property::Qed => *self.qed.get_or_init(|| qed(self.mol)),
        }
    }
}

pub fn eval_condition(c: &Condition, m: &Molecule) -> bool {
    c.eval(&MolFacts::new(m))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransformKind {
    GroupAddition,
    AtomSubstitution,
    GroupModification,
    GroupRemoval,
    RingAddition,
    RingSaturationChange,
    RingResize,
}

impl TransformKind {
    pub const ALL: [TransformKind; 7] = [
        TransformKind::GroupAddition,
        TransformKind::AtomSubstitution,
        TransformKind::GroupModification,
        TransformKind::GroupRemoval,
        TransformKind::RingAddition,
        TransformKind::RingSaturationChange,
        TransformKind::RingResize,
    ];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransformParams {
    pub name: String,
    /// Pattern whose first atom is the anchor used for site ranking.
    pub site: Smarts,
    pub actions: Vec<Action>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transformation {
    pub kind: TransformKind,
    pub params: TransformParams,
}

impl Transformation {
    pub fn name(&self) -> &str {
        &self.params.name
    }

    pub fn validate(&self) -> Result<(), RuleError> {
        if self.params.actions.is_empty() {
            return Err(RuleError::Invalid(format!("{}: no actions", self.name())));
        }
        let n = self.params.site.pattern().num_atoms();
        for a in &self.params.actions {
            a.validate(n)
                .map_err(|e| RuleError::Invalid(format!("{}: {e}", self.name())))?;
        }
        Ok(())
    }
}

/// Site mapping with the lowest canonical ranks, compared anchor first.
fn lowest_site(t: &Transformation, m: &Molecule) -> Option<Vec<usize>> {
    let ranks = m.canonical_ranks();
    t.params
        .site
        .pattern()
        .mappings(m)
        .into_iter()
        .min_by_key(|map| map.iter().map(|&a| ranks[a]).collect::<Vec<_>>())
}

/// Applies the edit at the lowest-ranked matching site. `None` when no site
/// matches, the edit cannot be carried out, the product is invalid or
/// disconnected, or nothing changed.
pub fn apply_transformation(t: &Transformation, m: &Molecule) -> Option<Molecule> {
    let site = lowest_site(t, m)?;
    let out = edit::execute(&t.params.actions, m, &site)?;
    (out.canonical_smiles() != m.canonical_smiles()).then_some(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rule {
    #[serde(default)]
    pub id: u64,
    pub conditions: Vec<Condition>,
    pub transformations: Vec<Transformation>,
    pub weight: f64,
}

impl Rule {
    pub fn validate(&self) -> Result<(), RuleError> {
        if self.conditions.is_empty() || self.transformations.is_empty() {
            return Err(RuleError::Invalid(format!(
                "rule {} needs at least one condition and one transformation",
                self.id
            )));
        }
        if !self.weight.is_finite() || self.weight < 0.0 {
            return Err(RuleError::Invalid(format!(
                "rule {} has weight {}",
                self.id, self.weight
            )));
        }
        for c in &self.conditions {
            c.validate()?;
        }
        for t in &self.transformations {
            t.validate()?;
        }
        Ok(())
    }

    pub fn applicable(&self, facts: &MolFacts) -> bool {
        self.conditions.iter().all(|c| c.eval(facts))
    }

    /// Same content, ignoring id and weight.
    pub fn same_genes(&self, other: &Rule) -> bool {
        self.conditions == other.conditions && self.transformations == other.transformations
    }
}

/// Checks conditions on `m`, then threads `m` through every transformation.
pub fn apply_rule(r: &Rule, m: &Molecule) -> Option<Molecule> {
    if !r.applicable(&MolFacts::new(m)) {
        return None;
    }
    apply_transformations(r, m)
}

/// The transformation chain alone, for callers that already checked the
/// conditions.
pub fn apply_transformations(r: &Rule, m: &Molecule) -> Option<Molecule> {
    let mut cur: Option<Molecule> = None;
    for t in &r.transformations {
        let next = apply_transformation(t, cur.as_ref().unwrap_or(m))?;
        cur = Some(next);
    }
    cur
}

pub fn rules_to_json(rules: &[Rule]) -> String {
    serde_json::to_string_pretty(rules).expect("rules serialize")
}

pub fn rules_from_json(text: &str) -> Result<Vec<Rule>, RuleError> {
    let rules: Vec<Rule> = serde_json::from_str(text)?;
    for r in &rules {
        r.validate()?;
    }
    Ok(rules)
}

#[cfg(test)]
mod tests;
