//! Fixed pattern vocabularies: unstable moieties, reactive alerts and the
//! four pharmacophore feature classes.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::molgraph::Molecule;
use crate::pattern::Pattern;

const UNSTABLE: [&str; 12] = [
    "[OX2][OX2]",
    "[CX4]([OX2H])[OX2H]",
    "[CX3](=O)[F,Cl,Br,I]",
    "[CX4]([OX2H])[OX2][#6]",
    "[CX3](=O)[OX2][CX3]=O",
    "N=[N+]=[N-]",
    "[#6]=[N+]=[N-]",
    "[CX3]=[CX3][OX2H]",
    "[SX2][SX2]",
    "[S](=O)(=O)[F,Cl,Br,I]",
    "N=C=O",
    "[O,N,S;r3]",
];

const REACTIVE: [&str; 8] = [
    "[CX3H1](=O)[#6]",
    "[CX4][Cl,Br,I]",
    "[CX3]=[CX3][CX3]=O",
    "[SX2H]",
    "[#6][NX2]=O",
    "[#6]N=N[#6]",
    "N=C=[O,S]",
    "[CX3](=O)[F,Cl,Br,I]",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Feature {
    Donor = 0,
    Acceptor = 1,
    Aromatic = 2,
    Hydrophobe = 3,
}

impl Feature {
    pub const ALL: [Feature; 4] = [
        Feature::Donor,
        Feature::Acceptor,
        Feature::Aromatic,
        Feature::Hydrophobe,
    ];

    fn pattern_src(self) -> &'static str {
        match self {
            Feature::Donor => "[#7,#8;!H0]",
            Feature::Acceptor => "[$([#8;!$([#8]~[#7+])]),$([#7;X2;!$([#7]=[#8])]),$([#7;X1])]",
            Feature::Aromatic => "a",
            Feature::Hydrophobe => "[$([CH3][#6]),$([Cl,Br,I]),$([CH2;X4]([#6;!$([#6]~[#7,#8])])[#6;!$([#6]~[#7,#8])])]",
        }
    }
}

struct Vocabulary {
    unstable: Vec<Pattern>,
    reactive: Vec<Pattern>,
    features: Vec<Pattern>,
}

fn vocabulary() -> &'static Vocabulary {
    static V: OnceLock<Vocabulary> = OnceLock::new();
    V.get_or_init(|| {
        let compile = |s: &str| Pattern::parse(s).expect("built-in pattern");
        Vocabulary {
            unstable: UNSTABLE.iter().map(|s| compile(s)).collect(),
            reactive: REACTIVE.iter().map(|s| compile(s)).collect(),
            features: Feature::ALL
                .iter()
                .map(|f| compile(f.pattern_src()))
                .collect(),
        }
    })
}

/// Number of unstable-moiety patterns that occur in `m`.
pub fn unstable_moiety_count(m: &Molecule) -> usize {
    vocabulary()
        .unstable
        .iter()
        .filter(|p| p.matches(m))
        .count()
}

/// Number of reactive-alert patterns that occur in `m`.
pub fn reactive_alert_count(m: &Molecule) -> usize {
    vocabulary()
        .reactive
        .iter()
        .filter(|p| p.matches(m))
        .count()
}

/// Presence of each feature class, indexed like [`Feature::ALL`].
pub fn pharmacophore_features(m: &Molecule) -> [bool; 4] {
    let v = vocabulary();
    let mut out = [false; 4];
    for (k, p) in v.features.iter().enumerate() {
        out[k] = p.matches(m);
    }
    out
}

/// Atoms covered by any feature match.
pub fn pharmacophore_atoms(m: &Molecule) -> Vec<bool> {
    let mut inside = vec![false; m.num_atoms()];
    for p in &vocabulary().features {
        for a in p.anchor_atoms(m) {
            inside[a] = true;
        }
    }
    inside
}
