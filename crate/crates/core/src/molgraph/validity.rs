use serde::Serialize;

use super::{BondOrder, Molecule};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub atom: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidityReport {
    pub valid: bool,
    pub violations: Vec<Violation>,
}

/// Valence, connectivity and aromaticity checks. Never fails; problems are
/// listed in the report.
pub fn check_validity(m: &Molecule) -> ValidityReport {
    let mut violations = Vec::new();
    if m.is_empty() {
        violations.push(Violation {
            atom: 0,
            reason: "molecule has no atoms".into(),
        });
    }
    for (i, atom) in m.atoms().iter().enumerate() {
        let v = m.valence(i);
        let allowed = atom.element.allowed_valences(atom.formal_charge);
        if !allowed.contains(&v) {
            let reason = if allowed.is_empty() {
                format!(
                    "charge {:+} is not supported on {}",
                    atom.formal_charge, atom.element
                )
            } else if v > *allowed.iter().max().unwrap_or(&0) {
                format!("valence {v} exceeds the maximum for {}", atom.element)
            } else {
                format!("valence {v} is not allowed for {}", atom.element)
            };
            violations.push(Violation { atom: i, reason });
        }
        if atom.aromatic
            && !m
                .rings()
                .iter()
                .enumerate()
                .any(|(k, r)| m.ring_is_aromatic(k) && r.contains(&i))
            && !m
                .neighbors(i)
                .iter()
                .any(|&(_, b)| m.bond(b).order == BondOrder::Aromatic)
        {
            violations.push(Violation {
                atom: i,
                reason: "aromatic atom outside any aromatic ring".into(),
            });
        }
    }
    for b in m.bonds() {
        if b.order == BondOrder::Aromatic && !(m.atom(b.begin).aromatic && m.atom(b.end).aromatic) {
            violations.push(Violation {
                atom: b.begin,
                reason: "aromatic bond between non-aromatic atoms".into(),
            });
        }
    }
    let comps = m.components();
    if comps.len() > 1 {
        for c in &comps[1..] {
            violations.push(Violation {
                atom: c[0],
                reason: "molecule is disconnected".into(),
            });
        }
    }
    ValidityReport {
        valid: violations.is_empty(),
        violations,
    }
}
