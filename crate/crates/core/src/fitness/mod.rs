//! Weighted multi-constraint fitness, drug-likeness filters, CNS MPO and the
//! property predictor.

mod predictor;

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::descriptors::{
    basic_descriptors, heavy_atoms_with_h, morgan_fingerprint, qed, ring_systems, sa_score,
    symmetry_score, tanimoto, DescriptorRecord, Fingerprint, DEFAULT_NBITS, DEFAULT_RADIUS,
};
use crate::molgraph::{Element, MolBuilder, Molecule};
use crate::ruleset::{
    lipinski_pass, pharmacophore_features, reactive_alert_count, unstable_moiety_count,
};

pub use predictor::{conjugated_bond_count, surrogate_gap, PredictError, Predictor};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FitnessError {
    #[error("population is empty")]
    EmptyPopulation,
    #[error("weights line {line}: {msg}")]
    Weights { line: usize, msg: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Constraint {
    PropertyCoverage,
    Symmetry,
    Validity,
    Diversity,
    SyntheticFeasibility,
    Flexibility,
    DrugLikeProperties,
    Stability,
    Pharmacophore,
    DrugLikenessExtended,
    Reactivity,
    StructuralIntegrity,
}

impl Constraint {
    pub const ALL: [Constraint; 12] = [
        Constraint::PropertyCoverage,
        Constraint::Symmetry,
        Constraint::Validity,
        Constraint::Diversity,
        Constraint::SyntheticFeasibility,
        Constraint::Flexibility,
        Constraint::DrugLikeProperties,
        Constraint::Stability,
        Constraint::Pharmacophore,
        Constraint::DrugLikenessExtended,
        Constraint::Reactivity,
        Constraint::StructuralIntegrity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Constraint::PropertyCoverage => "property_coverage",
            Constraint::Symmetry => "symmetry",
            Constraint::Validity => "validity",
            Constraint::Diversity => "diversity",
            Constraint::SyntheticFeasibility => "synthetic_feasibility",
            Constraint::Flexibility => "flexibility",
            Constraint::DrugLikeProperties => "drug_like_properties",
            Constraint::Stability => "stability",
            Constraint::Pharmacophore => "pharmacophore",
            Constraint::DrugLikenessExtended => "drug_likeness_extended",
            Constraint::Reactivity => "reactivity",
            Constraint::StructuralIntegrity => "structural_integrity",
        }
    }

    pub fn from_name(name: &str) -> Option<Constraint> {
        Constraint::ALL.into_iter().find(|c| c.name() == name)
    }

    fn default_weight(self) -> f64 {
        match self {
            Constraint::PropertyCoverage => 0.18,
            Constraint::Symmetry => 0.13,
            Constraint::Validity
            | Constraint::Diversity
            | Constraint::SyntheticFeasibility
            | Constraint::Flexibility
            | Constraint::DrugLikeProperties => 0.08,
            Constraint::Stability | Constraint::DrugLikenessExtended => 0.06,
            Constraint::Pharmacophore | Constraint::Reactivity => 0.05,
            Constraint::StructuralIntegrity => 0.02,
        }
    }
}

/// Flat 1 on `[lo, hi]`, linear down to 0 at `hard_lo` and `hard_hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Trapezoid {
    pub hard_lo: f64,
    pub lo: f64,
    pub hi: f64,
    pub hard_hi: f64,
}

impl Trapezoid {
    pub const fn new(hard_lo: f64, lo: f64, hi: f64, hard_hi: f64) -> Trapezoid {
        Trapezoid {
            hard_lo,
            lo,
            hi,
            hard_hi,
        }
    }

    pub fn desirability(&self, x: f64) -> f64 {
        if x.is_nan() {
            return 0.0;
        }
        if x < self.lo {
            if x <= self.hard_lo {
                0.0
            } else {
                (x - self.hard_lo) / (self.lo - self.hard_lo)
            }
        } else if x > self.hi {
            if x >= self.hard_hi {
                0.0
            } else {
                (self.hard_hi - x) / (self.hard_hi - self.hi)
            }
        } else {
            1.0
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TargetRanges {
    pub logp: Trapezoid,
    pub mw: Trapezoid,
    pub tpsa: Trapezoid,
    pub gap: Trapezoid,
    pub rotatable_bonds: Trapezoid,
}

impl Default for TargetRanges {
    fn default() -> TargetRanges {
        TargetRanges {
            logp: Trapezoid::new(-1.0, 1.0, 3.0, 5.0),
            mw: Trapezoid::new(120.0, 250.0, 450.0, 550.0),
            tpsa: Trapezoid::new(10.0, 40.0, 90.0, 140.0),
            gap: Trapezoid::new(2.0, 4.0, 6.0, 8.0),
            rotatable_bonds: Trapezoid::new(-2.0, 2.0, 8.0, 12.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitnessConfig {
    weights: [f64; 12],
    pub ranges: TargetRanges,
}

impl Default for FitnessConfig {
    fn default() -> FitnessConfig {
        FitnessConfig::with_weights(Constraint::ALL.map(Constraint::default_weight))
            .expect("default weights are valid")
    }
}

impl FitnessConfig {
    /// Weights in [`Constraint::ALL`] order, rescaled to sum to one.
    pub fn with_weights(raw: [f64; 12]) -> Option<FitnessConfig> {
        if raw.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return None;
        }
        let total: f64 = raw.iter().sum();
        if total <= 0.0 {
            return None;
        }
        Some(FitnessConfig {
            weights: raw.map(|w| w / total),
            ranges: TargetRanges::default(),
        })
    }

    /// `name=value` lines override the defaults; the result is renormalized.
    pub fn from_weights_text(text: &str) -> Result<FitnessConfig, FitnessError> {
        let mut raw = Constraint::ALL.map(Constraint::default_weight);
        for (k, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |msg: String| FitnessError::Weights { line: k + 1, msg };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err("expected name=value".into()))?;
            let c = Constraint::from_name(key.trim())
                .ok_or_else(|| err(format!("unknown constraint {}", key.trim())))?;
            let v: f64 = value
                .trim()
                .parse()
                .map_err(|_| err(format!("bad weight {}", value.trim())))?;
            if !v.is_finite() || v < 0.0 {
                return Err(err(format!("bad weight {v}")));
            }
            raw[c as usize] = v;
        }
        FitnessConfig::with_weights(raw).ok_or(FitnessError::Weights {
            line: 0,
            msg: "weights sum to zero".into(),
        })
    }

    pub fn weight(&self, c: Constraint) -> f64 {
        self.weights[c as usize]
    }

    pub fn weights(&self) -> &[f64; 12] {
        &self.weights
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in Constraint::ALL {
            let _ = writeln!(out, "{}={}", c.name(), self.weight(c));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreVector {
    pub values: [f64; 12],
    /// Gap fed into property coverage, if the predictor produced one.
    pub predicted_gap: Option<f64>,
}

impl ScoreVector {
    pub fn get(&self, c: Constraint) -> f64 {
        self.values[c as usize]
    }

    /// True when property coverage was computed without the predicted term.
    pub fn prediction_failed(&self) -> bool {
        self.predicted_gap.is_none()
    }
}

impl Serialize for ScoreVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = s.serialize_map(Some(13))?;
        for c in Constraint::ALL {
            map.serialize_entry(c.name(), &self.get(c))?;
        }
        map.serialize_entry("predicted_gap", &self.predicted_gap)?;
        map.end()
    }
}

/// Canonical SMILES of each ring system's ring atoms.
pub fn ring_system_keys(m: &Molecule) -> BTreeSet<String> {
    let mut keys = BTreeSet::new();
    for system in ring_systems(m) {
        let mut inside = vec![false; m.num_atoms()];
        for &a in &system {
            inside[a] = true;
        }
        let others: Vec<usize> = (0..m.num_atoms()).filter(|&a| !inside[a]).collect();
        let mut b = MolBuilder::from_molecule_kekule(m);
        b.clear_stereo();
        b.remove_atoms_capped(&others);
        if let Ok(sub) = b.build() {
            keys.insert(sub.canonical_smiles().to_string());
        }
    }
    keys
}

/// Reference data fixed at the start of a generation.
#[derive(Debug, Clone)]
pub struct ScoringContext {
    pub sample: Vec<Fingerprint>,
    pub seed_ring_systems: BTreeSet<String>,
    pub predictor: Predictor,
}

impl ScoringContext {
    pub fn new<'a>(
        sample: impl IntoIterator<Item = &'a Molecule>,
        seeds: impl IntoIterator<Item = &'a Molecule>,
        predictor: Predictor,
    ) -> ScoringContext {
        ScoringContext {
            sample: sample.into_iter().map(fingerprint).collect(),
            seed_ring_systems: seeds.into_iter().flat_map(ring_system_keys).collect(),
            predictor,
        }
    }
}

pub fn fingerprint(m: &Molecule) -> Fingerprint {
    morgan_fingerprint(m, DEFAULT_RADIUS, DEFAULT_NBITS)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Compliance {
    pub lipinski: bool,
    pub ghose: bool,
    pub veber: bool,
}

pub fn compliance_flags(m: &Molecule) -> Compliance {
    compliance_from(m, &basic_descriptors(m))
}

fn compliance_from(m: &Molecule, d: &DescriptorRecord) -> Compliance {
    let atoms = heavy_atoms_with_h(m);
    Compliance {
        lipinski: lipinski_pass(m, d),
        ghose: (160.0..=480.0).contains(&d.mw)
            && (-0.4..=5.6).contains(&d.logp)
            && (20..=70).contains(&atoms)
            && (40.0..=130.0).contains(&d.mr),
        veber: d.rotatable_bonds <= 10 && d.tpsa <= 140.0,
    }
}

/// Five-term CNS MPO without the pKa term; maximum 5.
pub fn cns_mpo_profile(logp: f64, mw: f64, tpsa: f64, hbd: f64) -> f64 {
    let logp_term = Trapezoid::new(f64::NEG_INFINITY, f64::NEG_INFINITY, 3.0, 5.0);
    let logd_term = Trapezoid::new(f64::NEG_INFINITY, f64::NEG_INFINITY, 2.0, 4.0);
    let mw_term = Trapezoid::new(f64::NEG_INFINITY, f64::NEG_INFINITY, 360.0, 500.0);
    let tpsa_term = Trapezoid::new(20.0, 40.0, 90.0, 120.0);
    let hbd_term = Trapezoid::new(f64::NEG_INFINITY, f64::NEG_INFINITY, 0.5, 3.5);
    logp_term.desirability(logp)
        + logd_term.desirability(logp - LOGD_OFFSET)
        + mw_term.desirability(mw)
        + tpsa_term.desirability(tpsa)
        + hbd_term.desirability(hbd)
}

/// logD is approximated by logP shifted down by this much.
const LOGD_OFFSET: f64 = 0.5;

pub const CNS_FAVORABLE: f64 = 10.0 / 3.0;

pub fn cns_mpo(m: &Molecule) -> f64 {
    let d = basic_descriptors(m);
    cns_mpo_profile(d.logp, d.mw, d.tpsa, d.hbd as f64)
}

/// Stereo marks on the child relative to its parent; 1 when the parent had none.
pub fn stereo_retention(child: &Molecule, parent_marks: usize) -> f64 {
    if parent_marks == 0 {
        return 1.0;
    }
    let kept = child.marked_stereocenters() + child.marked_directional_bonds();
    (kept as f64 / parent_marks as f64).min(1.0)
}

pub fn stereo_marks(m: &Molecule) -> usize {
    m.marked_stereocenters() + m.marked_directional_bonds()
}

pub fn score_vector(m: &Molecule, ctx: &ScoringContext, cfg: &FitnessConfig) -> ScoreVector {
    score_vector_with_lineage(m, ctx, cfg, None)
}

/// Like [`score_vector`], with the parent's stereo-mark count for the
/// structural-integrity retention factor.
pub fn score_vector_with_lineage(
    m: &Molecule,
    ctx: &ScoringContext,
    cfg: &FitnessConfig,
    parent_marks: Option<usize>,
) -> ScoreVector {
    let d = basic_descriptors(m);
    let r = &cfg.ranges;
    let gap = ctx.predictor.predict(m).ok();
    let mut coverage = vec![
        r.logp.desirability(d.logp),
        r.mw.desirability(d.mw),
        r.tpsa.desirability(d.tpsa),
    ];
    if let Some(g) = gap {
        coverage.push(r.gap.desirability(g));
    }
    let property_coverage = coverage.iter().sum::<f64>() / coverage.len() as f64;

    let diversity = if ctx.sample.is_empty() {
        1.0
    } else {
        let fp = fingerprint(m);
        let total: f64 = ctx
            .sample
            .iter()
            .map(|s| 1.0 - tanimoto(&fp, s).unwrap_or(1.0))
            .sum();
        total / ctx.sample.len() as f64
    };

    let n_plus_o = m
        .atoms()
        .iter()
        .filter(|a| matches!(a.element, Element::N | Element::O))
        .count();
    let lipinski_met = [d.mw <= 500.0, d.logp <= 5.0, d.hbd <= 5, n_plus_o <= 10]
        .iter()
        .filter(|&&x| x)
        .count();

    let features = pharmacophore_features(m).iter().filter(|&&f| f).count();
    let reactivity = match reactive_alert_count(m) {
        0 => 1.0,
        1 => 0.5,
        _ => 0.0,
    };
    let shares_ring_system = ring_system_keys(m)
        .iter()
        .any(|k| ctx.seed_ring_systems.contains(k));
    let integrity = if shares_ring_system { 1.0 } else { 0.5 };
    let retention = parent_marks.map_or(1.0, |p| stereo_retention(m, p));

    let mut values = [0.0; 12];
    let mut set = |c: Constraint, v: f64| values[c as usize] = v.clamp(0.0, 1.0);
    set(Constraint::PropertyCoverage, property_coverage);
    set(Constraint::Symmetry, symmetry_score(m));
    set(Constraint::Validity, 1.0);
    set(Constraint::Diversity, diversity);
    set(Constraint::SyntheticFeasibility, (10.0 - sa_score(m)) / 9.0);
    set(
        Constraint::Flexibility,
        r.rotatable_bonds.desirability(d.rotatable_bonds as f64),
    );
    set(Constraint::DrugLikeProperties, lipinski_met as f64 / 4.0);
    set(
        Constraint::Stability,
        1.0 - unstable_moiety_count(m) as f64 / 3.0,
    );
    set(Constraint::Pharmacophore, features as f64 / 4.0);
    set(Constraint::DrugLikenessExtended, qed(m));
    set(Constraint::Reactivity, reactivity);
    set(
        Constraint::StructuralIntegrity,
        integrity * (0.5 + 0.5 * retention),
    );
    ScoreVector {
        values,
        predicted_gap: gap,
    }
}

pub fn score_molecule(sv: &ScoreVector, cfg: &FitnessConfig) -> f64 {
    let f: f64 = Constraint::ALL
        .iter()
        .map(|&c| cfg.weight(c) * sv.get(c))
        .sum();
    f.clamp(0.0, 1.0)
}

pub fn population_fitness(fitness: &[f64]) -> Result<f64, FitnessError> {
    if fitness.is_empty() {
        return Err(FitnessError::EmptyPopulation);
    }
    let mut sorted = fitness.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(sorted.iter().sum::<f64>() / sorted.len() as f64)
}

#[cfg(test)]
mod tests;
