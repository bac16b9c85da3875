//! Property predictor seam: a table of precomputed values, a built-in
//! descriptor surrogate for the HOMO-LUMO gap, or the table with the
//! surrogate as fallback.

use std::collections::HashMap;
use std::path::Path;

use thiserror::Error;

use crate::molgraph::{parse_smiles, BondOrder, Molecule};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PredictError {
    #[error("no predicted value for {0}")]
    Missing(String),
    #[error("predictor table line {line}: {msg}")]
    Table { line: usize, msg: String },
    #[error("predictor table {0}: {1}")]
    Io(String, String),
}

#[derive(Debug, Clone, PartialEq, Default)]
pub enum Predictor {
    /// Descriptor formula standing in for a learned gap model.
    #[default]
    Surrogate,
    Table {
        values: HashMap<String, f64>,
        fallback: bool,
    },
}

/// Bonds in a conjugated system: multiple or aromatic bonds, and single
/// bonds joining two atoms that each carry one.
pub fn conjugated_bond_count(m: &Molecule) -> usize {
    let unsaturated: Vec<bool> = (0..m.num_atoms())
        .map(|i| {
            m.neighbors(i)
                .iter()
                .any(|&(_, b)| m.bond(b).order != BondOrder::Single)
        })
        .collect();
    m.bonds()
        .iter()
        .filter(|b| b.order != BondOrder::Single || (unsaturated[b.begin] && unsaturated[b.end]))
        .count()
}

/// 7.0 − 0.35·aromatic rings − 0.08·conjugated bonds, clamped to [1, 9] eV.
pub fn surrogate_gap(m: &Molecule) -> f64 {
    let v = 7.0 - 0.35 * m.aromatic_ring_count() as f64 - 0.08 * conjugated_bond_count(m) as f64;
    v.clamp(1.0, 9.0)
}

impl Predictor {
    /// Parses "smiles<TAB>value" lines; keys are re-canonicalized.
    pub fn table_from_text(text: &str, fallback: bool) -> Result<Predictor, PredictError> {
        let mut values = HashMap::new();
        for (k, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |msg: String| PredictError::Table { line: k + 1, msg };
            let (smiles, value) = line
                .split_once('\t')
                .ok_or_else(|| err("expected smiles<TAB>value".into()))?;
            let m = parse_smiles(smiles.trim()).map_err(|e| err(e.to_string()))?;
            let v: f64 = value
                .trim()
                .parse()
                .map_err(|_| err(format!("bad value {value}")))?;
            if !v.is_finite() {
                return Err(err(format!("bad value {value}")));
            }
            values.insert(m.canonical_smiles().to_string(), v);
        }
        Ok(Predictor::Table { values, fallback })
    }

    pub fn table_from_file(path: &Path, fallback: bool) -> Result<Predictor, PredictError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| PredictError::Io(path.display().to_string(), e.to_string()))?;
        Predictor::table_from_text(&text, fallback)
    }

    pub fn predict(&self, m: &Molecule) -> Result<f64, PredictError> {
        match self {
            Predictor::Surrogate => Ok(surrogate_gap(m)),
            Predictor::Table { values, fallback } => match values.get(m.canonical_smiles()) {
                Some(&v) => Ok(v),
                None if *fallback => Ok(surrogate_gap(m)),
                None => Err(PredictError::Missing(m.canonical_smiles().to_string())),
            },
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Predictor::Surrogate => "surrogate(homo_lumo_gap)".into(),
            Predictor::Table { values, fallback } => format!(
                "table_lookup({} entries{})",
                values.len(),
                if *fallback {
                    ", surrogate fallback"
                } else {
                    ""
                }
            ),
        }
    }
}
