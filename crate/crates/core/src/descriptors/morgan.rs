use thiserror::Error;

use super::stable_hash;
use crate::molgraph::Molecule;

pub const DEFAULT_RADIUS: usize = 2;
pub const DEFAULT_NBITS: usize = 2048;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("fingerprint sizes differ: {0} vs {1} bits")]
pub struct FingerprintError(pub usize, pub usize);

/// Folded circular fingerprint: sorted, unique bit indices below `nbits`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fingerprint {
    bits: Vec<u32>,
    nbits: usize,
    radius: usize,
}

impl Fingerprint {
    pub fn from_bits(mut bits: Vec<u32>, nbits: usize, radius: usize) -> Fingerprint {
        assert!(nbits.is_power_of_two(), "nbits must be a power of two");
        bits.retain(|&b| (b as usize) < nbits);
        bits.sort_unstable();
        bits.dedup();
        Fingerprint {
            bits,
            nbits,
            radius,
        }
    }

    pub fn bits(&self) -> &[u32] {
        &self.bits
    }

    pub fn nbits(&self) -> usize {
        self.nbits
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn count_ones(&self) -> usize {
        self.bits.len()
    }
}

fn initial_invariants(m: &Molecule) -> Vec<u64> {
    (0..m.num_atoms())
        .map(|i| {
            let a = m.atom(i);
            stable_hash(&[
                u64::from(a.element.atomic_number()),
                a.formal_charge as i64 as u64,
                m.degree(i) as u64,
                u64::from(a.total_h()),
                u64::from(a.aromatic),
                u64::from(m.is_ring_atom(i)),
            ])
        })
        .collect()
}

/// Environment identifiers per radius: `ids[r][atom]`.
pub fn environment_ids(m: &Molecule, radius: usize) -> Vec<Vec<u64>> {
    iterate(m, initial_invariants(m), radius)
}

pub(crate) fn iterate(m: &Molecule, start: Vec<u64>, radius: usize) -> Vec<Vec<u64>> {
    let mut layers = vec![start];
    for r in 1..=radius {
        let prev = &layers[r - 1];
        let next: Vec<u64> = (0..m.num_atoms())
            .map(|i| {
                let mut nb: Vec<(u64, u64)> = m
                    .neighbors(i)
                    .iter()
                    .map(|&(w, b)| (u64::from(m.bond(b).order.code()), prev[w]))
                    .collect();
                nb.sort_unstable();
                let mut words = vec![r as u64, prev[i]];
                for (o, id) in nb {
                    words.push(o);
                    words.push(id);
                }
                stable_hash(&words)
            })
            .collect();
        layers.push(next);
    }
    layers
}

pub fn morgan_fingerprint(m: &Molecule, radius: usize, nbits: usize) -> Fingerprint {
    let bits = environment_ids(m, radius)
        .iter()
        .flatten()
        .map(|&id| (id % nbits as u64) as u32)
        .collect();
    Fingerprint::from_bits(bits, nbits, radius)
}

/// |a ∩ b| / |a ∪ b|; 1.0 for two empty fingerprints.
pub fn tanimoto(a: &Fingerprint, b: &Fingerprint) -> Result<f64, FingerprintError> {
    if a.nbits != b.nbits {
        return Err(FingerprintError(a.nbits, b.nbits));
    }
    let (mut i, mut j, mut common) = (0, 0, 0usize);
    while i < a.bits.len() && j < b.bits.len() {
        match a.bits[i].cmp(&b.bits[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                common += 1;
                i += 1;
                j += 1;
            }
        }
    }
    let union = a.bits.len() + b.bits.len() - common;
    if union == 0 {
        return Ok(1.0);
    }
    Ok(common as f64 / union as f64)
}
