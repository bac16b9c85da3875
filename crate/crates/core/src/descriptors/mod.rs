//! Physicochemical descriptors, fingerprints, scaffolds and drug-likeness
//! scores. Every function here is pure and independent of atom order.

mod basic;
mod crippen;
mod morgan;
mod murcko;
mod qed;
mod sa;
mod tpsa;

pub use basic::{basic_descriptors, heavy_atoms_with_h, DescriptorRecord};
pub use crippen::{crippen_contributions, crippen_logp_mr, CrippenResult};
pub use morgan::{
    environment_ids, morgan_fingerprint, tanimoto, Fingerprint, FingerprintError, DEFAULT_NBITS,
    DEFAULT_RADIUS,
};
pub use murcko::{murcko_atoms, murcko_scaffold, ring_systems};
pub use qed::{qed, qed_properties, QedProperties};
pub use sa::{sa_score, sa_table_from_corpus, SaTable};
pub use tpsa::{tpsa, tpsa_with_options};

use crate::molgraph::{symmetry_classes, Molecule};

/// Stable 64-bit FNV-1a hash; fingerprints and fragment tables must not
/// depend on the platform or the std hasher seed.
pub(crate) fn stable_hash(words: &[u64]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for w in words {
        for byte in w.to_le_bytes() {
            h ^= u64::from(byte);
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
    h
}

/// Sum that does not depend on the order of the terms, so that descriptors
/// come out bit-identical for any atom numbering.
pub(crate) fn order_free_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut v: Vec<f64> = values.into_iter().collect();
    v.sort_by(f64::total_cmp);
    v.iter().sum()
}

/// Graph-symmetry proxy in [0,1]: 1 when all heavy atoms fall in one
/// refinement orbit, 0 when every atom is distinguishable.
pub fn symmetry_score(m: &Molecule) -> f64 {
    let n = m.num_atoms();
    if n <= 1 {
        return 1.0;
    }
    let mut classes = symmetry_classes(m);
    classes.sort_unstable();
    classes.dedup();
    let orbits = classes.len();
    1.0 - (orbits as f64 - 1.0) / (n as f64 - 1.0)
}

#[cfg(test)]
mod tests;
