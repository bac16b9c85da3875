//! Canonical ranking by iterative neighborhood refinement with exhaustive
//! tie-breaking; the lexicographically smallest SMILES over all tie-break
//! leaves is the canonical string.

use super::writer::write_smiles;
use super::{BondDir, Chirality, Molecule};

const LEAF_CAP: usize = 2048;

fn initial_keys(m: &Molecule) -> Vec<(u8, i8, usize, u8, bool, bool)> {
    (0..m.num_atoms())
        .map(|i| {
            let a = m.atom(i);
            (
                a.element.atomic_number(),
                a.formal_charge,
                m.degree(i),
                a.total_h(),
                a.aromatic,
                m.is_ring_atom(i),
            )
        })
        .collect()
}

/// Rank = number of atoms with a strictly smaller key.
fn rank_by<K: Ord>(keys: &[K]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..keys.len()).collect();
    idx.sort_by(|&a, &b| keys[a].cmp(&keys[b]));
    let mut ranks = vec![0; keys.len()];
    for k in 1..idx.len() {
        ranks[idx[k]] = if keys[idx[k]] == keys[idx[k - 1]] {
            ranks[idx[k - 1]]
        } else {
            k
        };
    }
    ranks
}

fn distinct(ranks: &[usize]) -> usize {
    let mut r = ranks.to_vec();
    r.sort_unstable();
    r.dedup();
    r.len()
}

fn dir_code(d: BondDir) -> u8 {
    // only presence: a whole group of marks may be flipped without changing
    // the geometry, so the actual sense must not influence ranking
    u8::from(d != BondDir::None)
}

fn refine(m: &Molecule, mut ranks: Vec<usize>) -> Vec<usize> {
    let mut classes = distinct(&ranks);
    loop {
        let keys: Vec<(usize, Vec<(usize, u8, u8)>)> = (0..m.num_atoms())
            .map(|i| {
                let mut nb: Vec<(usize, u8, u8)> = m
                    .neighbors(i)
                    .iter()
                    .map(|&(w, b)| {
                        let bond = m.bond(b);
                        (ranks[w], bond.order.code(), dir_code(bond.direction))
                    })
                    .collect();
                nb.sort_unstable();
                (ranks[i], nb)
            })
            .collect();
        let next = rank_by(&keys);
        let c = distinct(&next);
        ranks = next;
        if c == classes {
            return ranks;
        }
        classes = c;
    }
}

/// Equivalence class per atom after refinement (dense ids ordered by rank).
/// Atoms in one class are symmetry-equivalent under the refinement.
pub fn symmetry_classes(m: &Molecule) -> Vec<usize> {
    let ranks = refine(m, rank_by(&initial_keys(m)));
    let mut sorted = ranks.clone();
    sorted.sort_unstable();
    sorted.dedup();
    ranks
        .iter()
        .map(|r| sorted.binary_search(r).expect("rank present"))
        .collect()
}

/// Terminal atoms hanging off the same non-stereo atom are interchangeable.
fn twins(m: &Molecule, a: usize, b: usize) -> bool {
    if m.degree(a) != 1 || m.degree(b) != 1 {
        return false;
    }
    let (pa, ba) = m.neighbors(a)[0];
    let (pb, bb) = m.neighbors(b)[0];
    pa == pb
        && m.atom(pa).chirality == Chirality::None
        && m.bond(ba).direction == BondDir::None
        && m.bond(bb).direction == BondDir::None
}

struct Search<'a> {
    m: &'a Molecule,
    best: Option<(String, Vec<usize>)>,
    leaves: usize,
}

impl<'a> Search<'a> {
    fn run(&mut self, ranks: Vec<usize>) {
        if self.leaves >= LEAF_CAP {
            return;
        }
        let n = ranks.len();
        let mut counts = vec![0usize; n];
        for &r in &ranks {
            counts[r] += 1;
        }
        let tied = (0..n).find(|&r| counts[r] > 1);
        let Some(r) = tied else {
            self.leaves += 1;
            let s = write_smiles(self.m, &ranks, true);
            if self.best.as_ref().is_none_or(|(b, _)| s < *b) {
                self.best = Some((s, ranks));
            }
            return;
        };
        let members: Vec<usize> = (0..n).filter(|&i| ranks[i] == r).collect();
        let mut tried: Vec<usize> = Vec::new();
        for &a in &members {
            if tried.iter().any(|&t| twins(self.m, t, a)) {
                continue;
            }
            tried.push(a);
            let mut next = ranks.clone();
            for &x in &members {
                if x != a {
                    next[x] = r + 1;
                }
            }
            let refined = refine(self.m, next);
            self.run(refined);
        }
    }
}

pub(crate) fn canonicalize(m: &Molecule) -> (String, Vec<usize>) {
    if m.num_atoms() == 0 {
        return (String::new(), Vec::new());
    }
    let start = refine(m, rank_by(&initial_keys(m)));
    let mut search = Search {
        m,
        best: None,
        leaves: 0,
    };
    search.run(start);
    search.best.expect("at least one leaf is visited")
}
