use std::collections::HashMap;
use std::sync::OnceLock;

use super::morgan::iterate;
use super::{order_free_sum, stable_hash};
use crate::molgraph::{symmetry_classes, Molecule};

const TABLE: &str = include_str!("../../data/sa_fragments.txt");

/// Fragment environments are counted up to this radius.
const RADIUS: usize = 2;
/// Fraction of all environment occurrences covered by the "typical" set.
const TYPICAL_COVERAGE: f64 = 0.8;
/// Shifts the mean fragment term of drug-like molecules to the usual
/// range of the scale (calibrated on the bundled corpus).
const FRAGMENT_OFFSET: f64 = 0.55;
/// Entries seen fewer times are left out of the bundled table.
const MIN_COUNT: u32 = 2;

/// Environment frequencies over a reference corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct SaTable {
    pub molecules: usize,
    /// Count at which an environment stops being typical: the environments
    /// at least this frequent cover most occurrences in the corpus.
    pub typical: u32,
    pub counts: HashMap<u64, u32>,
}

/// Coarse radius-0 invariant so that small molecules made of common atom
/// kinds are not treated as exotic.
fn coarse_invariants(m: &Molecule) -> Vec<u64> {
    (0..m.num_atoms())
        .map(|i| {
            let a = m.atom(i);
            stable_hash(&[
                u64::from(a.element.atomic_number()),
                a.formal_charge as i64 as u64,
                u64::from(a.aromatic),
                u64::from(m.is_ring_atom(i)),
            ])
        })
        .collect()
}

/// Environment ids used for scoring: an environment is listed only if its
/// radius reaches atoms the smaller radius did not.
fn fragment_ids(m: &Molecule) -> Vec<u64> {
    let layers = iterate(m, coarse_invariants(m), RADIUS);
    let n = m.num_atoms();
    let mut out = Vec::new();
    for i in 0..n {
        let mut dist = vec![usize::MAX; n];
        dist[i] = 0;
        let mut frontier = vec![i];
        out.push(layers[0][i]);
        for r in 1..=RADIUS {
            let mut next = Vec::new();
            for &v in &frontier {
                for &(w, _) in m.neighbors(v) {
                    if dist[w] == usize::MAX {
                        dist[w] = r;
                        next.push(w);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            out.push(layers[r][i]);
            frontier = next;
        }
    }
    out
}

pub fn sa_table_from_corpus<'a>(molecules: impl IntoIterator<Item = &'a Molecule>) -> SaTable {
    let mut counts: HashMap<u64, u32> = HashMap::new();
    let mut count = 0;
    for m in molecules {
        count += 1;
        for id in fragment_ids(m) {
            *counts.entry(id).or_insert(0) += 1;
        }
    }
    let mut freq: Vec<u32> = counts.values().copied().collect();
    freq.sort_unstable_by(|a, b| b.cmp(a));
    let total: u64 = freq.iter().map(|&c| u64::from(c)).sum();
    let mut acc = 0u64;
    let mut typical = 1;
    for c in freq {
        acc += u64::from(c);
        typical = c;
        if acc as f64 >= TYPICAL_COVERAGE * total as f64 {
            break;
        }
    }
    counts.retain(|_, c| *c >= MIN_COUNT);
    SaTable {
        molecules: count,
        typical,
        counts,
    }
}

impl SaTable {
    pub fn to_text(&self) -> String {
        let mut entries: Vec<(&u64, &u32)> = self.counts.iter().collect();
        entries.sort();
        let mut out = String::from("# sa-fragments v1\n");
        out.push_str("# Environment frequencies (radius <= 2, coarse atom invariants).\n");
        out.push_str(&format!("molecules\t{}\n", self.molecules));
        out.push_str(&format!("typical\t{}\n", self.typical));
        for (id, c) in entries {
            out.push_str(&format!("{id:016x}\t{c}\n"));
        }
        out
    }

    pub fn parse(text: &str) -> Result<SaTable, String> {
        let mut molecules = 0;
        let mut typical = 1;
        let mut counts = HashMap::new();
        for (k, line) in text.lines().enumerate() {
            if line.starts_with('#') || line.trim().is_empty() {
                continue;
            }
            let (key, val) = line
                .split_once('\t')
                .ok_or_else(|| format!("line {}: expected two columns", k + 1))?;
            let bad = |_| format!("line {}: bad number", k + 1);
            match key {
                "molecules" => molecules = val.parse().map_err(bad)?,
                "typical" => typical = val.parse().map_err(bad)?,
                _ => {
                    let id = u64::from_str_radix(key, 16).map_err(bad)?;
                    counts.insert(id, val.parse().map_err(bad)?);
                }
            }
        }
        Ok(SaTable {
            molecules,
            typical,
            counts,
        })
    }

    fn contribution(&self, id: u64) -> f64 {
        let c = self.counts.get(&id).copied().unwrap_or(0);
        ((f64::from(c) + 0.5) / f64::from(self.typical))
            .log10()
            .clamp(-4.0, 2.5)
    }
}

fn bundled() -> &'static SaTable {
    static T: OnceLock<SaTable> = OnceLock::new();
    T.get_or_init(|| SaTable::parse(TABLE).expect("bundled fragment table"))
}

/// Unmarked atoms that could carry a tetrahedral mark: four distinct
/// substituent classes counting hydrogen as one class.
fn potential_stereocenters(m: &Molecule) -> usize {
    let classes = symmetry_classes(m);
    (0..m.num_atoms())
        .filter(|&i| {
            let a = m.atom(i);
            if a.chirality != crate::molgraph::Chirality::None {
                return true;
            }
            let h = a.total_h() as usize;
            if h > 1 || m.degree(i) + h != 4 || a.aromatic {
                return false;
            }
            let mut c: Vec<usize> = m.neighbors(i).iter().map(|&(w, _)| classes[w]).collect();
            c.sort_unstable();
            c.dedup();
            c.len() == m.degree(i)
        })
        .count()
}

/// (spiro atoms, bridgehead atoms)
fn fusion_counts(m: &Molecule) -> (usize, usize) {
    let rings = m.rings();
    let mut spiro = vec![false; m.num_atoms()];
    let mut bridge = vec![false; m.num_atoms()];
    for x in 0..rings.len() {
        for y in x + 1..rings.len() {
            let shared: Vec<usize> = rings[x]
                .iter()
                .copied()
                .filter(|a| rings[y].contains(a))
                .collect();
            if shared.len() == 1 {
                spiro[shared[0]] = true;
            } else if shared.len() > 2 {
                for &a in &shared {
                    let ring_nb = m
                        .neighbors(a)
                        .iter()
                        .filter(|&&(_, b)| m.bond(b).in_ring)
                        .count();
                    if ring_nb >= 3 {
                        bridge[a] = true;
                    }
                }
            }
        }
    }
    (
        spiro.iter().filter(|&&s| s).count(),
        bridge.iter().filter(|&&s| s).count(),
    )
}

/// Synthetic accessibility in [1,10] (lower is easier) from fragment
/// frequencies and complexity penalties.
pub fn sa_score(m: &Molecule) -> f64 {
    sa_score_with(m, bundled())
}

pub(crate) fn sa_score_with(m: &Molecule, table: &SaTable) -> f64 {
    let n = m.num_atoms();
    if n == 0 {
        return 10.0;
    }
    let ids = fragment_ids(m);
    let fragment = order_free_sum(ids.iter().map(|&id| table.contribution(id))) / ids.len() as f64;

    let nf = n as f64;
    let size = nf.powf(1.005) - nf;
    let stereo = (potential_stereocenters(m) as f64 + 1.0).log10();
    let (spiro, bridge) = fusion_counts(m);
    let spiro = (spiro as f64 + 1.0).log10();
    let bridge = (bridge as f64 + 1.0).log10();
    let macrocycle = if m.rings().iter().any(|r| r.len() > 8) {
        2f64.log10()
    } else {
        0.0
    };
    let mut distinct = ids.clone();
    distinct.sort_unstable();
    distinct.dedup();
    let symmetry = if n > distinct.len() {
        (nf / distinct.len() as f64).ln() * 0.5
    } else {
        0.0
    };

    let raw = fragment + FRAGMENT_OFFSET - size - stereo - spiro - bridge - macrocycle + symmetry;
    let (lo, hi) = (-4.0, 2.5);
    let mut sa = 11.0 - (raw - lo + 1.0) / (hi - lo) * 9.0;
    if sa > 8.0 {
        sa = 8.0 + (sa + 1.0 - 9.0).ln();
    }
    sa.clamp(1.0, 10.0)
}
