//! Reduced BRICS fragmentation: amide and ester C–N/C–O bonds, ethers next
//! to rings, and single bonds between ring and chain atoms.

use serde::{Deserialize, Serialize};

use crate::molgraph::{BondOrder, Element, MolBuilder, Molecule};

/// Cleavage rounds; each round looks for new cuts in the already-cut graph.
const MAX_ROUNDS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CutLabel {
    /// Carbonyl carbon of a cleaved amide or ester.
    Acyl,
    Amine,
    Oxy,
    /// Acyclic carbon cleaved from an ether oxygen.
    Carbon,
    Ring,
    /// Acyclic atom cleaved from a ring.
    Chain,
}

impl CutLabel {
    pub fn compatible(self, other: CutLabel) -> bool {
        use CutLabel::*;
        matches!(
            (self, other),
            (Acyl, Amine | Oxy)
                | (Amine, Acyl | Ring)
                | (Oxy, Acyl | Carbon | Ring)
                | (Carbon, Oxy)
                | (Ring, Chain | Ring | Amine | Oxy)
                | (Chain, Ring)
        )
    }
}

#[derive(Debug, Clone)]
pub struct Fragment {
    /// Hydrogen-capped piece of the parent.
    pub mol: Molecule,
    pub attachments: Vec<(usize, CutLabel)>,
    /// Parent atom index of every fragment atom.
    pub source: Vec<usize>,
}

/// A cleaved bond: (fragment, atom) at each end, with the end labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Link {
    pub a: (usize, usize),
    pub b: (usize, usize),
    pub labels: (CutLabel, CutLabel),
}

#[derive(Debug, Clone)]
pub struct FragmentSet {
    pub fragments: Vec<Fragment>,
    pub links: Vec<Link>,
}

impl FragmentSet {
    /// Re-forms every cleaved bond.
    pub fn reassemble(&self) -> Option<Molecule> {
        let mut b = MolBuilder::new();
        let offsets: Vec<usize> = self
            .fragments
            .iter()
            .map(|f| b.append(&MolBuilder::from_molecule_kekule(&f.mol)))
            .collect();
        for link in &self.links {
            let x = offsets[link.a.0] + link.a.1;
            let y = offsets[link.b.0] + link.b.1;
            for end in [x, y] {
                if b.atom(end).bracket {
                    let h = &mut b.atom_mut(end).explicit_h;
                    *h = h.checked_sub(1)?;
                }
            }
            b.add_bond(x, y, BondOrder::Single).ok()?;
        }
        b.build().ok()
    }
}

#[derive(Debug, Clone, Copy)]
struct Cut {
    x: usize,
    y: usize,
    lx: CutLabel,
    ly: CutLabel,
}

fn carbonyl_carbon(m: &Molecule, i: usize) -> bool {
    m.atom(i).element == Element::C
        && m.neighbors(i)
            .iter()
            .any(|&(w, b)| m.atom(w).element == Element::O && m.bond(b).order == BondOrder::Double)
}

/// Member of a six-membered aromatic all-carbon ring.
fn aryl_carbon(m: &Molecule, i: usize) -> bool {
    m.rings().iter().enumerate().any(|(k, ring)| {
        ring.len() == 6
            && ring.contains(&i)
            && m.ring_is_aromatic(k)
            && ring.iter().all(|&a| m.atom(a).element == Element::C)
    })
}

fn ether_cut(m: &Molecule, o: usize) -> Option<Cut> {
    let atom = m.atom(o);
    if atom.element != Element::O || atom.formal_charge != 0 || m.degree(o) != 2 {
        return None;
    }
    let nb = m.neighbors(o);
    let (c1, c2) = (nb[0].0, nb[1].0);
    if [c1, c2]
        .iter()
        .any(|&c| m.atom(c).element != Element::C || carbonyl_carbon(m, c))
    {
        return None;
    }
    let label = |c: usize| {
        if m.is_ring_atom(c) {
            CutLabel::Ring
        } else {
            CutLabel::Carbon
        }
    };
    let other = match (aryl_carbon(m, c1), aryl_carbon(m, c2)) {
        (true, false) => c2,
        (false, true) => c1,
        (true, true) => return None,
        (false, false) => {
            let ring_side: Vec<(usize, usize)> = nb
                .iter()
                .copied()
                .filter(|&(c, b)| m.is_ring_atom(c) && !m.bond(b).in_ring)
                .collect();
            if ring_side.len() != 1 || m.is_ring_atom(c1) && m.is_ring_atom(c2) {
                return None;
            }
            ring_side[0].0
        }
    };
    Some(Cut {
        x: o,
        y: other,
        lx: CutLabel::Oxy,
        ly: label(other),
    })
}

fn find_cuts(m: &Molecule) -> Vec<Cut> {
    let mut cuts = Vec::new();
    let amide_n = |n: usize| m.neighbors(n).iter().any(|&(w, _)| carbonyl_carbon(m, w));
    for bond in m.bonds() {
        if bond.kekule_order() != 1 || bond.in_ring {
            continue;
        }
        for (x, y) in [(bond.begin, bond.end), (bond.end, bond.begin)] {
            let ey = m.atom(y).element;
            if carbonyl_carbon(m, x) && ey == Element::N {
                cuts.push(Cut {
                    x,
                    y,
                    lx: CutLabel::Acyl,
                    ly: CutLabel::Amine,
                });
                break;
            }
            if carbonyl_carbon(m, x) && ey == Element::O && m.degree(y) == 2 {
                cuts.push(Cut {
                    x,
                    y,
                    lx: CutLabel::Acyl,
                    ly: CutLabel::Oxy,
                });
                break;
            }
            if !m.is_ring_atom(x) || m.is_ring_atom(y) || m.atom(y).formal_charge != 0 {
                continue;
            }
            let ly = match ey {
                Element::C => Some(CutLabel::Chain),
                Element::N if m.degree(y) >= 2 && !amide_n(y) => Some(CutLabel::Amine),
                Element::S if m.degree(y) >= 2 => Some(CutLabel::Chain),
                _ => None,
            };
            if let Some(ly) = ly {
                cuts.push(Cut {
                    x,
                    y,
                    lx: CutLabel::Ring,
                    ly,
                });
                break;
            }
        }
    }
    for o in 0..m.num_atoms() {
        if let Some(c) = ether_cut(m, o) {
            cuts.push(c);
        }
    }
    cuts.sort_by_key(|c| (c.x.min(c.y), c.x.max(c.y)));
    cuts.dedup_by_key(|c| (c.x.min(c.y), c.x.max(c.y)));
    cuts
}

/// Cleaves the molecule at every matching bond. Fragments carry their
/// attachment atoms with labels; a molecule without cleavable bonds comes
/// back as a single fragment.
pub fn brics_decompose(m: &Molecule) -> FragmentSet {
    let mut cur = m.clone();
    let mut cuts: Vec<Cut> = Vec::new();
    for _ in 0..MAX_ROUNDS {
        let found = find_cuts(&cur);
        if found.is_empty() {
            break;
        }
        let mut b = MolBuilder::from_molecule_kekule(&cur);
        for c in &found {
            b.remove_bond(c.x, c.y);
            for end in [c.x, c.y] {
                if b.atom(end).bracket {
                    b.atom_mut(end).explicit_h += 1;
                }
            }
        }
        match b.build() {
            Ok(next) => {
                cur = next;
                cuts.extend(found);
            }
            Err(_) => break,
        }
    }

    let comps = cur.components();
    let mut home = vec![(0, 0); m.num_atoms()];
    let mut fragments = Vec::with_capacity(comps.len());
    for (k, comp) in comps.iter().enumerate() {
        for (local, &atom) in comp.iter().enumerate() {
            home[atom] = (k, local);
        }
        let mut b = MolBuilder::from_molecule_kekule(&cur);
        let mut keep = vec![false; cur.num_atoms()];
        for &a in comp {
            keep[a] = true;
        }
        let others: Vec<usize> = (0..cur.num_atoms()).filter(|&a| !keep[a]).collect();
        b.remove_atoms(&others);
        let mol = b.build().expect("component of a built molecule");
        fragments.push(Fragment {
            mol,
            attachments: Vec::new(),
            source: comp.clone(),
        });
    }
    let mut links = Vec::with_capacity(cuts.len());
    for c in &cuts {
        let (hx, hy) = (home[c.x], home[c.y]);
        fragments[hx.0].attachments.push((hx.1, c.lx));
        fragments[hy.0].attachments.push((hy.1, c.ly));
        links.push(Link {
            a: hx,
            b: hy,
            labels: (c.lx, c.ly),
        });
    }
    FragmentSet { fragments, links }
}

/// Attachment pairs with compatible labels.
pub fn compatible_pairs(a: &Fragment, b: &Fragment) -> Vec<(usize, usize)> {
    let mut out: Vec<(usize, usize)> = a
        .attachments
        .iter()
        .flat_map(|&(i, li)| {
            b.attachments
                .iter()
                .filter(move |&&(_, lj)| li.compatible(lj))
                .map(move |&(j, _)| (i, j))
        })
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}
