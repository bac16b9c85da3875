//! Hückel-style aromaticity on the Kekulé graph.
//!
//! Each relevant ring is tested on its own (4n+2 π electrons). Rings that
//! fail alone but whose atoms can all donate are retried together with a
//! bond-sharing neighbor ring and as whole fused groups (azulene-type
//! systems).

use super::{Atom, Element};

/// π electrons an atom donates to a ring, or `None` if it cannot take part.
fn pi_electrons(
    i: usize,
    atoms: &[Atom],
    adj: &[Vec<(usize, usize)>],
    kekule: &[u8],
    ring_bond: &[bool],
) -> Option<u8> {
    let atom = &atoms[i];
    if !matches!(
        atom.element,
        Element::C | Element::N | Element::O | Element::S
    ) {
        return None;
    }
    let mut double = None;
    for &(nb, b) in &adj[i] {
        match kekule[b] {
            1 => {}
            2 => {
                if double.is_some() {
                    return None;
                }
                double = Some((nb, b));
            }
            _ => return None,
        }
    }
    let sigma = adj[i].len() + atom.total_h() as usize;
    if atom.element == Element::S
        && atom.formal_charge == 0
        && sigma + usize::from(double.is_some()) != 2
    {
        return None;
    }
    if let Some((nb, b)) = double {
        if sigma > 3 {
            return None;
        }
        if ring_bond[b] {
            return Some(1);
        }
        // exocyclic double bond: the electron leaves with a more
        // electronegative partner
        return if electronegativity(atoms[nb].element) > electronegativity(atom.element) {
            Some(0)
        } else {
            Some(1)
        };
    }
    match (atom.element, atom.formal_charge) {
        (Element::C, -1) if sigma == 3 => Some(2),
        (Element::C, 1) if sigma == 3 => Some(0),
        (Element::N, 0) if sigma == 3 => Some(2),
        (Element::N, -1) if sigma == 2 => Some(2),
        (Element::O, 0) | (Element::S, 0) if sigma == 2 => Some(2),
        _ => None,
    }
}

fn electronegativity(e: Element) -> f64 {
    match e {
        Element::C => 2.55,
        Element::N => 3.04,
        Element::O => 3.44,
        Element::S => 2.58,
        Element::F => 3.98,
        Element::Cl => 3.16,
        Element::Br => 2.96,
        Element::I => 2.66,
        Element::P => 2.19,
        Element::B => 2.04,
    }
}

fn huckel(count: u32) -> bool {
    count % 4 == 2
}

fn ring_edges(ring: &[usize], adj: &[Vec<(usize, usize)>]) -> Vec<usize> {
    (0..ring.len())
        .map(|k| {
            let a = ring[k];
            let b = ring[(k + 1) % ring.len()];
            adj[a]
                .iter()
                .find(|&&(nb, _)| nb == b)
                .map(|&(_, bi)| bi)
                .expect("ring atoms are bonded")
        })
        .collect()
}

/// Returns per-atom and per-bond aromatic flags.
pub(crate) fn perceive(
    atoms: &[Atom],
    adj: &[Vec<(usize, usize)>],
    kekule: &[u8],
    ring_bond: &[bool],
    relevant: &[Vec<usize>],
) -> (Vec<bool>, Vec<bool>) {
    let n = atoms.len();
    let pi: Vec<Option<u8>> = (0..n)
        .map(|i| {
            if adj[i].iter().any(|&(_, b)| ring_bond[b]) {
                pi_electrons(i, atoms, adj, kekule, ring_bond)
            } else {
                None
            }
        })
        .collect();
    let edges: Vec<Vec<usize>> = relevant.iter().map(|r| ring_edges(r, adj)).collect();
    let candidate: Vec<bool> = relevant
        .iter()
        .map(|r| r.iter().all(|&a| pi[a].is_some()))
        .collect();
    let count = |set: &[usize]| -> u32 { set.iter().map(|&a| pi[a].unwrap_or(0) as u32).sum() };

    let aromatic: Vec<bool> = relevant
        .iter()
        .zip(&candidate)
        .map(|(r, &c)| c && huckel(count(r)))
        .collect();

    // fused fallback for candidate rings that failed individually
    let leftover: Vec<usize> = (0..relevant.len())
        .filter(|&k| candidate[k] && !aromatic[k])
        .collect();
    let shares_bond = |x: usize, y: usize| edges[x].iter().any(|e| edges[y].contains(e));
    let union_atoms = |ids: &[usize]| -> Vec<usize> {
        let mut all: Vec<usize> = ids
            .iter()
            .flat_map(|&k| relevant[k].iter().copied())
            .collect();
        all.sort_unstable();
        all.dedup();
        all
    };
    let candidates: Vec<usize> = (0..relevant.len()).filter(|&k| candidate[k]).collect();
    let mut fused: Vec<Vec<usize>> = Vec::new();
    for &x in &leftover {
        for &y in &candidates {
            if y != x && shares_bond(x, y) && huckel(count(&union_atoms(&[x, y]))) {
                fused.push(vec![x, y]);
            }
        }
    }
    let mut group_of = vec![usize::MAX; relevant.len()];
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for &x in &candidates {
        if group_of[x] != usize::MAX {
            continue;
        }
        let gid = groups.len();
        group_of[x] = gid;
        let mut members = vec![x];
        let mut k = 0;
        while k < members.len() {
            let cur = members[k];
            k += 1;
            for &y in &candidates {
                if group_of[y] == usize::MAX && shares_bond(cur, y) {
                    group_of[y] = gid;
                    members.push(y);
                }
            }
        }
        groups.push(members);
    }
    for g in &groups {
        // atoms shared by three rings of the group make the envelope
        // ill-defined
        let mut seen = vec![0u8; n];
        for &k in g {
            for &a in &relevant[k] {
                seen[a] += 1;
            }
        }
        let simple = seen.iter().all(|&c| c <= 2);
        if g.len() > 2
            && simple
            && g.iter().any(|k| leftover.contains(k))
            && huckel(count(&union_atoms(g)))
        {
            fused.push(g.clone());
        }
    }

    let mut atom_arom = vec![false; n];
    let mut bond_arom = vec![false; kekule.len()];
    for (k, ring) in relevant.iter().enumerate() {
        if !aromatic[k] {
            continue;
        }
        for &a in ring {
            atom_arom[a] = true;
        }
        for &b in &edges[k] {
            bond_arom[b] = true;
        }
    }
    // a fused system contributes its envelope: bonds shared inside the
    // combination keep their Kekulé order
    for combo in &fused {
        let mut uses = std::collections::HashMap::new();
        for &k in combo {
            for &a in &relevant[k] {
                atom_arom[a] = true;
            }
            for &b in &edges[k] {
                *uses.entry(b).or_insert(0u8) += 1;
            }
        }
        for (b, c) in uses {
            if c == 1 {
                bond_arom[b] = true;
            }
        }
    }
    (atom_arom, bond_arom)
}
