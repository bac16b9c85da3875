use crate::molgraph::{BondOrder, MolBuilder, Molecule};

/// Ring systems as sorted atom sets; rings sharing an atom are merged.
pub fn ring_systems(m: &Molecule) -> Vec<Vec<usize>> {
    let mut systems: Vec<Vec<usize>> = Vec::new();
    for ring in m.rings() {
        let mut merged: Vec<usize> = ring.clone();
        let mut k = 0;
        while k < systems.len() {
            if systems[k].iter().any(|a| merged.contains(a)) {
                merged.extend(systems.swap_remove(k));
            } else {
                k += 1;
            }
        }
        merged.sort_unstable();
        merged.dedup();
        systems.push(merged);
    }
    systems.sort();
    systems
}

/// Murcko scaffold: ring systems plus the linkers between them, obtained by
/// repeatedly stripping terminal acyclic atoms. Atoms double-bonded to a
/// kept atom stay with it. `None` for acyclic molecules.
pub fn murcko_scaffold(m: &Molecule) -> Option<Molecule> {
    let alive = murcko_atoms(m)?;
    let remove: Vec<usize> = (0..m.num_atoms()).filter(|&i| !alive[i]).collect();
    if remove.is_empty() {
        return Some(m.clone());
    }
    // Kekulé form: an aromatic ring that loses an exocyclic double bond
    // stays buildable
    let mut b = MolBuilder::from_molecule_kekule(m);
    b.remove_atoms_capped(&remove);
    b.build().ok()
}

/// Per-atom membership in the Murcko scaffold; `None` for acyclic molecules.
pub fn murcko_atoms(m: &Molecule) -> Option<Vec<bool>> {
    if m.rings().is_empty() {
        return None;
    }
    let n = m.num_atoms();
    let pendant: Vec<bool> = (0..n)
        .map(|i| {
            m.degree(i) == 1
                && !m.is_ring_atom(i)
                && m.bond(m.neighbors(i)[0].1).order == BondOrder::Double
        })
        .collect();
    let mut alive = vec![true; n];
    let mut degree: Vec<usize> = (0..n)
        .map(|i| m.neighbors(i).iter().filter(|&&(w, _)| !pendant[w]).count())
        .collect();
    let mut stack: Vec<usize> = (0..n)
        .filter(|&i| !m.is_ring_atom(i) && !pendant[i] && degree[i] <= 1)
        .collect();
    while let Some(i) = stack.pop() {
        if !alive[i] {
            continue;
        }
        alive[i] = false;
        for &(w, _) in m.neighbors(i) {
            if !alive[w] {
                continue;
            }
            if pendant[w] {
                alive[w] = false;
                continue;
            }
            degree[w] -= 1;
            if !m.is_ring_atom(w) && degree[w] <= 1 {
                stack.push(w);
            }
        }
    }
    Some(alive)
}
