use std::sync::OnceLock;

use thiserror::Error;

use super::{aromaticity, rings, Atom, Bond, BondDir, BondOrder, Chirality, Element, Molecule};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BuildError {
    #[error("atom index {0} out of range")]
    AtomIndex(usize),
    #[error("bond joins atom {0} to itself")]
    SelfBond(usize),
    #[error("duplicate bond between atoms {0} and {1}")]
    DuplicateBond(usize, usize),
    #[error("no Kekulé structure for aromatic atoms {0:?}")]
    Kekulize(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct RawBond {
    pub begin: usize,
    pub end: usize,
    pub order: BondOrder,
    pub direction: BondDir,
}

/// Mutable molecule under construction. `BondOrder::Aromatic` bonds are
/// resolved to a Kekulé structure by [`MolBuilder::build`], after which rings
/// and aromaticity are perceived from scratch.
#[derive(Debug, Clone, Default)]
pub struct MolBuilder {
    pub(crate) atoms: Vec<Atom>,
    pub(crate) bonds: Vec<RawBond>,
}

const MATCHING_BUDGET: usize = 200_000;

impl MolBuilder {
    pub fn new() -> MolBuilder {
        MolBuilder::default()
    }

    pub fn from_molecule(m: &Molecule) -> MolBuilder {
        MolBuilder {
            atoms: m.atoms.clone(),
            bonds: m
                .bonds
                .iter()
                .map(|b| RawBond {
                    begin: b.begin,
                    end: b.end,
                    order: b.order,
                    direction: b.direction,
                })
                .collect(),
        }
    }

    pub fn num_atoms(&self) -> usize {
        self.atoms.len()
    }

    pub fn atom(&self, i: usize) -> &Atom {
        &self.atoms[i]
    }

    pub fn atom_mut(&mut self, i: usize) -> &mut Atom {
        &mut self.atoms[i]
    }

    pub fn add_atom(&mut self, atom: Atom) -> usize {
        self.atoms.push(atom);
        self.atoms.len() - 1
    }

    fn check_new_bond(&self, a: usize, b: usize) -> Result<(), BuildError> {
        let n = self.atoms.len();
        if a >= n {
            return Err(BuildError::AtomIndex(a));
        }
        if b >= n {
            return Err(BuildError::AtomIndex(b));
        }
        if a == b {
            return Err(BuildError::SelfBond(a));
        }
        if self.bond_index(a, b).is_some() {
            return Err(BuildError::DuplicateBond(a.min(b), a.max(b)));
        }
        Ok(())
    }

    /// Adds a bond; tetrahedral marks on both ends are dropped because their
    /// neighbor sets change.
    pub fn add_bond(&mut self, a: usize, b: usize, order: BondOrder) -> Result<(), BuildError> {
        self.check_new_bond(a, b)?;
        self.atoms[a].chirality = Chirality::None;
        self.atoms[b].chirality = Chirality::None;
        self.bonds.push(RawBond {
            begin: a,
            end: b,
            order,
            direction: BondDir::None,
        });
        Ok(())
    }

    pub(crate) fn add_bond_raw(
        &mut self,
        a: usize,
        b: usize,
        order: BondOrder,
        direction: BondDir,
    ) -> Result<(), BuildError> {
        self.check_new_bond(a, b)?;
        self.bonds.push(RawBond {
            begin: a,
            end: b,
            order,
            direction,
        });
        Ok(())
    }

    fn bond_index(&self, a: usize, b: usize) -> Option<usize> {
        self.bonds
            .iter()
            .position(|x| (x.begin == a && x.end == b) || (x.begin == b && x.end == a))
    }

    pub fn bond_order(&self, a: usize, b: usize) -> Option<BondOrder> {
        self.bond_index(a, b).map(|i| self.bonds[i].order)
    }

    pub fn set_bond_order(&mut self, a: usize, b: usize, order: BondOrder) -> bool {
        match self.bond_index(a, b) {
            Some(i) => {
                self.bonds[i].order = order;
                true
            }
            None => false,
        }
    }

    pub fn remove_bond(&mut self, a: usize, b: usize) -> bool {
        match self.bond_index(a, b) {
            Some(i) => {
                self.bonds.remove(i);
                self.atoms[a].chirality = Chirality::None;
                self.atoms[b].chirality = Chirality::None;
                true
            }
            None => false,
        }
    }

    pub fn neighbors(&self, a: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .bonds
            .iter()
            .filter_map(|b| {
                if b.begin == a {
                    Some(b.end)
                } else if b.end == a {
                    Some(b.begin)
                } else {
                    None
                }
            })
            .collect();
        out.sort_unstable();
        out
    }

    /// Deletes atoms and their bonds. Returns the old-to-new index map.
    /// Surviving atoms keep their relative order.
    pub fn remove_atoms(&mut self, remove: &[usize]) -> Vec<Option<usize>> {
        let n = self.atoms.len();
        let mut gone = vec![false; n];
        for &r in remove {
            if r < n {
                gone[r] = true;
            }
        }
        for b in &self.bonds {
            if gone[b.begin] && !gone[b.end] {
                self.atoms[b.end].chirality = Chirality::None;
            }
            if gone[b.end] && !gone[b.begin] {
                self.atoms[b.begin].chirality = Chirality::None;
            }
        }
        let mut map = vec![None; n];
        let mut next = 0;
        for i in 0..n {
            if !gone[i] {
                map[i] = Some(next);
                next += 1;
            }
        }
        let old = std::mem::take(&mut self.atoms);
        self.atoms = old
            .into_iter()
            .enumerate()
            .filter(|(i, _)| !gone[*i])
            .map(|(_, a)| a)
            .collect();
        self.bonds = std::mem::take(&mut self.bonds)
            .into_iter()
            .filter_map(|b| {
                Some(RawBond {
                    begin: map[b.begin]?,
                    end: map[b.end]?,
                    ..b
                })
            })
            .collect();
        map
    }

    /// Like [`MolBuilder::remove_atoms`], but bracket atoms that lose a
    /// neighbor gain hydrogens for the lost bond orders so their valence is
    /// unchanged.
    pub fn remove_atoms_capped(&mut self, remove: &[usize]) -> Vec<Option<usize>> {
        let n = self.atoms.len();
        let mut gone = vec![false; n];
        for &r in remove {
            if r < n {
                gone[r] = true;
            }
        }
        let mut extra = vec![0u8; n];
        for b in &self.bonds {
            let o = provisional_order(b.order);
            if gone[b.begin] && !gone[b.end] {
                extra[b.end] += o;
            }
            if gone[b.end] && !gone[b.begin] {
                extra[b.begin] += o;
            }
        }
        for (atom, e) in self.atoms.iter_mut().zip(extra) {
            if atom.bracket {
                atom.explicit_h += e;
            }
        }
        self.remove_atoms(remove)
    }

    pub fn clear_stereo(&mut self) {
        for a in &mut self.atoms {
            a.chirality = Chirality::None;
        }
        for b in &mut self.bonds {
            b.direction = BondDir::None;
        }
    }

    /// Editable copy of `m` with aromatic bonds replaced by its Kekulé
    /// structure; [`MolBuilder::build`] perceives aromaticity again.
    pub fn from_molecule_kekule(m: &Molecule) -> MolBuilder {
        let mut b = MolBuilder::from_molecule(m);
        b.kekulize_in_place(m);
        b
    }

    /// Replaces aromatic bonds and flags by the stored Kekulé structure of `m`.
    /// The builder must be a fresh copy of `m`.
    pub(crate) fn kekulize_in_place(&mut self, m: &Molecule) {
        for (raw, b) in self.bonds.iter_mut().zip(m.bonds.iter()) {
            raw.order = BondOrder::from_kekule(b.kekule);
        }
        for a in &mut self.atoms {
            a.aromatic = false;
        }
    }

    /// Appends a copy of another builder, returning the index offset.
    pub fn append(&mut self, other: &MolBuilder) -> usize {
        let offset = self.atoms.len();
        self.atoms.extend(other.atoms.iter().cloned());
        self.bonds.extend(other.bonds.iter().map(|b| RawBond {
            begin: b.begin + offset,
            end: b.end + offset,
            ..b.clone()
        }));
        offset
    }

    /// Resolves aromatic bonds, fills hydrogens, perceives rings and
    /// aromaticity, and drops stereo marks that no longer apply.
    pub fn build(self) -> Result<Molecule, BuildError> {
        let MolBuilder {
            mut atoms,
            bonds: raw,
        } = self;
        let n = atoms.len();
        for b in &raw {
            if b.begin >= n {
                return Err(BuildError::AtomIndex(b.begin));
            }
            if b.end >= n {
                return Err(BuildError::AtomIndex(b.end));
            }
        }
        let ends: Vec<(usize, usize)> = raw.iter().map(|b| (b.begin, b.end)).collect();
        let adjacency = adjacency_of(n, &ends);
        let ring_bond = rings::ring_bonds(n, &adjacency, ends.len());

        let mut orders: Vec<BondOrder> = raw.iter().map(|b| b.order).collect();
        for (i, (a, b)) in ends.iter().enumerate() {
            if orders[i] == BondOrder::Aromatic
                && (!ring_bond[i] || !atoms[*a].aromatic || !atoms[*b].aromatic)
            {
                orders[i] = BondOrder::Single;
            }
        }
        for (i, atom) in atoms.iter_mut().enumerate() {
            if atom.aromatic
                && !adjacency[i]
                    .iter()
                    .any(|&(_, b)| orders[b] == BondOrder::Aromatic)
            {
                atom.aromatic = false;
            }
        }

        let kekule = kekulize(&atoms, &adjacency, &orders)?;
        for (i, atom) in atoms.iter_mut().enumerate() {
            if atom.bracket {
                atom.implicit_h = 0;
                continue;
            }
            let s: u8 = adjacency[i].iter().map(|&(_, b)| kekule[b]).sum::<u8>() + atom.explicit_h;
            atom.implicit_h = atom
                .element
                .implicit_valences(atom.formal_charge)
                .iter()
                .find(|&&v| v >= s)
                .map(|&v| v - s)
                .unwrap_or(0);
        }

        let ring_set = rings::perceive(n, &adjacency, &ends, &ring_bond);
        let (atom_arom, bond_arom) =
            aromaticity::perceive(&atoms, &adjacency, &kekule, &ring_bond, &ring_set.relevant);
        for (atom, &arom) in atoms.iter_mut().zip(&atom_arom) {
            atom.aromatic = arom;
        }

        let mut bonds: Vec<Bond> = raw
            .iter()
            .enumerate()
            .map(|(i, rb)| Bond {
                begin: rb.begin,
                end: rb.end,
                order: if bond_arom[i] {
                    BondOrder::Aromatic
                } else {
                    BondOrder::from_kekule(kekule[i])
                },
                in_ring: ring_bond[i],
                direction: rb.direction,
                kekule: kekule[i],
            })
            .collect();

        // Stereo marks survive only where they still describe something.
        for (i, atom) in atoms.iter_mut().enumerate() {
            if atom.chirality != Chirality::None {
                let h = atom.total_h() as usize;
                if h > 1 || adjacency[i].len() + h != 4 {
                    atom.chirality = Chirality::None;
                }
            }
        }
        let double_at: Vec<bool> = (0..n)
            .map(|i| {
                adjacency[i]
                    .iter()
                    .any(|&(_, b)| bonds[b].order == BondOrder::Double)
            })
            .collect();
        for b in &mut bonds {
            if b.direction != BondDir::None
                && (b.order != BondOrder::Single || !(double_at[b.begin] || double_at[b.end]))
            {
                b.direction = BondDir::None;
            }
        }

        let ring_aromatic: Vec<bool> = ring_set
            .basis
            .iter()
            .map(|ring| {
                (0..ring.len()).all(|k| {
                    let a = ring[k];
                    let b = ring[(k + 1) % ring.len()];
                    adjacency[a]
                        .iter()
                        .find(|&&(nb, _)| nb == b)
                        .map(|&(_, bi)| bond_arom[bi])
                        .unwrap_or(false)
                })
            })
            .collect();
        let mut atom_ring_count = vec![0u8; n];
        let mut atom_smallest_ring = vec![0u8; n];
        for ring in &ring_set.basis {
            let len = ring.len().min(255) as u8;
            for &a in ring {
                atom_ring_count[a] = atom_ring_count[a].saturating_add(1);
                if atom_smallest_ring[a] == 0 || len < atom_smallest_ring[a] {
                    atom_smallest_ring[a] = len;
                }
            }
        }

        let mut mol = Molecule {
            atoms,
            bonds,
            adjacency,
            rings: ring_set.basis,
            ring_aromatic,
            atom_ring_count,
            atom_smallest_ring,
            canonical: OnceLock::new(),
        };
        drop_symmetric_centers(&mut mol);
        Ok(mol)
    }
}

/// Clears tetrahedral marks on atoms with two equivalent substituents.
fn drop_symmetric_centers(mol: &mut Molecule) {
    if mol.atoms.iter().all(|a| a.chirality == Chirality::None) {
        return;
    }
    let classes = super::canon::symmetry_classes(mol);
    for i in 0..mol.atoms.len() {
        if mol.atoms[i].chirality == Chirality::None {
            continue;
        }
        let mut seen: Vec<usize> = mol.adjacency[i]
            .iter()
            .map(|&(nb, _)| classes[nb])
            .collect();
        seen.sort_unstable();
        let before = seen.len();
        seen.dedup();
        if seen.len() != before {
            mol.atoms[i].chirality = Chirality::None;
        }
    }
}

fn adjacency_of(n: usize, ends: &[(usize, usize)]) -> Vec<Vec<(usize, usize)>> {
    let mut adj = vec![Vec::new(); n];
    for (i, &(a, b)) in ends.iter().enumerate() {
        adj[a].push((b, i));
        adj[b].push((a, i));
    }
    for list in &mut adj {
        list.sort_unstable();
    }
    adj
}

fn provisional_order(order: BondOrder) -> u8 {
    match order {
        BondOrder::Single | BondOrder::Aromatic => 1,
        BondOrder::Double => 2,
        BondOrder::Triple => 3,
    }
}

/// Hydrogens an aromatic atom written without brackets carries.
pub(crate) fn aromatic_organic_h(element: Element, order_sum: u8) -> u8 {
    match element {
        Element::C => 3u8.saturating_sub(order_sum),
        Element::B => 2u8.saturating_sub(order_sum),
        _ => 0,
    }
}

/// Assigns integer orders, resolving aromatic bonds by a perfect matching over
/// the atoms that still need one double bond.
fn kekulize(
    atoms: &[Atom],
    adjacency: &[Vec<(usize, usize)>],
    orders: &[BondOrder],
) -> Result<Vec<u8>, BuildError> {
    let n = atoms.len();
    let mut kekule: Vec<u8> = orders.iter().map(|&o| provisional_order(o)).collect();
    let mut needs = vec![false; n];
    let mut any = false;
    for i in 0..n {
        let atom = &atoms[i];
        if !atom.aromatic {
            continue;
        }
        let s: u8 = adjacency[i].iter().map(|&(_, b)| kekule[b]).sum();
        let h = if atom.bracket {
            atom.explicit_h
        } else {
            aromatic_organic_h(atom.element, s) + atom.explicit_h
        };
        let val = s + h;
        let target = atom
            .element
            .allowed_valences(atom.formal_charge)
            .iter()
            .chain(atom.element.implicit_valences(atom.formal_charge))
            .copied()
            .filter(|&v| v >= val)
            .min();
        match target {
            Some(t) if t > val => {
                needs[i] = true;
                any = true;
            }
            Some(_) => {}
            None => return Err(BuildError::Kekulize(vec![i])),
        }
    }
    if !any {
        return Ok(kekule);
    }
    // candidate edges
    let mut cand: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for i in 0..n {
        if !needs[i] {
            continue;
        }
        for &(nb, b) in &adjacency[i] {
            if orders[b] == BondOrder::Aromatic && needs[nb] {
                cand[i].push((nb, b));
            }
        }
    }
    let mut mate: Vec<Option<usize>> = vec![None; n];
    let nodes: Vec<usize> = (0..n).filter(|&i| needs[i]).collect();
    let mut budget = MATCHING_BUDGET;
    if !match_all(&nodes, &cand, &mut mate, &mut budget) {
        return Err(BuildError::Kekulize(nodes));
    }
    for &i in &nodes {
        if let Some(b) = mate[i] {
            kekule[b] = 2;
        }
    }
    Ok(kekule)
}

fn match_all(
    nodes: &[usize],
    cand: &[Vec<(usize, usize)>],
    mate: &mut Vec<Option<usize>>,
    budget: &mut usize,
) -> bool {
    if *budget == 0 {
        return false;
    }
    *budget -= 1;
    // most constrained unmatched node first
    let mut best: Option<(usize, usize)> = None;
    for &i in nodes {
        if mate[i].is_some() {
            continue;
        }
        let free = cand[i]
            .iter()
            .filter(|&&(nb, _)| mate[nb].is_none())
            .count();
        if free == 0 {
            return false;
        }
        if best.is_none_or(|(_, f)| free < f) {
            best = Some((i, free));
            if free == 1 {
                break;
            }
        }
    }
    let Some((i, _)) = best else {
        return true;
    };
    let options: Vec<(usize, usize)> = cand[i]
        .iter()
        .copied()
        .filter(|&(nb, _)| mate[nb].is_none())
        .collect();
    for (nb, b) in options {
        mate[i] = Some(b);
        mate[nb] = Some(b);
        if match_all(nodes, cand, mate, budget) {
            return true;
        }
        mate[i] = None;
        mate[nb] = None;
    }
    false
}
