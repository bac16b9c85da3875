//! Graph edits addressed by pattern-atom index.
//!
//! Edits run on a Kekulé copy of the molecule; the result is rebuilt, which
//! re-perceives rings and aromaticity, and then validated.

use serde::{Deserialize, Serialize};

use crate::molgraph::{check_validity, parse_smiles, BondOrder, Element, MolBuilder, Molecule};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Action {
    /// Bond the first atom of `group` (SMILES) to the site atom.
    Attach { at: usize, group: String },
    /// Replace the element, dropping charge and fixed hydrogens.
    SetElement { at: usize, element: String },
    /// Change the order of an existing bond (1, 2 or 3).
    SetBond { from: usize, to: usize, order: u8 },
    /// Cut the acyclic bond `keep`–`at` and delete everything on the `at` side.
    RemoveBranch { at: usize, keep: usize },
    /// Make every bond of the smallest ring through `at` single.
    SaturateRing { at: usize },
    /// Turn a saturated all-carbon six-ring through `at` into a benzene ring.
    AromatizeRing { at: usize },
    /// Close a new ring through a chain (SMILES) bonded to both atoms.
    Bridge {
        from: usize,
        to: usize,
        chain: String,
    },
    /// Put a new atom into the single ring bond `from`–`to`.
    InsertAtom {
        from: usize,
        to: usize,
        element: String,
    },
    /// Remove a two-connected ring atom and bond its neighbors.
    Contract { at: usize },
}

fn element(sym: &str) -> Result<Element, String> {
    Element::from_symbol(sym).ok_or_else(|| format!("unknown element {sym}"))
}

fn fragment(smiles: &str) -> Result<Molecule, String> {
    let m = parse_smiles(smiles).map_err(|e| format!("group {smiles}: {e}"))?;
    if !m.is_connected() {
        return Err(format!("group {smiles} is not connected"));
    }
    Ok(m)
}

fn order_of(code: u8) -> Option<BondOrder> {
    match code {
        1 => Some(BondOrder::Single),
        2 => Some(BondOrder::Double),
        3 => Some(BondOrder::Triple),
        _ => None,
    }
}

fn order_value(o: BondOrder) -> i32 {
    match o {
        BondOrder::Single | BondOrder::Aromatic => 1,
        BondOrder::Double => 2,
        BondOrder::Triple => 3,
    }
}

impl Action {
    fn atoms(&self) -> Vec<usize> {
        use Action::*;
        match self {
            Attach { at, .. }
            | SetElement { at, .. }
            | SaturateRing { at }
            | AromatizeRing { at }
            | Contract { at } => vec![*at],
            SetBond { from, to, .. } | Bridge { from, to, .. } | InsertAtom { from, to, .. } => {
                vec![*from, *to]
            }
            RemoveBranch { at, keep } => vec![*at, *keep],
        }
    }

    pub(crate) fn validate(&self, site_atoms: usize) -> Result<(), String> {
        if let Some(bad) = self.atoms().into_iter().find(|&a| a >= site_atoms) {
            return Err(format!("site atom {bad} out of range"));
        }
        match self {
            Action::Attach { group, .. } => fragment(group).map(|_| ()),
            Action::Bridge { chain, .. } => fragment(chain).map(|_| ()),
            Action::SetElement { element: e, .. } | Action::InsertAtom { element: e, .. } => {
                element(e).map(|_| ())
            }
            Action::SetBond { order, .. } => order_of(*order)
                .map(|_| ())
                .ok_or_else(|| format!("bond order {order}")),
            _ => Ok(()),
        }
    }
}

/// Adjusts fixed hydrogens of a bracket atom whose bond-order sum changed.
fn rebalance(b: &mut MolBuilder, atom: usize, delta: i32) -> Option<()> {
    let a = b.atom_mut(atom);
    if a.bracket {
        let h = i32::from(a.explicit_h) - delta;
        if h < 0 {
            return None;
        }
        a.explicit_h = h as u8;
    }
    Some(())
}

fn set_order(b: &mut MolBuilder, x: usize, y: usize, order: BondOrder) -> Option<()> {
    let old = b.bond_order(x, y)?;
    let delta = order_value(order) - order_value(old);
    b.set_bond_order(x, y, order);
    rebalance(b, x, delta)?;
    rebalance(b, y, delta)
}

fn smallest_ring(m: &Molecule, atom: usize) -> Option<&Vec<usize>> {
    m.rings()
        .iter()
        .filter(|r| r.contains(&atom))
        .min_by_key(|r| r.len())
}

/// Ring atoms in cyclic order, starting at `start`.
fn ring_cycle(m: &Molecule, ring: &[usize], start: usize) -> Option<Vec<usize>> {
    let mut cycle = vec![start];
    let mut prev = usize::MAX;
    let mut cur = start;
    while cycle.len() < ring.len() {
        let next = m
            .neighbors(cur)
            .iter()
            .map(|&(w, _)| w)
            .filter(|&w| w != prev && ring.contains(&w) && !cycle.contains(&w))
            .min()?;
        prev = cur;
        cur = next;
        cycle.push(next);
    }
    m.bond_between(*cycle.last()?, start).map(|_| cycle)
}

fn append_fragment(b: &mut MolBuilder, smiles: &str) -> Option<(usize, usize)> {
    let frag = fragment(smiles).ok()?;
    let n = frag.num_atoms();
    let offset = b.append(&MolBuilder::from_molecule_kekule(&frag));
    Some((offset, offset + n - 1))
}

struct Edit<'a> {
    m: &'a Molecule,
    b: MolBuilder,
    site: &'a [usize],
    doomed: Vec<usize>,
}

impl Edit<'_> {
    fn run(&mut self, action: &Action) -> Option<()> {
        let s = |k: usize| self.site[k];
        match action {
            Action::Attach { at, group } => {
                let (first, _) = append_fragment(&mut self.b, group)?;
                self.b.add_bond(s(*at), first, BondOrder::Single).ok()?;
                rebalance(&mut self.b, s(*at), 1)
            }
            Action::SetElement { at, element: e } => {
                let a = self.b.atom_mut(s(*at));
                a.element = element(e).ok()?;
                a.formal_charge = 0;
                a.explicit_h = 0;
                a.bracket = false;
                Some(())
            }
            Action::SetBond { from, to, order } => {
                set_order(&mut self.b, s(*from), s(*to), order_of(*order)?)
            }
            Action::RemoveBranch { at, keep } => {
                let (at, keep) = (s(*at), s(*keep));
                let bond = self.m.bond_between(at, keep)?;
                if self.m.bond(bond).in_ring {
                    return None;
                }
                let order = self.b.bond_order(at, keep)?;
                self.b.remove_bond(at, keep);
                rebalance(&mut self.b, keep, -order_value(order))?;
                let mut stack = vec![at];
                let mut seen = vec![false; self.m.num_atoms()];
                seen[at] = true;
                seen[keep] = true;
                while let Some(v) = stack.pop() {
                    self.doomed.push(v);
                    for &(w, _) in self.m.neighbors(v) {
                        if !seen[w] {
                            seen[w] = true;
                            stack.push(w);
                        }
                    }
                }
                Some(())
            }
            Action::SaturateRing { at } => {
                let ring = smallest_ring(self.m, s(*at))?.clone();
                let cycle = ring_cycle(self.m, &ring, ring[0])?;
                for k in 0..cycle.len() {
                    let (x, y) = (cycle[k], cycle[(k + 1) % cycle.len()]);
                    set_order(&mut self.b, x, y, BondOrder::Single)?;
                }
                Some(())
            }
            Action::AromatizeRing { at } => {
                let ring = smallest_ring(self.m, s(*at))?.clone();
                if ring.len() != 6 {
                    return None;
                }
                let cycle = ring_cycle(self.m, &ring, ring[0])?;
                for &a in &cycle {
                    let atom = self.m.atom(a);
                    if atom.element != Element::C || atom.aromatic || atom.total_h() == 0 {
                        return None;
                    }
                    let saturated = self
                        .m
                        .neighbors(a)
                        .iter()
                        .all(|&(_, bd)| self.m.bond(bd).order == BondOrder::Single);
                    if !saturated {
                        return None;
                    }
                }
                for k in (0..6).step_by(2) {
                    set_order(&mut self.b, cycle[k], cycle[k + 1], BondOrder::Double)?;
                }
                Some(())
            }
            Action::Bridge { from, to, chain } => {
                let (first, last) = append_fragment(&mut self.b, chain)?;
                if first == last {
                    return None;
                }
                self.b.add_bond(s(*from), first, BondOrder::Single).ok()?;
                self.b.add_bond(s(*to), last, BondOrder::Single).ok()?;
                rebalance(&mut self.b, s(*from), 1)?;
                rebalance(&mut self.b, s(*to), 1)
            }
            Action::InsertAtom {
                from,
                to,
                element: e,
            } => {
                let (x, y) = (s(*from), s(*to));
                let bond = self.m.bond_between(x, y)?;
                if !self.m.bond(bond).in_ring || self.b.bond_order(x, y)? != BondOrder::Single {
                    return None;
                }
                self.b.remove_bond(x, y);
                let n = self
                    .b
                    .add_atom(crate::molgraph::Atom::new(element(e).ok()?));
                self.b.add_bond(x, n, BondOrder::Single).ok()?;
                self.b.add_bond(n, y, BondOrder::Single).ok()
            }
            Action::Contract { at } => {
                let a = s(*at);
                if self.m.degree(a) != 2 || self.m.smallest_ring_size(a)? < 4 {
                    return None;
                }
                let nb: Vec<usize> = self.m.neighbors(a).iter().map(|&(w, _)| w).collect();
                if self.m.bond_between(nb[0], nb[1]).is_some() {
                    return None;
                }
                for &w in &nb {
                    if self.b.bond_order(a, w)? != BondOrder::Single {
                        return None;
                    }
                    self.b.remove_bond(a, w);
                }
                self.b.add_bond(nb[0], nb[1], BondOrder::Single).ok()?;
                self.doomed.push(a);
                Some(())
            }
        }
    }
}

/// Runs `actions` at the matched `site`; `None` if any step is impossible or
/// the product is not a single valid molecule.
pub(crate) fn execute(actions: &[Action], m: &Molecule, site: &[usize]) -> Option<Molecule> {
    let mut e = Edit {
        m,
        b: MolBuilder::from_molecule_kekule(m),
        site,
        doomed: Vec::new(),
    };
    for a in actions {
        e.run(a)?;
    }
    let mut b = e.b;
    if !e.doomed.is_empty() {
        b.remove_atoms_capped(&e.doomed);
    }
    let out = b.build().ok()?;
    (out.num_atoms() > 0 && out.is_connected() && check_validity(&out).valid).then_some(out)
}
