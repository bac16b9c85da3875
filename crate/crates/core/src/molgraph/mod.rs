//! Molecular graph model: atoms, bonds, rings, aromaticity, SMILES in and out.

mod aromaticity;
mod builder;
mod canon;
mod rings;
mod smiles;
mod validity;
mod writer;

use std::fmt;
use std::sync::OnceLock;

pub use builder::{BuildError, MolBuilder};
pub use canon::symmetry_classes;
pub use smiles::{parse_smiles, SmilesError};
pub use validity::{check_validity, ValidityReport, Violation};
pub use writer::write_smiles_with_ranks;

/// Elements supported by the toolkit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Element {
    B,
    C,
    N,
    O,
    F,
    P,
    S,
    Cl,
    Br,
    I,
}

impl Element {
    pub const ALL: [Element; 10] = [
        Element::B,
        Element::C,
        Element::N,
        Element::O,
        Element::F,
        Element::P,
        Element::S,
        Element::Cl,
        Element::Br,
        Element::I,
    ];

    pub fn atomic_number(self) -> u8 {
        match self {
            Element::B => 5,
            Element::C => 6,
            Element::N => 7,
            Element::O => 8,
            Element::F => 9,
            Element::P => 15,
            Element::S => 16,
            Element::Cl => 17,
            Element::Br => 35,
            Element::I => 53,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Element::B => "B",
            Element::C => "C",
            Element::N => "N",
            Element::O => "O",
            Element::F => "F",
            Element::P => "P",
            Element::S => "S",
            Element::Cl => "Cl",
            Element::Br => "Br",
            Element::I => "I",
        }
    }

    pub fn from_symbol(s: &str) -> Option<Element> {
        Element::ALL.iter().copied().find(|e| e.symbol() == s)
    }

    pub fn from_atomic_number(z: u8) -> Option<Element> {
        Element::ALL
            .iter()
            .copied()
            .find(|e| e.atomic_number() == z)
    }

    /// Standard (average) atomic mass in Daltons.
    pub fn mass(self) -> f64 {
        match self {
            Element::B => 10.812,
            Element::C => 12.011,
            Element::N => 14.007,
            Element::O => 15.999,
            Element::F => 18.998,
            Element::P => 30.974,
            Element::S => 32.065,
            Element::Cl => 35.453,
            Element::Br => 79.904,
            Element::I => 126.904,
        }
    }

    pub fn is_halogen(self) -> bool {
        matches!(self, Element::F | Element::Cl | Element::Br | Element::I)
    }

    /// Total valences (bond-order sum plus hydrogens) accepted by the validity check.
    pub fn allowed_valences(self, charge: i8) -> &'static [u8] {
        use Element::*;
        match (self, charge) {
            (B, 0) => &[3],
            (B, -1) => &[4],
            (C, 0) => &[4],
            (C, 1) | (C, -1) => &[3],
            (N, 0) => &[3],
            (N, 1) => &[4],
            (N, -1) => &[2],
            (O, 0) => &[2],
            (O, 1) => &[3],
            (O, -1) => &[1],
            (F, 0) | (Cl, 0) | (Br, 0) | (I, 0) => &[1],
            (S, 0) => &[2, 4, 6],
            (S, 1) => &[3],
            (S, -1) => &[1],
            (P, 0) => &[3, 5],
            (P, 1) => &[4],
            (P, -1) => &[2],
            _ => &[],
        }
    }

    /// Valences used to fill implicit hydrogens on atoms written without brackets.
    pub(crate) fn implicit_valences(self, charge: i8) -> &'static [u8] {
        use Element::*;
        match (self, charge) {
            (B, 0) => &[3],
            (C, 0) => &[4],
            (N, 0) => &[3, 5],
            (O, 0) => &[2],
            (P, 0) => &[3, 5],
            (S, 0) => &[2, 4, 6],
            (F, 0) | (Cl, 0) | (Br, 0) | (I, 0) => &[1],
            _ => self.allowed_valences(charge),
        }
    }

    /// True for elements that may be written in lowercase aromatic form.
    pub fn can_be_aromatic(self) -> bool {
        matches!(
            self,
            Element::B | Element::C | Element::N | Element::O | Element::P | Element::S
        )
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// Tetrahedral mark. `Ccw` is SMILES `@`, `Cw` is `@@`.
///
/// Stored relative to a reference neighbor order: implicit hydrogen first,
/// then neighbors by ascending atom index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Chirality {
    #[default]
    None,
    Ccw,
    Cw,
}

impl Chirality {
    pub(crate) fn flipped(self) -> Chirality {
        match self {
            Chirality::None => Chirality::None,
            Chirality::Ccw => Chirality::Cw,
            Chirality::Cw => Chirality::Ccw,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BondOrder {
    Single,
    Double,
    Triple,
    Aromatic,
}

impl BondOrder {
    pub fn code(self) -> u8 {
        match self {
            BondOrder::Single => 1,
            BondOrder::Double => 2,
            BondOrder::Triple => 3,
            BondOrder::Aromatic => 4,
        }
    }

    pub(crate) fn from_kekule(order: u8) -> BondOrder {
        match order {
            2 => BondOrder::Double,
            3 => BondOrder::Triple,
            _ => BondOrder::Single,
        }
    }
}

/// Cis/trans mark on a single bond: `Up` is `/`, `Down` is `\`, read from
/// `begin` towards `end`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum BondDir {
    #[default]
    None,
    Up,
    Down,
}

impl BondDir {
    pub(crate) fn flipped(self) -> BondDir {
        match self {
            BondDir::None => BondDir::None,
            BondDir::Up => BondDir::Down,
            BondDir::Down => BondDir::Up,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Atom {
    pub element: Element,
    pub formal_charge: i8,
    pub explicit_h: u8,
    pub implicit_h: u8,
    pub aromatic: bool,
    pub chirality: Chirality,
    /// Hydrogen count is fixed (bracket atom); otherwise it is derived from valence.
    pub bracket: bool,
}

impl Atom {
    pub fn new(element: Element) -> Atom {
        Atom {
            element,
            formal_charge: 0,
            explicit_h: 0,
            implicit_h: 0,
            aromatic: false,
            chirality: Chirality::None,
            bracket: false,
        }
    }

    pub fn aromatic(element: Element) -> Atom {
        Atom {
            aromatic: true,
            ..Atom::new(element)
        }
    }

    pub fn total_h(&self) -> u8 {
        self.explicit_h + self.implicit_h
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bond {
    pub begin: usize,
    pub end: usize,
    pub order: BondOrder,
    pub in_ring: bool,
    pub direction: BondDir,
    kekule: u8,
}

impl Bond {
    pub fn other(&self, atom: usize) -> usize {
        if self.begin == atom {
            self.end
        } else {
            self.begin
        }
    }

    pub fn contains(&self, atom: usize) -> bool {
        self.begin == atom || self.end == atom
    }

    /// Integer order in the stored Kekulé form (aromatic bonds resolve to 1 or 2).
    pub fn kekule_order(&self) -> u8 {
        self.kekule
    }

    /// Direction as seen when walking from `from` to the other end.
    pub fn direction_from(&self, from: usize) -> BondDir {
        if from == self.begin {
            self.direction
        } else {
            self.direction.flipped()
        }
    }
}

#[derive(Debug, Clone)]
struct Canonical {
    smiles: String,
    ranks: Vec<usize>,
}

/// An immutable molecular graph with perceived rings and aromaticity.
#[derive(Debug, Clone)]
pub struct Molecule {
    atoms: Vec<Atom>,
    bonds: Vec<Bond>,
    adjacency: Vec<Vec<(usize, usize)>>,
    rings: Vec<Vec<usize>>,
    ring_aromatic: Vec<bool>,
    atom_ring_count: Vec<u8>,
    atom_smallest_ring: Vec<u8>,
    canonical: OnceLock<Canonical>,
}

impl Molecule {
    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn bonds(&self) -> &[Bond] {
        &self.bonds
    }

    pub fn atom(&self, i: usize) -> &Atom {
        &self.atoms[i]
    }

    pub fn bond(&self, i: usize) -> &Bond {
        &self.bonds[i]
    }

    pub fn num_atoms(&self) -> usize {
        self.atoms.len()
    }

    pub fn num_bonds(&self) -> usize {
        self.bonds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// `(neighbor, bond index)` pairs, neighbors ascending.
    pub fn neighbors(&self, i: usize) -> &[(usize, usize)] {
        &self.adjacency[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].len()
    }

    pub fn bond_between(&self, a: usize, b: usize) -> Option<usize> {
        self.adjacency[a]
            .iter()
            .find(|&&(n, _)| n == b)
            .map(|&(_, bi)| bi)
    }

    /// Sum of Kekulé bond orders at an atom (hydrogens excluded).
    pub fn bond_order_sum(&self, i: usize) -> u8 {
        self.adjacency[i]
            .iter()
            .map(|&(_, b)| self.bonds[b].kekule)
            .sum()
    }

    /// Bond-order sum plus attached hydrogens.
    pub fn valence(&self, i: usize) -> u8 {
        self.bond_order_sum(i) + self.atoms[i].total_h()
    }

    /// Minimum cycle basis; each ring lists its atoms in cyclic order.
    pub fn rings(&self) -> &[Vec<usize>] {
        &self.rings
    }

    pub fn ring_is_aromatic(&self, ring: usize) -> bool {
        self.ring_aromatic[ring]
    }

    pub fn aromatic_ring_count(&self) -> usize {
        self.ring_aromatic.iter().filter(|&&a| a).count()
    }

    /// Number of basis rings containing the atom.
    pub fn atom_ring_count(&self, i: usize) -> usize {
        self.atom_ring_count[i] as usize
    }

    pub fn is_ring_atom(&self, i: usize) -> bool {
        self.adjacency[i]
            .iter()
            .any(|&(_, b)| self.bonds[b].in_ring)
    }

    /// Size of the smallest basis ring containing the atom, if any.
    pub fn smallest_ring_size(&self, i: usize) -> Option<usize> {
        match self.atom_smallest_ring[i] {
            0 => None,
            s => Some(s as usize),
        }
    }

    pub fn total_hydrogens(&self) -> usize {
        self.atoms.iter().map(|a| a.total_h() as usize).sum()
    }

    /// Connected components as sorted atom index lists.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.atoms.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut stack = vec![start];
            let mut comp = Vec::new();
            while let Some(a) = stack.pop() {
                comp.push(a);
                for &(nb, _) in &self.adjacency[a] {
                    if !seen[nb] {
                        seen[nb] = true;
                        stack.push(nb);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.atoms.len() <= 1 || self.components().len() == 1
    }

    fn canonical_data(&self) -> &Canonical {
        self.canonical.get_or_init(|| {
            let (smiles, ranks) = canon::canonicalize(self);
            Canonical { smiles, ranks }
        })
    }

    /// Canonical SMILES, computed once and cached.
    pub fn canonical_smiles(&self) -> &str {
        &self.canonical_data().smiles
    }

    /// Canonical rank of every atom (a permutation of `0..n`).
    pub fn canonical_ranks(&self) -> &[usize] {
        &self.canonical_data().ranks
    }

    /// Editable copy of this molecule.
    pub fn to_builder(&self) -> MolBuilder {
        MolBuilder::from_molecule(self)
    }

    /// Copy of the molecule without any stereo marks.
    pub fn without_stereo(&self) -> Molecule {
        let mut b = self.to_builder();
        b.clear_stereo();
        b.build().expect("stripping stereo keeps a buildable graph")
    }

    /// Number of atoms carrying a tetrahedral mark.
    pub fn marked_stereocenters(&self) -> usize {
        self.atoms
            .iter()
            .filter(|a| a.chirality != Chirality::None)
            .count()
    }

    /// Number of bonds carrying a cis/trans mark.
    pub fn marked_directional_bonds(&self) -> usize {
        self.bonds
            .iter()
            .filter(|b| b.direction != BondDir::None)
            .count()
    }
}

impl PartialEq for Molecule {
    fn eq(&self, other: &Self) -> bool {
        self.canonical_smiles() == other.canonical_smiles()
    }
}

impl Eq for Molecule {}

impl fmt::Display for Molecule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.canonical_smiles())
    }
}

impl std::str::FromStr for Molecule {
    type Err = SmilesError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_smiles(s)
    }
}

/// Canonical SMILES of `m`.
pub fn write_canonical_smiles(m: &Molecule) -> String {
    m.canonical_smiles().to_string()
}

/// Rings and aromaticity are perceived when a molecule is built; this
/// re-runs perception from the Kekulé form and returns a fresh molecule.
pub fn perceive_rings_and_aromaticity(m: &Molecule) -> Molecule {
    let mut b = m.to_builder();
    b.kekulize_in_place(m);
    b.build()
        .expect("a Kekulé form of a built molecule always rebuilds")
}

#[cfg(test)]
mod tests;
