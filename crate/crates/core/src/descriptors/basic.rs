use serde::Serialize;

use super::{crippen_logp_mr, order_free_sum, tpsa};
use crate::molgraph::{BondOrder, Element, Molecule};

const H_MASS: f64 = 1.008;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DescriptorRecord {
    pub mw: f64,
    pub logp: f64,
    pub mr: f64,
    pub tpsa: f64,
    pub hbd: usize,
    pub hba: usize,
    pub rotatable_bonds: usize,
    pub heavy_atoms: usize,
    pub aromatic_rings: usize,
    pub stereocenters_marked: usize,
}

/// Nitrogen bonded to a carbonyl carbon.
fn is_amide_n(m: &Molecule, i: usize) -> bool {
    m.atom(i).element == Element::N
        && m.neighbors(i)
            .iter()
            .any(|&(c, _)| is_carbonyl_carbon(m, c))
}

fn is_carbonyl_carbon(m: &Molecule, c: usize) -> bool {
    m.atom(c).element == Element::C
        && m.neighbors(c)
            .iter()
            .any(|&(o, b)| m.atom(o).element == Element::O && m.bond(b).order == BondOrder::Double)
}

fn hbd(m: &Molecule) -> usize {
    m.atoms()
        .iter()
        .filter(|a| matches!(a.element, Element::N | Element::O) && a.total_h() > 0)
        .count()
}

fn hba(m: &Molecule) -> usize {
    (0..m.num_atoms())
        .filter(|&i| {
            let a = m.atom(i);
            matches!(a.element, Element::N | Element::O)
                && a.formal_charge <= 0
                && !is_amide_n(m, i)
        })
        .count()
}

fn rotatable_bonds(m: &Molecule) -> usize {
    m.bonds()
        .iter()
        .filter(|b| {
            if b.order != BondOrder::Single || b.in_ring {
                return false;
            }
            if m.degree(b.begin) < 2 || m.degree(b.end) < 2 {
                return false;
            }
            let amide = (is_carbonyl_carbon(m, b.begin) && m.atom(b.end).element == Element::N)
                || (is_carbonyl_carbon(m, b.end) && m.atom(b.begin).element == Element::N);
            !amide
        })
        .count()
}

fn molecular_weight(m: &Molecule) -> f64 {
    order_free_sum(
        m.atoms()
            .iter()
            .map(|a| a.element.mass() + f64::from(a.total_h()) * H_MASS),
    )
}

/// Heavy atoms plus hydrogens.
pub fn heavy_atoms_with_h(m: &Molecule) -> usize {
    m.num_atoms() + m.total_hydrogens()
}

pub fn basic_descriptors(m: &Molecule) -> DescriptorRecord {
    let crippen = crippen_logp_mr(m);
    DescriptorRecord {
        mw: molecular_weight(m),
        logp: crippen.logp,
        mr: crippen.mr,
        tpsa: tpsa(m),
        hbd: hbd(m),
        hba: hba(m),
        rotatable_bonds: rotatable_bonds(m),
        heavy_atoms: m.num_atoms(),
        aromatic_rings: m.aromatic_ring_count(),
        stereocenters_marked: m.marked_stereocenters(),
    }
}
