//! Bonding two molecules together and choosing where.

use std::sync::OnceLock;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::descriptors::environment_ids;
use crate::molgraph::{check_validity, BondOrder, Element, MolBuilder, Molecule};
use crate::pattern::Pattern;
use crate::ruleset::pharmacophore_atoms;

/// A two-molecule join with the old-to-new atom maps of both inputs.
#[derive(Debug, Clone)]
pub struct Joined {
    pub mol: Molecule,
    pub map_a: Vec<Option<usize>>,
    pub map_b: Vec<Option<usize>>,
}

/// Leaving group on `i`: a halogen on carbon, or the hydroxyl of a carboxyl
/// carbon. Either is dropped when `i` forms a new bond.
pub fn leaving_group(m: &Molecule, i: usize) -> Option<usize> {
    if m.atom(i).element != Element::C {
        return None;
    }
    let single_terminal = |w: usize, b: usize| {
        m.degree(w) == 1 && m.bond(b).order == BondOrder::Single && m.atom(w).formal_charge == 0
    };
    let carbonyl = m
        .neighbors(i)
        .iter()
        .any(|&(w, b)| m.atom(w).element == Element::O && m.bond(b).order == BondOrder::Double);
    m.neighbors(i)
        .iter()
        .filter(|&&(w, b)| single_terminal(w, b))
        .filter(|&&(w, _)| {
            let a = m.atom(w);
            a.element.is_halogen() || (carbonyl && a.element == Element::O && a.total_h() == 1)
        })
        .map(|&(w, _)| w)
        .min()
}

/// Atoms that can take one more single bond: neutral C, N, O or S with a
/// hydrogen or a leaving group.
pub fn eligible(m: &Molecule, i: usize) -> bool {
    let a = m.atom(i);
    matches!(a.element, Element::C | Element::N | Element::O | Element::S)
        && a.formal_charge == 0
        && (a.total_h() > 0 || leaving_group(m, i).is_some())
}

pub fn eligible_atoms(m: &Molecule) -> Vec<usize> {
    (0..m.num_atoms()).filter(|&i| eligible(m, i)).collect()
}

/// Heteroatom–heteroatom links are not formed.
fn bondable(a: &Molecule, i: usize, b: &Molecule, j: usize) -> bool {
    eligible(a, i)
        && eligible(b, j)
        && (a.atom(i).element == Element::C || b.atom(j).element == Element::C)
}

pub fn eligible_pairs(a: &Molecule, b: &Molecule) -> Vec<(usize, usize)> {
    let eb = eligible_atoms(b);
    eligible_atoms(a)
        .into_iter()
        .flat_map(|i| eb.iter().map(move |&j| (i, j)))
        .filter(|&(i, j)| bondable(a, i, b, j))
        .collect()
}

/// Joins atom `ai` of `a` to atom `bi` of `b` with a single bond after
/// deleting the listed atoms. Bracket atoms that lose nothing give up one
/// hydrogen. `None` unless the product is valid and connected.
pub fn join_removing(
    a: &Molecule,
    ai: usize,
    drop_a: &[usize],
    b: &Molecule,
    bi: usize,
    drop_b: &[usize],
) -> Option<Joined> {
    let mut builder = MolBuilder::from_molecule_kekule(a);
    let offset = builder.append(&MolBuilder::from_molecule_kekule(b));
    let bj = bi + offset;
    for (atom, dropped) in [(ai, drop_a), (bj, drop_b)] {
        if dropped.is_empty() && builder.atom(atom).bracket {
            let h = &mut builder.atom_mut(atom).explicit_h;
            *h = h.checked_sub(1)?;
        }
    }
    builder.add_bond(ai, bj, BondOrder::Single).ok()?;
    let drop: Vec<usize> = drop_a
        .iter()
        .copied()
        .chain(drop_b.iter().map(|&x| x + offset))
        .collect();
    let map = builder.remove_atoms(&drop);
    let mol = builder.build().ok()?;
    if !check_validity(&mol).valid || !mol.is_connected() {
        return None;
    }
    Some(Joined {
        mol,
        map_a: map[..a.num_atoms()].to_vec(),
        map_b: map[offset..].to_vec(),
    })
}

/// [`join_removing`] with leaving groups dropped automatically.
pub fn join(a: &Molecule, ai: usize, b: &Molecule, bi: usize) -> Option<Joined> {
    let da: Vec<usize> = leaving_group(a, ai).into_iter().collect();
    let db: Vec<usize> = leaving_group(b, bi).into_iter().collect();
    join_removing(a, ai, &da, b, bi, &db)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Heuristic {
    BestMatch,
    ReactiveGroups,
    MinimizeStrain,
    PreserveFeatures,
}

impl Heuristic {
    pub const ALL: [Heuristic; 4] = [
        Heuristic::BestMatch,
        Heuristic::ReactiveGroups,
        Heuristic::MinimizeStrain,
        Heuristic::PreserveFeatures,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Heuristic::BestMatch => "best_match",
            Heuristic::ReactiveGroups => "reactive_groups",
            Heuristic::MinimizeStrain => "minimize_strain",
            Heuristic::PreserveFeatures => "preserve_features",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReactiveRole {
    AcidCarbon,
    AmineNitrogen,
    HydroxylOxygen,
    HalideCarbon,
}

const ROLE_PATTERNS: [(ReactiveRole, &str); 4] = [
    (ReactiveRole::AcidCarbon, "[CX3](=O)[OX2H1]"),
    (
        ReactiveRole::AmineNitrogen,
        "[NX3;H1,H2;+0;!$(N[#6]=[O,S,N]);!$(N[#7,#8,#16])]",
    ),
    (ReactiveRole::HydroxylOxygen, "[OX2H1][#6;!$([#6]=[O,S,N])]"),
    (ReactiveRole::HalideCarbon, "[#6][Cl,Br,I]"),
];

/// Pairs that form a bond in ordinary coupling chemistry.
pub const REACTIVE_PAIRS: [(ReactiveRole, ReactiveRole); 4] = [
    (ReactiveRole::AcidCarbon, ReactiveRole::AmineNitrogen),
    (ReactiveRole::AcidCarbon, ReactiveRole::HydroxylOxygen),
    (ReactiveRole::HalideCarbon, ReactiveRole::AmineNitrogen),
    (ReactiveRole::HalideCarbon, ReactiveRole::HydroxylOxygen),
];

fn role_patterns() -> &'static Vec<(ReactiveRole, Pattern)> {
    static P: OnceLock<Vec<(ReactiveRole, Pattern)>> = OnceLock::new();
    P.get_or_init(|| {
        ROLE_PATTERNS
            .iter()
            .map(|&(r, s)| (r, Pattern::parse(s).expect("built-in pattern")))
            .collect()
    })
}

/// Reactive roles of every atom.
pub fn reactive_roles(m: &Molecule) -> Vec<Vec<ReactiveRole>> {
    let mut out = vec![Vec::new(); m.num_atoms()];
    for (role, p) in role_patterns() {
        for a in p.anchor_atoms(m) {
            out[a].push(*role);
        }
    }
    out
}

/// Role-matched atoms of `m` as (atom, leaving atoms) pairs.
pub(crate) fn role_sites(m: &Molecule, role: ReactiveRole) -> Vec<(usize, Vec<usize>)> {
    let p = &role_patterns()
        .iter()
        .find(|(r, _)| *r == role)
        .expect("role pattern")
        .1;
    let mut out: Vec<(usize, Vec<usize>)> = p
        .mappings(m)
        .into_iter()
        .map(|mapping| match role {
            ReactiveRole::AcidCarbon => (mapping[0], vec![mapping[2]]),
            ReactiveRole::HalideCarbon => (mapping[0], vec![mapping[1]]),
            _ => (mapping[0], Vec::new()),
        })
        .collect();
    out.sort();
    out.dedup();
    out
}

/// Picks the best-scoring bondable pair among `pairs` under `heuristic`,
/// breaking ties at random. `None` when no pair qualifies.
pub fn select_connection_points(
    a: &Molecule,
    b: &Molecule,
    pairs: &[(usize, usize)],
    heuristic: Heuristic,
    rng: &mut impl Rng,
) -> Option<(usize, usize)> {
    let mut pairs: Vec<(usize, usize)> = pairs
        .iter()
        .copied()
        .filter(|&(i, j)| bondable(a, i, b, j))
        .collect();
    pairs.sort_unstable();
    pairs.dedup();
    let scores: Vec<i64> = match heuristic {
        Heuristic::BestMatch => {
            let ea = environment_ids(a, 1);
            let eb = environment_ids(b, 1);
            pairs
                .iter()
                .map(|&(i, j)| {
                    let (x, y) = (a.atom(i), b.atom(j));
                    i64::from(x.element == y.element)
                        + i64::from(x.aromatic == y.aromatic)
                        + i64::from(ea[0][i] == eb[0][j])
                        + i64::from(ea[1][i] == eb[1][j])
                })
                .collect()
        }
        Heuristic::ReactiveGroups => {
            let ra = reactive_roles(a);
            let rb = reactive_roles(b);
            pairs
                .iter()
                .map(|&(i, j)| {
                    let hit = REACTIVE_PAIRS.iter().any(|&(p, q)| {
                        (ra[i].contains(&p) && rb[j].contains(&q))
                            || (ra[i].contains(&q) && rb[j].contains(&p))
                    });
                    i64::from(hit)
                })
                .collect()
        }
        Heuristic::MinimizeStrain => {
            let room = |m: &Molecule, i: usize| i64::from(m.atom(i).total_h()) - m.degree(i) as i64;
            pairs
                .iter()
                .map(|&(i, j)| room(a, i) + room(b, j))
                .collect()
        }
        Heuristic::PreserveFeatures => {
            let fa = pharmacophore_atoms(a);
            let fb = pharmacophore_atoms(b);
            pairs.retain(|&(i, j)| !fa[i] && !fb[j]);
            vec![0; pairs.len()]
        }
    };
    let best = *scores.iter().max()?;
    let top: Vec<(usize, usize)> = pairs
        .iter()
        .zip(&scores)
        .filter(|(_, &s)| s == best)
        .map(|(&p, _)| p)
        .collect();
    top.choose(rng).copied()
}
