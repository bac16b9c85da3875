//! The seven crossover strategies. Each returns a candidate child or `None`;
//! acceptance checks live in the caller.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::brics::{brics_decompose, compatible_pairs, CutLabel, Fragment};
use super::join::{
    eligible_atoms, eligible_pairs, join, join_removing, role_sites, select_connection_points,
    Heuristic, ReactiveRole,
};
use crate::descriptors::{murcko_atoms, qed};
use crate::molgraph::{MolBuilder, Molecule};
use crate::pattern::Pattern;
use crate::ruleset::pharmacophore_features;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Fragment,
    Scaffold,
    Brics,
    Substructure,
    Pharmacophore,
    MultiParent,
    Template,
}

impl Strategy {
    pub const ALL: [Strategy; 7] = [
        Strategy::Fragment,
        Strategy::Scaffold,
        Strategy::Brics,
        Strategy::Substructure,
        Strategy::Pharmacophore,
        Strategy::MultiParent,
        Strategy::Template,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Fragment => "fragment",
            Strategy::Scaffold => "scaffold",
            Strategy::Brics => "brics",
            Strategy::Substructure => "substructure",
            Strategy::Pharmacophore => "pharmacophore",
            Strategy::MultiParent => "multi_parent",
            Strategy::Template => "template",
        }
    }

    /// Parents consumed by the strategy.
    pub fn arity(self) -> usize {
        if self == Strategy::MultiParent {
            3
        } else {
            2
        }
    }

    /// Whether the strategy picks atoms through a connection heuristic.
    pub fn uses_heuristic(self) -> bool {
        matches!(
            self,
            Strategy::Fragment | Strategy::Brics | Strategy::Pharmacophore | Strategy::MultiParent
        )
    }
}

/// The atoms of `m` flagged in `keep`, hydrogen-capped where bonds were cut.
pub(crate) fn extract(m: &Molecule, keep: &[bool]) -> Option<(Molecule, Vec<Option<usize>>)> {
    let mut b = MolBuilder::from_molecule_kekule(m);
    let remove: Vec<usize> = (0..m.num_atoms()).filter(|&i| !keep[i]).collect();
    let map = b.remove_atoms_capped(&remove);
    Some((b.build().ok()?, map))
}

/// Connected components of the atoms flagged in `mask`.
fn masked_components(m: &Molecule, mask: &[bool]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; m.num_atoms()];
    let mut out = Vec::new();
    for start in 0..m.num_atoms() {
        if !mask[start] || seen[start] {
            continue;
        }
        seen[start] = true;
        let mut stack = vec![start];
        let mut comp = Vec::new();
        while let Some(a) = stack.pop() {
            comp.push(a);
            for &(w, _) in m.neighbors(a) {
                if mask[w] && !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// A group hanging off a scaffold atom.
#[derive(Debug, Clone)]
pub(crate) struct SideChain {
    pub piece: Molecule,
    /// Atom of `piece` that was bonded to the scaffold.
    pub root: usize,
    /// Scaffold atom (parent index) it hung from.
    pub anchor: usize,
}

pub(crate) fn side_chains(m: &Molecule, scaffold: &[bool]) -> Vec<SideChain> {
    let outside: Vec<bool> = scaffold.iter().map(|&s| !s).collect();
    let mut out = Vec::new();
    for comp in masked_components(m, &outside) {
        let Some((root, anchor)) = comp.iter().find_map(|&a| {
            m.neighbors(a)
                .iter()
                .find(|&&(w, _)| scaffold[w])
                .map(|&(w, _)| (a, w))
        }) else {
            continue;
        };
        let mut keep = vec![false; m.num_atoms()];
        for &a in &comp {
            keep[a] = true;
        }
        if let Some((piece, map)) = extract(m, &keep) {
            if let Some(root) = map[root] {
                out.push(SideChain {
                    piece,
                    root,
                    anchor,
                });
            }
        }
    }
    out
}

/// Pieces a donor parent can contribute: its side chains, and the parent
/// minus one terminal atom (attached where that atom was). Falls back to the
/// whole parent with a free attachment point.
fn donor_pieces(m: &Molecule) -> Vec<(Molecule, Option<usize>)> {
    let mut out: Vec<(Molecule, Option<usize>)> = Vec::new();
    if let Some(scaffold) = murcko_atoms(m) {
        out.extend(
            side_chains(m, &scaffold)
                .into_iter()
                .map(|s| (s.piece, Some(s.root))),
        );
    }
    for t in 0..m.num_atoms() {
        if m.degree(t) != 1 || m.num_atoms() < 2 {
            continue;
        }
        let parent = m.neighbors(t)[0].0;
        let mut keep = vec![true; m.num_atoms()];
        keep[t] = false;
        if let Some((piece, map)) = extract(m, &keep) {
            out.push((piece, map[parent]));
        }
    }
    if out.is_empty() {
        out.push((m.clone(), None));
    }
    out
}

fn scaffold_or_self(m: &Molecule) -> Molecule {
    match murcko_atoms(m) {
        Some(mask) => extract(m, &mask).map_or_else(|| m.clone(), |(s, _)| s),
        None => m.clone(),
    }
}

/// Keeps the scaffold of one parent and bonds a piece of the other to it.
pub(crate) fn fragment(
    parents: &[Molecule],
    heuristic: Heuristic,
    rng: &mut impl Rng,
) -> Option<Molecule> {
    let (core_parent, donor) = if rng.gen_bool(0.5) {
        (&parents[0], &parents[1])
    } else {
        (&parents[1], &parents[0])
    };
    let core = scaffold_or_self(core_parent);
    let pieces = donor_pieces(donor);
    let (piece, root) = pieces.choose(rng)?;
    let pairs: Vec<(usize, usize)> = match root {
        Some(r) => eligible_atoms(&core).into_iter().map(|i| (i, *r)).collect(),
        None => eligible_pairs(&core, piece),
    };
    let (ci, pi) = select_connection_points(&core, piece, &pairs, heuristic, rng)?;
    Some(join(&core, ci, piece, pi)?.mol)
}

/// Scaffold atoms ordered by canonical rank.
fn rank_order(m: &Molecule, mask: &[bool]) -> Vec<usize> {
    let ranks = m.canonical_ranks();
    let mut atoms: Vec<usize> = (0..m.num_atoms()).filter(|&i| mask[i]).collect();
    atoms.sort_by_key(|&i| ranks[i]);
    atoms
}

/// The scaffold of one parent carrying the side chains of the other, each
/// placed at the same relative canonical-rank position it had.
pub(crate) fn scaffold(parents: &[Molecule], rng: &mut impl Rng) -> Option<Molecule> {
    let (chains_parent, scaffold_parent) = if rng.gen_bool(0.5) {
        (&parents[0], &parents[1])
    } else {
        (&parents[1], &parents[0])
    };
    let own_mask = murcko_atoms(chains_parent)?;
    let target_mask = murcko_atoms(scaffold_parent)?;
    let (mut cur, _) = extract(scaffold_parent, &target_mask)?;
    let own_order = rank_order(chains_parent, &own_mask);
    let mut targets = rank_order(&cur, &vec![true; cur.num_atoms()]);
    let mut used = vec![false; targets.len()];
    let mut chains = side_chains(chains_parent, &own_mask);
    chains.sort_by_key(|c| chains_parent.canonical_ranks()[c.anchor]);
    for chain in chains {
        let pos = own_order.iter().position(|&a| a == chain.anchor)?;
        let start = pos * targets.len() / own_order.len();
        let slot = (0..targets.len())
            .map(|k| (start + k) % targets.len())
            .find(|&k| !used[k] && cur.atom(targets[k]).total_h() > 0)?;
        let joined = join(&cur, targets[slot], &chain.piece, chain.root)?;
        used[slot] = true;
        targets = targets
            .iter()
            .map(|&t| joined.map_a[t])
            .collect::<Option<Vec<usize>>>()?;
        cur = joined.mol;
    }
    Some(cur)
}

fn with_attachments(set: &[Fragment]) -> Vec<&Fragment> {
    set.iter().filter(|f| !f.attachments.is_empty()).collect()
}

/// One BRICS fragment from each parent, bonded at compatible cut labels.
pub(crate) fn brics(
    parents: &[Molecule],
    heuristic: Heuristic,
    rng: &mut impl Rng,
) -> Option<Molecule> {
    let fa = brics_decompose(&parents[0]).fragments;
    let fb = brics_decompose(&parents[1]).fragments;
    let a = *with_attachments(&fa).choose(rng)?;
    let b = *with_attachments(&fb).choose(rng)?;
    let pairs = compatible_pairs(a, b);
    let (i, j) = select_connection_points(&a.mol, &b.mol, &pairs, heuristic, rng)?;
    Some(join(&a.mol, i, &b.mol, j)?.mol)
}

/// The two sides of `m` across acyclic single bond `bond`: atoms on the
/// side of the bond's first atom.
fn side_of(m: &Molecule, bond: usize) -> Vec<bool> {
    let b = m.bond(bond);
    let mut side = vec![false; m.num_atoms()];
    side[b.begin] = true;
    let mut stack = vec![b.begin];
    while let Some(a) = stack.pop() {
        for &(w, k) in m.neighbors(a) {
            if k != bond && !side[w] {
                side[w] = true;
                stack.push(w);
            }
        }
    }
    side
}

/// Acyclic single bond of `m`, cut at random; returns the kept side and the
/// atom that lost the bond. `larger` chooses which side survives.
fn random_cut(m: &Molecule, larger: bool, rng: &mut impl Rng) -> Option<(Molecule, usize)> {
    let bonds: Vec<usize> = (0..m.num_bonds())
        .filter(|&k| !m.bond(k).in_ring && m.bond(k).kekule_order() == 1)
        .collect();
    let &k = bonds.choose(rng)?;
    let side = side_of(m, k);
    let first = side.iter().filter(|&&s| s).count();
    let second = m.num_atoms() - first;
    let keep_first = if larger {
        first >= second
    } else {
        first < second
    };
    let keep: Vec<bool> = side.iter().map(|&s| s == keep_first).collect();
    let b = m.bond(k);
    let at = if keep_first { b.begin } else { b.end };
    let (piece, map) = extract(m, &keep)?;
    Some((piece, map[at]?))
}

/// The larger side of a cut through the first parent joined to the smaller
/// side of a cut through the second, at the cut atoms.
pub(crate) fn substructure(parents: &[Molecule], rng: &mut impl Rng) -> Option<Molecule> {
    let (body, i) = random_cut(&parents[0], true, rng)?;
    let (group, j) = random_cut(&parents[1], false, rng)?;
    Some(join(&body, i, &group, j)?.mol)
}

fn feature_count(m: &Molecule) -> usize {
    pharmacophore_features(m).iter().filter(|&&f| f).count()
}

/// The feature-richest fragment of the first parent plus a fragment of the
/// second that brings a feature class it lacks. The child must show every
/// feature class of both pieces.
pub(crate) fn pharmacophore(
    parents: &[Molecule],
    heuristic: Heuristic,
    rng: &mut impl Rng,
) -> Option<Molecule> {
    let fa = brics_decompose(&parents[0]).fragments;
    let base = fa
        .iter()
        .enumerate()
        .max_by_key(|(k, f)| {
            (
                feature_count(&f.mol),
                f.mol.num_atoms(),
                std::cmp::Reverse(*k),
            )
        })?
        .1;
    let have = pharmacophore_features(&base.mol);
    let fb = brics_decompose(&parents[1]).fragments;
    let donors: Vec<&Fragment> = fb
        .iter()
        .filter(|f| {
            pharmacophore_features(&f.mol)
                .iter()
                .zip(have)
                .any(|(&new, old)| new && !old)
        })
        .collect();
    let donor = *donors.choose(rng)?;
    let pairs = eligible_pairs(&base.mol, &donor.mol);
    let (i, j) = select_connection_points(&base.mol, &donor.mol, &pairs, heuristic, rng)?;
    let child = join(&base.mol, i, &donor.mol, j)?.mol;
    let wanted = pharmacophore_features(&donor.mol)
        .iter()
        .zip(have)
        .map(|(&x, y)| x || y)
        .collect::<Vec<bool>>();
    let got = pharmacophore_features(&child);
    wanted
        .iter()
        .zip(got)
        .all(|(&w, g)| !w || g)
        .then_some(child)
}

struct Pooled<'a> {
    parent: usize,
    fragment: &'a Fragment,
    score: f64,
}

fn fragment_tournament<'a, 'b>(
    pool: &[&'b Pooled<'a>],
    rng: &mut impl Rng,
) -> Option<&'b Pooled<'a>> {
    let x = *pool.choose(rng)?;
    let y = *pool.choose(rng)?;
    Some(if y.score > x.score { y } else { x })
}

/// Two or three BRICS fragments from distinct parents, drawn by a size-2
/// tournament on fragment QED and joined at compatible cut labels.
pub(crate) fn multi_parent(
    parents: &[Molecule],
    heuristic: Heuristic,
    rng: &mut impl Rng,
) -> Option<Molecule> {
    let sets: Vec<Vec<Fragment>> = parents
        .iter()
        .map(|p| brics_decompose(p).fragments)
        .collect();
    let pool: Vec<Pooled> = sets
        .iter()
        .enumerate()
        .flat_map(|(k, set)| {
            set.iter()
                .filter(|f| !f.attachments.is_empty())
                .map(move |f| Pooled {
                    parent: k,
                    fragment: f,
                    score: qed(&f.mol),
                })
        })
        .collect();
    let all: Vec<&Pooled> = pool.iter().collect();
    let first = fragment_tournament(&all, rng)?;
    let mut cur = first.fragment.mol.clone();
    let mut open: Vec<(usize, CutLabel)> = first.fragment.attachments.clone();
    let mut used = vec![first.parent];
    let mut joins = 0;
    for round in 0..2 {
        if round == 1 && rng.gen_bool(0.5) {
            break;
        }
        let fits = |p: &Pooled| {
            !used.contains(&p.parent)
                && open
                    .iter()
                    .any(|&(_, l)| p.fragment.attachments.iter().any(|&(_, m)| l.compatible(m)))
        };
        let cands: Vec<&Pooled> = pool.iter().filter(|p| fits(p)).collect();
        let Some(next) = fragment_tournament(&cands, rng) else {
            break;
        };
        let pairs: Vec<(usize, usize)> = open
            .iter()
            .flat_map(|&(i, l)| {
                next.fragment
                    .attachments
                    .iter()
                    .filter(move |&&(_, m)| l.compatible(m))
                    .map(move |&(j, _)| (i, j))
            })
            .collect();
        let Some((i, j)) =
            select_connection_points(&cur, &next.fragment.mol, &pairs, heuristic, rng)
        else {
            break;
        };
        let Some(joined) = join(&cur, i, &next.fragment.mol, j) else {
            break;
        };
        open = open
            .iter()
            .filter(|&&(a, _)| a != i)
            .filter_map(|&(a, l)| Some((joined.map_a[a]?, l)))
            .chain(
                next.fragment
                    .attachments
                    .iter()
                    .filter(|&&(b, _)| b != j)
                    .filter_map(|&(b, l)| Some((joined.map_b[b]?, l))),
            )
            .collect();
        used.push(next.parent);
        cur = joined.mol;
        joins += 1;
    }
    (joins > 0).then_some(cur)
}

fn sp3_alcohol_sites(m: &Molecule) -> Vec<(usize, Vec<usize>)> {
    static P: std::sync::OnceLock<Pattern> = std::sync::OnceLock::new();
    let p = P.get_or_init(|| Pattern::parse("[CX4][OX2H1]").expect("built-in pattern"));
    p.mappings(m)
        .into_iter()
        .map(|x| (x[0], vec![x[1]]))
        .collect()
}

/// Amide coupling, esterification or ether formation between the parents,
/// in either direction.
pub(crate) fn template(parents: &[Molecule], rng: &mut impl Rng) -> Option<Molecule> {
    type Site = (usize, Vec<usize>);
    let mut options: Vec<(usize, Site, usize, Site)> = Vec::new();
    for (x, y) in [(0, 1), (1, 0)] {
        let (px, py) = (&parents[x], &parents[y]);
        let acids = role_sites(px, ReactiveRole::AcidCarbon);
        let amines = role_sites(py, ReactiveRole::AmineNitrogen);
        let hydroxyls = role_sites(py, ReactiveRole::HydroxylOxygen);
        for acid in &acids {
            for partner in amines.iter().chain(&hydroxyls) {
                options.push((x, acid.clone(), y, partner.clone()));
            }
        }
        for alcohol in sp3_alcohol_sites(px) {
            for partner in &hydroxyls {
                options.push((x, alcohol.clone(), y, partner.clone()));
            }
        }
    }
    let (x, (i, drop_i), y, (j, drop_j)) = options.choose(rng)?;
    Some(join_removing(&parents[*x], *i, drop_i, &parents[*y], *j, drop_j)?.mol)
}
