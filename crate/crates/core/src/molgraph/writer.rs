//! SMILES writer driven by an atom ranking.

use super::builder::aromatic_organic_h;
use super::smiles::permutation_is_odd;
use super::{BondDir, BondOrder, Chirality, Molecule};

/// Hydrogen count the reader would assign if the atom were written without
/// brackets.
fn organic_h(m: &Molecule, i: usize) -> u8 {
    let atom = m.atom(i);
    if atom.aromatic {
        let s: u8 = m
            .neighbors(i)
            .iter()
            .map(|&(_, b)| match m.bond(b).order {
                BondOrder::Aromatic => 1,
                _ => m.bond(b).kekule_order(),
            })
            .sum();
        return aromatic_organic_h(atom.element, s);
    }
    let s = m.bond_order_sum(i);
    atom.element
        .implicit_valences(0)
        .iter()
        .find(|&&v| v >= s)
        .map(|&v| v - s)
        .unwrap_or(0)
}

fn atom_token(m: &Molecule, i: usize, mark: Chirality, out: &mut String) {
    let atom = m.atom(i);
    let sym = atom.element.symbol();
    let lower;
    let sym = if atom.aromatic {
        lower = sym.to_ascii_lowercase();
        lower.as_str()
    } else {
        sym
    };
    if atom.formal_charge == 0 && mark == Chirality::None && atom.total_h() == organic_h(m, i) {
        out.push_str(sym);
        return;
    }
    out.push('[');
    out.push_str(sym);
    match mark {
        Chirality::Ccw => out.push('@'),
        Chirality::Cw => out.push_str("@@"),
        Chirality::None => {}
    }
    match atom.total_h() {
        0 => {}
        1 => out.push('H'),
        h => {
            out.push('H');
            out.push_str(&h.to_string());
        }
    }
    match atom.formal_charge {
        0 => {}
        1 => out.push('+'),
        -1 => out.push('-'),
        c if c > 0 => {
            out.push('+');
            out.push_str(&c.to_string());
        }
        c => {
            out.push('-');
            out.push_str(&(-c).to_string());
        }
    }
    out.push(']');
}

/// Groups directional bonds that describe the same double-bond geometry.
/// Flipping every mark of one group leaves the geometry unchanged.
fn direction_groups(m: &Molecule) -> Vec<usize> {
    let nb = m.num_bonds();
    let mut parent: Vec<usize> = (0..nb).collect();
    fn find(p: &mut Vec<usize>, x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut c = x;
        while p[c] != r {
            let next = p[c];
            p[c] = r;
            c = next;
        }
        r
    }
    for (d, bond) in m.bonds().iter().enumerate() {
        if bond.order != BondOrder::Double {
            continue;
        }
        let marked: Vec<usize> = [bond.begin, bond.end]
            .iter()
            .flat_map(|&a| m.neighbors(a).iter().map(|&(_, b)| b))
            .filter(|&b| b != d && m.bond(b).direction != BondDir::None)
            .collect();
        for w in marked.windows(2) {
            let (x, y) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
            if x != y {
                parent[x] = y;
            }
        }
    }
    (0..nb).map(|b| find(&mut parent, b)).collect()
}

fn bond_symbol(
    m: &Molecule,
    b: usize,
    from: usize,
    flips: &mut Option<(Vec<usize>, Vec<Option<bool>>)>,
    out: &mut String,
) {
    let bond = m.bond(b);
    let mut dir = bond.direction_from(from);
    if let Some((groups, flip)) = flips.as_mut() {
        if dir != BondDir::None {
            let g = groups[b];
            let f = *flip[g].get_or_insert(dir == BondDir::Down);
            if f {
                dir = dir.flipped();
            }
        }
    }
    match bond.order {
        BondOrder::Aromatic => {}
        BondOrder::Double => out.push('='),
        BondOrder::Triple => out.push('#'),
        BondOrder::Single => match dir {
            BondDir::Up => out.push('/'),
            BondDir::Down => out.push('\\'),
            BondDir::None => {
                if m.atom(bond.begin).aromatic && m.atom(bond.end).aromatic {
                    out.push('-');
                }
            }
        },
    }
}

struct Walk<'a> {
    m: &'a Molecule,
    ranks: &'a [usize],
    visited: Vec<bool>,
    bond_used: Vec<bool>,
    children: Vec<Vec<(usize, usize)>>,
    /// ring bonds at each atom as (partner, bond)
    ring_bonds: Vec<Vec<(usize, usize)>>,
    parent: Vec<Option<(usize, usize)>>,
    emitted: Vec<bool>,
    digit_of_bond: Vec<Option<u32>>,
    digits_in_use: Vec<bool>,
    flips: Option<(Vec<usize>, Vec<Option<bool>>)>,
}

impl<'a> Walk<'a> {
    fn sorted_neighbors(&self, v: usize) -> Vec<(usize, usize)> {
        let mut nb = self.m.neighbors(v).to_vec();
        nb.sort_by_key(|&(w, _)| self.ranks[w]);
        nb
    }

    fn dfs(&mut self, v: usize) {
        self.visited[v] = true;
        for (w, b) in self.sorted_neighbors(v) {
            if self.bond_used[b] {
                continue;
            }
            self.bond_used[b] = true;
            if self.visited[w] {
                self.ring_bonds[v].push((w, b));
                self.ring_bonds[w].push((v, b));
            } else {
                self.children[v].push((w, b));
                self.parent[w] = Some((v, b));
                self.dfs(w);
            }
        }
    }

    fn emit(&mut self, v: usize, out: &mut String) {
        self.emitted[v] = true;
        // closings (partner already written) first, then openings
        let mut rb = self.ring_bonds[v].clone();
        rb.sort_by_key(|&(w, _)| (!self.emitted[w], self.ranks[w]));

        let atom = self.m.atom(v);
        let mut mark = atom.chirality;
        if mark != Chirality::None {
            let mut order: Vec<Option<usize>> = Vec::with_capacity(4);
            if let Some((p, _)) = self.parent[v] {
                order.push(Some(p));
            }
            if atom.total_h() == 1 {
                order.push(None);
            }
            order.extend(rb.iter().map(|&(w, _)| Some(w)));
            order.extend(self.children[v].iter().map(|&(w, _)| Some(w)));
            if permutation_is_odd(&order) {
                mark = mark.flipped();
            }
        }
        atom_token(self.m, v, mark, out);

        for (w, b) in rb {
            if self.emitted[w] {
                let d = self.digit_of_bond[b]
                    .take()
                    .expect("opened ring bond has a digit");
                self.digits_in_use[d as usize] = false;
                push_digit(d, out);
            } else {
                let d = (1..self.digits_in_use.len())
                    .find(|&d| !self.digits_in_use[d])
                    .expect("at most 99 open ring bonds") as u32;
                self.digits_in_use[d as usize] = true;
                self.digit_of_bond[b] = Some(d);
                bond_symbol(self.m, b, v, &mut self.flips, out);
                push_digit(d, out);
            }
        }
        let kids = self.children[v].clone();
        let last = kids.len().saturating_sub(1);
        for (k, (w, b)) in kids.into_iter().enumerate() {
            if k < last {
                out.push('(');
            }
            bond_symbol(self.m, b, v, &mut self.flips, out);
            self.emit(w, out);
            if k < last {
                out.push(')');
            }
        }
    }
}

fn push_digit(d: u32, out: &mut String) {
    if d < 10 {
        out.push(char::from(b'0' + d as u8));
    } else {
        out.push('%');
        out.push_str(&format!("{d:02}"));
    }
}

/// Writes SMILES visiting atoms in the order given by `ranks` (lower first).
/// Any ranking yields a valid SMILES of the same molecule.
pub fn write_smiles_with_ranks(m: &Molecule, ranks: &[usize]) -> String {
    write_smiles(m, ranks, false)
}

/// With `normalize_directions`, each group of cis/trans marks is flipped so
/// that its first written mark is `/`.
pub(crate) fn write_smiles(m: &Molecule, ranks: &[usize], normalize_directions: bool) -> String {
    let n = m.num_atoms();
    assert_eq!(ranks.len(), n, "one rank per atom");
    let mut walk = Walk {
        m,
        ranks,
        visited: vec![false; n],
        bond_used: vec![false; m.num_bonds()],
        children: vec![Vec::new(); n],
        ring_bonds: vec![Vec::new(); n],
        parent: vec![None; n],
        emitted: vec![false; n],
        digit_of_bond: vec![None; m.num_bonds()],
        digits_in_use: vec![false; 100],
        flips: (normalize_directions && m.marked_directional_bonds() > 0)
            .then(|| (direction_groups(m), vec![None; m.num_bonds()])),
    };
    let mut starts: Vec<usize> = (0..n).collect();
    starts.sort_by_key(|&i| ranks[i]);
    let mut roots = Vec::new();
    for &s in &starts {
        if !walk.visited[s] {
            roots.push(s);
            walk.dfs(s);
        }
    }
    let mut out = String::with_capacity(n * 2);
    for (k, r) in roots.into_iter().enumerate() {
        if k > 0 {
            out.push('.');
        }
        walk.emit(r, &mut out);
    }
    out
}
