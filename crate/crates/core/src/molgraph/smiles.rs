//! SMILES reader.

use std::collections::HashMap;

use thiserror::Error;

use super::builder::MolBuilder;
use super::{Atom, BondDir, BondOrder, Chirality, Element, Molecule};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SmilesError {
    #[error("empty SMILES")]
    Empty,
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unclosed ring bond {0}")]
    UnclosedRing(u32),
    #[error("unclosed branch opened at position {0}")]
    UnclosedBranch(usize),
    #[error("unknown element '{symbol}' at position {pos}")]
    UnknownElement { symbol: String, pos: usize },
    #[error("valence violation: {0}")]
    Valence(String),
}

fn syntax(pos: usize, msg: impl Into<String>) -> SmilesError {
    SmilesError::Syntax {
        pos,
        msg: msg.into(),
    }
}

/// Neighbor slot in written order, used to interpret `@`/`@@`.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Slot {
    Atom(usize),
    Hydrogen,
    PendingRing,
}

#[derive(Debug, Clone, Copy)]
struct BondSpec {
    order: Option<BondOrder>,
    dir: BondDir,
    pos: usize,
}

struct OpenRing {
    atom: usize,
    bond: Option<BondSpec>,
    slot: usize,
}

struct ParsedAtom {
    atom: Atom,
    is_hydrogen: bool,
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
    atoms: Vec<ParsedAtom>,
    slots: Vec<Vec<Slot>>,
    bonds: Vec<(usize, usize, Option<BondOrder>, BondDir)>,
    rings: HashMap<u32, OpenRing>,
}

/// Parses a SMILES string into a molecule with hydrogens, rings and
/// aromaticity perceived.
pub fn parse_smiles(text: &str) -> Result<Molecule, SmilesError> {
    let text = text.trim();
    if text.is_empty() {
        return Err(SmilesError::Empty);
    }
    if let Some(p) = text
        .bytes()
        .position(|c| !c.is_ascii() || c.is_ascii_whitespace())
    {
        return Err(syntax(p, "unexpected character"));
    }
    let mut p = Parser {
        s: text.as_bytes(),
        pos: 0,
        atoms: Vec::new(),
        slots: Vec::new(),
        bonds: Vec::new(),
        rings: HashMap::new(),
    };
    p.run()?;
    p.finish()
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<u8> {
        self.s.get(self.pos).copied()
    }

    fn run(&mut self) -> Result<(), SmilesError> {
        let mut prev: Option<usize> = None;
        let mut branch_stack: Vec<(Option<usize>, usize)> = Vec::new();
        let mut pending: Option<BondSpec> = None;
        let mut dot_pending = false;
        while let Some(c) = self.peek() {
            let here = self.pos;
            match c {
                b'(' => {
                    if prev.is_none() || pending.is_some() {
                        return Err(syntax(here, "branch without a preceding atom"));
                    }
                    branch_stack.push((prev, here));
                    self.pos += 1;
                }
                b')' => {
                    let Some((p, _)) = branch_stack.pop() else {
                        return Err(syntax(here, "unmatched ')'"));
                    };
                    if pending.is_some() {
                        return Err(syntax(here, "bond symbol before ')'"));
                    }
                    prev = p;
                    self.pos += 1;
                }
                b'-' | b'=' | b'#' | b':' | b'/' | b'\\' | b'$' => {
                    if pending.is_some() {
                        return Err(syntax(here, "two consecutive bond symbols"));
                    }
                    let (order, dir) = match c {
                        b'-' => (Some(BondOrder::Single), BondDir::None),
                        b'=' => (Some(BondOrder::Double), BondDir::None),
                        b'#' => (Some(BondOrder::Triple), BondDir::None),
                        b':' => (Some(BondOrder::Aromatic), BondDir::None),
                        b'/' => (Some(BondOrder::Single), BondDir::Up),
                        b'\\' => (Some(BondOrder::Single), BondDir::Down),
                        _ => return Err(syntax(here, "quadruple bonds are not supported")),
                    };
                    pending = Some(BondSpec {
                        order,
                        dir,
                        pos: here,
                    });
                    self.pos += 1;
                }
                b'.' => {
                    if pending.is_some() {
                        return Err(syntax(here, "bond symbol before '.'"));
                    }
                    if prev.is_none() {
                        return Err(syntax(here, "'.' without a preceding atom"));
                    }
                    prev = None;
                    dot_pending = true;
                    self.pos += 1;
                }
                b'0'..=b'9' | b'%' => {
                    let Some(atom) = prev else {
                        return Err(syntax(here, "ring bond without a preceding atom"));
                    };
                    let num = self.ring_number()?;
                    self.ring_bond(atom, num, pending.take(), here)?;
                }
                _ => {
                    let idx = self.atom()?;
                    if let Some(p) = prev {
                        let spec = pending.take();
                        self.connect(p, idx, spec, here)?;
                    } else if let Some(spec) = pending.take() {
                        return Err(syntax(spec.pos, "bond symbol without a preceding atom"));
                    }
                    if self.atoms[idx].atom.bracket && self.atoms[idx].atom.explicit_h > 0 {
                        self.slots[idx].push(Slot::Hydrogen);
                    }
                    dot_pending = false;
                    prev = Some(idx);
                }
            }
        }
        if let Some(spec) = pending {
            return Err(syntax(spec.pos, "dangling bond symbol"));
        }
        if dot_pending {
            return Err(syntax(self.s.len(), "dangling '.'"));
        }
        if let Some((_, pos)) = branch_stack.pop() {
            return Err(SmilesError::UnclosedBranch(pos));
        }
        if let Some(num) = self.rings.keys().min() {
            return Err(SmilesError::UnclosedRing(*num));
        }
        Ok(())
    }

    fn ring_number(&mut self) -> Result<u32, SmilesError> {
        let here = self.pos;
        if self.peek() == Some(b'%') {
            let d = self.s.get(here + 1..here + 3);
            match d {
                Some(d) if d.iter().all(u8::is_ascii_digit) => {
                    self.pos += 3;
                    Ok(((d[0] - b'0') * 10 + (d[1] - b'0')) as u32)
                }
                _ => Err(syntax(here, "'%' must be followed by two digits")),
            }
        } else {
            self.pos += 1;
            Ok((self.s[here] - b'0') as u32)
        }
    }

    fn connect(
        &mut self,
        a: usize,
        b: usize,
        spec: Option<BondSpec>,
        pos: usize,
    ) -> Result<(), SmilesError> {
        if self
            .bonds
            .iter()
            .any(|&(x, y, _, _)| (x == a && y == b) || (x == b && y == a))
        {
            return Err(syntax(pos, "duplicate bond"));
        }
        let (order, dir) = match spec {
            Some(s) => (s.order, s.dir),
            None => (None, BondDir::None),
        };
        self.bonds.push((a, b, order, dir));
        self.slots[a].push(Slot::Atom(b));
        self.slots[b].push(Slot::Atom(a));
        Ok(())
    }

    fn ring_bond(
        &mut self,
        atom: usize,
        num: u32,
        spec: Option<BondSpec>,
        pos: usize,
    ) -> Result<(), SmilesError> {
        match self.rings.remove(&num) {
            None => {
                self.slots[atom].push(Slot::PendingRing);
                let slot = self.slots[atom].len() - 1;
                self.rings.insert(
                    num,
                    OpenRing {
                        atom,
                        bond: spec,
                        slot,
                    },
                );
                Ok(())
            }
            Some(open) => {
                if open.atom == atom {
                    return Err(syntax(pos, "ring bond to itself"));
                }
                if self.bonds.iter().any(|&(x, y, _, _)| {
                    (x == atom && y == open.atom) || (x == open.atom && y == atom)
                }) {
                    return Err(syntax(pos, "ring closure duplicates an existing bond"));
                }
                // A symbol at either end applies; the direction is read from
                // the atom where the symbol is written.
                let (begin, end, order, dir) = match (open.bond, spec) {
                    (Some(o), Some(c)) => {
                        if o.order != c.order {
                            return Err(syntax(pos, "conflicting ring-closure bond symbols"));
                        }
                        (open.atom, atom, o.order, o.dir)
                    }
                    (Some(o), None) => (open.atom, atom, o.order, o.dir),
                    (None, Some(c)) => (atom, open.atom, c.order, c.dir),
                    (None, None) => (open.atom, atom, None, BondDir::None),
                };
                self.bonds.push((begin, end, order, dir));
                self.slots[open.atom][open.slot] = Slot::Atom(atom);
                self.slots[atom].push(Slot::Atom(open.atom));
                Ok(())
            }
        }
    }

    fn push_atom(&mut self, atom: Atom, is_hydrogen: bool) -> usize {
        self.atoms.push(ParsedAtom { atom, is_hydrogen });
        self.slots.push(Vec::new());
        self.atoms.len() - 1
    }

    fn atom(&mut self) -> Result<usize, SmilesError> {
        let here = self.pos;
        let c = self.s[here];
        if c == b'[' {
            return self.bracket_atom();
        }
        let two = self.s.get(here..here + 2);
        let (el, aromatic, len) = match (c, two) {
            (b'C', Some(b"Cl")) => (Element::Cl, false, 2),
            (b'B', Some(b"Br")) => (Element::Br, false, 2),
            (b'B', _) => (Element::B, false, 1),
            (b'C', _) => (Element::C, false, 1),
            (b'N', _) => (Element::N, false, 1),
            (b'O', _) => (Element::O, false, 1),
            (b'P', _) => (Element::P, false, 1),
            (b'S', _) => (Element::S, false, 1),
            (b'F', _) => (Element::F, false, 1),
            (b'I', _) => (Element::I, false, 1),
            (b'b', _) => (Element::B, true, 1),
            (b'c', _) => (Element::C, true, 1),
            (b'n', _) => (Element::N, true, 1),
            (b'o', _) => (Element::O, true, 1),
            (b'p', _) => (Element::P, true, 1),
            (b's', _) => (Element::S, true, 1),
            (b'*', _) => {
                return Err(SmilesError::UnknownElement {
                    symbol: "*".into(),
                    pos: here,
                })
            }
            _ if c.is_ascii_alphabetic() => {
                let mut sym = String::from(c as char);
                if let Some(&d) = self.s.get(here + 1) {
                    if c.is_ascii_uppercase() && d.is_ascii_lowercase() {
                        sym.push(d as char);
                    }
                }
                return Err(SmilesError::UnknownElement {
                    symbol: sym,
                    pos: here,
                });
            }
            _ => {
                return Err(syntax(
                    here,
                    format!("unexpected character '{}'", c as char),
                ))
            }
        };
        self.pos += len;
        let mut atom = Atom::new(el);
        atom.aromatic = aromatic;
        Ok(self.push_atom(atom, false))
    }

    fn number(&mut self) -> Option<u32> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == start {
            None
        } else {
            std::str::from_utf8(&self.s[start..self.pos])
                .ok()
                .and_then(|t| t.parse().ok())
        }
    }

    fn bracket_atom(&mut self) -> Result<usize, SmilesError> {
        let open = self.pos;
        self.pos += 1;
        if self.peek().is_some_and(|c| c.is_ascii_digit()) {
            return Err(syntax(self.pos, "isotopes are not supported"));
        }
        let here = self.pos;
        let c = self
            .peek()
            .ok_or(syntax(here, "unterminated bracket atom"))?;
        if !c.is_ascii_alphabetic() {
            return Err(syntax(here, "expected an element symbol"));
        }
        let mut sym = String::from(c as char);
        self.pos += 1;
        if c.is_ascii_uppercase() {
            if let Some(d) = self.peek() {
                if d.is_ascii_lowercase() {
                    let cand = format!("{}{}", c as char, d as char);
                    // "Cl", "Br" etc.; a lowercase letter after an element is
                    // never anything else inside brackets.
                    sym = cand;
                    self.pos += 1;
                }
            }
        } else if let Some(d) = self.peek() {
            // aromatic two-letter symbols such as "se" are unsupported
            if d.is_ascii_lowercase() && matches!((c, d), (b's', b'e') | (b'a', b's')) {
                sym.push(d as char);
                return Err(SmilesError::UnknownElement {
                    symbol: sym,
                    pos: here,
                });
            }
        }
        let (element, aromatic, is_h) = if sym == "H" {
            (Element::C, false, true)
        } else if c.is_ascii_lowercase() {
            match Element::from_symbol(&sym.to_ascii_uppercase()) {
                Some(e) if e.can_be_aromatic() => (e, true, false),
                _ => {
                    return Err(SmilesError::UnknownElement {
                        symbol: sym,
                        pos: here,
                    })
                }
            }
        } else {
            match Element::from_symbol(&sym) {
                Some(e) => (e, false, false),
                None => {
                    return Err(SmilesError::UnknownElement {
                        symbol: sym,
                        pos: here,
                    })
                }
            }
        };
        let mut chirality = Chirality::None;
        if self.peek() == Some(b'@') {
            self.pos += 1;
            chirality = Chirality::Ccw;
            if self.peek() == Some(b'@') {
                self.pos += 1;
                chirality = Chirality::Cw;
            }
            if self
                .peek()
                .is_some_and(|c| c.is_ascii_uppercase() && c != b'H')
            {
                return Err(syntax(
                    self.pos,
                    "only tetrahedral @/@@ stereo is supported",
                ));
            }
        }
        let mut h = 0u8;
        if self.peek() == Some(b'H') {
            self.pos += 1;
            h = self.number().unwrap_or(1).min(8) as u8;
        }
        let mut charge: i32 = 0;
        if let Some(sign @ (b'+' | b'-')) = self.peek() {
            let unit = if sign == b'+' { 1 } else { -1 };
            self.pos += 1;
            if let Some(n) = self.number() {
                charge = unit * n as i32;
            } else {
                charge = unit;
                while self.peek() == Some(sign) {
                    self.pos += 1;
                    charge += unit;
                }
            }
        }
        if self.peek() == Some(b':') {
            return Err(syntax(self.pos, "atom classes are not supported"));
        }
        if self.peek() != Some(b']') {
            return Err(syntax(self.pos, "expected ']'"));
        }
        self.pos += 1;
        if !(-4..=4).contains(&charge) {
            return Err(syntax(open, "charge out of range"));
        }
        if is_h {
            if h != 0 || charge != 0 || chirality != Chirality::None {
                return Err(SmilesError::UnknownElement {
                    symbol: "H".into(),
                    pos: here,
                });
            }
            return Ok(self.push_atom(Atom::new(Element::C), true));
        }
        let atom = Atom {
            element,
            formal_charge: charge as i8,
            explicit_h: h,
            implicit_h: 0,
            aromatic,
            chirality,
            bracket: true,
        };
        Ok(self.push_atom(atom, false))
    }

    fn finish(self) -> Result<Molecule, SmilesError> {
        let Parser {
            atoms,
            mut slots,
            bonds,
            ..
        } = self;
        let n = atoms.len();
        // fold explicit [H] atoms into their single neighbor
        let mut h_target: Vec<Option<usize>> = vec![None; n];
        for (i, pa) in atoms.iter().enumerate() {
            if !pa.is_hydrogen {
                continue;
            }
            let nbrs: Vec<usize> = bonds
                .iter()
                .filter_map(|&(a, b, _, _)| {
                    if a == i {
                        Some(b)
                    } else if b == i {
                        Some(a)
                    } else {
                        None
                    }
                })
                .collect();
            match nbrs.as_slice() {
                [t] if !atoms[*t].is_hydrogen => h_target[i] = Some(*t),
                _ => {
                    return Err(SmilesError::UnknownElement {
                        symbol: "H".into(),
                        pos: 0,
                    })
                }
            }
        }
        let mut map = vec![usize::MAX; n];
        let mut next = 0;
        for i in 0..n {
            if !atoms[i].is_hydrogen {
                map[i] = next;
                next += 1;
            }
        }
        let mut builder = MolBuilder::new();
        for pa in atoms.iter().filter(|pa| !pa.is_hydrogen) {
            builder.add_atom(pa.atom.clone());
        }
        for i in 0..n {
            if let Some(t) = h_target[i] {
                builder.atoms[map[t]].explicit_h += 1;
                for s in &mut slots[t] {
                    if *s == Slot::Atom(i) {
                        *s = Slot::Hydrogen;
                    }
                }
            }
        }
        for &(a, b, order, dir) in &bonds {
            if atoms[a].is_hydrogen || atoms[b].is_hydrogen {
                continue;
            }
            let order = order.unwrap_or(if atoms[a].atom.aromatic && atoms[b].atom.aromatic {
                BondOrder::Aromatic
            } else {
                BondOrder::Single
            });
            builder
                .add_bond_raw(map[a], map[b], order, dir)
                .map_err(|e| syntax(0, e.to_string()))?;
        }
        // tetrahedral marks: re-express relative to the reference order
        for i in 0..n {
            if atoms[i].is_hydrogen || atoms[i].atom.chirality == Chirality::None {
                continue;
            }
            let written: Vec<Option<usize>> = slots[i]
                .iter()
                .filter_map(|s| match s {
                    Slot::Atom(j) => Some(Some(map[*j])),
                    Slot::Hydrogen => Some(None),
                    Slot::PendingRing => None,
                })
                .collect();
            let target = &mut builder.atoms[map[i]];
            let h_slots = written.iter().filter(|s| s.is_none()).count();
            if written.len() != 4 || h_slots > 1 {
                target.chirality = Chirality::None;
                continue;
            }
            if permutation_is_odd(&written) {
                target.chirality = target.chirality.flipped();
            }
        }
        builder
            .build()
            .map_err(|e| SmilesError::Valence(e.to_string()))
    }
}

/// Parity of the permutation taking `order` to the reference order
/// (hydrogen first, then ascending atom index).
pub(crate) fn permutation_is_odd(order: &[Option<usize>]) -> bool {
    let key = |s: &Option<usize>| s.map_or(0, |v| v + 1);
    let mut inversions = 0;
    for i in 0..order.len() {
        for j in i + 1..order.len() {
            if key(&order[i]) > key(&order[j]) {
                inversions += 1;
            }
        }
    }
    inversions % 2 == 1
}
