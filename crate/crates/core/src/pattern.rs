//! SMARTS substructure patterns.
//!
//! Supported: atom primitives `*`, `a`, `A`, element symbols (aliphatic and
//! aromatic), `#n`, `H`, `D`, `X`, `v`, `R`, `r`, `x`, charges and recursive
//! `$(...)`; bond primitives `- = # : ~ @ / \`; the logical operators
//! `! & , ;`; branches, ring closures and `.` between components.
//! Chirality marks in patterns are accepted and ignored.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::molgraph::{BondOrder, Molecule};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("bad pattern '{pattern}' at {pos}: {msg}")]
pub struct PatternError {
    pub pattern: String,
    pub pos: usize,
    pub msg: String,
}

const ELEMENTS: [&str; 86] = [
    "H", "He", "Li", "Be", "B", "C", "N", "O", "F", "Ne", "Na", "Mg", "Al", "Si", "P", "S", "Cl",
    "Ar", "K", "Ca", "Sc", "Ti", "V", "Cr", "Mn", "Fe", "Co", "Ni", "Cu", "Zn", "Ga", "Ge", "As",
    "Se", "Br", "Kr", "Rb", "Sr", "Y", "Zr", "Nb", "Mo", "Tc", "Ru", "Rh", "Pd", "Ag", "Cd", "In",
    "Sn", "Sb", "Te", "I", "Xe", "Cs", "Ba", "La", "Ce", "Pr", "Nd", "Pm", "Sm", "Eu", "Gd", "Tb",
    "Dy", "Ho", "Er", "Tm", "Yb", "Lu", "Hf", "Ta", "W", "Re", "Os", "Ir", "Pt", "Au", "Hg", "Tl",
    "Pb", "Bi", "Po", "At", "Rn",
];

fn atomic_number_of(sym: &str) -> Option<u8> {
    ELEMENTS.iter().position(|&e| e == sym).map(|p| p as u8 + 1)
}

#[derive(Debug, Clone)]
enum AtomPrim {
    Any,
    Aromatic,
    Aliphatic,
    Element { z: u8, aromatic: Option<bool> },
    AtomicNumber(u8),
    TotalH(u8),
    Degree(u8),
    Connectivity(u8),
    Valence(u8),
    RingCount(Option<u8>),
    RingSize(Option<u8>),
    RingConnectivity(Option<u8>),
    Charge(i8),
    Recursive(Box<Pattern>),
}

#[derive(Debug, Clone)]
enum Expr<P> {
    Prim(P),
    Not(Box<Expr<P>>),
    And(Vec<Expr<P>>),
    Or(Vec<Expr<P>>),
}

impl<P> Expr<P> {
    fn eval(&self, f: &impl Fn(&P) -> bool) -> bool {
        match self {
            Expr::Prim(p) => f(p),
            Expr::Not(e) => !e.eval(f),
            Expr::And(v) => v.iter().all(|e| e.eval(f)),
            Expr::Or(v) => v.iter().any(|e| e.eval(f)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum BondPrim {
    Single,
    Double,
    Triple,
    Aromatic,
    Any,
    Ring,
}

#[derive(Debug, Clone)]
enum BondExpr {
    /// no bond symbol written: single or aromatic
    Implicit,
    Expr(Expr<BondPrim>),
}

#[derive(Debug, Clone)]
struct PatternBond {
    a: usize,
    b: usize,
    expr: BondExpr,
}

/// A compiled SMARTS pattern.
#[derive(Debug, Clone)]
pub struct Pattern {
    source: String,
    atoms: Vec<Expr<AtomPrim>>,
    bonds: Vec<PatternBond>,
    /// bonds of each atom to atoms with a smaller index
    back: Vec<Vec<(usize, usize)>>,
}

struct Parser<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: impl Into<String>) -> PatternError {
        PatternError {
            pattern: self.src.to_string(),
            pos: self.pos,
            msg: msg.into(),
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn number(&mut self) -> Option<u32> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == start {
            None
        } else {
            self.src[start..self.pos].parse().ok()
        }
    }

    fn small(&mut self) -> Result<Option<u8>, PatternError> {
        match self.number() {
            None => Ok(None),
            Some(n) if n <= 255 => Ok(Some(n as u8)),
            Some(_) => Err(self.err("number too large")),
        }
    }

    fn pattern(&mut self) -> Result<Pattern, PatternError> {
        let mut atoms = Vec::new();
        let mut bonds: Vec<PatternBond> = Vec::new();
        let mut prev: Option<usize> = None;
        let mut stack: Vec<Option<usize>> = Vec::new();
        let mut pending: Option<BondExpr> = None;
        let mut open: Vec<(u32, usize, Option<BondExpr>)> = Vec::new();
        let mut depth_paren = 0usize;

        while let Some(c) = self.peek() {
            match c {
                b'(' => {
                    if prev.is_none() {
                        return Err(self.err("branch without a preceding atom"));
                    }
                    stack.push(prev);
                    depth_paren += 1;
                    self.pos += 1;
                }
                b')' => {
                    if depth_paren == 0 {
                        // end of a recursive pattern
                        break;
                    }
                    if pending.is_some() {
                        return Err(self.err("bond without a following atom"));
                    }
                    prev = stack.pop().flatten();
                    depth_paren -= 1;
                    self.pos += 1;
                }
                b'.' => {
                    if pending.is_some() || prev.is_none() {
                        return Err(self.err("misplaced '.'"));
                    }
                    prev = None;
                    self.pos += 1;
                }
                b'0'..=b'9' | b'%' => {
                    let Some(p) = prev else {
                        return Err(self.err("ring closure without an atom"));
                    };
                    let num = if c == b'%' {
                        self.pos += 1;
                        let start = self.pos;
                        if self.bytes.len() < start + 2
                            || !self.bytes[start..start + 2].iter().all(u8::is_ascii_digit)
                        {
                            return Err(self.err("expected two digits after '%'"));
                        }
                        self.pos += 2;
                        self.src[start..start + 2].parse().expect("two digits")
                    } else {
                        self.pos += 1;
                        u32::from(c - b'0')
                    };
                    let bond = pending.take();
                    if let Some(k) = open.iter().position(|o| o.0 == num) {
                        let (_, other, first) = open.remove(k);
                        let expr = bond.or(first).unwrap_or(BondExpr::Implicit);
                        bonds.push(PatternBond {
                            a: other,
                            b: p,
                            expr,
                        });
                    } else {
                        open.push((num, p, bond));
                    }
                }
                b'-' | b'=' | b'#' | b':' | b'~' | b'@' | b'/' | b'\\' | b'!' => {
                    if prev.is_none() || pending.is_some() {
                        return Err(self.err("misplaced bond"));
                    }
                    pending = Some(BondExpr::Expr(self.bond_expr()?));
                }
                _ => {
                    let expr = self.atom()?;
                    let idx = atoms.len();
                    atoms.push(expr);
                    if let Some(p) = prev {
                        bonds.push(PatternBond {
                            a: p,
                            b: idx,
                            expr: pending.take().unwrap_or(BondExpr::Implicit),
                        });
                    } else if pending.is_some() {
                        return Err(self.err("bond without a preceding atom"));
                    }
                    prev = Some(idx);
                }
            }
        }
        if depth_paren > 0 {
            return Err(self.err("unclosed branch"));
        }
        if let Some((num, _, _)) = open.first() {
            return Err(self.err(format!("unclosed ring closure {num}")));
        }
        if pending.is_some() {
            return Err(self.err("dangling bond"));
        }
        if atoms.is_empty() {
            return Err(self.err("empty pattern"));
        }
        let mut back = vec![Vec::new(); atoms.len()];
        for (k, b) in bonds.iter().enumerate() {
            if b.a == b.b {
                return Err(self.err("ring closure onto the same atom"));
            }
            let (lo, hi) = (b.a.min(b.b), b.a.max(b.b));
            back[hi].push((lo, k));
        }
        Ok(Pattern {
            source: String::new(),
            atoms,
            bonds,
            back,
        })
    }

    fn bond_expr(&mut self) -> Result<Expr<BondPrim>, PatternError> {
        let mut ors_low: Vec<Expr<BondPrim>> = Vec::new();
        let mut ors: Vec<Expr<BondPrim>> = Vec::new();
        let mut ands: Vec<Expr<BondPrim>> = Vec::new();
        loop {
            let mut negate = 0;
            while self.peek() == Some(b'!') {
                negate += 1;
                self.pos += 1;
            }
            let prim = match self.peek() {
                Some(b'-') => BondPrim::Single,
                Some(b'/') | Some(b'\\') => BondPrim::Single,
                Some(b'=') => BondPrim::Double,
                Some(b'#') => BondPrim::Triple,
                Some(b':') => BondPrim::Aromatic,
                Some(b'~') => BondPrim::Any,
                Some(b'@') => BondPrim::Ring,
                _ => return Err(self.err("expected a bond primitive")),
            };
            self.pos += 1;
            let mut e = Expr::Prim(prim);
            for _ in 0..negate {
                e = Expr::Not(Box::new(e));
            }
            ands.push(e);
            match self.peek() {
                Some(b'&') => self.pos += 1,
                Some(b',') => {
                    self.pos += 1;
                    ors.push(collapse_and(std::mem::take(&mut ands)));
                }
                Some(b';') => {
                    self.pos += 1;
                    ors.push(collapse_and(std::mem::take(&mut ands)));
                    ors_low.push(collapse_or(std::mem::take(&mut ors)));
                }
                Some(b'-' | b'=' | b'#' | b':' | b'~' | b'@' | b'/' | b'\\' | b'!') => {}
                _ => break,
            }
        }
        ors.push(collapse_and(ands));
        ors_low.push(collapse_or(ors));
        Ok(collapse_and(ors_low))
    }

    fn atom(&mut self) -> Result<Expr<AtomPrim>, PatternError> {
        let c = self.peek().expect("caller checked");
        if c == b'[' {
            self.pos += 1;
            let e = self.bracket_expr()?;
            if self.peek() != Some(b']') {
                return Err(self.err("expected ']'"));
            }
            self.pos += 1;
            return Ok(e);
        }
        let rest = &self.src[self.pos..];
        for (sym, z) in [("Cl", 17u8), ("Br", 35u8)] {
            if rest.starts_with(sym) {
                self.pos += 2;
                return Ok(Expr::Prim(AtomPrim::Element {
                    z,
                    aromatic: Some(false),
                }));
            }
        }
        self.pos += 1;
        let prim = match c {
            b'*' => AtomPrim::Any,
            b'a' => AtomPrim::Aromatic,
            b'A' => AtomPrim::Aliphatic,
            b'B' | b'C' | b'N' | b'O' | b'P' | b'S' | b'F' | b'I' => AtomPrim::Element {
                z: atomic_number_of(std::str::from_utf8(&[c]).expect("ascii")).expect("known"),
                aromatic: Some(false),
            },
            b'b' | b'c' | b'n' | b'o' | b'p' | b's' => AtomPrim::Element {
                z: atomic_number_of(&(c.to_ascii_uppercase() as char).to_string()).expect("known"),
                aromatic: Some(true),
            },
            _ => {
                self.pos -= 1;
                return Err(self.err(format!("unexpected character '{}'", c as char)));
            }
        };
        Ok(Expr::Prim(prim))
    }

    fn bracket_expr(&mut self) -> Result<Expr<AtomPrim>, PatternError> {
        let mut ors_low: Vec<Expr<AtomPrim>> = Vec::new();
        let mut ors: Vec<Expr<AtomPrim>> = Vec::new();
        let mut ands: Vec<Expr<AtomPrim>> = Vec::new();
        loop {
            let mut negate = 0;
            while self.peek() == Some(b'!') {
                negate += 1;
                self.pos += 1;
            }
            let mut e = self.atom_prim()?;
            for _ in 0..negate {
                e = Expr::Not(Box::new(e));
            }
            ands.push(e);
            match self.peek() {
                Some(b'&') => self.pos += 1,
                Some(b',') => {
                    self.pos += 1;
                    ors.push(collapse_and(std::mem::take(&mut ands)));
                }
                Some(b';') => {
                    self.pos += 1;
                    ors.push(collapse_and(std::mem::take(&mut ands)));
                    ors_low.push(collapse_or(std::mem::take(&mut ors)));
                }
                Some(b']') | None => break,
                _ => {}
            }
        }
        ors.push(collapse_and(ands));
        ors_low.push(collapse_or(ors));
        Ok(collapse_and(ors_low))
    }

    fn atom_prim(&mut self) -> Result<Expr<AtomPrim>, PatternError> {
        let Some(c) = self.peek() else {
            return Err(self.err("unterminated bracket"));
        };
        let prim = match c {
            // chirality is not checked
            b'@' => {
                while self.peek() == Some(b'@') {
                    self.pos += 1;
                }
                AtomPrim::Any
            }
            b'*' => {
                self.pos += 1;
                AtomPrim::Any
            }
            b'#' => {
                self.pos += 1;
                let n = self
                    .small()?
                    .ok_or_else(|| self.err("expected atomic number"))?;
                AtomPrim::AtomicNumber(n)
            }
            b'$' => {
                self.pos += 1;
                if self.peek() != Some(b'(') {
                    return Err(self.err("expected '(' after '$'"));
                }
                self.pos += 1;
                let start = self.pos;
                let mut inner = self.pattern()?;
                inner.source = self.src[start..self.pos].to_string();
                if self.peek() != Some(b')') {
                    return Err(self.err("unclosed recursive pattern"));
                }
                self.pos += 1;
                AtomPrim::Recursive(Box::new(inner))
            }
            b'+' | b'-' => {
                self.pos += 1;
                let sign: i8 = if c == b'+' { 1 } else { -1 };
                let mut mag = 1i8;
                if let Some(n) = self.small()? {
                    mag = n as i8;
                } else {
                    while self.peek() == Some(c) {
                        self.pos += 1;
                        mag += 1;
                    }
                }
                AtomPrim::Charge(sign * mag)
            }
            b'H' if !self.src[self.pos..].starts_with("Hg")
                && !self.src[self.pos..].starts_with("He")
                && !self.src[self.pos..].starts_with("Hf")
                && !self.src[self.pos..].starts_with("Ho") =>
            {
                self.pos += 1;
                AtomPrim::TotalH(self.small()?.unwrap_or(1))
            }
            b'D' => {
                self.pos += 1;
                AtomPrim::Degree(self.small()?.unwrap_or(1))
            }
            b'X' => {
                self.pos += 1;
                AtomPrim::Connectivity(self.small()?.unwrap_or(1))
            }
            b'v' => {
                self.pos += 1;
                AtomPrim::Valence(self.small()?.unwrap_or(1))
            }
            b'R' if !self.src[self.pos..].starts_with("Rb")
                && !self.src[self.pos..].starts_with("Rh")
                && !self.src[self.pos..].starts_with("Ru")
                && !self.src[self.pos..].starts_with("Re")
                && !self.src[self.pos..].starts_with("Rn") =>
            {
                self.pos += 1;
                AtomPrim::RingCount(self.small()?)
            }
            b'r' => {
                self.pos += 1;
                AtomPrim::RingSize(self.small()?)
            }
            b'x' => {
                self.pos += 1;
                AtomPrim::RingConnectivity(self.small()?)
            }
            b'a' if !self.src[self.pos..].starts_with("as") => {
                self.pos += 1;
                AtomPrim::Aromatic
            }
            b'A' if !self.src[self.pos..].starts_with("Al")
                && !self.src[self.pos..].starts_with("Ag")
                && !self.src[self.pos..].starts_with("Ar")
                && !self.src[self.pos..].starts_with("As")
                && !self.src[self.pos..].starts_with("At")
                && !self.src[self.pos..].starts_with("Au") =>
            {
                self.pos += 1;
                AtomPrim::Aliphatic
            }
            b'A'..=b'Z' => {
                let two = self.src.get(self.pos..self.pos + 2);
                let (sym, len) = match two.and_then(|t| atomic_number_of(t).map(|z| (z, 2))) {
                    Some(x) => x,
                    None => {
                        let one = &self.src[self.pos..self.pos + 1];
                        (
                            atomic_number_of(one).ok_or_else(|| self.err("unknown element"))?,
                            1,
                        )
                    }
                };
                self.pos += len;
                AtomPrim::Element {
                    z: sym,
                    aromatic: Some(false),
                }
            }
            b'b' | b'c' | b'n' | b'o' | b'p' | b's' => {
                let rest = &self.src[self.pos..];
                if rest.starts_with("se") || rest.starts_with("as") {
                    let z = if rest.starts_with("se") { 34 } else { 33 };
                    self.pos += 2;
                    AtomPrim::Element {
                        z,
                        aromatic: Some(true),
                    }
                } else {
                    self.pos += 1;
                    AtomPrim::Element {
                        z: atomic_number_of(&(c.to_ascii_uppercase() as char).to_string())
                            .expect("known"),
                        aromatic: Some(true),
                    }
                }
            }
            _ => return Err(self.err(format!("unexpected character '{}'", c as char))),
        };
        Ok(Expr::Prim(prim))
    }
}

fn collapse_and<P>(mut v: Vec<Expr<P>>) -> Expr<P> {
    if v.len() == 1 {
        v.pop().expect("one element")
    } else {
        Expr::And(v)
    }
}

fn collapse_or<P>(mut v: Vec<Expr<P>>) -> Expr<P> {
    if v.len() == 1 {
        v.pop().expect("one element")
    } else {
        Expr::Or(v)
    }
}

fn atom_matches(prim: &AtomPrim, m: &Molecule, i: usize) -> bool {
    let atom = m.atom(i);
    match prim {
        AtomPrim::Any => true,
        AtomPrim::Aromatic => atom.aromatic,
        AtomPrim::Aliphatic => !atom.aromatic,
        AtomPrim::Element { z, aromatic } => {
            atom.element.atomic_number() == *z && aromatic.is_none_or(|a| a == atom.aromatic)
        }
        AtomPrim::AtomicNumber(z) => atom.element.atomic_number() == *z,
        AtomPrim::TotalH(h) => atom.total_h() == *h,
        AtomPrim::Degree(d) => m.degree(i) == *d as usize,
        AtomPrim::Connectivity(x) => m.degree(i) + atom.total_h() as usize == *x as usize,
        AtomPrim::Valence(v) => m.valence(i) == *v,
        AtomPrim::RingCount(None) => m.is_ring_atom(i),
        AtomPrim::RingCount(Some(n)) => m.atom_ring_count(i) == *n as usize,
        AtomPrim::RingSize(None) => m.is_ring_atom(i),
        AtomPrim::RingSize(Some(n)) => m.smallest_ring_size(i) == Some(*n as usize),
        AtomPrim::RingConnectivity(n) => {
            let c = m
                .neighbors(i)
                .iter()
                .filter(|&&(_, b)| m.bond(b).in_ring)
                .count();
            match n {
                None => c > 0,
                Some(n) => c == *n as usize,
            }
        }
        AtomPrim::Charge(c) => atom.formal_charge == *c,
        AtomPrim::Recursive(p) => p.matches_at(m, i),
    }
}

fn bond_matches(expr: &BondExpr, m: &Molecule, b: usize) -> bool {
    let bond = m.bond(b);
    match expr {
        BondExpr::Implicit => matches!(bond.order, BondOrder::Single | BondOrder::Aromatic),
        BondExpr::Expr(e) => e.eval(&|p| match p {
            BondPrim::Single => bond.order == BondOrder::Single,
            BondPrim::Double => bond.order == BondOrder::Double,
            BondPrim::Triple => bond.order == BondOrder::Triple,
            BondPrim::Aromatic => bond.order == BondOrder::Aromatic,
            BondPrim::Any => true,
            BondPrim::Ring => bond.in_ring,
        }),
    }
}

/// Upper bound on enumerated matches; protects against combinatorial blowup
/// on highly symmetric inputs.
const MATCH_LIMIT: usize = 10_000;

struct Search<'a> {
    p: &'a Pattern,
    m: &'a Molecule,
    /// lazily evaluated atom expressions, per pattern atom and molecule atom
    allowed: Vec<Vec<Option<bool>>>,
    map: Vec<usize>,
    used: Vec<bool>,
}

impl<'a> Search<'a> {
    fn new(p: &'a Pattern, m: &'a Molecule) -> Search<'a> {
        Search {
            p,
            m,
            allowed: vec![vec![None; m.num_atoms()]; p.atoms.len()],
            map: vec![usize::MAX; p.atoms.len()],
            used: vec![false; m.num_atoms()],
        }
    }

    fn atom_ok(&mut self, k: usize, i: usize) -> bool {
        if let Some(v) = self.allowed[k][i] {
            return v;
        }
        let m = self.m;
        let v = self.p.atoms[k].eval(&|prim| atom_matches(prim, m, i));
        self.allowed[k][i] = Some(v);
        v
    }

    fn fits(&mut self, k: usize, cand: usize) -> bool {
        if self.used[cand] || !self.atom_ok(k, cand) {
            return false;
        }
        self.p.back[k].iter().all(|&(j, bi)| {
            self.m
                .bond_between(self.map[j], cand)
                .is_some_and(|mb| bond_matches(&self.p.bonds[bi].expr, self.m, mb))
        })
    }

    /// Depth-first extension; `visit` returns false to stop the search.
    fn extend(&mut self, k: usize, visit: &mut dyn FnMut(&[usize]) -> bool) -> bool {
        if k == self.p.atoms.len() {
            return visit(&self.map);
        }
        let candidates: Vec<usize> = match self.p.back[k].first() {
            Some(&(j, _)) => self
                .m
                .neighbors(self.map[j])
                .iter()
                .map(|&(w, _)| w)
                .collect(),
            None => (0..self.m.num_atoms()).collect(),
        };
        for c in candidates {
            if self.fits(k, c) {
                self.map[k] = c;
                self.used[c] = true;
                let go_on = self.extend(k + 1, visit);
                self.used[c] = false;
                self.map[k] = usize::MAX;
                if !go_on {
                    return false;
                }
            }
        }
        true
    }

    fn start_at(&mut self, atom: usize, visit: &mut dyn FnMut(&[usize]) -> bool) {
        if atom < self.m.num_atoms() && self.fits(0, atom) {
            self.map[0] = atom;
            self.used[atom] = true;
            self.extend(1, visit);
            self.used[atom] = false;
            self.map[0] = usize::MAX;
        }
    }
}

impl Pattern {
    pub fn parse(s: &str) -> Result<Pattern, PatternError> {
        let mut p = Parser {
            src: s,
            bytes: s.as_bytes(),
            pos: 0,
        };
        let mut pat = p.pattern()?;
        if p.pos != s.len() {
            return Err(p.err("unbalanced ')'"));
        }
        pat.source = s.to_string();
        Ok(pat)
    }

    pub fn as_str(&self) -> &str {
        &self.source
    }

    pub fn num_atoms(&self) -> usize {
        self.atoms.len()
    }

    pub fn matches(&self, m: &Molecule) -> bool {
        if m.num_atoms() < self.atoms.len() {
            return false;
        }
        let mut found = false;
        Search::new(self, m).extend(0, &mut |_| {
            found = true;
            false
        });
        found
    }

    /// True if a match maps the first pattern atom onto `atom`.
    pub fn matches_at(&self, m: &Molecule, atom: usize) -> bool {
        let mut found = false;
        Search::new(self, m).start_at(atom, &mut |_| {
            found = true;
            false
        });
        found
    }

    /// Matches with distinct atom sets, each given as the molecule atom for
    /// every pattern atom. Order follows the search, which is deterministic.
    pub fn find_all(&self, m: &Molecule) -> Vec<Vec<usize>> {
        if m.num_atoms() < self.atoms.len() {
            return Vec::new();
        }
        let mut out: Vec<Vec<usize>> = Vec::new();
        let mut seen: std::collections::HashSet<Vec<usize>> = Default::default();
        let mut total = 0usize;
        Search::new(self, m).extend(0, &mut |map| {
            total += 1;
            let mut key = map.to_vec();
            key.sort_unstable();
            if seen.insert(key) {
                out.push(map.to_vec());
            }
            total < MATCH_LIMIT
        });
        out
    }

    /// Every embedding (one molecule atom per pattern atom), including those
    /// that differ only by symmetry. Capped like [`Pattern::find_all`].
    pub fn mappings(&self, m: &Molecule) -> Vec<Vec<usize>> {
        if m.num_atoms() < self.atoms.len() {
            return Vec::new();
        }
        let mut out: Vec<Vec<usize>> = Vec::new();
        Search::new(self, m).extend(0, &mut |map| {
            out.push(map.to_vec());
            out.len() < MATCH_LIMIT
        });
        out
    }

    /// Number of distinct matched atom sets.
    pub fn count(&self, m: &Molecule) -> usize {
        self.find_all(m).len()
    }

    /// Atoms that the first pattern atom can be mapped onto in some match.
    pub fn anchor_atoms(&self, m: &Molecule) -> Vec<usize> {
        let mut search = Search::new(self, m);
        (0..m.num_atoms())
            .filter(|&a| {
                let mut found = false;
                search.start_at(a, &mut |_| {
                    found = true;
                    false
                });
                found
            })
            .collect()
    }
}

impl FromStr for Pattern {
    type Err = PatternError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Pattern::parse(s)
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::molgraph::parse_smiles;

    fn hit(p: &str, s: &str) -> bool {
        Pattern::parse(p)
            .unwrap()
            .matches(&parse_smiles(s).unwrap())
    }

    fn count(p: &str, s: &str) -> usize {
        Pattern::parse(p).unwrap().count(&parse_smiles(s).unwrap())
    }

    #[test]
    fn simple_atoms_and_bonds() {
        assert!(hit("c1ccccc1", "Oc1ccccc1"));
        assert!(!hit("c1ccccc1", "C1CCCCC1"));
        assert!(hit("C=O", "CC(=O)C"));
        assert!(!hit("C=O", "CCO"));
        assert!(hit("[OH]c", "Oc1ccccc1"));
        assert!(hit("Cl", "CCl"));
        assert!(!hit("C", "c1ccccc1"));
        assert!(hit("[#6]", "c1ccccc1"));
    }

    #[test]
    fn logic_and_counts() {
        assert!(hit("[N;!H0]", "CN"));
        assert!(!hit("[N;!H0]", "CN(C)C"));
        assert!(hit("[C,N;R]", "C1CCNCC1"));
        assert!(!hit("[C,N;R]", "CCN"));
        assert!(hit("[CX4][Cl,Br,I]", "CCBr"));
        assert!(hit("[O-,OH]", "CC(=O)[O-]"));
        assert!(hit("[N+](=O)[O-]", "C[N+](=O)[O-]"));
        assert!(hit("[CR0]=[CR0][CR0]=[CR0]", "C=CC=C"));
        assert!(hit("[NX3;H2]", "CN"));
        assert!(hit("[Nv3X3,Nv4X4]", "CN(C)C"));
        assert!(!hit("[Hg,Fe,B]", "CCO"));
        assert!(hit("[Hg,Fe,B]", "OB(O)c1ccccc1"));
    }

    #[test]
    fn ring_primitives() {
        assert!(hit("[CR2]", "C1CCC2CCCCC2C1"));
        assert!(hit("[r5]", "C1CCCC1"));
        assert!(!hit("[r6]", "C1CCCC1"));
        assert!(hit("C@C", "C1CCCC1"));
        assert!(!hit("C!@C", "C1CCCC1"));
        assert!(hit("C=!@CC=O", "C=CC=O"));
    }

    #[test]
    fn recursive_and_components() {
        assert!(hit("[$([CH]),$(CC)]#CC(=O)[#6]", "C#CC(=O)C"));
        assert!(hit("F.F.F.F", "FC(F)(F)C(F)F"));
        assert!(!hit("F.F.F.F", "FC(F)(F)C"));
        assert_eq!(count("[OH]", "OCCO"), 2);
        assert_eq!(count("c1ccccc1", "c1ccccc1"), 1);
        assert_eq!(count("[$([N;+0;X3;v3]);!$(N[C,S]=O)]", "CNC(C)=O"), 0);
        assert_eq!(count("[$([N;+0;X3;v3]);!$(N[C,S]=O)]", "CNC"), 1);
    }

    #[test]
    fn ring_closures_and_branches() {
        assert!(hit("C1(=O)NCC1", "O=C1CCN1"));
        assert!(hit("C12C(NC(N1)=O)CSC2", "O=C1NC2CSCC2N1"));
        assert!(hit("c1ccccc1OC(=O)[#6]", "CC(=O)Oc1ccccc1C(=O)O"));
    }

    #[test]
    fn malformed_patterns_are_errors() {
        for p in ["", "C(", "C1CC", "[C", "C=", "[Zz]", "C)"] {
            assert!(Pattern::parse(p).is_err(), "{p}");
        }
    }

    #[test]
    fn matches_at_anchors_first_atom() {
        let m = parse_smiles("OCC(=O)O").unwrap();
        let p = Pattern::parse("[OX2H]C=O").unwrap();
        let anchors = p.anchor_atoms(&m);
        assert_eq!(anchors.len(), 1);
        assert_eq!(m.atom(anchors[0]).total_h(), 1);
    }
}
