use std::sync::OnceLock;

use super::order_free_sum;
use crate::molgraph::{BondOrder, Element, Molecule};
use crate::pattern::Pattern;

const TABLE: &str = include_str!("../../data/crippen.txt");

struct Row {
    label: String,
    pattern: Option<Pattern>,
    logp: f64,
    mr: f64,
}

fn rows() -> &'static [Row] {
    static T: OnceLock<Vec<Row>> = OnceLock::new();
    T.get_or_init(|| {
        TABLE
            .lines()
            .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
            .map(|line| {
                let f: Vec<&str> = line.split('\t').collect();
                assert!(f.len() >= 3, "crippen row: {line}");
                let label = f[0].to_string();
                let pattern = if label.starts_with('H') {
                    None
                } else {
                    Some(Pattern::parse(f[1]).expect("crippen pattern"))
                };
                Row {
                    label,
                    pattern,
                    logp: f[2].parse().expect("crippen logp"),
                    mr: f.get(3).and_then(|v| v.parse().ok()).unwrap_or(0.0),
                }
            })
            .collect()
    })
}

fn h_row(label: &str) -> &'static Row {
    rows()
        .iter()
        .find(|r| r.label == label)
        .expect("hydrogen type present")
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrippenResult {
    pub logp: f64,
    pub mr: f64,
    /// Atom type label per heavy atom.
    pub types: Vec<String>,
    /// Atoms that matched no type and fell back to a zero contribution.
    pub unmatched: Vec<usize>,
}

/// Hydrogen type for hydrogens attached to heavy atom `i`, decided by the
/// heavy atom and, for hydroxyl-type hydrogens, by the atom the oxygen is
/// bonded to.
fn hydrogen_type(m: &Molecule, i: usize) -> &'static str {
    let atom = m.atom(i);
    match atom.element {
        Element::C => "H1",
        Element::N => "H3",
        Element::O => {
            let Some(&(x, _)) = m.neighbors(i).first() else {
                // water-like: the partner is another hydrogen
                return if atom.total_h() >= 2 { "H2" } else { "HS" };
            };
            let xa = m.atom(x);
            match xa.element {
                Element::C => {
                    if xa.aromatic || m.degree(x) + xa.total_h() as usize == 4 {
                        "H2"
                    } else if m.neighbors(x).iter().any(|&(y, b)| {
                        y != i
                            && m.bond(b).order == BondOrder::Double
                            && matches!(
                                m.atom(y).element,
                                Element::C | Element::N | Element::O | Element::S
                            )
                    }) {
                        "H4"
                    } else {
                        "HS"
                    }
                }
                Element::N => "H3",
                Element::O | Element::S => "H4",
                _ => "H2",
            }
        }
        _ => "H2",
    }
}

/// Per-atom contributions; the hydrogens of atom `i` are included in entry `i`.
pub fn crippen_contributions(m: &Molecule) -> (Vec<(f64, f64)>, CrippenResult) {
    let n = m.num_atoms();
    let mut assigned: Vec<Option<usize>> = vec![None; n];
    for (k, row) in rows().iter().enumerate() {
        let Some(p) = &row.pattern else { continue };
        if assigned.iter().all(Option::is_some) {
            break;
        }
        for a in p.anchor_atoms(m) {
            if assigned[a].is_none() {
                assigned[a] = Some(k);
            }
        }
    }
    let mut contrib = Vec::with_capacity(n);
    let mut types = Vec::with_capacity(n);
    let mut unmatched = Vec::new();
    for i in 0..n {
        let (mut l, mut r) = match assigned[i] {
            Some(k) => {
                let row = &rows()[k];
                types.push(row.label.clone());
                (row.logp, row.mr)
            }
            None => {
                unmatched.push(i);
                types.push(String::from("?"));
                (0.0, 0.0)
            }
        };
        let h = m.atom(i).total_h();
        if h > 0 {
            let hr = h_row(hydrogen_type(m, i));
            l += f64::from(h) * hr.logp;
            r += f64::from(h) * hr.mr;
        }
        contrib.push((l, r));
    }
    let logp = order_free_sum(contrib.iter().map(|c| c.0));
    let mr = order_free_sum(contrib.iter().map(|c| c.1));
    (
        contrib,
        CrippenResult {
            logp,
            mr,
            types,
            unmatched,
        },
    )
}

/// Wildman-Crippen logP and molar refractivity.
pub fn crippen_logp_mr(m: &Molecule) -> CrippenResult {
    crippen_contributions(m).1
}
