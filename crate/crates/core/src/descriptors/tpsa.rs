use std::sync::OnceLock;

use super::order_free_sum;
use crate::molgraph::{BondOrder, Element, Molecule};

const TABLE: &str = include_str!("../../data/tpsa.txt");

#[derive(Debug)]
struct Row {
    element: Element,
    /// degree, H, charge, single, double, triple, aromatic, in 3-ring
    keys: [Option<i32>; 8],
    value: f64,
}

#[derive(Debug)]
struct Fallback {
    element: Element,
    base: f64,
    per_neighbor: f64,
    per_h: f64,
}

struct Table {
    rows: Vec<Row>,
    fallbacks: Vec<Fallback>,
}

fn table() -> &'static Table {
    static T: OnceLock<Table> = OnceLock::new();
    T.get_or_init(|| {
        let mut rows = Vec::new();
        let mut fallbacks = Vec::new();
        for line in TABLE.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let f: Vec<&str> = line.split('\t').collect();
            if f[0] == "fallback" {
                fallbacks.push(Fallback {
                    element: Element::from_symbol(f[1]).expect("tpsa table element"),
                    base: f[2].parse().expect("tpsa number"),
                    per_neighbor: f[3].parse().expect("tpsa number"),
                    per_h: f[4].parse().expect("tpsa number"),
                });
                continue;
            }
            assert_eq!(f.len(), 10, "tpsa table row: {line}");
            let mut keys = [None; 8];
            for (k, slot) in keys.iter_mut().enumerate() {
                if f[k + 1] != "*" {
                    *slot = Some(f[k + 1].parse().expect("tpsa key"));
                }
            }
            rows.push(Row {
                element: Element::from_symbol(f[0]).expect("tpsa table element"),
                keys,
                value: f[9].parse().expect("tpsa value"),
            });
        }
        Table { rows, fallbacks }
    })
}

fn contribution(m: &Molecule, i: usize) -> f64 {
    let atom = m.atom(i);
    let mut counts = [0i32; 4];
    for &(_, b) in m.neighbors(i) {
        let k = match m.bond(b).order {
            BondOrder::Single => 0,
            BondOrder::Double => 1,
            BondOrder::Triple => 2,
            BondOrder::Aromatic => 3,
        };
        counts[k] += 1;
    }
    let in3 = m.rings().iter().any(|r| r.len() == 3 && r.contains(&i));
    let actual = [
        m.degree(i) as i32,
        i32::from(atom.total_h()),
        i32::from(atom.formal_charge),
        counts[0],
        counts[1],
        counts[2],
        counts[3],
        i32::from(in3),
    ];
    let t = table();
    for row in t.rows.iter().filter(|r| r.element == atom.element) {
        if row
            .keys
            .iter()
            .zip(actual.iter())
            .all(|(k, a)| k.is_none_or(|k| k == *a))
        {
            return row.value;
        }
    }
    t.fallbacks
        .iter()
        .find(|f| f.element == atom.element)
        .map(|f| (f.base + f.per_neighbor * actual[0] as f64 + f.per_h * actual[1] as f64).max(0.0))
        .unwrap_or(0.0)
}

/// Topological polar surface area including S and P contributions.
pub fn tpsa(m: &Molecule) -> f64 {
    tpsa_with_options(m, true)
}

pub fn tpsa_with_options(m: &Molecule, include_s_and_p: bool) -> f64 {
    order_free_sum(
        (0..m.num_atoms())
            .filter(|&i| match m.atom(i).element {
                Element::N | Element::O => true,
                Element::S | Element::P => include_s_and_p,
                _ => false,
            })
            .map(|i| contribution(m, i)),
    )
}
