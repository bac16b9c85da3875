use std::sync::OnceLock;

use serde::Serialize;

use super::{basic_descriptors, crippen_logp_mr, tpsa_with_options};
use crate::molgraph::{BondOrder, Molecule};
use crate::pattern::Pattern;

const TABLE: &str = include_str!("../../data/qed.txt");

/// Rings left after deleting aliphatic ring atoms that have a single bond to
/// a non-aromatic atom (cyclomatic number of the remaining graph).
fn aromatic_ring_term(m: &Molecule) -> usize {
    let n = m.num_atoms();
    let keep: Vec<bool> = (0..n)
        .map(|i| {
            let a = m.atom(i);
            !(m.is_ring_atom(i)
                && !a.aromatic
                && m.neighbors(i).iter().any(|&(w, b)| {
                    !m.atom(w).aromatic
                        && matches!(m.bond(b).order, BondOrder::Single | BondOrder::Aromatic)
                }))
        })
        .collect();
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut cycles = 0;
    for b in m.bonds() {
        if keep[b.begin] && keep[b.end] {
            let (x, y) = (root(&mut parent, b.begin), root(&mut parent, b.end));
            if x == y {
                cycles += 1;
            } else {
                parent[x] = y;
            }
        }
    }
    cycles
}

const PROPERTIES: [&str; 8] = ["MW", "ALOGP", "HBA", "HBD", "PSA", "ROTB", "AROM", "ALERTS"];

struct Params {
    ads: [[f64; 7]; 8],
    weights: [f64; 8],
    acceptors: Vec<Pattern>,
    donor: Pattern,
    rotatable: Pattern,
    alerts: Vec<Pattern>,
}

fn params() -> &'static Params {
    static P: OnceLock<Params> = OnceLock::new();
    P.get_or_init(|| {
        let mut ads = [[0.0; 7]; 8];
        let mut weights = [0.0; 8];
        let mut acceptors = Vec::new();
        let mut alerts = Vec::new();
        let mut donor = None;
        let mut rotatable = None;
        let slot = |name: &str| {
            PROPERTIES
                .iter()
                .position(|p| *p == name)
                .expect("known QED property")
        };
        for line in TABLE.lines() {
            if line.starts_with('#') || line.trim().is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split('\t').collect();
            let pat = |s: &str| Pattern::parse(s).expect("QED pattern");
            match f[0] {
                "ads" => {
                    let k = slot(f[1]);
                    for (j, v) in f[2..9].iter().enumerate() {
                        ads[k][j] = v.parse().expect("QED parameter");
                    }
                }
                "weight" => weights[slot(f[1])] = f[2].parse().expect("QED weight"),
                "acceptor" => acceptors.push(pat(f[1])),
                "donor" => donor = Some(pat(f[1])),
                "rotatable" => rotatable = Some(pat(f[1])),
                "alert" => alerts.push(pat(f[1])),
                other => panic!("unknown QED table row kind {other}"),
            }
        }
        Params {
            ads,
            weights,
            acceptors,
            donor: donor.expect("donor pattern"),
            rotatable: rotatable.expect("rotatable pattern"),
            alerts,
        }
    })
}

/// The eight raw properties entering QED.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QedProperties {
    pub mw: f64,
    pub alogp: f64,
    pub hba: usize,
    pub hbd: usize,
    pub psa: f64,
    pub rotb: usize,
    pub arom: usize,
    pub alerts: usize,
}

pub fn qed_properties(m: &Molecule) -> QedProperties {
    let p = params();
    QedProperties {
        mw: basic_descriptors(m).mw,
        alogp: crippen_logp_mr(m).logp,
        hba: p.acceptors.iter().map(|a| a.count(m)).sum(),
        hbd: p.donor.count(m),
        psa: tpsa_with_options(m, false),
        rotb: p.rotatable.count(m),
        arom: aromatic_ring_term(m),
        alerts: p.alerts.iter().filter(|a| a.matches(m)).count(),
    }
}

fn desirability(x: f64, a: &[f64; 7]) -> f64 {
    let [pa, pb, pc, pd, pe, pf, dmax] = *a;
    let rise = 1.0 + (-(x - pc + pd / 2.0) / pe).exp();
    let fall = 1.0 + (-(x - pc - pd / 2.0) / pf).exp();
    (pa + pb / rise * (1.0 - 1.0 / fall)) / dmax
}

/// Weighted geometric mean of the eight property desirabilities.
pub fn qed(m: &Molecule) -> f64 {
    let p = params();
    let props = qed_properties(m);
    let values = [
        props.mw,
        props.alogp,
        props.hba as f64,
        props.hbd as f64,
        props.psa,
        props.rotb as f64,
        props.arom as f64,
        props.alerts as f64,
    ];
    let mut num = 0.0;
    let mut den = 0.0;
    for k in 0..8 {
        let d = desirability(values[k], &p.ads[k]).max(1e-12);
        num += p.weights[k] * d.ln();
        den += p.weights[k];
    }
    (num / den).exp().clamp(f64::MIN_POSITIVE, 1.0 - 1e-12)
}
