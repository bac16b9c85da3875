use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::molgraph::{parse_smiles, write_smiles_with_ranks, Atom, BondOrder, Element};

fn mol(s: &str) -> Molecule {
    parse_smiles(s).unwrap()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

// Values computed with an independent Crippen/Ertl/QED implementation.
#[test]
fn small_molecule_reference_values() {
    let cases = [
        ("C", 16.043, 0.6361, 6.7310, 0.0, 0.3598),
        ("O", 18.015, -0.8247, 3.6138, 31.50, 0.3277),
        ("c1ccccc1", 78.114, 1.6866, 26.4420, 0.0, 0.4426),
        ("Oc1ccccc1", 94.113, 1.3922, 28.1068, 20.23, 0.5147),
        ("c1ccncc1", 79.102, 1.0816, 24.2370, 12.89, 0.4531),
        (
            "CC(=O)Oc1ccccc1C(=O)O",
            180.159,
            1.3101,
            44.7103,
            63.60,
            0.5501,
        ),
    ];
    for (s, mw, logp, mr, psa, q) in cases {
        let m = mol(s);
        let d = basic_descriptors(&m);
        assert!(close(d.mw, mw, 0.01), "{s} mw {}", d.mw);
        assert!(close(d.logp, logp, 1e-3), "{s} logp {}", d.logp);
        assert!(close(d.mr, mr, 1e-3), "{s} mr {}", d.mr);
        assert!(close(d.tpsa, psa, 0.01), "{s} tpsa {}", d.tpsa);
        assert!(close(qed(&m), q, 1e-3), "{s} qed {}", qed(&m));
    }
}

#[test]
fn hydroxyl_hydrogen_types_follow_the_oxygen_partner() {
    // acid OH, enol OH and N-OH hydrogens carry different contributions
    let acid = crippen_logp_mr(&mol("CC(=O)O")).logp;
    assert!(close(acid, 0.0909, 1e-3), "{acid}");
    assert!(close(
        crippen_logp_mr(&mol("c1cc[nH]c1")).logp,
        1.0147,
        1e-3
    ));
    assert!(crippen_logp_mr(&mol("c1ccccc1")).unmatched.is_empty());
}

#[test]
fn sulfur_and_phosphorus_are_optional_in_tpsa() {
    let m = mol("CS(C)=O");
    assert!(close(tpsa(&m), 36.28, 0.01));
    assert!(close(tpsa_with_options(&m, false), 17.07, 0.01));
}

#[test]
fn hbd_hba_and_rotatable_bonds() {
    let d = basic_descriptors(&mol("CC(=O)Nc1ccc(O)cc1"));
    assert_eq!(d.hbd, 2);
    // carbonyl O and phenol O; the amide N is not an acceptor
    assert_eq!(d.hba, 2);
    assert_eq!(d.rotatable_bonds, 1);
    assert_eq!(d.aromatic_rings, 1);
    assert_eq!(d.heavy_atoms, 11);
}

#[test]
fn qed_is_strictly_inside_unit_interval() {
    for s in [
        "C",
        "CCO",
        "c1ccccc1",
        "CC(C)Cc1ccc(cc1)C(C)C(=O)O",
        "OC(=O)CC(O)(CC(=O)O)C(=O)O",
    ] {
        let q = qed(&mol(s));
        assert!(q > 0.0 && q < 1.0, "{s}: {q}");
    }
}

#[test]
fn sa_score_is_low_for_methane_and_higher_for_complex_molecules() {
    let methane = sa_score(&mol("C"));
    assert!(methane <= 1.5, "{methane}");
    let simple = sa_score(&mol("CCO"));
    let complex = sa_score(&mol(
        "C[C@H]1C[C@@]23CC[C@H]4[C@@](C)(CCC[C@@]4(C)C(=O)O)[C@H]2CC[C@]1(O)C3",
    ));
    assert!(complex > simple + 1.0, "{simple} {complex}");
    for s in ["C", "c1ccccc1", "C1CC2CCC1C2", "C1CCCCCCCCCCC1"] {
        let v = sa_score(&mol(s));
        assert!((1.0..=10.0).contains(&v));
    }
}

#[test]
fn sa_table_text_round_trip() {
    let ms: Vec<Molecule> = ["CCO", "c1ccccc1O", "CC(=O)O"]
        .iter()
        .map(|s| mol(s))
        .collect();
    let t = sa_table_from_corpus(&ms);
    assert_eq!(t.molecules, 3);
    assert_eq!(SaTable::parse(&t.to_text()).unwrap(), t);
}

#[test]
fn symmetry_score_examples() {
    assert_eq!(symmetry_score(&mol("c1ccccc1")), 1.0);
    assert_eq!(symmetry_score(&mol("C")), 1.0);
    let phenol = symmetry_score(&mol("Oc1ccccc1"));
    assert!(phenol > 0.0 && phenol < 1.0);
    assert_eq!(symmetry_score(&mol("OCCC(C)CBr")), 0.0);
}

#[test]
fn tanimoto_examples() {
    let a = morgan_fingerprint(&mol("c1ccccc1O"), DEFAULT_RADIUS, DEFAULT_NBITS);
    let b = morgan_fingerprint(&mol("c1ccccc1N"), DEFAULT_RADIUS, DEFAULT_NBITS);
    assert_eq!(tanimoto(&a, &a).unwrap(), 1.0);
    let t = tanimoto(&a, &b).unwrap();
    assert!(t > 0.0 && t < 1.0);
    assert_eq!(t, tanimoto(&b, &a).unwrap());
    let c = morgan_fingerprint(&mol("CCO"), DEFAULT_RADIUS, 1024);
    assert!(tanimoto(&a, &c).is_err());
}

#[test]
fn murcko_examples() {
    let s = murcko_scaffold(&mol("CC(C)Cc1ccc(cc1)C(C)C(=O)O")).unwrap();
    assert_eq!(s.canonical_smiles(), "c1ccccc1");
    let s = murcko_scaffold(&mol("O=C(Nc1ccccc1)C1CCNCC1")).unwrap();
    assert_eq!(
        s.canonical_smiles(),
        mol("O=C(Nc1ccccc1)C1CCNCC1").canonical_smiles()
    );
    let s = murcko_scaffold(&mol("CCc1ccc(CC2CCCC2)cc1")).unwrap();
    assert_eq!(
        s.canonical_smiles(),
        mol("c1ccc(CC2CCCC2)cc1").canonical_smiles()
    );
    assert!(murcko_scaffold(&mol("CCCC")).is_none());
    assert_eq!(ring_systems(&mol("c1ccc2ccccc2c1CC1CC1")).len(), 2);
}

fn shuffled(m: &Molecule, seed: u64) -> Molecule {
    let mut ranks: Vec<usize> = (0..m.num_atoms()).collect();
    ranks.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    parse_smiles(&write_smiles_with_ranks(m, &ranks)).unwrap()
}

const POOL: &[&str] = &[
    "CC(=O)Oc1ccccc1C(=O)O",
    "Cn1cnc2c1c(=O)n(C)c(=O)n2C",
    "Cc1ccc(F)c(NC(=O)c2ccc(S(=O)(=O)CO)cc2)c1",
    "Cc1cc(C(=O)NC2CC2)c(CO)n1-c1ccc2c(c1)OC=CO2",
    "COc1cc(Cl)c(C)cc1NC(=O)c1ccc(=O)n(CO)c1",
    "C[C@H](N)C(=O)O",
    "O=P(Oc1ccccc1)(Oc1ccccc1)Oc1ccccc1",
    "c1ccc2occc2c1",
    "CC1CCC(=O)CC1",
    "F/C=C/c1ccncc1",
];

proptest! {
    #[test]
    fn descriptors_ignore_atom_order(k in 0..POOL.len(), seed in any::<u64>()) {
        let m = mol(POOL[k]);
        let p = shuffled(&m, seed);
        prop_assert_eq!(basic_descriptors(&m), basic_descriptors(&p));
        prop_assert_eq!(qed(&m), qed(&p));
        prop_assert_eq!(sa_score(&m), sa_score(&p));
        prop_assert_eq!(symmetry_score(&m), symmetry_score(&p));
        prop_assert_eq!(
            morgan_fingerprint(&m, 2, 2048),
            morgan_fingerprint(&p, 2, 2048)
        );
        prop_assert_eq!(
            murcko_scaffold(&m).map(|s| s.canonical_smiles().to_string()),
            murcko_scaffold(&p).map(|s| s.canonical_smiles().to_string())
        );
    }

    #[test]
    fn tanimoto_bounds(a in 0..POOL.len(), b in 0..POOL.len()) {
        let fa = morgan_fingerprint(&mol(POOL[a]), 2, 2048);
        let fb = morgan_fingerprint(&mol(POOL[b]), 2, 2048);
        let t = tanimoto(&fa, &fb).unwrap();
        prop_assert!((0.0..=1.0).contains(&t));
        prop_assert_eq!(t, tanimoto(&fb, &fa).unwrap());
        prop_assert_eq!(tanimoto(&fa, &fa).unwrap(), 1.0);
    }

    #[test]
    fn scaffold_is_idempotent_and_ignores_methyls(k in 0..POOL.len()) {
        let m = mol(POOL[k]);
        if let Some(s) = murcko_scaffold(&m) {
            let again = murcko_scaffold(&s).unwrap();
            prop_assert_eq!(again.canonical_smiles(), s.canonical_smiles());
        }
        let site = (0..m.num_atoms()).find(|&i| m.atom(i).total_h() > 0).unwrap();
        let mut b = m.to_builder();
        let c = b.add_atom(Atom::new(Element::C));
        b.add_bond(site, c, BondOrder::Single).unwrap();
        let methylated = b.build().unwrap();
        prop_assert!(basic_descriptors(&methylated).mw >= basic_descriptors(&m).mw);
        prop_assert_eq!(
            murcko_scaffold(&m).map(|s| s.canonical_smiles().to_string()),
            murcko_scaffold(&methylated).map(|s| s.canonical_smiles().to_string())
        );
    }
}
