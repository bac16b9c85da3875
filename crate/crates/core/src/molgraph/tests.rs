use super::*;

fn mol(s: &str) -> Molecule {
    parse_smiles(s).unwrap_or_else(|e| panic!("{s}: {e}"))
}

fn canon(s: &str) -> String {
    mol(s).canonical_smiles().to_string()
}

#[test]
fn methane_has_four_hydrogens() {
    let m = mol("C");
    assert_eq!(m.num_atoms(), 1);
    assert_eq!(m.atom(0).implicit_h, 4);
}

#[test]
fn benzene_atoms_are_aromatic_with_one_h() {
    let m = mol("c1ccccc1");
    assert_eq!(m.num_atoms(), 6);
    for a in m.atoms() {
        assert!(a.aromatic);
        assert_eq!(a.total_h(), 1);
    }
    assert_eq!(m.rings().len(), 1);
    assert!(m.ring_is_aromatic(0));
}

#[test]
fn unclosed_ring_is_an_error() {
    assert_eq!(
        parse_smiles("C1CC").unwrap_err(),
        SmilesError::UnclosedRing(1)
    );
}

#[test]
fn grammar_errors() {
    assert!(matches!(parse_smiles(""), Err(SmilesError::Empty)));
    assert!(matches!(
        parse_smiles("C(C"),
        Err(SmilesError::UnclosedBranch(1))
    ));
    assert!(matches!(
        parse_smiles("CC)"),
        Err(SmilesError::Syntax { pos: 2, .. })
    ));
    assert!(matches!(
        parse_smiles("C[Xe]"),
        Err(SmilesError::UnknownElement { .. })
    ));
    assert!(matches!(
        parse_smiles("[13CH4]"),
        Err(SmilesError::Syntax { .. })
    ));
    assert!(matches!(
        parse_smiles("c1ccnc1"),
        Err(SmilesError::Valence(_))
    ));
    assert!(matches!(
        parse_smiles("C=="),
        Err(SmilesError::Syntax { .. })
    ));
}

#[test]
fn kekule_input_is_perceived_aromatic() {
    assert_eq!(canon("C1=CC=CC=C1"), canon("c1ccccc1"));
    assert_eq!(canon("C1=CC=CC=C1"), "c1ccccc1");
}

#[test]
fn cyclohexane_is_not_aromatic() {
    let m = mol("C1CCCCC1");
    assert_eq!(m.rings().len(), 1);
    assert!(!m.ring_is_aromatic(0));
    assert_eq!(m.aromatic_ring_count(), 0);
}

#[test]
fn naphthalene_two_rings_ten_aromatic_atoms() {
    let m = mol("c1ccc2ccccc2c1");
    assert_eq!(m.rings().len(), 2);
    assert!(m.rings().iter().all(|r| r.len() == 6));
    assert_eq!(m.atoms().iter().filter(|a| a.aromatic).count(), 10);
    assert_eq!(m.aromatic_ring_count(), 2);
}

#[test]
fn heteroaromatics() {
    for s in [
        "c1cc[nH]c1",
        "c1ccoc1",
        "c1ccsc1",
        "c1ccncc1",
        "c1ccc2[nH]ccc2c1",
        "O=c1cccc[nH]1",
        "c1ccc2occc2c1",
        "Cn1cnc2c1c(=O)n(C)c(=O)n2C",
        "c1ccc2ccccc2c1",
        "[O-][n+]1ccccc1",
        "c1cc2cccc2ccc1",
    ] {
        let m = mol(s);
        assert!(
            m.atoms().iter().any(|a| a.aromatic),
            "{s} should be aromatic"
        );
        assert!(check_validity(&m).valid, "{s}: {:?}", check_validity(&m));
    }
}

#[test]
fn azulene_keeps_its_fusion_bond_kekule() {
    let m = mol("C1=CC2=CC=CC=CC2=C1");
    assert!(m.atoms().iter().all(|a| a.aromatic));
    assert_eq!(m.aromatic_ring_count(), 0);
    assert_eq!(canon("C1=CC2=CC=CC=CC2=C1"), canon(m.canonical_smiles()));
}

#[test]
fn ring_hydrogenation_breaks_aromaticity() {
    let m = mol("C1=CCC=C1");
    assert_eq!(m.aromatic_ring_count(), 0);
    let m = mol("O=C1C=CC(=O)C=C1");
    assert_eq!(m.aromatic_ring_count(), 0);
}

#[test]
fn canonical_examples() {
    assert_eq!(canon("OCC"), canon("CCO"));
    let rotations = ["c1ccccc1", "c1cc:c:cc1", "C1=CC=CC=C1", "c1c2ccccc2"];
    let _ = rotations[3];
    let benzene = canon("c1ccccc1");
    for s in &rotations[..3] {
        assert_eq!(canon(s), benzene);
    }
    for s in [
        "CC(=O)Oc1ccccc1C(=O)O",
        "Oc1ccccc1",
        "C1CCC2CCCCC2C1",
        "N[C@@H](C)C(=O)O",
    ] {
        let c = canon(s);
        assert_eq!(canon(&c), c, "idempotence for {s}");
    }
}

#[test]
fn hydrogen_atoms_fold_into_neighbors() {
    assert_eq!(canon("[H]C([H])([H])[H]"), "C");
    assert_eq!(canon("[H]OC"), "CO");
}

#[test]
fn tetrahedral_marks_survive_reordering() {
    let a = canon("N[C@@H](C)C(=O)O");
    let b = canon("OC(=O)[C@@H](N)C");
    let c = canon("C[C@H](N)C(=O)O");
    assert_eq!(a, b);
    assert_eq!(a, c);
    let d = canon("N[C@H](C)C(=O)O");
    assert_ne!(a, d);
}

#[test]
fn cis_trans_marks_survive_reordering() {
    let a = canon("F/C=C/Cl");
    let b = canon("Cl/C=C/F");
    assert_eq!(a, b);
    assert_ne!(a, canon("F/C=C\\Cl"));
    assert_eq!(canon("C(\\F)=C/Cl"), canon("F/C=C/Cl"));
}

#[test]
fn stray_stereo_marks_are_dropped() {
    assert_eq!(canon("C[C@H](C)C"), "CC(C)C");
    assert_eq!(canon("C/C"), "CC");
}

#[test]
fn validity_examples() {
    let r = check_validity(&mol("CC(C)(C)(C)C"));
    assert!(!r.valid);
    assert!(r.violations.iter().any(|v| v.reason.contains("exceeds")));
    assert!(check_validity(&mol("[NH4+]")).valid);
    assert!(check_validity(&mol("c1ccccc1")).valid);
    assert!(!check_validity(&mol("CC.CC")).valid);
    assert!(!check_validity(&mol("C[N](=O)=O")).valid);
    assert!(check_validity(&mol("C[N+](=O)[O-]")).valid);
    assert!(check_validity(&mol("CS(=O)(=O)C")).valid);
    assert!(check_validity(&mol("OP(=O)(O)O")).valid);
}

#[test]
fn charges_and_brackets_round_trip() {
    for s in [
        "[O-]C(=O)C",
        "C[N+](C)(C)C",
        "[nH]1cccc1",
        "[Cl-].[NH4+]",
        "B(O)(O)c1ccccc1",
    ] {
        let c = canon(s);
        assert_eq!(canon(&c), c, "{s}");
        assert_eq!(mol(&c).num_atoms(), mol(s).num_atoms());
    }
}

#[test]
fn ring_closure_numbers_above_nine() {
    let m = mol("C%10CCCCC%10");
    assert_eq!(m.rings().len(), 1);
    assert_eq!(canon("C%10CCCCC%10"), canon("C1CCCCC1"));
}

#[test]
fn cubane_rings_and_canonical_form() {
    let m = mol("C12C3C4C1C5C2C3C45");
    assert_eq!(m.rings().len(), 5);
    let c = canon("C12C3C4C1C5C2C3C45");
    assert_eq!(canon(&c), c);
}

#[test]
fn symmetry_classes_of_phenol() {
    let m = mol("Oc1ccccc1");
    let classes = symmetry_classes(&m);
    let mut distinct = classes.clone();
    distinct.sort_unstable();
    distinct.dedup();
    // O, ipso, ortho pair, meta pair, para
    assert_eq!(distinct.len(), 5);
}

#[test]
fn canonical_ranks_are_a_permutation() {
    let m = mol("CC(=O)Oc1ccccc1C(=O)O");
    let mut r = m.canonical_ranks().to_vec();
    r.sort_unstable();
    assert_eq!(r, (0..m.num_atoms()).collect::<Vec<_>>());
}

#[test]
fn writing_with_any_ranking_reparses_to_same_molecule() {
    let m = mol("CC(C)Cc1ccc(cc1)[C@@H](C)C(=O)O");
    let n = m.num_atoms();
    for shift in 0..n {
        let ranks: Vec<usize> = (0..n).map(|i| (i + shift) % n).collect();
        let s = write_smiles_with_ranks(&m, &ranks);
        assert_eq!(canon(&s), m.canonical_smiles(), "{s}");
    }
}

#[test]
fn perceive_is_a_fixed_point() {
    let m = mol("c1ccc2c(c1)cc[nH]2");
    let again = perceive_rings_and_aromaticity(&m);
    assert_eq!(again.canonical_smiles(), m.canonical_smiles());
}

#[test]
fn builder_edits() {
    let m = mol("c1ccccc1");
    let mut b = m.to_builder();
    let o = b.add_atom(Atom::new(Element::O));
    b.add_bond(0, o, BondOrder::Single).unwrap();
    let phenol = b.build().unwrap();
    assert_eq!(phenol.canonical_smiles(), canon("Oc1ccccc1"));
    let mut b = phenol.to_builder();
    b.remove_atoms(&[o]);
    assert_eq!(b.build().unwrap().canonical_smiles(), "c1ccccc1");
}
