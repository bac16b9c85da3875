use proptest::prelude::*;

use super::*;
use crate::molgraph::{check_validity, parse_smiles};

fn mol(s: &str) -> Molecule {
    parse_smiles(s).unwrap()
}

fn canon(s: &str) -> String {
    mol(s).canonical_smiles().to_string()
}

fn registry() -> Registry {
    Registry::bundled()
}

fn transform(name: &str) -> Transformation {
    registry()
        .transformation(name)
        .unwrap_or_else(|| panic!("no transformation {name}"))
        .clone()
}

fn apply(name: &str, s: &str) -> Option<String> {
    apply_transformation(&transform(name), &mol(s)).map(|m| m.canonical_smiles().to_string())
}

fn rule(conditions: Vec<Condition>, names: &[&str]) -> Rule {
    Rule {
        id: 1,
        conditions,
        transformations: names.iter().map(|n| transform(n)).collect(),
        weight: 1.0,
    }
}

fn mw_below(t: f64) -> Condition {
    Condition::new(ConditionKind::PropertyBelow {
        property: Property::Mw,
        threshold: t,
    })
}

#[test]
fn bundled_registry_covers_every_kind() {
    let r = registry();
    assert_eq!(r.transformations.len(), 36);
    for k in TransformKind::ALL {
        assert!(r.of_kind(k).count() > 0, "{k:?}");
    }
    let mut names: Vec<&str> = r.transformations.iter().map(|t| t.name()).collect();
    names.sort_unstable();
    names.dedup();
    assert_eq!(names.len(), 36);
}

#[test]
fn phenol_worked_examples() {
    assert_eq!(
        apply("o_methylation", "Oc1ccccc1").unwrap(),
        canon("COc1ccccc1")
    );
    assert_eq!(
        apply("para_ch_to_n", "Oc1ccccc1").unwrap(),
        canon("Oc1ccncc1")
    );
    assert_eq!(
        apply("saturate_aromatic_ring", "Oc1ccccc1").unwrap(),
        canon("OC1CCCCC1")
    );
    let fused = apply("fuse_benzene", "Oc1ccccc1").unwrap();
    assert!(
        fused == canon("Oc1cccc2ccccc12") || fused == canon("Oc1ccc2ccccc2c1"),
        "{fused}"
    );
}

#[test]
fn more_transformations() {
    assert_eq!(
        apply("acid_to_amide", "OC(=O)c1ccccc1").unwrap(),
        canon("NC(=O)c1ccccc1")
    );
    assert_eq!(
        apply("ketone_reduction", "CC1CCC(=O)CC1").unwrap(),
        canon("CC1CCC(O)CC1")
    );
    assert_eq!(apply("dehalogenation", "Clc1ccccc1").unwrap(), "c1ccccc1");
    assert_eq!(apply("aromatic_n_to_ch", "c1ccncc1").unwrap(), "c1ccccc1");
    assert_eq!(
        apply("aromatize_cyclohexane", "OC1CCCCC1").unwrap(),
        canon("Oc1ccccc1")
    );
    assert_eq!(
        apply("expand_ring", "C1CCCCC1").unwrap(),
        canon("C1CCCCCC1")
    );
    assert_eq!(
        apply("contract_ring", "C1CCCCC1").unwrap(),
        canon("C1CCCC1")
    );
    assert_eq!(
        apply("reduce_five_ring_double_bond", "Cc1cccc2ccoc12").unwrap(),
        canon("Cc1cccc2c1OCC2")
    );
    assert_eq!(
        apply("side_chain_removal", "CCc1ccccc1").unwrap(),
        "c1ccccc1"
    );
}

#[test]
fn missing_site_or_impossible_edit_is_null() {
    assert!(apply("o_methylation", "c1ccccc1").is_none());
    assert!(apply("contract_ring", "C1CC1").is_none());
    // a bare ring carbon cannot be aromatized when it carries a double bond
    assert!(apply("aromatize_cyclohexane", "O=C1CCCCC1").is_none());
    // fluorine on a carbon with no hydrogen left
    assert!(apply("methyl", "FC(F)(F)F").is_none());
}

#[test]
fn site_is_the_lowest_ranked_match() {
    let m = mol("Cc1ccc(O)cc1");
    let t = transform("hydroxyl");
    let a = apply_transformation(&t, &m).unwrap();
    let b = apply_transformation(&t, &mol("Oc1ccc(C)cc1")).unwrap();
    assert_eq!(a.canonical_smiles(), b.canonical_smiles());
}

#[test]
fn condition_examples() {
    assert!(eval_condition(&mw_below(200.0), &mol("Oc1ccccc1")));
    let aromatic = Condition::new(ConditionKind::MinAromaticRings { count: 1 });
    assert!(!eval_condition(&aromatic, &mol("C1CCCCC1")));
    assert!(eval_condition(
        &Condition::new(ConditionKind::LipinskiPass {}),
        &mol("C")
    ));
    let stable = Condition::new(ConditionKind::NoUnstableMoiety {});
    assert!(eval_condition(&stable, &mol("CCO")));
    assert!(!eval_condition(&stable, &mol("COOC")));
    let donor = Condition::new(ConditionKind::HasFeature {
        feature: Feature::Donor,
    });
    assert!(eval_condition(&donor, &mol("Oc1ccccc1")));
    assert!(!eval_condition(&donor, &mol("c1ccccc1")));
}

#[test]
fn malformed_pattern_fails_at_load() {
    let bad = r#"[{"conditions":[{"category":"structural","kind":"has_substructure",
        "params":{"pattern":"[C"}}],"transformations":[],"weight":1.0}]"#;
    assert!(matches!(rules_from_json(bad), Err(RuleError::Json(_))));
    let wrong_category = r#"[{"conditions":[{"category":"advanced","kind":"lipinski_pass",
        "params":{}}],"transformations":[{"kind":"group_addition","params":{"name":"x",
        "site":"c","actions":[{"op":"attach","at":0,"group":"C"}]}}],"weight":1.0}]"#;
    assert!(matches!(
        rules_from_json(wrong_category),
        Err(RuleError::Invalid(_))
    ));
    let bad_index = r#"[{"conditions":[{"category":"drug_likeness","kind":"lipinski_pass",
        "params":{}}],"transformations":[{"kind":"group_addition","params":{"name":"x",
        "site":"c","actions":[{"op":"attach","at":3,"group":"C"}]}}],"weight":1.0}]"#;
    assert!(matches!(
        rules_from_json(bad_index),
        Err(RuleError::Invalid(_))
    ));
}

#[test]
fn rule_json_round_trip() {
    let r = rule(vec![mw_below(300.0)], &["methyl", "fuse_benzene"]);
    let text = rules_to_json(std::slice::from_ref(&r));
    assert_eq!(rules_from_json(&text).unwrap(), vec![r]);
    let reg = registry();
    let again = Registry::from_json(&serde_json::to_string(&reg).unwrap()).unwrap();
    assert_eq!(again, reg);
}

#[test]
fn rule_application_semantics() {
    let phenol = mol("Oc1ccccc1");
    let unmet = rule(vec![mw_below(50.0)], &["o_methylation"]);
    assert!(apply_rule(&unmet, &phenol).is_none());

    let single = rule(vec![mw_below(200.0)], &["o_methylation"]);
    assert_eq!(
        apply_rule(&single, &phenol).unwrap().canonical_smiles(),
        apply_transformation(&transform("o_methylation"), &phenol)
            .unwrap()
            .canonical_smiles()
    );

    // the second step needs a hydroxyl that the first one consumed
    let broken = rule(vec![mw_below(200.0)], &["o_methylation", "dehydroxylation"]);
    let before = phenol.canonical_smiles().to_string();
    assert!(apply_rule(&broken, &phenol).is_none());
    assert_eq!(phenol.canonical_smiles(), before);

    let chain = rule(
        vec![mw_below(200.0)],
        &["saturate_aromatic_ring", "alcohol_oxidation"],
    );
    assert_eq!(
        apply_rule(&chain, &phenol).unwrap().canonical_smiles(),
        canon("O=C1CCCCC1")
    );
}

const POOL: &[&str] = &[
    "Oc1ccccc1",
    "CC(=O)Oc1ccccc1C(=O)O",
    "Cn1cnc2c1c(=O)n(C)c(=O)n2C",
    "CC(C)Cc1ccc(cc1)C(C)C(=O)O",
    "CC1CCC(=O)CC1",
    "c1ccc2occc2c1",
    "CC(=O)Nc1ccc(O)cc1",
    "c1ccc2[nH]ccc2c1",
    "NC(=O)c1cccnc1",
    "CN1CCN(CC1)c1ccccc1",
    "C[C@H](N)C(=O)O",
    "Cc1ccc(S(N)(=O)=O)cc1",
];

proptest! {
    #[test]
    fn transformations_yield_valid_molecules_or_null(k in 0..POOL.len(), t in 0..36usize) {
        let reg = registry();
        let m = mol(POOL[k]);
        let before = m.canonical_smiles().to_string();
        if let Some(out) = apply_transformation(&reg.transformations[t], &m) {
            prop_assert!(check_validity(&out).valid);
            prop_assert!(out.is_connected());
            let again = apply_transformation(&reg.transformations[t], &m).unwrap();
            prop_assert_eq!(again.canonical_smiles(), out.canonical_smiles());
        }
        prop_assert_eq!(m.canonical_smiles(), before);
    }

    #[test]
    fn conditions_are_pure(k in 0..POOL.len()) {
        let reg = registry();
        let m = mol(POOL[k]);
        let first: Vec<bool> = reg.conditions.iter().map(|c| eval_condition(c, &m)).collect();
        let second: Vec<bool> = reg.conditions.iter().map(|c| eval_condition(c, &m)).collect();
        prop_assert_eq!(first, second);
    }
}
