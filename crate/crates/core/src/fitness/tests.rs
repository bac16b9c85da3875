use proptest::prelude::*;

use super::*;
use crate::molgraph::parse_smiles;

fn mol(s: &str) -> Molecule {
    parse_smiles(s).unwrap()
}

fn ctx_with(sample: &[&str], seeds: &[&str]) -> ScoringContext {
    let sample: Vec<Molecule> = sample.iter().map(|s| mol(s)).collect();
    let seeds: Vec<Molecule> = seeds.iter().map(|s| mol(s)).collect();
    ScoringContext::new(&sample, &seeds, Predictor::Surrogate)
}

#[test]
fn default_weights_are_normalized() {
    let cfg = FitnessConfig::default();
    let total: f64 = cfg.weights().iter().sum();
    assert!((total - 1.0).abs() < 1e-9);
    // the listed defaults sum to 0.95 before normalization
    assert!((cfg.weight(Constraint::PropertyCoverage) - 0.18 / 0.95).abs() < 1e-9);
    assert!(cfg.weight(Constraint::Symmetry) > cfg.weight(Constraint::Validity));
}

#[test]
fn weights_file_overrides_and_renormalizes() {
    let cfg =
        FitnessConfig::from_weights_text("# custom\nsymmetry = 0.0\nvalidity=0.21\n").unwrap();
    assert_eq!(cfg.weight(Constraint::Symmetry), 0.0);
    let total: f64 = cfg.weights().iter().sum();
    assert!((total - 1.0).abs() < 1e-9);
    assert!(FitnessConfig::from_weights_text("novelty=1").is_err());
    assert!(FitnessConfig::from_weights_text("symmetry=-1").is_err());
    assert!(FitnessConfig::from_weights_text("symmetry").is_err());
    let zeros: String = Constraint::ALL
        .iter()
        .map(|c| format!("{}=0\n", c.name()))
        .collect();
    assert!(FitnessConfig::from_weights_text(&zeros).is_err());
    let round = FitnessConfig::from_weights_text(&cfg.to_text()).unwrap();
    for c in Constraint::ALL {
        assert!((round.weight(c) - cfg.weight(c)).abs() < 1e-12);
    }
}

#[test]
fn weighted_sum_examples() {
    let mut raw = [0.0; 12];
    raw[0] = 0.5;
    raw[1] = 0.5;
    let cfg = FitnessConfig::with_weights(raw).unwrap();
    let mut values = [0.0; 12];
    values[0] = 1.0;
    let sv = ScoreVector {
        values,
        predicted_gap: None,
    };
    assert_eq!(score_molecule(&sv, &cfg), 0.5);
    let ones = ScoreVector {
        values: [1.0; 12],
        predicted_gap: None,
    };
    assert!((score_molecule(&ones, &FitnessConfig::default()) - 1.0).abs() < 1e-12);
    let zeros = ScoreVector {
        values: [0.0; 12],
        predicted_gap: None,
    };
    assert_eq!(score_molecule(&zeros, &FitnessConfig::default()), 0.0);
}

#[test]
fn trapezoid_shape() {
    let t = Trapezoid::new(0.0, 2.0, 8.0, 12.0);
    assert_eq!(t.desirability(-1.0), 0.0);
    assert_eq!(t.desirability(1.0), 0.5);
    assert_eq!(t.desirability(5.0), 1.0);
    assert_eq!(t.desirability(10.0), 0.5);
    assert_eq!(t.desirability(13.0), 0.0);
}

#[test]
fn compliance_examples() {
    let aspirin = compliance_flags(&mol("CC(=O)Oc1ccccc1C(=O)O"));
    assert!(aspirin.lipinski);
    assert!(aspirin.veber);
    assert!(aspirin.ghose);
    assert!(!compliance_flags(&mol("Oc1ccccc1")).ghose);
    let heavy = mol(&"C".repeat(45));
    assert!(basic_descriptors(&heavy).mw > 600.0);
    assert!(!compliance_flags(&heavy).lipinski);
    // 11 rotatable bonds
    let floppy = mol("OCCCCCCCCCCCCO");
    assert_eq!(basic_descriptors(&floppy).rotatable_bonds, 11);
    assert!(!compliance_flags(&floppy).veber);
}

#[test]
fn cns_mpo_examples() {
    assert_eq!(cns_mpo_profile(1.0, 250.0, 60.0, 0.0), 5.0);
    assert_eq!(cns_mpo_profile(7.0, 700.0, 200.0, 6.0), 0.0);
    let profile = cns_mpo_profile(2.8, 305.0, 44.8, 1.0);
    assert!(profile >= CNS_FAVORABLE, "{profile}");
    let mut last = f64::INFINITY;
    for t in (90..200).step_by(5) {
        let v = cns_mpo_profile(2.0, 300.0, t as f64, 1.0);
        assert!(v <= last);
        last = v;
    }
    assert!((0.0..=5.0).contains(&cns_mpo(&mol("CN1CCC[C@H]1c1cccnc1"))));
}

#[test]
fn predictor_backends() {
    let table =
        Predictor::table_from_text("c1ccccc1\t6.2\n# comment\nC1=CC=CC=C1\t6.2\n", false).unwrap();
    assert_eq!(table.predict(&mol("c1ccccc1")).unwrap(), 6.2);
    assert!(matches!(
        table.predict(&mol("CCO")),
        Err(PredictError::Missing(s)) if s == "CCO"
    ));
    let with_fallback = Predictor::table_from_text("c1ccccc1\t6.2\n", true).unwrap();
    assert_eq!(
        with_fallback.predict(&mol("CCO")).unwrap(),
        surrogate_gap(&mol("CCO"))
    );
    assert!(Predictor::table_from_text("c1ccccc1 6.2\n", false).is_err());
    // benzene: one aromatic ring, six conjugated bonds
    let g = surrogate_gap(&mol("c1ccccc1"));
    assert!((g - (7.0 - 0.35 - 0.48)).abs() < 1e-12);
    assert_eq!(surrogate_gap(&mol("CCCC")), 7.0);
    assert_eq!(conjugated_bond_count(&mol("C=CC=C")), 3);
    let p = Predictor::Surrogate;
    let m = mol("CC(=O)Nc1ccc(O)cc1");
    assert_eq!(p.predict(&m).unwrap(), p.predict(&m).unwrap());
}

#[test]
fn score_vector_context_dependence() {
    let cfg = FitnessConfig::default();
    let phenol = mol("Oc1ccccc1");
    let ctx = ctx_with(&["Oc1ccccc1", "Oc1ccccc1"], &["Cc1ccccc1"]);
    let sv = score_vector(&phenol, &ctx, &cfg);
    assert_eq!(sv.get(Constraint::Diversity), 0.0);
    assert_eq!(sv.get(Constraint::StructuralIntegrity), 1.0);
    assert_eq!(sv.get(Constraint::Validity), 1.0);
    assert!(!sv.prediction_failed());

    let ctx = ctx_with(&[], &["C1CCCCC1"]);
    let sv = score_vector(&phenol, &ctx, &cfg);
    assert_eq!(sv.get(Constraint::Diversity), 1.0);
    assert_eq!(sv.get(Constraint::StructuralIntegrity), 0.5);
    let chiral = mol("C[C@H](N)C(=O)O");
    let sv =
        score_vector_with_lineage(&mol("CC(N)C(=O)O"), &ctx, &cfg, Some(stereo_marks(&chiral)));
    assert_eq!(sv.get(Constraint::StructuralIntegrity), 0.25);
}

#[test]
fn score_components_for_simple_molecules() {
    let cfg = FitnessConfig::default();
    let ctx = ctx_with(&[], &[]);
    let sv = score_vector(&mol("COOC"), &ctx, &cfg);
    assert!((sv.get(Constraint::Stability) - 2.0 / 3.0).abs() < 1e-12);
    let sv = score_vector(&mol("CC=O"), &ctx, &cfg);
    assert_eq!(sv.get(Constraint::Reactivity), 0.5);
    let sv = score_vector(&mol("CC(=O)Nc1ccc(O)cc1"), &ctx, &cfg);
    assert_eq!(sv.get(Constraint::DrugLikeProperties), 1.0);
    assert_eq!(sv.get(Constraint::Reactivity), 1.0);
    assert!(sv.get(Constraint::Pharmacophore) >= 0.75);
}

#[test]
fn population_fitness_examples() {
    assert!((population_fitness(&[0.2, 0.4]).unwrap() - 0.3).abs() < 1e-15);
    assert_eq!(population_fitness(&[0.7]).unwrap(), 0.7);
    assert_eq!(population_fitness(&[]), Err(FitnessError::EmptyPopulation));
    assert_eq!(
        population_fitness(&[0.1, 0.7, 0.3]).unwrap(),
        population_fitness(&[0.3, 0.1, 0.7]).unwrap()
    );
}

proptest! {
    #[test]
    fn fitness_is_bounded_and_monotone(
        values in proptest::array::uniform12(0.0f64..=1.0),
        k in 0usize..12,
        bump in 0.0f64..=1.0,
    ) {
        let cfg = FitnessConfig::default();
        let sv = ScoreVector { values, predicted_gap: None };
        let f = score_molecule(&sv, &cfg);
        prop_assert!((0.0..=1.0).contains(&f));
        let mut higher = values;
        higher[k] = (higher[k] + bump).min(1.0);
        let g = score_molecule(&ScoreVector { values: higher, predicted_gap: None }, &cfg);
        prop_assert!(g >= f - 1e-15);
    }

    #[test]
    fn rescaling_weights_keeps_ranking(
        raw in proptest::array::uniform12(0.01f64..=1.0),
        scale in 0.1f64..=10.0,
        a in proptest::array::uniform12(0.0f64..=1.0),
        b in proptest::array::uniform12(0.0f64..=1.0),
    ) {
        let c1 = FitnessConfig::with_weights(raw).unwrap();
        let c2 = FitnessConfig::with_weights(raw.map(|w| w * scale)).unwrap();
        let sa = ScoreVector { values: a, predicted_gap: None };
        let sb = ScoreVector { values: b, predicted_gap: None };
        let d1 = score_molecule(&sa, &c1) - score_molecule(&sb, &c1);
        let d2 = score_molecule(&sa, &c2) - score_molecule(&sb, &c2);
        prop_assert!(d1.abs() < 1e-12 || d1.signum() == d2.signum());
    }

    #[test]
    fn cns_mpo_stays_in_range(
        logp in -5.0f64..10.0, mw in 0.0f64..900.0, tpsa in 0.0f64..250.0, hbd in 0.0f64..8.0
    ) {
        let v = cns_mpo_profile(logp, mw, tpsa, hbd);
        prop_assert!((0.0..=5.0).contains(&v));
    }
}
