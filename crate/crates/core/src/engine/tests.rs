use std::collections::HashSet;
use std::path::Path;

use super::*;
use crate::fitness::Constraint;

fn small_config(dir: &Path, seeds: &str, generations: usize, n: usize) -> RunConfig {
    let seed_path = dir.join("seeds.smi");
    std::fs::write(&seed_path, seeds).unwrap();
    RunConfig {
        seed_smiles: Some(seed_path),
        output_dir: dir.join("out"),
        rng_seed: 11,
        population_size: n,
        generations,
        ..RunConfig::default()
    }
}

#[test]
fn config_parses_keys_relative_paths_and_weights() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("w.txt"), "validity = 0.5\n").unwrap();
    let text = "# run\nseed_smiles = seeds.smi\noutput_dir = out # trailing\nrng_seed = 42\n\
                population_size = 12\ngenerations = 3\nweights = w.txt\n\
                weight.diversity = 0.2\nrule_population_size = 9\npredictor = table_or_surrogate:gap.tsv\n";
    let cfg = RunConfig::parse(text, dir.path()).unwrap();
    assert_eq!(cfg.seed_smiles, Some(dir.path().join("seeds.smi")));
    assert_eq!(cfg.output_dir, dir.path().join("out"));
    assert_eq!(
        (cfg.rng_seed, cfg.population_size, cfg.generations),
        (42, 12, 3)
    );
    assert_eq!(cfg.rule_evo.rule_pop_size, 9);
    assert_eq!(
        cfg.predictor,
        PredictorSpec::Table {
            path: dir.path().join("gap.tsv"),
            fallback: true
        }
    );
    let total: f64 = Constraint::ALL.iter().map(|&c| cfg.fitness.weight(c)).sum();
    assert!((total - 1.0).abs() < 1e-12);
    assert!(cfg.fitness.weight(Constraint::Validity) > cfg.fitness.weight(Constraint::Diversity));
}

#[test]
fn config_text_round_trips() {
    let mut cfg = RunConfig::default();
    cfg.apply_desk_scale();
    cfg.rng_seed = 99;
    let again = RunConfig::parse(&cfg.to_text(), Path::new("")).unwrap();
    assert_eq!(again.rng_seed, 99);
    assert_eq!(again.population_size, 50);
    assert_eq!(again.generations, 20);
    assert_eq!(again.rule_evo, cfg.rule_evo);
    for c in Constraint::ALL {
        assert!((again.fitness.weight(c) - cfg.fitness.weight(c)).abs() < 1e-12);
    }
}

#[test]
fn config_errors_are_config_errors() {
    for text in [
        "nonsense",
        "population_size = many",
        "colour = blue",
        "weight.nope = 1",
    ] {
        let err = RunConfig::parse(text, Path::new("")).unwrap_err();
        assert_eq!(err.exit_code(), 2, "{text}");
        assert!(err.to_string().contains("line 1"), "{err}");
    }
    let cfg = RunConfig {
        population_size: 1,
        ..RunConfig::default()
    };
    assert_eq!(cfg.validate().unwrap_err().exit_code(), 2);
    let cfg = RunConfig {
        seed_smiles: Some("/nonexistent/seeds.smi".into()),
        ..RunConfig::default()
    };
    assert!(cfg
        .validate()
        .unwrap_err()
        .to_string()
        .contains("missing file"));
}

#[test]
fn invalid_seed_reports_its_line() {
    let err = read_smiles_text("CCO\n\n# note\nC1CC\n", "seeds").unwrap_err();
    assert_eq!(err.exit_code(), 3);
    assert!(err.to_string().contains("line 4"), "{err}");
    let err = read_smiles_text("CCO\nC(C)(C)(C)(C)C\n", "seeds").unwrap_err();
    assert!(err.to_string().contains("line 2"), "{err}");
    assert_eq!(
        read_smiles_text("CCO name\n c1ccccc1 \n", "x")
            .unwrap()
            .len(),
        2
    );
}

#[test]
fn bundled_desk_seeds_are_twenty_distinct_valid_molecules() {
    let seeds = read_smiles_text(DESK_SEEDS, "bundled").unwrap();
    let distinct: HashSet<&str> = seeds.iter().map(|m| m.canonical_smiles()).collect();
    assert_eq!(seeds.len(), 20);
    assert_eq!(distinct.len(), 20);
}

#[test]
fn smallest_run_writes_every_artifact() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), "CC(=O)Oc1ccccc1C(=O)O\nc1ccc2occc2c1\n", 1, 2);
    let result = run(&cfg).unwrap();
    let out = &cfg.output_dir;
    let metrics = std::fs::read_to_string(out.join("metrics.csv")).unwrap();
    let lines: Vec<&str> = metrics.lines().collect();
    assert_eq!(lines[0], METRICS_HEADER);
    assert_eq!(lines.len(), 2);
    assert_eq!(
        lines[1].split(',').count(),
        METRICS_HEADER.split(',').count()
    );

    let library = std::fs::read_to_string(out.join("library.smi")).unwrap();
    assert_eq!(library.lines().count(), result.population.len());
    for line in library.lines() {
        let cols: Vec<&str> = line.split('\t').collect();
        assert_eq!(cols.len(), 4);
        for c in &cols[1..] {
            c.parse::<f64>().unwrap();
        }
    }
    let rules = std::fs::read_to_string(out.join("rules_final.json")).unwrap();
    assert_eq!(crate::ruleset::rules_from_json(&rules).unwrap().len(), 30);
    for line in std::fs::read_to_string(out.join("provenance.jsonl"))
        .unwrap()
        .lines()
    {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!(v["smiles"].is_string() && v["admitted"].is_boolean());
    }
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("run_manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["rng_seed"], 11);
    assert_eq!(manifest["config"]["population_size"], "2");
}

#[test]
fn unwritable_output_directory_aborts() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "x").unwrap();
    let mut cfg = small_config(dir.path(), "CCO\nc1ccccc1O\n", 1, 2);
    cfg.output_dir = blocker.join("out");
    let err = run(&cfg).unwrap_err();
    assert!(matches!(err, EngineError::Output { .. }), "{err}");
}

#[test]
fn runs_are_reproducible_and_keep_their_invariants() {
    let seeds =
        "CC(=O)Nc1ccc(O)cc1\nc1ccc2occc2c1\nCC1CCC(=O)CC1\nOC(=O)Cc1ccccc1\nNC(=O)c1cccnc1\n";
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), seeds, 4, 12);
    let inputs = RunInputs::load(&cfg).unwrap();
    let a = run_evolution(&cfg, &inputs).unwrap();
    let b = run_evolution(&cfg, &inputs).unwrap();
    assert_eq!(library_text(&a.population), library_text(&b.population));
    assert_eq!(metrics_text(&a.metrics), metrics_text(&b.metrics));

    let seed_set: HashSet<String> = inputs
        .seeds
        .iter()
        .map(|m| m.canonical_smiles().to_string())
        .collect();
    let mut prev_max = f64::NEG_INFINITY;
    let mut prev_mean = None;
    for row in &a.metrics {
        assert_eq!(row.validity, 1.0);
        assert!(row.max_fitness >= prev_max);
        if let Some(p) = prev_mean {
            assert_eq!(row.prev_mean_fitness, p);
        }
        if row.rule_accepted {
            assert!(row.mean_fitness > row.prev_mean_fitness);
        }
        prev_max = row.max_fitness;
        prev_mean = Some(row.mean_fitness);
    }
    for rec in a.provenance.iter().filter(|r| r.provenance.generation > 0) {
        assert!(!seed_set.contains(&rec.smiles), "{}", rec.smiles);
    }
    let distinct: HashSet<&str> = a.population.iter().map(|m| m.smiles.as_str()).collect();
    assert_eq!(distinct.len(), a.population.len());
    assert!(a.population.len() <= 12);
}

#[test]
fn novelty_against_a_reference_file() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = small_config(dir.path(), "CC(=O)Nc1ccc(O)cc1\nOC(=O)Cc1ccccc1\n", 3, 8);
    let reference = dir.path().join("ref.smi");
    std::fs::write(&reference, "").unwrap();
    cfg.reference_smiles = Some(reference.clone());
    let inputs = RunInputs::load(&cfg).unwrap();
    let plain = run_evolution(&cfg, &inputs).unwrap();
    assert!(plain.metrics.iter().all(|r| r.novelty == 1.0));

    let last: Vec<&str> = plain
        .population
        .iter()
        .filter(|m| m.provenance.operator != Operator::Seed)
        .map(|m| m.smiles.as_str())
        .collect();
    assert!(!last.is_empty());
    std::fs::write(&reference, last.join("\n")).unwrap();
    let inputs = RunInputs::load(&cfg).unwrap();
    let known = run_evolution(&cfg, &inputs).unwrap();
    assert_eq!(known.metrics.last().unwrap().novelty, 0.0);
}

#[test]
fn metrics_row_formats_fixed_precision() {
    let row = GenerationMetrics {
        generation: 3,
        mean_fitness: 0.5,
        prev_mean_fitness: 0.25,
        max_fitness: 1.0 / 3.0,
        population_size: 10,
        offspring: 7,
        validity: 1.0,
        internal_diversity: 0.0,
        similarity_to_initial: 0.0,
        novelty: 1.0,
        scaffold_diversity: 0.1,
        lipinski: 1.0,
        ghose: 0.0,
        veber: 1.0,
        mean_qed: 0.5,
        mean_logp: -1.0,
        mean_sa: 2.0,
        mean_gap: None,
        rule_accepted: true,
        strategy_success: [0.0; 7],
    };
    let csv = row.csv_row();
    assert!(csv.starts_with("3,0.500000,0.250000,0.333333,10,7,1.000000,"));
    assert!(csv.contains(",2.000000,,1,0.000000"));
}
